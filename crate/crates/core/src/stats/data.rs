use std::io::{Read, Write};

use super::StatsError;

/// Named numeric columns with optional row labels.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    labels: Vec<String>,
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
}

/// Header of the column that holds row labels rather than numbers.
pub const LABEL_COLUMN: &str = "project";

impl DataMatrix {
    pub fn new(labels: Vec<String>) -> Self {
        Self {
            labels,
            names: Vec::new(),
            columns: Vec::new(),
        }
    }

    /// Appends a column. Values must be finite and match the number of rows.
    pub fn push_column(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<(), StatsError> {
        let name = name.into();
        if values.len() != self.labels.len() {
            return Err(StatsError::Shape(format!(
                "column {name:?} has {} values for {} rows",
                values.len(),
                self.labels.len()
            )));
        }
        if let Some(row) = values.iter().position(|v| !v.is_finite()) {
            return Err(StatsError::BadValue {
                column: name,
                row,
                reason: "not a finite number".into(),
            });
        }
        if self.names.contains(&name) {
            return Err(StatsError::Shape(format!("duplicate column {name:?}")));
        }
        self.names.push(name);
        self.columns.push(values);
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, name: &str) -> Result<&[f64], StatsError> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.columns[i].as_slice())
            .ok_or_else(|| StatsError::UnknownColumn(name.to_string()))
    }

    /// Reads CSV with a header row. A `project` column becomes the row labels;
    /// every other column must be numeric.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self, StatsError> {
        let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers: Vec<String> = csv
            .headers()
            .map_err(|e| StatsError::Csv(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let label_idx = headers.iter().position(|h| h == LABEL_COLUMN);
        let mut labels = Vec::new();
        let mut columns: Vec<Vec<f64>> = vec![Vec::new(); headers.len()];
        for (row, record) in csv.records().enumerate() {
            let record = record.map_err(|e| StatsError::Csv(e.to_string()))?;
            labels.push(match label_idx {
                Some(i) => record.get(i).unwrap_or_default().to_string(),
                None => (row + 1).to_string(),
            });
            for (col, field) in record.iter().enumerate() {
                if Some(col) == label_idx {
                    continue;
                }
                let value: f64 = field.parse().map_err(|_| StatsError::BadValue {
                    column: headers[col].clone(),
                    row,
                    reason: format!("{field:?} is not a number"),
                })?;
                columns[col].push(value);
            }
        }
        let mut out = DataMatrix::new(labels);
        for (col, (name, values)) in headers.into_iter().zip(columns).enumerate() {
            if Some(col) != label_idx {
                out.push_column(name, values)?;
            }
        }
        Ok(out)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), StatsError> {
        let mut csv = csv::Writer::from_writer(writer);
        let mut header = vec![LABEL_COLUMN.to_string()];
        header.extend(self.names.iter().cloned());
        csv.write_record(&header).map_err(|e| StatsError::Csv(e.to_string()))?;
        for (row, label) in self.labels.iter().enumerate() {
            let mut record = vec![label.clone()];
            record.extend(self.columns.iter().map(|c| c[row].to_string()));
            csv.write_record(&record).map_err(|e| StatsError::Csv(e.to_string()))?;
        }
        csv.flush().map_err(|e| StatsError::Csv(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_with_labels() {
        let text = "project,x,y\nBirds,1.5,2\nFish,3,-4.25\n";
        let data = DataMatrix::read_csv(text.as_bytes()).unwrap();
        assert_eq!(data.labels(), ["Birds", "Fish"]);
        assert_eq!(data.column("y").unwrap(), [2.0, -4.25]);
        let mut out = Vec::new();
        data.write_csv(&mut out).unwrap();
        let again = DataMatrix::read_csv(out.as_slice()).unwrap();
        assert_eq!(again, data);

        let mut exact = DataMatrix::new(vec!["a".into()]);
        exact.push_column("x", vec![0.1 + 0.2]).unwrap();
        let mut out = Vec::new();
        exact.write_csv(&mut out).unwrap();
        assert_eq!(DataMatrix::read_csv(out.as_slice()).unwrap(), exact);
    }

    #[test]
    fn rejects_non_numeric_and_missing() {
        assert!(DataMatrix::read_csv("x,y\n1,a\n".as_bytes()).is_err());
        assert!(DataMatrix::read_csv("x,y\n1,NaN\n".as_bytes()).is_err());
        let data = DataMatrix::read_csv("x\n1\n".as_bytes()).unwrap();
        assert_eq!(data.labels(), ["1"]);
        assert!(matches!(data.column("z"), Err(StatsError::UnknownColumn(_))));
    }
}
