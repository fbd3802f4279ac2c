//! Plain-text tables and bundle metadata.

use std::fmt::Write;

use serde::Serialize;
use talknet_core::stats::{descriptives, models, significance_stars, FTestResult, OlsFit, StatsError};

use crate::config::{EdgeScopeSetting, PipelineConfig};
use crate::stages::{RegressionReport, VariableRow};

/// Fixed decimals with the leading zero of `|x| < 1` dropped (`.652`, `-.093`).
pub fn compact(x: f64, decimals: usize) -> String {
    let s = format!("{x:.decimals$}");
    let s = if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    };
    if let Some(rest) = s.strip_prefix("0.") {
        format!(".{rest}")
    } else if let Some(rest) = s.strip_prefix("-0.") {
        format!("-.{rest}")
    } else {
        s
    }
}

fn p_text(p: f64) -> String {
    if p < 0.001 {
        "p < .001".into()
    } else {
        format!("p = {}", compact(p, 3))
    }
}

fn f_text(f: &FTestResult) -> String {
    format!("F({}, {}) = {}, {}", f.df1, f.df2, compact(f.f_value, 3), p_text(f.p_value))
}

fn render(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in rows {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c > 0 {
                line.push_str("  ");
            }
            line.push_str(cell);
            if c + 1 < row.len() {
                line.push_str(&" ".repeat(widths[c] - cell.chars().count()));
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn rule(text: &str) -> String {
    "-".repeat(text.lines().map(|l| l.chars().count()).max().unwrap_or(0))
}

/// Descriptive statistics of the project-level variables.
pub fn table2(rows: &[VariableRow]) -> Result<String, StatsError> {
    let mut out = String::from("Descriptive statistics of project measures\n\n");
    if rows.is_empty() {
        out.push_str("No project passed the filters.\n");
        return Ok(out);
    }
    let columns: [(&str, fn(&VariableRow) -> f64); 7] = [
        ("Quality", |r| r.quality),
        ("Fraction in communication network", |r| r.fraction_in_network),
        ("Determinism", |r| r.determinism),
        ("Degeneracy", |r| r.degeneracy),
        ("Effective information", |r| r.effective_information),
        ("Average connection strength", |r| r.average_strength),
        ("Number of project members", |r| r.member_count as f64),
    ];
    let mut table = vec![vec!["Variable".to_string(), "Mean (SD)".into(), "Median".into()]];
    for (label, f) in columns {
        let values: Vec<f64> = rows.iter().map(f).collect();
        let d = descriptives(&values)?;
        let sd = d.sd.map_or("n/a".to_string(), |s| compact(s, 3));
        table.push(vec![
            label.to_string(),
            format!("{} ({sd})", compact(d.mean, 3)),
            compact(d.median, 3),
        ]);
    }
    let body = render(&table);
    let mut lines = body.lines();
    let header = lines.next().unwrap_or_default();
    let line = rule(&body);
    writeln!(out, "{header}\n{line}").unwrap();
    for l in lines {
        writeln!(out, "{l}").unwrap();
    }
    writeln!(out, "{line}\nN = {}", rows.len()).unwrap();
    Ok(out)
}

const PREDICTOR_LABELS: [(&str, &str); 7] = [
    (models::FRACTION, "Fraction in communication network"),
    (models::DETERMINISM, "Determinism"),
    (models::DEGENERACY, "Degeneracy"),
    (models::STRENGTH, "Average connection strength (log)"),
    (models::MEMBERS, "Number of project members (log)"),
    (models::EFFECTIVE_INFORMATION, "Effective information"),
    (talknet_core::stats::ols::INTERCEPT, "Constant"),
];

fn cell(fit: &OlsFit, name: &str) -> String {
    let Some(c) = fit.coefficient(name) else {
        return String::new();
    };
    let stars = c.p_value.map_or("", significance_stars);
    match c.std_error {
        Some(se) => format!("{}{stars} ({})", compact(c.estimate, 3), compact(se, 3)),
        None => compact(c.estimate, 3),
    }
}

fn overall(fit: &OlsFit) -> String {
    match &fit.f_test {
        Some(f) => format!(
            "F({}, {}) = {}{}",
            f.df1,
            f.df2,
            compact(f.f_value, 2),
            significance_stars(f.p_value)
        ),
        None => "n/a".into(),
    }
}

/// Regression table with one column per model.
pub fn table3(report: &RegressionReport) -> String {
    let mut out = String::from("Effects of network structure on quality\n\n");
    let Some(m) = &report.models else {
        let reason = report.reason.as_deref().unwrap_or("no fit available");
        writeln!(out, "Models not estimated: {reason}.").unwrap();
        return out;
    };
    let fits = [&m.model1, &m.model2, &m.model3];
    let mut table = vec![vec![
        "Predictor".to_string(),
        "Model 1".into(),
        "Model 2".into(),
        "Model 3".into(),
    ]];
    for (name, label) in PREDICTOR_LABELS {
        let mut row = vec![label.to_string()];
        row.extend(fits.iter().map(|f| cell(f, name)));
        table.push(row);
    }
    let coef_rows = table.len();
    let mut tail = vec!["R^2".to_string()];
    tail.extend(fits.iter().map(|f| compact(f.r_squared, 3)));
    table.push(tail);
    let mut tail = vec!["F".to_string()];
    tail.extend(fits.iter().map(|f| overall(f)));
    table.push(tail);
    let mut tail = vec!["N".to_string()];
    tail.extend(fits.iter().map(|f| f.n.to_string()));
    table.push(tail);

    let body = render(&table);
    let line = rule(&body);
    for (i, l) in body.lines().enumerate() {
        if i == 1 || i == coef_rows {
            writeln!(out, "{line}").unwrap();
        }
        writeln!(out, "{l}").unwrap();
    }
    writeln!(out, "{line}").unwrap();
    writeln!(out, "Model 2 against Model 1: {}", f_text(&m.drop_fraction)).unwrap();
    writeln!(
        out,
        "Model 3 against Model 2 (H0: b_det + b_deg = 0): {}",
        f_text(&m.det_plus_deg)
    )
    .unwrap();
    out.push_str(
        "Note: linear regression coefficients; standard errors in parentheses; \
         ***: p <= .001, *: p <= .05. Quality, strength and member count are natural logs.\n",
    );
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub generator: String,
    pub snapshot_date: String,
    pub entropy_log_base: u32,
    pub transform_log: String,
    pub quality_exponent: f64,
    pub min_active_nodes: usize,
    pub edge_scope: EdgeScopeSetting,
    pub delivery_agents: Vec<String>,
    pub projects_with_networks: usize,
    pub projects_in_regression: usize,
    pub limitations: Vec<String>,
}

impl Metadata {
    pub fn new(config: &PipelineConfig, projects_with_networks: usize, projects_in_regression: usize) -> Self {
        Self {
            generator: concat!("talknet ", env!("CARGO_PKG_VERSION")).into(),
            snapshot_date: config.snapshot_date.clone().unwrap_or_else(|| "unspecified".into()),
            entropy_log_base: 2,
            transform_log: "natural".into(),
            quality_exponent: config.p,
            min_active_nodes: config.min_active_nodes,
            edge_scope: config.edge_scope,
            delivery_agents: config.mass_message.delivery_agents.clone(),
            projects_with_networks,
            projects_in_regression,
            limitations: vec![
                "Renamed accounts are treated as distinct editors.".into(),
                "Signatures without a user or user talk link are not detected.".into(),
                "Results describe this snapshot only and differ from other snapshots.".into(),
            ],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compact_numbers() {
        assert_eq!(compact(0.652, 3), ".652");
        assert_eq!(compact(-0.0931, 3), "-.093");
        assert_eq!(compact(30.0944, 3), "30.094");
        assert_eq!(compact(-3.369, 3), "-3.369");
        assert_eq!(compact(-0.0001, 3), ".000");
        assert_eq!(compact(59.664, 2), "59.66");
    }

    #[test]
    fn render_aligns_columns() {
        let t = render(&[vec!["a".into(), "bb".into()], vec!["ccc".into(), "d".into()]]);
        assert_eq!(t, "a    bb\nccc  d\n");
    }

    #[test]
    fn p_values() {
        assert_eq!(p_text(0.0004), "p < .001");
        assert_eq!(p_text(0.6734), "p = .673");
    }
}
