//! Project quality scores from article assessments.
//!
//! `N_Q` is the number of FA or GA articles a project curates and `n` the
//! number of distinct articles it assessed. The score family is
//! `Q_p = N_Q / n^p` for `p` in `[0, 1]`.

use std::collections::BTreeMap;
use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QualityError {
    #[error("project {0:?} has no assessed articles")]
    NoArticles(String),
    #[error("exponent p = {0} outside [0, 1]")]
    ExponentOutOfRange(f64),
    #[error("n_quality ({n_quality}) exceeds n_articles ({n_articles})")]
    Inconsistent { n_quality: u64, n_articles: u64 },
    #[error("assessment csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Grade {
    Other,
    GA,
    FA,
}

impl Grade {
    /// Case-insensitive; anything besides FA and GA is `Other`.
    pub fn parse(raw: &str) -> Self {
        match raw.trim().to_ascii_uppercase().as_str() {
            "FA" => Grade::FA,
            "GA" => Grade::GA,
            _ => Grade::Other,
        }
    }

    pub fn is_quality(self) -> bool {
        matches!(self, Grade::FA | Grade::GA)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssessmentRecord {
    pub project: String,
    pub article: String,
    pub grade: Grade,
}

#[derive(Debug, Deserialize)]
struct AssessmentRow {
    project: String,
    article: String,
    grade: String,
    #[serde(default)]
    namespace: Option<i64>,
}

/// Reads `project,article,grade[,namespace]` CSV. When the namespace column
/// is present, rows outside the main namespace (0) are dropped.
/// `normalize_project` maps raw project names to canonical ones.
pub fn read_assessments<R: Read>(
    reader: R,
    normalize_project: impl Fn(&str) -> Option<String>,
) -> Result<Vec<AssessmentRecord>, QualityError> {
    let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut out = Vec::new();
    for row in csv.deserialize::<AssessmentRow>() {
        let row = row?;
        if matches!(row.namespace, Some(ns) if ns != 0) {
            continue;
        }
        let Some(project) = normalize_project(&row.project) else {
            log::warn!("skipping assessment with unusable project name {:?}", row.project);
            continue;
        };
        out.push(AssessmentRecord {
            project,
            article: row.article.replace('_', " "),
            grade: Grade::parse(&row.grade),
        });
    }
    Ok(out)
}

/// One record per (project, article), keeping the highest grade.
pub fn dedupe(records: &[AssessmentRecord]) -> BTreeMap<String, BTreeMap<String, Grade>> {
    let mut out: BTreeMap<String, BTreeMap<String, Grade>> = BTreeMap::new();
    for r in records {
        let slot = out
            .entry(r.project.clone())
            .or_default()
            .entry(r.article.clone())
            .or_insert(r.grade);
        *slot = (*slot).max(r.grade);
    }
    out
}

/// `(n_articles, n_quality)` for one project's deduplicated grades.
pub fn count_quality(project: &str, grades: &BTreeMap<String, Grade>) -> Result<(u64, u64), QualityError> {
    if grades.is_empty() {
        return Err(QualityError::NoArticles(project.to_string()));
    }
    let n_quality = grades.values().filter(|g| g.is_quality()).count() as u64;
    Ok((grades.len() as u64, n_quality))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QualityScore {
    pub n_articles: u64,
    pub n_quality: u64,
    pub p: f64,
    pub score: f64,
    /// Natural log of `score`; `None` when no article is FA or GA.
    pub log_score: Option<f64>,
}

pub const DEFAULT_EXPONENT: f64 = 0.5;

pub fn q_score(n_quality: u64, n_articles: u64, p: f64) -> Result<QualityScore, QualityError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(QualityError::ExponentOutOfRange(p));
    }
    if n_articles == 0 {
        return Err(QualityError::NoArticles(String::new()));
    }
    if n_quality > n_articles {
        return Err(QualityError::Inconsistent { n_quality, n_articles });
    }
    let score = n_quality as f64 / (n_articles as f64).powf(p);
    Ok(QualityScore {
        n_articles,
        n_quality,
        p,
        score,
        log_score: (n_quality >= 1).then(|| score.ln()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(project: &str, article: &str, grade: Grade) -> AssessmentRecord {
        AssessmentRecord {
            project: project.into(),
            article: article.into(),
            grade,
        }
    }

    #[test]
    fn grade_parsing() {
        assert_eq!(Grade::parse("fa"), Grade::FA);
        assert_eq!(Grade::parse(" GA "), Grade::GA);
        assert_eq!(Grade::parse("Stub"), Grade::Other);
        assert_eq!(Grade::parse("FL"), Grade::Other);
    }

    #[test]
    fn hundred_articles_seven_fa() {
        let records: Vec<_> = (0..100)
            .map(|i| rec("P", &format!("A{i}"), if i < 7 { Grade::FA } else { Grade::Other }))
            .collect();
        let by_project = dedupe(&records);
        assert_eq!(count_quality("P", &by_project["P"]).unwrap(), (100, 7));
    }

    #[test]
    fn duplicate_assessments_count_once_at_highest_grade() {
        let records = vec![
            rec("P", "X", Grade::FA),
            rec("P", "X", Grade::FA),
            rec("P", "Y", Grade::GA),
            rec("P", "Y", Grade::FA),
            rec("P", "Z", Grade::Other),
        ];
        let by_project = dedupe(&records);
        assert_eq!(by_project["P"]["Y"], Grade::FA);
        assert_eq!(count_quality("P", &by_project["P"]).unwrap(), (3, 2));
    }

    #[test]
    fn zero_articles_is_an_error() {
        assert!(matches!(count_quality("P", &BTreeMap::new()), Err(QualityError::NoArticles(_))));
    }

    #[test]
    fn q_score_examples() {
        assert_eq!(q_score(7, 100, 0.0).unwrap().score, 7.0);
        assert_eq!(q_score(4, 16, 0.5).unwrap().score, 1.0);
        assert_eq!(q_score(4, 16, 1.0).unwrap().score, 0.25);
        assert_eq!(q_score(4, 16, 0.5).unwrap().log_score, Some(0.0));
        assert_eq!(q_score(0, 16, 0.5).unwrap().log_score, None);
        assert!(matches!(q_score(1, 4, 1.5), Err(QualityError::ExponentOutOfRange(_))));
        assert!(matches!(q_score(1, 4, -0.1), Err(QualityError::ExponentOutOfRange(_))));
        assert!(q_score(5, 4, 0.5).is_err());
    }

    #[test]
    fn csv_with_and_without_namespace() {
        let plain = "project,article,grade\nBirds,Robin,fa\nBirds,Crow,Start\n";
        let recs = read_assessments(plain.as_bytes(), |p| Some(p.to_string())).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].grade, Grade::FA);

        let with_ns = "project,article,grade,namespace\nBirds,Robin,GA,0\nBirds,Portal:Birds,FA,100\n";
        let recs = read_assessments(with_ns.as_bytes(), |p| Some(p.to_string())).unwrap();
        assert_eq!(recs, vec![rec("Birds", "Robin", Grade::GA)]);
    }
}
