//! Pipeline stages. Each stage reads only the files written by earlier stages
//! and writes only its own directory under the work directory.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use talknet_core::graph::edge_list::{read_edge_list, write_edge_list};
use talknet_core::graph::effective_information;
use talknet_core::network::{build_network, filter_projects, EdgeScope, ProjectRecord};
use talknet_core::quality::{count_quality, dedupe, q_score, read_assessments};
use talknet_core::stats::{fit_quality_models, models, DataMatrix, QualityModels, StatsError};
use talknet_core::wikitext::{extract_project_members, is_talk_title, post_records, PostRecord, TalkPage};

use crate::client::ApiClient;
use crate::config::PipelineConfig;
use crate::error::{PipelineError, Stage};
use crate::fetch::{
    discover_projects, fetch_assessments, fetch_project_pages, fetch_user_talk_pages, AssessmentRow, PageText,
    ProjectPage,
};
use crate::names::normalize_project_name;
use crate::report;

/// Observations needed before the largest model has residual degrees of freedom.
pub const MIN_REGRESSION_ROWS: usize = 7;

/// File layout under the work directory.
#[derive(Debug, Clone)]
pub struct Workdir {
    root: PathBuf,
}

impl Workdir {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn project_pages(&self) -> PathBuf {
        self.root.join("raw/project_pages.jsonl")
    }
    pub fn talk_pages(&self) -> PathBuf {
        self.root.join("raw/talk_pages.jsonl")
    }
    pub fn assessments(&self) -> PathBuf {
        self.root.join("raw/assessments.csv")
    }
    pub fn posts(&self) -> PathBuf {
        self.root.join("parsed/posts.jsonl")
    }
    pub fn members(&self) -> PathBuf {
        self.root.join("parsed/members.json")
    }
    pub fn networks_dir(&self) -> PathBuf {
        self.root.join("networks")
    }
    pub fn edge_list(&self, project: &str) -> PathBuf {
        self.networks_dir().join(format!("{}.tsv", file_stem(project)))
    }
    pub fn network_summary(&self) -> PathBuf {
        self.root.join("networks/summary.csv")
    }
    pub fn quality(&self) -> PathBuf {
        self.root.join("quality/quality.csv")
    }
    pub fn variables(&self) -> PathBuf {
        self.root.join("metrics/variables.csv")
    }
    pub fn excluded(&self) -> PathBuf {
        self.root.join("metrics/excluded.csv")
    }
    pub fn regression_input(&self) -> PathBuf {
        self.root.join("metrics/regression_input.csv")
    }
    pub fn regression(&self) -> PathBuf {
        self.root.join("regress/regression.json")
    }
    pub fn table2(&self) -> PathBuf {
        self.root.join("report/table2.txt")
    }
    pub fn table3(&self) -> PathBuf {
        self.root.join("report/table3.txt")
    }
    pub fn metadata(&self) -> PathBuf {
        self.root.join("report/metadata.json")
    }
}

/// Filesystem-safe, injective file name for a project.
pub fn file_stem(project: &str) -> String {
    let mut out = String::new();
    for c in project.chars() {
        match c {
            ' ' => out.push('_'),
            c if c.is_alphanumeric() || c == '-' || c == '.' => out.push(c),
            c => {
                let mut buf = [0u8; 4];
                for b in c.encode_utf8(&mut buf).bytes() {
                    out.push_str(&format!("%{b:02X}"));
                }
            }
        }
    }
    out
}

/// Float format of every CSV this module writes.
pub fn fixed(x: f64) -> String {
    format!("{x:.10}")
}

fn write_file(stage: Stage, path: &Path, bytes: &[u8]) -> Result<(), PipelineError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| PipelineError::io(stage, dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| PipelineError::io(stage, path, e))
}

fn read_file(stage: Stage, path: &Path) -> Result<String, PipelineError> {
    fs::read_to_string(path).map_err(|e| PipelineError::io(stage, path, e))
}

fn write_jsonl<T: Serialize>(stage: Stage, path: &Path, rows: &[T]) -> Result<(), PipelineError> {
    let mut out = Vec::new();
    for row in rows {
        serde_json::to_writer(&mut out, row).expect("serializable record");
        out.push(b'\n');
    }
    write_file(stage, path, &out)
}

fn read_jsonl<T: for<'de> Deserialize<'de>>(stage: Stage, path: &Path) -> Result<Vec<T>, PipelineError> {
    let file = fs::File::open(path).map_err(|e| PipelineError::io(stage, path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| PipelineError::io(stage, path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(&line)
                .map_err(|e| PipelineError::data(stage, format!("{}:{}: {e}", path.display(), i + 1)))?,
        );
    }
    Ok(out)
}

fn csv_bytes<F>(stage: Stage, header: &[&str], fill: F) -> Result<Vec<u8>, PipelineError>
where
    F: FnOnce(&mut csv::Writer<&mut Vec<u8>>) -> Result<(), csv::Error>,
{
    let mut out = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(header)
            .and_then(|_| fill(&mut w))
            .and_then(|_| w.flush().map_err(csv::Error::from))
            .map_err(|e| PipelineError::data(stage, e))?;
    }
    Ok(out)
}

fn members_from_pages(pages: &[ProjectPage]) -> Result<BTreeMap<String, BTreeSet<String>>, PipelineError> {
    let mut grouped: BTreeMap<&str, Vec<(&str, &str)>> = BTreeMap::new();
    for p in pages {
        let entry = grouped.entry(p.project.as_str()).or_default();
        if is_talk_title(&p.title) {
            log::info!("ignoring talk page {} for membership", p.title);
        } else {
            entry.push((p.title.as_str(), p.wikitext.as_str()));
        }
    }
    grouped
        .into_iter()
        .map(|(project, pages)| {
            extract_project_members(&pages)
                .map(|m| (project.to_string(), m))
                .map_err(|e| PipelineError::data(Stage::Parse, e))
        })
        .collect()
}

/// Fetches project pages, member talk pages and assessments into `raw/`.
pub fn ingest(config: &PipelineConfig, work: &Workdir, client: &mut ApiClient) -> Result<(), PipelineError> {
    let stage = Stage::Ingest;
    let q = &config.query;
    let roots: Vec<String> = if config.projects.is_empty() {
        discover_projects(client, q).map_err(|e| PipelineError::new(stage, e))?
    } else {
        config
            .projects
            .iter()
            .map(|p| {
                normalize_project_name(p, &BTreeMap::new())
                    .map(|name| format!("{}{name}", q.project_prefix))
                    .map_err(|e| PipelineError::data(stage, e))
            })
            .collect::<Result<_, _>>()?
    };

    let mut project_pages = BTreeSet::new();
    for root in &roots {
        let project = normalize_project_name(root, &config.aliases).map_err(|e| PipelineError::data(stage, e))?;
        let pages = fetch_project_pages(client, root, q).map_err(|e| PipelineError::new(stage, e))?;
        log::info!("{project}: {} project pages", pages.len());
        for PageText { title, wikitext } in pages {
            project_pages.insert(ProjectPage {
                project: project.clone(),
                title,
                wikitext,
            });
        }
    }
    let project_pages: Vec<ProjectPage> = project_pages.into_iter().collect();
    write_jsonl(stage, &work.project_pages(), &project_pages)?;

    let members = members_from_pages(&project_pages).map_err(|e| PipelineError { stage, ..e })?;
    let users: Vec<String> = members.values().flatten().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    log::info!("fetching talk pages of {} users", users.len());
    let talk = fetch_user_talk_pages(client, &users, q.batch_size).map_err(|e| PipelineError::new(stage, e))?;
    write_jsonl(stage, &work.talk_pages(), &talk)?;

    let rows = fetch_assessments(client, q).map_err(|e| PipelineError::new(stage, e))?;
    let bytes = csv_bytes(stage, &["project", "article", "grade"], |w| {
        rows.iter()
            .try_for_each(|AssessmentRow { project, article, grade }| w.write_record([project, article, grade]))
    })?;
    write_file(stage, &work.assessments(), &bytes)?;
    let s = client.stats();
    log::info!(
        "ingest done: {} requests, {} cache hits, {} retries",
        s.requests,
        s.cache_hits,
        s.retries
    );
    Ok(())
}

/// Member sets from project pages and post records from talk pages.
pub fn parse(config: &PipelineConfig, work: &Workdir) -> Result<(), PipelineError> {
    let stage = Stage::Parse;
    let project_pages: Vec<ProjectPage> = read_jsonl(stage, &work.project_pages())?;
    let members = members_from_pages(&project_pages)?;
    let json = serde_json::to_vec_pretty(&members).expect("string map");
    write_file(stage, &work.members(), &json)?;

    let mut talk: Vec<PageText> = read_jsonl(stage, &work.talk_pages())?;
    talk.sort();
    let filter = &config.mass_message;
    let posts: Vec<PostRecord> = talk
        .par_iter()
        .map(|page| match TalkPage::new(&page.title, &page.wikitext) {
            Ok(p) => post_records(&p, filter),
            Err(e) => {
                log::warn!("{}: {e}; skipped", page.title);
                Vec::new()
            }
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    log::info!("{} posts from {} talk pages", posts.len(), talk.len());
    write_jsonl(stage, &work.posts(), &posts)
}

fn read_members(stage: Stage, work: &Workdir) -> Result<BTreeMap<String, BTreeSet<String>>, PipelineError> {
    serde_json::from_str(&read_file(stage, &work.members())?).map_err(|e| PipelineError::data(stage, e))
}

/// Per-project edge lists and the network summary.
pub fn build(config: &PipelineConfig, work: &Workdir) -> Result<(), PipelineError> {
    let stage = Stage::Build;
    let members = read_members(stage, work)?;
    let posts: Vec<PostRecord> = read_jsonl(stage, &work.posts())?;
    let scope = EdgeScope::from(config.edge_scope);
    let dir = work.networks_dir();
    if dir.exists() {
        fs::remove_dir_all(&dir).map_err(|e| PipelineError::io(stage, &dir, e))?;
    }
    let records: Vec<ProjectRecord> = members
        .par_iter()
        .filter(|(project, m)| {
            if m.is_empty() {
                log::warn!("{project}: no signed members; skipped");
            }
            !m.is_empty()
        })
        .map(|(project, m)| {
            ProjectRecord::new(project.clone(), m.clone(), build_network(&posts, m, scope))
                .map_err(|e| PipelineError::data(stage, e))
        })
        .collect::<Result<_, _>>()?;
    for r in &records {
        write_file(stage, &work.edge_list(&r.project), write_edge_list(&r.network).as_bytes())?;
    }
    let bytes = csv_bytes(stage, &["project", "member_count", "active_nodes", "fraction_in_network"], |w| {
        records.iter().try_for_each(|r| {
            w.write_record([
                r.project.clone(),
                r.member_count.to_string(),
                r.active_nodes().to_string(),
                fixed(r.fraction_in_network),
            ])
        })
    })?;
    write_file(stage, &work.network_summary(), &bytes)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityRow {
    pub project: String,
    pub n_articles: u64,
    pub n_quality: u64,
    pub q_score: f64,
}

fn read_csv_rows<T: for<'de> Deserialize<'de>>(stage: Stage, path: &Path) -> Result<Vec<T>, PipelineError> {
    let text = read_file(stage, path)?;
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| PipelineError::data(stage, format!("{}: {e}", path.display())))
}

/// `N_Q`, scope size and `Q_p` for every project with assessments.
pub fn quality(config: &PipelineConfig, work: &Workdir) -> Result<(), PipelineError> {
    let stage = Stage::Quality;
    let members = read_members(stage, work)?;
    let text = read_file(stage, &work.assessments())?;
    let records = read_assessments(text.as_bytes(), |raw| {
        normalize_project_name(raw, &config.aliases)
            .ok()
            .filter(|p| members.contains_key(p))
    })
    .map_err(|e| PipelineError::data(stage, e))?;
    let grades = dedupe(&records);
    let mut rows = Vec::new();
    for project in members.keys() {
        let Some(g) = grades.get(project) else {
            log::warn!("{project}: no assessed articles");
            continue;
        };
        let (n_articles, n_quality) = count_quality(project, g).map_err(|e| PipelineError::data(stage, e))?;
        let score = q_score(n_quality, n_articles, config.p).map_err(|e| PipelineError::data(stage, e))?;
        rows.push(QualityRow {
            project: project.clone(),
            n_articles,
            n_quality,
            q_score: score.score,
        });
    }
    let bytes = csv_bytes(stage, &["project", "n_articles", "n_quality", "q_score"], |w| {
        rows.iter().try_for_each(|r| {
            w.write_record([
                r.project.clone(),
                r.n_articles.to_string(),
                r.n_quality.to_string(),
                fixed(r.q_score),
            ])
        })
    })?;
    write_file(stage, &work.quality(), &bytes)
}

/// Project-level variables for every project passing the filters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableRow {
    pub project: String,
    pub quality: f64,
    pub fraction_in_network: f64,
    pub determinism: f64,
    pub degeneracy: f64,
    pub effective_information: f64,
    pub average_strength: f64,
    pub member_count: usize,
    pub active_nodes: usize,
    pub n_articles: u64,
    pub n_quality: u64,
}

pub const VARIABLE_COLUMNS: [&str; 11] = [
    "project",
    "quality",
    "fraction_in_network",
    "determinism",
    "degeneracy",
    "effective_information",
    "average_strength",
    "member_count",
    "active_nodes",
    "n_articles",
    "n_quality",
];

/// Structure metrics, filtering and the regression input.
pub fn metrics(config: &PipelineConfig, work: &Workdir) -> Result<(), PipelineError> {
    let stage = Stage::Metrics;
    let members = read_members(stage, work)?;
    let quality: BTreeMap<String, QualityRow> = read_csv_rows::<QualityRow>(stage, &work.quality())?
        .into_iter()
        .map(|r| (r.project.clone(), r))
        .collect();

    let mut records = Vec::new();
    for (project, m) in members.iter().filter(|(_, m)| !m.is_empty()) {
        let path = work.edge_list(project);
        let graph = read_edge_list(&read_file(stage, &path)?)
            .map_err(|e| PipelineError::data(stage, format!("{}: {e}", path.display())))?;
        records.push(ProjectRecord::new(project.clone(), m.clone(), graph).map_err(|e| PipelineError::data(stage, e))?);
    }
    let counts: BTreeMap<String, u64> = records
        .iter()
        .map(|r| (r.project.clone(), quality.get(&r.project).map_or(0, |q| q.n_quality)))
        .collect();
    let kept = filter_projects(&records, &counts, config.min_active_nodes).map_err(|e| PipelineError::data(stage, e))?;
    let kept_names: BTreeSet<&str> = kept.iter().map(|r| r.project.as_str()).collect();

    let excluded = csv_bytes(stage, &["project", "active_nodes", "n_quality", "reason"], |w| {
        records
            .iter()
            .filter(|r| !kept_names.contains(r.project.as_str()))
            .try_for_each(|r| {
                let mut reasons = Vec::new();
                if r.active_nodes() < config.min_active_nodes {
                    reasons.push(format!("fewer than {} active nodes", config.min_active_nodes));
                }
                if counts[&r.project] == 0 {
                    reasons.push("no FA or GA articles".to_string());
                }
                w.write_record([
                    r.project.clone(),
                    r.active_nodes().to_string(),
                    counts[&r.project].to_string(),
                    reasons.join("; "),
                ])
            })
    })?;
    write_file(stage, &work.excluded(), &excluded)?;

    let rows: Vec<VariableRow> = kept
        .par_iter()
        .map(|r| {
            let q = &quality[&r.project];
            let score = q_score(q.n_quality, q.n_articles, config.p).map_err(|e| PipelineError::data(stage, e))?;
            let m = effective_information(&r.network).map_err(|e| PipelineError::data(stage, format!("{}: {e}", r.project)))?;
            let strength = r
                .network
                .average_strength()
                .map_err(|e| PipelineError::data(stage, format!("{}: {e}", r.project)))?;
            Ok(VariableRow {
                project: r.project.clone(),
                quality: score.score,
                fraction_in_network: r.fraction_in_network,
                determinism: m.determinism_norm,
                degeneracy: m.degeneracy_norm,
                effective_information: m.effective_information_norm,
                average_strength: strength,
                member_count: r.member_count,
                active_nodes: r.active_nodes(),
                n_articles: q.n_articles,
                n_quality: q.n_quality,
            })
        })
        .collect::<Result<_, PipelineError>>()?;

    let bytes = csv_bytes(stage, &VARIABLE_COLUMNS, |w| {
        rows.iter().try_for_each(|r| {
            w.write_record([
                r.project.clone(),
                fixed(r.quality),
                fixed(r.fraction_in_network),
                fixed(r.determinism),
                fixed(r.degeneracy),
                fixed(r.effective_information),
                fixed(r.average_strength),
                r.member_count.to_string(),
                r.active_nodes.to_string(),
                r.n_articles.to_string(),
                r.n_quality.to_string(),
            ])
        })
    })?;
    write_file(stage, &work.variables(), &bytes)?;

    let data = regression_matrix(&rows).map_err(|e| PipelineError::data(stage, e))?;
    let mut out = Vec::new();
    data.write_csv(&mut out).map_err(|e| PipelineError::data(stage, e))?;
    write_file(stage, &work.regression_input(), &out)
}

/// Regression input columns: logs of quality, strength and member count.
pub fn regression_matrix(rows: &[VariableRow]) -> Result<DataMatrix, StatsError> {
    let mut data = DataMatrix::new(rows.iter().map(|r| r.project.clone()).collect());
    let col = |f: fn(&VariableRow) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
    data.push_column(models::RESPONSE, col(|r| r.quality.ln()))?;
    data.push_column(models::FRACTION, col(|r| r.fraction_in_network))?;
    data.push_column(models::DETERMINISM, col(|r| r.determinism))?;
    data.push_column(models::DEGENERACY, col(|r| r.degeneracy))?;
    data.push_column(models::EFFECTIVE_INFORMATION, col(|r| r.effective_information))?;
    data.push_column(models::STRENGTH, col(|r| r.average_strength.ln()))?;
    data.push_column(models::MEMBERS, col(|r| (r.member_count as f64).ln()))?;
    Ok(data)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionReport {
    pub n: usize,
    pub estimable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub models: Option<QualityModels>,
}

/// Fits the three quality models, or records why they cannot be fitted.
pub fn regress(_config: &PipelineConfig, work: &Workdir) -> Result<(), PipelineError> {
    let stage = Stage::Regress;
    let text = read_file(stage, &work.regression_input())?;
    let data = DataMatrix::read_csv(text.as_bytes()).map_err(|e| PipelineError::data(stage, e))?;
    let n = data.n_rows();
    let report = if n < MIN_REGRESSION_ROWS {
        log::warn!("only {n} projects passed the filters; models not estimated");
        RegressionReport {
            n,
            estimable: false,
            reason: Some(format!(
                "{n} projects passed the filters; at least {MIN_REGRESSION_ROWS} are needed"
            )),
            models: None,
        }
    } else {
        let fitted = fit_quality_models(&data).map_err(|e| PipelineError::data(stage, e))?;
        RegressionReport {
            n,
            estimable: true,
            reason: None,
            models: Some(fitted),
        }
    };
    let mut json = serde_json::to_vec_pretty(&report).map_err(|e| PipelineError::data(stage, e))?;
    json.push(b'\n');
    write_file(stage, &work.regression(), &json)
}

/// Descriptive table, regression table and bundle metadata.
pub fn report(config: &PipelineConfig, work: &Workdir) -> Result<(), PipelineError> {
    let stage = Stage::Report;
    let rows: Vec<VariableRow> = read_csv_rows(stage, &work.variables())?;
    let regression: RegressionReport =
        serde_json::from_str(&read_file(stage, &work.regression())?).map_err(|e| PipelineError::data(stage, e))?;
    let summary: Vec<BTreeMap<String, String>> = read_csv_rows(stage, &work.network_summary())?;

    let table2 = report::table2(&rows).map_err(|e| PipelineError::data(stage, e))?;
    write_file(stage, &work.table2(), table2.as_bytes())?;
    write_file(stage, &work.table3(), report::table3(&regression).as_bytes())?;
    let meta = report::Metadata::new(config, summary.len(), rows.len());
    let mut json = serde_json::to_vec_pretty(&meta).expect("plain struct");
    json.push(b'\n');
    write_file(stage, &work.metadata(), &json)
}

/// Runs every offline stage after ingest.
pub fn run_offline_stages(config: &PipelineConfig, work: &Workdir) -> Result<(), PipelineError> {
    parse(config, work)?;
    build(config, work)?;
    quality(config, work)?;
    metrics(config, work)?;
    regress(config, work)?;
    report(config, work)
}

/// Every stage, ingest included.
pub fn run_pipeline(config: &PipelineConfig, work: &Workdir, client: &mut ApiClient) -> Result<(), PipelineError> {
    ingest(config, work, client)?;
    run_offline_stages(config, work)
}
