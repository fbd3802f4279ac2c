//! The three API traversals: project pages, user talk pages and assessments.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use talknet_core::wikitext::is_talk_title;

use crate::client::{ApiClient, FetchError};
use crate::config::QueryConfig;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PageText {
    pub title: String,
    pub wikitext: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProjectPage {
    pub project: String,
    pub title: String,
    pub wikitext: String,
}

/// One `project,article,grade` row as reported by the API.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AssessmentRow {
    pub project: String,
    pub article: String,
    pub grade: String,
}

fn pages_of(response: &Value) -> impl Iterator<Item = &Value> {
    response
        .pointer("/query/pages")
        .and_then(Value::as_array)
        .into_iter()
        .flatten()
}

fn title_of(page: &Value) -> Option<&str> {
    page.get("title").and_then(Value::as_str)
}

fn source_text(page: &Value) -> Option<&str> {
    page.get("cirrusdoc")?
        .as_array()?
        .first()?
        .pointer("/source/source_text")?
        .as_str()
}

fn is_missing(page: &Value) -> bool {
    page.get("missing").is_some_and(|m| m.as_bool().unwrap_or(true))
        || page.get("invalid").is_some()
}

fn text_pages(responses: &[Value]) -> Vec<PageText> {
    let mut out = BTreeSet::new();
    for page in responses.iter().flat_map(pages_of) {
        let Some(title) = title_of(page) else { continue };
        if is_missing(page) {
            log::info!("{title} does not exist; skipped");
            continue;
        }
        match source_text(page) {
            Some(text) => {
                out.insert(PageText {
                    title: title.to_string(),
                    wikitext: text.to_string(),
                });
            }
            None => log::warn!("{title} has no indexed source text; skipped"),
        }
    }
    out.into_iter().collect()
}

fn strip_namespace(title: &str) -> &str {
    title.split_once(':').map_or(title, |(_, rest)| rest)
}

/// Root pages (no subpage part) in the project namespace whose names start
/// with the project prefix.
pub fn discover_projects(client: &mut ApiClient, q: &QueryConfig) -> Result<Vec<String>, FetchError> {
    let ns = q.project_namespace.to_string();
    let responses = client.query_all(&[
        ("list", "allpages"),
        ("apnamespace", &ns),
        ("apprefix", q.project_prefix.trim_end()),
        ("aplimit", &q.page_limit),
    ])?;
    let mut roots = BTreeSet::new();
    for response in &responses {
        let listed = response.pointer("/query/allpages").and_then(Value::as_array);
        for page in listed.into_iter().flatten() {
            if let Some(title) = title_of(page) {
                let name = strip_namespace(title);
                if !name.contains('/') && name.starts_with(&q.project_prefix) {
                    roots.insert(name.to_string());
                }
            }
        }
    }
    Ok(roots.into_iter().collect())
}

/// All pages of one project: the root page named `root` and its subpages,
/// excluding talk subpages.
pub fn fetch_project_pages(client: &mut ApiClient, root: &str, q: &QueryConfig) -> Result<Vec<PageText>, FetchError> {
    let ns = q.project_namespace.to_string();
    let responses = client.query_all(&[
        ("generator", "allpages"),
        ("gapnamespace", &ns),
        ("gapprefix", root),
        ("gaplimit", &q.page_limit),
        ("prop", "cirrusdoc"),
    ])?;
    let subpage_prefix = format!("{root}/");
    Ok(text_pages(&responses)
        .into_iter()
        .filter(|p| {
            let name = strip_namespace(&p.title);
            name == root || name.starts_with(&subpage_prefix)
        })
        .filter(|p| {
            let talk = is_talk_title(&p.title);
            if talk {
                log::info!("{} is a talk page; not used for membership", p.title);
            }
            !talk
        })
        .collect())
}

/// Wikitext of `User talk:<name>` for each user, in batches. Users without a
/// talk page are logged and skipped.
pub fn fetch_user_talk_pages(
    client: &mut ApiClient,
    usernames: &[String],
    batch_size: usize,
) -> Result<Vec<PageText>, FetchError> {
    let mut responses = Vec::new();
    for chunk in usernames.chunks(batch_size.max(1)) {
        let titles = chunk
            .iter()
            .map(|u| format!("User talk:{u}"))
            .collect::<Vec<_>>()
            .join("|");
        responses.extend(client.query_all(&[("prop", "cirrusdoc"), ("titles", &titles)])?);
    }
    Ok(text_pages(&responses))
}

/// Every assessment of every main-namespace page, through an AllPages
/// traversal with the page-assessment property.
pub fn fetch_assessments(client: &mut ApiClient, q: &QueryConfig) -> Result<Vec<AssessmentRow>, FetchError> {
    let responses = client.query_all(&[
        ("generator", "allpages"),
        ("gapnamespace", "0"),
        ("gaplimit", &q.page_limit),
        ("prop", "pageassessments"),
        ("palimit", "max"),
    ])?;
    let mut rows = BTreeSet::new();
    for page in responses.iter().flat_map(pages_of) {
        let Some(title) = title_of(page) else { continue };
        let Some(assessments) = page.get("pageassessments").and_then(Value::as_object) else {
            continue;
        };
        for (project, detail) in assessments {
            let grade = detail.get("class").and_then(Value::as_str).unwrap_or("");
            rows.insert(AssessmentRow {
                project: project.clone(),
                article: title.to_string(),
                grade: grade.to_string(),
            });
        }
    }
    Ok(rows.into_iter().collect())
}
