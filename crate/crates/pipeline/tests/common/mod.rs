#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use serde::Deserialize;
use serde_json::{json, Value};
use talknet::transport::{Response, Transport, TransportError};

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/miniwiki")
}

#[derive(Debug, Clone, Deserialize)]
pub struct Page {
    pub title: String,
    pub wikitext: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Article {
    pub title: String,
    pub assessments: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct WikiData {
    pub project_pages: Vec<Page>,
    pub user_talk_pages: Vec<Page>,
    pub articles: Vec<Article>,
}

impl WikiData {
    pub fn load() -> Self {
        let text = std::fs::read_to_string(fixture_dir().join("wiki.json")).unwrap();
        serde_json::from_str(&text).unwrap()
    }
}

pub type CallLog = Arc<Mutex<Vec<(Instant, BTreeMap<String, String>)>>>;

/// Answers the handful of query shapes the pipeline sends, from fixture data.
pub struct MiniWiki {
    data: WikiData,
    pub calls: CallLog,
}

impl MiniWiki {
    pub fn new(data: WikiData) -> Self {
        Self {
            data,
            calls: Arc::default(),
        }
    }

    fn limit(params: &BTreeMap<String, String>, key: &str) -> usize {
        match params.get(key).map(String::as_str) {
            Some("max") | None => 500,
            Some(n) => n.parse().unwrap(),
        }
    }

    /// Slices sorted `items` by title from the continuation point.
    fn window<'a, T>(
        items: Vec<&'a T>,
        title: impl Fn(&T) -> &str,
        params: &BTreeMap<String, String>,
        limit_key: &str,
        cont_key: &str,
    ) -> (Vec<&'a T>, Option<String>) {
        let limit = Self::limit(params, limit_key);
        let start = params.get(cont_key).map(String::as_str).unwrap_or("");
        let rest: Vec<&T> = items.into_iter().filter(|i| title(i) >= start).collect();
        let next = rest.get(limit).map(|i| title(i).to_string());
        (rest.into_iter().take(limit).collect(), next)
    }

    fn with_continue(mut body: Value, key: &str, next: Option<String>) -> Value {
        if let Some(n) = next {
            body["continue"] = json!({ key: n, "continue": format!("{key}||") });
        }
        body
    }

    fn cirrus(page: &Page) -> Value {
        json!({
            "ns": if page.title.starts_with("User talk:") { 3 } else { 4 },
            "title": page.title,
            "cirrusdoc": [{ "index": "mini_content", "source": { "source_text": page.wikitext } }],
        })
    }

    fn answer(&self, p: &BTreeMap<String, String>) -> Value {
        assert_eq!(p.get("action").map(String::as_str), Some("query"));
        assert_eq!(p.get("format").map(String::as_str), Some("json"));
        assert_eq!(p.get("formatversion").map(String::as_str), Some("2"));
        let get = |k: &str| p.get(k).map(String::as_str);
        if get("list") == Some("allpages") {
            assert_eq!(get("apnamespace"), Some("4"));
            let prefix = format!("Wikipedia:{}", get("apprefix").unwrap_or(""));
            let mut pages: Vec<&Page> = self.data.project_pages.iter().filter(|x| x.title.starts_with(&prefix)).collect();
            pages.sort_by(|a, b| a.title.cmp(&b.title));
            let (win, next) = Self::window(pages, |x| x.title.as_str(), p, "aplimit", "apcontinue");
            let listed: Vec<Value> = win.iter().map(|x| json!({"ns": 4, "title": x.title})).collect();
            return Self::with_continue(json!({"batchcomplete": true, "query": {"allpages": listed}}), "apcontinue", next);
        }
        if get("generator") == Some("allpages") && get("gapnamespace") == Some("4") {
            assert_eq!(get("prop"), Some("cirrusdoc"));
            let prefix = format!("Wikipedia:{}", get("gapprefix").unwrap_or(""));
            let mut pages: Vec<&Page> = self.data.project_pages.iter().filter(|x| x.title.starts_with(&prefix)).collect();
            pages.sort_by(|a, b| a.title.cmp(&b.title));
            let (win, next) = Self::window(pages, |x| x.title.as_str(), p, "gaplimit", "gapcontinue");
            let out: Vec<Value> = win.iter().map(|x| Self::cirrus(x)).collect();
            let body = if out.is_empty() { json!({"batchcomplete": true}) } else { json!({"query": {"pages": out}}) };
            return Self::with_continue(body, "gapcontinue", next);
        }
        if get("generator") == Some("allpages") && get("gapnamespace") == Some("0") {
            assert_eq!(get("prop"), Some("pageassessments"));
            let mut arts: Vec<&Article> = self.data.articles.iter().collect();
            arts.sort_by(|a, b| a.title.cmp(&b.title));
            let (win, next) = Self::window(arts, |x| x.title.as_str(), p, "gaplimit", "gapcontinue");
            let out: Vec<Value> = win
                .iter()
                .map(|a| {
                    let mut v = json!({"ns": 0, "title": a.title});
                    if !a.assessments.is_empty() {
                        v["pageassessments"] = json!(a.assessments);
                    }
                    v
                })
                .collect();
            return Self::with_continue(json!({"query": {"pages": out}}), "gapcontinue", next);
        }
        if get("prop") == Some("cirrusdoc") {
            let titles = get("titles").expect("titles");
            let out: Vec<Value> = titles
                .split('|')
                .map(|t| match self.data.user_talk_pages.iter().find(|x| x.title == t) {
                    Some(page) => Self::cirrus(page),
                    None => json!({"ns": 3, "title": t, "missing": true}),
                })
                .collect();
            return json!({"batchcomplete": true, "query": {"pages": out}});
        }
        panic!("unexpected request {p:?}");
    }
}

impl Transport for MiniWiki {
    fn get(&self, _url: &str, params: &[(String, String)]) -> Result<Response, TransportError> {
        let p: BTreeMap<String, String> = params.iter().cloned().collect();
        self.calls.lock().unwrap().push((Instant::now(), p.clone()));
        Ok(Response::ok(serde_json::to_vec(&self.answer(&p)).unwrap()))
    }
}

/// Replays canned responses in order and records when each request arrived.
pub struct Scripted {
    responses: Mutex<Vec<Response>>,
    pub calls: CallLog,
}

impl Scripted {
    pub fn new(mut responses: Vec<Response>) -> Self {
        responses.reverse();
        Self {
            responses: Mutex::new(responses),
            calls: Arc::default(),
        }
    }

    pub fn json(v: Value) -> Response {
        Response::ok(serde_json::to_vec(&v).unwrap())
    }

    pub fn status(status: u16) -> Response {
        Response {
            status,
            retry_after: None,
            body: b"busy".to_vec(),
        }
    }
}

impl Transport for Scripted {
    fn get(&self, _url: &str, params: &[(String, String)]) -> Result<Response, TransportError> {
        self.calls
            .lock()
            .unwrap()
            .push((Instant::now(), params.iter().cloned().collect()));
        self.responses
            .lock()
            .unwrap()
            .pop()
            .ok_or_else(|| TransportError::Io("script exhausted".into()))
    }
}

/// Every file under `root`, as relative path to bytes.
pub fn snapshot(root: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().replace('\\', "/");
                out.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    if root.exists() {
        walk(root, root, &mut out);
    }
    out
}
