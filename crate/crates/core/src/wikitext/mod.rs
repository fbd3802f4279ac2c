//! Talk-page wikitext: thread segmentation, signed posts and project member sets.
//!
//! This is deliberately not a wikitext AST parser. Threads are split at
//! level-2 headings and posts are recovered from default MediaWiki
//! signatures (a user-namespace link followed on the same line by a UTC
//! timestamp). Customized signatures without a user link are not seen.

mod signature;

use std::collections::BTreeSet;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use signature::{all_signatures, canonical_username, count_timestamps, parse_signature, Signature};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("not a user talk page title: {0:?}")]
    NotUserTalk(String),
    #[error("talk pages are not project pages: {0:?}")]
    TalkPageAsProjectPage(String),
}

/// A user talk page. The owner is the username in the title, subpages stripped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TalkPage {
    pub title: String,
    pub owner: String,
    pub wikitext: String,
}

impl TalkPage {
    pub fn new(title: impl Into<String>, wikitext: impl Into<String>) -> Result<Self, ParseError> {
        let title = title.into();
        let owner = talk_page_owner(&title).ok_or_else(|| ParseError::NotUserTalk(title.clone()))?;
        Ok(Self {
            title,
            owner,
            wikitext: wikitext.into(),
        })
    }
}

/// Owner of a `User talk:` page, or `None` for any other namespace.
pub fn talk_page_owner(title: &str) -> Option<String> {
    let (namespace, rest) = title.split_once(':')?;
    let namespace = namespace.replace('_', " ");
    let namespace = namespace.split_whitespace().collect::<Vec<_>>().join(" ");
    if !namespace.eq_ignore_ascii_case("user talk") {
        return None;
    }
    let root = rest.split('/').next().unwrap_or_default();
    let owner = canonical_username(root);
    (!owner.is_empty()).then_some(owner)
}

/// Raw text of one thread before post extraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreadSource {
    pub heading: String,
    pub body: String,
}

/// One signed message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Post {
    pub author: String,
    pub timestamp: DateTime<Utc>,
    pub depth: usize,
    pub timestamp_flagged: bool,
    /// The post body transcludes or substitutes a template (barnstars, warnings, welcomes).
    pub is_template_message: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscussionThread {
    pub heading: String,
    pub posts: Vec<Post>,
    pub is_mass_message: bool,
}

fn level_two_heading(line: &str) -> Option<&str> {
    let line = line.trim_end();
    if line.len() < 5 || !line.starts_with("==") || !line.ends_with("==") {
        return None;
    }
    if line.starts_with("===") || line.ends_with("===") {
        return None;
    }
    let inner = line[2..line.len() - 2].trim();
    (!inner.is_empty()).then_some(inner)
}

/// Splits wikitext at level-2 headings. Text before the first heading becomes a
/// thread with an empty heading when it is not blank. Deeper headings stay
/// inside their enclosing thread.
pub fn split_sections(wikitext: &str) -> Vec<ThreadSource> {
    let mut threads = Vec::new();
    let mut heading = String::new();
    let mut body = String::new();
    let mut seen_heading = false;
    for line in wikitext.lines() {
        if let Some(h) = level_two_heading(line) {
            if seen_heading || !body.trim().is_empty() {
                threads.push(ThreadSource {
                    heading: std::mem::take(&mut heading),
                    body: std::mem::take(&mut body),
                });
            }
            body.clear();
            heading = h.to_string();
            seen_heading = true;
        } else {
            body.push_str(line);
            body.push('\n');
        }
    }
    if seen_heading || !body.trim().is_empty() {
        threads.push(ThreadSource { heading, body });
    }
    threads
}

/// Lines that cannot open a post: blanks, headings of any level and bare HTML comments.
fn opens_post(line: &str) -> bool {
    let t = line.trim();
    if t.is_empty() {
        return false;
    }
    let heading = t.len() >= 2 && t.starts_with('=') && t.ends_with('=');
    let comment = t.starts_with("<!--") && t.ends_with("-->");
    !(heading || comment)
}

fn indentation_depth(line: &str) -> usize {
    line.trim_start_matches([' ', '\t'])
        .chars()
        .take_while(|c| *c == ':' || *c == '*')
        .count()
}

/// Splits a thread body into posts, one per signature.
///
/// A post runs from the end of the previous signature to the end of its own.
/// Its depth is the indentation of its first content line (headings and bare
/// comments are skipped). Text after the last signature is unsigned and
/// yields nothing.
pub fn extract_posts(body: &str) -> Vec<Post> {
    let mut posts = Vec::new();
    let mut first_line: Option<&str> = None;
    let mut has_template = false;
    for line in body.lines() {
        if first_line.is_none() && opens_post(line) {
            first_line = Some(line);
        }
        let mut segment_start = 0;
        for (sig, end) in signature::signatures_in_line(line) {
            has_template |= line[segment_start..end].contains("{{");
            posts.push(Post {
                author: sig.user,
                timestamp: sig.timestamp,
                depth: indentation_depth(first_line.unwrap_or(line)),
                timestamp_flagged: sig.timestamp_flagged,
                is_template_message: has_template,
            });
            first_line = None;
            has_template = false;
            segment_start = end;
        }
        if segment_start < line.len() {
            has_template |= line[segment_start..].contains("{{");
        }
    }
    posts
}

/// Mass-message (newsletter) detection settings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct MassMessageFilter {
    /// Accounts that deliver bulk messages. Compared after username canonicalization.
    pub delivery_agents: Vec<String>,
    /// Substrings that mark a bulk delivery anywhere in the thread body.
    pub markers: Vec<String>,
}

impl Default for MassMessageFilter {
    fn default() -> Self {
        Self {
            delivery_agents: vec!["MediaWiki message delivery".to_string()],
            markers: vec!["<!-- Message sent by User:".to_string()],
        }
    }
}

impl MassMessageFilter {
    pub fn is_mass_message(&self, thread: &ThreadSource, posts: &[Post]) -> bool {
        let agent = posts.iter().any(|p| {
            self.delivery_agents
                .iter()
                .any(|a| canonical_username(a) == p.author)
        });
        agent || self.markers.iter().any(|m| thread.body.contains(m.as_str()))
    }
}

/// Splits a talk page into threads, extracts their posts and flags mass messages.
pub fn split_threads(page: &TalkPage, filter: &MassMessageFilter) -> Vec<DiscussionThread> {
    split_sections(&page.wikitext)
        .into_iter()
        .map(|source| {
            let posts = extract_posts(&source.body);
            let is_mass_message = filter.is_mass_message(&source, &posts);
            DiscussionThread {
                heading: source.heading,
                posts,
                is_mass_message,
            }
        })
        .collect()
}

/// One post as emitted in the posts JSON-lines file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PostRecord {
    pub page_owner: String,
    pub thread: String,
    pub author: String,
    pub timestamp: String,
    pub depth: usize,
    pub mass_message: bool,
}

pub fn format_timestamp(ts: &DateTime<Utc>) -> String {
    ts.to_rfc3339_opts(SecondsFormat::Secs, true)
}

/// Flattens a parsed talk page into post records in source order.
pub fn post_records(page: &TalkPage, filter: &MassMessageFilter) -> Vec<PostRecord> {
    split_threads(page, filter)
        .into_iter()
        .flat_map(|thread| {
            let heading = thread.heading;
            let mass = thread.is_mass_message;
            let owner = page.owner.clone();
            thread.posts.into_iter().map(move |post| PostRecord {
                page_owner: owner.clone(),
                thread: heading.clone(),
                author: post.author,
                timestamp: format_timestamp(&post.timestamp),
                depth: post.depth,
                mass_message: mass,
            })
        })
        .collect()
}

/// Talk namespaces and `/Talk` subpages.
pub fn is_talk_title(title: &str) -> bool {
    let normalized = title.replace('_', " ");
    let namespace = normalized.split_once(':').map(|(ns, _)| ns.trim().to_ascii_lowercase());
    if let Some(ns) = namespace {
        if ns.ends_with(" talk") || ns == "talk" || ns == "wt" {
            return true;
        }
    }
    normalized
        .split('/')
        .skip(1)
        .any(|part| part.trim().eq_ignore_ascii_case("talk"))
}

/// Users who signed at least once on any of the given project pages.
pub fn extract_project_members<S: AsRef<str>, T: AsRef<str>>(
    pages: &[(S, T)],
) -> Result<BTreeSet<String>, ParseError> {
    let mut members = BTreeSet::new();
    for (title, wikitext) in pages {
        if is_talk_title(title.as_ref()) {
            return Err(ParseError::TalkPageAsProjectPage(title.as_ref().to_string()));
        }
        members.extend(all_signatures(wikitext.as_ref()).into_iter().map(|s| s.user));
    }
    Ok(members)
}
