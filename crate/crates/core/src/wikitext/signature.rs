use std::sync::LazyLock;

use chrono::{DateTime, Datelike, NaiveDate, TimeZone, Utc};
use regex::Regex;

/// Link into the user or user-talk namespace. Captures the username up to a
/// pipe, closing bracket, anchor or subpage slash.
static USER_LINK: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)\[\[\s*:?\s*user(?:[ _]+talk)?\s*:\s*([^\]\|#/\n]+)").unwrap()
});

/// Default MediaWiki signature timestamp, e.g. `14:02, 11 February 2021 (UTC)`.
static TIMESTAMP: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(\d{1,2}):(\d{2}), (\d{1,2}) (January|February|March|April|May|June|July|August|September|October|November|December) (\d{4}) \(UTC\)",
    )
    .unwrap()
});

const FIRST_PLAUSIBLE_YEAR: i32 = 2001;

/// A user link paired with the UTC timestamp that follows it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub user: String,
    pub timestamp: DateTime<Utc>,
    /// Set when the year falls outside 2001..=current year. The signature is still used.
    pub timestamp_flagged: bool,
}

/// MediaWiki-style username normalization: underscores become spaces,
/// runs of whitespace collapse, the first character is uppercased.
pub fn canonical_username(raw: &str) -> String {
    let spaced = raw.replace('_', " ");
    let collapsed = spaced.split_whitespace().collect::<Vec<_>>().join(" ");
    let mut chars = collapsed.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

fn month_number(name: &str) -> u32 {
    match name {
        "January" => 1,
        "February" => 2,
        "March" => 3,
        "April" => 4,
        "May" => 5,
        "June" => 6,
        "July" => 7,
        "August" => 8,
        "September" => 9,
        "October" => 10,
        "November" => 11,
        _ => 12,
    }
}

fn parse_timestamp(caps: &regex::Captures<'_>) -> Option<DateTime<Utc>> {
    let hour: u32 = caps[1].parse().ok()?;
    let minute: u32 = caps[2].parse().ok()?;
    let day: u32 = caps[3].parse().ok()?;
    let month = month_number(&caps[4]);
    let year: i32 = caps[5].parse().ok()?;
    let naive = NaiveDate::from_ymd_opt(year, month, day)?.and_hms_opt(hour, minute, 0)?;
    Some(Utc.from_utc_datetime(&naive))
}

fn is_flagged(ts: &DateTime<Utc>) -> bool {
    ts.year() < FIRST_PLAUSIBLE_YEAR || ts.year() > Utc::now().year()
}

/// Every signature on a single line, with the byte offset where each one ends.
///
/// A timestamp only counts when a user link precedes it on the same line,
/// after the previous signature. With several candidate links the last one wins.
pub(crate) fn signatures_in_line(line: &str) -> Vec<(Signature, usize)> {
    let mut out = Vec::new();
    let mut cursor = 0;
    for caps in TIMESTAMP.captures_iter(line) {
        let whole = caps.get(0).expect("group 0");
        let region = &line[cursor..whole.start()];
        let Some(link) = USER_LINK.captures_iter(region).last() else {
            continue;
        };
        let user = canonical_username(&link[1]);
        if user.is_empty() {
            continue;
        }
        let Some(timestamp) = parse_timestamp(&caps) else {
            continue;
        };
        let timestamp_flagged = is_flagged(&timestamp);
        if timestamp_flagged {
            log::warn!("implausible signature timestamp {timestamp} for {user}");
        }
        out.push((
            Signature {
                user,
                timestamp,
                timestamp_flagged,
            },
            whole.end(),
        ));
        cursor = whole.end();
    }
    out
}

/// Number of timestamp-shaped strings in `text`, signed or not.
pub fn count_timestamps(text: &str) -> usize {
    TIMESTAMP.find_iter(text).count()
}

/// First signature found in `segment`, if any.
pub fn parse_signature(segment: &str) -> Option<Signature> {
    segment
        .lines()
        .find_map(|line| signatures_in_line(line).into_iter().next())
        .map(|(sig, _)| sig)
}

/// Every signature in `text`, in source order.
pub fn all_signatures(text: &str) -> Vec<Signature> {
    text.lines()
        .flat_map(|line| signatures_in_line(line).into_iter().map(|(sig, _)| sig))
        .collect()
}
