use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("project name {0:?} is empty after normalization")]
pub struct EmptyProjectName(pub String);

fn strip_prefix_ci<'a>(s: &'a str, prefix: &str) -> Option<&'a str> {
    let head = s.get(..prefix.len())?;
    head.eq_ignore_ascii_case(prefix).then(|| &s[prefix.len()..])
}

fn basic_form(raw: &str) -> String {
    let spaced = raw.replace('_', " ");
    let mut s = spaced.split_whitespace().collect::<Vec<_>>().join(" ");
    for prefix in ["Wikipedia:", "Project:", "WP:"] {
        if let Some(rest) = strip_prefix_ci(&s, prefix) {
            s = rest.trim_start().to_string();
            break;
        }
    }
    if let Some(rest) = strip_prefix_ci(&s, "WikiProject ") {
        s = rest.trim_start().to_string();
    } else if s.eq_ignore_ascii_case("WikiProject") {
        s.clear();
    }
    let mut chars = s.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Canonical project name: namespace and "WikiProject " prefixes removed,
/// underscores and runs of whitespace collapsed to single spaces, first letter
/// uppercased, then mapped through `aliases` (keys compared in the same form).
pub fn normalize_project_name(raw: &str, aliases: &BTreeMap<String, String>) -> Result<String, EmptyProjectName> {
    let base = basic_form(raw);
    if base.is_empty() {
        return Err(EmptyProjectName(raw.to_string()));
    }
    let aliased = aliases
        .iter()
        .find(|(k, _)| basic_form(k) == base)
        .map(|(_, v)| basic_form(v))
        .unwrap_or(base);
    if aliased.is_empty() {
        return Err(EmptyProjectName(raw.to_string()));
    }
    Ok(aliased)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn none() -> BTreeMap<String, String> {
        BTreeMap::new()
    }

    #[test]
    fn strips_prefixes() {
        assert_eq!(
            normalize_project_name("Wikipedia:WikiProject Tropical cyclones", &none()).unwrap(),
            "Tropical cyclones"
        );
        assert_eq!(normalize_project_name("tropical_cyclones", &none()).unwrap(), "Tropical cyclones");
        assert_eq!(
            normalize_project_name("  Wikipedia:WikiProject_Tropical__cyclones ", &none()).unwrap(),
            "Tropical cyclones"
        );
        assert_eq!(normalize_project_name("wikiproject volcanoes", &none()).unwrap(), "Volcanoes");
    }

    #[test]
    fn applies_aliases() {
        let aliases = BTreeMap::from([("Volcanism".to_string(), "Volcanoes".to_string())]);
        assert_eq!(normalize_project_name("WikiProject volcanism", &aliases).unwrap(), "Volcanoes");
        assert_eq!(normalize_project_name("Volcanoes", &aliases).unwrap(), "Volcanoes");
    }

    #[test]
    fn canonical_input_is_unchanged() {
        for name in ["Tropical cyclones", "Medieval music", "Ice hockey", "Élan"] {
            let once = normalize_project_name(name, &none()).unwrap();
            assert_eq!(once, name);
            assert_eq!(normalize_project_name(&once, &none()).unwrap(), once);
        }
    }

    #[test]
    fn empty_is_an_error() {
        for raw in ["", "   ", "___", "Wikipedia:", "WikiProject "] {
            assert!(normalize_project_name(raw, &none()).is_err(), "{raw:?}");
        }
    }
}
