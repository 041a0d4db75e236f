//! Minimal `key = value` configuration format with optional `[section]`
//! headers and `#` comments.
//!
//! The same format is used for run configuration files and for noise
//! profiles, so the parser lives here rather than in the command-line
//! crate. It is deliberately dumb: no escaping, no multi-line values, no
//! duplicate-key merging — later entries simply win when queried.

use crate::error::{Error, Result};

/// One `key = value` line, together with the section it appeared under and
/// its 1-based line number (for error messages).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KvEntry {
    /// Section name from the closest preceding `[section]` header, if any.
    pub section: Option<String>,
    pub key: String,
    pub value: String,
    pub line: usize,
}

/// Parses the whole text into entries, preserving file order.
pub fn parse(text: &str) -> Result<Vec<KvEntry>> {
    let mut entries = Vec::new();
    let mut section: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| {
                Error::InvalidConfig(format!("line {line_no}: unterminated section header"))
            })?;
            if name.trim().is_empty() {
                return Err(Error::InvalidConfig(format!(
                    "line {line_no}: empty section name"
                )));
            }
            section = Some(name.trim().to_string());
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::InvalidConfig(format!("line {line_no}: expected `key = value`"))
        })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::InvalidConfig(format!("line {line_no}: empty key")));
        }
        entries.push(KvEntry {
            section: section.clone(),
            key: key.to_string(),
            value: value.trim().to_string(),
            line: line_no,
        });
    }
    Ok(entries)
}

/// Serializes entries back into the textual format.
///
/// Entries must already be grouped by section (as produced by [`parse`] or
/// by straightforward construction); a header is emitted whenever the
/// section changes.
pub fn serialize(entries: &[KvEntry]) -> String {
    let mut out = String::new();
    let mut current: Option<&Option<String>> = None;
    for entry in entries {
        if current != Some(&entry.section) {
            if let Some(name) = &entry.section {
                if !out.is_empty() {
                    out.push('\n');
                }
                out.push_str(&format!("[{name}]\n"));
            }
            current = Some(&entry.section);
        }
        out.push_str(&format!("{} = {}\n", entry.key, entry.value));
    }
    out
}

/// Convenience lookup: last value for `key` under `section` (or outside any
/// section when `section` is `None`).
pub fn get<'a>(entries: &'a [KvEntry], section: Option<&str>, key: &str) -> Option<&'a str> {
    entries
        .iter()
        .rev()
        .find(|e| e.section.as_deref() == section && e.key == key)
        .map(|e| e.value.as_str())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_comments_and_pairs() {
        let text = "# comment\nshots = 1024\n\n[noise]\nreadout_flip_0to1 = 0.02\n";
        let entries = parse(text).unwrap();
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[0].section, None);
        assert_eq!(entries[0].key, "shots");
        assert_eq!(entries[1].section.as_deref(), Some("noise"));
        assert_eq!(get(&entries, Some("noise"), "readout_flip_0to1"), Some("0.02"));
        assert_eq!(get(&entries, None, "shots"), Some("1024"));
        assert_eq!(get(&entries, None, "missing"), None);
    }

    #[test]
    fn later_duplicate_wins() {
        let entries = parse("a = 1\na = 2\n").unwrap();
        assert_eq!(get(&entries, None, "a"), Some("2"));
    }

    #[test]
    fn rejects_malformed_lines_with_line_numbers() {
        let err = parse("shots = 1\nnot a pair\n").unwrap_err();
        assert!(err.to_string().contains("line 2"));
        let err = parse("[broken\n").unwrap_err();
        assert!(err.to_string().contains("line 1"));
    }

    #[test]
    fn round_trips_through_serialize() {
        let text = "shots = 1024\nseed = 7\n\n[noise]\ngate_depolarizing_1q = 0.001\n";
        let entries = parse(text).unwrap();
        let again = parse(&serialize(&entries)).unwrap();
        let strip = |es: &[KvEntry]| {
            es.iter()
                .map(|e| (e.section.clone(), e.key.clone(), e.value.clone()))
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(&entries), strip(&again));
    }
}
