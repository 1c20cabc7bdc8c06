//! Line-oriented INI files.
//!
//! ```text
//! # comment
//! [section]
//! key = value
//! matrix =
//!     0.5+0j 0+0j
//!     0+0j   0.5+0j
//! ```
//!
//! A line starting with whitespace continues the value of the previous key;
//! the pieces are joined with newlines. Keys are addressed as `section.key`.

use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub value: String,
    /// File line holding the key, 1-based. Line `k` of a multi-line value
    /// sits on file line `line + k - 1`.
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for SyntaxError {}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Ini {
    entries: BTreeMap<String, Entry>,
}

impl Ini {
    pub fn parse(text: &str) -> Result<Self, SyntaxError> {
        let mut entries: BTreeMap<String, Entry> = BTreeMap::new();
        let mut section: Option<String> = None;
        let mut open_key: Option<String> = None;

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |message: String| SyntaxError { line, message };
            let trimmed = raw.trim();

            if trimmed.is_empty() {
                open_key = None;
                continue;
            }
            if raw.starts_with([' ', '\t']) {
                let key = open_key
                    .as_ref()
                    .ok_or_else(|| err("indented line does not continue a key".into()))?;
                let entry = entries.get_mut(key).expect("open key exists");
                entry.value.push('\n');
                entry.value.push_str(trimmed);
                continue;
            }
            open_key = None;
            if trimmed.starts_with('#') || trimmed.starts_with(';') {
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| err(format!("unterminated section header `{trimmed}`")))?
                    .trim();
                if name.is_empty() || name.contains(['.', '[', ']']) {
                    return Err(err(format!("invalid section name `{name}`")));
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = trimmed
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, found `{trimmed}`")))?;
            let key = key.trim();
            if key.is_empty() || key.contains(char::is_whitespace) {
                return Err(err(format!("invalid key `{key}`")));
            }
            let sec = section
                .as_ref()
                .ok_or_else(|| err(format!("key `{key}` appears before any section header")))?;
            let full = format!("{sec}.{key}");
            if entries.contains_key(&full) {
                return Err(err(format!("duplicate key `{full}`")));
            }
            entries.insert(
                full.clone(),
                Entry {
                    value: value.trim().to_string(),
                    line,
                },
            );
            open_key = Some(full);
        }
        Ok(Self { entries })
    }

    /// Applies `section.key=value`, replacing any value from the file.
    pub fn apply_override(&mut self, spec: &str) -> Result<(), String> {
        let (key, value) = spec
            .split_once('=')
            .ok_or_else(|| format!("override `{spec}` is not of the form section.key=value"))?;
        let key = key.trim();
        match key.split_once('.') {
            Some((s, k)) if !s.is_empty() && !k.is_empty() && !k.contains('.') => {}
            _ => return Err(format!("override key `{key}` is not of the form section.key")),
        }
        self.entries.insert(
            key.to_string(),
            Entry {
                value: value.trim().to_string(),
                line: 0,
            },
        );
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn has_section(&self, section: &str) -> bool {
        let prefix = format!("{section}.");
        self.entries.keys().any(|k| k.starts_with(&prefix))
    }
}
