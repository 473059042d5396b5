//! Flat key/value counter snapshots, rendered as versioned text.

use std::fmt;

/// Ordered `key value` pairs. Rendered with a leading `v 1` line, one pair
/// per line; keys have no whitespace.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Snapshot {
    entries: Vec<(String, String)>,
}

impl Snapshot {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl ToString) {
        let key = key.into();
        debug_assert!(!key.contains(char::is_whitespace));
        let value = value.to_string();
        match self.entries.iter_mut().find(|(k, _)| *k == key) {
            Some(e) => e.1 = value,
            None => self.entries.push((key, value)),
        }
    }

    pub fn extend<I, K, V>(&mut self, prefix: &str, pairs: I)
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: ToString,
    {
        for (k, v) in pairs {
            self.set(format!("{prefix}{}", k.as_ref()), v);
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some("v 1") {
            return Err("missing `v 1` header".into());
        }
        let mut s = Snapshot::new();
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (k, v) = line.split_once(' ').ok_or_else(|| format!("line {}: expected `key value`", i + 2))?;
            s.set(k, v);
        }
        Ok(s)
    }
}

impl fmt::Display for Snapshot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "v 1")?;
        for (k, v) in &self.entries {
            writeln!(f, "{k} {v}")?;
        }
        Ok(())
    }
}
