use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};

use crate::UsageError;

/// `key=value` pairs with per-family defaults; unknown keys are usage errors.
#[derive(Debug, Clone, Default)]
pub struct Params(BTreeMap<String, f64>);

impl Params {
    pub fn parse(s: &str) -> Result<Self> {
        let mut m = BTreeMap::new();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let Some((k, v)) = item.split_once('=') else {
                return Err(UsageError(format!("parameter '{item}' is not key=value")).into());
            };
            let v: f64 = v.trim().parse().map_err(|_| UsageError(format!("parameter '{item}' is not numeric")))?;
            m.insert(k.trim().to_string(), v);
        }
        Ok(Self(m))
    }

    /// Fails on keys outside `allowed`.
    pub fn restrict(&self, family: &str, allowed: &[&str]) -> Result<()> {
        for k in self.0.keys() {
            if !allowed.contains(&k.as_str()) {
                return Err(UsageError(format!("{family} takes {allowed:?}, got '{k}'")).into());
            }
        }
        Ok(())
    }

    pub fn get(&self, key: &str, default: f64) -> f64 {
        self.0.get(key).copied().unwrap_or(default)
    }

    pub fn opt(&self, key: &str) -> Option<f64> {
        self.0.get(key).copied()
    }

    pub fn resolved(&self, defaults: &[(&str, f64)]) -> BTreeMap<String, f64> {
        let mut m: BTreeMap<String, f64> = defaults.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        m.extend(self.0.clone());
        m
    }
}

/// Comma-separated numbers with a fixed count.
pub fn numbers(s: &str, count: usize, what: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| UsageError(format!("{what} '{s}' is not a list of numbers")))?;
    if v.len() != count {
        return Err(UsageError(format!("{what} '{s}' needs {count} numbers")).into());
    }
    Ok(v)
}

/// Numeric rows of a headerless or headed CSV file.
pub fn read_table(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
    let mut rows = vec![];
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.with_context(|| format!("{}: row {}", path.display(), i + 1))?;
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(r) => rows.push(r),
            Err(_) if i == 0 => continue,
            Err(_) => bail!(UsageError(format!("{}: row {} is not numeric", path.display(), i + 1))),
        }
    }
    Ok(rows)
}
