//! Flat key-value JSON configuration. Keys are the long flag names without
//! the leading dashes; command-line flags override file entries.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::Value;

use crate::Failure;

#[derive(Debug, Default)]
pub struct Settings {
    map: BTreeMap<String, String>,
}

impl Settings {
    pub fn empty() -> Self {
        Settings::default()
    }

    /// Loads a flat JSON object; every value must be a scalar.
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let raw = std::fs::read_to_string(path)
            .map_err(|e| Failure::Op(format!("cannot read config {}: {e}", path.display())))?;
        let value: Value = serde_json::from_str(&raw)
            .map_err(|e| Failure::Usage(format!("config {}: {e}", path.display())))?;
        let Value::Object(entries) = value else {
            return Err(Failure::Usage(format!(
                "config {} must be a JSON object of scalars",
                path.display()
            )));
        };
        let mut map = BTreeMap::new();
        for (key, val) in entries {
            let text = match val {
                Value::String(s) => s,
                Value::Number(n) => n.to_string(),
                Value::Bool(b) => b.to_string(),
                other => {
                    return Err(Failure::Usage(format!(
                        "config key `{key}` must be a scalar, got {other}"
                    )))
                }
            };
            map.insert(key, text);
        }
        Ok(Settings { map })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalars_load_and_stringify() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        std::fs::write(&path, r#"{"group":"picard","n":250,"strict":true}"#).unwrap();
        let cfg = Settings::load(&path).unwrap();
        assert_eq!(cfg.get("group"), Some("picard"));
        assert_eq!(cfg.get("n"), Some("250"));
        assert_eq!(cfg.get("strict"), Some("true"));
        assert_eq!(cfg.get("missing"), None);
    }

    #[test]
    fn non_scalar_values_are_usage_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        std::fs::write(&path, r#"{"window":[0,1]}"#).unwrap();
        let err = Settings::load(&path).unwrap_err();
        assert!(matches!(err, Failure::Usage(_)));
        std::fs::write(&path, r#"[1,2]"#).unwrap();
        assert!(matches!(Settings::load(&path).unwrap_err(), Failure::Usage(_)));
    }

    #[test]
    fn missing_file_is_operational() {
        let err = Settings::load(Path::new("/nonexistent/run.json")).unwrap_err();
        assert!(matches!(err, Failure::Op(_)));
    }
}
