//! Problem configuration documents (JSON or TOML).

use super::field::CoefficientField;
use super::index::IndexUniverse;
use super::operator::ParametricOperator;
use super::rhs::RhsSource;
use crate::error::ProblemError;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Field keys at top level plus the source term and optional universe caps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemConfig {
    #[serde(flatten)]
    pub field: CoefficientField,
    #[serde(default)]
    pub rhs: RhsSource,
    #[serde(default)]
    pub universe: IndexUniverse,
}

impl ProblemConfig {
    pub fn new(field: CoefficientField) -> Self {
        ProblemConfig { field, rhs: RhsSource::default(), universe: IndexUniverse::default() }
    }

    pub fn validate(&self) -> Result<(), ProblemError> {
        self.field.validate()?;
        self.rhs.validate()
    }

    pub fn operator(&self) -> Result<ParametricOperator, ProblemError> {
        self.validate()?;
        ParametricOperator::new(self.field.clone(), self.universe)
    }
}

/// Document formats accepted for configuration files.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Toml,
}

impl Format {
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => Format::Toml,
            _ => Format::Json,
        }
    }
}

/// Parses a document of the given format.
pub fn parse<T: for<'de> Deserialize<'de>>(text: &str, format: Format) -> Result<T, String> {
    match format {
        Format::Json => serde_json::from_str(text).map_err(|e| e.to_string()),
        Format::Toml => toml::from_str(text).map_err(|e| e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_and_toml_agree() {
        let json = r#"{"mean":1.0,"c1":0.1,"c2":0.1,"n_dominant":4,"level_max":5,"alpha_decay":2.0,"j_split":4,"rhs":1.0}"#;
        let toml = "mean = 1.0\nc1 = 0.1\nc2 = 0.1\nn_dominant = 4\nlevel_max = 5\nalpha_decay = 2.0\nj_split = 4\nrhs = 1.0\n";
        let a: ProblemConfig = parse(json, Format::Json).unwrap();
        let b: ProblemConfig = parse(toml, Format::Toml).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.field, CoefficientField::reference());
        assert_eq!(a.universe, IndexUniverse::default());
    }

    #[test]
    fn piecewise_rhs_and_caps() {
        let json = r#"{"c1":0.1,"c2":0.1,"n_dominant":2,"level_max":1,"alpha_decay":2.0,"j_split":2,
            "rhs":[{"a":0.0,"b":0.5,"coeffs":[0.0,1.0]}],"universe":{"max_level":3,"max_degree":2}}"#;
        let c: ProblemConfig = parse(json, Format::Json).unwrap();
        assert_eq!(c.field.mean, 1.0);
        assert_eq!(c.universe.max_level, Some(3));
        assert!(matches!(c.rhs, RhsSource::Piecewise(_)));
        c.validate().unwrap();
    }
}
