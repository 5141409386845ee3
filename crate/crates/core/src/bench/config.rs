//! Experiment configuration documents.

use crate::error::BenchError;
use crate::problem::config::{parse, Format};
use crate::problem::{CoefficientField, ParametricOperator, ProblemConfig};
use crate::solver::SolverParams;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Which parameters get their own tensor mode.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TensorFormat {
    /// The field's own `j_split`; the remaining parameters live in mode 0.
    #[default]
    Split,
    /// Every parameter separated: `j_split` = parameter count, mode 0 is purely spatial.
    Full,
}

impl std::str::FromStr for TensorFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "split" => Ok(TensorFormat::Split),
            "full" => Ok(TensorFormat::Full),
            _ => Err(format!("unknown format {s:?} (expected split or full)")),
        }
    }
}

impl std::fmt::Display for TensorFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TensorFormat::Split => "split",
            TensorFormat::Full => "full",
        })
    }
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub problem: ProblemConfig,
    #[serde(default)]
    pub solver: SolverParams,
    /// Targets `ε`; `None` means the single target `solver.eps`.
    #[serde(default)]
    pub eps_schedule: Option<Vec<f64>>,
    #[serde(default)]
    pub format: TensorFormat,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(field: CoefficientField) -> Self {
        ExperimentConfig {
            problem: ProblemConfig::new(field),
            solver: SolverParams::default(),
            eps_schedule: None,
            format: TensorFormat::Split,
            out_dir: default_out_dir(),
            seed: 0,
        }
    }

    pub fn load(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path)?;
        parse(&text, Format::from_path(path)).map_err(|e| BenchError::Config(format!("{}: {e}", path.display())))
    }

    /// Targets sorted from loosest to tightest, duplicates removed.
    pub fn schedule(&self) -> Vec<f64> {
        let mut s = self.eps_schedule.clone().unwrap_or_else(|| vec![self.solver.eps]);
        s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        s.dedup();
        s
    }

    /// The field with `j_split` set by the format selector.
    pub fn field(&self) -> CoefficientField {
        let mut f = self.problem.field.clone();
        if self.format == TensorFormat::Full {
            f.j_split = f.num_params();
        }
        f
    }

    pub fn with_format(&self, format: TensorFormat) -> Self {
        ExperimentConfig { format, ..self.clone() }
    }

    /// Builds the operator and checks every scheduled target against the solver admissibility rules.
    pub fn validate(&self) -> Result<ParametricOperator, BenchError> {
        let problem = ProblemConfig { field: self.field(), ..self.problem.clone() };
        let op = problem.operator()?;
        let bounds = op.bounds();
        for eps in self.eps_schedule.iter().flatten() {
            if !(eps.is_finite() && *eps > 0.0) {
                return Err(BenchError::Config(format!("schedule target {eps} must be positive")));
            }
        }
        for eps in self.schedule() {
            SolverParams { eps, ..self.solver.clone() }.validate(&bounds).map_err(|e| BenchError::Config(e.to_string()))?;
        }
        Ok(op)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_document() {
        let text = r#"
eps_schedule = [1e-1, 1e-2]
format = "full"
out_dir = "runs/a"

[problem]
c1 = 0.1
c2 = 0.1
n_dominant = 4
level_max = 4
alpha_decay = 2.0
j_split = 4

[solver]
alpha = 0.4
"#;
        let c: ExperimentConfig = parse(text, Format::Toml).unwrap();
        assert_eq!(c.problem.field, CoefficientField::ci());
        assert_eq!(c.solver.alpha, 0.4);
        assert_eq!(c.solver.delta, SolverParams::default().delta);
        assert_eq!(c.schedule(), vec![1e-1, 1e-2]);
        assert_eq!(c.field().j_split, 32);
        c.validate().unwrap();
    }

    #[test]
    fn rejects_inadmissible_solver() {
        let mut c = ExperimentConfig::new(CoefficientField::ci());
        c.solver.delta = 0.9;
        assert!(matches!(c.validate(), Err(BenchError::Config(_))));
        let mut c = ExperimentConfig::new(CoefficientField::ci());
        c.eps_schedule = Some(vec![1e-2, -1.0]);
        assert!(matches!(c.validate(), Err(BenchError::Config(_))));
    }
}
