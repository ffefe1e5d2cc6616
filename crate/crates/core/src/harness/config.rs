//! Run configuration read from a TOML document, with command-line overrides.
//!
//! ```toml
//! study = "refine"          # solve | refine | eps-sweep | oracle-check
//! problem = 1               # catalog id 1..=10, or a [custom] table instead
//! epsilon = 1.0             # overrides the problem's ε (solve, refine)
//! epsilons = [1.0, 0.1]     # eps-sweep values
//! mesh = [10, 20, 40]       # cells per axis; defaults to the problem's hint
//! quad = 12                 # Gauss-Legendre order M
//! mode = "hybrid"           # hybrid | always-nonlinear | always-linear
//! tol = 1e-14
//! max_iter = 200000
//! omega = 0.85              # 2D relaxation
//! eps_tilde = 1e-6
//! out = "results"
//! ```
//!
//! Every key is optional except the problem selection; see the README for the full list.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hweno::{InflowClosure, Mode, ReconOptions, TauPairing};
use crate::problem::{catalog, ProblemSpec};
use crate::report::{DeltaNorm, IterationControl, StallRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum StudyKind {
    #[default]
    Solve,
    Refine,
    EpsSweep,
    OracleCheck,
}

/// Reference used for error norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceChoice {
    /// The problem's own reference kind.
    #[default]
    Auto,
    None,
    /// A refined run of the same solver.
    FineMesh,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub study: StudyKind,
    /// Catalog problem id.
    #[serde(default)]
    pub problem: Option<u32>,
    /// Inline problem, exclusive with `problem`.
    #[serde(default)]
    pub custom: Option<ProblemSpec>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub epsilons: Vec<f64>,
    #[serde(default)]
    pub mesh: Vec<usize>,
    #[serde(default)]
    pub quad: Option<usize>,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_omega")]
    pub omega: f64,
    #[serde(default = "default_eps_tilde")]
    pub eps_tilde: f64,
    #[serde(default)]
    pub pairing: TauPairing,
    #[serde(default)]
    pub inflow_closure: Option<InflowClosure>,
    #[serde(default)]
    pub delta_norm: DeltaNorm,
    /// Wall-clock limit per solve, in seconds.
    #[serde(default)]
    pub time_budget: Option<f64>,
    /// Stop runs whose δ plateaus.
    #[serde(default)]
    pub stall: bool,
    #[serde(default)]
    pub reference: ReferenceChoice,
    /// Refinement factor of fine-mesh references (default 4 in 1D, 2 in 2D).
    #[serde(default)]
    pub refine_factor: Option<usize>,
    /// Record wall-clock seconds in the outputs; disable for byte-identical files.
    #[serde(default = "default_true")]
    pub timing: bool,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

fn default_tol() -> f64 {
    1e-14
}

fn default_max_iter() -> usize {
    IterationControl::default().max_iter
}

fn default_omega() -> f64 {
    0.85
}

fn default_eps_tilde() -> f64 {
    1e-6
}

fn default_true() -> bool {
    true
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            study: StudyKind::default(),
            problem: None,
            custom: None,
            epsilon: None,
            epsilons: Vec::new(),
            mesh: Vec::new(),
            quad: None,
            mode: Mode::default(),
            tol: default_tol(),
            max_iter: default_max_iter(),
            omega: default_omega(),
            eps_tilde: default_eps_tilde(),
            pairing: TauPairing::default(),
            inflow_closure: None,
            delta_norm: DeltaNorm::default(),
            time_budget: None,
            stall: false,
            reference: ReferenceChoice::default(),
            refine_factor: None,
            timing: true,
            out: None,
        }
    }
}

/// Command-line values that replace configuration keys when present.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub study: Option<StudyKind>,
    pub problem: Option<u32>,
    /// One value sets `epsilon`; for eps-sweep the list sets `epsilons`.
    pub epsilon: Vec<f64>,
    pub mesh: Vec<usize>,
    pub quad: Option<usize>,
    pub mode: Option<Mode>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub omega: Option<f64>,
    pub eps_tilde: Option<f64>,
    pub time_budget: Option<f64>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(s) = o.study {
            self.study = s;
        }
        if let Some(p) = o.problem {
            self.problem = Some(p);
            self.custom = None;
        }
        if !o.epsilon.is_empty() {
            if self.study == StudyKind::EpsSweep {
                self.epsilons = o.epsilon.clone();
            } else if let [e] = o.epsilon[..] {
                self.epsilon = Some(e);
            } else {
                return Err(Error::Config(
                    "--epsilon takes a single value except for eps-sweep".into(),
                ));
            }
        }
        if !o.mesh.is_empty() {
            self.mesh = o.mesh.clone();
        }
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = o.$field.clone() {
                    self.$field = v.into();
                }
            )*};
        }
        set!(quad, mode, tol, max_iter, omega, eps_tilde, time_budget, out);
        Ok(())
    }

    /// The selected problem with the ε override applied.
    pub fn problem_spec(&self) -> Result<ProblemSpec> {
        let mut spec = match (&self.problem, &self.custom) {
            (Some(id), None) => catalog(*id)?,
            (None, Some(p)) => p.clone(),
            (Some(_), Some(_)) => {
                return Err(Error::Config("give either `problem` or `custom`, not both".into()))
            }
            (None, None) => return Err(Error::Config("no problem selected".into())),
        };
        if let Some(e) = self.epsilon {
            spec.epsilon = e;
        }
        if let Some(m) = self.quad {
            spec.quadrature = m;
        }
        spec.validate()?;
        Ok(spec)
    }

    /// Mesh sizes, defaulting to the problem's hinted mesh.
    pub fn mesh_sizes(&self, spec: &ProblemSpec) -> Result<Vec<usize>> {
        if !self.mesh.is_empty() {
            return Ok(self.mesh.clone());
        }
        if self.study == StudyKind::OracleCheck {
            return Ok(vec![5]);
        }
        spec.hinted_cells()
            .map(|n| vec![n])
            .ok_or_else(|| Error::Config("`mesh` is required for this problem".into()))
    }

    pub fn validate(&self) -> Result<()> {
        let spec = self.problem_spec()?;
        let sizes = self.mesh_sizes(&spec)?;
        if sizes.contains(&0) {
            return Err(Error::Config("mesh sizes must be positive".into()));
        }
        if self.study == StudyKind::Refine && sizes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("refine studies need strictly increasing mesh sizes".into()));
        }
        if self.study == StudyKind::EpsSweep {
            if self.epsilons.is_empty() {
                return Err(Error::Config("eps-sweep needs `epsilons`".into()));
            }
            if self.epsilons.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
                return Err(Error::Config("epsilons must be positive".into()));
            }
        }
        if !(self.tol >= 0.0) {
            return Err(Error::Config("tol must be non-negative".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("max_iter must be positive".into()));
        }
        if !(self.omega > 0.0 && self.omega <= 1.0) {
            return Err(Error::Config("omega must lie in (0, 1]".into()));
        }
        if !(self.eps_tilde > 0.0) {
            return Err(Error::Config("eps_tilde must be positive".into()));
        }
        if matches!(self.refine_factor, Some(f) if f < 2) {
            return Err(Error::Config("refine_factor must be at least 2".into()));
        }
        Ok(())
    }

    pub fn recon_options(&self) -> ReconOptions {
        ReconOptions {
            mode: self.mode,
            eps_tilde: self.eps_tilde,
            pairing: self.pairing,
            inflow: self.inflow_closure,
        }
    }

    pub fn control(&self) -> IterationControl {
        IterationControl {
            tol: self.tol,
            max_iter: self.max_iter,
            norm: self.delta_norm,
            time_budget: self.time_budget,
            stall: self.stall.then(StallRule::default),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_example() {
        let c = RunConfig::from_toml_str(
            r#"
            study = "refine"
            problem = 1
            epsilon = 1.0
            mesh = [10, 20, 40]
            quad = 12
            mode = "always-linear"
            tol = 1e-12
            "#,
        )
        .unwrap();
        assert_eq!(c.study, StudyKind::Refine);
        assert_eq!(c.mode, Mode::AlwaysLinear);
        assert_eq!(c.mesh, [10, 20, 40]);
        assert_eq!(c.omega, 0.85);
        c.validate().unwrap();
    }

    #[test]
    fn unknown_key_names_the_key_and_line() {
        let e = RunConfig::from_toml_str("problem = 1\nmesh = [10]\ntoll = 1e-3\n").unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("toll") && msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn refine_needs_increasing_meshes() {
        let mut c = RunConfig {
            study: StudyKind::Refine,
            problem: Some(1),
            mesh: vec![20, 10],
            ..RunConfig::default()
        };
        assert!(c.validate().is_err());
        c.mesh = vec![10, 20];
        c.validate().unwrap();
    }

    #[test]
    fn overrides_replace_file_values() {
        let mut c = RunConfig::from_toml_str("problem = 2\nmesh = [10]\ntol = 1e-8\n").unwrap();
        c.apply(&Overrides {
            mesh: vec![20],
            tol: Some(1e-10),
            epsilon: vec![0.1],
            ..Overrides::default()
        })
        .unwrap();
        assert_eq!(c.mesh, [20]);
        assert_eq!(c.tol, 1e-10);
        assert_eq!(c.problem_spec().unwrap().epsilon, 0.1);
        assert!(c
            .apply(&Overrides {
                epsilon: vec![0.1, 0.2],
                ..Overrides::default()
            })
            .is_err());
    }

    #[test]
    fn inline_problem_round_trips() {
        let mut c = RunConfig {
            custom: Some(catalog(4).unwrap()),
            mesh: vec![10],
            ..RunConfig::default()
        };
        let text = c.to_toml_string().unwrap();
        let back = RunConfig::from_toml_str(&text).unwrap();
        assert_eq!(back, c);
        c.problem = Some(3);
        assert!(c.problem_spec().is_err());
    }
}
