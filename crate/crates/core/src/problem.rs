//! Problem data model and the built-in benchmark catalog.
//!
//! All coefficients are given in the scaled form of the transport equation:
//! μ ∂ₓψ + (σ_t/ε) ψ = ½(σ_t/ε − ε σ_a) φ + (ε/2) Q in 1D and the analogous
//! four-direction-weighted form in 2D.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::mesh::{Mesh1D, Mesh2D};
use crate::quadrature::{legendre_rule, AngularQuadrature1D};

/// A coefficient of the form `value · ε^eps_power`, so that materials can scale
/// with the run's ε (e.g. σ_t = ε, σ_a = 1/ε in an optically thin layer).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Constant(f64),
    Scaled { value: f64, eps_power: i32 },
}

impl Coefficient {
    pub fn at(&self, eps: f64) -> f64 {
        match *self {
            Coefficient::Constant(v) => v,
            Coefficient::Scaled { value, eps_power } => value * eps.powi(eps_power),
        }
    }
}

impl From<f64> for Coefficient {
    fn from(v: f64) -> Self {
        Coefficient::Constant(v)
    }
}

/// Piecewise-constant field on a tensor grid of blocks. `x_breaks` (and
/// `y_breaks` in 2D) split the domain into blocks; `values` is stored with x
/// varying fastest, so a 1D field has `x_breaks.len() + 1` values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseField {
    #[serde(default)]
    pub x_breaks: Vec<f64>,
    #[serde(default)]
    pub y_breaks: Vec<f64>,
    pub values: Vec<Coefficient>,
}

impl PiecewiseField {
    pub fn constant(v: impl Into<Coefficient>) -> Self {
        Self {
            x_breaks: vec![],
            y_breaks: vec![],
            values: vec![v.into()],
        }
    }

    /// Blocks along x only.
    pub fn slabs(x_breaks: Vec<f64>, values: Vec<Coefficient>) -> Self {
        Self {
            x_breaks,
            y_breaks: vec![],
            values,
        }
    }

    pub fn validate(&self, what: &str) -> Result<()> {
        let want = (self.x_breaks.len() + 1) * (self.y_breaks.len() + 1);
        if self.values.len() != want {
            return Err(Error::Config(format!(
                "{what}: expected {want} values for the given breakpoints, got {}",
                self.values.len()
            )));
        }
        for b in [&self.x_breaks, &self.y_breaks] {
            if b.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::Config(format!("{what}: breakpoints must be strictly increasing")));
            }
        }
        Ok(())
    }

    fn block(breaks: &[f64], x: f64) -> usize {
        breaks.iter().take_while(|&&b| x >= b).count()
    }

    pub fn at(&self, x: f64, y: f64, eps: f64) -> f64 {
        let ix = Self::block(&self.x_breaks, x);
        let iy = Self::block(&self.y_breaks, y);
        self.values[iy * (self.x_breaks.len() + 1) + ix].at(eps)
    }
}

/// Total and absorption cross sections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialField {
    pub sigma_t: PiecewiseField,
    pub sigma_a: PiecewiseField,
}

impl MaterialField {
    pub fn breakpoints_x(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self
            .sigma_t
            .x_breaks
            .iter()
            .chain(&self.sigma_a.x_breaks)
            .copied()
            .collect();
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    pub fn breakpoints_y(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self
            .sigma_t
            .y_breaks
            .iter()
            .chain(&self.sigma_a.y_breaks)
            .copied()
            .collect();
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }
}

/// Cell-wise material values for a run at fixed ε.
#[derive(Debug, Clone, PartialEq)]
pub struct CellMaterial {
    pub sigma_t: Vec<f64>,
    pub sigma_a: Vec<f64>,
}

impl CellMaterial {
    /// σ_s = σ_t − ε² σ_a, the scattering coefficient in the units of σ_t.
    pub fn sigma_s(&self, eps: f64) -> Vec<f64> {
        self.sigma_t
            .iter()
            .zip(&self.sigma_a)
            .map(|(t, a)| t - eps * eps * a)
            .collect()
    }
}

/// External source Q.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SourceField {
    /// Direction-independent piecewise-constant source.
    Piecewise(PiecewiseField),
    /// Source manufacturing ψ = x³(1−x)³ on the slab [0, 1].
    ManufacturedSlab { sigma_a: f64 },
    /// Source manufacturing ψ = x³y³(2−x)³(2−y)³ on [0, 2]².
    ManufacturedSquare { sigma_a: f64 },
}

impl SourceField {
    pub fn is_isotropic(&self) -> bool {
        matches!(self, SourceField::Piecewise(_))
    }

    /// Q at a point for direction (μ, η).
    pub fn eval(&self, x: f64, y: f64, mu: f64, eta: f64, eps: f64) -> f64 {
        match self {
            SourceField::Piecewise(f) => f.at(x, y, eps),
            SourceField::ManufacturedSlab { sigma_a } => {
                let d = 3.0 * x * x - 12.0 * x.powi(3) + 15.0 * x.powi(4) - 6.0 * x.powi(5);
                2.0 / eps * d * mu + 2.0 * sigma_a * slab_profile(x)
            }
            SourceField::ManufacturedSquare { sigma_a } => {
                let g = |t: f64| t.powi(3) * (2.0 - t).powi(3);
                let dg = |t: f64| {
                    24.0 * t * t - 48.0 * t.powi(3) + 30.0 * t.powi(4) - 6.0 * t.powi(5)
                };
                4.0 / eps * (dg(x) * g(y) * mu + g(x) * dg(y) * eta)
                    + 4.0 * sigma_a * square_profile(x, y)
            }
        }
    }

    fn breakpoints(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            SourceField::Piecewise(f) => (f.x_breaks.clone(), f.y_breaks.clone()),
            _ => (vec![], vec![]),
        }
    }
}

/// x³(1−x)³
pub fn slab_profile(x: f64) -> f64 {
    (x * (1.0 - x)).powi(3)
}

/// x³y³(2−x)³(2−y)³
pub fn square_profile(x: f64, y: f64) -> f64 {
    (x * (2.0 - x) * y * (2.0 - y)).powi(3)
}

/// Incoming angular flux on one boundary face.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Inflow {
    #[default]
    Vacuum,
    Isotropic { value: f64 },
    /// Values spaced linearly from `from` to `to` over the incoming ordinates,
    /// ordered by increasing |μ|.
    LinearRamp { from: f64, to: f64 },
    /// One value per incoming ordinate, ordered by increasing |μ|.
    PerDirection { values: Vec<f64> },
}

impl Inflow {
    /// Values for `count` incoming ordinates ordered by increasing |μ|.
    pub fn values(&self, count: usize) -> Result<Vec<f64>> {
        let v = match self {
            Inflow::Vacuum => vec![0.0; count],
            Inflow::Isotropic { value } => vec![*value; count],
            Inflow::LinearRamp { from, to } => {
                if count == 1 {
                    vec![*from]
                } else {
                    (0..count)
                        .map(|i| from + (to - from) * i as f64 / (count - 1) as f64)
                        .collect()
                }
            }
            Inflow::PerDirection { values } => {
                if values.len() != count {
                    return Err(Error::Config(format!(
                        "inflow lists {} values but the quadrature has {count} incoming directions",
                        values.len()
                    )));
                }
                values.clone()
            }
        };
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config("inflow values must be finite".into()));
        }
        Ok(v)
    }

    /// Value for a 2D face, where only direction-independent inflow is supported.
    pub fn isotropic_value(&self) -> Result<f64> {
        match self {
            Inflow::Vacuum => Ok(0.0),
            Inflow::Isotropic { value } if value.is_finite() => Ok(*value),
            _ => Err(Error::Config(
                "2D boundaries support only vacuum or isotropic inflow".into(),
            )),
        }
    }
}

/// Inflow on every face. `bottom`/`top` are ignored in 1D.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct BoundarySpec {
    #[serde(default)]
    pub left: Inflow,
    #[serde(default)]
    pub right: Inflow,
    #[serde(default)]
    pub bottom: Inflow,
    #[serde(default)]
    pub top: Inflow,
}

/// Per-direction inflow values for a 1D quadrature, indexed by direction.
/// Entries for outgoing directions are zero.
pub fn resolve_inflow_1d(b: &BoundarySpec, quad: &AngularQuadrature1D) -> Result<(Vec<f64>, Vec<f64>)> {
    let m = quad.count();
    let half = m / 2;
    let mut left = vec![0.0; m];
    let mut right = vec![0.0; m];
    let lv = b.left.values(half)?;
    for (k, d) in quad.positive().enumerate() {
        left[d] = lv[k];
    }
    // Negative ordinates are stored ascending in μ, i.e. descending in |μ|.
    let rv = b.right.values(half)?;
    for (k, d) in quad.negative().rev().enumerate() {
        right[d] = rv[k];
    }
    Ok((left, right))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Domain {
    Slab { length: f64 },
    Rectangle { lx: f64, ly: f64 },
}

impl Domain {
    pub fn dimension(&self) -> usize {
        match self {
            Domain::Slab { .. } => 1,
            Domain::Rectangle { .. } => 2,
        }
    }
}

/// Mesh layout suggested by a problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeshHint {
    /// Consecutive `(end, dx)` segments of a piecewise-uniform mesh.
    Graded { segments: Vec<(f64, f64)> },
    /// Uniform mesh with the given cell width.
    Width { dx: f64 },
}

/// How the accuracy of a run can be measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceKind {
    /// Closed-form manufactured solution.
    Manufactured,
    /// Solution of the limiting diffusion equation.
    DiffusionLimit,
    /// Comparison against a refined run of the same solver.
    FineMesh,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub name: String,
    pub domain: Domain,
    pub material: MaterialField,
    pub source: SourceField,
    #[serde(default)]
    pub boundary: BoundarySpec,
    pub epsilon: f64,
    #[serde(default = "default_quadrature")]
    pub quadrature: usize,
    #[serde(default)]
    pub mesh_hint: Option<MeshHint>,
    #[serde(default = "default_reference")]
    pub reference: ReferenceKind,
}

fn default_quadrature() -> usize {
    12
}

fn default_reference() -> ReferenceKind {
    ReferenceKind::FineMesh
}

impl ProblemSpec {
    pub fn dimension(&self) -> usize {
        self.domain.dimension()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(invalid(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        match self.domain {
            Domain::Slab { length } if !(length > 0.0) => {
                return Err(invalid("slab length must be positive"))
            }
            Domain::Rectangle { lx, ly } if !(lx > 0.0 && ly > 0.0) => {
                return Err(invalid("domain lengths must be positive"))
            }
            _ => {}
        }
        self.material.sigma_t.validate("sigma_t")?;
        self.material.sigma_a.validate("sigma_a")?;
        if let SourceField::Piecewise(f) = &self.source {
            f.validate("source")?;
        }
        if self.dimension() == 2 {
            for f in [&self.boundary.left, &self.boundary.right, &self.boundary.bottom, &self.boundary.top] {
                f.isotropic_value()?;
            }
        }
        Ok(())
    }

    fn check_cells(&self, st: &[f64], sa: &[f64]) -> Result<()> {
        let eps = self.epsilon;
        for (cell, (&t, &a)) in st.iter().zip(sa).enumerate() {
            if !(t > 0.0) || !t.is_finite() {
                return Err(Error::Config(format!("sigma_t must be positive in cell {cell}, got {t}")));
            }
            if !(a >= 0.0) || !a.is_finite() {
                return Err(Error::Config(format!("sigma_a must be nonnegative in cell {cell}, got {a}")));
            }
            // Allow rounding noise when the scattering coefficient is exactly zero.
            let scatter = t / eps - eps * a;
            if scatter < -1e-12 * (t / eps) {
                return Err(Error::Config(format!(
                    "effective scattering sigma_t/eps - eps*sigma_a is negative in cell {cell}"
                )));
            }
        }
        Ok(())
    }

    /// Cell-wise σ_t, σ_a on a 1D mesh, validating breakpoints and admissibility.
    pub fn cell_material_1d(&self, mesh: &Mesh1D) -> Result<CellMaterial> {
        mesh.check_breakpoints(&self.material.breakpoints_x())?;
        mesh.check_breakpoints(&self.source.breakpoints().0)?;
        let eps = self.epsilon;
        let st: Vec<f64> = (0..mesh.cells())
            .map(|j| self.material.sigma_t.at(mesh.center(j), 0.0, eps))
            .collect();
        let sa: Vec<f64> = (0..mesh.cells())
            .map(|j| self.material.sigma_a.at(mesh.center(j), 0.0, eps))
            .collect();
        self.check_cells(&st, &sa)?;
        Ok(CellMaterial { sigma_t: st, sigma_a: sa })
    }

    /// Cell-wise σ_t, σ_a on a 2D mesh, stored with x fastest.
    pub fn cell_material_2d(&self, mesh: &Mesh2D) -> Result<CellMaterial> {
        mesh.x.check_breakpoints(&self.material.breakpoints_x())?;
        mesh.y.check_breakpoints(&self.material.breakpoints_y())?;
        let (sx, sy) = self.source.breakpoints();
        mesh.x.check_breakpoints(&sx)?;
        mesh.y.check_breakpoints(&sy)?;
        let eps = self.epsilon;
        let mut st = Vec::with_capacity(mesh.nx() * mesh.ny());
        let mut sa = Vec::with_capacity(mesh.nx() * mesh.ny());
        for j in 0..mesh.ny() {
            for i in 0..mesh.nx() {
                let (x, y) = (mesh.x.center(i), mesh.y.center(j));
                st.push(self.material.sigma_t.at(x, y, eps));
                sa.push(self.material.sigma_a.at(x, y, eps));
            }
        }
        self.check_cells(&st, &sa)?;
        Ok(CellMaterial { sigma_t: st, sigma_a: sa })
    }

    /// A mesh for this problem with `n` cells per axis (uniform), or the hinted
    /// graded mesh when the problem carries one and `n` matches its cell count.
    pub fn mesh_1d(&self, n: usize) -> Result<Mesh1D> {
        let Domain::Slab { length } = self.domain else {
            return Err(invalid("problem is not one-dimensional"));
        };
        if let Some(MeshHint::Graded { segments }) = &self.mesh_hint {
            let graded = Mesh1D::graded(segments)?;
            if graded.cells() == n {
                return Ok(graded);
            }
        }
        Mesh1D::uniform(length, n)
    }

    pub fn mesh_2d(&self, n: usize) -> Result<Mesh2D> {
        let Domain::Rectangle { lx, ly } = self.domain else {
            return Err(invalid("problem is not two-dimensional"));
        };
        Mesh2D::uniform(lx, ly, n, n)
    }

    /// Cell count implied by the mesh hint, if any.
    pub fn hinted_cells(&self) -> Option<usize> {
        match (&self.mesh_hint, self.domain) {
            (Some(MeshHint::Graded { segments }), _) => Mesh1D::graded(segments).ok().map(|m| m.cells()),
            (Some(MeshHint::Width { dx }), Domain::Slab { length }) => Some((length / dx).round() as usize),
            (Some(MeshHint::Width { dx }), Domain::Rectangle { lx, .. }) => Some((lx / dx).round() as usize),
            _ => None,
        }
    }
}

/// Parameters of the three-region 2D problem (catalog entry 9).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThreeRegionLayout {
    pub width: f64,
    pub height: f64,
    /// x positions separating left|middle and middle|right regions.
    pub splits: (f64, f64),
    /// (σ_t, σ_a, Q) for each region, left to right.
    pub regions: [(f64, f64, f64); 3],
}

impl Default for ThreeRegionLayout {
    fn default() -> Self {
        Self {
            width: 3.0,
            height: 3.0,
            splits: (1.0, 2.0),
            // Non-scattering and source-free; absorbing with a source;
            // scattering-dominated and source-free.
            regions: [(0.1, 0.1, 0.0), (2.0, 1.5, 1.0), (10.0, 0.01, 0.0)],
        }
    }
}

impl ThreeRegionLayout {
    pub fn problem(&self) -> ProblemSpec {
        let b = vec![self.splits.0, self.splits.1];
        let pick = |f: fn(&(f64, f64, f64)) -> f64| -> Vec<Coefficient> {
            self.regions.iter().map(|r| Coefficient::Constant(f(r))).collect()
        };
        ProblemSpec {
            name: "three-region square".into(),
            domain: Domain::Rectangle {
                lx: self.width,
                ly: self.height,
            },
            material: MaterialField {
                sigma_t: PiecewiseField::slabs(b.clone(), pick(|r| r.0)),
                sigma_a: PiecewiseField::slabs(b.clone(), pick(|r| r.1)),
            },
            source: SourceField::Piecewise(PiecewiseField::slabs(b, pick(|r| r.2))),
            boundary: BoundarySpec::default(),
            epsilon: 1.0,
            quadrature: 12,
            mesh_hint: Some(MeshHint::Width { dx: 0.1 }),
            reference: ReferenceKind::FineMesh,
        }
    }
}

fn c(v: f64) -> Coefficient {
    Coefficient::Constant(v)
}

/// One of the ten built-in benchmark problems.
pub fn catalog(example_id: u32) -> Result<ProblemSpec> {
    let vacuum = BoundarySpec::default();
    let ramp = BoundarySpec {
        left: Inflow::LinearRamp { from: 0.0, to: 5.0 },
        ..BoundarySpec::default()
    };
    let homogeneous_slab = |name: &str, source: SourceField, boundary: BoundarySpec, reference| ProblemSpec {
        name: name.into(),
        domain: Domain::Slab { length: 1.0 },
        material: MaterialField {
            sigma_t: PiecewiseField::constant(1.0),
            sigma_a: PiecewiseField::constant(0.8),
        },
        source,
        boundary,
        epsilon: 1.0,
        quadrature: 12,
        mesh_hint: Some(MeshHint::Width { dx: 0.1 }),
        reference,
    };
    let spec = match example_id {
        1 => homogeneous_slab(
            "manufactured slab",
            SourceField::ManufacturedSlab { sigma_a: 0.8 },
            vacuum,
            ReferenceKind::Manufactured,
        ),
        2 => homogeneous_slab(
            "uniform source slab",
            SourceField::Piecewise(PiecewiseField::constant(1.0)),
            vacuum,
            ReferenceKind::DiffusionLimit,
        ),
        3 => homogeneous_slab(
            "anisotropic inflow slab",
            SourceField::Piecewise(PiecewiseField::constant(1.0)),
            ramp,
            ReferenceKind::FineMesh,
        ),
        4 => ProblemSpec {
            name: "thin-thick two-region slab".into(),
            domain: Domain::Slab { length: 2.0 },
            material: MaterialField {
                sigma_t: PiecewiseField::slabs(
                    vec![1.0],
                    vec![Coefficient::Scaled { value: 1.0, eps_power: 1 }, c(1.0)],
                ),
                sigma_a: PiecewiseField::slabs(
                    vec![1.0],
                    vec![Coefficient::Scaled { value: 1.0, eps_power: -1 }, c(0.8)],
                ),
            },
            source: SourceField::Piecewise(PiecewiseField::slabs(vec![1.0], vec![c(0.0), c(1.0)])),
            boundary: ramp,
            epsilon: 1.0,
            quadrature: 12,
            mesh_hint: Some(MeshHint::Width { dx: 0.2 }),
            reference: ReferenceKind::FineMesh,
        },
        5 => ProblemSpec {
            name: "absorber-scatterer slab".into(),
            domain: Domain::Slab { length: 11.0 },
            material: MaterialField {
                sigma_t: PiecewiseField::slabs(vec![1.0], vec![c(2.0), c(100.0)]),
                sigma_a: PiecewiseField::slabs(vec![1.0], vec![c(2.0), c(0.0)]),
            },
            source: SourceField::Piecewise(PiecewiseField::constant(0.0)),
            boundary: BoundarySpec {
                left: Inflow::Isotropic { value: 1.0 },
                ..BoundarySpec::default()
            },
            epsilon: 1.0,
            quadrature: 12,
            mesh_hint: Some(MeshHint::Graded {
                segments: vec![(1.0, 0.1), (11.0, 1.0)],
            }),
            reference: ReferenceKind::FineMesh,
        },
        6 => ProblemSpec {
            name: "source-absorber and scatterer slab".into(),
            domain: Domain::Slab { length: 20.0 },
            material: MaterialField {
                sigma_t: PiecewiseField::constant(100.0),
                sigma_a: PiecewiseField::slabs(vec![10.0], vec![c(10.0), c(0.0)]),
            },
            source: SourceField::Piecewise(PiecewiseField::slabs(vec![10.0], vec![c(10.0), c(0.0)])),
            boundary: vacuum,
            epsilon: 1.0,
            quadrature: 12,
            mesh_hint: Some(MeshHint::Width { dx: 1.0 }),
            reference: ReferenceKind::FineMesh,
        },
        7 => ProblemSpec {
            name: "manufactured square".into(),
            domain: Domain::Rectangle { lx: 2.0, ly: 2.0 },
            material: MaterialField {
                sigma_t: PiecewiseField::constant(1.0),
                sigma_a: PiecewiseField::constant(0.8),
            },
            source: SourceField::ManufacturedSquare { sigma_a: 0.8 },
            boundary: vacuum,
            epsilon: 1.0,
            quadrature: 12,
            mesh_hint: Some(MeshHint::Width { dx: 0.2 }),
            reference: ReferenceKind::Manufactured,
        },
        8 => ProblemSpec {
            name: "uniform source square".into(),
            domain: Domain::Rectangle { lx: 1.0, ly: 1.0 },
            material: MaterialField {
                sigma_t: PiecewiseField::constant(1.0),
                sigma_a: PiecewiseField::constant(1.0),
            },
            source: SourceField::Piecewise(PiecewiseField::constant(1.0)),
            boundary: vacuum,
            epsilon: 1.0,
            quadrature: 12,
            mesh_hint: Some(MeshHint::Width { dx: 0.05 }),
            reference: ReferenceKind::DiffusionLimit,
        },
        9 => ThreeRegionLayout::default().problem(),
        10 => ProblemSpec {
            name: "absorbing strip square".into(),
            domain: Domain::Rectangle { lx: 5.0, ly: 5.0 },
            material: MaterialField {
                sigma_t: PiecewiseField::slabs(vec![1.0, 3.0], vec![c(1.0), c(100.0), c(1.0)]),
                sigma_a: PiecewiseField::slabs(vec![1.0, 3.0], vec![c(0.05), c(95.0), c(0.05)]),
            },
            source: SourceField::Piecewise(PiecewiseField::constant(1.0)),
            boundary: vacuum,
            epsilon: 1.0,
            quadrature: 12,
            mesh_hint: Some(MeshHint::Width { dx: 0.1 }),
            reference: ReferenceKind::FineMesh,
        },
        other => return Err(invalid(format!("unknown catalog problem {other}; expected 1..=10"))),
    };
    Ok(spec)
}

/// Reference solution attached to a catalog problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExactSolution {
    /// ψ = x³(1−x)³, scaled by `factor` (1 for ψ, 2 for φ).
    Slab { factor: f64 },
    /// ψ = x³y³(2−x)³(2−y)³, scaled by `factor` (1 for ψ, 4 for φ).
    Square { factor: f64 },
    /// Closed-form solution of the limiting diffusion equation.
    DiffusionLimit,
    /// No closed form; compare against a refined run.
    FineMeshSelfReference,
}

impl ExactSolution {
    /// Point value for the closed forms; `None` for the other descriptors.
    pub fn eval(&self, x: f64, y: f64) -> Option<f64> {
        match *self {
            ExactSolution::Slab { factor } => Some(factor * slab_profile(x)),
            ExactSolution::Square { factor } => Some(factor * square_profile(x, y)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionKind {
    Angular,
    Scalar,
}

pub fn exact_solution(example_id: u32, kind: SolutionKind) -> Result<ExactSolution> {
    let scalar = kind == SolutionKind::Scalar;
    Ok(match example_id {
        1 => ExactSolution::Slab {
            factor: if scalar { 2.0 } else { 1.0 },
        },
        7 => ExactSolution::Square {
            factor: if scalar { 4.0 } else { 1.0 },
        },
        2 => ExactSolution::DiffusionLimit,
        3..=10 => ExactSolution::FineMeshSelfReference,
        other => return Err(invalid(format!("unknown catalog problem {other}; expected 1..=10"))),
    })
}

/// Per-cell moments of a 1D function.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments1D {
    pub avg: Vec<f64>,
    pub mom: Vec<f64>,
}

/// Per-cell moments of a 2D function, x fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments2D {
    pub avg: Vec<f64>,
    pub mx: Vec<f64>,
    pub my: Vec<f64>,
    pub mxy: Vec<f64>,
}

const CELL_POINTS: usize = 5;

fn cell_rule() -> (Vec<f64>, Vec<f64>) {
    // Nodes mapped to the reference offset ξ ∈ [−½, ½], weights summing to 1.
    let (x, w) = legendre_rule(CELL_POINTS);
    (x.iter().map(|t| 0.5 * t).collect(), w.iter().map(|v| 0.5 * v).collect())
}

/// Cell averages and first moments (1/Δx)∫ f (x − x_j)/Δx dx with a 5-point
/// Gauss rule per cell.
pub fn cell_moments_1d(f: impl Fn(f64) -> f64, mesh: &Mesh1D) -> Result<Moments1D> {
    let (xi, w) = cell_rule();
    let n = mesh.cells();
    let mut avg = Vec::with_capacity(n);
    let mut mom = Vec::with_capacity(n);
    for j in 0..n {
        let (xc, dx) = (mesh.center(j), mesh.dx(j));
        let (mut a, mut b) = (0.0, 0.0);
        for k in 0..CELL_POINTS {
            let v = f(xc + xi[k] * dx);
            if !v.is_finite() {
                return Err(Error::Evaluation {
                    cell: j,
                    what: format!("non-finite value at x = {}", xc + xi[k] * dx),
                });
            }
            a += w[k] * v;
            b += w[k] * v * xi[k];
        }
        avg.push(a);
        mom.push(b);
    }
    Ok(Moments1D { avg, mom })
}

/// Average, x-moment, y-moment and cross moment per cell of a 2D mesh, using a
/// tensor 5×5 Gauss rule.
pub fn cell_moments_2d(f: impl Fn(f64, f64) -> f64, mesh: &Mesh2D) -> Result<Moments2D> {
    let (xi, w) = cell_rule();
    let (nx, ny) = (mesh.nx(), mesh.ny());
    let mut out = Moments2D {
        avg: Vec::with_capacity(nx * ny),
        mx: Vec::with_capacity(nx * ny),
        my: Vec::with_capacity(nx * ny),
        mxy: Vec::with_capacity(nx * ny),
    };
    for j in 0..ny {
        let (yc, dy) = (mesh.y.center(j), mesh.y.dx(j));
        for i in 0..nx {
            let (xc, dx) = (mesh.x.center(i), mesh.x.dx(i));
            let (mut a, mut bx, mut by, mut bxy) = (0.0, 0.0, 0.0, 0.0);
            for q in 0..CELL_POINTS {
                for p in 0..CELL_POINTS {
                    let (x, y) = (xc + xi[p] * dx, yc + xi[q] * dy);
                    let v = f(x, y);
                    if !v.is_finite() {
                        return Err(Error::Evaluation {
                            cell: j * nx + i,
                            what: format!("non-finite value at ({x}, {y})"),
                        });
                    }
                    let wv = w[p] * w[q] * v;
                    a += wv;
                    bx += wv * xi[p];
                    by += wv * xi[q];
                    bxy += wv * xi[p] * xi[q];
                }
            }
            out.avg.push(a);
            out.mx.push(bx);
            out.my.push(by);
            out.mxy.push(bxy);
        }
    }
    Ok(out)
}
