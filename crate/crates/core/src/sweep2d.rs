//! Fast-sweeping source iteration for the 2D four-moment scheme.
//!
//! Each cell carries ψ, the x-moment ψ̂, the y-moment ψ̃ and the cross moment
//! ψ̂̃ per direction. Face traces are reconstructed dimension by dimension with
//! the 1D Hermite-WENO formulas: x-faces from (ψ, ψ̂) and (ψ̃, ψ̂̃) along the row,
//! y-faces from (ψ, ψ̃) and (ψ̂, ψ̂̃) along the column. The two downwind faces
//! are closed affinely in the cell's own unknowns and the 4×4 system is solved
//! directly.

use crate::error::{Error, Result};
use crate::ghost::{extrapolate, Boundary};
use crate::hweno::{self, dot6, InflowClosure, MaterialStencil, ReconOptions, Side, INFLOW_TRACE_ROW};
use crate::mesh::Mesh2D;
use crate::problem::{cell_moments_2d, CellMaterial, ProblemSpec};
use crate::quadrature::{AngularQuadrature2D, Quadrant};
use crate::report::{IterationControl, Monitor, RunReport, StopReason};
use crate::sweep1d::{CellClosure, MIN_DET};

/// Under-relaxation of the angular moments after each full pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxationPolicy {
    pub omega: f64,
}

impl Default for RelaxationPolicy {
    fn default() -> Self {
        Self { omega: 0.85 }
    }
}

impl RelaxationPolicy {
    pub fn new(omega: f64) -> Result<Self> {
        if !(omega > 0.0 && omega <= 1.0) {
            return Err(Error::InvalidArgument(format!("omega must lie in (0, 1], got {omega}")));
        }
        Ok(Self { omega })
    }
}

/// `new ← ω new + (1 − ω) old`, componentwise.
pub fn relax(old: &[f64], new: &mut [f64], omega: f64) {
    if omega == 1.0 {
        return;
    }
    for (n, o) in new.iter_mut().zip(old) {
        *n = omega * *n + (1.0 - omega) * o;
    }
}

/// Domain face of the rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Face {
    Left,
    Right,
    Bottom,
    Top,
}

/// Moments of one direction with one ghost layer, plus upwind face traces.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionField {
    /// ψ, ψ̂, ψ̃, ψ̂̃ at `(j + 1) * (nx + 2) + i + 1`; corner ghosts are unused.
    pub m: [Vec<f64>; 4],
    /// Upwind (y-average, y-moment) on x-face i of row j at `j * (nx + 1) + i`.
    pub xface: [Vec<f64>; 2],
    /// Upwind (x-average, x-moment) on y-face j of column i at `j * nx + i`.
    pub yface: [Vec<f64>; 2],
}

/// Angular flux moments for all directions.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxField2D {
    nx: usize,
    ny: usize,
    pub dirs: Vec<DirectionField>,
}

impl FluxField2D {
    pub fn zeros(nx: usize, ny: usize, directions: usize) -> Self {
        let padded = (nx + 2) * (ny + 2);
        let dir = DirectionField {
            m: std::array::from_fn(|_| vec![0.0; padded]),
            xface: std::array::from_fn(|_| vec![0.0; (nx + 1) * ny]),
            yface: std::array::from_fn(|_| vec![0.0; nx * (ny + 1)]),
        };
        Self {
            nx,
            ny,
            dirs: vec![dir; directions],
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> usize {
        (j + 1) * (self.nx + 2) + i + 1
    }

    /// Moment k (0 = ψ, 1 = ψ̂, 2 = ψ̃, 3 = ψ̂̃) of direction d in cell (i, j).
    pub fn get(&self, d: usize, i: usize, j: usize, k: usize) -> f64 {
        self.dirs[d].m[k][self.at(i, j)]
    }

    pub fn set(&mut self, d: usize, i: usize, j: usize, values: [f64; 4]) {
        let p = self.at(i, j);
        for (k, v) in values.iter().enumerate() {
            self.dirs[d].m[k][p] = *v;
        }
    }

    /// Recomputes the ghost layer of direction d from interior data.
    pub fn refresh_ghosts(&mut self, d: usize) {
        refresh_ghosts(self.nx, self.ny, &mut self.dirs[d]);
    }
}

fn refresh_ghosts(nx: usize, ny: usize, f: &mut DirectionField) {
    let w = nx + 2;

    let mut line = vec![0.0; nx.max(ny)];
    for arr in f.m.iter_mut() {
        for j in 0..ny {
            let row = (j + 1) * w;
            arr[row] = extrapolate(&arr[row + 1..row + nx + 1], Boundary::Left);
            arr[row + nx + 1] = extrapolate(&arr[row + 1..row + nx + 1], Boundary::Right);
        }
        for i in 0..nx {
            for j in 0..ny {
                line[j] = arr[(j + 1) * w + i + 1];
            }
            arr[i + 1] = extrapolate(&line[..ny], Boundary::Left);
            arr[(ny + 1) * w + i + 1] = extrapolate(&line[..ny], Boundary::Right);
        }
    }
}

/// Scalar-flux face trace: average and first moment along the face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceTrace {
    pub average: f64,
    pub moment: f64,
}

/// Scalar flux moments and sweep state.
#[derive(Debug, Clone, PartialEq)]
pub struct State2D {
    pub field: FluxField2D,
    /// Σ ω ψ and its moments per cell (x fastest).
    pub phi: [Vec<f64>; 4],
}

impl State2D {
    pub fn phi_avg(&self) -> &[f64] {
        &self.phi[0]
    }
}

type Mat4 = [[f64; 4]; 4];

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve4(mut a: Mat4, mut b: [f64; 4]) -> Option<[f64; 4]> {
    for c in 0..4 {
        let p = (c..4).max_by(|&r, &s| a[r][c].abs().total_cmp(&a[s][c].abs()))?;
        if !(a[p][c].abs() >= MIN_DET) {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..4 {
            let f = a[r][c] / a[c][c];
            if f != 0.0 {
                for k in c..4 {
                    a[r][k] -= f * a[c][k];
                }
                b[r] -= f * b[c];
            }
        }
    }
    let mut x = [0.0; 4];
    for r in (0..4).rev() {
        let mut s = b[r];
        for k in r + 1..4 {
            s -= a[r][k] * x[k];
        }
        x[r] = s / a[r][r];
    }
    Some(x)
}

fn invert4(a: &Mat4) -> Option<Mat4> {
    let mut inv = [[0.0; 4]; 4];
    for c in 0..4 {
        let mut e = [0.0; 4];
        e[c] = 1.0;
        let col = solve4(*a, e)?;
        for r in 0..4 {
            inv[r][c] = col[r];
        }
    }
    Some(inv)
}

/// Inputs to the 4×4 cell solve for one direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalProblem4 {
    pub mu: f64,
    pub eta: f64,
    pub sigma_t: f64,
    pub eps: f64,
    pub dx: f64,
    pub dy: f64,
    /// Inflow (y-average, y-moment) on the upwind x-face.
    pub inflow_x: [f64; 2],
    /// Inflow (x-average, x-moment) on the upwind y-face.
    pub inflow_y: [f64; 2],
    /// Outflow traces X0, X1, Y0, Y1 as `own[0] · u_a + own[1] · u_b + constant`
    /// where (u_a, u_b) are (ψ, ψ̂), (ψ̃, ψ̂̃), (ψ, ψ̃), (ψ̂, ψ̂̃) respectively.
    pub own: [[f64; 2]; 4],
    pub constant: [f64; 4],
    /// Frozen sources for the four moment equations.
    pub source: [f64; 4],
}

fn system4(p: &LocalProblem4) -> (Mat4, [f64; 4]) {
    let kx = p.mu / p.dx;
    let ky = p.eta / p.dy;
    let (ax, ay) = (kx.abs(), ky.abs());
    let s = p.sigma_t / p.eps;
    let [[px0, qx0], [px1, qx1], [py0, qy0], [py1, qy1]] = p.own;
    let [cx0, cx1, cy0, cy1] = p.constant;
    let [x0i, x1i] = p.inflow_x;
    let [y0i, y1i] = p.inflow_y;
    // k(E_R − E_L) equals |k|(E_out − E_in) for either sweep direction.
    let a = [
        [ax * px0 + ay * py0 + s, ax * qx0, ay * qy0, 0.0],
        [kx * (0.5 * px0 - 1.0), 0.5 * kx * qx0 + ay * py1 + s, 0.0, ay * qy1],
        [ky * (0.5 * py0 - 1.0), 0.0, ax * px1 + 0.5 * ky * qy0 + s, ax * qx1],
        [0.0, ky * (0.5 * py1 - 1.0), kx * (0.5 * px1 - 1.0), 0.5 * kx * qx1 + 0.5 * ky * qy1 + s],
    ];
    let b = [
        p.source[0] + ax * (x0i - cx0) + ay * (y0i - cy0),
        p.source[1] - 0.5 * kx * (x0i + cx0) + ay * (y1i - cy1),
        p.source[2] + ax * (x1i - cx1) - 0.5 * ky * (y0i + cy0),
        p.source[3] - 0.5 * kx * (x1i + cx1) - 0.5 * ky * (y1i + cy1),
    ];
    (a, b)
}

/// Solves the four moment equations of one cell; returns (ψ, ψ̂, ψ̃, ψ̂̃).
pub fn local_solve4(p: &LocalProblem4, cell: usize, direction: usize) -> Result<[f64; 4]> {
    let (a, b) = system4(p);
    let u = solve4(a, b).ok_or_else(|| Error::Breakdown {
        cell,
        direction,
        what: "singular 4x4 cell system".into(),
    })?;
    if u.iter().any(|v| !v.is_finite()) {
        return Err(Error::Divergence { cell, direction });
    }
    Ok(u)
}

/// Precomputed, run-invariant data for sweeping one problem on one mesh.
#[derive(Debug, Clone)]
pub struct Sweeper2D {
    mesh: Mesh2D,
    quad: AngularQuadrature2D,
    eps: f64,
    opts: ReconOptions,
    relax: RelaxationPolicy,
    material: CellMaterial,
    xclosure: Vec<CellClosure>,
    yclosure: Vec<CellClosure>,
    /// Material class of cells whose x and y closures are both linear.
    class: Vec<Option<usize>>,
    /// Cached inverses per direction and material class.
    inverses: Vec<Vec<Mat4>>,
    /// ¼ (σ_t/ε − ε σ_a) per cell.
    quarter_scatter: Vec<f64>,
    /// (ε/4) Q moments per direction (one entry when Q is isotropic).
    q: Vec<[Vec<f64>; 4]>,
    /// Inflow (average, moment) per face, direction and face position.
    inflow: [Vec<[f64; 2]>; 4],
}

const LINEAR_X: CellClosure = CellClosure::Linear;


impl Sweeper2D {
    pub fn new(
        problem: &ProblemSpec,
        mesh: &Mesh2D,
        quad: &AngularQuadrature2D,
        opts: ReconOptions,
        relax: RelaxationPolicy,
    ) -> Result<Self> {
        problem.validate()?;
        if problem.dimension() != 2 {
            return Err(Error::InvalidArgument("problem is not two-dimensional".into()));
        }
        let (nx, ny) = (mesh.nx(), mesh.ny());
        if nx < 5 || ny < 5 {
            return Err(Error::Config(format!(
                "the 2D solver needs at least 5 cells per axis, got {nx}x{ny}"
            )));
        }
        if !(opts.eps_tilde > 0.0) {
            return Err(Error::InvalidArgument("eps_tilde must be positive".into()));
        }
        let relax = RelaxationPolicy::new(relax.omega)?;
        let eps = problem.epsilon;
        let material = problem.cell_material_2d(mesh)?;
        let sigma_s = material.sigma_s(eps);
        let cells = nx * ny;
        let closure_for = |c: usize, l: usize, r: usize, h: f64| {
            let ms = MaterialStencil {
                sigma_t: [material.sigma_t[l], material.sigma_t[c], material.sigma_t[r]],
                sigma_s: [sigma_s[l], sigma_s[c], sigma_s[r]],
                dx: h,
            };
            let tau = hweno::heterogeneity_factors_with(&ms, opts.pairing);
            if hweno::uses_linear(opts.mode, tau[2]) {
                CellClosure::Linear
            } else {
                CellClosure::Nonlinear(tau)
            }
        };
        let mut xclosure = Vec::with_capacity(cells);
        let mut yclosure = Vec::with_capacity(cells);
        for j in 0..ny {
            for i in 0..nx {
                let c = j * nx + i;
                let (il, ir) = (i.saturating_sub(1), (i + 1).min(nx - 1));
                let (jl, jr) = (j.saturating_sub(1), (j + 1).min(ny - 1));
                xclosure.push(closure_for(c, j * nx + il, j * nx + ir, mesh.dx()));
                yclosure.push(closure_for(c, jl * nx + i, jr * nx + i, mesh.dy()));
            }
        }
        // σ_t and first cell of each linear material class.
        let mut classes: Vec<(f64, usize)> = Vec::new();
        let class = (0..cells)
            .map(|c| {
                if xclosure[c] != LINEAR_X || yclosure[c] != LINEAR_X {
                    return None;
                }
                let st = material.sigma_t[c];
                Some(match classes.iter().position(|&(v, _)| v == st) {
                    Some(k) => k,
                    None => {
                        classes.push((st, c));
                        classes.len() - 1
                    }
                })
            })
            .collect();
        let mut inverses = Vec::with_capacity(quad.count());
        for d in 0..quad.count() {
            let (mu, eta) = (quad.mu()[d], quad.eta()[d]);
            let xr = hweno::big_row(if mu > 0.0 { Side::RightEdgeMinus } else { Side::LeftEdgePlus });
            let yr = hweno::big_row(if eta > 0.0 { Side::RightEdgeMinus } else { Side::LeftEdgePlus });
            let mut per_class = Vec::with_capacity(classes.len());
            for &(st, first) in &classes {
                let (a, _) = system4(&LocalProblem4 {
                    mu,
                    eta,
                    sigma_t: st,
                    eps,
                    dx: mesh.dx(),
                    dy: mesh.dy(),
                    inflow_x: [0.0; 2],
                    inflow_y: [0.0; 2],
                    own: [[xr[1], xr[4]], [xr[1], xr[4]], [yr[1], yr[4]], [yr[1], yr[4]]],
                    constant: [0.0; 4],
                    source: [0.0; 4],
                });
                let inv = invert4(&a).ok_or_else(|| Error::Breakdown {
                    cell: first,
                    direction: d,
                    what: "singular 4x4 cell system".into(),
                })?;
                per_class.push(inv);
            }
            inverses.push(per_class);
        }
        let quarter_scatter = (0..cells)
            .map(|c| 0.25 * (material.sigma_t[c] / eps - eps * material.sigma_a[c]))
            .collect();
        let rows = if problem.source.is_isotropic() { 1 } else { quad.count() };
        let mut q = Vec::with_capacity(rows);
        for d in 0..rows {
            let (mu, eta) = (quad.mu()[d], quad.eta()[d]);
            let mo = cell_moments_2d(|x, y| problem.source.eval(x, y, mu, eta, eps), mesh)?;
            let scale = |v: Vec<f64>| v.into_iter().map(|x| 0.25 * eps * x).collect::<Vec<_>>();
            q.push([scale(mo.avg), scale(mo.mx), scale(mo.my), scale(mo.mxy)]);
        }
        let nd = quad.count();
        let b = &problem.boundary;
        let iso = [
            b.left.isotropic_value()?,
            b.right.isotropic_value()?,
            b.bottom.isotropic_value()?,
            b.top.isotropic_value()?,
        ];
        let inflow = [
            vec![[iso[0], 0.0]; nd * ny],
            vec![[iso[1], 0.0]; nd * ny],
            vec![[iso[2], 0.0]; nd * nx],
            vec![[iso[3], 0.0]; nd * nx],
        ];
        Ok(Self {
            mesh: mesh.clone(),
            quad: quad.clone(),
            eps,
            opts,
            relax,
            material,
            xclosure,
            yclosure,
            class,
            inverses,
            quarter_scatter,
            q,
            inflow,
        })
    }

    pub fn mesh(&self) -> &Mesh2D {
        &self.mesh
    }

    pub fn quadrature(&self) -> &AngularQuadrature2D {
        &self.quad
    }

    /// Closures used for the x-faces and y-faces of each cell.
    pub fn closures(&self) -> (&[CellClosure], &[CellClosure]) {
        (&self.xclosure, &self.yclosure)
    }

    /// Replaces the inflow (average, first moment) of direction d on `face`,
    /// one entry per cell along the face (bottom to top or left to right).
    pub fn set_inflow(&mut self, face: Face, d: usize, values: &[[f64; 2]]) -> Result<()> {
        let (k, len) = match face {
            Face::Left => (0, self.mesh.ny()),
            Face::Right => (1, self.mesh.ny()),
            Face::Bottom => (2, self.mesh.nx()),
            Face::Top => (3, self.mesh.nx()),
        };
        if values.len() != len || d >= self.quad.count() {
            return Err(Error::InvalidArgument(format!(
                "inflow for {face:?} needs {len} values for a valid direction"
            )));
        }
        self.inflow[k][d * len..(d + 1) * len].copy_from_slice(values);
        Ok(())
    }

    pub fn zero_state(&self) -> State2D {
        let (nx, ny) = (self.mesh.nx(), self.mesh.ny());
        State2D {
            field: FluxField2D::zeros(nx, ny, self.quad.count()),
            phi: std::array::from_fn(|_| vec![0.0; nx * ny]),
        }
    }

    /// Sweeps direction d over all cells in its causal order.
    pub fn sweep_direction(&self, state: &mut State2D, d: usize) -> Result<()> {
        let (nx, ny) = (self.mesh.nx(), self.mesh.ny());
        let (mu, eta) = (self.quad.mu()[d], self.quad.eta()[d]);
        let (fx, fy) = (mu > 0.0, eta > 0.0);
        let xside = if fx { Side::RightEdgeMinus } else { Side::LeftEdgePlus };
        let yside = if fy { Side::RightEdgeMinus } else { Side::LeftEdgePlus };
        let q = &self.q[if self.q.len() == 1 { 0 } else { d }];
        let phi = &state.phi;
        let f = &mut state.field.dirs[d];
        let w = nx + 2;
        // Boundary inflow faces.
        let (xin, xin_face) = if fx { (&self.inflow[0], 0) } else { (&self.inflow[1], nx) };
        for j in 0..ny {
            let v = xin[d * ny + j];
            f.xface[0][j * (nx + 1) + xin_face] = v[0];
            f.xface[1][j * (nx + 1) + xin_face] = v[1];
        }
        let (yin, yin_face) = if fy { (&self.inflow[2], 0) } else { (&self.inflow[3], ny) };
        for i in 0..nx {
            let v = yin[d * nx + i];
            f.yface[0][yin_face * nx + i] = v[0];
            f.yface[1][yin_face * nx + i] = v[1];
        }
        for sj in 0..ny {
            let j = if fy { sj } else { ny - 1 - sj };
            for si in 0..nx {
                let i = if fx { si } else { nx - 1 - si };
                let c = j * nx + i;
                let p = (j + 1) * w + i + 1;
                let row_data = |k0: usize, k1: usize| -> [f64; 6] {
                    let (a, b) = (&f.m[k0], &f.m[k1]);
                    [a[p - 1], a[p], a[p + 1], b[p - 1], b[p], b[p + 1]]
                };
                let col_data = |k0: usize, k1: usize| -> [f64; 6] {
                    let (a, b) = (&f.m[k0], &f.m[k1]);
                    [a[p - w], a[p], a[p + w], b[p - w], b[p], b[p + w]]
                };
                let data = [row_data(0, 1), row_data(2, 3), col_data(0, 2), col_data(1, 3)];
                let (xc, yc) = (self.xclosure[c], self.yclosure[c]);
                let xin_i = if fx { i } else { i + 1 };
                let xout_i = if fx { i + 1 } else { i };
                let yin_j = if fy { j } else { j + 1 };
                let yout_j = if fy { j + 1 } else { j };
                let xi = j * (nx + 1) + xin_i;
                let yi = yin_j * nx + i;
                let trace = self.opts.inflow.unwrap_or(InflowClosure::Trace) == InflowClosure::Trace;
                let on_inflow_x = trace && si == 0;
                let on_inflow_y = trace && sj == 0;
                let mut own = [[0.0; 2]; 4];
                let mut constant = [0.0; 4];
                for t in 0..4 {
                    let (cl, side, dir, on_inflow, e_in) = if t < 2 {
                        (xc, xside, fx, on_inflow_x, f.xface[t][xi])
                    } else {
                        (yc, yside, fy, on_inflow_y, f.yface[t - 2][yi])
                    };
                    let dt = &data[t];
                    if on_inflow && cl == CellClosure::Linear {
                        // The inflow trace replaces the upwind ghost cell.
                        let (s, da, db) = if dir { (1.0, dt[2], dt[5]) } else { (-1.0, dt[0], dt[3]) };
                        let r = INFLOW_TRACE_ROW;
                        own[t] = [r[1], s * r[2]];
                        constant[t] = r[0] * e_in + r[3] * da + s * r[4] * db;
                        continue;
                    }
                    let r = cl.row(dt, side, &self.opts);
                    own[t] = [r[1], r[4]];
                    constant[t] = r[0] * dt[0] + r[2] * dt[2] + r[3] * dt[3] + r[5] * dt[5];
                }
                let qs = self.quarter_scatter[c];
                let lp = LocalProblem4 {
                    mu,
                    eta,
                    sigma_t: self.material.sigma_t[c],
                    eps: self.eps,
                    dx: self.mesh.dx(),
                    dy: self.mesh.dy(),
                    inflow_x: [f.xface[0][xi], f.xface[1][xi]],
                    inflow_y: [f.yface[0][yi], f.yface[1][yi]],
                    own,
                    constant,
                    source: std::array::from_fn(|k| qs * phi[k][c] + q[k][c]),
                };
                let u = match if on_inflow_x || on_inflow_y { None } else { self.class[c] } {
                    Some(k) => {
                        let (_, b) = system4(&lp);
                        let inv = &self.inverses[d][k];
                        let u: [f64; 4] = std::array::from_fn(|r| {
                            inv[r][0] * b[0] + inv[r][1] * b[1] + inv[r][2] * b[2] + inv[r][3] * b[3]
                        });
                        if u.iter().any(|v| !v.is_finite()) {
                            return Err(Error::Divergence { cell: c, direction: d });
                        }
                        u
                    }
                    None => local_solve4(&lp, c, d)?,
                };
                for k in 0..4 {
                    f.m[k][p] = u[k];
                }
                // Own unknowns entering each trace: (ψ, ψ̂), (ψ̃, ψ̂̃), (ψ, ψ̃), (ψ̂, ψ̂̃).
                let pairs = [(0, 1), (2, 3), (0, 2), (1, 3)];
                let mut out = [0.0; 4];
                for t in 0..4 {
                    let (cl, side) = if t < 2 { (xc, xside) } else { (yc, yside) };
                    let (ka, kb) = pairs[t];
                    out[t] = match cl {
                        CellClosure::Nonlinear(_) => {
                            let mut dt = data[t];
                            dt[1] = u[ka];
                            dt[4] = u[kb];
                            dot6(&cl.row(&dt, side, &self.opts), &dt)
                        }
                        _ => own[t][0] * u[ka] + own[t][1] * u[kb] + constant[t],
                    };
                }
                let xo = j * (nx + 1) + xout_i;
                let yo = yout_j * nx + i;
                f.xface[0][xo] = out[0];
                f.xface[1][xo] = out[1];
                f.yface[0][yo] = out[2];
                f.yface[1][yo] = out[3];
            }
        }
        Ok(())
    }

    /// Recomputes the scalar moments; returns the area-weighted change and
    /// size of φ.
    pub fn update_scalar(&self, state: &mut State2D) -> (f64, f64) {
        let (nx, ny) = (self.mesh.nx(), self.mesh.ny());
        let area = self.mesh.dx() * self.mesh.dy();
        let mut new: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; nx * ny]);
        for (d, wd) in self.quad.weights().iter().enumerate() {
            let f = &state.field.dirs[d];
            for k in 0..4 {
                let (src, dst) = (&f.m[k], &mut new[k]);
                for j in 0..ny {
                    let row = (j + 1) * (nx + 2) + 1;
                    for (o, v) in dst[j * nx..(j + 1) * nx].iter_mut().zip(&src[row..row + nx]) {
                        *o += wd * v;
                    }
                }
            }
        }
        let mut change = 0.0;
        let mut size = 0.0;
        for (n, o) in new[0].iter().zip(&state.phi[0]) {
            change += (n - o).abs() * area;
            size += n.abs() * area;
        }
        state.phi = new;
        (change, size)
    }

    /// One source iteration: every direction of every quadrant in `order` is
    /// swept and relaxed against its previous moments, then φ is updated.
    pub fn iterate_once(&self, state: &mut State2D, order: &[Quadrant]) -> Result<(f64, f64)> {
        let (nx, ny) = (self.mesh.nx(), self.mesh.ny());
        let omega = self.relax.omega;
        let mut old: [Vec<f64>; 4] = Default::default();
        for &quadrant in order {
            for d in self.quad.quadrant_range(quadrant) {
                if omega < 1.0 {
                    for k in 0..4 {
                        old[k].clone_from(&state.field.dirs[d].m[k]);
                    }
                }
                self.sweep_direction(state, d)?;
                let f = &mut state.field.dirs[d];
                if omega < 1.0 {
                    for k in 0..4 {
                        relax(&old[k], &mut f.m[k], omega);
                    }
                }
                refresh_ghosts(nx, ny, f);
            }
        }
        Ok(self.update_scalar(state))
    }

    /// Runs source iteration from `state` until the stopping rule triggers.
    pub fn iterate(&self, state: &mut State2D, control: &IterationControl, order: &[Quadrant]) -> Result<(StopReason, Vec<f64>, f64)> {
        let mut monitor = Monitor::new(control);
        loop {
            let (change, size) = self.iterate_once(state, order)?;
            if let Some(stop) = monitor.record(change, size)? {
                let seconds = monitor.seconds();
                return Ok((stop, monitor.into_history(), seconds));
            }
        }
    }

    /// Trace of the scalar flux reconstructed from inside cell (i, j) on `face`.
    pub fn face_trace(&self, state: &State2D, i: usize, j: usize, face: Face) -> FaceTrace {
        let nx = self.mesh.nx();
        let c = j * nx + i;
        let f = &state.field;
        let p = f.at(i, j);
        let w = nx + 2;
        let (stride, cl, side, pair) = match face {
            Face::Left => (1, self.xclosure[c], Side::LeftEdgePlus, [(0, 1), (2, 3)]),
            Face::Right => (1, self.xclosure[c], Side::RightEdgeMinus, [(0, 1), (2, 3)]),
            Face::Bottom => (w, self.yclosure[c], Side::LeftEdgePlus, [(0, 2), (1, 3)]),
            Face::Top => (w, self.yclosure[c], Side::RightEdgeMinus, [(0, 2), (1, 3)]),
        };
        let mut out = [0.0; 2];
        for (d, wd) in self.quad.weights().iter().enumerate() {
            let m = &f.dirs[d].m;
            for (t, &(ka, kb)) in pair.iter().enumerate() {
                let (a, b) = (&m[ka], &m[kb]);
                let dt = [a[p - stride], a[p], a[p + stride], b[p - stride], b[p], b[p + stride]];
                out[t] += wd * dot6(&cl.row(&dt, side, &self.opts), &dt);
            }
        }
        FaceTrace {
            average: out[0],
            moment: out[1],
        }
    }
}

/// Converged (or stopped) 2D run.
#[derive(Debug, Clone)]
pub struct Solution2D {
    pub report: RunReport,
    pub state: State2D,
}

/// Zero-initialized source iteration with the quadrants in their standard order.
pub fn solve_2d(
    problem: &ProblemSpec,
    mesh: &Mesh2D,
    quad: &AngularQuadrature2D,
    control: &IterationControl,
    opts: ReconOptions,
    relax: RelaxationPolicy,
) -> Result<Solution2D> {
    let sweeper = Sweeper2D::new(problem, mesh, quad, opts, relax)?;
    let mut state = sweeper.zero_state();
    let (stop, history, seconds) = sweeper.iterate(&mut state, control, &Quadrant::ALL)?;
    Ok(Solution2D {
        report: report_2d(problem, mesh, &state, stop, history, seconds),
        state,
    })
}

pub(crate) fn report_2d(
    problem: &ProblemSpec,
    mesh: &Mesh2D,
    state: &State2D,
    stop: StopReason,
    history: Vec<f64>,
    seconds: f64,
) -> RunReport {
    let (nx, ny) = (mesh.nx(), mesh.ny());
    let xc = mesh.x.centers();
    let yc = mesh.y.centers();
    RunReport {
        dimension: 2,
        cells: vec![nx, ny],
        epsilon: problem.epsilon,
        converged: stop == StopReason::Converged,
        stop,
        iterations: history.len(),
        seconds,
        history,
        x: (0..nx * ny).map(|c| xc[c % nx]).collect(),
        y: (0..nx * ny).map(|c| yc[c / nx]).collect(),
        phi: state.phi[0].clone(),
        edges: None,
        errors: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hweno::Mode;
    use crate::mesh::Mesh1D;
    use crate::problem::{catalog, exact_solution, Domain, PiecewiseField, SolutionKind, SourceField};
    use crate::quadrature::{gauss_legendre, product_quadrature};
    use crate::report::ErrorNorms;
    use crate::sweep1d::solve_1d;
    use proptest::prelude::*;

    fn control(tol: f64) -> IterationControl {
        IterationControl {
            max_iter: 20_000,
            ..IterationControl::with_tol(tol)
        }
    }

    #[test]
    fn relax_examples() {
        let mut new = vec![1.0, 2.0];
        relax(&[5.0, 5.0], &mut new, 1.0);
        assert_eq!(new, [1.0, 2.0]);
        let mut same = vec![3.0, -1.0];
        relax(&[3.0, -1.0], &mut same, 0.85);
        assert_eq!(same, [3.0, -1.0]);
        let mut one = vec![1.0];
        relax(&[0.0], &mut one, 0.85);
        assert_eq!(one, [0.85]);
        assert!(RelaxationPolicy::new(0.0).is_err());
        assert!(RelaxationPolicy::new(1.2).is_err());
    }

    #[test]
    fn inflow_row_reproduces_quartics() {
        // p(ξ) = ξ⁴ on the cell [−½, ½] and its downwind neighbour [½, 3/2].
        let int = |k: i32, c: f64| ((c + 0.5).powi(k + 1) - (c - 0.5).powi(k + 1)) / (k + 1) as f64;
        let a0 = int(4, 0.0);
        let b0 = int(5, 0.0);
        let a1 = int(4, 1.0);
        let b1 = int(5, 1.0) - int(4, 1.0);
        let r = INFLOW_TRACE_ROW;
        let v = r[0] * 0.0625 + r[1] * a0 + r[2] * b0 + r[3] * a1 + r[4] * b1;
        assert!((v - 0.0625).abs() < 1e-14);
    }

    #[test]
    fn vacuum_zero_source_is_fixed_point() {
        let mut p = catalog(7).unwrap();
        p.source = SourceField::Piecewise(PiecewiseField::constant(0.0));
        let mesh = p.mesh_2d(6).unwrap();
        let quad = product_quadrature(4).unwrap();
        let s = solve_2d(&p, &mesh, &quad, &control(1e-14), ReconOptions::default(), RelaxationPolicy::default()).unwrap();
        assert!(s.report.phi.iter().all(|&v| v == 0.0));
        assert!(s.state.field.dirs.iter().all(|d| d.m.iter().all(|a| a.iter().all(|&v| v == 0.0))));
    }

    #[test]
    fn constant_field_has_constant_traces() {
        let p = catalog(8).unwrap();
        let mesh = p.mesh_2d(6).unwrap();
        let quad = product_quadrature(2).unwrap();
        let sw = Sweeper2D::new(&p, &mesh, &quad, ReconOptions::default(), RelaxationPolicy::default()).unwrap();
        let mut st = sw.zero_state();
        for d in 0..quad.count() {
            for j in 0..6 {
                for i in 0..6 {
                    st.field.set(d, i, j, [0.75, 0.0, 0.0, 0.0]);
                }
            }
            st.field.refresh_ghosts(d);
        }
        for face in [Face::Left, Face::Right, Face::Bottom, Face::Top] {
            let t = sw.face_trace(&st, 0, 3, face);
            assert!((t.average - 3.0).abs() < 1e-13, "{face:?}");
            assert!(t.moment.abs() < 1e-13);
        }
    }

    proptest! {
        #[test]
        fn local_solve_satisfies_its_equations(
            mu in 0.05f64..1.0, eta in -1.0f64..-0.05, st in 0.1f64..50.0, eps in 1e-3f64..1.0,
            own in prop::array::uniform4(prop::array::uniform2(-3.0f64..3.0)),
            src in prop::array::uniform4(-1.0f64..1.0),
            inflow in prop::array::uniform4(-1.0f64..1.0),
        ) {
            let p = LocalProblem4 {
                mu, eta, sigma_t: st, eps, dx: 0.1, dy: 0.2,
                inflow_x: [inflow[0], inflow[1]],
                inflow_y: [inflow[2], inflow[3]],
                own,
                constant: [0.1, -0.2, 0.3, 0.0],
                source: src,
            };
            if let Ok(u) = local_solve4(&p, 0, 0) {
                let (a, b) = system4(&p);
                for r in 0..4 {
                    let lhs: f64 = (0..4).map(|k| a[r][k] * u[k]).sum();
                    let scale = 1.0 + b[r].abs() + (0..4).map(|k| (a[r][k] * u[k]).abs()).sum::<f64>();
                    prop_assert!((lhs - b[r]).abs() <= 1e-10 * scale);
                }
            }
        }
    }

    #[test]
    fn manufactured_square_accuracy_and_iterations() {
        let p = catalog(7).unwrap();
        let mesh = p.mesh_2d(10).unwrap();
        let quad = product_quadrature(12).unwrap();
        let s = solve_2d(&p, &mesh, &quad, &control(1e-14), ReconOptions::default(), RelaxationPolicy::default()).unwrap();
        assert!(s.report.converged);
        let exact = exact_solution(7, SolutionKind::Scalar).unwrap();
        let m = cell_moments_2d(|x, y| exact.eval(x, y).unwrap(), &mesh).unwrap();
        let e = ErrorNorms::between(&s.report.phi, &m.avg, &vec![mesh.dx() * mesh.dy(); 100]);
        assert!(e.l1 < 2.07e-3 * 3.0 && e.l1 > 2.07e-3 / 3.0, "L1 = {:e}", e.l1);
        let it = s.report.iterations as f64;
        assert!((it - 43.0).abs() <= 0.3 * 43.0, "iterations {it}");
    }

    #[test]
    fn first_iteration_is_positive() {
        let p = catalog(8).unwrap();
        let mesh = p.mesh_2d(10).unwrap();
        let quad = product_quadrature(4).unwrap();
        let sw = Sweeper2D::new(&p, &mesh, &quad, ReconOptions::default(), RelaxationPolicy::default()).unwrap();
        let mut st = sw.zero_state();
        sw.iterate_once(&mut st, &Quadrant::ALL).unwrap();
        assert!(st.phi_avg().iter().all(|&v| v > 0.0));
    }

    #[test]
    fn quadrant_order_does_not_matter() {
        let p = catalog(7).unwrap();
        let mesh = p.mesh_2d(8).unwrap();
        let quad = product_quadrature(4).unwrap();
        let sw = Sweeper2D::new(&p, &mesh, &quad, ReconOptions::default(), RelaxationPolicy::default()).unwrap();
        let mut a = sw.zero_state();
        let mut b = sw.zero_state();
        let mut order = Quadrant::ALL;
        order.reverse();
        sw.iterate(&mut a, &control(1e-14), &Quadrant::ALL).unwrap();
        sw.iterate(&mut b, &control(1e-14), &order).unwrap();
        let diff = a.phi[0].iter().zip(&b.phi[0]).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(diff <= 1e-10, "{diff:e}");
    }

    #[test]
    fn relaxation_keeps_the_fixed_point() {
        for (id, eps) in [(7, 1.0), (8, 0.5)] {
            let mut p = catalog(id).unwrap();
            p.epsilon = eps;
            let mesh = p.mesh_2d(8).unwrap();
            let quad = product_quadrature(4).unwrap();
            let run = |omega| {
                let relax = RelaxationPolicy::new(omega).unwrap();
                solve_2d(&p, &mesh, &quad, &control(1e-14), ReconOptions::default(), relax).unwrap()
            };
            let (a, b) = (run(1.0), run(0.85));
            assert!(a.report.converged && b.report.converged);
            let diff = a.report.phi.iter().zip(&b.report.phi).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            assert!(diff <= 1e-11, "problem {id}: {diff:e}");
        }
    }

    #[test]
    fn y_invariant_problem_matches_1d() {
        let eps = 0.5;
        let mut p1 = catalog(2).unwrap();
        p1.epsilon = eps;
        let quad1 = gauss_legendre(4).unwrap();
        let mesh1 = Mesh1D::uniform(1.0, 10).unwrap();
        let opts = ReconOptions {
            inflow: Some(InflowClosure::Trace),
            ..ReconOptions::default()
        };
        let s1 = solve_1d(&p1, &mesh1, &quad1, &control(1e-15), opts).unwrap();

        // φ integrates over four quadrants in 2D and two half-ranges in 1D, so
        // the same ψ needs twice the source.
        let mut p2 = p1.clone();
        p2.domain = Domain::Rectangle { lx: 1.0, ly: 1.0 };
        p2.source = SourceField::Piecewise(PiecewiseField::constant(2.0));
        let mesh2 = Mesh2D::uniform(1.0, 1.0, 10, 6).unwrap();
        let quad2 = product_quadrature(4).unwrap();
        let mut sw = Sweeper2D::new(&p2, &mesh2, &quad2, opts, RelaxationPolicy::default()).unwrap();
        let m_of = |d: usize| quad1.ordinates().iter().position(|&v| v == quad2.mu()[d]).unwrap();
        for d in 0..quad2.count() {
            let m = m_of(d);
            let trace: Vec<[f64; 2]> = (0..10).map(|i| [s1.state.field.avg(m, i), s1.state.field.mom(m, i)]).collect();
            let face = if quad2.eta()[d] > 0.0 { Face::Bottom } else { Face::Top };
            sw.set_inflow(face, d, &trace).unwrap();
        }
        let mut st = sw.zero_state();
        let (stop, _, _) = sw.iterate(&mut st, &control(1e-15), &Quadrant::ALL).unwrap();
        assert_eq!(stop, StopReason::Converged);
        let mut err: f64 = 0.0;
        for d in 0..quad2.count() {
            let m = m_of(d);
            for j in 0..6 {
                for i in 0..10 {
                    err = err.max((st.field.get(d, i, j, 0) - s1.state.field.avg(m, i)).abs());
                    err = err.max((st.field.get(d, i, j, 1) - s1.state.field.mom(m, i)).abs());
                    err = err.max(st.field.get(d, i, j, 2).abs());
                    err = err.max(st.field.get(d, i, j, 3).abs());
                }
            }
        }
        for c in 0..60 {
            err = err.max((st.phi[0][c] - 2.0 * s1.state.phi[c % 10]).abs());
        }
        assert!(err <= 1e-8, "{err:e}");
    }

    #[test]
    fn ghost_inflow_closure_amplifies_in_2d() {
        let p = catalog(7).unwrap();
        let mesh = p.mesh_2d(10).unwrap();
        let quad = product_quadrature(12).unwrap();
        let ghost = ReconOptions {
            mode: Mode::AlwaysLinear,
            inflow: Some(InflowClosure::Ghost),
            ..ReconOptions::default()
        };
        let sw = Sweeper2D::new(&p, &mesh, &quad, ghost, RelaxationPolicy::default()).unwrap();
        let mut st = sw.zero_state();
        let c = IterationControl {
            max_iter: 80,
            norm: crate::report::DeltaNorm::Absolute,
            ..IterationControl::with_tol(0.0)
        };
        match sw.iterate(&mut st, &c, &Quadrant::ALL) {
            Ok((_, h, _)) => assert!(h[79] > 1e6 * h[20], "{:e} vs {:e}", h[79], h[20]),
            Err(e) => assert!(matches!(e, Error::Divergence { .. })),
        }
    }

    #[test]
    fn too_few_cells_rejected() {
        let p = catalog(7).unwrap();
        let mesh = Mesh2D::uniform(2.0, 2.0, 4, 8).unwrap();
        let quad = product_quadrature(2).unwrap();
        assert!(matches!(
            Sweeper2D::new(&p, &mesh, &quad, ReconOptions::default(), RelaxationPolicy::default()),
            Err(Error::Config(_))
        ));
    }
}
