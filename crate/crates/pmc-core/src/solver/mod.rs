//! Finite-difference Dirichlet solver for the graph equation on geodesic
//! balls of a 2-dimensional model base, plus the exhaustion driver.
//!
//! The equation `div(grad u / W) + <grad log rho, grad u / W> = n H` is
//! discretized in conservation form on the cell-centered polar grid:
//! radial face fluxes `F^r = xi u_r / W`, angular face fluxes
//! `F^theta = u_theta / (xi W)`, differenced as
//! `(1/xi) [d_r F^r + d_theta F^theta]`, with the advective term
//! `(rho'/rho) u_r / W` evaluated at cell centers. The pole needs no
//! boundary condition: the innermost face carries zero measure
//! (`xi(0) = 0`), and radial derivatives at the first ring reach across
//! the pole to the diametrically opposite node.

pub mod banded;

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use libm::{fabs, sqrt};

use crate::geometry::{GeometryError, ModelGeometry, Radial};
use crate::grid::{DiscreteField, PolarGrid};
use banded::BandedMatrix;

#[derive(Debug, Clone)]
pub enum SolverError {
    NonConvergence { iters: usize, residual: f64 },
    SingularLinearSystem { node: usize },
    NumericalError { node: usize },
    InvalidInput(String),
    Geometry(GeometryError),
}

impl From<GeometryError> for SolverError {
    fn from(e: GeometryError) -> Self {
        Self::Geometry(e)
    }
}

impl core::fmt::Display for SolverError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Self::NonConvergence { iters, residual } => {
                write!(f, "Newton failed to converge after {iters} iterations (residual {residual:e})")
            }
            Self::SingularLinearSystem { node } => {
                write!(f, "singular linear system at node {node}")
            }
            Self::NumericalError { node } => {
                write!(f, "non-finite intermediate at node {node}")
            }
            Self::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Self::Geometry(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for SolverError {}

/// Newton/continuation parameters. Defaults: residual tolerance `1e-10`
/// in the max norm, at most 50 Newton steps per continuation stage,
/// backtracking halving with Armijo constant `1e-4`, and 4 continuation
/// stages ramping the mean-curvature data linearly from zero.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub newton_tol: f64,
    pub max_newton_iters: usize,
    pub armijo: f64,
    pub backtrack: f64,
    pub continuation_steps: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            newton_tol: 1e-10,
            max_newton_iters: 50,
            armijo: 1e-4,
            backtrack: 0.5,
            continuation_steps: 4,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<(), SolverError> {
        if !(self.newton_tol > 0.0)
            || self.max_newton_iters == 0
            || !(self.armijo > 0.0)
            || !(self.backtrack > 0.0 && self.backtrack < 1.0)
            || self.continuation_steps == 0
        {
            return Err(SolverError::InvalidInput(
                "solver tolerances must be positive".to_string(),
            ));
        }
        Ok(())
    }
}

/// Geometry samples cached on the grid: node and face values of `xi`,
/// `rho`, and the advective coefficient.
struct GridGeom {
    inv_xi_n: Vec<f64>,
    inv_xi2_n: Vec<f64>,
    inv_rho2_n: Vec<f64>,
    adv_n: Vec<f64>,
    xi_n: Vec<f64>,
    rho_n: Vec<f64>,
    xi_f: Vec<f64>,
    inv_xi2_f: Vec<f64>,
    inv_rho2_f: Vec<f64>,
    rho_f: Vec<f64>,
}

impl GridGeom {
    fn new(geom: &ModelGeometry, grid: &PolarGrid) -> Self {
        let nr = grid.nr();
        let mut g = Self {
            inv_xi_n: Vec::with_capacity(nr),
            inv_xi2_n: Vec::with_capacity(nr),
            inv_rho2_n: Vec::with_capacity(nr),
            adv_n: Vec::with_capacity(nr),
            xi_n: Vec::with_capacity(nr),
            rho_n: Vec::with_capacity(nr),
            xi_f: Vec::with_capacity(nr + 1),
            inv_xi2_f: Vec::with_capacity(nr + 1),
            inv_rho2_f: Vec::with_capacity(nr + 1),
            rho_f: Vec::with_capacity(nr + 1),
        };
        for i in 0..nr {
            let r = grid.node_r(i);
            let xi = geom.xi().value(r);
            let rho = geom.rho().value(r);
            g.inv_xi_n.push(1.0 / xi);
            g.inv_xi2_n.push(1.0 / (xi * xi));
            g.inv_rho2_n.push(1.0 / (rho * rho));
            g.adv_n.push(geom.rho().d1(r) / rho);
            g.xi_n.push(xi);
            g.rho_n.push(rho);
        }
        for i in 0..=nr {
            let r = grid.face_r(i);
            let xi = geom.xi().value(r);
            let rho = geom.rho().value(r);
            g.xi_f.push(xi);
            g.inv_xi2_f.push(if i == 0 { 0.0 } else { 1.0 / (xi * xi) });
            g.inv_rho2_f.push(1.0 / (rho * rho));
            g.rho_f.push(rho);
        }
        g
    }
}

/// Dirichlet problem on a geodesic ball of a 2-dimensional base.
///
/// Mean-curvature data is sampled per node at construction; the local
/// solvability margin (cylinder bound) is recorded as a warning signal,
/// not a rejection.
pub struct DirichletProblem {
    geom: ModelGeometry,
    grid: PolarGrid,
    h_nodes: Vec<f64>,
    phi: Vec<f64>,
    gg: GridGeom,
    admissibility_margin: f64,
}

impl DirichletProblem {
    pub fn new(
        geom: ModelGeometry,
        grid: PolarGrid,
        h: impl Fn(f64, f64) -> f64,
        phi: Vec<f64>,
    ) -> Result<Self, SolverError> {
        if geom.n() != 2 {
            return Err(SolverError::InvalidInput(
                "the grid solver works on a 2-dimensional base".to_string(),
            ));
        }
        if phi.len() != grid.ntheta() {
            return Err(SolverError::InvalidInput(
                "boundary data must provide one sample per angular node".to_string(),
            ));
        }
        if phi.iter().any(|v| !v.is_finite()) {
            return Err(SolverError::InvalidInput("boundary data must be finite".to_string()));
        }
        let mut h_nodes = Vec::with_capacity(grid.len());
        for i in 0..grid.nr() {
            let r = grid.node_r(i);
            for j in 0..grid.ntheta() {
                let v = h(r, grid.theta(j));
                if !v.is_finite() {
                    return Err(SolverError::NumericalError { node: grid.idx(i, j) });
                }
                h_nodes.push(v);
            }
        }
        let gg = GridGeom::new(&geom, &grid);
        let mut margin = f64::INFINITY;
        for i in 0..grid.nr() {
            let r = grid.node_r(i);
            let rhs = geom.xi().d1(r) / geom.xi().value(r)
                + geom.rho_plus().d1(r) / geom.rho_plus().value(r);
            for j in 0..grid.ntheta() {
                margin = margin.min(rhs - 2.0 * fabs(h_nodes[grid.idx(i, j)]));
            }
        }
        Ok(Self { geom, grid, h_nodes, phi, gg, admissibility_margin: margin })
    }

    pub fn with_radial_h(
        geom: ModelGeometry,
        grid: PolarGrid,
        h: &dyn Radial,
        phi: Vec<f64>,
    ) -> Result<Self, SolverError> {
        Self::new(geom, grid, |r, _| h.value(r), phi)
    }

    /// Takes mean-curvature data verbatim from a discrete field on the
    /// same grid.
    pub fn with_field_h(
        geom: ModelGeometry,
        grid: PolarGrid,
        h: &DiscreteField,
        phi: Vec<f64>,
    ) -> Result<Self, SolverError> {
        if h.grid != grid {
            return Err(SolverError::InvalidInput(
                "mean-curvature field must live on the problem grid".to_string(),
            ));
        }
        let values = h.values.clone();
        Self::new(geom, grid, |r, t| {
            let i = libm::round((r / grid.dr()) - 0.5) as usize;
            let j = libm::round(t / grid.dtheta()) as usize % grid.ntheta();
            values[grid.idx(i.min(grid.nr() - 1), j)]
        }, phi)
    }

    pub fn grid(&self) -> &PolarGrid {
        &self.grid
    }

    pub fn geom(&self) -> &ModelGeometry {
        &self.geom
    }

    pub fn boundary(&self) -> &[f64] {
        &self.phi
    }

    pub fn h_nodes(&self) -> &[f64] {
        &self.h_nodes
    }

    /// Minimum over nodes of the local cylinder bound margin
    /// `(n-1) xi'/xi + rho_plus'/rho_plus - n|H|`; non-positive values
    /// mean the sufficient condition fails somewhere (solves proceed).
    pub fn admissibility_margin(&self) -> f64 {
        self.admissibility_margin
    }
}

#[derive(Clone, Copy)]
enum Term {
    Col(usize),
    Val(f64),
}

/// Weighted sum of differences of unknowns (or Dirichlet constants). Face
/// derivatives are built from differences so a constant field evaluates to
/// exactly zero, keeping trivial residuals exact.
#[derive(Clone, Copy)]
struct Lin {
    diffs: [(f64, Term, Term); 4],
    len: usize,
}

impl Lin {
    fn new() -> Self {
        Self { diffs: [(0.0, Term::Val(0.0), Term::Val(0.0)); 4], len: 0 }
    }

    #[inline]
    fn push(&mut self, w: f64, plus: Term, minus: Term) {
        self.diffs[self.len] = (w, plus, minus);
        self.len += 1;
    }

    #[inline]
    fn eval(&self, u: &[f64]) -> f64 {
        let mut s = 0.0;
        for k in 0..self.len {
            let (w, p, m) = self.diffs[k];
            let pv = match p {
                Term::Col(c) => u[c],
                Term::Val(v) => v,
            };
            let mv = match m {
                Term::Col(c) => u[c],
                Term::Val(v) => v,
            };
            s += w * (pv - mv);
        }
        s
    }

    /// Adds `scale * d(self)/du` to the Jacobian row.
    #[inline]
    fn add_jacobian(&self, jac: &mut BandedMatrix, row: usize, scale: f64) {
        for k in 0..self.len {
            let (w, p, m) = self.diffs[k];
            if let Term::Col(c) = p {
                jac.add(row, c, scale * w);
            }
            if let Term::Col(c) = m {
                jac.add(row, c, -scale * w);
            }
        }
    }
}

/// Everything the residual and Jacobian need about one flux face.
struct Face {
    /// d(face radial derivative)/d(unknowns)
    ur: Lin,
    /// d(face tangential derivative)/d(unknowns)
    ut: Lin,
    /// flux value
    flux: f64,
    /// partial of the flux in `ur`
    d_ur: f64,
    /// partial of the flux in `ut`
    d_ut: f64,
}

struct Assembler<'p> {
    p: &'p DirichletProblem,
    dr: f64,
    dtheta: f64,
    nr: usize,
    nt: usize,
}

impl<'p> Assembler<'p> {
    fn new(p: &'p DirichletProblem) -> Self {
        Self {
            p,
            dr: p.grid.dr(),
            dtheta: p.grid.dtheta(),
            nr: p.grid.nr(),
            nt: p.grid.ntheta(),
        }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.nt + j
    }

    /// Radial derivative at node center: centered inside, across the pole
    /// on the first ring, one-sided quadratic against the Dirichlet ring on
    /// the last.
    fn node_ur(&self, i: usize, j: usize) -> Lin {
        let mut l = Lin::new();
        if i == 0 {
            l.push(
                0.5 / self.dr,
                Term::Col(self.idx(1, j)),
                Term::Col(self.idx(0, self.p.grid.opposite(j))),
            );
        } else if i == self.nr - 1 {
            let me = self.idx(i, j);
            l.push(4.0 / (3.0 * self.dr), Term::Val(self.p.phi[j]), Term::Col(me));
            l.push(1.0 / (3.0 * self.dr), Term::Col(me), Term::Col(self.idx(i - 1, j)));
        } else {
            l.push(0.5 / self.dr, Term::Col(self.idx(i + 1, j)), Term::Col(self.idx(i - 1, j)));
        }
        l
    }

    fn node_ut(&self, i: usize, j: usize) -> Lin {
        let mut l = Lin::new();
        l.push(
            0.5 / self.dtheta,
            Term::Col(self.idx(i, self.p.grid.jp(j))),
            Term::Col(self.idx(i, self.p.grid.jm(j))),
        );
        l
    }

    /// Outer radial face of cell `i` (face radius `(i+1) dr`).
    fn radial_face(&self, i: usize, j: usize, u: &[f64]) -> Face {
        let f = i + 1;
        let mut ur = Lin::new();
        let mut ut = Lin::new();
        if f == self.nr {
            // Dirichlet face: one-sided quadratic derivative through the
            // boundary value, tangential derivative from the ring itself
            let me = self.idx(i, j);
            ur.push(8.0 / (3.0 * self.dr), Term::Val(self.p.phi[j]), Term::Col(me));
            ur.push(1.0 / (3.0 * self.dr), Term::Col(self.idx(i - 1, j)), Term::Col(me));
            ut.push(
                0.5 / self.dtheta,
                Term::Val(self.p.phi[self.p.grid.jp(j)]),
                Term::Val(self.p.phi[self.p.grid.jm(j)]),
            );
        } else {
            ur.push(1.0 / self.dr, Term::Col(self.idx(i + 1, j)), Term::Col(self.idx(i, j)));
            let (jp, jm) = (self.p.grid.jp(j), self.p.grid.jm(j));
            let w = 0.25 / self.dtheta;
            ut.push(w, Term::Col(self.idx(i, jp)), Term::Col(self.idx(i, jm)));
            ut.push(w, Term::Col(self.idx(i + 1, jp)), Term::Col(self.idx(i + 1, jm)));
        }
        let urv = ur.eval(u);
        let utv = ut.eval(u);
        let gg = &self.p.gg;
        let c = gg.inv_rho2_f[f] + utv * utv * gg.inv_xi2_f[f];
        let w2 = c + urv * urv;
        let w = sqrt(w2);
        let xi = gg.xi_f[f];
        Face {
            ur,
            ut,
            flux: xi * urv / w,
            d_ur: xi * c / (w2 * w),
            d_ut: -xi * urv * utv * gg.inv_xi2_f[f] / (w2 * w),
        }
    }

    /// Angular face between `j` and `j+1` of cell `i`.
    fn angular_face(&self, i: usize, j: usize, u: &[f64]) -> Face {
        let jp = self.p.grid.jp(j);
        let mut ut = Lin::new();
        ut.push(1.0 / self.dtheta, Term::Col(self.idx(i, jp)), Term::Col(self.idx(i, j)));

        let mut ur = Lin::new();
        if i == 0 {
            let w = 0.25 / self.dr;
            ur.push(w, Term::Col(self.idx(1, j)), Term::Col(self.idx(0, self.p.grid.opposite(j))));
            ur.push(
                w,
                Term::Col(self.idx(1, jp)),
                Term::Col(self.idx(0, self.p.grid.opposite(jp))),
            );
        } else if i == self.nr - 1 {
            let (me, nb) = (self.idx(i, j), self.idx(i, jp));
            ur.push(2.0 / (3.0 * self.dr), Term::Val(self.p.phi[j]), Term::Col(me));
            ur.push(1.0 / (6.0 * self.dr), Term::Col(me), Term::Col(self.idx(i - 1, j)));
            ur.push(2.0 / (3.0 * self.dr), Term::Val(self.p.phi[jp]), Term::Col(nb));
            ur.push(1.0 / (6.0 * self.dr), Term::Col(nb), Term::Col(self.idx(i - 1, jp)));
        } else {
            let w = 0.25 / self.dr;
            ur.push(w, Term::Col(self.idx(i + 1, j)), Term::Col(self.idx(i - 1, j)));
            ur.push(w, Term::Col(self.idx(i + 1, jp)), Term::Col(self.idx(i - 1, jp)));
        }
        let urv = ur.eval(u);
        let utv = ut.eval(u);
        let gg = &self.p.gg;
        let inv_xi2 = self.p.gg.inv_xi2_n[i];
        let w2 = gg.inv_rho2_n[i] + urv * urv + utv * utv * inv_xi2;
        let w = sqrt(w2);
        let inv_xi = gg.inv_xi_n[i];
        Face {
            ur,
            ut,
            flux: utv * inv_xi / w,
            d_ur: -utv * urv * inv_xi / (w2 * w),
            d_ut: inv_xi * (gg.inv_rho2_n[i] + urv * urv) / (w2 * w),
        }
    }

    /// Adds `scale * (d_ur * ur + d_ut * ut)` to the Jacobian row.
    fn accumulate(jac: &mut BandedMatrix, row: usize, face: &Face, scale: f64) {
        face.ur.add_jacobian(jac, row, scale * face.d_ur);
        face.ut.add_jacobian(jac, row, scale * face.d_ut);
    }

    /// Residual of the discrete operator minus `n * scale_h * H`; fills the
    /// Jacobian alongside when requested.
    fn assemble(
        &self,
        u: &[f64],
        scale_h: f64,
        mut jac: Option<&mut BandedMatrix>,
    ) -> Result<Vec<f64>, SolverError> {
        let mut res = vec![0.0; self.nr * self.nt];
        let gg = &self.p.gg;
        for i in 0..self.nr {
            let inv_xi = gg.inv_xi_n[i];
            for j in 0..self.nt {
                let row = self.idx(i, j);

                let outer = self.radial_face(i, j, u);
                let inner = (i > 0).then(|| self.radial_face(i - 1, j, u));
                let a_plus = self.angular_face(i, j, u);
                let a_minus = self.angular_face(i, self.p.grid.jm(j), u);

                let inner_flux = inner.as_ref().map_or(0.0, |f| f.flux);
                let div = inv_xi
                    * ((outer.flux - inner_flux) / self.dr
                        + (a_plus.flux - a_minus.flux) / self.dtheta);

                let nur = self.node_ur(i, j);
                let nut = self.node_ut(i, j);
                let urv = nur.eval(u);
                let utv = nut.eval(u);
                let c = gg.inv_rho2_n[i] + utv * utv * gg.inv_xi2_n[i];
                let w2 = c + urv * urv;
                let w = sqrt(w2);
                let adv = gg.adv_n[i] * urv / w;

                let val = div + adv - 2.0 * scale_h * self.p.h_nodes[row];
                if !val.is_finite() {
                    return Err(SolverError::NumericalError { node: row });
                }
                res[row] = val;

                if let Some(jac) = jac.as_deref_mut() {
                    Self::accumulate(jac, row, &outer, inv_xi / self.dr);
                    if let Some(inner) = &inner {
                        Self::accumulate(jac, row, inner, -inv_xi / self.dr);
                    }
                    Self::accumulate(jac, row, &a_plus, inv_xi / self.dtheta);
                    Self::accumulate(jac, row, &a_minus, -inv_xi / self.dtheta);
                    let d_ur = gg.adv_n[i] * c / (w2 * w);
                    let d_ut = -gg.adv_n[i] * urv * utv * gg.inv_xi2_n[i] / (w2 * w);
                    nur.add_jacobian(jac, row, d_ur);
                    nut.add_jacobian(jac, row, d_ut);
                }
            }
        }
        Ok(res)
    }
}

/// Discrete `Q[u] - nH` per node. The field must carry its Dirichlet ring.
pub fn assemble_residual(
    problem: &DirichletProblem,
    u: &DiscreteField,
) -> Result<DiscreteField, SolverError> {
    let asm = Assembler::new(problem);
    let vals = asm.assemble(&u.values, 1.0, None)?;
    Ok(DiscreteField { grid: problem.grid, values: vals, boundary: Some(problem.phi.clone()) })
}

/// Analytic linearization of the discrete operator at `u`.
pub fn assemble_jacobian(
    problem: &DirichletProblem,
    u: &DiscreteField,
) -> Result<BandedMatrix, SolverError> {
    let asm = Assembler::new(problem);
    let band = 2 * problem.grid.ntheta() - 1;
    let mut jac = BandedMatrix::zeros(problem.grid.len(), band, band);
    asm.assemble(&u.values, 1.0, Some(&mut jac))?;
    Ok(jac)
}

/// Spread of the continuous operator eigenvalues `[1/(rho^2 W^3), 1/W]`
/// sampled over nodes, a conditioning diagnostic for the linearization.
pub fn eigenvalue_spread(problem: &DirichletProblem, u: &DiscreteField) -> (f64, f64) {
    let asm = Assembler::new(problem);
    let gg = &problem.gg;
    let mut lo = f64::INFINITY;
    let mut hi = 0.0_f64;
    for i in 0..problem.grid.nr() {
        for j in 0..problem.grid.ntheta() {
            let urv = asm.node_ur(i, j).eval(&u.values);
            let utv = asm.node_ut(i, j).eval(&u.values);
            let w2 = gg.inv_rho2_n[i] + urv * urv + utv * utv * gg.inv_xi2_n[i];
            let w = sqrt(w2);
            let rho2 = 1.0 / gg.inv_rho2_n[i];
            lo = lo.min(1.0 / (rho2 * w2 * w));
            hi = hi.max(1.0 / w);
        }
    }
    (lo, hi)
}

#[derive(Debug, Clone)]
pub struct ContinuationRecord {
    pub lambda: f64,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub u: DiscreteField,
    pub residual_history: Vec<f64>,
    pub continuation: Vec<ContinuationRecord>,
    /// Cylinder-bound margin recorded before the solve; non-positive means
    /// the sufficient local condition failed somewhere.
    pub admissibility_margin: f64,
}

impl SolveResult {
    pub fn admissibility_warning(&self) -> bool {
        self.admissibility_margin <= 0.0
    }
}

/// Damped Newton with linear continuation in the mean-curvature data.
pub fn solve_dirichlet(
    problem: &DirichletProblem,
    config: &SolverConfig,
) -> Result<SolveResult, SolverError> {
    config.validate()?;
    let grid = problem.grid;
    let mean_phi = problem.phi.iter().sum::<f64>() / problem.phi.len() as f64;
    let mut u = vec![mean_phi; grid.len()];
    let mut history = Vec::new();
    let mut continuation = Vec::new();
    let asm = Assembler::new(problem);
    let band = 2 * grid.ntheta() - 1;

    for step in 1..=config.continuation_steps {
        let lambda = step as f64 / config.continuation_steps as f64;
        let mut res = asm.assemble(&u, lambda, None)?;
        let mut norm = max_abs(&res);
        history.push(norm);
        let mut iters = 0;
        while norm > config.newton_tol {
            if iters >= config.max_newton_iters {
                return Err(SolverError::NonConvergence { iters, residual: norm });
            }
            let mut jac = BandedMatrix::zeros(grid.len(), band, band);
            asm.assemble(&u, lambda, Some(&mut jac))?;
            let lu = jac
                .lu_factor()
                .map_err(|node| SolverError::SingularLinearSystem { node })?;
            let neg = res.iter().map(|v| -v).collect::<Vec<_>>();
            let delta = lu.solve(&neg);

            // backtracking with the Armijo residual decrease test
            let mut t = 1.0;
            loop {
                let trial: Vec<f64> =
                    u.iter().zip(&delta).map(|(a, d)| a + t * d).collect();
                match asm.assemble(&trial, lambda, None) {
                    Ok(r_trial) => {
                        let n_trial = max_abs(&r_trial);
                        if n_trial <= (1.0 - config.armijo * t) * norm {
                            u = trial;
                            res = r_trial;
                            norm = n_trial;
                            break;
                        }
                    }
                    Err(_) if t > 1e-12 => {}
                    Err(e) => return Err(e),
                }
                t *= config.backtrack;
                if t < 1e-12 {
                    return Err(SolverError::NonConvergence { iters, residual: norm });
                }
            }
            iters += 1;
            history.push(norm);
        }
        continuation.push(ContinuationRecord { lambda, iterations: iters, residual: norm });
    }

    Ok(SolveResult {
        u: DiscreteField { grid, values: u, boundary: Some(problem.phi.clone()) },
        residual_history: history,
        continuation,
        admissibility_margin: problem.admissibility_margin,
    })
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(fabs(*x)))
}

/// Increasing-ball sweep: solves the same boundary data `phi(theta)` on
/// each radius, keeping the radial spacing fixed so core nodes coincide,
/// and reports sup-differences of consecutive solutions on the core ball.
pub struct ExhaustionReport {
    pub radii: Vec<f64>,
    pub sup_diffs: Vec<f64>,
    pub core_radius: f64,
    pub core_nodes: usize,
    pub solutions: Vec<SolveResult>,
}

pub fn solve_exhaustion(
    geom: &ModelGeometry,
    h: impl Fn(f64, f64) -> f64 + Copy,
    phi_inf: &[f64],
    radii: &[f64],
    nr_first: usize,
    core_radius: f64,
    config: &SolverConfig,
) -> Result<ExhaustionReport, SolverError> {
    if radii.len() < 2 || !radii.windows(2).all(|w| w[1] > w[0]) {
        return Err(SolverError::InvalidInput(
            "need at least two strictly increasing radii".to_string(),
        ));
    }
    if !(core_radius < radii[0]) {
        return Err(SolverError::InvalidInput(
            "core radius must sit inside the smallest ball".to_string(),
        ));
    }
    let ntheta = phi_inf.len();
    let dr = radii[0] / nr_first as f64;
    let mut solutions = Vec::new();
    let mut cores: Vec<Vec<f64>> = Vec::new();
    let mut core_nodes = 0;
    for &rad in radii {
        let nr = libm::round(rad / dr) as usize;
        let grid = PolarGrid::new(nr as f64 * dr, nr, ntheta)?;
        let problem = DirichletProblem::new(geom.clone(), grid, h, phi_inf.to_vec())?;
        let sol = solve_dirichlet(&problem, config)?;
        let rings = (0..nr).take_while(|&i| grid.node_r(i) <= core_radius).count();
        core_nodes = rings * ntheta;
        cores.push(sol.u.values[..core_nodes].to_vec());
        solutions.push(sol);
    }
    let sup_diffs = cores
        .windows(2)
        .map(|w| {
            w[0].iter()
                .zip(&w[1])
                .fold(0.0_f64, |m, (a, b)| m.max(fabs(a - b)))
        })
        .collect();
    Ok(ExhaustionReport {
        radii: radii.to_vec(),
        sup_diffs,
        core_radius,
        core_nodes,
        solutions,
    })
}

/// Discrete flux balance across the face ring nearest `r0`:
/// boundary term `∮ <grad u / W, nu> rho dGamma` against the bulk term
/// `∫ n H rho dM` over the enclosed ball.
#[derive(Debug, Clone)]
pub struct FluxCheck {
    pub ring_radius: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub relative_gap: f64,
    pub snapped: bool,
}

pub fn flux_check(
    problem: &DirichletProblem,
    u: &DiscreteField,
    r0: f64,
) -> Result<FluxCheck, SolverError> {
    let grid = problem.grid;
    if !(r0 > 0.0 && r0 < grid.r_ball()) {
        return Err(SolverError::InvalidInput(
            "flux ring must lie strictly inside the ball".to_string(),
        ));
    }
    let asm = Assembler::new(problem);
    let ring = (libm::round(r0 / grid.dr()) as usize).clamp(1, grid.nr() - 1);
    let snapped = fabs(grid.face_r(ring) - r0) > 1e-12 * grid.r_ball();

    let mut lhs = 0.0;
    for j in 0..grid.ntheta() {
        let face = asm.radial_face(ring - 1, j, &u.values);
        lhs += face.flux * problem.gg.rho_f[ring] * grid.dtheta();
    }
    let mut rhs = 0.0;
    for i in 0..ring {
        let w = problem.gg.rho_n[i] * problem.gg.xi_n[i] * grid.dr() * grid.dtheta();
        for j in 0..grid.ntheta() {
            rhs += 2.0 * problem.h_nodes[grid.idx(i, j)] * w;
        }
    }
    let scale = fabs(lhs).max(fabs(rhs)).max(1e-300);
    Ok(FluxCheck {
        ring_radius: grid.face_r(ring),
        lhs,
        rhs,
        relative_gap: fabs(lhs - rhs) / scale,
        snapped,
    })
}

/// Non-divergence form of the operator:
/// `sigma^{ij} u_{i;j} + (log rho)' u_r (1 + 1/(rho^2 W^2)) - n H W`
/// with the covariant Hessian of the model metric. Serves as an
/// independent cross-check: it equals `W` times the divergence-form
/// residual up to discretization order on smooth fields.
pub fn nondiv_residual(
    problem: &DirichletProblem,
    u: &DiscreteField,
) -> Result<DiscreteField, SolverError> {
    let grid = problem.grid;
    let gg = &problem.gg;
    let (dr, dt) = (grid.dr(), grid.dtheta());
    let asm = Assembler::new(problem);
    let mut out = DiscreteField::zeros(grid);

    let uv = &u.values;
    let val = |i: isize, j: usize| -> f64 {
        // ghost ring beyond the boundary: quadratic extrapolation through
        // the Dirichlet value; across the pole: opposite ray
        if i < 0 {
            uv[grid.idx(0, grid.opposite(j))]
        } else if i as usize == grid.nr() {
            (8.0 * problem.phi[j] - 6.0 * uv[grid.idx(grid.nr() - 1, j)]
                + uv[grid.idx(grid.nr() - 2, j)])
                / 3.0
        } else {
            uv[grid.idx(i as usize, j)]
        }
    };

    for i in 0..grid.nr() {
        let ii = i as isize;
        let r = grid.node_r(i);
        let xi = gg.xi_n[i];
        let dxi = problem.geom.xi().d1(r);
        for j in 0..grid.ntheta() {
            let (jp, jm) = (grid.jp(j), grid.jm(j));
            let ur = (val(ii + 1, j) - val(ii - 1, j)) / (2.0 * dr);
            let ut = (val(ii, jp) - val(ii, jm)) / (2.0 * dt);
            let urr = (val(ii + 1, j) - 2.0 * val(ii, j) + val(ii - 1, j)) / (dr * dr);
            let utt = (val(ii, jp) - 2.0 * val(ii, j) + val(ii, jm)) / (dt * dt);
            let urt = (val(ii + 1, jp) - val(ii + 1, jm) - val(ii - 1, jp) + val(ii - 1, jm))
                / (4.0 * dr * dt);

            // covariant Hessian components in the polar metric
            let h_rr = urr;
            let h_rt = urt - dxi / xi * ut;
            let h_tt = utt + xi * dxi * ur;

            let inv_xi2 = gg.inv_xi2_n[i];
            let grad2 = ur * ur + ut * ut * inv_xi2;
            let w2 = gg.inv_rho2_n[i] + grad2;
            let w = sqrt(w2);

            let s_rr = 1.0 - ur * ur / w2;
            let s_rt = -ur * (ut * inv_xi2) / w2;
            let s_tt = inv_xi2 - (ut * inv_xi2) * (ut * inv_xi2) / w2;

            let rho2 = 1.0 / gg.inv_rho2_n[i];
            let v = s_rr * h_rr + 2.0 * s_rt * h_rt + s_tt * h_tt
                + gg.adv_n[i] * ur * (1.0 + 1.0 / (rho2 * w2))
                - 2.0 * problem.h_nodes[grid.idx(i, j)] * w;
            if !v.is_finite() {
                return Err(SolverError::NumericalError { node: grid.idx(i, j) });
            }
            out.values[grid.idx(i, j)] = v;
        }
    }
    let _ = asm;
    Ok(out)
}

/// Max-norm of the discrete gradient over interior nodes, plus the argmax.
pub fn max_gradient(problem: &DirichletProblem, u: &DiscreteField) -> (f64, usize) {
    let asm = Assembler::new(problem);
    let gg = &problem.gg;
    let mut best = 0.0;
    let mut arg = 0;
    for i in 0..problem.grid.nr() {
        for j in 0..problem.grid.ntheta() {
            let ur = asm.node_ur(i, j).eval(&u.values);
            let ut = asm.node_ut(i, j).eval(&u.values);
            let g = sqrt(ur * ur + ut * ut * gg.inv_xi2_n[i]);
            if g > best {
                best = g;
                arg = problem.grid.idx(i, j);
            }
        }
    }
    (best, arg)
}
