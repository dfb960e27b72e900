//! Global and boundary barriers: the `V` barrier driven by a weight `a0`,
//! the boundary-point barrier `psi` with its smoothed direction field, and
//! the finite-ball height barrier.
//!
//! All three are supersolutions of the graph operator under the matching
//! mean-curvature bounds; `verify_q_negative` checks that property
//! discretely, node by node.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use libm::{fabs, pow, sqrt};

use crate::geometry::{GeometryError, ModelGeometry, Radial};
use crate::grid::{DiscreteField, PolarGrid};
use crate::quad;
use crate::report::{BoundReport, VerificationReport};
use crate::solver::{assemble_residual, DirichletProblem, SolverError};

#[derive(Debug, Clone)]
pub enum BarrierError {
    /// Tail integrals failed to contract before the truncation radius.
    Integrability { partials: Vec<f64> },
    /// The mean curvature reached the cylinder bound.
    Admissibility { witness: f64 },
    InvalidInput(String),
    Geometry(GeometryError),
    Solver(SolverError),
}

impl From<GeometryError> for BarrierError {
    fn from(e: GeometryError) -> Self {
        Self::Geometry(e)
    }
}

impl From<SolverError> for BarrierError {
    fn from(e: SolverError) -> Self {
        Self::Solver(e)
    }
}

impl core::fmt::Display for BarrierError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Self::Integrability { partials } => write!(
                f,
                "tail integral not Cauchy ({} partials, last {:?})",
                partials.len(),
                partials.last()
            ),
            Self::Admissibility { witness } => {
                write!(f, "mean curvature reaches the cylinder bound at r = {witness}")
            }
            Self::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Self::Geometry(e) => write!(f, "{e}"),
            Self::Solver(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for BarrierError {}

const STEP: f64 = 1e-3;

/// Shared tabulation for the `V` barrier machinery on `[0, r_trunc]`:
/// `weight = 1/(rho_plus^2 f_a^(n-1))`, `mass(r) = ∫_0^r a0 f_a^(n-1)`,
/// `outer(r) = ∫_r^inf weight` (tail extrapolated geometrically), and the
/// decreasing bracket whose limit is the barrier constant.
struct VTabulation {
    rs: Vec<f64>,
    outer: Vec<f64>,
    mass: Vec<f64>,
    bracket: Vec<f64>,
}

fn v_tabulation(
    geom: &ModelGeometry,
    a0: &dyn Radial,
    r_trunc: f64,
) -> Result<VTabulation, BarrierError> {
    let m = geom.n() as u32 - 1;
    let weight = |s: f64| {
        let rp = geom.rho_plus().value(s);
        1.0 / (rp * rp * quad::powi(geom.xi().value(s.max(1e-12)), m))
    };
    let a0f = |t: f64| a0.value(t) * quad::powi(geom.xi().value(t), m);

    quad::cauchy_tail_test(&weight, r_trunc / 2.0, r_trunc, 8, STEP, 0.9999)
        .map_err(|partials| BarrierError::Integrability { partials })?;
    let tail = quad::geometric_tail(&weight, r_trunc, (r_trunc / 8.0).max(0.5), STEP, 0.9999)
        .ok_or(BarrierError::Integrability { partials: Vec::new() })?
        .tail;

    let cells = libm::ceil(r_trunc / STEP) as usize;
    let h = r_trunc / cells as f64;
    let rs: Vec<f64> = (0..=cells).map(|k| k as f64 * h).collect();

    let cum_weight = quad::cumulative(&weight, &rs);
    let total = cum_weight[cells] + tail;
    let outer: Vec<f64> = cum_weight.iter().map(|w| total - w).collect();
    let mass = quad::cumulative(&a0f, &rs);

    // ∫_0^r outer(t) a0(t) f_a^(n-1)(t) dt; outer is smooth, interpolate it
    // linearly at cell midpoints
    let mut inner = Vec::with_capacity(cells + 1);
    inner.push(0.0);
    let mut acc = 0.0;
    for k in 0..cells {
        let (a, b) = (rs[k], rs[k + 1]);
        let mid = 0.5 * (a + b);
        let outer_mid = 0.5 * (outer[k] + outer[k + 1]);
        acc += h / 6.0 * (outer[k] * a0f(a) + 4.0 * outer_mid * a0f(mid) + outer[k + 1] * a0f(b));
        inner.push(acc);
    }

    let bracket: Vec<f64> = (0..=cells).map(|k| outer[k] * mass[k] - inner[k]).collect();
    Ok(VTabulation { rs, outer, mass, bracket })
}

/// Limit constant of the `V`-barrier bracket, evaluated at increasing radii
/// until three successive checkpoints agree to `tol`. The bracket decreases
/// in `r`, so failure to settle before `r_trunc` means the defining
/// integral condition fails at this truncation. The limit is asserted
/// non-positive up to `tol`.
pub fn compute_d(
    geom: &ModelGeometry,
    a0: &dyn Radial,
    tol: f64,
    r_trunc: f64,
) -> Result<f64, BarrierError> {
    if !(tol > 0.0 && r_trunc > 0.0) {
        return Err(BarrierError::InvalidInput("need tol > 0 and r_trunc > 0".to_string()));
    }
    let tab = v_tabulation(geom, a0, r_trunc)?;
    let checkpoints = 64;
    let stride = (tab.rs.len() - 1) / checkpoints;
    let mut vals = Vec::with_capacity(checkpoints);
    for c in 1..=checkpoints {
        vals.push(tab.bracket[c * stride]);
        if vals.len() >= 3 {
            let k = vals.len();
            if fabs(vals[k - 1] - vals[k - 2]) < tol && fabs(vals[k - 2] - vals[k - 3]) < tol {
                let d = vals[k - 1];
                if d > tol {
                    return Err(BarrierError::InvalidInput(format!(
                        "limit constant came out positive ({d})"
                    )));
                }
                return Ok(d);
            }
        }
    }
    Err(BarrierError::Integrability { partials: vals })
}

/// The `V` barrier: strictly above `phi_sup`, decreasing, meeting
/// `phi_sup` at the truncation radius up to the convergence tolerance.
#[derive(Clone)]
pub struct VBarrier {
    pub d_const: f64,
    pub phi_sup: f64,
    pub r_trunc: f64,
    rs: Vec<f64>,
    values: Vec<f64>,
    slope: Vec<f64>,
    mass: Vec<f64>,
    a0_at: Vec<f64>,
    geom: ModelGeometry,
}

impl VBarrier {
    pub fn min_value(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    fn locate(&self, r: f64) -> usize {
        let h = self.rs[1] - self.rs[0];
        (libm::floor(r / h) as usize).min(self.rs.len() - 2)
    }
}

impl core::fmt::Debug for VBarrier {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("VBarrier")
            .field("d_const", &self.d_const)
            .field("phi_sup", &self.phi_sup)
            .field("r_trunc", &self.r_trunc)
            .field("nodes", &self.rs.len())
            .finish()
    }
}

impl Radial for VBarrier {
    fn value(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return self.values[0];
        }
        if r >= self.r_trunc {
            return self.min_value();
        }
        let i = self.locate(r);
        let (a, b) = (self.rs[i], self.rs[i + 1]);
        let h = b - a;
        let t = (r - a) / h;
        let (t2, t3) = (t * t, t * t * t);
        self.values[i] * (2.0 * t3 - 3.0 * t2 + 1.0)
            + self.slope[i] * h * (t3 - 2.0 * t2 + t)
            + self.values[i + 1] * (-2.0 * t3 + 3.0 * t2)
            + self.slope[i + 1] * h * (t3 - t2)
    }

    /// Closed form `V'(r) = -(rho_plus^2 f_a^(n-1))^{-1} ∫_0^r a0 f_a^(n-1)`.
    fn d1(&self, r: f64) -> f64 {
        let r = r.clamp(self.rs[0], self.r_trunc);
        let i = self.locate(r);
        let t = (r - self.rs[i]) / (self.rs[i + 1] - self.rs[i]);
        let mass = self.mass[i] * (1.0 - t) + self.mass[i + 1] * t;
        let m = self.geom.n() as u32 - 1;
        let rp = self.geom.rho_plus().value(r);
        -mass / (rp * rp * quad::powi(self.geom.xi().value(r.max(1e-12)), m))
    }

    fn d2(&self, r: f64) -> f64 {
        let r = r.clamp(self.rs[0], self.r_trunc);
        let i = self.locate(r);
        let t = (r - self.rs[i]) / (self.rs[i + 1] - self.rs[i]);
        let a0v = self.a0_at[i] * (1.0 - t) + self.a0_at[i + 1] * t;
        let rp = self.geom.rho_plus().value(r);
        let n1 = self.geom.nf() - 1.0;
        let xi = self.geom.xi();
        // V'' = -V' ((n-1) f_a'/f_a + 2 rho_plus'/rho_plus) - a0/rho_plus^2
        -self.d1(r)
            * (n1 * xi.d1(r) / xi.value(r.max(1e-12)) + 2.0 * self.geom.rho_plus().d1(r) / rp)
            - a0v / (rp * rp)
    }
}

pub fn build_v(
    geom: &ModelGeometry,
    a0: &dyn Radial,
    phi_sup: f64,
    r_trunc: f64,
    tol: f64,
) -> Result<VBarrier, BarrierError> {
    let d_const = compute_d(geom, a0, tol, r_trunc)?;
    let tab = v_tabulation(geom, a0, r_trunc)?;
    let m = geom.n() as u32 - 1;
    let values: Vec<f64> = tab.bracket.iter().map(|b| b - d_const + phi_sup).collect();
    let slope: Vec<f64> = tab
        .rs
        .iter()
        .zip(&tab.mass)
        .map(|(&r, &mass)| {
            let rp = geom.rho_plus().value(r);
            -mass / (rp * rp * quad::powi(geom.xi().value(r.max(1e-12)), m))
        })
        .collect();
    let a0_at: Vec<f64> = tab.rs.iter().map(|&r| a0.value(r)).collect();

    for (k, w) in values.windows(2).enumerate() {
        if w[1] > w[0] + 1e-15 {
            return Err(BarrierError::InvalidInput(format!(
                "V failed to be non-increasing at r = {}",
                tab.rs[k + 1]
            )));
        }
    }
    if values.iter().any(|&v| v < phi_sup) {
        return Err(BarrierError::InvalidInput(
            "V dipped below the boundary supremum".to_string(),
        ));
    }
    Ok(VBarrier {
        d_const,
        phi_sup,
        r_trunc,
        rs: tab.rs,
        values,
        slope,
        mass: tab.mass,
        a0_at,
        geom: geom.clone(),
    })
}

/// Right side of the `V`-barrier mean-curvature bound at radius `r`:
///
/// ```text
/// (rho^-2 rho_plus^-2 a0 + (-V')^3 ((n-1) f_a'/f_a + rho_plus'/rho_plus))
///   / (rho^-2 + V'^2)^(3/2)
/// ```
pub fn hv_bound_rhs(geom: &ModelGeometry, v: &VBarrier, a0: &dyn Radial, r: f64) -> f64 {
    let rho = geom.rho().value(r);
    let rp = geom.rho_plus().value(r);
    let vp = v.d1(r);
    let n1 = geom.nf() - 1.0;
    let xi = geom.xi();
    let grad = n1 * xi.d1(r) / xi.value(r.max(1e-12)) + geom.rho_plus().d1(r) / rp;
    let num = a0.value(r) / (rho * rho * rp * rp) + (-vp) * (-vp) * (-vp) * grad;
    let den = pow(1.0 / (rho * rho) + vp * vp, 1.5);
    num / den
}

/// Margin sweep of the `V`-barrier bound `n|H| <= RHS`, with diagnostics
/// over the outer decade: the fraction of the RHS carried by the `a0`
/// term, and the ratio of the RHS to the asymptotic cylinder form.
pub fn check_hv_bound(
    geom: &ModelGeometry,
    v: &VBarrier,
    a0: &dyn Radial,
    h: &dyn Radial,
) -> BoundReport {
    let samples = 1024;
    let r_max = v.r_trunc;
    let mut min_margin = f64::INFINITY;
    let mut witness = 0.0;
    for i in 1..=samples {
        let r = r_max * i as f64 / samples as f64;
        let margin = hv_bound_rhs(geom, v, a0, r) - geom.nf() * fabs(h.value(r));
        if margin < min_margin {
            min_margin = margin;
            witness = r;
        }
    }
    let probe = |r: f64| {
        let rho = geom.rho().value(r);
        let rp = geom.rho_plus().value(r);
        let vp = v.d1(r);
        let grad = (geom.nf() - 1.0) * geom.xi().d1(r) / geom.xi().value(r)
            + geom.rho_plus().d1(r) / rp;
        let first = a0.value(r) / (rho * rho * rp * rp);
        let frac = first / (first + (-vp) * (-vp) * (-vp) * grad);
        (frac, hv_bound_rhs(geom, v, a0, r) / grad, -vp * rho)
    };
    let (f_in, a_in, s_in) = probe(r_max / 10.0);
    let (f_out, a_out, s_out) = probe(r_max);
    let notes = vec![
        format!("a0-term fraction over outer decade: {f_in:.3e} -> {f_out:.3e}"),
        format!("RHS / cylinder form over outer decade: {a_in:.6} -> {a_out:.6}"),
        format!("|V'| rho over outer decade: {s_in:.3e} -> {s_out:.3e}"),
    ];
    BoundReport {
        name: "V-barrier mean-curvature bound".to_string(),
        min_margin,
        witness,
        samples,
        notes,
    }
}

/// Smoothed direction field for the boundary barrier, produced from the
/// crude extension `min(1, max(2 - 2r, L * angle(v0, theta)))` by a
/// normalized local bump average of radius `2/b(r)` per node. Nodes where
/// that radius falls under the radial spacing keep the crude value and are
/// reported as unsmoothed.
pub struct DirectionField {
    /// Smoothed values per node, boundary ring included.
    pub field: DiscreteField,
    pub unsmoothed: Vec<usize>,
    pub v0: f64,
    pub l_const: f64,
}

pub fn angle_dist(a: f64, b: f64) -> f64 {
    let mut d = fabs(a - b) % core::f64::consts::TAU;
    if d > core::f64::consts::PI {
        d = core::f64::consts::TAU - d;
    }
    d
}

fn crude_h(r: f64, theta: f64, v0: f64, l_const: f64) -> f64 {
    (2.0 - 2.0 * r).max(l_const * angle_dist(theta, v0)).min(1.0)
}

/// Plateau bump: 1 on `[0, 1/2]`, smooth descent to 0 at 1.
fn bump(s: f64) -> f64 {
    if s <= 0.5 {
        1.0
    } else if s >= 1.0 {
        0.0
    } else {
        let x = 2.0 * s - 1.0;
        1.0 - x * x * x * (x * (6.0 * x - 15.0) + 10.0)
    }
}

/// Normalized bump average of `source(r, theta)` at the point `(r, theta)`
/// over grid nodes within metric distance `2/b(r)`; `None` when the kernel
/// captures nothing beyond the center.
fn bump_average(
    geom: &ModelGeometry,
    grid: &PolarGrid,
    r: f64,
    theta: f64,
    radius: f64,
    source: impl Fn(f64, f64) -> f64,
) -> Option<f64> {
    let (dr, dt) = (grid.dr(), grid.dtheta());
    let lo = if r - radius <= 0.0 { 0 } else { ((r - radius) / dr) as usize };
    let hi = (((r + radius) / dr) as usize).min(grid.nr() - 1);
    let mut wsum = 0.0;
    let mut hsum = 0.0;
    for ii in lo..=hi {
        let ri = grid.node_r(ii);
        let dr2 = (r - ri) * (r - ri);
        if dr2 > radius * radius {
            continue;
        }
        let xi_mid = geom.xi().value(0.5 * (r + ri)).max(1e-300);
        let reach = sqrt(radius * radius - dr2) / xi_mid;
        let jspan = ((reach / dt) as isize).min(grid.ntheta() as isize / 2);
        let area = geom.xi().value(ri) * dr * dt;
        let j0 = libm::round(theta / dt) as isize;
        for s in -jspan..=jspan {
            let jj = ((j0 + s).rem_euclid(grid.ntheta() as isize)) as usize;
            let ang = angle_dist(grid.theta(jj), theta);
            let d2 = dr2 + xi_mid * xi_mid * ang * ang;
            if d2 >= radius * radius {
                continue;
            }
            let w = bump(sqrt(d2) / radius) * area;
            wsum += w;
            hsum += w * source(ri, grid.theta(jj));
        }
    }
    (wsum > 0.0).then(|| hsum / wsum)
}

pub fn build_h(
    geom: &ModelGeometry,
    grid: PolarGrid,
    v0: f64,
    l_const: f64,
) -> Result<DirectionField, BarrierError> {
    if !(l_const > 8.0 / core::f64::consts::PI) {
        return Err(BarrierError::InvalidInput(
            "cone-aperture constant must exceed 8/pi".to_string(),
        ));
    }
    let b = &geom.profile().b;
    let crude = |r: f64, t: f64| crude_h(r, t, v0, l_const);
    let nr = grid.nr();
    let nt = grid.ntheta();
    let mut values = Vec::with_capacity(nr * nt);
    let mut ring = Vec::with_capacity(nt);
    let mut unsmoothed = Vec::new();

    // rows 0..nr are node rings; one extra pass fills the boundary ring,
    // whose clipped kernel is unbiased because the crude field no longer
    // depends on r out there
    for i in 0..=nr {
        let r = if i < nr { grid.node_r(i) } else { grid.r_ball() };
        let bv = b.value(r);
        if !(bv > 0.0) || !bv.is_finite() {
            return Err(BarrierError::Geometry(GeometryError::ProfileEvaluation { radius: r }));
        }
        let radius = 2.0 / bv;
        for j in 0..nt {
            let theta = grid.theta(j);
            let v = if radius < grid.dr() {
                if i < nr {
                    unsmoothed.push(grid.idx(i, j));
                }
                crude(r, theta)
            } else {
                match bump_average(geom, &grid, r, theta, radius, crude) {
                    Some(avg) => avg.clamp(0.0, 1.0),
                    None => {
                        if i < nr {
                            unsmoothed.push(grid.idx(i, j));
                        }
                        crude(r, theta)
                    }
                }
            };
            if i < nr {
                values.push(v);
            } else {
                ring.push(v);
            }
        }
    }

    let field = DiscreteField { grid, values, boundary: Some(ring) };
    Ok(DirectionField { field, unsmoothed, v0, l_const })
}

/// Applies the normalized bump average to an arbitrary node field; used to
/// validate kernel normalization.
pub fn mollify(geom: &ModelGeometry, field: &DiscreteField) -> Result<DiscreteField, BarrierError> {
    let grid = field.grid;
    let b = &geom.profile().b;
    let mut out = DiscreteField::zeros(grid);
    let lookup = |r: f64, t: f64| {
        let i = (libm::round(r / grid.dr() - 0.5) as usize).min(grid.nr() - 1);
        let j = libm::round(t / grid.dtheta()) as usize % grid.ntheta();
        field.at(i, j)
    };
    for i in 0..grid.nr() {
        let r = grid.node_r(i);
        let radius = 2.0 / b.value(r);
        for j in 0..grid.ntheta() {
            let v = if radius < grid.dr() {
                field.at(i, j)
            } else {
                bump_average(geom, &grid, r, grid.theta(j), radius, lookup)
                    .unwrap_or_else(|| field.at(i, j))
            };
            out.set(i, j, v);
        }
    }
    Ok(out)
}

/// Exponent of the power-law model profile determined by the tail
/// constant: `(1 + sqrt(1 + 4 C1^2)) / 2`.
pub fn phi_exp(c1: f64) -> f64 {
    (1.0 + sqrt(1.0 + 4.0 * c1 * c1)) / 2.0
}

/// Decay-exponent cap for the boundary barrier:
/// `min(C4/2, ((n-1) phi - 1) / ((n-1) phi + 1))`.
pub fn delta1(c4: f64, c1: f64, n: usize) -> f64 {
    let p = phi_exp(c1);
    let nf = n as f64;
    (c4 / 2.0).min((-1.0 + (nf - 1.0) * p) / (1.0 + (nf - 1.0) * p))
}

/// Boundary-point barrier `psi = A (R3^delta r^-delta + h)`.
pub struct PsiBarrier {
    pub amplitude: f64,
    pub r3: f64,
    pub delta: f64,
    pub direction: DirectionField,
    pub field: DiscreteField,
}

pub fn build_psi(
    geom: &ModelGeometry,
    grid: PolarGrid,
    v0: f64,
    l_const: f64,
    amplitude: f64,
    r3: f64,
    delta: f64,
) -> Result<PsiBarrier, BarrierError> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(BarrierError::InvalidInput("delta must lie in (0,1)".to_string()));
    }
    if !(r3 > 0.0 && r3 < grid.r_ball()) {
        return Err(BarrierError::InvalidInput(
            "inner radius must lie inside the grid ball".to_string(),
        ));
    }
    let direction = build_h(geom, grid, v0, l_const)?;
    let radial_part = |r: f64| amplitude * pow(r3, delta) * pow(r, -delta);
    let mut field = DiscreteField::zeros(grid);
    for i in 0..grid.nr() {
        let r = grid.node_r(i);
        for j in 0..grid.ntheta() {
            field.set(i, j, radial_part(r) + amplitude * direction.field.at(i, j));
        }
    }
    let ring = direction
        .field
        .boundary
        .as_ref()
        .expect("direction field carries its ring")
        .iter()
        .map(|hb| radial_part(grid.r_ball()) + amplitude * hb)
        .collect();
    field.boundary = Some(ring);
    Ok(PsiBarrier { amplitude, r3, delta, direction, field })
}

/// Discrete supersolution sweep: evaluates `Q[w] - nH` at every region
/// node; passes only if the maximum is strictly negative.
pub fn verify_q_negative(
    geom: &ModelGeometry,
    h: impl Fn(f64, f64) -> f64,
    w: &DiscreteField,
    region: impl Fn(f64, f64) -> bool,
    name: &str,
) -> Result<VerificationReport, BarrierError> {
    let grid = w.grid;
    let ring = w
        .boundary
        .clone()
        .ok_or_else(|| BarrierError::InvalidInput("field needs its boundary ring".to_string()))?;
    let problem = DirichletProblem::new(geom.clone(), grid, h, ring)?;
    let res = assemble_residual(&problem, w)?;
    let mut max_value = f64::NEG_INFINITY;
    let mut argmax = 0;
    let mut violations = Vec::new();
    let mut region_size = 0;
    for i in 0..grid.nr() {
        let r = grid.node_r(i);
        for j in 0..grid.ntheta() {
            if !region(r, grid.theta(j)) {
                continue;
            }
            region_size += 1;
            let v = res.at(i, j);
            if v > max_value {
                max_value = v;
                argmax = grid.idx(i, j);
            }
            if v >= 0.0 {
                violations.push(grid.idx(i, j));
            }
        }
    }
    if region_size == 0 {
        return Err(BarrierError::InvalidInput("empty verification region".to_string()));
    }
    Ok(VerificationReport { name: name.to_string(), max_value, argmax, violations, region_size })
}

/// Margin sweep of the boundary-barrier mean-curvature hypothesis
///
/// ```text
/// sup_{r=t} n|H| < C0 t^(-delta_cap-1) / sqrt(rho^-2 + (C0 t^(-delta-1))^2)
///                  * ((n-1) f_a'/f_a + rho'/rho - 1/t)
/// ```
///
/// plus decay diagnostics for the two little-o warping conditions over the
/// outer decade of `[r_lo, r_hi]`.
pub fn check_psi_hypotheses(
    geom: &ModelGeometry,
    h: &dyn Radial,
    delta: f64,
    delta_cap: f64,
    c0: f64,
    r_lo: f64,
    r_hi: f64,
) -> Result<BoundReport, BarrierError> {
    if !(c0 > 1.0) {
        return Err(BarrierError::InvalidInput("C0 must exceed 1".to_string()));
    }
    if !(delta > 0.0 && delta < delta_cap) {
        return Err(BarrierError::InvalidInput(format!("delta must lie in (0, {delta_cap})")));
    }
    let rhs = |t: f64| {
        let rho = geom.rho().value(t);
        let xi = geom.xi();
        let grad = (geom.nf() - 1.0) * xi.d1(t) / xi.value(t) + geom.rho().d1(t) / rho - 1.0 / t;
        let slope = c0 * pow(t, -delta - 1.0);
        c0 * pow(t, -delta_cap - 1.0) / sqrt(1.0 / (rho * rho) + slope * slope) * grad
    };
    let samples = 1024;
    let mut min_margin = f64::INFINITY;
    let mut witness = 0.0;
    for i in 0..=samples {
        let t = r_lo + (r_hi - r_lo) * i as f64 / samples as f64;
        let margin = rhs(t) - geom.nf() * fabs(h.value(t));
        if margin < min_margin {
            min_margin = margin;
            witness = t;
        }
    }
    let sign_ratio = |t: f64| {
        let num = (-t * geom.rho().d1(t) / geom.rho().value(t)).max(0.0);
        num / (t * geom.xi().d1(t) / geom.xi().value(t))
    };
    // radial warping: |grad rho| = |d_r rho|, so the second condition
    // reduces to t^(delta+1)/f_a -> 0
    let rad_ratio = |t: f64| pow(t, delta + 1.0) / geom.xi().value(t);
    let notes = vec![
        format!(
            "sign condition ratio over outer decade: {:.3e} -> {:.3e}",
            sign_ratio(r_hi / 10.0),
            sign_ratio(r_hi)
        ),
        format!(
            "radial condition ratio over outer decade: {:.3e} -> {:.3e}",
            rad_ratio(r_hi / 10.0),
            rad_ratio(r_hi)
        ),
    ];
    Ok(BoundReport {
        name: "psi-barrier mean-curvature hypothesis".to_string(),
        min_margin,
        witness,
        samples: samples + 1,
        notes,
    })
}

/// Finite-ball height barrier `phi_sup + C ∫_0^d 1/rho0` over `B(o, k)`,
/// `d` the distance to the boundary sphere.
#[derive(Debug, Clone)]
pub struct HeightBarrier {
    pub c: f64,
    pub k: f64,
    pub phi_sup: f64,
    ds: Vec<f64>,
    hvals: Vec<f64>,
}

impl HeightBarrier {
    pub fn h_at(&self, d: f64) -> f64 {
        let d = d.clamp(0.0, self.k);
        let hstep = self.ds[1] - self.ds[0];
        let i = ((d / hstep) as usize).min(self.ds.len() - 2);
        let t = (d - self.ds[i]) / hstep;
        self.hvals[i] * (1.0 - t) + self.hvals[i + 1] * t
    }

    /// Barrier value at distance-to-boundary `d`.
    pub fn value(&self, d: f64) -> f64 {
        self.phi_sup + self.h_at(d)
    }

    /// The height-estimate constant: `sup |u| <= phi_sup + bound()`.
    pub fn bound(&self) -> f64 {
        self.hvals[self.hvals.len() - 1]
    }
}

const HEIGHT_C_FLOOR: f64 = 1e-6;

pub fn build_height_barrier(
    geom: &ModelGeometry,
    h: &dyn Radial,
    k: f64,
    rho0: &dyn Radial,
    phi_sup: f64,
) -> Result<HeightBarrier, BarrierError> {
    if !(k > 0.0) {
        return Err(BarrierError::InvalidInput("ball radius must be positive".to_string()));
    }
    let samples = 1024;
    // hypothesis: the cylinder principal curvature dominates -rho0'/rho0
    for i in 0..=samples {
        let r = k * i as f64 / samples as f64;
        let d = k - r;
        let kappa_d = geom.rho().d1(r) / geom.rho().value(r);
        if kappa_d < -rho0.d1(d) / rho0.value(d) - 1e-12 {
            return Err(BarrierError::InvalidInput(format!(
                "kappa(d) >= -rho0'/rho0 fails at r = {r}"
            )));
        }
    }
    let mut sup_ratio2 = 0.0_f64;
    let mut sup_rho0 = rho0.value(k);
    let mut inf_rho = f64::INFINITY;
    for i in 1..=samples {
        let r = k * i as f64 / samples as f64;
        let hcyl = geom.cylinder_mean_curvature(r)?;
        let ratio = fabs(h.value(r)) / hcyl;
        if ratio >= 1.0 {
            return Err(BarrierError::Admissibility { witness: r });
        }
        sup_ratio2 = sup_ratio2.max(ratio * ratio);
        sup_rho0 = sup_rho0.max(rho0.value(k - r));
        inf_rho = inf_rho.min(geom.rho().value(r));
    }
    // 5% headroom over the minimal admissible constant
    let c = if sup_ratio2 == 0.0 {
        HEIGHT_C_FLOOR
    } else {
        (1.05 * sqrt(sup_ratio2 / (1.0 - sup_ratio2) * sup_rho0 * sup_rho0 / (inf_rho * inf_rho)))
            .max(HEIGHT_C_FLOOR)
    };

    let cells = 2048;
    let hstep = k / cells as f64;
    let ds: Vec<f64> = (0..=cells).map(|i| i as f64 * hstep).collect();
    let inv_rho0 = |t: f64| 1.0 / rho0.value(t);
    let hvals: Vec<f64> =
        quad::cumulative(&inv_rho0, &ds).into_iter().map(|v| c * v).collect();
    Ok(HeightBarrier { c, k, phi_sup, ds, hvals })
}
