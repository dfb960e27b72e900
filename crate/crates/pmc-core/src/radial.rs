//! Rotationally symmetric machinery: the flux first integral, quadrature
//! solutions of the graph equation for radial data, and the global
//! `u_plus` barrier.
//!
//! For radial `u` and `H` the graph equation has the first integral
//!
//! ```text
//! I(r) = rho xi^(n-1) u' / sqrt(rho^-2 + u'^2),
//! I(r) = ∫_0^r n H rho xi^(n-1) dtau,
//! ```
//!
//! so `u'` is recovered pointwise from
//! `u'^2 = I^2 rho^-2 / (rho^2 xi^(2(n-1)) - I^2)` and `u` by one more
//! quadrature.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use libm::{fabs, sqrt};

use crate::geometry::{GeometryError, ModelGeometry, Radial, RadialArc};
use crate::quad;
use crate::report::BoundReport;

/// Default quadrature step.
pub const DEFAULT_STEP: f64 = 1e-3;

/// Flux integrands are evaluated at `max(r, POLE_EPS)`: mean-curvature data
/// may blow up like `1/r` at the pole while the weighted product
/// `H rho xi^(n-1)` stays finite, and `xi(0) = 0` would otherwise turn the
/// quadrature endpoint into `inf * 0`.
const POLE_EPS: f64 = 1e-8;

#[derive(Debug, Clone)]
pub enum RadialError {
    /// The weighted isoperimetric condition failed: the flux integral
    /// caught up with `rho xi^(n-1)` at this radius.
    FluxAdmissibilityViolated { radius: f64 },
    /// Partial integrals did not contract; the improper integral does not
    /// converge at this truncation.
    Integrability { partials: Vec<f64> },
    InvalidInput(String),
    Geometry(GeometryError),
}

impl From<GeometryError> for RadialError {
    fn from(e: GeometryError) -> Self {
        Self::Geometry(e)
    }
}

impl core::fmt::Display for RadialError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Self::FluxAdmissibilityViolated { radius } => {
                write!(f, "flux admissibility violated at r = {radius}")
            }
            Self::Integrability { partials } => write!(
                f,
                "tail integral not Cauchy ({} partials, last {:?})",
                partials.len(),
                partials.last()
            ),
            Self::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Self::Geometry(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for RadialError {}

/// `I(r) = ∫_0^r n H rho xi^(n-1) dtau` by composite Simpson.
pub fn flux_integral(geom: &ModelGeometry, htilde: &dyn Radial, r: f64) -> f64 {
    flux_integral_with_step(geom, htilde, r, DEFAULT_STEP)
}

pub fn flux_integral_with_step(
    geom: &ModelGeometry,
    htilde: &dyn Radial,
    r: f64,
    step: f64,
) -> f64 {
    let n = geom.nf();
    let m = geom.n() as u32 - 1;
    let f = |t: f64| {
        let t = t.max(POLE_EPS);
        n * htilde.value(t) * geom.rho().value(t) * quad::powi(geom.xi().value(t), m)
    };
    quad::integrate(&f, 0.0, r, step)
}

/// Radial graph solution together with its flux integral and the
/// denominator of the quadrature identity.
#[derive(Debug, Clone)]
pub struct RadialSolution {
    pub r: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    /// Flux first integral at each node.
    pub flux: Vec<f64>,
    /// `rho^2 xi^(2(n-1)) - I^2` at each node.
    pub denom: Vec<f64>,
    step: f64,
    guard: f64,
}

impl RadialSolution {
    pub fn step(&self) -> f64 {
        self.step
    }

    /// Radius below which `u'` was set to its pole limit `0`.
    pub fn guard_radius(&self) -> f64 {
        self.guard
    }

    /// Cubic Hermite interpolation of `u` through the slope channel, so
    /// consumers that difference the interpolant (grid comparisons) see the
    /// quadrature accuracy, not interpolation kinks.
    pub fn u_at(&self, r: f64) -> f64 {
        let last = self.r.len() - 1;
        if r <= self.r[0] {
            return self.u[0];
        }
        if r >= self.r[last] {
            return self.u[last];
        }
        let i = ((r - self.r[0]) / self.step) as usize;
        let i = i.min(last - 1);
        let (a, b) = (self.r[i], self.r[i + 1]);
        let h = b - a;
        let t = (r - a) / h;
        let (t2, t3) = (t * t, t * t * t);
        self.u[i] * (2.0 * t3 - 3.0 * t2 + 1.0)
            + self.du[i] * h * (t3 - 2.0 * t2 + t)
            + self.u[i + 1] * (-2.0 * t3 + 3.0 * t2)
            + self.du[i + 1] * h * (t3 - t2)
    }

    pub fn du_at(&self, r: f64) -> f64 {
        interp_linear(&self.r, &self.du, r)
    }

    /// Residual of the expanded radial equation
    /// `(u'/W)' + (u'/W)((n-1) xi'/xi + rho'/rho) - n H`
    /// at interior nodes, centered differences of the computed solution.
    /// Nodes inside the pole guard are skipped.
    pub fn expanded_ode_residual(
        &self,
        geom: &ModelGeometry,
        htilde: &dyn Radial,
    ) -> Vec<(f64, f64)> {
        let n = geom.nf();
        let mut out = Vec::new();
        let flux_ratio = |k: usize| -> f64 {
            let w = sqrt(
                1.0 / (geom.rho().value(self.r[k]) * geom.rho().value(self.r[k]))
                    + self.du[k] * self.du[k],
            );
            self.du[k] / w
        };
        for k in 1..self.r.len() - 1 {
            let r = self.r[k];
            if r < self.guard + self.step {
                continue;
            }
            let df = (flux_ratio(k + 1) - flux_ratio(k - 1)) / (self.r[k + 1] - self.r[k - 1]);
            let lhs = df
                + flux_ratio(k)
                    * ((n - 1.0) * geom.xi().d1(r) / geom.xi().value(r)
                        + geom.rho().d1(r) / geom.rho().value(r));
            out.push((r, lhs - n * htilde.value(r)));
        }
        out
    }
}

/// Solves the radial graph equation by quadrature on `[0, r_max]`, pinning
/// the height at `anchor = (r0, u0)`.
///
/// Fails with the first radius at which
/// `rho^2 xi^(2(n-1)) <= I^2` (strict weighted isoperimetric condition).
pub fn solve_radial(
    geom: &ModelGeometry,
    htilde: &dyn Radial,
    r_max: f64,
    anchor: (f64, f64),
) -> Result<RadialSolution, RadialError> {
    solve_radial_with_step(geom, htilde, r_max, anchor, DEFAULT_STEP)
}

pub fn solve_radial_with_step(
    geom: &ModelGeometry,
    htilde: &dyn Radial,
    r_max: f64,
    anchor: (f64, f64),
    step: f64,
) -> Result<RadialSolution, RadialError> {
    if !(r_max > 0.0 && step > 0.0) {
        return Err(RadialError::InvalidInput("need r_max > 0 and step > 0".to_string()));
    }
    if !(anchor.0 >= 0.0 && anchor.0 <= r_max) || !anchor.1.is_finite() {
        return Err(RadialError::InvalidInput("anchor must lie inside [0, r_max]".to_string()));
    }
    let coarse = libm::ceil(r_max / step) as usize;
    let h = r_max / coarse as f64;
    let fine_n = 2 * coarse + 1;

    let n = geom.nf();
    let m = geom.n() as u32 - 1;
    let integrand = |t: f64| -> Result<f64, RadialError> {
        let t = t.max(POLE_EPS);
        let v = n * htilde.value(t) * geom.rho().value(t) * quad::powi(geom.xi().value(t), m);
        if !v.is_finite() {
            return Err(RadialError::Geometry(GeometryError::ProfileEvaluation { radius: t }));
        }
        Ok(v)
    };

    // flux integral and slope on the half-step grid
    let mut rs = Vec::with_capacity(fine_n);
    let mut flux = Vec::with_capacity(fine_n);
    let mut denom = Vec::with_capacity(fine_n);
    let mut du = Vec::with_capacity(fine_n);
    let guard = 10.0 * step;

    let hf = h / 2.0;
    let mut acc = 0.0;
    for k in 0..fine_n {
        let r = k as f64 * hf;
        if k > 0 {
            let a = (k - 1) as f64 * hf;
            acc += hf / 6.0
                * (integrand(a)? + 4.0 * integrand(a + 0.5 * hf)? + integrand(r)?);
        }
        let w = geom.rho().value(r) * quad::powi(geom.xi().value(r), m);
        let d = w * w - acc * acc;
        if k > 0 && d <= 0.0 {
            return Err(RadialError::FluxAdmissibilityViolated { radius: r });
        }
        let slope = if r < guard { 0.0 } else { acc / (geom.rho().value(r) * sqrt(d)) };
        rs.push(r);
        flux.push(acc);
        denom.push(d);
        du.push(slope);
    }

    // cumulative height via Simpson on the coarse cells (fine midpoints)
    let mut u = Vec::with_capacity(coarse + 1);
    u.push(0.0);
    let mut total = 0.0;
    for c in 0..coarse {
        let k = 2 * c;
        total += h / 6.0 * (du[k] + 4.0 * du[k + 1] + du[k + 2]);
        u.push(total);
    }

    let r_coarse: Vec<f64> = (0..=coarse).map(|c| 2.0 * c as f64 * hf).collect();
    let shift = anchor.1 - interp_linear(&r_coarse, &u, anchor.0);
    for v in &mut u {
        *v += shift;
    }

    Ok(RadialSolution {
        r: r_coarse,
        u,
        du: (0..=coarse).map(|c| du[2 * c]).collect(),
        flux: (0..=coarse).map(|c| flux[2 * c]).collect(),
        denom: (0..=coarse).map(|c| denom[2 * c]).collect(),
        step: h,
        guard,
    })
}

fn interp_linear(rs: &[f64], vs: &[f64], r: f64) -> f64 {
    if r <= rs[0] {
        return vs[0];
    }
    let last = rs.len() - 1;
    if r >= rs[last] {
        return vs[last];
    }
    let i = match rs.binary_search_by(|x| x.partial_cmp(&r).unwrap()) {
        Ok(i) => return vs[i],
        Err(i) => i - 1,
    };
    let t = (r - rs[i]) / (rs[i + 1] - rs[i]);
    vs[i] * (1.0 - t) + vs[i + 1] * t
}

/// Global upper barrier pinned at `phi_sup` at infinity:
/// decreasing in `r`, slope `-(1-eps) / (rho_plus sqrt(2 eps - eps^2))`.
#[derive(Clone)]
pub struct UPlusBarrier {
    pub eps: f64,
    pub phi_sup: f64,
    pub rs: Vec<f64>,
    pub values: Vec<f64>,
    /// Estimated remainder of the defining integral beyond the last node.
    pub tail: f64,
    slope_coeff: f64,
    rho_plus: RadialArc,
}

impl UPlusBarrier {
    pub fn r_max(&self) -> f64 {
        self.rs[self.rs.len() - 1]
    }
}

impl core::fmt::Debug for UPlusBarrier {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("UPlusBarrier")
            .field("eps", &self.eps)
            .field("phi_sup", &self.phi_sup)
            .field("nodes", &self.rs.len())
            .field("tail", &self.tail)
            .finish()
    }
}

impl Radial for UPlusBarrier {
    fn value(&self, r: f64) -> f64 {
        if r >= self.r_max() {
            return self.values[self.values.len() - 1];
        }
        if r <= 0.0 {
            return self.values[0];
        }
        // Hermite between nodes with the exact slope channel
        let h = self.rs[1] - self.rs[0];
        let i = (libm::floor(r / h) as usize).min(self.rs.len() - 2);
        let (a, b) = (self.rs[i], self.rs[i + 1]);
        let t = (r - a) / (b - a);
        let (t2, t3) = (t * t, t * t * t);
        self.values[i] * (2.0 * t3 - 3.0 * t2 + 1.0)
            + self.d1(a) * h * (t3 - 2.0 * t2 + t)
            + self.values[i + 1] * (-2.0 * t3 + 3.0 * t2)
            + self.d1(b) * h * (t3 - t2)
    }

    fn d1(&self, r: f64) -> f64 {
        -self.slope_coeff / self.rho_plus.value(r)
    }

    fn d2(&self, r: f64) -> f64 {
        let rp = self.rho_plus.value(r);
        self.slope_coeff * self.rho_plus.d1(r) / (rp * rp)
    }
}

/// Builds the `u_plus` barrier on `[0, r_max]`.
///
/// Requires `eps` in `(0,1)` and an integrable `1/rho_plus` tail, certified
/// by a segment-contraction test; the remainder beyond `r_max` is estimated
/// by geometric extrapolation and added to the tabulated values, so the
/// barrier stays strictly above `phi_sup` and meets it only in the limit.
pub fn build_u_plus(
    geom: &ModelGeometry,
    eps: f64,
    phi_sup: f64,
    r_max: f64,
) -> Result<UPlusBarrier, RadialError> {
    build_u_plus_with_step(geom, eps, phi_sup, r_max, DEFAULT_STEP)
}

pub fn build_u_plus_with_step(
    geom: &ModelGeometry,
    eps: f64,
    phi_sup: f64,
    r_max: f64,
    step: f64,
) -> Result<UPlusBarrier, RadialError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(RadialError::InvalidInput("eps must lie in (0,1)".to_string()));
    }
    if !(phi_sup >= 0.0) {
        return Err(RadialError::InvalidInput("phi_sup must be non-negative".to_string()));
    }
    let rho_plus = geom.rho_plus().clone();
    let inv_rp = |t: f64| 1.0 / rho_plus.value(t);

    quad::cauchy_tail_test(&inv_rp, 1.0, r_max, 8, step, 0.999)
        .map_err(|partials| RadialError::Integrability { partials })?;

    // second warped-ratio condition (the first is enforced at geometry
    // construction): rho'/rho^3 >= rho_plus'/rho_plus^3
    for i in 0..=256 {
        let r = r_max * i as f64 / 256.0;
        let rv = geom.rho().value(r);
        let rp = rho_plus.value(r);
        let lhs = geom.rho().d1(r) / (rv * rv * rv);
        let rhs = rho_plus.d1(r) / (rp * rp * rp);
        if lhs < rhs - 1e-10 * fabs(rhs).max(1.0) {
            return Err(RadialError::InvalidInput(format!(
                "rho'/rho^3 < rho_plus'/rho_plus^3 at r = {r}"
            )));
        }
    }

    let slope_coeff = (1.0 - eps) / sqrt(2.0 * eps - eps * eps);
    let tail = quad::geometric_tail(&inv_rp, r_max, (r_max / 8.0).max(1.0), step, 0.999)
        .map(|t| slope_coeff * t.tail)
        .ok_or_else(|| RadialError::Integrability {
            partials: Vec::new(),
        })?;

    let coarse = libm::ceil(r_max / step) as usize;
    let h = r_max / coarse as f64;
    let rs: Vec<f64> = (0..=coarse).map(|c| c as f64 * h).collect();
    // integrate inward from r_max; u(r_max) carries the estimated tail
    let mut values = alloc::vec![0.0; coarse + 1];
    values[coarse] = phi_sup + tail;
    for c in (0..coarse).rev() {
        let a = rs[c];
        let b = rs[c + 1];
        let seg = slope_coeff * quad::simpson_cell(&inv_rp, a, b);
        values[c] = values[c + 1] + seg;
    }

    let barrier = UPlusBarrier { eps, phi_sup, rs, values, tail, slope_coeff, rho_plus };
    for w in barrier.values.windows(2) {
        if !(w[0] > w[1]) {
            return Err(RadialError::InvalidInput(
                "u_plus failed to be strictly decreasing".to_string(),
            ));
        }
    }
    if !(barrier.values[coarse] > phi_sup) {
        return Err(RadialError::InvalidInput(
            "u_plus must stay above phi_sup".to_string(),
        ));
    }
    Ok(barrier)
}

use alloc::format;

/// Margin sweep of the height-barrier admissibility bound
///
/// ```text
/// n|H| <= (1-eps) sqrt( rho_plus^-2 (1 + (1-eps)^2/(2eps-eps^2))
///        / (rho^-2 + rho_plus^-2 (1-eps)^2/(2eps-eps^2)) )
///        * ( rho_plus'/rho_plus + (n-1) xi'/xi )
/// ```
pub fn check_h_bound_u_plus(
    geom: &ModelGeometry,
    h: &dyn Radial,
    eps: f64,
) -> Result<BoundReport, RadialError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(RadialError::InvalidInput("eps must lie in (0,1)".to_string()));
    }
    let samples = 2048;
    let mut min_margin = f64::INFINITY;
    let mut witness = 0.0;
    for i in 1..=samples {
        let r = geom.r_max() * i as f64 / samples as f64;
        let rhs = u_plus_bound_rhs(geom, eps, r);
        let margin = rhs - geom.nf() * fabs(h.value(r));
        if margin < min_margin {
            min_margin = margin;
            witness = r;
        }
    }
    Ok(BoundReport {
        name: "u_plus height bound".to_string(),
        min_margin,
        witness,
        samples,
        notes: Vec::new(),
    })
}

/// Right side of the `u_plus` admissibility bound at radius `r`.
pub fn u_plus_bound_rhs(geom: &ModelGeometry, eps: f64, r: f64) -> f64 {
    let rp = geom.rho_plus().value(r);
    let rho = geom.rho().value(r);
    let s = (1.0 - eps) * (1.0 - eps) / (2.0 * eps - eps * eps);
    let num = (1.0 + s) / (rp * rp);
    let den = 1.0 / (rho * rho) + s / (rp * rp);
    let grad = geom.rho_plus().d1(r) / rp + (geom.nf() - 1.0) * geom.xi().d1(r) / geom.xi().value(r);
    (1.0 - eps) * sqrt(num / den) * grad
}

/// The canonical barrier mean curvature: `n Htilde = (1-eps)
/// (rho_plus'/rho_plus + (n-1) xi'/xi)`, for which the flux integral
/// collapses to `(1-eps) rho_plus xi^(n-1)`. The data blows up like
/// `(n-1)/(n r)` at the pole; evaluation clamps the radius away from zero.
pub struct UPlusMeanCurvature {
    pub geom: ModelGeometry,
    pub eps: f64,
}

impl Radial for UPlusMeanCurvature {
    fn value(&self, r: f64) -> f64 {
        let r = r.max(1e-8);
        let g = &self.geom;
        (1.0 - self.eps)
            * (g.rho_plus().d1(r) / g.rho_plus().value(r)
                + (g.nf() - 1.0) * g.xi().d1(r) / g.xi().value(r))
            / g.nf()
    }

    fn d1(&self, _r: f64) -> f64 {
        unimplemented!("slope channel not used for mean-curvature data")
    }

    fn d2(&self, _r: f64) -> f64 {
        unimplemented!("curvature channel not used for mean-curvature data")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::RadialFunction;
    use approx::assert_relative_eq;
    use libm::{atan, cosh, sinh, tanh};

    #[test]
    fn flux_zero_h() {
        let geom = ModelGeometry::hyperbolic(2, 10.0);
        for &r in &[0.5, 2.0, 5.0] {
            assert_eq!(flux_integral(&geom, &RadialFunction::constant(0.0), r), 0.0);
        }
    }

    #[test]
    fn flux_constant_h_matches_sinh_power() {
        for n in [2usize, 3] {
            let geom = ModelGeometry::hyperbolic(n, 10.0);
            let h = 0.5;
            for &r in &[0.5, 1.0, 2.0, 4.0] {
                let got = flux_integral(&geom, &RadialFunction::constant(h), r);
                let exact = h * quad::powi(sinh(r), n as u32);
                assert_relative_eq!(got, exact, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn flux_canonical_barrier_curvature() {
        let geom = ModelGeometry::hyperbolic(2, 10.0);
        let eps = 0.25;
        let h = UPlusMeanCurvature { geom: geom.clone(), eps };
        for &r in &[0.5, 1.5, 3.0] {
            let got = flux_integral(&geom, &h, r);
            let exact = (1.0 - eps) * cosh(r) * sinh(r);
            assert_relative_eq!(got, exact, max_relative = 1e-10);
        }
    }

    #[test]
    fn radial_slice_for_zero_h() {
        let geom = ModelGeometry::hyperbolic(2, 10.0);
        let sol = solve_radial(&geom, &RadialFunction::constant(0.0), 5.0, (0.0, 3.0)).unwrap();
        for (&u, &du) in sol.u.iter().zip(&sol.du) {
            assert_eq!(u, 3.0);
            assert_eq!(du, 0.0);
        }
    }

    #[test]
    fn radial_hyperbolic_slope_closed_form() {
        let geom = ModelGeometry::hyperbolic(2, 10.0);
        let h = 0.5;
        let sol = solve_radial(&geom, &RadialFunction::constant(h), 5.0, (0.0, 0.0)).unwrap();
        for &r in &[0.5, 1.0, 2.0] {
            let (c, s) = (cosh(r), sinh(r));
            let exact = sqrt(h * h * s * s / (c * c * (c * c - h * h * s * s)));
            assert_relative_eq!(sol.du_at(r), exact, max_relative = 1e-8);
        }
    }

    #[test]
    fn radial_quadrature_identity_nodewise() {
        let geom = ModelGeometry::hyperbolic(2, 10.0);
        let sol = solve_radial(&geom, &RadialFunction::constant(0.5), 5.0, (0.0, 0.0)).unwrap();
        for k in 0..sol.r.len() {
            let r = sol.r[k];
            if r < sol.guard_radius() {
                continue;
            }
            let rho = cosh(r);
            let lhs = sol.du[k] * sol.du[k] * sol.denom[k];
            let rhs = sol.flux[k] * sol.flux[k] / (rho * rho);
            let scale = rhs.max(1e-300);
            assert!(fabs(lhs - rhs) / scale <= 1e-10, "node {k}: {lhs} vs {rhs}");
            assert!(sol.denom[k] > 0.0);
        }
    }

    #[test]
    fn radial_supercritical_h_fails_with_radius() {
        let geom = ModelGeometry::hyperbolic(2, 12.0);
        let err =
            solve_radial(&geom, &RadialFunction::constant(1.1), 12.0, (0.0, 0.0)).unwrap_err();
        match err {
            RadialError::FluxAdmissibilityViolated { radius } => {
                // cosh^2 sinh^2 = I^2 = 1.1^2 sinh^4 at tanh r = 1/1.1
                let expected = libm::atanh(1.0 / 1.1);
                assert!(fabs(radius - expected) < 0.05, "radius {radius} vs {expected}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn radial_expanded_ode_residual_small() {
        let geom = ModelGeometry::hyperbolic(2, 10.0);
        let h = RadialFunction::constant(0.5);
        let sol = solve_radial(&geom, &h, 5.0, (0.0, 0.0)).unwrap();
        let res = sol.expanded_ode_residual(&geom, &h);
        let max = res.iter().fold(0.0_f64, |m, (_, v)| m.max(fabs(*v)));
        assert!(max <= 1e-4, "max interior residual {max}");
    }

    #[test]
    fn radial_sign_equivariance_exact() {
        // the quadrature is odd in the flux integral, bit for bit
        let geom = ModelGeometry::hyperbolic(2, 10.0);
        let up = solve_radial(&geom, &RadialFunction::constant(0.4), 4.0, (0.0, 0.0)).unwrap();
        let dn = solve_radial(&geom, &RadialFunction::constant(-0.4), 4.0, (0.0, 0.0)).unwrap();
        for k in 0..up.u.len() {
            assert_eq!(up.u[k], -dn.u[k], "node {k}");
            assert_eq!(up.du[k], -dn.du[k]);
        }
    }

    #[test]
    fn u_plus_closed_form_gudermann() {
        // rho_plus = cosh, eps = 1 - sqrt(2)/2: u_+(r) = phi + pi/2 - atan(sinh r)
        let geom = ModelGeometry::hyperbolic(2, 25.0);
        let eps = 1.0 - sqrt(2.0) / 2.0;
        let barrier = build_u_plus(&geom, eps, 1.0, 25.0).unwrap();
        let exact = 1.0 + core::f64::consts::FRAC_PI_2 - atan(sinh(1.0));
        assert_relative_eq!(barrier.value(1.0), exact, max_relative = 1e-8);
        // slope identity at nodes
        for &r in &[0.5, 2.0, 10.0] {
            assert_relative_eq!(
                barrier.d1(r),
                -(1.0 - eps) / (cosh(r) * sqrt(2.0 * eps - eps * eps)),
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn u_plus_monotone_and_above_sup() {
        let geom = ModelGeometry::hyperbolic(2, 20.0);
        let barrier = build_u_plus(&geom, 0.3, 0.0, 20.0).unwrap();
        assert!(barrier.values.windows(2).all(|w| w[0] > w[1]));
        assert!(barrier.values.iter().all(|&v| v > 0.0));
        // tail tolerance: meets phi_sup at the truncation radius
        assert!(barrier.values[barrier.values.len() - 1] < 1e-6);
    }

    #[test]
    fn u_plus_rejects_non_integrable_warping() {
        let geom = ModelGeometry::euclidean(2, 20.0);
        // 1/rho_plus = 1 has divergent tail
        let err = build_u_plus(&geom, 0.3, 1.0, 20.0).unwrap_err();
        assert!(matches!(err, RadialError::Integrability { .. }));
        let geom = ModelGeometry::hyperbolic(2, 20.0);
        assert!(matches!(
            build_u_plus(&geom, 1.0, 1.0, 20.0),
            Err(RadialError::InvalidInput(_))
        ));
    }

    #[test]
    fn u_plus_bound_reduces_in_symmetric_case() {
        // rho = rho_plus makes the sqrt factor collapse to 1.
        let geom = ModelGeometry::hyperbolic(2, 10.0);
        let eps = 0.1;
        for &r in &[0.5, 1.0, 3.0] {
            let rhs = u_plus_bound_rhs(&geom, eps, r);
            let reduced = (1.0 - eps) * (tanh(r) + 1.0 / tanh(r));
            assert_relative_eq!(rhs, reduced, max_relative = 1e-12);
        }
    }

    #[test]
    fn u_plus_bound_margin_sweep() {
        let geom = ModelGeometry::hyperbolic(2, 10.0);
        let eps = 0.1;
        let zero = check_h_bound_u_plus(&geom, &RadialFunction::constant(0.0), eps).unwrap();
        assert!(zero.admissible());
        // H = 0.9 * (1-eps)(tanh + coth)/2 stays admissible
        struct NearBound {
            geom: ModelGeometry,
            eps: f64,
        }
        impl Radial for NearBound {
            fn value(&self, r: f64) -> f64 {
                0.9 * u_plus_bound_rhs(&self.geom, self.eps, r.max(1e-8)) / 2.0
            }
            fn d1(&self, _r: f64) -> f64 {
                0.0
            }
            fn d2(&self, _r: f64) -> f64 {
                0.0
            }
        }
        let near = NearBound { geom: geom.clone(), eps };
        let rep = check_h_bound_u_plus(&geom, &near, eps).unwrap();
        assert!(rep.admissible(), "margin {}", rep.min_margin);
    }

    #[test]
    fn barrier_ordering_dominates_radial_solutions() {
        let geom = ModelGeometry::hyperbolic(2, 20.0);
        let eps = 0.2;
        let phi_sup = 0.5;
        let barrier = build_u_plus(&geom, eps, phi_sup, 20.0).unwrap();
        // admissible radial data: half the barrier bound
        struct HalfBound {
            geom: ModelGeometry,
            eps: f64,
        }
        impl Radial for HalfBound {
            fn value(&self, r: f64) -> f64 {
                0.5 * u_plus_bound_rhs(&self.geom, self.eps, r.max(1e-8)) / 2.0
            }
            fn d1(&self, _r: f64) -> f64 {
                0.0
            }
            fn d2(&self, _r: f64) -> f64 {
                0.0
            }
        }
        let h = HalfBound { geom: geom.clone(), eps };
        // boundary-pinned solve with |data| <= phi_sup
        let sol = solve_radial(&geom, &h, 10.0, (10.0, 0.4)).unwrap();
        for k in 0..sol.r.len() {
            let v = barrier.value(sol.r[k]);
            assert!(
                sol.u[k] <= v + 1e-9 && sol.u[k] >= -v - 1e-9,
                "node {k}: u = {}, barrier = {v}",
                sol.u[k]
            );
        }
    }
}
