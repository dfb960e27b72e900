//! Cross-cutting verifiers: the quantitative interior gradient bound, and
//! the growth-condition probes behind the non-existence results.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use libm::{exp, fabs, log, pow, sinh, sqrt};

use crate::geometry::{ModelGeometry, Radial, RadialArc};
use crate::quad;

#[derive(Debug, Clone)]
pub enum AnalysisError {
    InvalidInput(String),
}

impl core::fmt::Display for AnalysisError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Self::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
        }
    }
}

impl core::error::Error for AnalysisError {}

/// Inputs of the interior gradient bound on a ball `B(p, R)`; `p` sits at
/// radius `r_p` from the pole, so every radial quantity is sampled over
/// `[max(0, r_p - R), r_p + R]`.
#[derive(Debug, Clone)]
pub struct GradientBoundInput {
    pub r_p: f64,
    pub radius: f64,
    /// Sectional curvature lower-bound constant (`K >= -k0^2` on the ball).
    pub k0: f64,
    /// Constant with `Ric + Hess log rho >= -l_ric g` on the ball.
    pub l_ric: f64,
    /// Maximum of the (positive) solution on the closed ball.
    pub m_sup: f64,
    pub u_at_p: f64,
    pub sup_h: f64,
    pub sup_grad_h: f64,
    /// Localization exponent; must exceed `max(2/3, rho^2/(1+rho^2))` at
    /// every sampled warping value.
    pub beta: f64,
}

/// All intermediate constants of the bound, kept for audit output.
#[derive(Debug, Clone)]
pub struct GradientBound {
    pub b: f64,
    pub mu: f64,
    pub delta: f64,
    pub delta_prime: f64,
    pub m_tilde: f64,
    pub c_r: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    pub notes: Vec<String>,
}

impl GradientBound {
    /// The usable cap: `|grad u|(p) <= max(1, e^B)`.
    pub fn gradient_cap(&self) -> f64 {
        let e = exp(self.b);
        if e.is_finite() {
            e.max(1.0)
        } else {
            f64::INFINITY
        }
    }
}

/// Curvature constants of a ball computed from the model's closed forms:
/// `k0 = sup b` over the radial range (lower curvature bound `-b^2`), and
/// `l_ric` from `Ric = K g` with `K >= -b^2` plus the diagonal Hessian of
/// `log rho` in the polar metric.
pub fn curvature_bounds_on_ball(geom: &ModelGeometry, r_p: f64, radius: f64) -> (f64, f64) {
    let lo = (r_p - radius).max(1e-3);
    let hi = r_p + radius;
    let samples = 512;
    let mut k0 = 0.0_f64;
    let mut l = 0.0_f64;
    for i in 0..=samples {
        let r = lo + (hi - lo) * i as f64 / samples as f64;
        let b = geom.profile().b.value(r);
        k0 = k0.max(b);
        let rho = geom.rho().value(r);
        let dr = geom.rho().d1(r);
        let ddr = geom.rho().d2(r);
        let log_rho_dd = (ddr * rho - dr * dr) / (rho * rho);
        let angular = geom.xi().d1(r) / geom.xi().value(r) * (dr / rho);
        let eig_min = log_rho_dd.min(angular);
        l = l.max(-(-b * b + eig_min));
    }
    (k0, l.max(0.0))
}

/// Comparison profile of the cutoff: `sinh(k0 t)/k0`, degenerating to `t`
/// below `k0 = 1e-12`.
fn comparison_xi(k0: f64, t: f64) -> (f64, f64) {
    if k0 < 1e-12 {
        (t, 1.0)
    } else {
        (sinh(k0 * t) / k0, libm::cosh(k0 * t))
    }
}

/// Scans for a localization exponent making the bound's coefficient
/// positive; the bound holds for any admissible `beta`, and larger `mu`
/// gives a tighter cap.
pub fn suggest_beta(geom: &ModelGeometry, r_p: f64, radius: f64) -> Option<f64> {
    let hi = r_p + radius;
    let mut rho_max = 0.0_f64;
    for i in 0..=256 {
        let r = (r_p - radius).max(0.0) + (hi - (r_p - radius).max(0.0)) * i as f64 / 256.0;
        rho_max = rho_max.max(geom.rho().value(r));
    }
    let floor = (2.0_f64 / 3.0).max(rho_max * rho_max / (1.0 + rho_max * rho_max));
    let mut best: Option<(f64, f64)> = None;
    for k in 1..=400 {
        let beta = floor + (1.0 - floor) * (1.0 - pow(0.97, k as f64));
        let delta = 1.5 * beta - 1.0;
        let delta_prime = log(beta / ((1.0 - beta) * rho_max * rho_max));
        if delta_prime <= 0.0 {
            continue;
        }
        let mu = 2.0 * beta * (delta * delta_prime - 2.0) / delta_prime;
        if mu > 0.0 && best.map_or(true, |(m, _)| mu > m) {
            best = Some((mu, beta));
        }
    }
    best.map(|(_, beta)| beta)
}

/// Assembles the interior gradient bound `B` with `log |grad u|(p) <= B`.
/// Every geometric quantity enters through its worst case over the ball,
/// keeping `B` an upper bound.
pub fn eval_interior_gradient_bound(
    geom: &ModelGeometry,
    input: &GradientBoundInput,
) -> Result<GradientBound, AnalysisError> {
    if !(input.k0 >= 0.0 && input.l_ric >= 0.0) {
        return Err(AnalysisError::InvalidInput("curvature constants must be >= 0".to_string()));
    }
    if !(input.radius > 0.0) || !(input.m_sup > 0.0) {
        return Err(AnalysisError::InvalidInput(
            "need a positive radius and a positive solution bound".to_string(),
        ));
    }
    if !(input.sup_h >= 0.0 && input.sup_grad_h >= 0.0) {
        return Err(AnalysisError::InvalidInput("mean-curvature data must be >= 0".to_string()));
    }
    let lo = (input.r_p - input.radius).max(1e-6);
    let hi = input.r_p + input.radius;
    let samples = 512;

    let mut rho_min = f64::INFINITY;
    let mut rho_max = 0.0_f64;
    let mut grad_log_rho = 0.0_f64;
    let mut hess_log_rho = 0.0_f64;
    let mut kappa_min = f64::INFINITY;
    let mut kappa_max = f64::NEG_INFINITY;
    for i in 0..=samples {
        let r = lo + (hi - lo) * i as f64 / samples as f64;
        let rho = geom.rho().value(r);
        let dr = geom.rho().d1(r);
        let ddr = geom.rho().d2(r);
        rho_min = rho_min.min(rho);
        rho_max = rho_max.max(rho);
        let kappa = dr / rho;
        kappa_min = kappa_min.min(kappa);
        kappa_max = kappa_max.max(kappa);
        grad_log_rho = grad_log_rho.max(fabs(kappa));
        let log_rho_dd = (ddr * rho - dr * dr) / (rho * rho);
        let angular = geom.xi().d1(r) / geom.xi().value(r) * kappa;
        hess_log_rho = hess_log_rho.max(fabs(log_rho_dd).max(fabs(angular)));
    }

    let beta = input.beta;
    let beta_floor = (2.0_f64 / 3.0).max(rho_max * rho_max / (1.0 + rho_max * rho_max));
    if !(beta > beta_floor && beta < 1.0) {
        return Err(AnalysisError::InvalidInput(format!(
            "beta = {beta} outside ({beta_floor}, 1)"
        )));
    }
    // worst case over the ball: the largest warping gives the smallest
    // delta', which keeps B an upper bound
    let delta_prime = log(beta / ((1.0 - beta) * rho_max * rho_max));
    let delta = 1.5 * beta - 1.0;
    let mu = 2.0 * beta * (delta * delta_prime - 2.0) / delta_prime;
    if !(mu > 0.0) {
        return Err(AnalysisError::InvalidInput(format!(
            "localization coefficient mu = {mu} <= 0; increase beta toward 1"
        )));
    }

    let c_r = if input.k0 < 1e-12 {
        input.radius * input.radius / 2.0
    } else {
        (libm::cosh(input.k0 * input.radius) - 1.0) / (input.k0 * input.k0)
    };

    let n = geom.nf();
    let m = input.m_sup;
    let (sup_h, sup_dh) = (input.sup_h, input.sup_grad_h);

    // sup over the ball of the cutoff-dependent terms; eta = eta_hat^2 with
    // eta_hat(t) = 1 - (∫_0^t xi)/C_R along the distance from p
    let mut m_tilde = 0.0_f64;
    let tau_samples = 256;
    for i in 0..=tau_samples {
        let tau = input.radius * i as f64 / tau_samples as f64;
        let (xi_t, dxi_t) = comparison_xi(input.k0, tau);
        let int_xi = if input.k0 < 1e-12 {
            tau * tau / 2.0
        } else {
            (libm::cosh(input.k0 * tau) - 1.0) / (input.k0 * input.k0)
        };
        let eta_hat = 1.0 - int_xi / c_r;
        let eta = eta_hat * eta_hat;

        let line1 = 2.0 / (sqrt(beta) * delta_prime)
            * (n * sup_dh
                + (1.0 - beta) * n * sup_h * grad_log_rho
                + 2.0 * (1.0 - beta) * grad_log_rho * grad_log_rho
                + (1.0 - beta) * hess_log_rho)
            * m
            * eta;
        let line2 = sqrt(1.0 - beta) * (n * sup_h + 4.0 * grad_log_rho) * eta;
        let line3 = 4.0 * sqrt(1.0 - beta) * xi_t / c_r * eta_hat;
        let line4 = 2.0 * xi_t / c_r * (n * sup_h + (6.0 - 5.0 * beta) * grad_log_rho) * m * eta_hat;
        // nested absolute values evaluated as printed, maximized over the
        // kappa range (the expression is convex in kappa)
        let composite = |kappa: f64| {
            fabs(
                (n - 1.0) * dxi_t / xi_t.max(1e-300) + kappa
                    + n * sup_h
                    + (1.0 - beta) * fabs(dxi_t / xi_t.max(1e-300) - kappa),
            )
        };
        let comp = composite(kappa_min).max(composite(kappa_max));
        let line5 = m
            * (2.0 * eta_hat * xi_t / c_r * comp + 2.0 * xi_t * xi_t / (c_r * c_r));
        m_tilde = m_tilde.max(line1 + line2 + line3 + line4 + line5);
    }

    let (xi_r, _) = comparison_xi(input.k0, input.radius);
    let prefactor = 4.0 * m * (1.0 + rho_min) * (1.0 + rho_min) / rho_min;
    let second = (1.0 + rho_min) * rho_max * rho_max / (mu * rho_min)
        * (m_tilde + 2.0 * input.l_ric * m / delta_prime);
    let b = prefactor * (xi_r / c_r).max(second);

    let notes = vec_audit(beta, delta, delta_prime, mu, m_tilde, c_r, rho_min, rho_max);
    Ok(GradientBound { b, mu, delta, delta_prime, m_tilde, c_r, rho_min, rho_max, notes })
}

fn vec_audit(
    beta: f64,
    delta: f64,
    delta_prime: f64,
    mu: f64,
    m_tilde: f64,
    c_r: f64,
    rho_min: f64,
    rho_max: f64,
) -> Vec<String> {
    let mut notes = Vec::new();
    notes.push(format!("beta = {beta}, delta = {delta}, delta' = {delta_prime}, mu = {mu}"));
    notes.push(format!("M~ = {m_tilde}, C_R = {c_r}, rho in [{rho_min}, {rho_max}]"));
    notes.push(
        "composite curvature term evaluated with the outer absolute value as printed; \
         the grouping of that outer |.| is ambiguous in the source derivation"
            .to_string(),
    );
    notes
}

/// Thresholds of the growth-condition probes; all classification knobs are
/// explicit configuration.
#[derive(Debug, Clone)]
pub struct ProbeThresholds {
    /// Multiplicative growth of the partial integral that declares
    /// divergence (with non-decreasing increments).
    pub divergence_factor: f64,
    /// Tail fraction below which the partial integrals count as Cauchy.
    pub cauchy_fraction: f64,
    /// Per-decade increment ratio at or below which a non-increasing
    /// integrand is classified as convergent.
    pub contraction_ratio: f64,
    /// Per-decade increment ratio at or above which divergence is declared
    /// for the monotone comparison integral of the second condition.
    pub sustain_ratio: f64,
    /// Log-spaced checkpoints per probe.
    pub checkpoints: usize,
}

impl Default for ProbeThresholds {
    fn default() -> Self {
        Self {
            divergence_factor: 1e3,
            cauchy_fraction: 1e-6,
            contraction_ratio: 0.5,
            sustain_ratio: 0.66,
            checkpoints: 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeVerdict {
    Consistent,
    Violated,
    Inconclusive,
}

impl core::fmt::Display for ProbeVerdict {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let s = match self {
            Self::Consistent => "CONSISTENT",
            Self::Violated => "VIOLATED",
            Self::Inconclusive => "INCONCLUSIVE",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct ProbeReport {
    pub verdict: ProbeVerdict,
    pub partials: Vec<f64>,
    pub notes: Vec<String>,
}

/// Inputs of the non-existence conditions.
pub struct NonexistenceInput {
    /// Comparison density `p(s) >= 0`.
    pub p: RadialArc,
    /// Radial upper bound of the warping.
    pub rho0: RadialArc,
    /// Area of the geodesic sphere.
    pub area: RadialArc,
    /// Positive constant in the exponential weight.
    pub d_const: f64,
    /// Non-increasing comparison function of the second condition.
    pub h_nonexist: Option<RadialArc>,
    pub r_lo: f64,
    pub r_hi: f64,
}

impl NonexistenceInput {
    fn validate(&self) -> Result<(), AnalysisError> {
        if !(self.r_lo > 0.0 && self.r_hi >= 99.0 * self.r_lo) {
            return Err(AnalysisError::InvalidInput(
                "probe range must cover at least two decades".to_string(),
            ));
        }
        if !(self.d_const > 0.0) {
            return Err(AnalysisError::InvalidInput("need D > 0".to_string()));
        }
        Ok(())
    }
}

/// Log-spaced grid over the probe range with `per_seg` fine points per
/// checkpoint segment.
fn log_grid(r_lo: f64, r_hi: f64, checkpoints: usize, per_seg: usize) -> Vec<f64> {
    let n = checkpoints * per_seg;
    let lr = log(r_hi / r_lo);
    (0..=n).map(|k| r_lo * exp(lr * k as f64 / n as f64)).collect()
}

fn classify_growth(partials: &[f64], th: &ProbeThresholds, notes: &mut Vec<String>) -> ProbeVerdict {
    let total = partials[partials.len() - 1];
    let first = partials[1].max(1e-300);
    let increments: Vec<f64> =
        partials.windows(2).map(|w| w[1] - w[0]).collect();
    let half = increments.len() / 2;
    let tail_sum: f64 = increments[half..].iter().sum();
    let nondecreasing = increments[half..].windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-9));
    let decreasing = increments[half..].windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9));

    notes.push(format!(
        "partial integral grew {:.3e} -> {:.3e}; outer-half increments {} ",
        first,
        total,
        if nondecreasing { "non-decreasing" } else if decreasing { "decreasing" } else { "mixed" }
    ));

    if decreasing && tail_sum < th.cauchy_fraction * total {
        return ProbeVerdict::Violated;
    }
    if nondecreasing && total >= th.divergence_factor * first {
        return ProbeVerdict::Consistent;
    }
    ProbeVerdict::Inconclusive
}

/// First growth condition: partial integrals of
/// `exp(D (∫ sqrt(p))^2) / (rho0^2 A)` over the probe range. Divergence
/// (threshold growth with non-decreasing increments) is CONSISTENT with
/// non-existence; Cauchy partials are VIOLATED.
pub fn check_nonexistence_condition_1(
    input: &NonexistenceInput,
    th: &ProbeThresholds,
) -> Result<ProbeReport, AnalysisError> {
    input.validate()?;
    let grid = log_grid(input.r_lo, input.r_hi, th.checkpoints, 64);
    // cumulative sqrt(p) from the probe start (the constant offset scales
    // the integrand by a fixed factor and cannot change the verdict)
    let mut s_acc = 0.0;
    let mut partials = Vec::with_capacity(th.checkpoints + 1);
    let mut acc = 0.0;
    partials.push(0.0);
    let integrand_at = |r: f64, s: f64| {
        let rho0 = input.rho0.value(r);
        let area = input.area.value(r);
        exp(input.d_const * s * s) / (rho0 * rho0 * area)
    };
    let mut prev_val = integrand_at(grid[0], 0.0);
    for (k, w) in grid.windows(2).enumerate() {
        let dr = w[1] - w[0];
        let p_mid = 0.5 * (sqrt(input.p.value(w[0]).max(0.0)) + sqrt(input.p.value(w[1]).max(0.0)));
        s_acc += p_mid * dr;
        let val = integrand_at(w[1], s_acc);
        if !val.is_finite() {
            return Err(AnalysisError::InvalidInput(format!(
                "integrand not finite at r = {}",
                w[1]
            )));
        }
        acc += 0.5 * (prev_val + val) * dr;
        prev_val = val;
        if (k + 1) % 64 == 0 {
            partials.push(acc);
        }
    }
    let mut notes = Vec::new();
    let verdict = classify_growth(&partials, th, &mut notes);
    Ok(ProbeReport { verdict, partials, notes })
}

/// Second growth condition: checks
/// `(∫_r^{3r/2} sqrt(p))^2 / (r log(rho0(2r)^2 vol(B(o,2r)))) >= h(r)`
/// samplewise, then classifies `∫ h` by per-decade increment contraction.
pub fn check_nonexistence_condition_2(
    input: &NonexistenceInput,
    th: &ProbeThresholds,
) -> Result<ProbeReport, AnalysisError> {
    input.validate()?;
    let h = input
        .h_nonexist
        .as_ref()
        .ok_or_else(|| AnalysisError::InvalidInput("condition 2 needs the comparison h".to_string()))?;

    // p identically zero forces h <= 0, contradicting positivity
    let p_mass = quad::integrate(
        &|s| sqrt(input.p.value(s).max(0.0)),
        input.r_lo,
        input.r_hi,
        (input.r_hi - input.r_lo) / 4096.0,
    );
    if p_mass <= 0.0 {
        return Err(AnalysisError::InvalidInput(
            "p vanishes on the probe range, so no positive h can satisfy the bound".to_string(),
        ));
    }

    let checkpoints = log_grid(input.r_lo, input.r_hi / 2.0, th.checkpoints, 1);
    let mut notes = Vec::new();

    // samplewise inequality, h positivity, h monotonicity
    let mut prev_h = f64::INFINITY;
    for &r in &checkpoints {
        let hv = h.value(r);
        if !(hv > 0.0) {
            return Err(AnalysisError::InvalidInput(format!("h({r}) = {hv} must be positive")));
        }
        if hv > prev_h * (1.0 + 1e-9) {
            return Err(AnalysisError::InvalidInput(format!(
                "h must be non-increasing; rises at r = {r}"
            )));
        }
        prev_h = hv;
        let num = quad::integrate(
            &|s| sqrt(input.p.value(s).max(0.0)),
            r,
            1.5 * r,
            r / 512.0,
        );
        let vol = quad::integrate(&|s| input.area.value(s), 1e-9, 2.0 * r, r / 256.0);
        let rho0 = input.rho0.value(2.0 * r);
        if !(rho0 * rho0 * vol).is_finite() {
            return Err(AnalysisError::InvalidInput(format!(
                "volume weight overflows at r = {r}; shrink the probe range"
            )));
        }
        let lhs = num * num / (r * log(rho0 * rho0 * vol));
        if !(lhs >= hv) {
            notes.push(format!("bound fails at r = {r}: lhs {lhs:.3e} < h {hv:.3e}"));
            return Ok(ProbeReport { verdict: ProbeVerdict::Violated, partials: Vec::new(), notes });
        }
    }

    // divergence of ∫ h by decade-increment contraction
    let decades = libm::log10(input.r_hi / input.r_lo) as usize;
    let mut increments = Vec::new();
    for d in 0..decades {
        let a = input.r_lo * pow(10.0, d as f64);
        let b = (a * 10.0).min(input.r_hi);
        increments.push(quad::integrate(&|s| h.value(s), a, b, (b - a) / 2048.0));
    }
    let mut partials = Vec::with_capacity(increments.len() + 1);
    partials.push(0.0);
    let mut acc = 0.0;
    for inc in &increments {
        acc += inc;
        partials.push(acc);
    }
    let ratios: Vec<f64> = increments.windows(2).map(|w| w[1] / w[0]).collect();
    notes.push(format!("decade increments of ∫h: {increments:?}"));
    let verdict = if ratios.iter().all(|&q| q <= th.contraction_ratio) {
        ProbeVerdict::Violated
    } else if ratios.iter().all(|&q| q >= th.sustain_ratio) {
        ProbeVerdict::Consistent
    } else {
        ProbeVerdict::Inconclusive
    };
    Ok(ProbeReport { verdict, partials, notes })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthCase {
    /// Polynomial warping and area: weight `r^2 log r`.
    I,
    /// Exponential growth: weight `r log r`.
    II,
    /// Gaussian-type growth: weight `log r`.
    III,
}

/// Empirical liminf proxy: the minimum over the outer decade of
/// `H(r) * weight(r) / rho0(r)`. Bounded solutions force the true liminf
/// to vanish, so a proxy bounded away from zero flags a non-existence
/// regime for that growth class.
pub fn corollary_liminf_probe(
    h: &dyn Radial,
    rho0: &dyn Radial,
    case: GrowthCase,
    r_hi: f64,
) -> f64 {
    let weight = |r: f64| match case {
        GrowthCase::I => r * r * log(r),
        GrowthCase::II => r * log(r),
        GrowthCase::III => log(r),
    };
    let mut min = f64::INFINITY;
    for i in 0..=256 {
        let r = r_hi / 10.0 + (r_hi - r_hi / 10.0) * i as f64 / 256.0;
        min = min.min(fabs(h.value(r)) * weight(r) / rho0.value(r));
    }
    min
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::RadialFunction;
    use crate::grid::PolarGrid;
    use crate::solver::{max_gradient, solve_dirichlet, DirichletProblem, SolverConfig};
    use approx::assert_relative_eq;

    #[test]
    fn curvature_constants_flat_and_hyperbolic() {
        let flat = ModelGeometry::euclidean(2, 5.0);
        let (k0, l) = curvature_bounds_on_ball(&flat, 0.0, 2.0);
        assert_eq!(k0, 0.0);
        assert_eq!(l, 0.0);
        let hyp = ModelGeometry::hyperbolic(2, 5.0);
        let (k0, l) = curvature_bounds_on_ball(&hyp, 0.0, 2.0);
        assert_relative_eq!(k0, 1.0, max_relative = 1e-12);
        // Ric = -g and Hess log cosh has eigenvalues in (0, 1]: l < 1
        assert!(l < 1.0 && l >= 0.0, "l = {l}");
    }

    #[test]
    fn gradient_bound_flat_disk_assembles() {
        let geom = ModelGeometry::euclidean(2, 5.0);
        let beta = suggest_beta(&geom, 0.0, 2.0).unwrap();
        let input = GradientBoundInput {
            r_p: 0.0,
            radius: 2.0,
            k0: 0.0,
            l_ric: 0.0,
            m_sup: 1.0,
            u_at_p: 0.5,
            sup_h: 0.0,
            sup_grad_h: 0.0,
            beta,
        };
        let bound = eval_interior_gradient_bound(&geom, &input).unwrap();
        assert!(bound.b.is_finite() && bound.b >= 0.0);
        assert_relative_eq!(bound.c_r, 2.0, max_relative = 1e-12);
        assert!(bound.mu > 0.0);
        // trivial sanity: a constant solution has zero gradient
        assert!(0.0 <= bound.gradient_cap());
    }

    #[test]
    fn gradient_bound_monotone_in_h_data() {
        let geom = ModelGeometry::hyperbolic(2, 5.0);
        let beta = suggest_beta(&geom, 0.0, 2.0).unwrap();
        let base = GradientBoundInput {
            r_p: 0.0,
            radius: 2.0,
            k0: 1.0,
            l_ric: 0.5,
            m_sup: 2.0,
            u_at_p: 1.0,
            sup_h: 0.3,
            sup_grad_h: 0.1,
            beta,
        };
        let b0 = eval_interior_gradient_bound(&geom, &base).unwrap().b;
        let more_h = GradientBoundInput { sup_h: 0.6, ..base.clone() };
        let b1 = eval_interior_gradient_bound(&geom, &more_h).unwrap().b;
        assert!(b1 >= b0);
        let more_dh = GradientBoundInput { sup_grad_h: 0.4, ..base.clone() };
        let b2 = eval_interior_gradient_bound(&geom, &more_dh).unwrap().b;
        assert!(b2 >= b0);
        // beta outside its interval is rejected
        let bad = GradientBoundInput { beta: 0.5, ..base };
        assert!(eval_interior_gradient_bound(&geom, &bad).is_err());
    }

    #[test]
    fn solver_solutions_respect_gradient_cap() {
        let geom = ModelGeometry::hyperbolic(2, 4.0);
        let grid = PolarGrid::new(2.0, 48, 24).unwrap();
        let problem = DirichletProblem::new(
            geom.clone(),
            grid,
            |_, _| 0.3,
            (0..24).map(|j| 0.5 * libm::cos(grid.theta(j))).collect(),
        )
        .unwrap();
        let sol = solve_dirichlet(&problem, &SolverConfig::default()).unwrap();
        let (grad_max, _) = max_gradient(&problem, &sol.u);

        // positive translate: the bound applies to positive solutions and
        // the gradient is translation-invariant
        let min_u = sol.u.values.iter().cloned().fold(f64::INFINITY, f64::min);
        let m_sup = sol.u.max_abs() - min_u + 1.0;
        let (k0, l_ric) = curvature_bounds_on_ball(&geom, 0.0, 2.0);
        let beta = suggest_beta(&geom, 0.0, 2.0).unwrap();
        let input = GradientBoundInput {
            r_p: 0.0,
            radius: 2.0,
            k0,
            l_ric,
            m_sup,
            u_at_p: sol.u.at(0, 0) - min_u + 1.0,
            sup_h: 0.3,
            sup_grad_h: 0.0,
            beta,
        };
        let bound = eval_interior_gradient_bound(&geom, &input).unwrap();
        assert!(
            grad_max <= bound.gradient_cap(),
            "discrete gradient {grad_max} exceeds cap {}",
            bound.gradient_cap()
        );
    }

    fn thresholds() -> ProbeThresholds {
        ProbeThresholds::default()
    }

    fn case_i_input() -> NonexistenceInput {
        NonexistenceInput {
            p: RadialFunction::power_log(1.0, -2.0, -1.0, 0.0).into_arc(),
            rho0: RadialFunction::power(1.0, 0.5).into_arc(),
            area: RadialFunction::power(1.0, 1.0).into_arc(),
            d_const: 1.0,
            h_nonexist: None,
            r_lo: 2.0,
            r_hi: 2000.0,
        }
    }

    #[test]
    fn condition_1_polynomial_divergence_is_consistent() {
        let rep = check_nonexistence_condition_1(&case_i_input(), &thresholds()).unwrap();
        assert_eq!(rep.verdict, ProbeVerdict::Consistent, "notes: {:?}", rep.notes);
        // stable under probe-range doubling
        let mut wider = case_i_input();
        wider.r_hi *= 2.0;
        let rep2 = check_nonexistence_condition_1(&wider, &thresholds()).unwrap();
        assert_eq!(rep2.verdict, ProbeVerdict::Consistent);
    }

    #[test]
    fn condition_1_integrable_tail_is_violated() {
        let input = NonexistenceInput {
            p: RadialFunction::constant(0.0).into_arc(),
            rho0: RadialFunction::exponential(1.0, 1.0).into_arc(),
            area: RadialFunction::exponential(1.0, 1.0).into_arc(),
            d_const: 1.0,
            h_nonexist: None,
            r_lo: 1.0,
            r_hi: 100.0,
        };
        let rep = check_nonexistence_condition_1(&input, &thresholds()).unwrap();
        assert_eq!(rep.verdict, ProbeVerdict::Violated, "notes: {:?}", rep.notes);
        let mut wider = input;
        wider.r_hi *= 2.0;
        let rep2 = check_nonexistence_condition_1(&wider, &thresholds()).unwrap();
        assert_eq!(rep2.verdict, ProbeVerdict::Violated);
    }

    #[test]
    fn condition_1_logarithmic_growth_is_inconclusive() {
        // integrand ~ 1/s: partial sums grow like log, neither Cauchy nor
        // threshold-crossing over two decades
        let input = NonexistenceInput {
            p: RadialFunction::constant(0.0).into_arc(),
            rho0: RadialFunction::power(1.0, 0.5).into_arc(),
            area: RadialFunction::constant(1.0).into_arc(),
            d_const: 1.0,
            h_nonexist: None,
            r_lo: 1.0,
            r_hi: 100.0,
        };
        let rep = check_nonexistence_condition_1(&input, &thresholds()).unwrap();
        assert_eq!(rep.verdict, ProbeVerdict::Inconclusive, "notes: {:?}", rep.notes);
    }

    #[test]
    fn condition_1_scale_aware() {
        // rescale r -> r/3 with matched profiles: verdict unchanged
        let lam = 3.0;
        struct Scaled {
            inner: RadialArc,
            lam: f64,
        }
        impl Radial for Scaled {
            fn value(&self, r: f64) -> f64 {
                self.inner.value(self.lam * r)
            }
            fn d1(&self, r: f64) -> f64 {
                self.lam * self.inner.d1(self.lam * r)
            }
            fn d2(&self, r: f64) -> f64 {
                self.lam * self.lam * self.inner.d2(self.lam * r)
            }
        }
        let base = case_i_input();
        let scaled = NonexistenceInput {
            p: alloc::sync::Arc::new(Scaled { inner: base.p.clone(), lam }),
            rho0: alloc::sync::Arc::new(Scaled { inner: base.rho0.clone(), lam }),
            area: alloc::sync::Arc::new(Scaled { inner: base.area.clone(), lam }),
            // the sqrt(p) integral contracts by 1/lam, so the matched
            // exponential weight rescales D by lam^2
            d_const: base.d_const * lam * lam,
            h_nonexist: None,
            r_lo: base.r_lo / lam,
            r_hi: base.r_hi / lam,
        };
        let v1 = check_nonexistence_condition_1(&base, &thresholds()).unwrap().verdict;
        let v2 = check_nonexistence_condition_1(&scaled, &thresholds()).unwrap().verdict;
        assert_eq!(v1, v2);
    }

    #[test]
    fn condition_2_exponential_volume_consistent() {
        // exponential warping and area with p = 1/(s log s): the comparison
        // integral decays like 1/(r log r), whose decade increments shrink
        // slowly (log log), i.e. sustained
        struct HComp;
        impl Radial for HComp {
            fn value(&self, r: f64) -> f64 {
                1e-4 / (r * log(r))
            }
            fn d1(&self, _r: f64) -> f64 {
                0.0
            }
            fn d2(&self, _r: f64) -> f64 {
                0.0
            }
        }
        let input = NonexistenceInput {
            p: RadialFunction::power_log(1.0, -1.0, -1.0, 0.0).into_arc(),
            rho0: RadialFunction::exponential(1.0, 0.01).into_arc(),
            area: RadialFunction::exponential(1.0, 0.02).into_arc(),
            d_const: 1.0,
            h_nonexist: Some(alloc::sync::Arc::new(HComp)),
            r_lo: 100.0,
            r_hi: 10_000.0,
        };
        let rep = check_nonexistence_condition_2(&input, &thresholds()).unwrap();
        assert_eq!(rep.verdict, ProbeVerdict::Consistent, "notes: {:?}", rep.notes);
    }

    #[test]
    fn condition_2_zero_p_is_input_error() {
        let input = NonexistenceInput {
            p: RadialFunction::constant(0.0).into_arc(),
            rho0: RadialFunction::exponential(1.0, 1.0).into_arc(),
            area: RadialFunction::exponential(1.0, 1.0).into_arc(),
            d_const: 1.0,
            h_nonexist: Some(RadialFunction::power(1.0, -1.0).into_arc()),
            r_lo: 2.0,
            r_hi: 200.0,
        };
        assert!(check_nonexistence_condition_2(&input, &thresholds()).is_err());
    }

    #[test]
    fn condition_2_gaussian_volume_consistent() {
        // Gaussian-type growth with p = 1/log s (corollary case iii)
        struct HComp;
        impl Radial for HComp {
            fn value(&self, r: f64) -> f64 {
                1e-4 / log(r)
            }
            fn d1(&self, _r: f64) -> f64 {
                0.0
            }
            fn d2(&self, _r: f64) -> f64 {
                0.0
            }
        }
        struct GaussArea;
        impl Radial for GaussArea {
            fn value(&self, r: f64) -> f64 {
                exp(0.004 * r * r)
            }
            fn d1(&self, r: f64) -> f64 {
                0.008 * r * exp(0.004 * r * r)
            }
            fn d2(&self, r: f64) -> f64 {
                (0.008 + 0.000064 * r * r) * exp(0.004 * r * r)
            }
        }
        let input = NonexistenceInput {
            p: RadialFunction::power_log(1.0, 0.0, -1.0, 0.0).into_arc(),
            rho0: alloc::sync::Arc::new(GaussArea),
            area: alloc::sync::Arc::new(GaussArea),
            d_const: 1.0,
            h_nonexist: Some(alloc::sync::Arc::new(HComp)),
            r_lo: 2.0,
            r_hi: 200.0,
        };
        let rep = check_nonexistence_condition_2(&input, &thresholds()).unwrap();
        assert_eq!(rep.verdict, ProbeVerdict::Consistent, "notes: {:?}", rep.notes);
    }

    #[test]
    fn liminf_probe_cases() {
        let rho0 = RadialFunction::power(1.0, 0.5);
        assert_eq!(
            corollary_liminf_probe(&RadialFunction::constant(0.0), &rho0, GrowthCase::I, 100.0),
            0.0
        );
        // exact cancellation by construction: H = 0.2 rho0 / (r^2 log r)
        struct Cancel {
            rho0: RadialFunction,
        }
        impl Radial for Cancel {
            fn value(&self, r: f64) -> f64 {
                0.2 * self.rho0.value(r) / (r * r * log(r))
            }
            fn d1(&self, _r: f64) -> f64 {
                0.0
            }
            fn d2(&self, _r: f64) -> f64 {
                0.0
            }
        }
        let probe = corollary_liminf_probe(
            &Cancel { rho0: RadialFunction::power(1.0, 0.5) },
            &rho0,
            GrowthCase::I,
            100.0,
        );
        assert_relative_eq!(probe, 0.2, max_relative = 1e-12);
        // case iii with an extra 1/r factor decays toward zero
        struct Decaying {
            rho0: RadialFunction,
        }
        impl Radial for Decaying {
            fn value(&self, r: f64) -> f64 {
                self.rho0.value(r) / (r * log(r))
            }
            fn d1(&self, _r: f64) -> f64 {
                0.0
            }
            fn d2(&self, _r: f64) -> f64 {
                0.0
            }
        }
        let p200 = corollary_liminf_probe(
            &Decaying { rho0: RadialFunction::power(1.0, 0.5) },
            &rho0,
            GrowthCase::III,
            200.0,
        );
        let p2000 = corollary_liminf_probe(
            &Decaying { rho0: RadialFunction::power(1.0, 0.5) },
            &rho0,
            GrowthCase::III,
            2000.0,
        );
        assert!(p2000 < p200, "proxy should decay: {p200} -> {p2000}");
    }
}
