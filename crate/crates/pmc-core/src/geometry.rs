//! Model-manifold kernel: radial profiles, Jacobi fields, warping functions,
//! Killing-cylinder curvature, and curvature-hypothesis validation.
//!
//! The base manifold is rotationally symmetric with metric
//! `dr^2 + xi^2(r) dtheta^2`; the graph direction is warped by a radial
//! `rho(r) > 0`. A comparison warping `rho_plus` dominated by `rho`
//! (`rho'/rho >= rho_plus'/rho_plus`) feeds the global barrier bounds.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use libm::{cosh, exp, fabs, floor, log, pow, sinh, sqrt};

use crate::report::{AssumptionCheck, BoundReport, ValidationReport};

/// Scalar profile of the geodesic radius with two derivative channels.
pub trait Radial {
    fn value(&self, r: f64) -> f64;
    /// First derivative.
    fn d1(&self, r: f64) -> f64;
    /// Second derivative.
    fn d2(&self, r: f64) -> f64;
}

/// Shareable profile handle; geometry objects are immutable after
/// construction and safe to read from any thread.
pub type RadialArc = Arc<dyn Radial + Send + Sync>;

impl Radial for RadialArc {
    fn value(&self, r: f64) -> f64 {
        self.as_ref().value(r)
    }
    fn d1(&self, r: f64) -> f64 {
        self.as_ref().d1(r)
    }
    fn d2(&self, r: f64) -> f64 {
        self.as_ref().d2(r)
    }
}

#[derive(Debug, Clone)]
pub enum GeometryError {
    /// A profile produced a non-finite (or out-of-precondition) sample.
    ProfileEvaluation { radius: f64 },
    /// The integrated quantity left the representable range.
    RangeOverflow { radius: f64 },
    /// Evaluation at the pole where `xi(0) = 0`.
    PoleSingularity,
    InvalidInput(String),
    /// A constructor rejected inputs violating a type invariant.
    InvariantViolation(String),
}

impl core::fmt::Display for GeometryError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Self::ProfileEvaluation { radius } => {
                write!(f, "profile evaluation failed at r = {radius}")
            }
            Self::RangeOverflow { radius } => {
                write!(f, "integrated value overflowed at r = {radius}")
            }
            Self::PoleSingularity => write!(f, "evaluation at the pole r = 0 (xi(0) = 0)"),
            Self::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Self::InvariantViolation(msg) => write!(f, "invariant violation: {msg}"),
        }
    }
}

impl core::error::Error for GeometryError {}

/// Closed-form and tabulated radial profiles.
///
/// Families: `constant`, `power` `c*r^p`, `exponential` `c*e^(k r)`,
/// `cosh`/`sinh` `c*cosh(k r)` / `c*sinh(k r)`, `power-log`
/// `c * r^p * (ln r)^q * e^(k r)`, and `tabulated` with Hermite
/// interpolation between stored derivative channels.
#[derive(Debug, Clone)]
pub enum RadialFunction {
    Constant { c: f64 },
    Power { c: f64, p: f64 },
    Exponential { c: f64, k: f64 },
    Cosh { c: f64, k: f64, p: f64 },
    Sinh { c: f64, k: f64, p: f64 },
    PowerLog { c: f64, p: f64, q: f64, k: f64 },
    Tabulated(Tabulated),
}

impl RadialFunction {
    pub fn constant(c: f64) -> Self {
        Self::Constant { c }
    }

    pub fn power(c: f64, p: f64) -> Self {
        Self::Power { c, p }
    }

    pub fn exponential(c: f64, k: f64) -> Self {
        Self::Exponential { c, k }
    }

    pub fn cosh(c: f64, k: f64) -> Self {
        Self::Cosh { c, k, p: 1.0 }
    }

    pub fn sinh(c: f64, k: f64) -> Self {
        Self::Sinh { c, k, p: 1.0 }
    }

    /// `c * cosh(k r)^p`.
    pub fn cosh_pow(c: f64, k: f64, p: f64) -> Self {
        Self::Cosh { c, k, p }
    }

    /// `c * sinh(k r)^p`.
    pub fn sinh_pow(c: f64, k: f64, p: f64) -> Self {
        Self::Sinh { c, k, p }
    }

    /// `c * r^p * (ln r)^q * e^(k r)`; the log factor requires `r > 1`
    /// unless `q = 0`.
    pub fn power_log(c: f64, p: f64, q: f64, k: f64) -> Self {
        Self::PowerLog { c, p, q, k }
    }

    /// Tabulated profile from bare samples; derivative channels are filled
    /// with monotone cubic slopes.
    pub fn from_samples(rs: Vec<f64>, v: Vec<f64>, tol: f64) -> Result<Self, GeometryError> {
        Ok(Self::Tabulated(Tabulated::from_samples(rs, v, tol)?))
    }

    pub fn into_arc(self) -> RadialArc {
        Arc::new(self)
    }
}

impl Radial for RadialFunction {
    fn value(&self, r: f64) -> f64 {
        match self {
            Self::Constant { c } => *c,
            Self::Power { c, p } => c * pow(r, *p),
            Self::Exponential { c, k } => c * exp(k * r),
            Self::Cosh { c, k, p } => {
                if *p == 1.0 {
                    c * cosh(k * r)
                } else {
                    c * pow(cosh(k * r), *p)
                }
            }
            Self::Sinh { c, k, p } => {
                if *p == 1.0 {
                    c * sinh(k * r)
                } else {
                    c * pow(sinh(k * r), *p)
                }
            }
            Self::PowerLog { c, p, q, k } => {
                let mut v = *c;
                if *p != 0.0 {
                    v *= pow(r, *p);
                }
                if *q != 0.0 {
                    v *= pow(log(r), *q);
                }
                if *k != 0.0 {
                    v *= exp(k * r);
                }
                v
            }
            Self::Tabulated(t) => t.value(r),
        }
    }

    fn d1(&self, r: f64) -> f64 {
        match self {
            Self::Constant { .. } => 0.0,
            Self::Power { c, p } => c * p * pow(r, p - 1.0),
            Self::Exponential { c, k } => c * k * exp(k * r),
            Self::Cosh { c, k, p } => {
                if *p == 1.0 {
                    c * k * sinh(k * r)
                } else {
                    c * p * k * pow(cosh(k * r), p - 1.0) * sinh(k * r)
                }
            }
            Self::Sinh { c, k, p } => {
                if *p == 1.0 {
                    c * k * cosh(k * r)
                } else {
                    c * p * k * pow(sinh(k * r), p - 1.0) * cosh(k * r)
                }
            }
            Self::PowerLog { p, q, k, .. } => {
                // logarithmic derivative p/r + q/(r ln r) + k
                let v = self.value(r);
                let mut g = *k;
                if *p != 0.0 {
                    g += p / r;
                }
                if *q != 0.0 {
                    g += q / (r * log(r));
                }
                v * g
            }
            Self::Tabulated(t) => t.d1(r),
        }
    }

    fn d2(&self, r: f64) -> f64 {
        match self {
            Self::Constant { .. } => 0.0,
            Self::Power { c, p } => c * p * (p - 1.0) * pow(r, p - 2.0),
            Self::Exponential { c, k } => c * k * k * exp(k * r),
            Self::Cosh { c, k, p } => {
                if *p == 1.0 {
                    c * k * k * cosh(k * r)
                } else {
                    let (ch, sh) = (cosh(k * r), sinh(k * r));
                    c * p * k * k
                        * ((p - 1.0) * pow(ch, p - 2.0) * sh * sh + pow(ch, *p))
                }
            }
            Self::Sinh { c, k, p } => {
                if *p == 1.0 {
                    c * k * k * sinh(k * r)
                } else {
                    let (ch, sh) = (cosh(k * r), sinh(k * r));
                    c * p * k * k
                        * ((p - 1.0) * pow(sh, p - 2.0) * ch * ch + pow(sh, *p))
                }
            }
            Self::PowerLog { p, q, k, .. } => {
                let v = self.value(r);
                let mut g = *k;
                let mut gp = 0.0;
                if *p != 0.0 {
                    g += p / r;
                    gp -= p / (r * r);
                }
                if *q != 0.0 {
                    let l = log(r);
                    g += q / (r * l);
                    gp -= q * (l + 1.0) / (r * r * l * l);
                }
                v * (g * g + gp)
            }
            Self::Tabulated(t) => t.d2(r),
        }
    }
}

/// Tabulated profile on an increasing grid; value and first derivative are
/// cubic Hermite interpolants of the stored channels, the second derivative
/// is interpolated linearly.
#[derive(Debug, Clone)]
pub struct Tabulated {
    rs: Vec<f64>,
    v: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
    /// Declared interpolation tolerance for the derivative channels,
    /// relative to the local value scale.
    pub tol: f64,
    uniform: Option<(f64, f64)>,
}

impl Tabulated {
    pub fn new(
        rs: Vec<f64>,
        v: Vec<f64>,
        d1: Vec<f64>,
        d2: Vec<f64>,
        tol: f64,
    ) -> Result<Self, GeometryError> {
        if rs.len() < 2 || v.len() != rs.len() || d1.len() != rs.len() || d2.len() != rs.len() {
            return Err(GeometryError::InvalidInput(
                "tabulated profile needs matching channels with >= 2 nodes".to_string(),
            ));
        }
        if !rs.windows(2).all(|w| w[1] > w[0]) {
            return Err(GeometryError::InvalidInput(
                "tabulated grid must be strictly increasing".to_string(),
            ));
        }
        for (i, r) in rs.iter().enumerate() {
            if !(r.is_finite() && v[i].is_finite() && d1[i].is_finite() && d2[i].is_finite()) {
                return Err(GeometryError::ProfileEvaluation { radius: *r });
            }
        }
        let h0 = rs[1] - rs[0];
        let uniform = rs
            .windows(2)
            .all(|w| fabs(w[1] - w[0] - h0) < 1e-9 * h0)
            .then_some((rs[0], h0));
        let t = Self { rs, v, d1, d2, tol, uniform };
        t.check_consistency()?;
        Ok(t)
    }

    pub fn from_samples(rs: Vec<f64>, v: Vec<f64>, tol: f64) -> Result<Self, GeometryError> {
        if rs.len() < 3 {
            return Err(GeometryError::InvalidInput(
                "need at least 3 samples".to_string(),
            ));
        }
        let d1 = monotone_slopes(&rs, &v);
        let n = rs.len();
        let mut d2 = Vec::with_capacity(n);
        for i in 0..n {
            let (lo, hi) = (i.saturating_sub(1), (i + 1).min(n - 1));
            d2.push((d1[hi] - d1[lo]) / (rs[hi] - rs[lo]));
        }
        Self::new(rs, v, d1, d2, tol)
    }

    /// Verifies that `d1` agrees with centered finite differences of the
    /// value channel to within the declared tolerance (sampled).
    fn check_consistency(&self) -> Result<(), GeometryError> {
        let n = self.rs.len();
        let stride = (n / 200).max(1);
        let mut i = 1;
        while i + 1 < n {
            let fd = (self.v[i + 1] - self.v[i - 1]) / (self.rs[i + 1] - self.rs[i - 1]);
            let scale = fabs(self.v[i]).max(fabs(fd)).max(1.0);
            if fabs(fd - self.d1[i]) > self.tol * scale {
                return Err(GeometryError::InvariantViolation(format!(
                    "derivative channel disagrees with finite differences at r = {} \
                     (fd {}, stored {})",
                    self.rs[i], fd, self.d1[i]
                )));
            }
            i += stride;
        }
        Ok(())
    }

    pub fn grid(&self) -> &[f64] {
        &self.rs
    }

    pub fn r_max(&self) -> f64 {
        self.rs[self.rs.len() - 1]
    }

    fn locate(&self, r: f64) -> usize {
        if let Some((r0, h)) = self.uniform {
            let i = floor((r - r0) / h) as isize;
            return i.clamp(0, self.rs.len() as isize - 2) as usize;
        }
        match self.rs.binary_search_by(|x| x.partial_cmp(&r).unwrap()) {
            Ok(i) => i.min(self.rs.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.rs.len() - 2),
        }
    }
}

impl Radial for Tabulated {
    fn value(&self, r: f64) -> f64 {
        let i = self.locate(r);
        hermite(self.rs[i], self.rs[i + 1], self.v[i], self.v[i + 1], self.d1[i], self.d1[i + 1], r)
    }

    fn d1(&self, r: f64) -> f64 {
        let i = self.locate(r);
        hermite(self.rs[i], self.rs[i + 1], self.d1[i], self.d1[i + 1], self.d2[i], self.d2[i + 1], r)
    }

    fn d2(&self, r: f64) -> f64 {
        let i = self.locate(r);
        let t = (r - self.rs[i]) / (self.rs[i + 1] - self.rs[i]);
        self.d2[i] * (1.0 - t) + self.d2[i + 1] * t
    }
}

/// Cubic Hermite evaluation on one cell; extrapolates with the cell cubic
/// outside `[a, b]`.
fn hermite(a: f64, b: f64, va: f64, vb: f64, da: f64, db: f64, r: f64) -> f64 {
    let h = b - a;
    let t = (r - a) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    va * (2.0 * t3 - 3.0 * t2 + 1.0)
        + da * h * (t3 - 2.0 * t2 + t)
        + vb * (-2.0 * t3 + 3.0 * t2)
        + db * h * (t3 - t2)
}

/// Fritsch-Carlson monotone cubic slopes.
fn monotone_slopes(rs: &[f64], v: &[f64]) -> Vec<f64> {
    let n = rs.len();
    let mut sec = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        sec.push((v[i + 1] - v[i]) / (rs[i + 1] - rs[i]));
    }
    let mut m = Vec::with_capacity(n);
    m.push(sec[0]);
    for i in 1..n - 1 {
        if sec[i - 1] * sec[i] <= 0.0 {
            m.push(0.0);
        } else {
            m.push(0.5 * (sec[i - 1] + sec[i]));
        }
    }
    m.push(sec[n - 2]);
    for i in 0..n - 1 {
        if sec[i] == 0.0 {
            m[i] = 0.0;
            m[i + 1] = 0.0;
        } else {
            let alpha = m[i] / sec[i];
            let beta = m[i + 1] / sec[i];
            let s = alpha * alpha + beta * beta;
            if s > 9.0 {
                let tau = 3.0 / sqrt(s);
                m[i] = tau * alpha * sec[i];
                m[i + 1] = tau * beta * sec[i];
            }
        }
    }
    m
}

/// Smooth two-sided blend: `lo` on `[0, t0]`, `hi` beyond `t1`, quintic
/// smoothstep mix in between. Used to supply the explicit transition
/// between the flat core and the curvature tail of a profile.
#[derive(Clone)]
pub struct Blend {
    pub lo: RadialArc,
    pub hi: RadialArc,
    pub t0: f64,
    pub t1: f64,
}

impl Blend {
    pub fn new(lo: RadialArc, hi: RadialArc, t0: f64, t1: f64) -> Result<Self, GeometryError> {
        if !(t1 > t0) {
            return Err(GeometryError::InvalidInput(
                "blend requires t1 > t0".to_string(),
            ));
        }
        Ok(Self { lo, hi, t0, t1 })
    }
}

impl Radial for Blend {
    fn value(&self, r: f64) -> f64 {
        if r <= self.t0 {
            self.lo.value(r)
        } else if r >= self.t1 {
            self.hi.value(r)
        } else {
            let x = (r - self.t0) / (self.t1 - self.t0);
            let s = smoothstep5(x);
            (1.0 - s) * self.lo.value(r) + s * self.hi.value(r)
        }
    }

    fn d1(&self, r: f64) -> f64 {
        if r <= self.t0 {
            self.lo.d1(r)
        } else if r >= self.t1 {
            self.hi.d1(r)
        } else {
            let w = self.t1 - self.t0;
            let x = (r - self.t0) / w;
            let s = smoothstep5(x);
            let sp = smoothstep5_d1(x) / w;
            (1.0 - s) * self.lo.d1(r) + s * self.hi.d1(r)
                + sp * (self.hi.value(r) - self.lo.value(r))
        }
    }

    fn d2(&self, r: f64) -> f64 {
        if r <= self.t0 {
            self.lo.d2(r)
        } else if r >= self.t1 {
            self.hi.d2(r)
        } else {
            let w = self.t1 - self.t0;
            let x = (r - self.t0) / w;
            let s = smoothstep5(x);
            let sp = smoothstep5_d1(x) / w;
            let spp = smoothstep5_d2(x) / (w * w);
            (1.0 - s) * self.lo.d2(r) + s * self.hi.d2(r)
                + 2.0 * sp * (self.hi.d1(r) - self.lo.d1(r))
                + spp * (self.hi.value(r) - self.lo.value(r))
        }
    }
}

fn smoothstep5(x: f64) -> f64 {
    x * x * x * (x * (6.0 * x - 15.0) + 10.0)
}

fn smoothstep5_d1(x: f64) -> f64 {
    30.0 * x * x * (x - 1.0) * (x - 1.0)
}

fn smoothstep5_d2(x: f64) -> f64 {
    60.0 * x * (2.0 * x - 1.0) * (x - 1.0)
}

/// Integrates the Jacobi equation `f'' = kappa^2 f`, `f(0) = 0`,
/// `f'(0) = 1` with a fixed-step classical fourth-order scheme on the
/// first-order system `(f, f')`. Returns a tabulated profile whose
/// derivative channels come from the integrator, not from differencing.
pub fn integrate_jacobi(
    kappa: &dyn Radial,
    r_max: f64,
    step: f64,
) -> Result<RadialFunction, GeometryError> {
    if !(step > 0.0) || !(r_max > 0.0) {
        return Err(GeometryError::InvalidInput(
            "integrate_jacobi requires r_max > 0 and step > 0".to_string(),
        ));
    }
    let steps = libm::ceil(r_max / step) as usize;
    let h = r_max / steps as f64;

    let k2 = |r: f64| -> Result<f64, GeometryError> {
        let k = kappa.value(r);
        if !k.is_finite() || k < 0.0 {
            return Err(GeometryError::ProfileEvaluation { radius: r });
        }
        Ok(k * k)
    };

    let mut rs = Vec::with_capacity(steps + 1);
    let mut f = Vec::with_capacity(steps + 1);
    let mut fp = Vec::with_capacity(steps + 1);
    let mut fpp = Vec::with_capacity(steps + 1);

    let (mut y, mut yp) = (0.0_f64, 1.0_f64);
    rs.push(0.0);
    f.push(y);
    fp.push(yp);
    fpp.push(0.0);

    const OVERFLOW_GUARD: f64 = 1e300;
    for i in 0..steps {
        let r = i as f64 * h;
        let (k_a, k_m, k_b) = (k2(r)?, k2(r + 0.5 * h)?, k2(r + h)?);

        let (k1y, k1p) = (yp, k_a * y);
        let (k2y, k2p) = (yp + 0.5 * h * k1p, k_m * (y + 0.5 * h * k1y));
        let (k3y, k3p) = (yp + 0.5 * h * k2p, k_m * (y + 0.5 * h * k2y));
        let (k4y, k4p) = (yp + h * k3p, k_b * (y + h * k3y));

        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        yp += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);

        let r_next = (i + 1) as f64 * h;
        if !y.is_finite() || !yp.is_finite() || fabs(y) > OVERFLOW_GUARD {
            return Err(GeometryError::RangeOverflow { radius: r_next });
        }
        rs.push(r_next);
        f.push(y);
        fp.push(yp);
        fpp.push(k_b * y);
    }

    let tol = (10.0 * h * h).max(1e-10);
    Ok(RadialFunction::Tabulated(Tabulated::new(rs, f, fp, fpp, tol)?))
}

/// Radial curvature corridor `-b^2 <= K <= -a^2` with the constants used by
/// the asymptotic hypothesis checks. On `[0, t0]` the upper-bound profile
/// `a` vanishes and `b` is constant; `t0 = 0` admits profiles that are
/// curved down to the pole.
#[derive(Clone)]
pub struct CurvatureProfile {
    pub a: RadialArc,
    pub b: RadialArc,
    pub t0: f64,
    pub t1: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub q: f64,
}

impl CurvatureProfile {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        a: RadialArc,
        b: RadialArc,
        t0: f64,
        t1: f64,
        c1: f64,
        c2: f64,
        c3: f64,
        c4: f64,
        q: f64,
        r_max: f64,
    ) -> Result<Self, GeometryError> {
        if !(t0 >= 0.0 && t1 >= t0) {
            return Err(GeometryError::InvalidInput("need 0 <= t0 <= t1".to_string()));
        }
        if !(c1 > 0.0 && c2 > 0.0 && c3 > 0.0 && c4 > 0.0) {
            return Err(GeometryError::InvalidInput(
                "constants C1..C4 must be positive".to_string(),
            ));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(GeometryError::InvalidInput("Q must lie in (0,1)".to_string()));
        }
        let samples = 512;
        for i in 0..=samples {
            let t = r_max * i as f64 / samples as f64;
            let (av, bv) = (a.value(t), b.value(t));
            if !av.is_finite() || !bv.is_finite() {
                return Err(GeometryError::ProfileEvaluation { radius: t });
            }
            if av > bv + 1e-12 * fabs(bv).max(1.0) {
                return Err(GeometryError::InvariantViolation(format!(
                    "a(t) > b(t) at t = {t}"
                )));
            }
            if t0 > 0.0 && t <= t0 {
                if fabs(av) > 1e-12 {
                    return Err(GeometryError::InvariantViolation(format!(
                        "a must vanish on [0, t0]; a({t}) = {av}"
                    )));
                }
                let b0 = b.value(0.0);
                if fabs(bv - b0) > 1e-10 * fabs(b0).max(1.0) {
                    return Err(GeometryError::InvariantViolation(format!(
                        "b must be constant on [0, t0]; b({t}) = {bv} vs b(0) = {b0}"
                    )));
                }
            }
        }
        Ok(Self { a, b, t0, t1, c1, c2, c3, c4, q })
    }
}

/// The model `M x_rho R`: base dimension, metric profile `xi` (the Jacobi
/// field of the curvature upper bound), warping `rho`, and the comparison
/// warping `rho_plus`.
#[derive(Clone)]
pub struct ModelGeometry {
    n: usize,
    xi: RadialArc,
    rho: RadialArc,
    rho_plus: RadialArc,
    profile: CurvatureProfile,
    r_max: f64,
}

impl ModelGeometry {
    pub fn new(
        n: usize,
        xi: RadialArc,
        rho: RadialArc,
        rho_plus: RadialArc,
        profile: CurvatureProfile,
        r_max: f64,
    ) -> Result<Self, GeometryError> {
        if n < 2 {
            return Err(GeometryError::InvalidInput(
                "base dimension must be >= 2".to_string(),
            ));
        }
        if !(r_max > 0.0) {
            return Err(GeometryError::InvalidInput("r_max must be positive".to_string()));
        }
        if fabs(xi.value(0.0)) > 1e-9 {
            return Err(GeometryError::InvariantViolation("xi(0) must be 0".to_string()));
        }
        if fabs(xi.d1(0.0) - 1.0) > 1e-6 {
            return Err(GeometryError::InvariantViolation("xi'(0) must be 1".to_string()));
        }
        let rho0 = rho.value(0.0);
        let rho_plus0 = rho_plus.value(0.0);
        if fabs(rho_plus0 - rho0) > 1e-9 * fabs(rho0).max(1.0) {
            return Err(GeometryError::InvariantViolation(format!(
                "rho_plus(0) = {rho_plus0} must equal rho(0) = {rho0}"
            )));
        }
        let samples = 512;
        let mut prev_rp = rho_plus0;
        for i in 0..=samples {
            let r = r_max * i as f64 / samples as f64;
            let (xv, rv, rp) = (xi.value(r), rho.value(r), rho_plus.value(r));
            if !xv.is_finite() || !rv.is_finite() || !rp.is_finite() {
                return Err(GeometryError::ProfileEvaluation { radius: r });
            }
            if r > 0.0 && xv <= 0.0 {
                return Err(GeometryError::InvariantViolation(format!(
                    "xi must be positive for r > 0; xi({r}) = {xv}"
                )));
            }
            if rv <= 0.0 || rp <= 0.0 {
                return Err(GeometryError::InvariantViolation(format!(
                    "warping functions must be positive; at r = {r}: rho = {rv}, rho_plus = {rp}"
                )));
            }
            if rp < prev_rp - 1e-12 * fabs(prev_rp) {
                return Err(GeometryError::InvariantViolation(format!(
                    "rho_plus must be non-decreasing; drops at r = {r}"
                )));
            }
            prev_rp = rp;
            // domination: d_r rho / rho >= rho_plus' / rho_plus
            let lhs = rho.d1(r) / rv;
            let rhs = rho_plus.d1(r) / rp;
            if lhs < rhs - 1e-10 * fabs(rhs).max(1.0) {
                return Err(GeometryError::InvariantViolation(format!(
                    "rho'/rho < rho_plus'/rho_plus at r = {r} ({lhs} < {rhs})"
                )));
            }
        }
        Ok(Self { n, xi, rho, rho_plus, profile, r_max })
    }

    /// Hyperbolic model: `xi = sinh`, `rho = rho_plus = cosh`, curvature
    /// corridor pinched at `-1`.
    pub fn hyperbolic(n: usize, r_max: f64) -> Self {
        let a = RadialFunction::constant(1.0).into_arc();
        let b = RadialFunction::constant(1.0).into_arc();
        let profile =
            CurvatureProfile::new(a, b, 0.0, 1.0, 1.0, 2.0, 0.5, 1.0, 0.5, r_max).expect("static");
        Self::new(
            n,
            RadialFunction::sinh(1.0, 1.0).into_arc(),
            RadialFunction::cosh(1.0, 1.0).into_arc(),
            RadialFunction::cosh(1.0, 1.0).into_arc(),
            profile,
            r_max,
        )
        .expect("static")
    }

    /// Flat model: `xi = r`, `rho = rho_plus = 1`.
    pub fn euclidean(n: usize, r_max: f64) -> Self {
        let a = RadialFunction::constant(0.0).into_arc();
        let b = RadialFunction::constant(0.0).into_arc();
        let profile = CurvatureProfile {
            a,
            b,
            t0: 0.0,
            t1: 1.0,
            c1: 1.0,
            c2: 1.0,
            c3: 1.0,
            c4: 1.0,
            q: 0.5,
        };
        Self::new(
            n,
            RadialFunction::power(1.0, 1.0).into_arc(),
            RadialFunction::constant(1.0).into_arc(),
            RadialFunction::constant(1.0).into_arc(),
            profile,
            r_max,
        )
        .expect("static")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    pub fn xi(&self) -> &RadialArc {
        &self.xi
    }

    pub fn rho(&self) -> &RadialArc {
        &self.rho
    }

    pub fn rho_plus(&self) -> &RadialArc {
        &self.rho_plus
    }

    pub fn profile(&self) -> &CurvatureProfile {
        &self.profile
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Mean curvature of the Killing cylinder over the geodesic sphere of
    /// radius `r`:
    /// `H_r = ((n-1) xi'/xi + rho'/rho) / n`.
    pub fn cylinder_mean_curvature(&self, r: f64) -> Result<f64, GeometryError> {
        if r <= 0.0 {
            return Err(GeometryError::PoleSingularity);
        }
        let xi = self.xi.value(r);
        let h = ((self.nf() - 1.0) * self.xi.d1(r) / xi + self.rho.d1(r) / self.rho.value(r))
            / self.nf();
        if !h.is_finite() {
            return Err(GeometryError::ProfileEvaluation { radius: r });
        }
        Ok(h)
    }

    /// Principal curvature of the Killing cylinder with respect to the
    /// inward direction (`grad d = -grad r`): `kappa(d) = -rho'/rho`.
    pub fn cylinder_principal_curvature(&self, r: f64) -> f64 {
        -self.rho.d1(r) / self.rho.value(r)
    }
}

/// Minimum margin of the local solvability bound
/// `n|H| < (n-1) f_a'/f_a + rho_plus'/rho_plus` over `(0, R]`.
///
/// The right side blows up like `(n-1)/r` at the pole, so the origin never
/// constrains the bound; sampling starts strictly inside.
pub fn check_local_h_bound(
    geom: &ModelGeometry,
    h: &dyn Radial,
    r_ball: f64,
) -> Result<BoundReport, GeometryError> {
    let samples = 2048;
    let mut min_margin = f64::INFINITY;
    let mut witness = 0.0;
    for i in 1..=samples {
        let r = r_ball * i as f64 / samples as f64;
        let hv = h.value(r);
        if !hv.is_finite() {
            return Err(GeometryError::ProfileEvaluation { radius: r });
        }
        let rhs = (geom.nf() - 1.0) * geom.xi.d1(r) / geom.xi.value(r)
            + geom.rho_plus.d1(r) / geom.rho_plus.value(r);
        let margin = rhs - geom.nf() * fabs(hv);
        if margin < min_margin {
            min_margin = margin;
            witness = r;
        }
    }
    Ok(BoundReport {
        name: "local cylinder bound".to_string(),
        min_margin,
        witness,
        samples,
        notes: Vec::new(),
    })
}

/// Heuristic for `q(t) -> 0`: over the final decade of the grid the samples
/// must be non-increasing and either drop below `1e-3` or contract to at
/// most `0.9x` their value at the start of the decade. Limits cannot be
/// certified numerically; the detail string records what was seen.
fn limit_check(name: &str, grid: &[f64], q: impl Fn(f64) -> f64) -> AssumptionCheck {
    let r_end = grid[grid.len() - 1];
    let lo = r_end / 10.0;
    let window: Vec<f64> = grid.iter().copied().filter(|&r| r >= lo).collect();
    if window.len() < 10 {
        return AssumptionCheck {
            name: name.to_string(),
            pass: false,
            witness: Some(r_end),
            detail: "fewer than 10 samples in the final decade".to_string(),
        };
    }
    let vals: Vec<f64> = window.iter().map(|&r| fabs(q(r))).collect();
    let mut monotone = true;
    let mut witness = None;
    for (i, w) in vals.windows(2).enumerate() {
        if w[1] > w[0] * (1.0 + 1e-9) + 1e-300 {
            monotone = false;
            witness = Some(window[i + 1]);
            break;
        }
    }
    let first = vals[0];
    let last = vals[vals.len() - 1];
    let decayed = last < 1e-3 || last <= 0.9 * first;
    AssumptionCheck {
        name: name.to_string(),
        pass: monotone && decayed,
        witness: if monotone && decayed { None } else { witness.or(Some(r_end)) },
        detail: format!(
            "final decade [{lo:.3}, {r_end:.3}]: start {first:.3e}, end {last:.3e}, monotone {monotone}"
        ),
    }
}

/// Checks the asymptotic curvature hypotheses (growth caps on `a`,
/// doubling/translation bounds and the power-law floor on `b`, and the two
/// limit conditions) on the supplied sample grid.
pub fn validate_assumptions(
    profile: &CurvatureProfile,
    sample_grid: &[f64],
) -> Result<ValidationReport, GeometryError> {
    if sample_grid.len() < 16 || !sample_grid.windows(2).all(|w| w[1] > w[0]) {
        return Err(GeometryError::InvalidInput(
            "sample grid must be strictly increasing with >= 16 points".to_string(),
        ));
    }
    let r_end = sample_grid[sample_grid.len() - 1];
    let a = &profile.a;
    let b = &profile.b;
    let mut checks = Vec::new();

    // b is assumed monotonic; constant b takes the non-decreasing branch.
    let b_decreasing = b.value(sample_grid[0]) > b.value(r_end) * (1.0 + 1e-9);

    // (1) tail law for a.
    {
        let mut pass = true;
        let mut witness = None;
        for &t in sample_grid.iter().filter(|&&t| t >= profile.t1) {
            let at = a.value(t) * t;
            let ok = if b_decreasing {
                fabs(at - profile.c1) <= 1e-8 * profile.c1
            } else {
                at >= profile.c1 * (1.0 - 1e-12)
            };
            if !ok {
                pass = false;
                witness = Some(t);
                break;
            }
        }
        checks.push(AssumptionCheck {
            name: "A1".to_string(),
            pass,
            witness,
            detail: format!(
                "a(t)*t {} C1 = {} for t >= {} (b {})",
                if b_decreasing { "=" } else { ">=" },
                profile.c1,
                profile.t1,
                if b_decreasing { "decreasing" } else { "non-decreasing" }
            ),
        });
    }

    // (2) a bounded.
    {
        let bad = sample_grid
            .iter()
            .find(|&&t| a.value(t) > profile.c2 * (1.0 + 1e-12));
        checks.push(AssumptionCheck {
            name: "A2".to_string(),
            pass: bad.is_none(),
            witness: bad.copied(),
            detail: format!("a <= C2 = {}", profile.c2),
        });
    }

    // (3) translation doubling of b.
    {
        let bad = sample_grid
            .iter()
            .filter(|&&t| t + 1.0 <= r_end)
            .find(|&&t| b.value(t + 1.0) > profile.c2 * b.value(t) * (1.0 + 1e-12));
        checks.push(AssumptionCheck {
            name: "A3".to_string(),
            pass: bad.is_none(),
            witness: bad.copied(),
            detail: format!("b(t+1) <= C2 b(t), C2 = {}", profile.c2),
        });
    }

    // (4) halving bound on b.
    {
        let bad = sample_grid
            .iter()
            .find(|&&t| b.value(t / 2.0) > profile.c2 * b.value(t) * (1.0 + 1e-12));
        checks.push(AssumptionCheck {
            name: "A4".to_string(),
            pass: bad.is_none(),
            witness: bad.copied(),
            detail: format!("b(t/2) <= C2 b(t), C2 = {}", profile.c2),
        });
    }

    // (5) power-law floor on b.
    {
        let bad = sample_grid
            .iter()
            .find(|&&t| b.value(t) < profile.c3 * pow(1.0 + t, -profile.q) * (1.0 - 1e-12));
        checks.push(AssumptionCheck {
            name: "A5".to_string(),
            pass: bad.is_none(),
            witness: bad.copied(),
            detail: format!("b >= C3 (1+t)^-Q, C3 = {}, Q = {}", profile.c3, profile.q),
        });
    }

    // (6) b'/b^2 -> 0.
    checks.push(limit_check("A6", sample_grid, |t| {
        let bv = b.value(t);
        b.d1(t) / (bv * bv)
    }));

    // (7) t^(1+C4) b / f_a' -> 0.
    {
        let fa = integrate_jacobi(a.as_ref(), r_end, (r_end / 20_000.0).min(1e-3))?;
        checks.push(limit_check("A7", sample_grid, |t| {
            pow(t, 1.0 + profile.c4) * b.value(t) / fa.d1(t)
        }));
    }

    Ok(ValidationReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_relative_eq;

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
    }

    #[test]
    fn jacobi_flat_is_exact() {
        // zero truncation error; only summation rounding remains
        let f = integrate_jacobi(&RadialFunction::constant(0.0), 5.0, 1e-3).unwrap();
        for &r in &[0.0, 0.5, 1.0, 3.0, 5.0] {
            assert_relative_eq!(f.value(r), r, max_relative = 1e-12, epsilon = 1e-13);
            assert_relative_eq!(f.d1(r), 1.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn jacobi_constant_curvature_matches_sinh() {
        let k = 1.3;
        let f = integrate_jacobi(&RadialFunction::constant(k), 10.0, 1e-3).unwrap();
        let mut max_rel = 0.0_f64;
        for i in 1..=100 {
            let r = 0.1 * i as f64;
            let exact = sinh(k * r) / k;
            max_rel = max_rel.max(fabs(f.value(r) - exact) / exact);
        }
        assert!(max_rel <= 1e-8, "max relative error {max_rel}");
        // residual substitution: d2 channel equals k^2 f
        for &r in &[0.5, 2.0, 7.5] {
            assert_relative_eq!(f.d2(r), k * k * f.value(r), max_relative = 1e-6);
        }
    }

    #[test]
    fn jacobi_inverse_linear_tail_closed_form() {
        // a(t) = C1/t beyond t = 1 gives f_a(t) = c1 t^phi + c2 t^(1-phi)
        // with the constants determined by the data at t = 1.
        let phi = 2.0_f64;
        let c1_const = sqrt(phi * (phi - 1.0));
        let tail = RadialFunction::power(c1_const, -1.0).into_arc();
        let a = Blend::new(
            RadialFunction::constant(0.0).into_arc(),
            tail,
            0.5,
            1.0,
        )
        .unwrap();
        let f = integrate_jacobi(&a, 20.0, 1e-3).unwrap();
        let (f1, fp1) = (f.value(1.0), f.d1(1.0));
        let c1 = (f1 * (phi - 1.0) + fp1) / (2.0 * phi - 1.0);
        let c2 = (f1 * phi - fp1) / (2.0 * phi - 1.0);
        let mut max_rel = 0.0_f64;
        for i in 0..=190 {
            let t = 1.0 + 0.1 * i as f64;
            let exact = c1 * t * t + c2 / t;
            max_rel = max_rel.max(fabs(f.value(t) - exact) / exact);
        }
        assert!(max_rel <= 1e-6, "max relative error {max_rel}");
    }

    #[test]
    fn jacobi_rejects_bad_kappa() {
        let err = integrate_jacobi(&RadialFunction::constant(-1.0), 1.0, 1e-2).unwrap_err();
        assert!(matches!(err, GeometryError::ProfileEvaluation { .. }));
        // sinh(40 r) overflows before r = 20
        let err = integrate_jacobi(&RadialFunction::constant(40.0), 20.0, 1e-3).unwrap_err();
        match err {
            GeometryError::RangeOverflow { radius } => assert!(radius > 0.0 && radius < 20.0),
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn jacobi_positivity_and_sturm_comparison() {
        let f1 = integrate_jacobi(&RadialFunction::constant(0.5), 8.0, 1e-3).unwrap();
        let f2 = integrate_jacobi(&RadialFunction::constant(1.5), 8.0, 1e-3).unwrap();
        let mut prev1 = 0.0;
        for i in 1..=80 {
            let r = 0.1 * i as f64;
            let v1 = f1.value(r);
            assert!(v1 > prev1, "f strictly increasing");
            assert!(f1.d2(r) >= 0.0, "f convex");
            assert!(v1 <= f2.value(r) * (1.0 + 1e-12), "monotone in kappa at r = {r}");
            prev1 = v1;
        }
    }

    #[test]
    fn cylinder_mean_curvature_hyperbolic() {
        let geom = ModelGeometry::hyperbolic(2, 10.0);
        let exact = (1.0 / libm::tanh(1.0) + libm::tanh(1.0)) / 2.0;
        assert_relative_eq!(geom.cylinder_mean_curvature(1.0).unwrap(), exact, max_relative = 1e-14);
        // limit H_r -> 1 for any n
        for n in [2usize, 3, 5] {
            let g = ModelGeometry::hyperbolic(n, 40.0);
            let h = g.cylinder_mean_curvature(35.0).unwrap();
            assert!(fabs(h - 1.0) < 1e-12, "H_r -> 1, got {h}");
        }
        assert!(matches!(
            geom.cylinder_mean_curvature(0.0),
            Err(GeometryError::PoleSingularity)
        ));
    }

    #[test]
    fn cylinder_mean_curvature_euclidean() {
        let geom = ModelGeometry::euclidean(2, 10.0);
        assert_relative_eq!(geom.cylinder_mean_curvature(2.0).unwrap(), 0.25, max_relative = 1e-14);
    }

    #[test]
    fn cylinder_consistency_from_channels() {
        let geom = ModelGeometry::hyperbolic(3, 10.0);
        for &r in &[0.3, 1.0, 2.5, 8.0] {
            let direct = geom.cylinder_mean_curvature(r).unwrap();
            let xi = geom.xi();
            let rho = geom.rho();
            let recomputed =
                (2.0 * xi.d1(r) / xi.value(r) + rho.d1(r) / rho.value(r)) / 3.0;
            assert_relative_eq!(direct, recomputed, max_relative = 1e-12);
        }
    }

    #[test]
    fn geometry_constructor_rejects_domination_violation() {
        // rho constant but rho_plus growing: rho'/rho = 0 < rho_plus'/rho_plus
        let a = RadialFunction::constant(0.0).into_arc();
        let b = RadialFunction::constant(0.0).into_arc();
        let profile = CurvatureProfile {
            a,
            b,
            t0: 0.0,
            t1: 1.0,
            c1: 1.0,
            c2: 1.0,
            c3: 1.0,
            c4: 1.0,
            q: 0.5,
        };
        let res = ModelGeometry::new(
            2,
            RadialFunction::power(1.0, 1.0).into_arc(),
            RadialFunction::constant(1.0).into_arc(),
            RadialFunction::cosh(1.0, 1.0).into_arc(),
            profile,
            5.0,
        );
        assert!(matches!(res, Err(GeometryError::InvariantViolation(_))));
    }

    #[test]
    fn local_h_bound_hyperbolic() {
        let geom = ModelGeometry::hyperbolic(2, 10.0);
        let ok = check_local_h_bound(&geom, &RadialFunction::constant(0.5), 5.0).unwrap();
        assert!(ok.admissible(), "margin {}", ok.min_margin);
        let zero = check_local_h_bound(&geom, &RadialFunction::constant(0.0), 5.0).unwrap();
        assert!(zero.admissible() && zero.min_margin > 0.0);
        let bad = check_local_h_bound(&geom, &RadialFunction::constant(1.2), 5.0).unwrap();
        assert!(!bad.admissible(), "margin {}", bad.min_margin);
        assert!(bad.witness > 2.0, "violation shows up at large r, got {}", bad.witness);
    }

    #[test]
    fn assumptions_pass_for_exponential_corridor() {
        // a = k, b(t) = t^(-1-eps/2) e^(kt) beyond R0, constant-bridged core.
        let k = 1.0;
        let eps = 1.0;
        let r0 = 2.0;
        let b_tail = RadialFunction::power_log(1.0, -1.0 - eps / 2.0, 0.0, k).into_arc();
        let b0 = b_tail.value(r0);
        let b = Blend::new(RadialFunction::constant(b0).into_arc(), b_tail, 1.0, r0).unwrap();
        let c1 = 2.0;
        let profile = CurvatureProfile {
            a: RadialFunction::constant(k).into_arc(),
            b: Arc::new(b),
            t0: 0.0,
            t1: c1 / k,
            c1,
            c2: 8.0,
            c3: 0.05,
            c4: 0.25,
            q: 0.5,
        };
        let report = validate_assumptions(&profile, &grid(0.1, 30.0, 300)).unwrap();
        for c in &report.checks {
            assert!(c.pass, "{} failed: {} (witness {:?})", c.name, c.detail, c.witness);
        }
    }

    #[test]
    fn assumptions_pass_for_constant_corridor() {
        let k = 1.0;
        let profile = CurvatureProfile {
            a: RadialFunction::constant(k).into_arc(),
            b: RadialFunction::constant(k).into_arc(),
            t0: 0.0,
            t1: 1.0,
            c1: 1.0,
            c2: 1.5,
            c3: 0.5,
            c4: 1.0,
            q: 0.5,
        };
        let report = validate_assumptions(&profile, &grid(0.1, 25.0, 250)).unwrap();
        for c in &report.checks {
            assert!(c.pass, "{} failed: {}", c.name, c.detail);
        }
        // A6 quantity is exactly zero for constant b
        assert!(report.check("A6").unwrap().pass);
    }

    #[test]
    fn assumption_a5_fails_for_slow_floor() {
        // b(t) = 1/(1+t) sinks below C3 (1+t)^-Q for every Q < 1.
        let profile = CurvatureProfile {
            a: RadialFunction::constant(0.0).into_arc(),
            b: RadialFunction::power_log(1.0, 0.0, 0.0, 0.0).into_arc(),
            t0: 0.0,
            t1: 1.0,
            c1: 1.0,
            c2: 2.0,
            c3: 0.5,
            c4: 1.0,
            q: 0.5,
        };
        // hand-rolled 1/(1+t) profile
        struct InvShift;
        impl Radial for InvShift {
            fn value(&self, r: f64) -> f64 {
                1.0 / (1.0 + r)
            }
            fn d1(&self, r: f64) -> f64 {
                -1.0 / ((1.0 + r) * (1.0 + r))
            }
            fn d2(&self, r: f64) -> f64 {
                2.0 / ((1.0 + r) * (1.0 + r) * (1.0 + r))
            }
        }
        let profile = CurvatureProfile { b: Arc::new(InvShift), ..profile };
        let report = validate_assumptions(&profile, &grid(0.1, 200.0, 400)).unwrap();
        let a5 = report.check("A5").unwrap();
        assert!(!a5.pass);
        assert!(a5.witness.is_some());
    }

    #[test]
    fn tabulated_consistency_guard() {
        // deliberately corrupt derivative channel
        let rs = vec![0.0, 1.0, 2.0, 3.0];
        let v = vec![0.0, 1.0, 4.0, 9.0];
        let d1 = vec![0.0, 5.0, 4.0, 6.0];
        let d2 = vec![2.0, 2.0, 2.0, 2.0];
        assert!(Tabulated::new(rs, v, d1, d2, 1e-3).is_err());
    }

    #[test]
    fn blend_is_smooth_at_joints() {
        let tail = RadialFunction::power(2.0, -1.0).into_arc();
        let a = Blend::new(RadialFunction::constant(0.0).into_arc(), tail, 0.5, 1.0).unwrap();
        // value and first two derivatives continuous at the joints
        for &t in &[0.5, 1.0] {
            let (lo, hi) = (t - 1e-7, t + 1e-7);
            assert!(fabs(a.value(lo) - a.value(hi)) < 1e-5);
            assert!(fabs(a.d1(lo) - a.d1(hi)) < 1e-4);
            assert!(fabs(a.d2(lo) - a.d2(hi)) < 1e-2);
        }
        // and the finite difference of d1 matches d2 inside the bridge
        let t = 0.75;
        let fd = (a.d1(t + 1e-5) - a.d1(t - 1e-5)) / 2e-5;
        assert_relative_eq!(fd, a.d2(t), max_relative = 1e-4);
    }
}
