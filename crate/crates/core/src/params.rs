//! Problem parameters and every closed-form constant derived from them.
//!
//! All Gamma-function evaluations run in log space so that dimension-like
//! arguments up to `1e6` stay finite.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::funcspace::Bubble;
use crate::functionals;
use crate::quadrature::QuadratureSpec;

/// Outer radius `T` of the transformed ball; `Infinite` is the whole space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OuterRadius {
    Finite(f64),
    Infinite,
}

impl OuterRadius {
    /// `T^{-e}` with the convention `1/inf = 0`.
    pub fn inv_pow(self, e: f64) -> f64 {
        match self {
            OuterRadius::Finite(t) => t.powf(-e),
            OuterRadius::Infinite => 0.0,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, OuterRadius::Infinite)
    }

    pub fn as_f64(self) -> f64 {
        match self {
            OuterRadius::Finite(t) => t,
            OuterRadius::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for OuterRadius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OuterRadius::Finite(t) => write!(f, "{t}"),
            OuterRadius::Infinite => write!(f, "inf"),
        }
    }
}

/// Unvalidated parameter tuple, as read from a command line or config file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawParams {
    pub n: u32,
    pub p: f64,
    pub s: f64,
    pub radius: f64,
    pub a: f64,
    pub outer: Option<OuterRadius>,
}

/// Validated `(N, p, s, R, a, T)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    pub n: u32,
    pub p: f64,
    pub s: f64,
    pub radius: f64,
    pub a: f64,
    pub outer: OuterRadius,
}

/// Checks every admissibility constraint and names the first violated one.
pub fn validate(raw: RawParams) -> Result<ProblemParams> {
    let RawParams {
        n,
        p,
        s,
        radius,
        a,
        outer,
    } = raw;
    let bad = |msg: &str| Err(Error::InvalidParams(msg.to_string()));
    if n < 2 {
        return bad("N >= 2 violated");
    }
    if !p.is_finite() || p <= 1.0 {
        return bad("p > 1 violated");
    }
    if p >= n as f64 {
        return bad("p < N violated");
    }
    if !s.is_finite() || s < 0.0 {
        return bad("s >= 0 violated");
    }
    if s > p {
        return bad("s <= p violated");
    }
    if !radius.is_finite() || radius <= 0.0 {
        return bad("R > 0 violated");
    }
    if !a.is_finite() || !(0.0..=1.0).contains(&a) {
        return bad("0 <= a <= 1 violated");
    }
    let outer = outer.unwrap_or(OuterRadius::Finite(radius));
    if let OuterRadius::Finite(t) = outer {
        if t.is_nan() || t < radius {
            return bad("T >= R violated");
        }
    }
    Ok(ProblemParams {
        n,
        p,
        s,
        radius,
        a,
        outer,
    })
}

impl ProblemParams {
    pub fn new(n: u32, p: f64, s: f64, radius: f64, a: f64) -> Result<Self> {
        validate(RawParams {
            n,
            p,
            s,
            radius,
            a,
            outer: None,
        })
    }

    pub fn with_a(mut self, a: f64) -> Result<Self> {
        self.a = a;
        validate(self.raw())
    }

    pub fn with_s(mut self, s: f64) -> Result<Self> {
        self.s = s;
        validate(self.raw())
    }

    pub fn with_outer(mut self, outer: OuterRadius) -> Result<Self> {
        self.outer = outer;
        validate(self.raw())
    }

    pub fn raw(&self) -> RawParams {
        RawParams {
            n: self.n,
            p: self.p,
            s: self.s,
            radius: self.radius,
            a: self.a,
            outer: Some(self.outer),
        }
    }

    pub fn dim(&self) -> f64 {
        self.n as f64
    }

    /// `(N - p)/(p - 1)`, the exponent of the p-Laplacian fundamental solution.
    pub fn fundamental_exponent(&self) -> f64 {
        (self.dim() - self.p) / (self.p - 1.0)
    }

    pub fn beta(&self) -> f64 {
        let n = self.dim();
        ((n - 1.0) * self.p - (self.p - 1.0) * self.s) / (n - self.p)
    }

    pub fn p_star(&self) -> f64 {
        self.p * (self.dim() - self.s) / (self.dim() - self.p)
    }

    /// `((N - p)/p)^p`, the Hardy constant.
    pub fn hardy_constant(&self) -> f64 {
        ((self.dim() - self.p) / self.p).powf(self.p)
    }

    /// `s(p-1)/(p(N-1))`: up to this value of `a` the potential is radially decreasing.
    pub fn rearrange_threshold(&self) -> f64 {
        self.s * (self.p - 1.0) / (self.p * (self.dim() - 1.0))
    }

    /// Value of `a` matching the outer radius: `1 - (R/T)^{(N-p)/(p-1)}`.
    pub fn a_from_outer(&self) -> f64 {
        match self.outer {
            OuterRadius::Infinite => 1.0,
            OuterRadius::Finite(t) => 1.0 - (self.radius / t).powf(self.fundamental_exponent()),
        }
    }

    pub fn sphere_area(&self) -> f64 {
        sphere_area(self.dim())
    }
}

/// `ln |S^{k-1}| = ln(k pi^{k/2} / Gamma(1 + k/2))`, for real `k > 0`.
pub fn ln_sphere_area(k: f64) -> f64 {
    k.ln() + 0.5 * k * PI.ln() - ln_gamma(1.0 + 0.5 * k)
}

/// Area of the unit sphere in `R^k`.
pub fn sphere_area(k: f64) -> f64 {
    ln_sphere_area(k).exp()
}

/// Natural log of the Gamma function (positive real arguments).
pub fn ln_gamma_pos(x: f64) -> f64 {
    ln_gamma(x)
}

/// Sobolev's best constant `C_{m,p,0}` in `R^m`, for real `m > p > 1`.
pub fn sobolev_constant(m: f64, p: f64) -> Result<f64> {
    Ok(ln_sobolev_constant(m, p)?.exp())
}

pub fn ln_sobolev_constant(m: f64, p: f64) -> Result<f64> {
    if !(p > 1.0) || !(m > p) {
        return Err(Error::InvalidParams(format!(
            "sobolev constant needs 1 < p < m, got m = {m}, p = {p}"
        )));
    }
    let gammas =
        ln_gamma(m / p) + ln_gamma(m + 1.0 - m / p) - ln_gamma(m) - ln_gamma(1.0 + 0.5 * m);
    Ok(0.5 * p * PI.ln() + m.ln() + (p - 1.0) * ((m - p) / (p - 1.0)).ln() + (p / m) * gammas)
}

/// Best constant `C_{N,p,s}` of the classical Hardy-Sobolev inequality.
///
/// For `s = p` this is the Hardy constant. Otherwise the constant is the
/// whole-space Rayleigh quotient of the extremal profile `W_1`.
pub fn hardy_sobolev_constant(params: &ProblemParams, spec: &QuadratureSpec) -> Result<f64> {
    if params.s == params.p {
        return Ok(params.hardy_constant());
    }
    let bubble = Bubble::new(params, 1.0)?;
    let report = functionals::whole_space_quotient(&bubble, params, spec)?;
    Ok(report.quotient)
}

/// Threshold `A` below which symmetry breaking cannot occur, as the root of
/// `V_A(R) = V_1(R_1)` in closed form. Requires `0 < s < p`.
pub fn threshold_a(params: &ProblemParams) -> Result<f64> {
    let k = check_breaking_regime(params)?;
    let e = params.s / (params.fundamental_exponent() * params.beta());
    Ok(1.0 - k.powf(e) * (1.0 - k))
}

/// The threshold formula with exponent `s / beta`; coincides with
/// [`threshold_a`] exactly when `N = 2p - 1`.
pub fn threshold_a_printed(params: &ProblemParams) -> Result<f64> {
    let k = check_breaking_regime(params)?;
    Ok(1.0 - k.powf(params.s / params.beta()) * (1.0 - k))
}

/// `A` by bisection on `ln V_a(R) - ln V_1(R_1)`, tolerance `1e-12`.
pub fn threshold_a_by_root(params: &ProblemParams) -> Result<f64> {
    check_breaking_regime(params)?;
    let one = params.with_a(1.0)?;
    let r1 = critical_radius(&one)?;
    let target = functionals::potential(r1, &one)?.ln();
    let excess = |a: f64| -> f64 {
        // ln V_a(R) = -s ln R - beta ln(1 - a)
        -params.s * params.radius.ln() - params.beta() * (1.0 - a).ln() - target
    };
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64 - 1e-15);
    if excess(lo) > 0.0 || excess(hi) < 0.0 {
        return Err(Error::Mismatch(
            "V_a(R) = V_1(R_1) has no root in [0, 1)".into(),
        ));
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if excess(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// [`threshold_a`] checked against [`threshold_a_by_root`]; disagreement
/// beyond `1e-9` is an error.
pub fn threshold_a_checked(params: &ProblemParams) -> Result<f64> {
    let closed = threshold_a(params)?;
    let root = threshold_a_by_root(params)?;
    if (closed - root).abs() > 1e-9 {
        return Err(Error::Mismatch(format!(
            "threshold A: closed form {closed} vs root {root}"
        )));
    }
    Ok(closed)
}

/// Radius `R_a` of the unique critical point of `V_a` (its minimum).
///
/// Lies inside `(0, R]` iff `a >= s(p-1)/(p(N-1))`.
pub fn critical_radius(params: &ProblemParams) -> Result<f64> {
    if !(params.s > 0.0 && params.s < params.p) {
        return Err(Error::Domain("critical radius needs 0 < s < p".into()));
    }
    if params.a <= 0.0 {
        return Err(Error::Domain("critical radius needs a > 0".into()));
    }
    let k = params.rearrange_threshold();
    Ok((k / params.a).powf(1.0 / params.fundamental_exponent()) * params.radius)
}

fn check_breaking_regime(params: &ProblemParams) -> Result<f64> {
    if !(params.s > 0.0 && params.s < params.p) {
        return Err(Error::Domain(
            "threshold A is defined only for 0 < s < p".into(),
        ));
    }
    Ok(params.rearrange_threshold())
}

/// Every constant the `constants` subcommand reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    pub beta: f64,
    pub p_star: f64,
    pub hardy_const: f64,
    pub rearrange_threshold: f64,
    pub sphere_area: f64,
    pub best_constant: f64,
    pub best_constant_err: f64,
    pub sobolev_constant: f64,
    pub a_threshold: Option<f64>,
    pub a_threshold_printed: Option<f64>,
    pub critical_radius: Option<f64>,
}

pub fn derived_constants(
    params: &ProblemParams,
    spec: &QuadratureSpec,
) -> Result<DerivedConstants> {
    let (best, best_err) = if params.s == params.p {
        (params.hardy_constant(), 0.0)
    } else {
        let bubble = Bubble::new(params, 1.0)?;
        let r = functionals::whole_space_quotient(&bubble, params, spec)?;
        (r.quotient, r.quotient_err)
    };
    let breaking = params.s > 0.0 && params.s < params.p;
    let critical = if breaking && params.a > 0.0 {
        Some(critical_radius(params)?)
    } else {
        None
    };
    Ok(DerivedConstants {
        beta: params.beta(),
        p_star: params.p_star(),
        hardy_const: params.hardy_constant(),
        rearrange_threshold: params.rearrange_threshold(),
        sphere_area: params.sphere_area(),
        best_constant: best,
        best_constant_err: best_err,
        sobolev_constant: sobolev_constant(params.dim(), params.p)?,
        a_threshold: if breaking {
            Some(threshold_a_checked(params)?)
        } else {
            None
        },
        a_threshold_printed: if breaking {
            Some(threshold_a_printed(params)?)
        } else {
            None
        },
        critical_radius: critical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3(s: f64) -> ProblemParams {
        ProblemParams::new(3, 2.0, s, 1.0, 0.5).unwrap()
    }

    #[test]
    fn validation_names_the_violated_bound() {
        assert!(ProblemParams::new(3, 2.0, 1.0, 1.0, 0.5).is_ok());
        let e = ProblemParams::new(3, 3.0, 1.0, 1.0, 0.5).unwrap_err();
        assert_eq!(e, Error::InvalidParams("p < N violated".into()));
        let e = ProblemParams::new(3, 2.0, 2.5, 1.0, 0.5).unwrap_err();
        assert_eq!(e, Error::InvalidParams("s <= p violated".into()));
        assert!(ProblemParams::new(1, 0.5, 0.0, 1.0, 0.0).is_err());
        assert!(ProblemParams::new(3, 2.0, 1.0, -1.0, 0.0).is_err());
        assert!(ProblemParams::new(3, 2.0, 1.0, 1.0, 1.5).is_err());
        let raw = RawParams {
            n: 3,
            p: 2.0,
            s: 1.0,
            radius: 2.0,
            a: 0.0,
            outer: Some(OuterRadius::Finite(1.0)),
        };
        assert!(validate(raw).is_err());
        let raw = RawParams {
            outer: Some(OuterRadius::Infinite),
            ..raw
        };
        assert!(validate(raw).is_ok());
    }

    #[test]
    fn beta_and_critical_exponent() {
        assert_eq!(p3(0.0).beta(), 4.0);
        assert_eq!(p3(2.0).beta(), 2.0);
        assert_eq!(
            ProblemParams::new(4, 2.0, 1.0, 1.0, 0.0).unwrap().beta(),
            2.5
        );
        assert_eq!(p3(0.0).p_star(), 6.0);
        assert_eq!(p3(1.0).p_star(), 4.0);
        assert_eq!(p3(2.0).p_star(), 2.0);
    }

    #[test]
    fn sobolev_constant_closed_forms() {
        let c3 = sobolev_constant(3.0, 2.0).unwrap();
        assert!((c3 / (3.0 * (PI / 2.0).powf(4.0 / 3.0)) - 1.0).abs() < 1e-13);
        assert!((c3 - 5.477904089531332).abs() < 1e-12);
        let c4 = sobolev_constant(4.0, 2.0).unwrap();
        assert!((c4 / (8.0 * PI / 6f64.sqrt()) - 1.0).abs() < 1e-13);
        let big = sobolev_constant(1e6, 2.0).unwrap();
        assert!(big.is_finite() && big > 0.0);
        assert!(sobolev_constant(2.0, 2.0).is_err());
    }

    #[test]
    fn threshold_values_for_3_2_1() {
        let prm = p3(1.0);
        let a = threshold_a_checked(&prm).unwrap();
        assert!((a - 0.527_529_606_289_422_6).abs() < 1e-12);
        assert!((threshold_a_printed(&prm).unwrap() - a).abs() < 1e-15);
        assert!(a > prm.rearrange_threshold());
        let one = prm.with_a(1.0).unwrap();
        assert!((critical_radius(&one).unwrap() - 0.25).abs() < 1e-15);
        assert!(threshold_a(&p3(0.0)).is_err());
        assert!(threshold_a(&p3(2.0)).is_err());
    }

    #[test]
    fn printed_threshold_drifts_off_the_diagonal() {
        // N = 4, p = 2: (p-1)/(N-p) = 1/2, so the printed exponent differs.
        let prm = ProblemParams::new(4, 2.0, 1.0, 1.0, 0.5).unwrap();
        let root = threshold_a_by_root(&prm).unwrap();
        assert!((threshold_a(&prm).unwrap() - root).abs() < 1e-10);
        assert!((threshold_a_printed(&prm).unwrap() - root).abs() > 1e-3);
    }

    #[test]
    fn log_sphere_area_matches_direct_formula() {
        for k in 1..=170 {
            let k = k as f64;
            let direct = k * PI.powf(k / 2.0) / statrs::function::gamma::gamma(1.0 + k / 2.0);
            assert!((sphere_area(k) / direct - 1.0).abs() < 1e-10, "k = {k}");
        }
        assert!((sphere_area(3.0) - 4.0 * PI).abs() < 1e-13);
        assert!((sphere_area(2.0) - 2.0 * PI).abs() < 1e-13);
    }
}
