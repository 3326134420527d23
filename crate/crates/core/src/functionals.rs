//! The potential `V_a`, the `p`-Dirichlet energy, the weighted critical
//! norm and the Rayleigh quotients built from them.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::{AxisymProfile, Bump, RadialProfile};
use crate::params::{sphere_area, ProblemParams};
use crate::quadrature::{
    integrate_axisym, integrate_interval, integrate_support, AxisymDomain, Estimate, QuadratureSpec,
};

/// `1 - a (r/R)^gamma`, accurate when `a = 1` and `r` is close to `R`.
pub fn potential_gap(r: f64, params: &ProblemParams) -> f64 {
    let g = params.fundamental_exponent();
    if params.a == 1.0 {
        -(g * (r / params.radius).ln()).exp_m1()
    } else {
        1.0 - params.a * (r / params.radius).powf(g)
    }
}

/// `V_a(r) = r^{-s} (1 - a (r/R)^{(N-p)/(p-1)})^{-beta}` on `(0, R]`.
pub fn potential(r: f64, params: &ProblemParams) -> Result<f64> {
    if !(r > 0.0) || r > params.radius {
        return Err(Error::Domain(format!(
            "potential needs 0 < r <= R, got r = {r}"
        )));
    }
    if r == params.radius && params.a == 1.0 {
        return Err(Error::Domain("V_1 is infinite at r = R".into()));
    }
    Ok(potential_unchecked(r, params))
}

/// `V_a(r)` without range checks; `inf` at `r = R` when `a = 1`.
pub fn potential_unchecked(r: f64, params: &ProblemParams) -> f64 {
    let rs = if params.s == 0.0 {
        1.0
    } else {
        r.powf(-params.s)
    };
    if params.a == 0.0 {
        return rs;
    }
    rs * potential_gap(r, params).powf(-params.beta())
}

fn radial_breaks(u: &dyn RadialProfile) -> Vec<f64> {
    u.breaks()
}

fn spec_for(u: &dyn RadialProfile, spec: &QuadratureSpec) -> QuadratureSpec {
    // grid functions carry one breakpoint per node
    let n = u.breaks().len();
    QuadratureSpec {
        max_panels: spec.max_panels.max(8 * n),
        ..*spec
    }
}

/// `w_{N-1} int |u'|^p r^{N-1} dr` over the support of `u`.
pub fn dirichlet_energy(
    u: &dyn RadialProfile,
    params: &ProblemParams,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let p = params.p;
    let nm1 = (params.n - 1) as i32;
    let e = integrate_support(
        |r| {
            let d = u.deriv(r);
            if d == 0.0 {
                0.0
            } else {
                d.abs().powf(p) * r.powi(nm1)
            }
        },
        u.support(),
        &radial_breaks(u),
        &spec_for(u, spec),
    )?;
    Ok(e.scale(params.sphere_area()))
}

/// `int (u_r^2 + (u_theta / r)^2)^{p/2} dx`.
pub fn dirichlet_energy_axisym(
    u: &dyn AxisymProfile,
    params: &ProblemParams,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let p = params.p;
    let domain = axisym_domain(u);
    integrate_axisym(
        |r, th| {
            let gr = u.d_r(r, th);
            let gt = u.d_theta(r, th) / r;
            let g2 = gr * gr + gt * gt;
            if g2 == 0.0 {
                0.0
            } else {
                g2.powf(0.5 * p)
            }
        },
        params.n,
        &domain,
        spec,
    )
}

pub fn axisym_domain(u: &dyn AxisymProfile) -> AxisymDomain<'_> {
    AxisymDomain {
        radial: u.radial_breaks(),
        angular: Box::new(move |r| u.angular_breaks(r)),
    }
}

/// Local power of `f` near `r = R`: the slope of `ln f` against
/// `ln(R - r)` between `R - 1e-5 R` and `R - 1e-9 R`.
fn local_exponent<F: Fn(f64) -> f64>(f: F, radius: f64) -> Option<f64> {
    let (d1, d2) = (1e-5, 1e-9);
    let f1 = f(radius * (1.0 - d1)).abs();
    let f2 = f(radius * (1.0 - d2)).abs();
    if f1 == 0.0 || f2 == 0.0 || !f1.is_finite() || !f2.is_finite() {
        return None;
    }
    Some((f2 / f1).ln() / (d2 / d1).ln())
}

fn check_integrable_at_boundary<F: Fn(f64) -> f64>(
    integrand: F,
    params: &ProblemParams,
    what: &str,
) -> Result<()> {
    if params.a < 1.0 || params.s >= params.p {
        return Ok(());
    }
    if let Some(k) = local_exponent(integrand, params.radius) {
        if k <= -1.0 + 1e-3 {
            return Err(Error::Divergent(format!(
                "{what}: |u|^q V_1 behaves like (R - r)^{k:.4} at r = R"
            )));
        }
    }
    Ok(())
}

/// `w_{N-1} int_0^R |u|^q V_a r^{N-1} dr`.
pub fn weighted_norm_q(
    u: &dyn RadialProfile,
    q: f64,
    params: &ProblemParams,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let support = u.support();
    if support > params.radius * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "support {support} exceeds the ball radius {}",
            params.radius
        )));
    }
    let nm1 = (params.n - 1) as i32;
    let integrand = |r: f64| {
        let v = u.value(r);
        if v == 0.0 {
            return 0.0;
        }
        v.abs().powf(q) * (potential_unchecked(r, params) * r.powi(nm1))
    };
    check_integrable_at_boundary(integrand, params, &u.describe())?;
    let e = integrate_interval(
        integrand,
        0.0,
        support.min(params.radius),
        &radial_breaks(u),
        &spec_for(u, spec),
    )?;
    Ok(e.scale(params.sphere_area()))
}

/// The weighted critical norm `int |u|^{p*(s)} V_a dx` on `B_R`.
pub fn weighted_norm(
    u: &dyn RadialProfile,
    params: &ProblemParams,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    weighted_norm_q(u, params.p_star(), params, spec)
}

/// `int |u|^q V_a dx` for axisymmetric `u`.
pub fn weighted_norm_axisym_q(
    u: &dyn AxisymProfile,
    q: f64,
    params: &ProblemParams,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let domain = axisym_domain(u);
    if *domain.radial.last().unwrap() > params.radius * (1.0 + 1e-12) {
        return Err(Error::Domain(
            "axisymmetric support exceeds the ball".into(),
        ));
    }
    check_integrable_at_boundary(
        |r| {
            let mut m: f64 = 0.0;
            for k in 0..=8 {
                m = m.max(u.value(r, PI * k as f64 / 8.0).abs());
            }
            m.powf(q) * potential_unchecked(r, params)
        },
        params,
        &u.describe(),
    )?;
    integrate_axisym(
        |r, th| {
            let v = u.value(r, th);
            if v == 0.0 {
                0.0
            } else {
                v.abs().powf(q) * potential_unchecked(r, params)
            }
        },
        params.n,
        &domain,
        spec,
    )
}

pub fn weighted_norm_axisym(
    u: &dyn AxisymProfile,
    params: &ProblemParams,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    weighted_norm_axisym_q(u, params.p_star(), params, spec)
}

/// `int_{R^N} |u|^{p*(s)} |x|^{-s} dx`.
pub fn whole_space_norm(
    u: &dyn RadialProfile,
    params: &ProblemParams,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let q = params.p_star();
    let s = params.s;
    let nm1 = (params.n - 1) as f64;
    let e = integrate_support(
        |r| {
            let v = u.value(r);
            if v == 0.0 {
                0.0
            } else {
                v.abs().powf(q) * r.powf(nm1 - s)
            }
        },
        u.support(),
        &radial_breaks(u),
        &spec_for(u, spec),
    )?;
    Ok(e.scale(params.sphere_area()))
}

/// Numerator, denominator and quotient with first-order error bars.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuotientReport {
    pub numerator: f64,
    pub numerator_err: f64,
    pub denominator: f64,
    pub denominator_err: f64,
    pub quotient: f64,
    pub quotient_err: f64,
    /// `p / p*(s)`.
    pub exponent: f64,
    pub n: u32,
    pub p: f64,
    pub s: f64,
    pub radius: f64,
    pub a: f64,
    pub description: String,
}

impl QuotientReport {
    pub fn from_parts(
        num: Estimate,
        den: Estimate,
        params: &ProblemParams,
        description: String,
    ) -> Result<Self> {
        if den.value == 0.0 {
            return Err(Error::ZeroDenominator);
        }
        let exponent = params.p / params.p_star();
        let quotient = num.value / den.value.powf(exponent);
        let rel = num.rel_error() + exponent * den.rel_error();
        Ok(QuotientReport {
            numerator: num.value,
            numerator_err: num.error,
            denominator: den.value,
            denominator_err: den.error,
            quotient,
            quotient_err: rel * quotient.abs(),
            exponent,
            n: params.n,
            p: params.p,
            s: params.s,
            radius: params.radius,
            a: params.a,
            description,
        })
    }

    /// `numerator / denominator^exponent` from the stored fields.
    pub fn recompute(&self) -> f64 {
        self.numerator / self.denominator.powf(self.exponent)
    }
}

/// `Q_a(u)` on `B_R` for radial `u`.
pub fn rayleigh_quotient(
    u: &dyn RadialProfile,
    params: &ProblemParams,
    spec: &QuadratureSpec,
) -> Result<QuotientReport> {
    let den = weighted_norm(u, params, spec)?;
    if den.value == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    let num = dirichlet_energy(u, params, spec)?;
    QuotientReport::from_parts(num, den, params, u.describe())
}

/// `Q_a(u)` on `B_R` for axisymmetric `u`.
pub fn rayleigh_quotient_axisym(
    u: &dyn AxisymProfile,
    params: &ProblemParams,
    spec: &QuadratureSpec,
) -> Result<QuotientReport> {
    let den = weighted_norm_axisym(u, params, spec)?;
    if den.value == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    let num = dirichlet_energy_axisym(u, params, spec)?;
    QuotientReport::from_parts(num, den, params, u.describe())
}

/// The Hardy-Sobolev quotient on `R^N` with weight `|x|^{-s}`.
pub fn whole_space_quotient(
    u: &dyn RadialProfile,
    params: &ProblemParams,
    spec: &QuadratureSpec,
) -> Result<QuotientReport> {
    let den = whole_space_norm(u, params, spec)?;
    if den.value == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    let num = dirichlet_energy(u, params, spec)?;
    QuotientReport::from_parts(num, den, params, format!("{} on R^N", u.describe()))
}

/// Energy of a bump from its profile: `eps^{N-p} int_{B_1} |grad v|^p`.
pub fn bump_energy(bump: &Bump, params: &ProblemParams, spec: &QuadratureSpec) -> Result<f64> {
    let ev = bump.profile.energy(params.n, params.p, spec)?;
    Ok(bump.width.powf(params.dim() - params.p) * ev)
}

/// `int |u|^q V_a dx` for a bump, integrated in coordinates centred on the
/// bump: `|x|^2 = c^2 + eps^2 t^2 + 2 c eps t cos(phi)`.
pub fn bump_weighted_norm(
    bump: &Bump,
    params: &ProblemParams,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let q = params.p_star();
    let (c, eps) = (bump.center, bump.width);
    let n = params.n;
    let nm1 = (n - 1) as i32;
    let nm2 = (n - 2) as i32;
    let inner_spec = QuadratureSpec {
        grading_lo: 1.0,
        grading_hi: 1.0,
        rel_tol: spec.rel_tol * 0.1,
        ..*spec
    };
    let mut failure = None;
    let mut inner_rel: f64 = 0.0;
    let outer = integrate_interval(
        |t| {
            if failure.is_some() {
                return 0.0;
            }
            let v = bump.profile.value(t);
            if v == 0.0 {
                return 0.0;
            }
            let et = eps * t;
            let res = integrate_interval(
                |phi| {
                    // |x|^2 = (c - et)^2 + 4 c et cos^2(phi/2)
                    let h = (0.5 * phi).cos();
                    let r = ((c - et).powi(2) + 4.0 * c * et * h * h).sqrt();
                    potential_unchecked(r.min(params.radius), params) * phi.sin().powi(nm2)
                },
                0.0,
                PI,
                &[],
                &inner_spec,
            );
            match res {
                Ok(e) => {
                    inner_rel = inner_rel.max(e.rel_error());
                    v.abs().powf(q) * t.powi(nm1) * e.value
                }
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            }
        },
        0.0,
        1.0,
        &bump.profile.breaks(),
        spec,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let outer = outer?;
    let scale = sphere_area((n - 1) as f64) * eps.powi(n as i32);
    Ok(Estimate {
        value: scale * outer.value,
        error: scale * (outer.error + inner_rel * outer.value.abs()),
    })
}

/// Bump quotient through the profile energy and bump-centred quadrature.
pub fn bump_quotient(
    bump: &Bump,
    params: &ProblemParams,
    spec: &QuadratureSpec,
) -> Result<QuotientReport> {
    let den = bump_weighted_norm(bump, params, spec)?;
    let e = bump_energy(bump, params, spec)?;
    let num = Estimate {
        value: e,
        error: e * spec.rel_tol,
    };
    QuotientReport::from_parts(num, den, params, bump.describe_short())
}

impl Bump {
    pub fn describe_short(&self) -> String {
        AxisymProfile::describe(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::{
        boundary_bump, Bubble, BumpProfile, ExplicitRadial, IokuExtremal, Multiple,
    };
    use crate::params::critical_radius;

    fn prm(s: f64, a: f64) -> ProblemParams {
        ProblemParams::new(3, 2.0, s, 1.0, a).unwrap()
    }

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn potential_examples() {
        let p = prm(1.0, 0.0);
        assert_eq!(potential(0.3, &p).unwrap(), 0.3f64.powf(-1.0));
        for &(r, a) in &[(0.1, 0.2), (0.5, 0.9), (0.99, 1.0), (0.7, 0.5)] {
            let pa = prm(1.0, a);
            assert!(potential(r, &pa).unwrap() >= 1.0 / r);
        }
        assert!(potential(1.0, &prm(1.0, 1.0)).is_err());
        assert!(potential(1.0, &prm(1.0, 0.5)).is_ok());
        assert!(potential(0.0, &p).is_err());
    }

    #[test]
    fn potential_minimum_at_critical_radius() {
        for a in [0.3, 0.5, 0.8, 1.0] {
            let p = prm(1.0, a);
            // golden-section bracket, then bisection on the sign of a
            // symmetric difference (golden section alone stalls near sqrt(eps))
            let (mut lo, mut hi) = (0.01, 0.999);
            let g = 0.5 * (5f64.sqrt() - 1.0);
            while hi - lo > 1e-5 {
                let x1 = hi - g * (hi - lo);
                let x2 = lo + g * (hi - lo);
                if potential(x1, &p).unwrap() < potential(x2, &p).unwrap() {
                    hi = x2;
                } else {
                    lo = x1;
                }
            }
            while hi - lo > 1e-12 {
                let m = 0.5 * (lo + hi);
                let h = 1e-7 * m;
                if potential(m + h, &p).unwrap() > potential(m - h, &p).unwrap() {
                    hi = m;
                } else {
                    lo = m;
                }
            }
            let rmin = 0.5 * (lo + hi);
            assert!((rmin - 0.25 / a).abs() < 1e-8, "a={a}: {rmin}");
            assert!((critical_radius(&p).unwrap() - rmin).abs() < 1e-8);
        }
    }

    #[test]
    fn energy_examples() {
        let p = prm(1.0, 0.0);
        let e = dirichlet_energy(&ExplicitRadial::linear_cone(1.0), &p, &spec()).unwrap();
        assert!((e.value - 4.0 * PI / 3.0).abs() < 1e-12);
        let w = Bubble::new(&p, 1.0).unwrap();
        let e = dirichlet_energy(&w, &p, &spec()).unwrap();
        assert!((e.value - 4.0 * PI / 3.0).abs() < 1e-9 * e.value);
        let n = whole_space_norm(&w, &p, &spec()).unwrap();
        assert!((n.value - 2.0 * PI / 3.0).abs() < 1e-9 * n.value);
        for lam in [0.5, 2.0] {
            let wl = Bubble::new(&p, lam).unwrap();
            let el = dirichlet_energy(&wl, &p, &spec()).unwrap();
            assert!((el.value / e.value - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn axisym_energy_matches_radial_for_lifted() {
        let p = prm(1.0, 0.6);
        let f = ExplicitRadial::quartic(1.0);
        let lifted = crate::funcspace::Lifted(f.clone());
        let a = dirichlet_energy_axisym(&lifted, &p, &spec()).unwrap();
        let b = dirichlet_energy(&f, &p, &spec()).unwrap();
        assert!((a.value / b.value - 1.0).abs() < 1e-9);
        let a = weighted_norm_axisym(&lifted, &p, &spec()).unwrap();
        let b = weighted_norm(&f, &p, &spec()).unwrap();
        assert!((a.value / b.value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn weighted_norm_zero_and_monotone() {
        let p = prm(1.0, 0.3);
        assert_eq!(
            weighted_norm(&ExplicitRadial::zero(1.0), &p, &spec())
                .unwrap()
                .value,
            0.0
        );
        let u = ExplicitRadial::annulus_bump(0.2, 0.8);
        let mut prev = 0.0;
        for a in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let v = weighted_norm(&u, &prm(1.0, a), &spec()).unwrap().value;
            assert!(v > prev);
            prev = v;
        }
        let z = rayleigh_quotient(&ExplicitRadial::zero(1.0), &p, &spec());
        assert_eq!(z.unwrap_err(), Error::ZeroDenominator);
    }

    #[test]
    fn divergence_is_flagged_at_a_equal_one() {
        let p = prm(1.0, 1.0);
        let one = ExplicitRadial::constant_one(1.0);
        assert!(matches!(
            weighted_norm(&one, &p, &spec()),
            Err(Error::Divergent(_))
        ));
        // (1-r) decays fast enough: (1-r)^4 (1-r)^{-3}
        assert!(weighted_norm(&ExplicitRadial::linear_cone(1.0), &p, &spec()).is_ok());
    }

    #[test]
    fn quotient_homogeneity_and_recompute() {
        let p = prm(1.0, 0.5);
        let u = ExplicitRadial::quartic(1.0);
        let q = rayleigh_quotient(&u, &p, &spec()).unwrap();
        for c in [0.1, 10.0] {
            let qc = rayleigh_quotient(
                &Multiple {
                    c,
                    inner: u.clone(),
                },
                &p,
                &spec(),
            )
            .unwrap();
            assert!((qc.quotient / q.quotient - 1.0).abs() < 1e-12);
        }
        assert!((q.recompute() - q.quotient).abs() < 1e-15 * q.quotient);
        let json = serde_json::to_value(&q).unwrap();
        assert!(json.get("quotient").is_some() && json.get("denominator_err").is_some());
    }

    #[test]
    fn extremal_family_attains_at_a_one() {
        let p = prm(1.0, 1.0);
        let c = 2.0 * (2.0 * PI / 3.0).sqrt();
        for lam in [0.5, 1.0, 2.0] {
            let u = IokuExtremal::new(&p, lam).unwrap();
            let q = rayleigh_quotient(&u, &p, &spec()).unwrap();
            assert!(
                (q.quotient / c - 1.0).abs() < 1e-6,
                "lambda={lam}: {}",
                q.quotient
            );
        }
    }

    #[test]
    fn bump_fast_path_matches_direct_quadrature() {
        let p = prm(1.0, 0.5);
        let b = boundary_bump(0.1, BumpProfile::Cone, &p).unwrap();
        let fast = bump_weighted_norm(&b, &p, &spec()).unwrap();
        let direct = weighted_norm_axisym(&b, &p, &spec().with_tol(1e-8)).unwrap();
        assert!(
            (fast.value / direct.value - 1.0).abs() < 1e-6,
            "{} {}",
            fast.value,
            direct.value
        );
        let e = bump_energy(&b, &p, &spec()).unwrap();
        let ed = dirichlet_energy_axisym(&b, &p, &spec().with_tol(1e-8)).unwrap();
        assert!((e / ed.value - 1.0).abs() < 1e-6, "{} {}", e, ed.value);
    }
}
