//! Radial changes of variables between the ball and other spaces, the
//! transport of functions across them, and numerical checks of the norm
//! identities each map carries.
//!
//! Every map sends an inner radius `r` to an outer radius `t`. `u` denotes a
//! function of `r`, `w` one of `t`, and `u(r) = w(t(r))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::{AxisymProfile, BubbleShape, ExplicitRadial, RadialProfile};
use crate::functionals::{axisym_domain, potential_gap};
use crate::params::{sphere_area, OuterRadius, ProblemParams};
use crate::quadrature::{
    integrate_axisym, integrate_log_radius, integrate_support, Estimate, QuadratureSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    /// `r^{-g} - R^{-g} = t^{-g} - T^{-g}`, `g = (N-p)/(p-1)`; `B_R -> B_T`.
    Ioku,
    /// `t^{-g} = ln(R/r)`; `B_R -> R^N`.
    Hk,
    /// `t^{-(m-N)/(N-1)} = ln(R/r)` with `p = N`; `B_R in R^N -> R^m`.
    St,
    /// `t^{-(N-p)/(p-1)} = r^{-(m-p)/(p-1)}`; `R^m -> R^N`.
    Dim,
}

impl std::str::FromStr for TransformKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ioku" => Ok(TransformKind::Ioku),
            "hk" => Ok(TransformKind::Hk),
            "st" => Ok(TransformKind::St),
            "dim" => Ok(TransformKind::Dim),
            _ => Err(Error::InvalidParams(format!(
                "unknown transform kind {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformMap {
    pub kind: TransformKind,
    /// Dimension of the ball side (`N`).
    pub n: u32,
    pub p: f64,
    /// Inner radius `R` (unused by `Dim`).
    pub radius: f64,
    /// Outer radius `T` (`Ioku` only).
    pub outer: OuterRadius,
    /// The second dimension `m` (`St`, `Dim`).
    pub m: f64,
    /// Exponent `e` in the defining relation `t^{-e} = ...`.
    expo: f64,
}

impl TransformMap {
    pub fn ioku(n: u32, p: f64, radius: f64, outer: OuterRadius) -> Result<Self> {
        let prm = ProblemParams::new(n, p, 0.0, radius, 0.0)?.with_outer(outer)?;
        Ok(TransformMap {
            kind: TransformKind::Ioku,
            n,
            p,
            radius,
            outer,
            m: n as f64,
            expo: prm.fundamental_exponent(),
        })
    }

    pub fn hk(n: u32, p: f64, radius: f64) -> Result<Self> {
        let prm = ProblemParams::new(n, p, 0.0, radius, 0.0)?;
        Ok(TransformMap {
            kind: TransformKind::Hk,
            n,
            p,
            radius,
            outer: OuterRadius::Infinite,
            m: n as f64,
            expo: prm.fundamental_exponent(),
        })
    }

    /// The map with `p = N`; other `p` are rejected.
    pub fn st(n: u32, m: f64, radius: f64) -> Result<Self> {
        let nf = n as f64;
        if n < 2 || !(m > nf) || !(radius > 0.0) {
            return Err(Error::InvalidParams(
                "st map needs N >= 2, m > N, R > 0".into(),
            ));
        }
        Ok(TransformMap {
            kind: TransformKind::St,
            n,
            p: nf,
            radius,
            outer: OuterRadius::Infinite,
            m,
            expo: (m - nf) / (nf - 1.0),
        })
    }

    pub fn dim(n: u32, m: f64, p: f64) -> Result<Self> {
        let nf = n as f64;
        if !(p > 1.0 && p < nf && m > nf) {
            return Err(Error::InvalidParams("dim map needs 1 < p < N < m".into()));
        }
        Ok(TransformMap {
            kind: TransformKind::Dim,
            n,
            p,
            radius: f64::INFINITY,
            outer: OuterRadius::Infinite,
            m,
            expo: (m - p) / (nf - p),
        })
    }

    /// Builds a map from problem parameters, `m` and the kind.
    pub fn from_params(
        kind: TransformKind,
        params: &ProblemParams,
        m: Option<f64>,
    ) -> Result<Self> {
        let need_m = || m.ok_or_else(|| Error::InvalidParams(format!("{kind:?} map needs --m")));
        match kind {
            TransformKind::Ioku => Self::ioku(params.n, params.p, params.radius, params.outer),
            TransformKind::Hk => Self::hk(params.n, params.p, params.radius),
            TransformKind::St => {
                if params.p != params.dim() {
                    return Err(Error::InvalidParams(
                        "st map is defined only for p = N".into(),
                    ));
                }
                Self::st(params.n, need_m()?, params.radius)
            }
            TransformKind::Dim => Self::dim(params.n, need_m()?, params.p),
        }
    }

    /// Dimension of the `r` side.
    pub fn inner_dim(&self) -> f64 {
        match self.kind {
            TransformKind::Dim => self.m,
            _ => self.n as f64,
        }
    }

    /// Dimension of the `t` side.
    pub fn outer_dim(&self) -> f64 {
        match self.kind {
            TransformKind::St => self.m,
            _ => self.n as f64,
        }
    }

    /// Supremum of the `r` range.
    pub fn inner_end(&self) -> f64 {
        self.radius
    }

    /// Supremum of the `t` range.
    pub fn outer_end(&self) -> f64 {
        match self.kind {
            TransformKind::Ioku => self.outer.as_f64(),
            _ => f64::INFINITY,
        }
    }

    /// `t(r)` without range checks; monotone, with `t(0) = 0`.
    pub fn fwd(&self, r: f64) -> f64 {
        let g = self.expo;
        match self.kind {
            TransformKind::Ioku => {
                let lead = (g * (self.radius / r).ln()).exp_m1();
                let tail = match self.outer {
                    OuterRadius::Infinite => 0.0,
                    OuterRadius::Finite(t) => (self.radius / t).powf(g),
                };
                self.radius * (lead + tail).powf(-1.0 / g)
            }
            TransformKind::Hk | TransformKind::St => (self.radius / r).ln().powf(-1.0 / g),
            TransformKind::Dim => r.powf(g),
        }
    }

    /// `r(t)` without range checks.
    pub fn inv(&self, t: f64) -> f64 {
        let g = self.expo;
        match self.kind {
            TransformKind::Ioku => match self.outer {
                OuterRadius::Infinite => t * (-(t / self.radius).powf(g).ln_1p() / g).exp(),
                OuterRadius::Finite(big_t) => {
                    let lead = (g * (big_t / t).ln()).exp_m1();
                    big_t * (lead + (big_t / self.radius).powf(g)).powf(-1.0 / g)
                }
            },
            TransformKind::Hk | TransformKind::St => self.radius * (-t.powf(-g)).exp(),
            TransformKind::Dim => t.powf(1.0 / g),
        }
    }

    /// `dr/dt` at the pair `(r, t)`.
    fn jac_pair(&self, r: f64, t: f64) -> f64 {
        let g = self.expo;
        match self.kind {
            TransformKind::Ioku => (r / t).powf((self.n as f64 - 1.0) / (self.p - 1.0)),
            TransformKind::Hk | TransformKind::St => g * r * t.powf(-g - 1.0),
            TransformKind::Dim => t.powf(1.0 / g - 1.0) / g,
        }
    }

    fn check_inner(&self, r: f64) -> Result<()> {
        if !(r > 0.0 && r < self.inner_end()) {
            return Err(Error::Domain(format!(
                "r = {r} outside (0, {})",
                self.inner_end()
            )));
        }
        Ok(())
    }

    pub fn forward(&self, r: f64) -> Result<f64> {
        self.check_inner(r)?;
        Ok(self.fwd(r))
    }

    pub fn inverse(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t < self.outer_end()) {
            return Err(Error::Domain(format!(
                "t = {t} outside (0, {})",
                self.outer_end()
            )));
        }
        Ok(self.inv(t))
    }

    /// `dr/dt` at inner radius `r`.
    pub fn jacobian(&self, r: f64) -> Result<f64> {
        self.check_inner(r)?;
        Ok(self.jac_pair(r, self.fwd(r)))
    }
}

pub fn map_forward(map: &TransformMap, r: f64) -> Result<f64> {
    map.forward(r)
}

pub fn map_inverse(map: &TransformMap, t: f64) -> Result<f64> {
    map.inverse(t)
}

pub fn map_jacobian(map: &TransformMap, r: f64) -> Result<f64> {
    map.jacobian(r)
}

/// `u(r) = w(t(r))`: an outer-side profile pulled back to the inner side.
pub struct Pulled<'a> {
    pub map: TransformMap,
    pub w: &'a dyn RadialProfile,
}

/// `w(t) = u(r(t))`: an inner-side profile pushed to the outer side.
pub struct Pushed<'a> {
    pub map: TransformMap,
    pub u: &'a dyn RadialProfile,
}

pub fn pull_back<'a>(map: &TransformMap, w: &'a dyn RadialProfile) -> Pulled<'a> {
    Pulled { map: *map, w }
}

pub fn push_forward<'a>(map: &TransformMap, u: &'a dyn RadialProfile) -> Pushed<'a> {
    Pushed { map: *map, u }
}

impl RadialProfile for Pulled<'_> {
    fn value(&self, r: f64) -> f64 {
        if r >= self.support() {
            return 0.0;
        }
        if r <= 0.0 {
            return self.w.value(0.0);
        }
        self.w.value(self.map.fwd(r))
    }

    fn deriv(&self, r: f64) -> f64 {
        if r <= 0.0 || r >= self.support() {
            return 0.0;
        }
        let t = self.map.fwd(r);
        let d = self.w.deriv(t);
        if d == 0.0 {
            0.0
        } else {
            d / self.map.jac_pair(r, t)
        }
    }

    fn support(&self) -> f64 {
        let s = self.w.support();
        if s >= self.map.outer_end() {
            self.map.inner_end()
        } else {
            self.map.inv(s)
        }
    }

    fn breaks(&self) -> Vec<f64> {
        self.w.breaks().iter().map(|&t| self.map.inv(t)).collect()
    }

    fn describe(&self) -> String {
        format!("{} pulled back by {:?}", self.w.describe(), self.map.kind)
    }
}

impl RadialProfile for Pushed<'_> {
    fn value(&self, t: f64) -> f64 {
        if t >= self.support() {
            return 0.0;
        }
        if t <= 0.0 {
            return self.u.value(0.0);
        }
        self.u.value(self.map.inv(t))
    }

    fn deriv(&self, t: f64) -> f64 {
        if t <= 0.0 || t >= self.support() {
            return 0.0;
        }
        let r = self.map.inv(t);
        let d = self.u.deriv(r);
        if d == 0.0 {
            0.0
        } else {
            d * self.map.jac_pair(r, t)
        }
    }

    fn support(&self) -> f64 {
        let s = self.u.support();
        if s >= self.map.inner_end() {
            self.map.outer_end()
        } else {
            self.map.fwd(s)
        }
    }

    fn breaks(&self) -> Vec<f64> {
        self.u.breaks().iter().map(|&r| self.map.fwd(r)).collect()
    }

    fn describe(&self) -> String {
        format!("{} pushed by {:?}", self.u.describe(), self.map.kind)
    }
}

/// Which identity of a map to check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "identity", rename_all = "snake_case")]
pub enum Identity {
    /// `p`-energies on both sides.
    Gradient,
    /// `int |w|^q |y|^{-weight} dy` against its inner-side form; `weight` is
    /// `s` (ioku, hk) or `alpha` (st); the dim map fixes it.
    Weighted { q: f64, weight: f64 },
}

/// The side on which a test function is given.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Inner,
    Outer,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub kind: TransformKind,
    pub identity: Identity,
    pub description: String,
    /// Outer-side integral.
    pub lhs: f64,
    pub lhs_err: f64,
    /// Inner-side integral including its prefactor.
    pub rhs: f64,
    pub rhs_err: f64,
    pub prefactor: f64,
    pub residual: f64,
}

fn relative_residual(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// `w_{k-1} int_0^sup f(x) x^{k-1} dx`.
fn radial_integral<F: Fn(f64) -> f64>(
    f: F,
    dim: f64,
    support: f64,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let e = integrate_support(
        |x| {
            let v = f(x);
            if v == 0.0 {
                0.0
            } else {
                v * x.powf(dim - 1.0)
            }
        },
        support,
        breaks,
        spec,
    )?;
    Ok(e.scale(sphere_area(dim)))
}

/// Outer-side quadrature settings.
pub fn lhs_spec(base: &QuadratureSpec) -> QuadratureSpec {
    base.with_grading(3.0, 3.0)
}

/// Inner-side quadrature settings: a different grading, hence a different mesh.
pub fn rhs_spec(base: &QuadratureSpec) -> QuadratureSpec {
    base.with_grading(2.0, 4.0)
}

/// Computes both sides of an identity by separate quadratures and returns
/// their relative residual.
pub fn verify_norm_identity(
    map: &TransformMap,
    f: &dyn RadialProfile,
    side: Side,
    identity: Identity,
    base: &QuadratureSpec,
) -> Result<IdentityReport> {
    let pulled;
    let pushed;
    let (u, w): (&dyn RadialProfile, &dyn RadialProfile) = match side {
        Side::Inner => {
            pushed = push_forward(map, f);
            (f, &pushed)
        }
        Side::Outer => {
            pulled = pull_back(map, f);
            (&pulled, f)
        }
    };
    let ls = lhs_spec(base);
    let rs = rhs_spec(base);
    let (nd, md) = (map.n as f64, map.m);
    let p = map.p;
    let g = map.expo;
    let (din, dout) = (map.inner_dim(), map.outer_dim());
    let grad_pow = |d: f64| if d == 0.0 { 0.0 } else { d.abs().powf(p) };

    let (lhs, rhs, prefactor) = match identity {
        Identity::Gradient => {
            let lhs = radial_integral(
                |t| grad_pow(w.deriv(t)),
                dout,
                w.support(),
                &w.breaks(),
                &ls,
            )?;
            let (inner, pref) = match map.kind {
                TransformKind::Ioku => (
                    radial_integral(|r| grad_pow(u.deriv(r)), din, u.support(), &u.breaks(), &rs)?,
                    1.0,
                ),
                TransformKind::Hk => (
                    radial_integral(
                        |r| grad_pow(u.deriv(r)) * r.powf(p - nd),
                        din,
                        u.support(),
                        &u.breaks(),
                        &rs,
                    )?,
                    g.powf(p - 1.0),
                ),
                TransformKind::St => (
                    radial_integral(|r| grad_pow(u.deriv(r)), din, u.support(), &u.breaks(), &rs)?,
                    sphere_area(md) / sphere_area(nd) * g.powf(nd - 1.0),
                ),
                // u lives in R^m: int |grad u|^p = pref int_{R^N} |grad w|^p
                TransformKind::Dim => {
                    let um = radial_integral(
                        |r| grad_pow(u.deriv(r)),
                        din,
                        u.support(),
                        &u.breaks(),
                        &rs,
                    )?;
                    let pref = sphere_area(md) / sphere_area(nd) * g.powf(p - 1.0);
                    return finish(map, identity, f, lhs.scale(pref), um, pref);
                }
            };
            (lhs, inner.scale(pref), pref)
        }
        Identity::Weighted { q, weight } => {
            let pw = |v: f64| if v == 0.0 { 0.0 } else { v.abs().powf(q) };
            match map.kind {
                TransformKind::Ioku => {
                    let lhs = radial_integral(
                        |t| pw(w.value(t)) * t.powf(-weight),
                        dout,
                        w.support(),
                        &w.breaks(),
                        &ls,
                    )?;
                    let a = 1.0 - map.outer.inv_pow(g) * map.radius.powf(g);
                    let prm = ProblemParams::new(map.n, p, weight, map.radius, a)?;
                    let beta = prm.beta();
                    let rhs = radial_integral(
                        |r| {
                            let v = pw(u.value(r));
                            if v == 0.0 {
                                0.0
                            } else {
                                v * r.powf(-weight) * potential_gap(r, &prm).powf(-beta)
                            }
                        },
                        din,
                        u.support(),
                        &u.breaks(),
                        &rs,
                    )?;
                    (lhs, rhs, 1.0)
                }
                TransformKind::Hk | TransformKind::St => {
                    let lhs = radial_integral(
                        |t| pw(w.value(t)) * t.powf(-weight),
                        dout,
                        w.support(),
                        &w.breaks(),
                        &ls,
                    )?;
                    let (pref, expo) = if map.kind == TransformKind::Hk {
                        let beta = ((nd - 1.0) * p - (p - 1.0) * weight) / (nd - p);
                        ((p - 1.0) / (nd - p), beta)
                    } else {
                        let gamma_alpha = ((md - 1.0) * nd - (nd - 1.0) * weight) / (md - nd);
                        (
                            sphere_area(md) * (nd - 1.0) / (sphere_area(nd) * (md - nd)),
                            gamma_alpha,
                        )
                    };
                    // w_{N-1} int |u|^q r^{-N} (ln R/r)^{-expo} r^{N-1} dr = w_{N-1} int |u|^q L^{-expo} dL
                    let inner = integrate_log_radius(
                        |r, l| {
                            let v = pw(u.value(r));
                            if v == 0.0 {
                                0.0
                            } else {
                                v * l.powf(-expo)
                            }
                        },
                        map.radius,
                        &rs,
                    )?
                    .scale(sphere_area(nd));
                    (lhs, inner.scale(pref), pref)
                }
                TransformKind::Dim => {
                    let alpha = (md - nd) * p / (md - p);
                    let um =
                        radial_integral(|r| pw(u.value(r)), din, u.support(), &u.breaks(), &rs)?;
                    let wn = radial_integral(
                        |t| pw(w.value(t)) * t.powf(-alpha),
                        dout,
                        w.support(),
                        &w.breaks(),
                        &ls,
                    )?;
                    let pref = sphere_area(md) / sphere_area(nd) * (nd - p) / (md - p);
                    return finish(map, identity, f, wn.scale(pref), um, pref);
                }
            }
        }
    };
    finish(map, identity, f, lhs, rhs, prefactor)
}

fn finish(
    map: &TransformMap,
    identity: Identity,
    f: &dyn RadialProfile,
    lhs: Estimate,
    rhs: Estimate,
    prefactor: f64,
) -> Result<IdentityReport> {
    Ok(IdentityReport {
        kind: map.kind,
        identity,
        description: f.describe(),
        lhs: lhs.value,
        lhs_err: lhs.error,
        rhs: rhs.value,
        rhs_err: rhs.error,
        prefactor,
        residual: relative_residual(lhs.value, rhs.value),
    })
}

/// `int (u_r^2 + (u_theta/r)^2 [1 - a (r/R)^g]^{-2})^{p/2} dx`.
pub fn lp_operator_energy(
    u: &dyn AxisymProfile,
    params: &ProblemParams,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let p = params.p;
    if params.a == 1.0 {
        let r_end = *u.radial_breaks().last().unwrap();
        if r_end >= params.radius {
            let ang = |r: f64| {
                let gap = potential_gap(r, params);
                let mut m: f64 = 0.0;
                for k in 1..8 {
                    let th = std::f64::consts::PI * k as f64 / 8.0;
                    m = m.max((u.d_theta(r, th) / (r * gap)).abs());
                }
                m.powf(p)
            };
            let d1 = 1e-5;
            let d2 = 1e-9;
            let (f1, f2) = (
                ang(params.radius * (1.0 - d1)),
                ang(params.radius * (1.0 - d2)),
            );
            if f1 > 0.0 && f2 > 0.0 {
                let k = (f2 / f1).ln() / (d2 / d1).ln();
                if k <= -1.0 + 1e-3 {
                    return Err(Error::Divergent(format!(
                        "angular part of L_p u behaves like (R - r)^{k:.4} at r = R"
                    )));
                }
            }
        }
    }
    let domain = axisym_domain(u);
    integrate_axisym(
        |r, th| {
            let gr = u.d_r(r, th);
            let dt = u.d_theta(r, th);
            let gt = if dt == 0.0 {
                0.0
            } else {
                dt / (r * potential_gap(r, params))
            };
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

/// `u(r, theta) = w(t(r), theta)` for an outer-side axisymmetric `w`.
pub struct PulledAxisym<'a> {
    pub map: TransformMap,
    pub w: &'a dyn AxisymProfile,
}

impl AxisymProfile for PulledAxisym<'_> {
    fn value(&self, r: f64, theta: f64) -> f64 {
        if r <= 0.0 {
            return self.w.value(0.0, theta);
        }
        self.w.value(self.map.fwd(r), theta)
    }
    fn d_r(&self, r: f64, theta: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let t = self.map.fwd(r);
        let d = self.w.d_r(t, theta);
        if d == 0.0 {
            0.0
        } else {
            d / self.map.jac_pair(r, t)
        }
    }
    fn d_theta(&self, r: f64, theta: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        self.w.d_theta(self.map.fwd(r), theta)
    }
    fn radial_breaks(&self) -> Vec<f64> {
        let b = self.w.radial_breaks();
        b.iter()
            .map(|&t| {
                if t <= 0.0 {
                    0.0
                } else if t >= self.map.outer_end() {
                    self.map.inner_end()
                } else {
                    self.map.inv(t)
                }
            })
            .collect()
    }
    fn angular_breaks(&self, r: f64) -> Vec<f64> {
        self.w.angular_breaks(self.map.fwd(r))
    }
    fn describe(&self) -> String {
        format!("{} pulled back by {:?}", self.w.describe(), self.map.kind)
    }
}

/// Both sides of the operator identity for an axisymmetric outer-side `w`:
/// `int_{B_T} |grad w|^p` against `lp_operator_energy` of its pull-back.
pub fn verify_lp_identity(
    map: &TransformMap,
    w: &dyn AxisymProfile,
    s: f64,
    base: &QuadratureSpec,
) -> Result<IdentityReport> {
    if map.kind != TransformKind::Ioku {
        return Err(Error::InvalidParams(
            "the L_p identity belongs to the ioku map".into(),
        ));
    }
    let outer_params = ProblemParams {
        n: map.n,
        p: map.p,
        s,
        radius: map.outer_end(),
        a: 0.0,
        outer: OuterRadius::Infinite,
    };
    let lhs = crate::functionals::dirichlet_energy_axisym(w, &outer_params, &lhs_spec(base))?;
    let a = 1.0 - map.outer.inv_pow(map.expo) * map.radius.powf(map.expo);
    let inner_params = ProblemParams::new(map.n, map.p, s, map.radius, a)?;
    let u = PulledAxisym { map: *map, w };
    let rhs = lp_operator_energy(&u, &inner_params, &rhs_spec(base))?;
    Ok(IdentityReport {
        kind: map.kind,
        identity: Identity::Gradient,
        description: w.describe(),
        lhs: lhs.value,
        lhs_err: lhs.error,
        rhs: rhs.value,
        rhs_err: rhs.error,
        prefactor: 1.0,
        residual: relative_residual(lhs.value, rhs.value),
    })
}

/// The identities a map carries, with the default weights used by the suite.
pub fn default_identities(map: &TransformMap) -> Vec<Identity> {
    let nd = map.n as f64;
    match map.kind {
        TransformKind::Ioku | TransformKind::Hk => {
            let s = 1.0f64.min(0.5 * map.p);
            let q = map.p * (nd - s) / (nd - map.p);
            vec![Identity::Gradient, Identity::Weighted { q, weight: s }]
        }
        TransformKind::St => vec![
            Identity::Gradient,
            Identity::Weighted {
                q: 2.0 * nd,
                weight: 1.0,
            },
        ],
        TransformKind::Dim => {
            let q = map.m * map.p / (map.m - map.p);
            vec![Identity::Gradient, Identity::Weighted { q, weight: 0.0 }]
        }
    }
}

/// Three radial test functions for a map, with the side they are given on:
/// functions on `B_R` pushed forward, except for the dimension map whose
/// functions live on `R^N`.
pub fn transform_suite(map: &TransformMap) -> Vec<(Side, ExplicitRadial)> {
    match map.kind {
        TransformKind::Dim => {
            // Sobolev extremal shape (s = 0)
            let shape = BubbleShape {
                e: map.p / (map.p - 1.0),
                k: (map.n as f64 - map.p) / map.p,
            };
            vec![
                (
                    Side::Outer,
                    ExplicitRadial::truncated_bubble(shape, 0.3, 1.0),
                ),
                (Side::Outer, ExplicitRadial::annulus_bump(0.25, 0.75)),
                (Side::Outer, ExplicitRadial::quartic(1.0)),
            ]
        }
        _ => {
            let r = map.radius;
            vec![
                (Side::Inner, ExplicitRadial::linear_cone(r)),
                (Side::Inner, ExplicitRadial::quartic(r)),
                (
                    Side::Inner,
                    ExplicitRadial::annulus_bump(0.25 * r, 0.75 * r),
                ),
            ]
        }
    }
}
