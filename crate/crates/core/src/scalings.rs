//! Scalings of test functions and the energy curves they generate.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::{AxisymProfile, RadialProfile};
use crate::functionals::axisym_domain;
use crate::quadrature::{integrate_axisym, Estimate, QuadratureSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalingKind {
    /// `lambda^{(N-p)/p} u(lambda x)`.
    Usual,
    /// The scaling conjugate to the usual one under the ball-to-ball map.
    New { a: f64 },
    /// `lambda^{-(N-1)/N} v((|x|/b)^{lambda-1} x)`, for `p = N` on `B_1`.
    ScaleN { b: f64 },
    /// The new scaling on `B_1`.
    ScaleP { a: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingSpec {
    pub kind: ScalingKind,
    pub lambda: f64,
}

impl ScalingSpec {
    pub fn new(kind: ScalingKind, lambda: f64) -> Result<Self> {
        let spec = ScalingSpec { kind, lambda };
        spec.check()?;
        Ok(spec)
    }

    /// Admissible range of `lambda` for the kind.
    pub fn check(&self) -> Result<()> {
        let lam = self.lambda;
        if !(lam > 0.0 && lam.is_finite()) {
            return Err(Error::Domain(format!("lambda = {lam} must be positive")));
        }
        match self.kind {
            ScalingKind::Usual => Ok(()),
            ScalingKind::New { a } | ScalingKind::ScaleP { a } => {
                if !(0.0..=1.0).contains(&a) {
                    return Err(Error::Domain("a must lie in [0, 1]".into()));
                }
                if a < 1.0 && lam < 1.0 {
                    return Err(Error::Domain(format!(
                        "lambda = {lam} < 1 is admissible only for a = 1"
                    )));
                }
                Ok(())
            }
            ScalingKind::ScaleN { b } => {
                if !(b >= 1.0) {
                    return Err(Error::Domain("b >= 1 required".into()));
                }
                if b > 1.0 && lam > 1.0 {
                    return Err(Error::Domain(format!(
                        "lambda = {lam} > 1 is admissible only for b = 1"
                    )));
                }
                Ok(())
            }
        }
    }
}

/// The radial part of a scaling: `x -> rho(|x|) x/|x|` and an amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialMap {
    pub spec: ScalingSpec,
    pub dim: f64,
    pub p: f64,
    /// Ball radius for the new scaling (1 for the `B_1` scalings).
    pub radius: f64,
}

impl RadialMap {
    pub fn new(spec: ScalingSpec, dim: f64, p: f64, radius: f64) -> Result<Self> {
        spec.check()?;
        let radius = match spec.kind {
            ScalingKind::ScaleN { .. } | ScalingKind::ScaleP { .. } => 1.0,
            _ => radius,
        };
        Ok(RadialMap {
            spec,
            dim,
            p,
            radius,
        })
    }

    fn gamma(&self) -> f64 {
        (self.dim - self.p) / (self.p - 1.0)
    }

    fn a(&self) -> f64 {
        match self.spec.kind {
            ScalingKind::New { a } | ScalingKind::ScaleP { a } => a,
            _ => 0.0,
        }
    }

    pub fn amplitude(&self) -> f64 {
        match self.spec.kind {
            ScalingKind::ScaleN { .. } => self.spec.lambda.powf(-(self.dim - 1.0) / self.dim),
            _ => self.spec.lambda.powf((self.dim - self.p) / self.p),
        }
    }

    /// `|y|` as a function of `|x|`.
    pub fn rho(&self, r: f64) -> f64 {
        let lam = self.spec.lambda;
        match self.spec.kind {
            ScalingKind::Usual => lam * r,
            ScalingKind::New { .. } | ScalingKind::ScaleP { .. } => {
                let g = self.gamma();
                let c = self.a() * (lam.powf(g) - 1.0);
                lam * r * (-(c * (r / self.radius).powf(g)).ln_1p() / g).exp()
            }
            ScalingKind::ScaleN { b } => b.powf(1.0 - lam) * r.powf(lam),
        }
    }

    /// `d|y|/d|x|`.
    pub fn rho_deriv(&self, r: f64) -> f64 {
        let lam = self.spec.lambda;
        match self.spec.kind {
            ScalingKind::Usual => lam,
            ScalingKind::New { .. } | ScalingKind::ScaleP { .. } => {
                let g = self.gamma();
                let c = self.a() * (lam.powf(g) - 1.0);
                self.rho(r) / (r * (1.0 + c * (r / self.radius).powf(g)))
            }
            ScalingKind::ScaleN { .. } => lam * self.rho(r) / r,
        }
    }

    /// `|x|` as a function of `|y|`.
    pub fn rho_inv(&self, t: f64) -> f64 {
        let lam = self.spec.lambda;
        match self.spec.kind {
            ScalingKind::Usual => t / lam,
            ScalingKind::New { .. } | ScalingKind::ScaleP { .. } => {
                let g = self.gamma();
                let c = self.a() * (lam.powf(g) - 1.0);
                (lam.powf(g) * t.powf(-g) - c * self.radius.powf(-g)).powf(-1.0 / g)
            }
            ScalingKind::ScaleN { b } => b.powf(1.0 - 1.0 / lam) * t.powf(1.0 / lam),
        }
    }

    /// Radius beyond which the scaled function is extended by zero:
    /// `R (lambda^g (1-a) + a)^{-1/g}` for the new scaling.
    pub fn support_radius(&self) -> f64 {
        let lam = self.spec.lambda;
        match self.spec.kind {
            ScalingKind::Usual => self.radius / lam,
            ScalingKind::New { a } | ScalingKind::ScaleP { a } => {
                let g = self.gamma();
                self.radius * (lam.powf(g) * (1.0 - a) + a).powf(-1.0 / g)
            }
            ScalingKind::ScaleN { b } => b.powf(1.0 - 1.0 / lam).min(1.0),
        }
    }

    fn edge(&self, inner_support: f64) -> f64 {
        let own = self.support_radius();
        if inner_support.is_finite() {
            own.min(self.rho_inv(inner_support))
        } else {
            own
        }
    }
}

/// A radial function after a scaling.
pub struct ScaledRadial<'a> {
    pub map: RadialMap,
    pub u: &'a dyn RadialProfile,
}

/// An axisymmetric function after a scaling (the angle is untouched).
pub struct ScaledAxisym<'a> {
    pub map: RadialMap,
    pub u: &'a dyn AxisymProfile,
}

/// `u` after the scaling, extended by zero outside its shrunken support.
pub fn apply_scaling<'a>(
    spec: ScalingSpec,
    u: &'a dyn RadialProfile,
    dim: f64,
    p: f64,
    radius: f64,
) -> Result<ScaledRadial<'a>> {
    Ok(ScaledRadial {
        map: RadialMap::new(spec, dim, p, radius)?,
        u,
    })
}

pub fn apply_scaling_axisym<'a>(
    spec: ScalingSpec,
    u: &'a dyn AxisymProfile,
    dim: f64,
    p: f64,
    radius: f64,
) -> Result<ScaledAxisym<'a>> {
    Ok(ScaledAxisym {
        map: RadialMap::new(spec, dim, p, radius)?,
        u,
    })
}

impl RadialProfile for ScaledRadial<'_> {
    fn value(&self, r: f64) -> f64 {
        if r >= self.support() {
            return 0.0;
        }
        self.map.amplitude() * self.u.value(self.map.rho(r))
    }
    fn deriv(&self, r: f64) -> f64 {
        if r <= 0.0 || r >= self.support() {
            return 0.0;
        }
        let d = self.u.deriv(self.map.rho(r));
        if d == 0.0 {
            0.0
        } else {
            self.map.amplitude() * d * self.map.rho_deriv(r)
        }
    }
    fn support(&self) -> f64 {
        self.map.edge(self.u.support())
    }
    fn breaks(&self) -> Vec<f64> {
        self.u
            .breaks()
            .iter()
            .map(|&t| self.map.rho_inv(t))
            .collect()
    }
    fn describe(&self) -> String {
        format!("{} scaled by {:?}", self.u.describe(), self.map.spec)
    }
}

impl AxisymProfile for ScaledAxisym<'_> {
    fn value(&self, r: f64, theta: f64) -> f64 {
        if r >= self.edge() {
            return 0.0;
        }
        self.map.amplitude() * self.u.value(self.map.rho(r), theta)
    }
    fn d_r(&self, r: f64, theta: f64) -> f64 {
        if r <= 0.0 || r >= self.edge() {
            return 0.0;
        }
        let d = self.u.d_r(self.map.rho(r), theta);
        if d == 0.0 {
            0.0
        } else {
            self.map.amplitude() * d * self.map.rho_deriv(r)
        }
    }
    fn d_theta(&self, r: f64, theta: f64) -> f64 {
        if r <= 0.0 || r >= self.edge() {
            return 0.0;
        }
        self.map.amplitude() * self.u.d_theta(self.map.rho(r), theta)
    }
    fn radial_breaks(&self) -> Vec<f64> {
        let b = self.u.radial_breaks();
        let edge = self.edge();
        b.iter()
            .map(|&t| {
                if t <= 0.0 {
                    0.0
                } else {
                    self.map.rho_inv(t).min(edge)
                }
            })
            .collect()
    }
    fn angular_breaks(&self, r: f64) -> Vec<f64> {
        self.u.angular_breaks(self.map.rho(r))
    }
    fn describe(&self) -> String {
        format!("{} scaled by {:?}", self.u.describe(), self.map.spec)
    }
}

impl ScaledAxisym<'_> {
    fn edge(&self) -> f64 {
        self.map.edge(*self.u.radial_breaks().last().unwrap())
    }
}

/// One point of an energy curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub lambda: f64,
    pub energy: f64,
    pub error: f64,
}

/// Largest `|u_theta|` over a grid of the support; zero means no angular content.
pub fn angular_content(u: &dyn AxisymProfile) -> f64 {
    let rb = u.radial_breaks();
    let (lo, hi) = (rb[0], *rb.last().unwrap());
    let mut m: f64 = 0.0;
    for i in 1..64 {
        let r = lo + (hi - lo) * i as f64 / 64.0;
        for j in 1..32 {
            let th = std::f64::consts::PI * j as f64 / 32.0;
            m = m.max(u.d_theta(r, th).abs());
        }
    }
    m
}

/// `1 + a (l^g - 1) / (l^g t^{-g} - a (l^g - 1))`: the angular factor of
/// the `scale_p` energy at finite `lambda`.
pub fn scale_p_factor(t: f64, lambda: f64, a: f64, g: f64) -> f64 {
    let lg = lambda.powf(g);
    let c = a * (lg - 1.0);
    1.0 + c / (lg * t.powf(-g) - c)
}

/// The `lambda -> infinity` limit `1 + a / (t^{-g} - a)`.
pub fn scale_p_factor_limit(t: f64, a: f64, g: f64) -> f64 {
    1.0 + a / (t.powf(-g) - a)
}

fn angular_weighted_energy<F: Fn(f64) -> f64>(
    u: &dyn AxisymProfile,
    n: u32,
    p: f64,
    factor: F,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let rb = u.radial_breaks();
    if *rb.last().unwrap() > 1.0 + 1e-12 {
        return Err(Error::Domain(
            "energy curves are defined for functions on B_1".into(),
        ));
    }
    let domain = axisym_domain(u);
    integrate_axisym(
        |t, th| {
            let gt = u.d_r(t, th);
            let dth = u.d_theta(t, th);
            let ang = if dth == 0.0 { 0.0 } else { factor(t) * dth / t };
            let g2 = gt * gt + ang * ang;
            if g2 == 0.0 {
                0.0
            } else {
                g2.powf(0.5 * p)
            }
        },
        n,
        &domain,
        spec,
    )
}

/// Energy of the scaled function at one `lambda`, through the transformed
/// integrand in the `t` variable. `usual` and `new` compose and integrate.
pub fn scaled_energy(
    kind: ScalingKind,
    u: &dyn AxisymProfile,
    n: u32,
    p: f64,
    lambda: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let sspec = ScalingSpec::new(kind, lambda)?;
    let nf = n as f64;
    match kind {
        ScalingKind::ScaleN { .. } => {
            // L^N energy: |v_t w + (lambda t)^{-1} grad_S v|^N t^{N-1}
            angular_weighted_energy(u, n, nf, |_| 1.0 / lambda, spec)
        }
        ScalingKind::ScaleP { a } => {
            let g = (nf - p) / (p - 1.0);
            angular_weighted_energy(u, n, p, |t| scale_p_factor(t, lambda, a, g), spec)
        }
        ScalingKind::Usual | ScalingKind::New { .. } => {
            let rb = u.radial_breaks();
            let scaled = apply_scaling_axisym(sspec, u, nf, p, *rb.last().unwrap())?;
            let params = crate::params::ProblemParams {
                n,
                p,
                s: 0.0,
                radius: *rb.last().unwrap(),
                a: 0.0,
                outer: crate::params::OuterRadius::Infinite,
            };
            crate::functionals::dirichlet_energy_axisym(&scaled, &params, spec)
        }
    }
}

/// `(lambda, energy, error)` along a grid, evaluated in parallel.
pub fn scaled_energy_curve(
    kind: ScalingKind,
    u: &dyn AxisymProfile,
    n: u32,
    p: f64,
    lambdas: &[f64],
    spec: &QuadratureSpec,
) -> Result<Vec<CurvePoint>> {
    let results: Vec<Result<CurvePoint>> = lambdas
        .par_iter()
        .map(|&lambda| {
            let e = scaled_energy(kind, u, n, p, lambda, spec)?;
            Ok(CurvePoint {
                lambda,
                energy: e.value,
                error: e.error,
            })
        })
        .collect();
    results.into_iter().collect()
}

/// The limiting `scale_p` energy as `lambda -> infinity`.
pub fn scale_p_limit_energy(
    u: &dyn AxisymProfile,
    n: u32,
    p: f64,
    a: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let g = (n as f64 - p) / (p - 1.0);
    angular_weighted_energy(u, n, p, |t| scale_p_factor_limit(t, a, g), spec)
}

/// Certifies divergence of the `scale_n` energies along a decreasing grid:
/// requires angular content and strict growth at every step.
pub fn certify_scale_n_growth(points: &[CurvePoint], u: &dyn AxisymProfile) -> Result<bool> {
    if angular_content(u) < 1e-12 {
        return Err(Error::Domain(
            "the test function has no angular dependence".into(),
        ));
    }
    Ok(points.windows(2).all(|w| w[1].energy > w[0].energy))
}

pub fn write_curve_csv(path: &Path, points: &[CurvePoint]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for pt in points {
        w.serialize(pt)?;
    }
    w.flush()?;
    Ok(())
}
