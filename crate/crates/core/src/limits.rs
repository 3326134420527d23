//! Large-dimension limit of the Sobolev constant transported to `R^N`, and the
//! weighted integral that tends to the Hardy form.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::RadialProfile;
use crate::params::{ln_gamma_pos, ln_sobolev_constant, ln_sphere_area, sphere_area};
use crate::quadrature::{integrate_support, Estimate, QuadratureSpec};
use crate::transforms::{
    default_identities, verify_norm_identity, IdentityReport, Side, TransformMap,
};

/// `c(m) = C_{m,p,0} (w_{N-1}/w_{m-1})^{p/m} ((N-p)/(m-p))^{p - p/m}`,
/// evaluated entirely in log space.
pub fn c_of_m(m: f64, n: u32, p: f64) -> Result<f64> {
    Ok(ln_c_of_m(m, n, p)?.exp())
}

pub fn ln_c_of_m(m: f64, n: u32, p: f64) -> Result<f64> {
    let nd = n as f64;
    if !(p > 1.0 && nd > p && m > nd) {
        return Err(Error::InvalidParams(format!(
            "need m > N > p > 1, got m = {m}, N = {n}, p = {p}"
        )));
    }
    let ratio = ln_sphere_area(nd) - ln_sphere_area(m);
    Ok(ln_sobolev_constant(m, p)? + p / m * ratio + (p - p / m) * ((nd - p) / (m - p)).ln())
}

/// `((N-p)/p)^p`.
pub fn hardy_target(n: u32, p: f64) -> f64 {
    ((n as f64 - p) / p).powf(p)
}

/// `Gamma(t) / (sqrt(2 pi) t^{t-1/2} e^{-t})`.
pub fn stirling_ratio(t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain("stirling ratio needs t > 0".into()));
    }
    let ln_stirling = 0.5 * (2.0 * std::f64::consts::PI).ln() + (t - 0.5) * t.ln() - t;
    Ok((ln_gamma_pos(t) - ln_stirling).exp())
}

/// Values along an `m`-grid and their relative gaps to a target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitCurve {
    pub m: Vec<f64>,
    pub values: Vec<f64>,
    pub target: f64,
    pub gaps: Vec<f64>,
}

impl LimitCurve {
    fn from_values(m: Vec<f64>, values: Vec<f64>, target: f64) -> Self {
        let gaps = values.iter().map(|&v| relative_gap(v, target)).collect();
        LimitCurve {
            m,
            values,
            target,
            gaps,
        }
    }

    /// Whether the gaps decrease from index `from` on.
    pub fn decreasing_from(&self, from: usize) -> bool {
        self.gaps[from.min(self.gaps.len())..]
            .windows(2)
            .all(|w| w[1] < w[0])
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["m", "c", "gap"])?;
        for ((m, c), g) in self.m.iter().zip(&self.values).zip(&self.gaps) {
            w.write_record([format!("{m}"), format!("{c:.15e}"), format!("{g:.6e}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn relative_gap(v: f64, target: f64) -> f64 {
    if target == 0.0 {
        (v - target).abs()
    } else {
        (v - target).abs() / target.abs()
    }
}

/// `c(m)` along `m_grid` against `((N-p)/p)^p`.
pub fn limit_curve(m_grid: &[f64], n: u32, p: f64) -> Result<LimitCurve> {
    let values = m_grid
        .par_iter()
        .map(|&m| c_of_m(m, n, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(LimitCurve::from_values(
        m_grid.to_vec(),
        values,
        hardy_target(n, p),
    ))
}

/// `L(m)` for a fixed `w` on `R^N`, with the Hardy form as target and the
/// energy it must stay below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedLimit {
    pub curve: LimitCurve,
    pub energy: f64,
    pub energy_err: f64,
    pub below_energy: Vec<bool>,
}

fn radial_moment<F: Fn(f64) -> f64>(
    f: F,
    w: &dyn RadialProfile,
    n: u32,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let nm1 = n as i32 - 1;
    let e = integrate_support(
        |r| {
            let v = f(r);
            if v == 0.0 {
                0.0
            } else {
                v * r.powi(nm1)
            }
        },
        w.support(),
        &w.breaks(),
        spec,
    )?;
    Ok(e.scale(sphere_area(n as f64)))
}

/// `L(m) = c(m) (int |w|^{mp/(m-p)} |y|^{-(m-N)p/(m-p)} dy)^{(m-p)/m}` along
/// `m_grid`, against `((N-p)/p)^p int |w|^p |y|^{-p} dy`.
pub fn weighted_limit_check(
    w: &dyn RadialProfile,
    m_grid: &[f64],
    n: u32,
    p: f64,
    spec: &QuadratureSpec,
) -> Result<WeightedLimit> {
    let nd = n as f64;
    let energy = radial_moment(|r| w.deriv(r).abs().powf(p), w, n, spec)?;
    let hardy = radial_moment(|r| w.value(r).abs().powf(p) * r.powf(-p), w, n, spec)?;
    let target = hardy_target(n, p) * hardy.value;
    let values = m_grid
        .par_iter()
        .map(|&m| {
            let q = m * p / (m - p);
            let k = (m - nd) * p / (m - p);
            let integral = radial_moment(|r| w.value(r).abs().powf(q) * r.powf(-k), w, n, spec)?;
            Ok(c_of_m(m, n, p)? * integral.value.powf((m - p) / m))
        })
        .collect::<Result<Vec<f64>>>()?;
    let slack = energy.error + 1e-9 * energy.value;
    let below_energy = values.iter().map(|&l| l <= energy.value + slack).collect();
    Ok(WeightedLimit {
        curve: LimitCurve::from_values(m_grid.to_vec(), values, target),
        energy: energy.value,
        energy_err: energy.error,
        below_energy,
    })
}

/// Both identities of the dimension-changing map, with `w` given on `R^N`
/// and transported to `R^m`.
pub fn verify_s_another(
    m: f64,
    n: u32,
    p: f64,
    w: &dyn RadialProfile,
    spec: &QuadratureSpec,
) -> Result<Vec<IdentityReport>> {
    let map = TransformMap::dim(n, m, p)?;
    default_identities(&map)
        .into_iter()
        .map(|id| verify_norm_identity(&map, w, Side::Outer, id, spec))
        .collect()
}
