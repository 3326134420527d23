//! Deterministic integration for integrands with algebraic endpoint
//! singularities.
//!
//! Every interval is split at its breakpoints; the first and last segments
//! are graded towards the outer endpoints through `x = lo + h u^q` (and its
//! mirror), which turns an endpoint singularity `x^{-sigma}` into a bounded
//! integrand once `q (1 - sigma) >= 1`. The graded segments are then
//! integrated by globally adaptive 21-point Gauss-Kronrod bisection. Nodes
//! are strictly interior; a node that rounds onto an endpoint contributes
//! nothing.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::sphere_area;

// Gauss-Kronrod 10/21 abscissae and weights (QUADPACK qk21).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Ten-point Gauss-Legendre rule on `[0, 1]` as `(node, weight)` pairs.
pub(crate) fn gauss_legendre_unit() -> [(f64, f64); 10] {
    let mut out = [(0.0, 0.0); 10];
    for (i, &w) in WG.iter().enumerate() {
        let x = XGK[2 * i + 1];
        out[2 * i] = (0.5 * (1.0 - x), 0.5 * w);
        out[2 * i + 1] = (0.5 * (1.0 + x), 0.5 * w);
    }
    out
}

/// Integration settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Subdivision budget on top of the two initial panels per segment.
    pub max_panels: usize,
    /// Grading exponent at the lower endpoint (1 = uniform).
    pub grading_lo: f64,
    /// Grading exponent at the upper endpoint.
    pub grading_hi: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-9,
            abs_tol: 0.0,
            max_panels: 20_000,
            grading_lo: 3.0,
            grading_hi: 3.0,
        }
    }
}

impl QuadratureSpec {
    /// Default tolerance for the potential parameter `a`: `1e-7` once the
    /// weight is near-singular (`a > 0.9`), `1e-9` otherwise.
    pub fn for_potential(a: f64) -> Self {
        let mut spec = Self::default();
        if a > 0.9 {
            spec.rel_tol = 1e-7;
        }
        spec
    }

    /// Grading exponents `max(2, 2/(1 - sigma))` for endpoint singularities
    /// of order `sigma < 1` at each end.
    pub fn with_singularities(mut self, sigma_lo: f64, sigma_hi: f64) -> Self {
        self.grading_lo = grading_for(sigma_lo);
        self.grading_hi = grading_for(sigma_hi);
        self
    }

    pub fn with_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_grading(mut self, lo: f64, hi: f64) -> Self {
        self.grading_lo = lo;
        self.grading_hi = hi;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0)
            || self.max_panels < 1
            || !(self.grading_lo >= 1.0)
            || !(self.grading_hi >= 1.0)
        {
            return Err(Error::InvalidParams(format!(
                "bad quadrature spec {self:?}"
            )));
        }
        Ok(())
    }
}

/// Grading exponent for an endpoint singularity of order `sigma`.
pub fn grading_for(sigma: f64) -> f64 {
    if sigma <= 0.0 {
        2.0
    } else {
        (2.0 / (1.0 - sigma)).max(2.0)
    }
}

/// A value together with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn zero() -> Self {
        Estimate {
            value: 0.0,
            error: 0.0,
        }
    }

    pub fn scale(self, c: f64) -> Self {
        Estimate {
            value: c * self.value,
            error: c.abs() * self.error,
        }
    }

    pub fn add(self, other: Estimate) -> Self {
        Estimate {
            value: self.value + other.value,
            error: self.error + other.error,
        }
    }

    pub fn rel_error(&self) -> f64 {
        if self.value == 0.0 {
            if self.error == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.error / self.value.abs()
        }
    }
}

/// A quadrature node: position plus its accurately known distance to the
/// upper end of the whole interval.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Node {
    pub x: f64,
    pub to_hi: f64,
}

#[derive(Debug, Clone, Copy)]
enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    x0: f64,
    x1: f64,
    half: f64,
    side: Side,
    q: f64,
    /// Distance from `x1` to the overall upper endpoint.
    beyond: f64,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    piece: usize,
    ua: f64,
    ub: f64,
    value: f64,
    error: f64,
    abs: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.piece.cmp(&self.piece))
            .then_with(|| other.ua.total_cmp(&self.ua))
    }
}

fn eval_panel<F: FnMut(Node) -> f64>(
    f: &mut F,
    pieces: &[Piece],
    piece: usize,
    ua: f64,
    ub: f64,
    gap_aware: bool,
) -> Result<Panel> {
    let pc = pieces[piece];
    let mid = 0.5 * (ua + ub);
    let hl = 0.5 * (ub - ua);
    let mut eval = |xi: f64| -> Result<f64> {
        let u = mid + hl * xi;
        if u <= 0.0 {
            return Ok(0.0);
        }
        let g = if pc.q == 1.0 { u } else { u.powf(pc.q) };
        let d = pc.half * g;
        let jac = if pc.q == 1.0 {
            pc.half
        } else {
            pc.half * pc.q * g / u
        };
        let (x, to_hi) = match pc.side {
            Side::Left => (pc.x0 + d, pc.beyond + (pc.x1 - pc.x0 - d)),
            Side::Right => (pc.x1 - d, pc.beyond + d),
        };
        // A node that rounds onto `x1` still has an exact `to_hi`, which a
        // gap-aware integrand can use.
        let inside = x > pc.x0 && (x < pc.x1 || (gap_aware && to_hi > 0.0));
        if !inside || d == 0.0 || jac == 0.0 {
            return Ok(0.0);
        }
        let y = f(Node { x, to_hi });
        if !y.is_finite() {
            return Err(Error::NonFinite(x));
        }
        Ok(y * jac)
    };
    let fc = eval(0.0)?;
    let mut kron = fc * WGK[10];
    let mut gauss = 0.0;
    let mut abs = (fc * WGK[10]).abs();
    for (j, &x) in XGK.iter().take(10).enumerate() {
        let f1 = eval(-x)?;
        let f2 = eval(x)?;
        kron += WGK[j] * (f1 + f2);
        abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    Ok(Panel {
        piece,
        ua,
        ub,
        value: kron * hl,
        error: ((kron - gauss) * hl).abs(),
        abs: abs * hl.abs(),
    })
}

fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Core engine: integrates `f` over `[lo, hi]` with interior breakpoints.
/// With `gap_aware`, nodes closer to `hi` than its rounding are kept.
pub(crate) fn integrate_nodes<F: FnMut(Node) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    spec: &QuadratureSpec,
    gap_aware: bool,
) -> Result<Estimate> {
    spec.validate()?;
    if !(lo.is_finite() && hi.is_finite()) || hi < lo {
        return Err(Error::Domain(format!("bad interval [{lo}, {hi}]")));
    }
    if hi == lo {
        return Ok(Estimate::zero());
    }
    let mut pts = vec![lo];
    let mut inner: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&b| b > lo && b < hi)
        .collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    pts.extend(inner);
    pts.push(hi);

    let nseg = pts.len() - 1;
    let mut pieces = Vec::with_capacity(2 * nseg);
    for i in 0..nseg {
        let (x0, x1) = (pts[i], pts[i + 1]);
        let q_lo = if i == 0 { spec.grading_lo } else { 1.0 };
        let q_hi = if i == nseg - 1 { spec.grading_hi } else { 1.0 };
        let beyond = hi - x1;
        let xm = 0.5 * (x0 + x1);
        let half = 0.5 * (x1 - x0);
        // Left half graded at x0, right half graded at x1.
        pieces.push(Piece {
            x0,
            x1: xm,
            half,
            side: Side::Left,
            q: q_lo,
            beyond: beyond + (x1 - xm),
        });
        pieces.push(Piece {
            x0: xm,
            x1,
            half,
            side: Side::Right,
            q: q_hi,
            beyond,
        });
    }

    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut total_abs = 0.0;
    for k in 0..pieces.len() {
        let panel = eval_panel(&mut f, &pieces, k, 0.0, 1.0, gap_aware)?;
        total += panel.value;
        total_err += panel.error;
        total_abs += panel.abs;
        heap.push(panel);
    }
    let mut count = heap.len();
    loop {
        let tol = spec
            .abs_tol
            .max(spec.rel_tol * total.abs())
            .max(50.0 * f64::EPSILON * total_abs);
        if total_err <= tol {
            break;
        }
        if count >= spec.max_panels + pieces.len() {
            return Err(Error::NonConvergence {
                panels: count,
                estimate: total,
                error: total_err,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let um = 0.5 * (worst.ua + worst.ub);
        if worst.ub - worst.ua < 1e-13 {
            return Err(Error::NonConvergence {
                panels: count,
                estimate: total,
                error: total_err,
            });
        }
        let left = eval_panel(&mut f, &pieces, worst.piece, worst.ua, um, gap_aware)?;
        let right = eval_panel(&mut f, &pieces, worst.piece, um, worst.ub, gap_aware)?;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        total_abs += left.abs + right.abs - worst.abs;
        total_err = total_err.max(0.0);
        heap.push(left);
        heap.push(right);
        count += 1;
    }

    let mut panels = heap.into_vec();
    panels.sort_by(|a, b| a.piece.cmp(&b.piece).then(a.ua.total_cmp(&b.ua)));
    let values: Vec<f64> = panels.iter().map(|p| p.value).collect();
    let errors: Vec<f64> = panels.iter().map(|p| p.error).collect();
    Ok(Estimate {
        value: pairwise_sum(&values),
        error: pairwise_sum(&errors),
    })
}

/// `int_lo^hi f(x) dx` with breakpoints; the graded endpoints are `lo`, `hi`.
pub fn integrate_interval<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    integrate_nodes(|n| f(n.x), lo, hi, breaks, spec, false)
}

/// `int_lo^hi f(x, hi - x) dx`: the integrand also receives the distance to
/// `hi`, exact even where `x` itself rounds to `hi`. Use it for integrands
/// singular at the upper end, written in terms of that distance.
pub fn integrate_interval_gap<F: FnMut(f64, f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    integrate_nodes(|n| f(n.x, n.to_hi), lo, hi, breaks, spec, true)
}

/// `int_0^R f(r) dr`.
pub fn integrate_radial<F: FnMut(f64) -> f64>(
    f: F,
    radius: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    integrate_interval(f, 0.0, radius, &[], spec)
}

/// `int_0^inf f(t) dt` through `t = u/(1-u)` on `(0,1)`.
///
/// Fails with [`Error::NonDecay`] unless `t |f(t)|` decreases between
/// `t = 1e8` and `t = 1e16`.
pub fn integrate_tail<F: FnMut(f64) -> f64>(
    mut f: F,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let probe = |f: &mut F, t: f64| -> Result<f64> {
        let v = f(t);
        if !v.is_finite() {
            return Err(Error::NonFinite(t));
        }
        Ok(t * v.abs())
    };
    let near = probe(&mut f, 1e8)?;
    let far = probe(&mut f, 1e16)?;
    if far > 0.0 && far >= near {
        return Err(Error::NonDecay);
    }
    let ubreaks: Vec<f64> = breaks
        .iter()
        .filter(|&&b| b > 0.0 && b.is_finite())
        .map(|&b| b / (1.0 + b))
        .collect();
    integrate_nodes(
        |n| {
            let one_minus = n.to_hi;
            let t = n.x / one_minus;
            if !t.is_finite() {
                return 0.0;
            }
            let v = f(t);
            if v == 0.0 {
                0.0
            } else {
                v / (one_minus * one_minus)
            }
        },
        0.0,
        1.0,
        &ubreaks,
        spec,
        true,
    )
}

/// `int_0^support f(r) dr`, dispatching to [`integrate_tail`] for an infinite support.
pub fn integrate_support<F: FnMut(f64) -> f64>(
    f: F,
    support: f64,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    if support.is_infinite() {
        integrate_tail(f, breaks, spec)
    } else {
        integrate_interval(f, 0.0, support, breaks, spec)
    }
}

/// `int_0^infinity h(R e^{-L}, L) dL`: a radial integral written in the
/// logarithmic radius `L = ln(R/r)`. `h` receives both `r` and `L`, so the
/// integrand stays defined after `r` underflows to zero.
pub fn integrate_log_radius<F: FnMut(f64, f64) -> f64>(
    mut h: F,
    radius: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    integrate_tail(|l| h(radius * (-l).exp(), l), &[], spec)
}

/// Domain description for [`integrate_axisym`].
pub struct AxisymDomain<'a> {
    /// Radial breakpoints, including both ends of the radial range.
    pub radial: Vec<f64>,
    /// Polar-angle breakpoints at radius `r`, including both ends; the
    /// integrand is taken as zero outside them.
    pub angular: Box<dyn Fn(f64) -> Vec<f64> + 'a>,
}

impl<'a> AxisymDomain<'a> {
    pub fn ball(radius: f64) -> Self {
        AxisymDomain {
            radial: vec![0.0, radius],
            angular: Box::new(|_| vec![0.0, PI]),
        }
    }
}

/// `int g(r, theta) dx` over an axisymmetric domain in `R^N`:
/// `w_{N-2} int int g r^{N-1} sin^{N-2}(theta) dtheta dr`.
pub fn integrate_axisym<G: Fn(f64, f64) -> f64>(
    g: G,
    n: u32,
    domain: &AxisymDomain<'_>,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    if n < 2 {
        return Err(Error::Domain(
            "axisymmetric integration needs N >= 2".into(),
        ));
    }
    if domain.radial.len() < 2 {
        return Err(Error::Domain("radial domain needs two endpoints".into()));
    }
    let nm1 = (n - 1) as i32;
    let nm2 = (n - 2) as i32;
    let lo = domain.radial[0];
    let hi = *domain.radial.last().unwrap();
    let angular_integral = |r: f64, spec: &QuadratureSpec| -> Result<Estimate> {
        let ab = (domain.angular)(r);
        if ab.len() < 2 || ab[ab.len() - 1] <= ab[0] {
            return Ok(Estimate::zero());
        }
        integrate_interval(
            |th| g(r, th) * th.sin().powi(nm2),
            ab[0],
            ab[ab.len() - 1],
            &ab[1..ab.len() - 1],
            spec,
        )
    };
    // Magnitude probe: the inner integrals get an absolute floor relative to
    // the largest angular integral, so that near-empty slices at the edges of
    // the support do not have to be resolved to full relative accuracy.
    let mut scale: f64 = 0.0;
    let probe_spec = QuadratureSpec {
        grading_lo: 1.0,
        grading_hi: 1.0,
        rel_tol: 1e-6,
        ..*spec
    };
    for w in domain.radial.windows(2) {
        for k in 1..=3 {
            let r = w[0] + (w[1] - w[0]) * k as f64 / 4.0;
            if r > 0.0 {
                if let Ok(e) = angular_integral(r, &probe_spec) {
                    scale = scale.max(e.value.abs());
                }
            }
        }
    }
    let inner_spec = QuadratureSpec {
        grading_lo: 1.0,
        grading_hi: 1.0,
        rel_tol: spec.rel_tol * 0.1,
        abs_tol: spec.abs_tol.max(spec.rel_tol * 1e-3 * scale),
        ..*spec
    };
    let mut inner_err: f64 = 0.0;
    let mut failure: Option<Error> = None;
    let outer = integrate_interval(
        |r| {
            if failure.is_some() {
                return 0.0;
            }
            match angular_integral(r, &inner_spec) {
                Ok(e) => {
                    inner_err = inner_err.max(e.error);
                    r.powi(nm1) * e.value
                }
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            }
        },
        lo,
        hi,
        &domain.radial[1..domain.radial.len() - 1],
        spec,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let outer = outer?;
    let omega = sphere_area((n - 1) as f64);
    // int_lo^hi r^{N-1} dr bounds the accumulated inner error
    let shell = (hi.powi(n as i32) - lo.powi(n as i32)) / n as f64;
    Ok(Estimate {
        value: omega * outer.value,
        error: omega * (outer.error + inner_err * shell),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn kronrod_rule_exact_on_polynomials() {
        let spec = QuadratureSpec {
            grading_lo: 1.0,
            grading_hi: 1.0,
            ..Default::default()
        };
        for k in 0..=15 {
            let e = integrate_interval(|x| x.powi(k), 0.0, 1.0, &[], &spec).unwrap();
            assert!(close(e.value, 1.0 / (k as f64 + 1.0), 1e-14), "k = {k}");
        }
    }

    #[test]
    fn radial_examples() {
        let spec = QuadratureSpec::default();
        assert!(close(
            integrate_radial(|r| r * r, 1.0, &spec).unwrap().value,
            1.0 / 3.0,
            1e-12
        ));
        let s = spec.with_singularities(0.5, 0.0);
        assert!(close(
            integrate_radial(|r| r.powf(-0.5), 1.0, &s).unwrap().value,
            2.0,
            1e-9
        ));
        let s = spec.with_singularities(0.5, 0.5);
        let v = integrate_radial(|r| 1.0 / (r * (1.0 - r)).sqrt(), 1.0, &s)
            .unwrap()
            .value;
        assert!(close(v, PI, 1e-9), "{v}");
    }

    #[test]
    fn tail_examples() {
        let spec = QuadratureSpec::default();
        let v = integrate_tail(|t| t * t * (1.0 + t).powi(-4), &[], &spec)
            .unwrap()
            .value;
        assert!(close(v, 1.0 / 3.0, 1e-9));
        let v = integrate_tail(|t| t * (1.0 + t).powi(-4), &[], &spec)
            .unwrap()
            .value;
        assert!(close(v, 1.0 / 6.0, 1e-9));
        let v = integrate_tail(|t| (-t).exp(), &[], &spec).unwrap().value;
        assert!(close(v, 1.0, 1e-9));
        assert_eq!(
            integrate_tail(|t| 1.0 / (1.0 + t), &[], &spec).unwrap_err(),
            Error::NonDecay
        );
    }

    #[test]
    fn non_convergence_and_non_finite_are_reported() {
        let spec = QuadratureSpec {
            max_panels: 4,
            grading_lo: 1.0,
            ..Default::default()
        };
        let e = integrate_radial(|r| r.powf(-0.9), 1.0, &spec).unwrap_err();
        assert!(matches!(e, Error::NonConvergence { .. }));
        let e = integrate_radial(
            |r| if r > 0.5 { f64::NAN } else { 1.0 },
            1.0,
            &QuadratureSpec::default(),
        );
        assert!(matches!(e, Err(Error::NonFinite(_))));
    }

    #[test]
    fn axisym_examples() {
        let spec = QuadratureSpec::default();
        let ball = AxisymDomain::ball(1.0);
        let vol = integrate_axisym(|_, _| 1.0, 3, &ball, &spec).unwrap().value;
        assert!(close(vol, 4.0 * PI / 3.0, 1e-12));
        let odd = integrate_axisym(|_, th| th.cos(), 3, &ball, &spec)
            .unwrap()
            .value;
        assert!(odd.abs() < 1e-12);
        for n in [2u32, 3, 4, 5] {
            let g = |r: f64| (1.0 - r * r).powi(2) + r;
            let full = integrate_axisym(|r, _| g(r), n, &ball, &spec)
                .unwrap()
                .value;
            let nm1 = (n - 1) as i32;
            let radial = sphere_area(n as f64)
                * integrate_radial(|r| g(r) * r.powi(nm1), 1.0, &spec)
                    .unwrap()
                    .value;
            assert!(close(full, radial, 1e-12), "n = {n}: {full} vs {radial}");
        }
    }

    #[test]
    fn repeated_runs_are_bit_identical() {
        let spec = QuadratureSpec::default().with_singularities(0.5, 0.5);
        let f = |r: f64| (r * (1.0 - r)).powf(-0.5) * (3.0 * r).cos();
        let a = integrate_radial(f, 1.0, &spec).unwrap();
        let b = integrate_radial(f, 1.0, &spec).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.error.to_bits(), b.error.to_bits());
    }

    #[test]
    fn gap_aware_route_keeps_the_mass_next_to_the_upper_end() {
        // B(0.1, 0.1) = 19.714639489050160539...
        let exact = 19.714_639_489_050_16;
        let spec = QuadratureSpec::default().with_singularities(0.9, 0.9);
        let v = integrate_interval_gap(|x, g| (x * g).powf(-0.9), 0.0, 1.0, &[], &spec)
            .unwrap()
            .value;
        assert!(close(v, exact, 1e-9), "{v}");
        // through x alone, 1 - x cannot resolve the last 1e-16 of the interval
        let lossy = integrate_interval(|x| (x * (1.0 - x)).powf(-0.9), 0.0, 1.0, &[], &spec);
        assert!(lossy.map_or(true, |e| !close(e.value, exact, 1e-3)));
    }

    #[test]
    fn halving_the_tolerance_never_increases_the_error() {
        // B(1/2,1/2), B(1/3,2/3), B(1.3,0.3) = 3.0048118418655074487...
        let cases: [(fn(f64, f64) -> f64, f64, f64, f64); 3] = [
            (|x, g| (x * g).powf(-0.5), 0.5, 0.5, PI),
            (
                |x, g| x.powf(-2.0 / 3.0) * g.powf(-1.0 / 3.0),
                2.0 / 3.0,
                1.0 / 3.0,
                2.0 * PI / 3f64.sqrt(),
            ),
            (
                |x, g| x.powf(0.3) * g.powf(-0.7),
                0.0,
                0.7,
                3.004_811_841_865_507_4,
            ),
        ];
        for (f, lo, hi, exact) in cases {
            let mut last = f64::INFINITY;
            for tol in [1e-5, 5e-6, 2.5e-6, 1.25e-6] {
                let spec = QuadratureSpec::default()
                    .with_singularities(lo, hi)
                    .with_tol(tol);
                let v = integrate_interval_gap(f, 0.0, 1.0, &[], &spec)
                    .unwrap()
                    .value;
                let err = (v - exact).abs();
                assert!(err <= last.max(1e-14), "tol {tol}: {err} after {last}");
                last = err;
            }
        }
    }
}
