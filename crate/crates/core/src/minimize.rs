//! Upper bounds on the infima: descent on a radial grid, derivative-free
//! search over trial families, the symmetry-breaking scan and the decay fit.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::{
    boundary_bump, graded_mesh, AxisymProfile, BubbleShape, Bump, BumpProfile, ExplicitRadial,
    GridFunction, Interp, IokuExtremal, Lifted, RadialProfile,
};
use crate::functionals::{
    bump_quotient, potential_unchecked, rayleigh_quotient, rayleigh_quotient_axisym, QuotientReport,
};
use crate::params::{hardy_sobolev_constant, ProblemParams, RawParams};
use crate::quadrature::{gauss_legendre_unit, integrate_interval, QuadratureSpec};

/// Radial grid for the discrete quotient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Number of elements; the grid has `nodes + 1` points including `R`.
    pub nodes: usize,
    pub grading_lo: f64,
    pub grading_hi: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            nodes: 2000,
            grading_lo: 3.0,
            grading_hi: 3.0,
        }
    }
}

/// Stopping and step-size settings of the descent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowOptions {
    pub max_steps: usize,
    pub initial_step: f64,
    /// Largest step tried after a run of accepted steps.
    pub max_step: f64,
    pub rel_change_tol: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            max_steps: 5000,
            initial_step: 0.1,
            max_step: 1.0,
            rel_change_tol: 1e-8,
        }
    }
}

/// A minimization outcome: the best quotient found and the function that
/// attains it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MinimizeResult {
    pub quotient: f64,
    pub quotient_err: f64,
    /// Value seen by the search itself (discrete or reduced tolerance).
    pub search_quotient: f64,
    /// The quotient was re-evaluated at full quadrature tolerance.
    pub certified: bool,
    pub parameters: BTreeMap<String, f64>,
    pub trial: Option<Trial>,
    pub grid: Option<GridFunction>,
    pub trace: Vec<f64>,
    pub evaluations: usize,
    pub stop_reason: String,
    pub description: String,
    pub params: RawParams,
}

impl MinimizeResult {
    /// Rebuilds the stored function and evaluates its quotient, for trials by
    /// direct quadrature in origin-centred coordinates.
    pub fn reevaluate(
        &self,
        params: &ProblemParams,
        spec: &QuadratureSpec,
    ) -> Result<QuotientReport> {
        if let Some(trial) = &self.trial {
            return trial.quotient_direct(params, spec);
        }
        match &self.grid {
            Some(g) => rayleigh_quotient(&g.clone().with_linear(), params, spec),
            None => Err(Error::Domain("result stores no function".into())),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }
}

impl GridFunction {
    fn with_linear(self) -> GridFunction {
        if self.interp == Interp::Linear {
            return self;
        }
        GridFunction::new(self.nodes, self.values, Interp::Linear, self.grading)
            .expect("grid already validated")
    }
}

/// Continuous piecewise-linear radial quotient on a graded grid.
///
/// Unknowns are the values at all nodes except the last (`u(R) = 0`); the
/// function is constant on `[0, r_0]`. The energy is exact for this space and
/// the weighted norm uses ten Gauss points per element.
#[derive(Debug, Clone)]
pub struct DiscreteQuotient {
    nodes: Vec<f64>,
    /// `omega int_{r_i}^{r_{i+1}} r^{N-1} dr`.
    mass: Vec<f64>,
    inv_h: Vec<f64>,
    /// Per element, ten `(phi_left, phi_right, weight)` triples.
    gauss: Vec<[f64; 3]>,
    /// Weighted measure of the core `[0, r_0]`.
    core: f64,
    p: f64,
    q: f64,
}

impl DiscreteQuotient {
    pub fn new(params: &ProblemParams, grid: &GridSpec) -> Result<Self> {
        if grid.nodes < 4 {
            return Err(Error::Domain(
                "radial grid needs at least 4 elements".into(),
            ));
        }
        let r = params.radius;
        let nodes: Vec<f64> =
            graded_mesh(0.0, r, grid.nodes, grid.grading_lo, grid.grading_hi).split_off(1);
        let n = params.n as i32;
        let omega = params.sphere_area();
        let mut mass = Vec::with_capacity(nodes.len() - 1);
        let mut inv_h = Vec::with_capacity(nodes.len() - 1);
        let mut gauss = Vec::with_capacity(10 * (nodes.len() - 1));
        let rule = gauss_legendre_unit();
        for w in nodes.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let h = hi - lo;
            // hi^N - lo^N without cancellation
            let sum: f64 = (0..n).map(|k| hi.powi(k) * lo.powi(n - 1 - k)).sum();
            mass.push(omega * h * sum / n as f64);
            inv_h.push(1.0 / h);
            for &(x, wt) in &rule {
                let rr = lo + h * x;
                let weight = omega * h * wt * potential_unchecked(rr, params) * rr.powi(n - 1);
                gauss.push([1.0 - x, x, weight]);
            }
        }
        let r0 = nodes[0];
        let spec = QuadratureSpec::default().with_grading(3.0, 1.0);
        let core = omega
            * integrate_interval(
                |x| potential_unchecked(x, params) * x.powi(n - 1),
                0.0,
                r0,
                &[],
                &spec,
            )?
            .value;
        Ok(DiscreteQuotient {
            nodes,
            mass,
            inv_h,
            gauss,
            core,
            p: params.p,
            q: params.p_star(),
        })
    }

    /// Number of unknowns.
    pub fn len(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    fn at(u: &[f64], j: usize) -> f64 {
        if j < u.len() {
            u[j]
        } else {
            0.0
        }
    }

    pub fn energy(&self, u: &[f64]) -> f64 {
        (0..self.mass.len())
            .map(|i| {
                ((Self::at(u, i + 1) - u[i]) * self.inv_h[i])
                    .abs()
                    .powf(self.p)
                    * self.mass[i]
            })
            .sum()
    }

    pub fn denominator(&self, u: &[f64]) -> f64 {
        let mut d = u[0].abs().powf(self.q) * self.core;
        for i in 0..self.mass.len() {
            let (a, b) = (u[i], Self::at(u, i + 1));
            for g in &self.gauss[10 * i..10 * i + 10] {
                d += g[2] * (a * g[0] + b * g[1]).abs().powf(self.q);
            }
        }
        d
    }

    pub fn quotient(&self, u: &[f64]) -> f64 {
        self.energy(u) / self.denominator(u).powf(self.p / self.q)
    }

    /// Quotient and its gradient with respect to the nodal values.
    pub fn value_and_gradient(&self, u: &[f64]) -> (f64, Vec<f64>) {
        let m = self.len();
        let mut ge = vec![0.0; m];
        let mut gd = vec![0.0; m];
        let mut e = 0.0;
        let mut d = u[0].abs().powf(self.q) * self.core;
        gd[0] += self.q * signed_pow(u[0], self.q - 1.0) * self.core;
        for i in 0..self.mass.len() {
            let (a, b) = (u[i], Self::at(u, i + 1));
            let slope = (b - a) * self.inv_h[i];
            e += slope.abs().powf(self.p) * self.mass[i];
            let de = self.p * signed_pow(slope, self.p - 1.0) * self.mass[i] * self.inv_h[i];
            ge[i] -= de;
            if i + 1 < m {
                ge[i + 1] += de;
            }
            let (mut da, mut db) = (0.0, 0.0);
            for g in &self.gauss[10 * i..10 * i + 10] {
                let v = a * g[0] + b * g[1];
                d += g[2] * v.abs().powf(self.q);
                let dv = self.q * g[2] * signed_pow(v, self.q - 1.0);
                da += dv * g[0];
                db += dv * g[1];
            }
            gd[i] += da;
            if i + 1 < m {
                gd[i + 1] += db;
            }
        }
        let k = self.p / self.q;
        let scale = d.powf(-k);
        let quotient = e * scale;
        let grad = ge
            .iter()
            .zip(&gd)
            .map(|(x, y)| (x - k * e / d * y) * scale)
            .collect();
        (quotient, grad)
    }

    /// Solves `K x = g` for the `p = 2` stiffness matrix `K` of the grid.
    pub fn precondition(&self, g: &[f64]) -> Vec<f64> {
        let m = self.len();
        let k: Vec<f64> = self
            .mass
            .iter()
            .zip(&self.inv_h)
            .map(|(ms, ih)| ms * ih * ih)
            .collect();
        let mut diag: Vec<f64> = (0..m)
            .map(|j| k[j] + if j > 0 { k[j - 1] } else { 0.0 })
            .collect();
        let mut rhs = g.to_vec();
        // Thomas algorithm; off-diagonal entries are -k[j]
        for j in 1..m {
            let f = -k[j - 1] / diag[j - 1];
            diag[j] += f * k[j - 1];
            rhs[j] -= f * rhs[j - 1];
        }
        let mut x = vec![0.0; m];
        x[m - 1] = rhs[m - 1] / diag[m - 1];
        for j in (0..m - 1).rev() {
            x[j] = (rhs[j] + k[j] * x[j + 1]) / diag[j];
        }
        x
    }

    /// Nodal samples of `f` (excluding the last node).
    pub fn sample(&self, f: &dyn RadialProfile) -> Vec<f64> {
        self.nodes[..self.len()]
            .iter()
            .map(|&r| f.value(r))
            .collect()
    }

    pub fn to_grid(&self, u: &[f64], grading: &GridSpec) -> Result<GridFunction> {
        let mut values = u.to_vec();
        values.push(0.0);
        GridFunction::new(
            self.nodes.clone(),
            values,
            Interp::Linear,
            format!(
                "graded({}, {}, {})",
                grading.nodes, grading.grading_lo, grading.grading_hi
            ),
        )
    }

    fn normalize(&self, u: &mut [f64]) {
        let c = self.denominator(u).powf(-1.0 / self.q);
        u.iter_mut().for_each(|x| *x *= c);
    }
}

fn signed_pow(x: f64, e: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.signum() * x.abs().powf(e)
    }
}

/// Normalized preconditioned gradient flow for the radial quotient, started
/// from `start` sampled on the grid.
pub fn minimize_radial(
    params: &ProblemParams,
    grid: &GridSpec,
    options: &FlowOptions,
    start: &dyn RadialProfile,
) -> Result<MinimizeResult> {
    let dq = DiscreteQuotient::new(params, grid)?;
    let mut u = dq.sample(start);
    if u.iter().all(|&x| x == 0.0) {
        return Err(Error::ZeroDenominator);
    }
    dq.normalize(&mut u);
    let (mut q, mut grad) = dq.value_and_gradient(&u);
    if !q.is_finite() {
        return Err(Error::NonFinite(q));
    }
    let mut trace = vec![q];
    let mut step = options.initial_step;
    let mut stop_reason = "step budget exhausted".to_string();
    let mut evaluations = 1;
    for _ in 0..options.max_steps {
        let mut dir = dq.precondition(&grad);
        let umax = u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let dmax = dir.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if dmax == 0.0 {
            stop_reason = "zero gradient".into();
            break;
        }
        dir.iter_mut().for_each(|x| *x *= umax / dmax);
        let mut accepted = None;
        while step > 1e-14 {
            let trial: Vec<f64> = u.iter().zip(&dir).map(|(a, b)| a - step * b).collect();
            let qt = dq.quotient(&trial);
            evaluations += 1;
            if qt.is_finite() && qt < q {
                accepted = Some((trial, qt));
                break;
            }
            step *= 0.5;
        }
        let Some((mut next, qn)) = accepted else {
            stop_reason = "no decrease along the descent direction".into();
            break;
        };
        dq.normalize(&mut next);
        let change = (q - qn) / q;
        u = next;
        let (qv, g) = dq.value_and_gradient(&u);
        evaluations += 1;
        q = qv;
        grad = g;
        trace.push(q);
        step = (2.0 * step).min(options.max_step);
        if change < options.rel_change_tol {
            stop_reason = "relative change below tolerance".into();
            break;
        }
    }
    if trace.windows(2).any(|w| !(w[1] <= w[0])) {
        return Err(Error::StepFailure(
            "quotient trace is not non-increasing".into(),
        ));
    }
    let gridf = dq.to_grid(&u, grid)?;
    let mut result = MinimizeResult {
        quotient: q,
        quotient_err: f64::NAN,
        search_quotient: q,
        certified: false,
        parameters: BTreeMap::new(),
        trial: None,
        grid: Some(gridf),
        trace,
        evaluations,
        stop_reason,
        description: format!("radial descent from {}", start.describe()),
        params: params.raw(),
    };
    certify(&mut result, params);
    Ok(result)
}

fn certify(result: &mut MinimizeResult, params: &ProblemParams) {
    if let Ok(rep) = result.reevaluate(params, &QuadratureSpec::default()) {
        result.quotient = rep.quotient;
        result.quotient_err = rep.quotient_err;
        result.certified = rep.quotient.is_finite();
    }
}

/// Profile shapes available to the boundary-bump family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileChoice {
    Cone,
    Smooth,
    /// Extremal profile with a free concentration parameter.
    Bubble,
}

/// Families of admissible trial functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrialFamily {
    /// Bumps `v(|x - c e_N| / eps)` with free centre and width.
    BoundaryBump { profile: ProfileChoice },
    /// Centred extremal shape at a free scale, truncated at `R`.
    Bubble,
    /// The `a = 1` minimizers `U^lambda`.
    TransportedExtremal,
}

impl TrialFamily {
    pub fn boundary_bump(profile: ProfileChoice) -> Self {
        TrialFamily::BoundaryBump { profile }
    }

    fn name(&self) -> String {
        match self {
            TrialFamily::BoundaryBump { profile, .. } => {
                format!("boundary-bump({profile:?})").to_lowercase()
            }
            TrialFamily::Bubble => "bubble".into(),
            TrialFamily::TransportedExtremal => "transported-extremal".into(),
        }
    }

    /// Parameter box: `(name, lo, hi, logarithmic)`.
    fn axes(
        &self,
        params: &ProblemParams,
        budget: &SearchBudget,
    ) -> Vec<(&'static str, f64, f64, bool)> {
        let r = params.radius;
        match *self {
            TrialFamily::BoundaryBump { profile } => {
                let mut a = vec![
                    ("width", budget.width_floor(r), 0.25 * r, true),
                    ("offset", 0.0, 1.0, false),
                ];
                if profile == ProfileChoice::Bubble {
                    a.push(("mu", 1e-3, 1.0, true));
                }
                a
            }
            TrialFamily::Bubble => vec![("scale", 1e-4 * r, r, true)],
            TrialFamily::TransportedExtremal => vec![("lambda", 1e-2 / r, 1e2 / r, true)],
        }
    }

    fn check(&self, params: &ProblemParams, budget: &SearchBudget) -> Result<()> {
        match *self {
            TrialFamily::BoundaryBump { profile } => {
                if budget.width_floor(params.radius) >= 0.25 * params.radius {
                    return Err(Error::EmptyFamily(format!(
                        "{} cells leave no admissible bump width",
                        budget.cells
                    )));
                }
                if profile == ProfileChoice::Bubble && params.s >= params.p {
                    return Err(Error::EmptyFamily("extremal profile needs s < p".into()));
                }
            }
            TrialFamily::Bubble | TrialFamily::TransportedExtremal => {
                if params.s >= params.p {
                    return Err(Error::EmptyFamily("extremal shapes need s < p".into()));
                }
            }
        }
        Ok(())
    }

    /// The trial function for physical parameter values `x`; widths below
    /// the budget's floor are rejected.
    pub fn build(&self, params: &ProblemParams, x: &[f64], budget: &SearchBudget) -> Result<Trial> {
        let r = params.radius;
        match *self {
            TrialFamily::BoundaryBump { profile } => {
                let eps = x[0];
                if eps < budget.width_floor(r) * (1.0 - 1e-12) {
                    return Err(Error::Domain(format!(
                        "bump width {eps:e} is below the resolvable floor"
                    )));
                }
                let center = r - eps - x[1] * (r - 2.0 * eps);
                let prof = match profile {
                    ProfileChoice::Cone => BumpProfile::Cone,
                    ProfileChoice::Smooth => BumpProfile::Smooth,
                    ProfileChoice::Bubble => BumpProfile::Bubble {
                        mu: x[2],
                        shape: BubbleShape::for_params(params)?,
                    },
                };
                Ok(Trial::Bump(Bump::new(center, eps, prof, r)?))
            }
            TrialFamily::Bubble => Ok(Trial::CentredBubble {
                shape: BubbleShape::for_params(params)?,
                scale: x[0],
                support: r,
            }),
            TrialFamily::TransportedExtremal => Ok(Trial::Extremal { lambda: x[0] }),
        }
    }
}

/// A stored trial function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Trial {
    Bump(Bump),
    CentredBubble {
        shape: BubbleShape,
        scale: f64,
        support: f64,
    },
    Extremal {
        lambda: f64,
    },
}

impl Trial {
    /// Quotient through the fastest available route.
    pub fn quotient(
        &self,
        params: &ProblemParams,
        spec: &QuadratureSpec,
    ) -> Result<QuotientReport> {
        match self {
            Trial::Bump(b) => bump_quotient(b, params, spec),
            Trial::CentredBubble {
                shape,
                scale,
                support,
            } => rayleigh_quotient(
                &ExplicitRadial::truncated_bubble(*shape, *scale, *support),
                params,
                spec,
            ),
            Trial::Extremal { lambda } => {
                rayleigh_quotient(&IokuExtremal::new(params, *lambda)?, params, spec)
            }
        }
    }

    /// Quotient by direct quadrature in origin-centred coordinates.
    pub fn quotient_direct(
        &self,
        params: &ProblemParams,
        spec: &QuadratureSpec,
    ) -> Result<QuotientReport> {
        match self {
            Trial::Bump(b) => rayleigh_quotient_axisym(b, params, spec),
            other => {
                let lifted: Arc<dyn AxisymProfile> = match other {
                    Trial::CentredBubble {
                        shape,
                        scale,
                        support,
                    } => Arc::new(Lifted(ExplicitRadial::truncated_bubble(
                        *shape, *scale, *support,
                    ))),
                    Trial::Extremal { lambda } => {
                        Arc::new(Lifted(IokuExtremal::new(params, *lambda)?))
                    }
                    Trial::Bump(_) => unreachable!(),
                };
                rayleigh_quotient_axisym(lifted.as_ref(), params, spec)
            }
        }
    }
}

/// Resources of the derivative-free search.
///
/// `cells` is the number of radial cells of the resolution grid; bump
/// widths below four cell spacings are rejected as unresolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub evals_per_start: usize,
    pub cells: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            evals_per_start: 500,
            cells: 1000,
        }
    }
}

impl SearchBudget {
    pub fn doubled(self) -> Self {
        SearchBudget {
            evals_per_start: 2 * self.evals_per_start,
            cells: 2 * self.cells,
        }
    }

    pub fn width_floor(&self, radius: f64) -> f64 {
        4.0 * radius / self.cells as f64
    }
}

const STARTS: usize = 8;

/// Eight deterministic starting points in the open unit cube of dimension `d`.
fn start_points(d: usize) -> Vec<Vec<f64>> {
    (0..STARTS)
        .map(|k| match d {
            1 => vec![(k as f64 + 0.5) / STARTS as f64],
            2 => vec![((k % 4) as f64 + 0.5) / 4.0, ((k / 4) as f64 + 0.5) / 2.0],
            _ => (0..d)
                .map(|j| {
                    if j < 3 && (k >> j) & 1 == 1 {
                        0.75
                    } else {
                        0.25
                    }
                })
                .collect(),
        })
        .collect()
}

fn sigmoid(y: f64) -> f64 {
    1.0 / (1.0 + (-y).exp())
}

fn to_physical(axes: &[(&'static str, f64, f64, bool)], y: &[f64]) -> Vec<f64> {
    axes.iter()
        .zip(y)
        .map(|(&(_, lo, hi, log), &yi)| {
            let z = sigmoid(yi);
            if log {
                (lo.ln() + (hi.ln() - lo.ln()) * z).exp()
            } else {
                lo + (hi - lo) * z
            }
        })
        .collect()
}

/// Nelder-Mead on `R^d` with a hard evaluation budget.
fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: F,
    start: &[f64],
    step: f64,
    budget: usize,
) -> (Vec<f64>, f64, usize) {
    let d = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    simplex.push((start.to_vec(), f(start)));
    for j in 0..d {
        let mut x = start.to_vec();
        x[j] += step;
        let fx = f(&x);
        simplex.push((x, fx));
    }
    let mut evals = d + 1;
    let order = |s: &mut Vec<(Vec<f64>, f64)>| s.sort_by(|a, b| a.1.total_cmp(&b.1));
    while evals < budget {
        order(&mut simplex);
        let (best, worst) = (simplex[0].1, simplex[d].1);
        if (worst - best).abs() <= 1e-13 * best.abs() {
            let spread = simplex
                .iter()
                .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()));
            if spread.fold(0.0f64, f64::max) < 1e-9 {
                break;
            }
        }
        let centroid: Vec<f64> = (0..d)
            .map(|j| simplex[..d].iter().map(|(x, _)| x[j]).sum::<f64>() / d as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            (0..d)
                .map(|j| centroid[j] + t * (simplex[d].0[j] - centroid[j]))
                .collect()
        };
        let xr = along(-1.0);
        let fr = f(&xr);
        evals += 1;
        if fr < simplex[0].1 {
            let xe = along(-2.0);
            let fe = f(&xe);
            evals += 1;
            simplex[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[d - 1].1 {
            simplex[d] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[d].1 {
                let x = along(-0.5);
                let fx = f(&x);
                (x, fx)
            } else {
                let x = along(0.5);
                let fx = f(&x);
                (x, fx)
            };
            evals += 1;
            if fc < simplex[d].1.min(fr) {
                simplex[d] = (xc, fc);
            } else {
                let x0 = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    let x: Vec<f64> =
                        v.0.iter()
                            .zip(&x0)
                            .map(|(a, b)| b + 0.5 * (a - b))
                            .collect();
                    let fx = f(&x);
                    *v = (x, fx);
                }
                evals += d;
            }
        }
    }
    order(&mut simplex);
    let (x, fx) = simplex.swap_remove(0);
    (x, fx, evals)
}

/// Smallest quotient over a trial family, found by restarted Nelder-Mead and
/// re-evaluated by direct quadrature.
pub fn best_trial_quotient(
    params: &ProblemParams,
    family: &TrialFamily,
    budget: &SearchBudget,
) -> Result<MinimizeResult> {
    if budget.evals_per_start < 4 || budget.cells == 0 {
        return Err(Error::Domain("search budget too small".into()));
    }
    family.check(params, budget)?;
    let axes = family.axes(params, budget);
    let search_spec = QuadratureSpec::default().with_tol(1e-7);
    let objective = |y: &[f64]| -> f64 {
        let x = to_physical(&axes, y);
        family
            .build(params, &x, budget)
            .and_then(|t| t.quotient(params, &search_spec))
            .map(|r| r.quotient)
            .ok()
            .filter(|q| q.is_finite())
            .unwrap_or(f64::INFINITY)
    };
    let runs: Vec<(Vec<f64>, f64, usize)> = start_points(axes.len())
        .into_par_iter()
        .map(|z| {
            let y0: Vec<f64> = z.iter().map(|&t| (t / (1.0 - t)).ln()).collect();
            nelder_mead(objective, &y0, 1.0, budget.evals_per_start)
        })
        .collect();
    let evaluations = runs.iter().map(|r| r.2).sum();
    let (best_idx, best) = runs
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.1.total_cmp(&b.1).then(i.cmp(j)))
        .expect("eight starts");
    if !best.1.is_finite() {
        return Err(Error::EmptyFamily(format!(
            "no admissible member of {} evaluated",
            family.name()
        )));
    }
    let x = to_physical(&axes, &best.0);
    let trial = family.build(params, &x, budget)?;
    let parameters = axes
        .iter()
        .zip(&x)
        .map(|(a, &v)| (a.0.to_string(), v))
        .collect();
    let mut trace: Vec<f64> = runs.iter().map(|r| r.1).collect();
    trace.swap(0, best_idx);
    let mut result = MinimizeResult {
        quotient: best.1,
        quotient_err: f64::NAN,
        search_quotient: best.1,
        certified: false,
        parameters,
        trial: Some(trial.clone()),
        grid: None,
        trace,
        evaluations,
        stop_reason: "budget or simplex collapse on every start".into(),
        description: format!("{} search", family.name()),
        params: params.raw(),
    };
    if let Ok(rep) = trial.quotient_direct(params, &QuadratureSpec::default()) {
        result.quotient = rep.quotient;
        result.quotient_err = rep.quotient_err;
        result.certified = rep.quotient.is_finite();
    }
    Ok(result)
}

/// One row of the symmetry-breaking scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanRow {
    pub a: f64,
    pub best_quotient: f64,
    pub error: f64,
    pub family: String,
    pub witness: String,
    pub result: MinimizeResult,
}

/// Outcome of the scan for the smallest `a` with a non-radial witness.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AStarReport {
    /// Smallest grid value with a witness; `None` means no witness found.
    pub a_hat: Option<f64>,
    pub radial_level: f64,
    pub margin: f64,
    pub rows: Vec<ScanRow>,
}

impl AStarReport {
    pub fn witness(&self) -> Option<&ScanRow> {
        let a = self.a_hat?;
        self.rows.iter().find(|r| r.a == a)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_scan_csv(&self.rows, path)
    }
}

pub fn write_scan_csv(rows: &[ScanRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["a", "best_quotient", "error", "family", "witness"])?;
    for r in rows {
        w.write_record([
            format!("{}", r.a),
            format!("{:.12e}", r.best_quotient),
            format!("{:.3e}", r.error),
            r.family.clone(),
            r.witness.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Best trial quotient at each `a` over every family in `families`.
pub fn trial_scan(
    params: &ProblemParams,
    a_grid: &[f64],
    families: &[TrialFamily],
    budget: &SearchBudget,
) -> Result<Vec<ScanRow>> {
    a_grid
        .par_iter()
        .map(|&a| {
            let pa = params.with_a(a)?;
            let mut best: Option<(MinimizeResult, String)> = None;
            for fam in families {
                let res = match best_trial_quotient(&pa, fam, budget) {
                    Ok(r) if r.certified => r,
                    Ok(_) | Err(Error::EmptyFamily(_)) => continue,
                    Err(e) => return Err(e),
                };
                if best.as_ref().is_none_or(|(b, _)| res.quotient < b.quotient) {
                    best = Some((res, fam.name()));
                }
            }
            let (result, family) =
                best.ok_or_else(|| Error::EmptyFamily(format!("no certified trial at a = {a}")))?;
            let witness = result
                .trial
                .as_ref()
                .map(describe_trial)
                .unwrap_or_default();
            Ok(ScanRow {
                a,
                best_quotient: result.quotient,
                error: result.quotient_err,
                family,
                witness,
                result,
            })
        })
        .collect()
}

fn describe_trial(t: &Trial) -> String {
    match t {
        Trial::Bump(b) => b.describe(),
        Trial::CentredBubble { scale, .. } => format!("centred bubble(scale={scale:e})"),
        Trial::Extremal { lambda } => format!("U^lambda(lambda={lambda})"),
    }
}

/// Scans `a_grid` in ascending order for the first `a` whose best trial
/// quotient lies below the radial level by more than `margin`.
pub fn estimate_a_star_upper(
    params: &ProblemParams,
    a_grid: &[f64],
    margin: f64,
    families: &[TrialFamily],
    budget: &SearchBudget,
) -> Result<AStarReport> {
    if !(params.s > 0.0 && params.s < params.p) {
        return Err(Error::Domain("the threshold scan needs 0 < s < p".into()));
    }
    let threshold = params.rearrange_threshold();
    if a_grid.iter().any(|&a| !(a > threshold && a < 1.0)) {
        return Err(Error::Domain(format!(
            "a-grid must lie in ({threshold}, 1)"
        )));
    }
    let mut grid = a_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let level = hardy_sobolev_constant(params, &QuadratureSpec::default())?;
    let rows = trial_scan(params, &grid, families, budget)?;
    let a_hat = rows
        .iter()
        .find(|r| r.best_quotient + r.error < level - margin)
        .map(|r| r.a);
    Ok(AStarReport {
        a_hat,
        radial_level: level,
        margin,
        rows,
    })
}

/// Least-squares fit of `log Q_1(u_eps)` against `log eps` for boundary bumps.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecayFit {
    pub eps: Vec<f64>,
    pub quotients: Vec<f64>,
    pub errors: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub strictly_decreasing: bool,
}

pub fn decay_fit(
    params: &ProblemParams,
    eps_grid: &[f64],
    profile: BumpProfile,
) -> Result<DecayFit> {
    if params.a != 1.0 || !(params.s < params.p) {
        return Err(Error::Domain("decay fit needs a = 1 and s < p".into()));
    }
    if eps_grid.len() < 3 {
        return Err(Error::Domain("decay fit needs at least 3 widths".into()));
    }
    let spec = QuadratureSpec::default();
    let reports: Vec<QuotientReport> = eps_grid
        .par_iter()
        .map(|&e| bump_quotient(&boundary_bump(e, profile, params)?, params, &spec))
        .collect::<Result<_>>()?;
    let quotients: Vec<f64> = reports.iter().map(|r| r.quotient).collect();
    let errors = reports.iter().map(|r| r.quotient_err).collect();
    let xs: Vec<f64> = eps_grid.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = quotients.iter().map(|q| q.ln()).collect();
    let (slope, intercept) = least_squares(&xs, &ys);
    let mut order: Vec<usize> = (0..eps_grid.len()).collect();
    order.sort_by(|&i, &j| eps_grid[j].total_cmp(&eps_grid[i]));
    let strictly_decreasing = order.windows(2).all(|w| quotients[w[1]] < quotients[w[0]]);
    Ok(DecayFit {
        eps: eps_grid.to_vec(),
        quotients,
        errors,
        slope,
        intercept,
        strictly_decreasing,
    })
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// `Q_a(u)` for each function of a suite over an `a`-grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub a_grid: Vec<f64>,
    pub names: Vec<String>,
    /// `quotients[i][j]` is function `i` at `a_grid[j]`.
    pub quotients: Vec<Vec<f64>>,
    pub errors: Vec<Vec<f64>>,
    pub non_increasing: Vec<bool>,
    pub pointwise_min: Vec<f64>,
    pub min_non_increasing: bool,
}

pub fn monotonicity_scan(
    suite: &[Arc<dyn AxisymProfile>],
    params: &ProblemParams,
    a_grid: &[f64],
    spec: &QuadratureSpec,
) -> Result<MonotonicityReport> {
    let mut grid = a_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let rows: Vec<Vec<QuotientReport>> = suite
        .par_iter()
        .map(|u| {
            grid.iter()
                .map(|&a| rayleigh_quotient_axisym(u.as_ref(), &params.with_a(a)?, spec))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let quotients: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| r.iter().map(|x| x.quotient).collect())
        .collect();
    let errors: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| r.iter().map(|x| x.quotient_err).collect())
        .collect();
    let within = |q: &[f64], e: &[f64]| {
        q.windows(2)
            .zip(e.windows(2))
            .all(|(w, ew)| w[1] <= w[0] + ew[0] + ew[1])
    };
    let non_increasing = quotients
        .iter()
        .zip(&errors)
        .map(|(q, e)| within(q, e))
        .collect();
    let pointwise_min: Vec<f64> = (0..grid.len())
        .map(|j| quotients.iter().map(|q| q[j]).fold(f64::INFINITY, f64::min))
        .collect();
    let min_non_increasing = pointwise_min
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + 1e-8));
    Ok(MonotonicityReport {
        a_grid: grid,
        names: suite.iter().map(|u| u.describe()).collect(),
        quotients,
        errors,
        non_increasing,
        pointwise_min,
        min_non_increasing,
    })
}

impl MonotonicityReport {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut file = std::fs::File::create(path)?;
        write!(file, "function")?;
        for a in &self.a_grid {
            write!(file, ",a={a}")?;
        }
        writeln!(file)?;
        for (name, row) in self.names.iter().zip(&self.quotients) {
            write!(file, "\"{}\"", name.replace('"', "\"\""))?;
            for q in row {
                write!(file, ",{q:.12e}")?;
            }
            writeln!(file)?;
        }
        Ok(())
    }
}
