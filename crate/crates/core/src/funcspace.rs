//! Radial and axisymmetric test functions.
//!
//! Axisymmetric functions are written in polar coordinates `(r, theta)`
//! with `theta` the angle from the positive `x_N` axis; for such functions
//! `|grad u|^2 = u_r^2 + (u_theta / r)^2`.

use std::f64::consts::PI;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{sphere_area, ProblemParams};
use crate::quadrature::{integrate_interval, QuadratureSpec};

/// A radial function `u(|x|)` with an evaluable derivative.
pub trait RadialProfile: Send + Sync {
    fn value(&self, r: f64) -> f64;
    fn deriv(&self, r: f64) -> f64;
    /// Outer radius of the support; `f64::INFINITY` on the whole space.
    fn support(&self) -> f64;
    /// Points in `(0, support)` where the profile is not smooth.
    fn breaks(&self) -> Vec<f64> {
        Vec::new()
    }
    fn describe(&self) -> String;
}

/// An axisymmetric function `u(r, theta)` with both partial derivatives.
pub trait AxisymProfile: Send + Sync {
    fn value(&self, r: f64, theta: f64) -> f64;
    fn d_r(&self, r: f64, theta: f64) -> f64;
    fn d_theta(&self, r: f64, theta: f64) -> f64;
    /// Radial breakpoints including both ends of the radial support.
    fn radial_breaks(&self) -> Vec<f64>;
    /// Angular breakpoints at radius `r`, including the ends of the angular support.
    fn angular_breaks(&self, _r: f64) -> Vec<f64> {
        vec![0.0, PI]
    }
    fn describe(&self) -> String;
}

impl<T: RadialProfile + ?Sized> RadialProfile for Arc<T> {
    fn value(&self, r: f64) -> f64 {
        (**self).value(r)
    }
    fn deriv(&self, r: f64) -> f64 {
        (**self).deriv(r)
    }
    fn support(&self) -> f64 {
        (**self).support()
    }
    fn breaks(&self) -> Vec<f64> {
        (**self).breaks()
    }
    fn describe(&self) -> String {
        (**self).describe()
    }
}

impl<T: AxisymProfile + ?Sized> AxisymProfile for Arc<T> {
    fn value(&self, r: f64, theta: f64) -> f64 {
        (**self).value(r, theta)
    }
    fn d_r(&self, r: f64, theta: f64) -> f64 {
        (**self).d_r(r, theta)
    }
    fn d_theta(&self, r: f64, theta: f64) -> f64 {
        (**self).d_theta(r, theta)
    }
    fn radial_breaks(&self) -> Vec<f64> {
        (**self).radial_breaks()
    }
    fn angular_breaks(&self, r: f64) -> Vec<f64> {
        (**self).angular_breaks(r)
    }
    fn describe(&self) -> String {
        (**self).describe()
    }
}

/// Exponents of the extremal profile: `W(z) = (1 + z^e)^{-k}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BubbleShape {
    pub e: f64,
    pub k: f64,
}

impl BubbleShape {
    pub fn for_params(params: &ProblemParams) -> Result<Self> {
        if params.s >= params.p {
            return Err(Error::Domain(
                "the extremal family degenerates at s = p".into(),
            ));
        }
        Ok(BubbleShape {
            e: (params.p - params.s) / (params.p - 1.0),
            k: (params.dim() - params.p) / (params.p - params.s),
        })
    }

    pub fn value(&self, z: f64) -> f64 {
        (-self.k * z.powf(self.e).ln_1p()).exp()
    }

    /// `dW/dz`.
    pub fn deriv(&self, z: f64) -> f64 {
        let x = z.powf(self.e);
        -self.k * self.e * z.powf(self.e - 1.0) * (-(self.k + 1.0) * x.ln_1p()).exp()
    }
}

/// The whole-space extremal `W_lambda(t) = lambda^{(N-p)/p} W(lambda t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bubble {
    pub lambda: f64,
    pub shape: BubbleShape,
    pub amp: f64,
}

impl Bubble {
    pub fn new(params: &ProblemParams, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::Domain("lambda > 0 required".into()));
        }
        let shape = BubbleShape::for_params(params)?;
        Ok(Bubble {
            lambda,
            shape,
            amp: lambda.powf((params.dim() - params.p) / params.p),
        })
    }
}

/// `W_lambda(t)`; fails for `s = p` or `lambda <= 0`.
pub fn eval_w(lambda: f64, t: f64, params: &ProblemParams) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::Domain("t >= 0 required".into()));
    }
    Ok(Bubble::new(params, lambda)?.value(t))
}

impl RadialProfile for Bubble {
    fn value(&self, t: f64) -> f64 {
        self.amp * self.shape.value(self.lambda * t)
    }
    fn deriv(&self, t: f64) -> f64 {
        self.amp * self.lambda * self.shape.deriv(self.lambda * t)
    }
    fn support(&self) -> f64 {
        f64::INFINITY
    }
    fn describe(&self) -> String {
        format!("W_lambda(lambda={})", self.lambda)
    }
}

/// The radial minimizer `U^lambda` of the `a = 1` problem on `B_R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IokuExtremal {
    pub lambda: f64,
    pub radius: f64,
    pub shape: BubbleShape,
    pub amp: f64,
    /// `(N-p)/(p-1)`.
    pub gamma: f64,
    /// `(p-s)/(N-p)`.
    pub m: f64,
}

impl IokuExtremal {
    pub fn new(params: &ProblemParams, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::Domain("lambda > 0 required".into()));
        }
        let shape = BubbleShape::for_params(params)?;
        Ok(IokuExtremal {
            lambda,
            radius: params.radius,
            shape,
            amp: lambda.powf((params.dim() - params.p) / params.p),
            gamma: params.fundamental_exponent(),
            m: (params.p - params.s) / (params.dim() - params.p),
        })
    }

    /// `1 - (r/R)^gamma`, accurate near `r = R`.
    fn gap(&self, r: f64) -> f64 {
        -(self.gamma * (r / self.radius).ln()).exp_m1()
    }

    /// `ln y` with `y = (lambda r)^e (1 - (r/R)^gamma)^{-m}`.
    fn ln_y(&self, r: f64) -> f64 {
        self.shape.e * (self.lambda * r).ln() - self.m * self.gap(r).ln()
    }
}

/// `U^lambda(r)`; fails for `r >= R`.
pub fn eval_u(lambda: f64, r: f64, params: &ProblemParams) -> Result<f64> {
    if !(0.0..params.radius).contains(&r) {
        return Err(Error::Domain(format!(
            "U^lambda needs 0 <= r < R, got r = {r}"
        )));
    }
    Ok(IokuExtremal::new(params, lambda)?.value(r))
}

impl RadialProfile for IokuExtremal {
    fn value(&self, r: f64) -> f64 {
        if r >= self.radius {
            return 0.0;
        }
        if r <= 0.0 {
            return self.amp;
        }
        let y = self.ln_y(r).exp();
        self.amp * (-self.shape.k * y.ln_1p()).exp()
    }

    fn deriv(&self, r: f64) -> f64 {
        if r >= self.radius || r <= 0.0 {
            return 0.0;
        }
        let ln_y = self.ln_y(r);
        let y = ln_y.exp();
        let x = (r / self.radius).powf(self.gamma);
        let dlny = self.shape.e / r + self.m * self.gamma * x / (r * self.gap(r));
        // U' = -k amp y (1+y)^{-k-1} dln y/dr
        -self.shape.k * self.amp * dlny * (ln_y - (self.shape.k + 1.0) * y.ln_1p()).exp()
    }

    fn support(&self) -> f64 {
        self.radius
    }

    fn describe(&self) -> String {
        format!("U^lambda(lambda={}, R={})", self.lambda, self.radius)
    }
}

/// A radial function given by closures.
#[derive(Clone)]
pub struct ExplicitRadial {
    pub name: String,
    pub support: f64,
    pub breaks: Vec<f64>,
    value: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    deriv: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for ExplicitRadial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExplicitRadial({})", self.name)
    }
}

impl ExplicitRadial {
    pub fn new<V, D>(name: impl Into<String>, support: f64, value: V, deriv: D) -> Self
    where
        V: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        ExplicitRadial {
            name: name.into(),
            support,
            breaks: Vec::new(),
            value: Arc::new(value),
            deriv: Arc::new(deriv),
        }
    }

    pub fn with_breaks(mut self, breaks: Vec<f64>) -> Self {
        self.breaks = breaks;
        self
    }

    /// `1 - r/R`.
    pub fn linear_cone(radius: f64) -> Self {
        Self::new(
            "1-r/R",
            radius,
            move |r| 1.0 - r / radius,
            move |_| -1.0 / radius,
        )
    }

    /// `(1 - (r/R)^2)^2`.
    pub fn quartic(radius: f64) -> Self {
        Self::new(
            "(1-(r/R)^2)^2",
            radius,
            move |r| (1.0 - (r / radius).powi(2)).powi(2),
            move |r| -4.0 * r / (radius * radius) * (1.0 - (r / radius).powi(2)),
        )
    }

    /// `cos(pi r / (2R))`.
    pub fn cosine(radius: f64) -> Self {
        let w = PI / (2.0 * radius);
        Self::new(
            "cos(pi r/2R)",
            radius,
            move |r| (w * r).cos(),
            move |r| -w * (w * r).sin(),
        )
    }

    /// `W(t/scale) - W(support/scale)` cut off at `support`, for an extremal shape.
    pub fn truncated_bubble(shape: BubbleShape, scale: f64, support: f64) -> Self {
        let floor = shape.value(support / scale);
        Self::new(
            format!("truncated W(scale={scale}, support={support})"),
            support,
            move |t| {
                if t >= support {
                    0.0
                } else {
                    shape.value(t / scale) - floor
                }
            },
            move |t| {
                if t >= support {
                    0.0
                } else {
                    shape.deriv(t / scale) / scale
                }
            },
        )
    }

    /// The constant function 1 (does not vanish at the boundary).
    pub fn constant_one(radius: f64) -> Self {
        Self::new("1", radius, |_| 1.0, |_| 0.0)
    }

    pub fn zero(radius: f64) -> Self {
        Self::new("0", radius, |_| 0.0, |_| 0.0)
    }

    /// A smooth bump supported in the annulus `lo <= r <= hi`.
    pub fn annulus_bump(lo: f64, hi: f64) -> Self {
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        Self::new(
            format!("annulus bump [{lo}, {hi}]"),
            hi,
            move |r| {
                let z = (r - mid) / half;
                if z.abs() >= 1.0 {
                    0.0
                } else {
                    (1.0 - z * z).powi(3)
                }
            },
            move |r| {
                let z = (r - mid) / half;
                if z.abs() >= 1.0 {
                    0.0
                } else {
                    -6.0 * z * (1.0 - z * z).powi(2) / half
                }
            },
        )
        .with_breaks(vec![lo])
    }
}

impl RadialProfile for ExplicitRadial {
    fn value(&self, r: f64) -> f64 {
        (self.value)(r)
    }
    fn deriv(&self, r: f64) -> f64 {
        (self.deriv)(r)
    }
    fn support(&self) -> f64 {
        self.support
    }
    fn breaks(&self) -> Vec<f64> {
        self.breaks.clone()
    }
    fn describe(&self) -> String {
        self.name.clone()
    }
}

/// `c * u`.
pub struct Multiple<P> {
    pub c: f64,
    pub inner: P,
}

impl<P: RadialProfile> RadialProfile for Multiple<P> {
    fn value(&self, r: f64) -> f64 {
        self.c * self.inner.value(r)
    }
    fn deriv(&self, r: f64) -> f64 {
        self.c * self.inner.deriv(r)
    }
    fn support(&self) -> f64 {
        self.inner.support()
    }
    fn breaks(&self) -> Vec<f64> {
        self.inner.breaks()
    }
    fn describe(&self) -> String {
        format!("{} * {}", self.c, self.inner.describe())
    }
}

/// `min(r, cutoff)^{-alpha} - R^{-alpha}`: the truncated power used to
/// approach the Hardy constant. Breakpoints are geometric from `cutoff` to `R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedPower {
    pub alpha: f64,
    pub cutoff: f64,
    pub radius: f64,
}

impl TruncatedPower {
    pub fn new(alpha: f64, cutoff: f64, radius: f64) -> Result<Self> {
        if !(alpha > 0.0) || !(cutoff > 0.0 && cutoff < radius) {
            return Err(Error::Domain(
                "truncated power needs alpha > 0 and 0 < cutoff < R".into(),
            ));
        }
        Ok(TruncatedPower {
            alpha,
            cutoff,
            radius,
        })
    }
}

impl RadialProfile for TruncatedPower {
    fn value(&self, r: f64) -> f64 {
        if r >= self.radius {
            return 0.0;
        }
        r.max(self.cutoff).powf(-self.alpha) - self.radius.powf(-self.alpha)
    }
    fn deriv(&self, r: f64) -> f64 {
        if r <= self.cutoff || r >= self.radius {
            0.0
        } else {
            -self.alpha * r.powf(-self.alpha - 1.0)
        }
    }
    fn support(&self) -> f64 {
        self.radius
    }
    fn breaks(&self) -> Vec<f64> {
        let mut b = Vec::new();
        let mut x = self.cutoff;
        while x < self.radius {
            b.push(x);
            x *= 4.0;
        }
        b
    }
    fn describe(&self) -> String {
        format!(
            "truncated power(alpha={}, cutoff={:e})",
            self.alpha, self.cutoff
        )
    }
}

/// Interpolation between grid nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interp {
    Linear,
    MonotoneCubic,
}

/// Samples on a strictly increasing grid with first node `> 0`.
///
/// The function is constant on `[0, r_0]` and zero beyond the last node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    pub interp: Interp,
    pub grading: String,
    slopes: Vec<f64>,
}

/// Nodes `lo + (hi - lo) g(i/n)`, `i = 0..=n`, with
/// `g(u) = u^a / (u^a + (1-u)^b)` clustering at both ends.
pub fn graded_mesh(lo: f64, hi: f64, n: usize, grading_lo: f64, grading_hi: f64) -> Vec<f64> {
    (0..=n)
        .map(|i| {
            let u = i as f64 / n as f64;
            let a = u.powf(grading_lo);
            let b = (1.0 - u).powf(grading_hi);
            if i == n {
                hi
            } else {
                lo + (hi - lo) * a / (a + b)
            }
        })
        .collect()
}

impl GridFunction {
    pub fn new(
        nodes: Vec<f64>,
        values: Vec<f64>,
        interp: Interp,
        grading: impl Into<String>,
    ) -> Result<Self> {
        if nodes.len() < 2 || nodes.len() != values.len() {
            return Err(Error::Domain(
                "grid function needs >= 2 nodes and matching values".into(),
            ));
        }
        if !(nodes[0] > 0.0) || nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain(
                "grid must be strictly increasing with first node > 0".into(),
            ));
        }
        let slopes = match interp {
            Interp::Linear => Vec::new(),
            Interp::MonotoneCubic => monotone_slopes(&nodes, &values),
        };
        Ok(GridFunction {
            nodes,
            values,
            interp,
            grading: grading.into(),
            slopes,
        })
    }

    /// Samples `f` on `nodes`.
    pub fn sample(
        f: &dyn RadialProfile,
        nodes: Vec<f64>,
        interp: Interp,
        grading: impl Into<String>,
    ) -> Result<Self> {
        let values = nodes.iter().map(|&r| f.value(r)).collect();
        Self::new(nodes, values, interp, grading)
    }

    fn locate(&self, r: f64) -> usize {
        match self.nodes.binary_search_by(|x| x.total_cmp(&r)) {
            Ok(i) => i.min(self.nodes.len() - 2),
            Err(i) => (i - 1).min(self.nodes.len() - 2),
        }
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut file = std::fs::File::create(path)?;
        writeln!(file, "# grading: {}", self.grading)?;
        let mut w = csv::Writer::from_writer(file);
        w.write_record(["node", "value"])?;
        for (x, v) in self.nodes.iter().zip(&self.values) {
            w.write_record([format!("{x:e}"), format!("{v:e}")])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn load_csv(path: &Path, interp: Interp) -> Result<Self> {
        let file = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut lines = file.lines();
        let first = lines
            .next()
            .ok_or_else(|| Error::Io("empty grid file".into()))??;
        let grading = first
            .strip_prefix("# grading:")
            .ok_or_else(|| Error::Io("missing '# grading:' header line".into()))?
            .trim()
            .to_string();
        let rest: Vec<String> = lines.collect::<std::io::Result<_>>()?;
        let body = rest.join("\n");
        let mut rdr = csv::Reader::from_reader(body.as_bytes());
        let mut nodes = Vec::new();
        let mut values = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Io(format!("bad number {s:?}: {e}")))
            };
            nodes.push(parse(&rec[0])?);
            values.push(parse(&rec[1])?);
        }
        Self::new(nodes, values, interp, grading)
    }
}

/// Three-point non-uniform derivative stencils, limited so the Hermite
/// interpolant stays monotone on every monotone interval (Fritsch-Carlson).
fn monotone_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let secant: Vec<f64> = (0..n - 1)
        .map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i]))
        .collect();
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        let (h0, h1) = (x[i] - x[i - 1], x[i + 1] - x[i]);
        d[i] = (h1 * secant[i - 1] + h0 * secant[i]) / (h0 + h1);
    }
    d[0] = secant[0];
    d[n - 1] = secant[n - 2];
    for i in 0..n - 1 {
        let m = secant[i];
        if m == 0.0 {
            d[i] = 0.0;
            d[i + 1] = 0.0;
            continue;
        }
        if d[i] * m < 0.0 {
            d[i] = 0.0;
        }
        if d[i + 1] * m < 0.0 {
            d[i + 1] = 0.0;
        }
        let a = d[i] / m;
        let b = d[i + 1] / m;
        let h = a.hypot(b);
        if h > 3.0 {
            let t = 3.0 / h;
            d[i] = t * a * m;
            d[i + 1] = t * b * m;
        }
    }
    d
}

impl RadialProfile for GridFunction {
    fn value(&self, r: f64) -> f64 {
        let n = self.nodes.len();
        if r <= self.nodes[0] {
            return self.values[0];
        }
        if r >= self.nodes[n - 1] {
            return 0.0;
        }
        let i = self.locate(r);
        let (x0, x1) = (self.nodes[i], self.nodes[i + 1]);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let h = x1 - x0;
        let t = (r - x0) / h;
        match self.interp {
            Interp::Linear => y0 + t * (y1 - y0),
            Interp::MonotoneCubic => {
                let (d0, d1) = (self.slopes[i], self.slopes[i + 1]);
                let t2 = t * t;
                let t3 = t2 * t;
                (2.0 * t3 - 3.0 * t2 + 1.0) * y0
                    + (t3 - 2.0 * t2 + t) * h * d0
                    + (-2.0 * t3 + 3.0 * t2) * y1
                    + (t3 - t2) * h * d1
            }
        }
    }

    fn deriv(&self, r: f64) -> f64 {
        let n = self.nodes.len();
        if r <= self.nodes[0] || r >= self.nodes[n - 1] {
            return 0.0;
        }
        let i = self.locate(r);
        let (x0, x1) = (self.nodes[i], self.nodes[i + 1]);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let h = x1 - x0;
        match self.interp {
            Interp::Linear => (y1 - y0) / h,
            Interp::MonotoneCubic => {
                let t = (r - x0) / h;
                let t2 = t * t;
                let (d0, d1) = (self.slopes[i], self.slopes[i + 1]);
                ((6.0 * t2 - 6.0 * t) * y0 + (6.0 * t - 6.0 * t2) * y1) / h
                    + (3.0 * t2 - 4.0 * t + 1.0) * d0
                    + (3.0 * t2 - 2.0 * t) * d1
            }
        }
    }

    fn support(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    fn breaks(&self) -> Vec<f64> {
        self.nodes.clone()
    }

    fn describe(&self) -> String {
        format!(
            "grid function ({} nodes, {:?}, {})",
            self.nodes.len(),
            self.interp,
            self.grading
        )
    }
}

/// A radial function viewed as axisymmetric.
pub struct Lifted<P>(pub P);

impl<P: RadialProfile> AxisymProfile for Lifted<P> {
    fn value(&self, r: f64, _theta: f64) -> f64 {
        self.0.value(r)
    }
    fn d_r(&self, r: f64, _theta: f64) -> f64 {
        self.0.deriv(r)
    }
    fn d_theta(&self, _r: f64, _theta: f64) -> f64 {
        0.0
    }
    fn radial_breaks(&self) -> Vec<f64> {
        let mut b = vec![0.0];
        b.extend(self.0.breaks());
        b.push(self.0.support());
        b
    }
    fn describe(&self) -> String {
        self.0.describe()
    }
}

/// `g(r) h(theta)`.
#[derive(Clone)]
pub struct Separable {
    pub radial: Arc<dyn RadialProfile>,
    pub name: String,
    h: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    dh: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl Separable {
    pub fn new<H, D>(radial: Arc<dyn RadialProfile>, name: impl Into<String>, h: H, dh: D) -> Self
    where
        H: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Separable {
            radial,
            name: name.into(),
            h: Arc::new(h),
            dh: Arc::new(dh),
        }
    }

    /// `g(r) (1 + c cos(k theta))`; smooth across the axis. In the plane the
    /// energy is finite only when `g(0) = 0`.
    pub fn cosine_mode(radial: Arc<dyn RadialProfile>, c: f64, k: f64) -> Self {
        Self::new(
            radial,
            format!("(1 + {c} cos({k} theta))"),
            move |th| 1.0 + c * (k * th).cos(),
            move |th| -c * k * (k * th).sin(),
        )
    }

    pub fn angular(&self, theta: f64) -> f64 {
        (self.h)(theta)
    }
}

impl AxisymProfile for Separable {
    fn value(&self, r: f64, theta: f64) -> f64 {
        self.radial.value(r) * (self.h)(theta)
    }
    fn d_r(&self, r: f64, theta: f64) -> f64 {
        self.radial.deriv(r) * (self.h)(theta)
    }
    fn d_theta(&self, r: f64, theta: f64) -> f64 {
        self.radial.value(r) * (self.dh)(theta)
    }
    fn radial_breaks(&self) -> Vec<f64> {
        let mut b = vec![0.0];
        b.extend(self.radial.breaks());
        b.push(self.radial.support());
        b
    }
    fn describe(&self) -> String {
        format!("{} * {}", self.radial.describe(), self.name)
    }
}

/// Profile `v` of a bump on the unit ball, as a function of `t = |z|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BumpProfile {
    /// `1` on `[0, 1/2]`, `2(1 - t)` on `[1/2, 1]`.
    Cone,
    /// `(1 - t^2)^2`.
    Smooth,
    /// Extremal shape concentrated at scale `mu`, shifted to vanish at `t = 1`
    /// and normalized to `v(0) = 1`.
    Bubble { mu: f64, shape: BubbleShape },
}

impl BumpProfile {
    pub fn value(&self, t: f64) -> f64 {
        if t >= 1.0 {
            return 0.0;
        }
        match *self {
            BumpProfile::Cone => {
                if t <= 0.5 {
                    1.0
                } else {
                    2.0 * (1.0 - t)
                }
            }
            BumpProfile::Smooth => (1.0 - t * t).powi(2),
            BumpProfile::Bubble { mu, shape } => {
                let floor = shape.value(1.0 / mu);
                (shape.value(t / mu) - floor) / (1.0 - floor)
            }
        }
    }

    pub fn deriv(&self, t: f64) -> f64 {
        if t >= 1.0 {
            return 0.0;
        }
        match *self {
            BumpProfile::Cone => {
                if t <= 0.5 {
                    0.0
                } else {
                    -2.0
                }
            }
            BumpProfile::Smooth => -4.0 * t * (1.0 - t * t),
            BumpProfile::Bubble { mu, shape } => {
                let floor = shape.value(1.0 / mu);
                shape.deriv(t / mu) / (mu * (1.0 - floor))
            }
        }
    }

    /// Interior points of `(0, 1)` where `v` is not smooth or changes scale.
    pub fn breaks(&self) -> Vec<f64> {
        match *self {
            BumpProfile::Cone => vec![0.5],
            BumpProfile::Smooth => Vec::new(),
            BumpProfile::Bubble { mu, .. } => {
                let mut b = Vec::new();
                let mut t = mu;
                while t < 1.0 {
                    b.push(t);
                    t *= 4.0;
                }
                b
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            BumpProfile::Cone => "cone".into(),
            BumpProfile::Smooth => "smooth".into(),
            BumpProfile::Bubble { mu, .. } => format!("bubble(mu={mu:e})"),
        }
    }

    /// `int_{B_1} |grad v|^p dz` in `R^N`.
    pub fn energy(&self, n: u32, p: f64, spec: &QuadratureSpec) -> Result<f64> {
        if *self == BumpProfile::Cone {
            let nf = n as f64;
            return Ok(sphere_area(nf) * 2f64.powf(p) * (1.0 - 0.5f64.powf(nf)) / nf);
        }
        let nm1 = (n - 1) as i32;
        let e = integrate_interval(
            |t| self.deriv(t).abs().powf(p) * t.powi(nm1),
            0.0,
            1.0,
            &self.breaks(),
            spec,
        )?;
        Ok(sphere_area(n as f64) * e.value)
    }
}

/// `u(x) = v(|x - c e_N| / eps)`: a bump of radius `eps` centred on the axis
/// at distance `center` from the origin, inside `B_R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: f64,
    pub width: f64,
    pub profile: BumpProfile,
    pub radius: f64,
}

impl Bump {
    pub fn new(center: f64, width: f64, profile: BumpProfile, radius: f64) -> Result<Self> {
        if !(width > 0.0) || !(center >= width) || !(center + width <= radius) {
            return Err(Error::Domain(format!(
                "bump needs eps <= center <= R - eps, got center={center}, eps={width}, R={radius}"
            )));
        }
        Ok(Bump {
            center,
            width,
            profile,
            radius,
        })
    }

    /// Distance from the bump centre, stable for small angles.
    fn dist(&self, r: f64, theta: f64) -> f64 {
        let s = (0.5 * theta).sin();
        ((r - self.center).powi(2) + 4.0 * r * self.center * s * s).sqrt()
    }

    /// Angle at which the sphere `|x| = r` meets `|x - c e_N| = rho`, if it does.
    fn crossing(&self, r: f64, rho: f64) -> Option<f64> {
        let c = self.center;
        if r <= 0.0 || (r - c).abs() >= rho || r + c <= rho {
            return None;
        }
        let cos = ((r * r + c * c - rho * rho) / (2.0 * r * c)).clamp(-1.0, 1.0);
        Some(cos.acos())
    }

    pub fn gap_to_boundary(&self) -> f64 {
        self.radius - self.center - self.width
    }
}

/// The boundary bump `u_eps` centred at `x_eps = (R - 2 eps) e_N`, `0 < eps < R/4`.
pub fn boundary_bump(eps: f64, profile: BumpProfile, params: &ProblemParams) -> Result<Bump> {
    if !(eps > 0.0 && eps < params.radius / 4.0) {
        return Err(Error::Domain(format!(
            "boundary bump needs 0 < eps < R/4, got {eps}"
        )));
    }
    Bump::new(params.radius - 2.0 * eps, eps, profile, params.radius)
}

impl AxisymProfile for Bump {
    fn value(&self, r: f64, theta: f64) -> f64 {
        self.profile.value(self.dist(r, theta) / self.width)
    }

    fn d_r(&self, r: f64, theta: f64) -> f64 {
        let d = self.dist(r, theta);
        if d == 0.0 {
            return 0.0;
        }
        self.profile.deriv(d / self.width) / self.width * (r - self.center * theta.cos()) / d
    }

    fn d_theta(&self, r: f64, theta: f64) -> f64 {
        let d = self.dist(r, theta);
        if d == 0.0 {
            return 0.0;
        }
        self.profile.deriv(d / self.width) / self.width * r * self.center * theta.sin() / d
    }

    fn radial_breaks(&self) -> Vec<f64> {
        let mut b = vec![self.center - self.width];
        let mut ts = self.profile.breaks();
        ts.sort_by(f64::total_cmp);
        for &t in ts.iter().rev() {
            b.push(self.center - t * self.width);
        }
        b.push(self.center);
        for &t in &ts {
            b.push(self.center + t * self.width);
        }
        b.push(self.center + self.width);
        b
    }

    fn angular_breaks(&self, r: f64) -> Vec<f64> {
        let outer = match self.crossing(r, self.width) {
            Some(th) => th,
            None => {
                return if (r - self.center).abs() < self.width {
                    vec![0.0, PI]
                } else {
                    vec![0.0, 0.0]
                };
            }
        };
        let mut b = vec![0.0];
        let mut inner: Vec<f64> = self
            .profile
            .breaks()
            .iter()
            .filter_map(|&t| self.crossing(r, t * self.width))
            .collect();
        inner.sort_by(f64::total_cmp);
        b.extend(inner.into_iter().filter(|&th| th > 0.0 && th < outer));
        b.push(outer);
        b
    }

    fn describe(&self) -> String {
        format!(
            "bump(center={}, eps={}, {})",
            self.center,
            self.width,
            self.profile.name()
        )
    }
}

/// `W(r) = (w_{N-1}^{-1} int_{S^{N-1}} |w(r omega)|^q dS)^{1/q}` for an
/// axisymmetric `w`; the derivative is evaluated by the same angular rule.
pub struct SphericalAverage<'a> {
    pub w: &'a dyn AxisymProfile,
    pub q: f64,
    pub n: u32,
    spec: QuadratureSpec,
    ratio: f64,
    /// Absolute floors for the angular integrals of `|w|^q` and of
    /// `|w|^{q-1} |w_r|`, relative to their largest values.
    floor_value: f64,
    floor_deriv: f64,
}

pub fn spherical_average<'a>(
    w: &'a dyn AxisymProfile,
    q: f64,
    n: u32,
    spec: &QuadratureSpec,
) -> Result<SphericalAverage<'a>> {
    if !(q > 1.0) {
        return Err(Error::Domain("spherical average needs q > 1".into()));
    }
    if n < 2 {
        return Err(Error::Domain("spherical average needs N >= 2".into()));
    }
    let spec = QuadratureSpec {
        grading_lo: 1.0,
        grading_hi: 1.0,
        ..*spec
    };
    // Roundoff near the edge of the support keeps slices where w is tiny
    // from converging to full relative accuracy.
    let rb = w.radial_breaks();
    let (lo, hi) = (rb[0], *rb.last().unwrap());
    let (mut top_value, mut top_deriv) = (0.0f64, 0.0f64);
    for i in 1..64 {
        let r = lo + (hi - lo) * i as f64 / 64.0;
        for j in 0..=32 {
            let th = PI * j as f64 / 32.0;
            let v = w.value(r, th).abs();
            top_value = top_value.max(v.powf(q));
            top_deriv = top_deriv.max(v.powf(q - 1.0) * w.d_r(r, th).abs());
        }
    }
    let rel = spec.rel_tol * 1e-3;
    Ok(SphericalAverage {
        w,
        q,
        n,
        spec,
        ratio: sphere_area((n - 1) as f64) / sphere_area(n as f64),
        floor_value: rel * top_value,
        floor_deriv: rel * top_deriv,
    })
}

impl SphericalAverage<'_> {
    fn angular<F: Fn(f64) -> f64>(&self, r: f64, floor: f64, g: F) -> f64 {
        let ab = self.w.angular_breaks(r);
        if ab.len() < 2 || ab[ab.len() - 1] <= ab[0] {
            return 0.0;
        }
        let nm2 = (self.n - 2) as i32;
        match integrate_interval(
            |th| g(th) * th.sin().powi(nm2),
            ab[0],
            ab[ab.len() - 1],
            &ab[1..ab.len() - 1],
            &QuadratureSpec {
                abs_tol: self.spec.abs_tol.max(floor),
                ..self.spec
            },
        ) {
            Ok(e) => self.ratio * e.value,
            Err(_) => f64::NAN,
        }
    }

    fn mean_power(&self, r: f64) -> f64 {
        self.angular(r, self.floor_value, |th| {
            self.w.value(r, th).abs().powf(self.q)
        })
    }
}

impl RadialProfile for SphericalAverage<'_> {
    fn value(&self, r: f64) -> f64 {
        self.mean_power(r).powf(1.0 / self.q)
    }

    fn deriv(&self, r: f64) -> f64 {
        let m = self.mean_power(r);
        if m == 0.0 {
            return 0.0;
        }
        let q = self.q;
        let num = self.angular(r, self.floor_deriv, |th| {
            let v = self.w.value(r, th);
            v.abs().powf(q - 2.0) * v * self.w.d_r(r, th)
        });
        m.powf(1.0 / q - 1.0) * num
    }

    fn support(&self) -> f64 {
        *self.w.radial_breaks().last().unwrap()
    }

    fn breaks(&self) -> Vec<f64> {
        let b = self.w.radial_breaks();
        b[1..b.len() - 1].to_vec()
    }

    fn describe(&self) -> String {
        format!("spherical L^{} average of {}", self.q, self.w.describe())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prm(s: f64) -> ProblemParams {
        ProblemParams::new(3, 2.0, s, 1.0, 0.5).unwrap()
    }

    #[test]
    fn w_examples() {
        let p = prm(1.0);
        assert_eq!(eval_w(1.0, 0.0, &p).unwrap(), 1.0);
        assert!((eval_w(1.0, 1.0, &p).unwrap() - 0.5).abs() < 1e-15);
        for &(lam, t) in &[(0.3, 0.7), (2.5, 1.9), (11.0, 0.01)] {
            let lhs = eval_w(lam, t, &p).unwrap();
            let rhs = lam.powf(0.5) * eval_w(1.0, lam * t, &p).unwrap();
            assert!((lhs - rhs).abs() < 1e-14 * rhs);
        }
        assert!(eval_w(1.0, 1.0, &prm(2.0)).is_err());
    }

    #[test]
    fn bubble_derivative_matches_finite_difference() {
        for s in [0.0, 0.5, 1.0, 1.5] {
            let b = Bubble::new(&prm(s), 1.7).unwrap();
            for &t in &[0.05, 0.4, 2.0, 30.0] {
                let h = 1e-6 * t;
                let fd = (b.value(t + h) - b.value(t - h)) / (2.0 * h);
                assert!(
                    (fd - b.deriv(t)).abs() < 1e-6 * fd.abs().max(1e-12),
                    "s={s} t={t}"
                );
            }
        }
        let b = Bubble::new(&prm(0.0), 1.0).unwrap();
        assert_eq!(b.value(1e300), 0.0);
        assert_eq!(b.deriv(1e300), 0.0);
    }

    #[test]
    fn u_examples() {
        let p = prm(1.0);
        for lam in [0.5, 1.0, 2.0] {
            assert!((eval_u(lam, 0.0, &p).unwrap() - lam.powf(0.5)).abs() < 1e-15);
        }
        let mut prev = f64::INFINITY;
        for k in 2..=6 {
            let v = eval_u(1.0, 1.0 - 10f64.powi(-k), &p).unwrap();
            assert!(v < prev && v > 0.0);
            prev = v;
        }
        assert!(prev < 1e-5);
        assert!(eval_u(1.0, 1.0, &p).is_err());
        let u = IokuExtremal::new(&p, 1.3).unwrap();
        for &r in &[0.1, 0.5, 0.9, 0.999] {
            let h = 1e-7 * (1.0 - r);
            let fd = (u.value(r + h) - u.value(r - h)) / (2.0 * h);
            assert!((fd - u.deriv(r)).abs() < 1e-6 * fd.abs(), "r={r}");
        }
    }

    #[test]
    fn bump_support_and_plateau() {
        let p = prm(1.0);
        let b = boundary_bump(0.1, BumpProfile::Cone, &p).unwrap();
        assert_eq!(b.center, 0.8);
        // outside the ball of radius eps around x_eps
        assert_eq!(b.value(0.95, 0.0), 0.0);
        assert_eq!(b.value(0.8, 0.2), 0.0);
        // plateau
        assert_eq!(b.value(0.8, 0.0), 1.0);
        assert_eq!(b.value(0.84, 0.0), 1.0);
        assert_eq!(b.value(0.8, 0.05), 1.0);
        assert!(boundary_bump(0.3, BumpProfile::Cone, &p).is_err());
        assert!(boundary_bump(0.0, BumpProfile::Cone, &p).is_err());
        // partial derivatives against finite differences
        let s = Bump::new(0.6, 0.3, BumpProfile::Smooth, 1.0).unwrap();
        let (r, th) = (0.7, 0.2);
        let h = 1e-6;
        let fr = (s.value(r + h, th) - s.value(r - h, th)) / (2.0 * h);
        let ft = (s.value(r, th + h) - s.value(r, th - h)) / (2.0 * h);
        assert!((fr - s.d_r(r, th)).abs() < 1e-7);
        assert!((ft - s.d_theta(r, th)).abs() < 1e-7);
    }

    #[test]
    fn bump_angular_breaks_bound_the_support() {
        let b = Bump::new(0.6, 0.2, BumpProfile::Cone, 1.0).unwrap();
        for &r in &[0.45, 0.55, 0.6, 0.7, 0.79] {
            let ab = b.angular_breaks(r);
            let outer = *ab.last().unwrap();
            assert!(b.value(r, outer * 1.0001).abs() < 1e-12);
            assert!(b.value(r, outer * 0.999) > 0.0);
        }
        assert_eq!(b.angular_breaks(0.9), vec![0.0, 0.0]);
    }

    #[test]
    fn cone_energy_closed_form() {
        let spec = QuadratureSpec::default();
        let e = BumpProfile::Cone.energy(3, 2.0, &spec).unwrap();
        assert!((e - 14.0 * PI / 3.0).abs() < 1e-12);
        let smooth = BumpProfile::Smooth.energy(3, 2.0, &spec).unwrap();
        // int_0^1 16 t^2 (1-t^2)^2 t^2 dt = 16 (1/5 - 2/7 + 1/9)
        assert!((smooth - 4.0 * PI * 16.0 * (1.0 / 5.0 - 2.0 / 7.0 + 1.0 / 9.0)).abs() < 1e-10);
    }

    #[test]
    fn grid_interpolation_reproduces_smooth_functions() {
        let f = ExplicitRadial::quartic(1.0);
        let nodes = graded_mesh(1e-4, 1.0, 400, 2.0, 2.0);
        let g =
            GridFunction::sample(&f, nodes.clone(), Interp::MonotoneCubic, "graded(2,2)").unwrap();
        for &r in &[0.01, 0.3, 0.77, 0.99] {
            assert!((g.value(r) - f.value(r)).abs() < 1e-6);
            assert!((g.deriv(r) - f.deriv(r)).abs() < 1e-3);
        }
        let l = GridFunction::sample(&f, nodes, Interp::Linear, "graded(2,2)").unwrap();
        assert!((l.value(0.5) - f.value(0.5)).abs() < 1e-4);
        assert!(GridFunction::new(vec![0.0, 1.0], vec![1.0, 0.0], Interp::Linear, "x").is_err());
        assert!(GridFunction::new(
            vec![0.5, 0.5, 1.0],
            vec![1.0, 1.0, 0.0],
            Interp::Linear,
            "x"
        )
        .is_err());
    }

    #[test]
    fn monotone_data_gives_monotone_interpolant() {
        let nodes = vec![0.1, 0.2, 0.25, 0.6, 0.61, 1.0];
        let values = vec![1.0, 1.0, 0.9, 0.2, 0.19, 0.0];
        let g = GridFunction::new(nodes, values, Interp::MonotoneCubic, "irregular").unwrap();
        let mut prev = f64::INFINITY;
        for i in 0..=1000 {
            let r = 0.1 + 0.9 * i as f64 / 1000.0;
            let v = g.value(r);
            assert!(v <= prev + 1e-15, "r={r}");
            prev = v;
        }
    }

    #[test]
    fn grid_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u.csv");
        let g = GridFunction::new(
            vec![0.1, 0.5, 1.0],
            vec![1.0, 0.5, 0.0],
            Interp::Linear,
            "uniform",
        )
        .unwrap();
        g.save_csv(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# grading: uniform\nnode,value\n"));
        let h = GridFunction::load_csv(&path, Interp::Linear).unwrap();
        assert_eq!(g, h);
    }

    #[test]
    fn radial_average_is_absolute_value() {
        let f = ExplicitRadial::new("1-2r", 1.0, |r| 1.0 - 2.0 * r, |_| -2.0);
        let lifted = Lifted(f.clone());
        let avg = spherical_average(&lifted, 3.0, 3, &QuadratureSpec::default()).unwrap();
        for &r in &[0.1, 0.4, 0.8] {
            assert!((avg.value(r) - f.value(r).abs()).abs() < 1e-12);
        }
    }
}
