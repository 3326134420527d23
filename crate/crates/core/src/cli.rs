//! Command-line driver. Every subcommand prints one JSON object (or a CSV
//! table) that starts with the resolved configuration.

use std::ffi::OsString;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::funcspace::{
    AxisymProfile, BubbleShape, BumpProfile, ExplicitRadial, GridFunction, Interp, IokuExtremal,
    RadialProfile, Separable,
};
use crate::functionals::{bump_quotient, rayleigh_quotient};
use crate::limits::{limit_curve, verify_s_another, weighted_limit_check};
use crate::minimize::{
    decay_fit, estimate_a_star_upper, minimize_radial, trial_scan, FlowOptions, GridSpec,
    ProfileChoice, SearchBudget, TrialFamily,
};
use crate::params::{derived_constants, validate, OuterRadius, ProblemParams, RawParams};
use crate::quadrature::QuadratureSpec;
use crate::scalings::{
    certify_scale_n_growth, scale_p_limit_energy, scaled_energy_curve, ScalingKind,
};
use crate::transforms::{
    default_identities, transform_suite, verify_norm_identity, TransformKind, TransformMap,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "hslab",
    version,
    about = "Weighted Hardy-Sobolev quotients on balls"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Cap on worker threads (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Relative quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    rel_tol: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
struct ProblemArgs {
    #[arg(long = "N", default_value_t = 3)]
    n: u32,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    s: f64,
    #[arg(long = "R", default_value_t = 1.0)]
    radius: f64,
    #[arg(long, default_value_t = 0.0)]
    a: f64,
    /// Outer radius of the transformed ball; `inf` for the whole space.
    #[arg(long = "T")]
    outer: Option<f64>,
}

impl ProblemArgs {
    fn p(&self) -> f64 {
        self.p.unwrap_or(2.0)
    }

    fn raw(&self) -> RawParams {
        let outer = self.outer.map(|t| {
            if t.is_infinite() {
                OuterRadius::Infinite
            } else {
                OuterRadius::Finite(t)
            }
        });
        RawParams {
            n: self.n,
            p: self.p(),
            s: self.s,
            radius: self.radius,
            a: self.a,
            outer,
        }
    }

    fn params(&self) -> Result<ProblemParams> {
        validate(self.raw())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum TestFunction {
    Cone,
    Quartic,
    Cosine,
    Extremal,
    Bubble,
    Bump,
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum StartFunction {
    Quartic,
    Extremal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum ScanScaling {
    ScaleN,
    ScaleP,
}

#[derive(Debug, Clone, Args, Serialize)]
struct BudgetArgs {
    /// Nelder-Mead evaluations per start.
    #[arg(long, default_value_t = 500)]
    evals: usize,
    /// Resolution cells; bump widths below 4 R / cells are rejected.
    #[arg(long, default_value_t = 1000)]
    cells: usize,
}

impl BudgetArgs {
    fn budget(&self) -> SearchBudget {
        SearchBudget {
            evals_per_start: self.evals,
            cells: self.cells,
        }
    }
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
enum Command {
    /// Exponents, thresholds and best constants for a parameter set.
    Constants {
        #[command(flatten)]
        problem: ProblemArgs,
    },
    /// Both sides of every norm identity of a map on three test functions.
    VerifyTransforms {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, value_parser = parse_kind)]
        kind: TransformKind,
        #[arg(long)]
        m: Option<f64>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Rayleigh quotient of one test function.
    Quotient {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, value_enum, default_value_t = TestFunction::Quartic)]
        function: TestFunction,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        /// Grid function CSV (node,value) for `--function grid`.
        #[arg(long)]
        grid: Option<PathBuf>,
    },
    /// Gradient-flow descent of the radial quotient on a graded grid.
    MinimizeRadial {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, default_value_t = 5000)]
        steps: usize,
        #[arg(long, default_value_t = 2000)]
        nodes: usize,
        #[arg(long, value_enum, default_value_t = StartFunction::Quartic)]
        start: StartFunction,
        /// Also store the final grid function here.
        #[arg(long)]
        save_grid: Option<PathBuf>,
    },
    /// Best boundary-bump quotient over a list of `a` values.
    BreakScan {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "0.1,0.25,0.6,0.7,0.8,0.9,0.95,0.99"
        )]
        a_grid: Vec<f64>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Smallest grid value of `a` with a non-radial witness.
    AStar {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "0.6,0.65,0.7,0.75,0.8,0.85,0.9,0.95,0.99"
        )]
        a_grid: Vec<f64>,
        #[arg(long, default_value_t = 1e-3)]
        margin: f64,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Log-log slope of boundary-bump quotients at `a = 1` (`--a` is ignored).
    DecayFit {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, default_value_t = 3)]
        kmin: i32,
        #[arg(long, default_value_t = 8)]
        kmax: i32,
    },
    /// Large-dimension limit of the transported Sobolev constant.
    DimLimit {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "10,100,1000,10000,100000,1000000"
        )]
        m_grid: Vec<f64>,
        /// Dimension for the identity check.
        #[arg(long, default_value_t = 5.0)]
        m: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Energy curves of a non-radial test function under scale_n or scale_p.
    ScalingScan {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, value_enum, default_value_t = ScanScaling::ScaleP)]
        scaling: ScanScaling,
        #[arg(long, default_value_t = 6)]
        kmax: i32,
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        /// Amplitude of the `cos(theta)` mode.
        #[arg(long, default_value_t = 0.5)]
        mode: f64,
    },
}

fn parse_kind(s: &str) -> std::result::Result<TransformKind, String> {
    s.parse::<TransformKind>().map_err(|e| e.to_string())
}

/// A finished command: the JSON result, an optional table and whether every
/// check passed.
struct Outcome {
    result: Value,
    table: Option<(Vec<String>, Vec<Vec<String>>)>,
    ok: bool,
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Io(e.to_string()))
}

/// Parses `argv`, runs the subcommand and returns the process exit code:
/// 0 success, 1 failed check or numerical failure, 2 invalid arguments.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let spec = QuadratureSpec::default().with_tol(cli.rel_tol);
    if let Err(e) = spec.validate() {
        eprintln!("error: {e}");
        return 2;
    }
    let outcome = pool.install(|| dispatch(&cli.command, &spec));
    match outcome.and_then(|o| emit(&cli, &spec, o)) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidParams(_) | Error::Domain(_) | Error::EmptyFamily(_) => 2,
                _ => 1,
            }
        }
    }
}

fn emit(cli: &Cli, spec: &QuadratureSpec, outcome: Outcome) -> Result<bool> {
    let config = json!({
        "command": to_value(&cli.command)?,
        "quadrature": to_value(spec)?,
        "format": cli.format,
        "output": cli.output,
    });
    let text = match (cli.format, &outcome.table) {
        (Format::Csv, Some((header, rows))) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(header)?;
            for r in rows {
                w.write_record(r)?;
            }
            let body = String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.to_string()))?)
                .map_err(|e| Error::Io(e.to_string()))?;
            format!(
                "# config: {}\n{}",
                serde_json::to_string(&config).map_err(|e| Error::Io(e.to_string()))?,
                body
            )
        }
        (Format::Csv, None) => {
            return Err(Error::InvalidParams(
                "this subcommand has no tabular output".into(),
            ))
        }
        (Format::Json, _) => {
            let doc = json!({ "config": config, "passed": outcome.ok, "result": outcome.result });
            serde_json::to_string_pretty(&doc).map_err(|e| Error::Io(e.to_string()))? + "\n"
        }
    };
    match &cli.output {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(outcome.ok)
}

fn fmt(x: f64) -> String {
    format!("{x:.12e}")
}

fn dispatch(cmd: &Command, spec: &QuadratureSpec) -> Result<Outcome> {
    match cmd {
        Command::Constants { problem } => {
            let params = problem.params()?;
            let c = derived_constants(&params, spec)?;
            Ok(Outcome {
                result: json!({ "params": params, "constants": c }),
                table: None,
                ok: true,
            })
        }
        Command::VerifyTransforms {
            problem,
            kind,
            m,
            tol,
        } => verify_transforms(problem, *kind, *m, *tol, spec),
        Command::Quotient {
            problem,
            function,
            lambda,
            eps,
            grid,
        } => {
            let params = problem.params()?;
            let rep = match function {
                TestFunction::Bump => {
                    let b = crate::funcspace::boundary_bump(*eps, BumpProfile::Cone, &params)?;
                    bump_quotient(&b, &params, spec)?
                }
                _ => {
                    let u = radial_test_function(*function, &params, *lambda, grid.as_ref())?;
                    rayleigh_quotient(u.as_ref(), &params, spec)?
                }
            };
            Ok(Outcome {
                result: to_value(&rep)?,
                table: None,
                ok: true,
            })
        }
        Command::MinimizeRadial {
            problem,
            steps,
            nodes,
            start,
            save_grid,
        } => {
            let params = problem.params()?;
            let grid = GridSpec {
                nodes: *nodes,
                ..GridSpec::default()
            };
            let opts = FlowOptions {
                max_steps: *steps,
                ..FlowOptions::default()
            };
            let start_fn: Box<dyn RadialProfile> = match start {
                StartFunction::Quartic => Box::new(ExplicitRadial::quartic(params.radius)),
                StartFunction::Extremal => Box::new(IokuExtremal::new(&params, 1.0)?),
            };
            let res = minimize_radial(&params, &grid, &opts, start_fn.as_ref())?;
            if let (Some(path), Some(g)) = (save_grid, &res.grid) {
                g.save_csv(path)?;
            }
            let rows = res
                .trace
                .iter()
                .enumerate()
                .map(|(i, q)| vec![i.to_string(), fmt(*q)])
                .collect();
            let mut result = to_value(&res)?;
            // the grid is large; keep JSON output to the summary unless saved separately
            if let Some(obj) = result.as_object_mut() {
                obj.remove("grid");
            }
            Ok(Outcome {
                result,
                table: Some((vec!["step".into(), "quotient".into()], rows)),
                ok: res.certified,
            })
        }
        Command::BreakScan {
            problem,
            a_grid,
            budget,
        } => {
            let params = problem.params()?;
            let rows = trial_scan(&params, a_grid, &bump_families(&params), &budget.budget())?;
            let table = rows
                .iter()
                .map(|r| {
                    vec![
                        r.a.to_string(),
                        fmt(r.best_quotient),
                        format!("{:.3e}", r.error),
                        r.family.clone(),
                        r.witness.clone(),
                    ]
                })
                .collect();
            let summary: Vec<Value> = rows
                .iter()
                .map(|r| json!({ "a": r.a, "best_quotient": r.best_quotient, "error": r.error, "family": r.family, "witness": r.witness, "parameters": r.result.parameters }))
                .collect();
            Ok(Outcome {
                result: json!({ "rows": summary }),
                table: Some((scan_header(), table)),
                ok: true,
            })
        }
        Command::AStar {
            problem,
            a_grid,
            margin,
            budget,
        } => {
            let params = problem.params()?;
            let rep = estimate_a_star_upper(
                &params,
                a_grid,
                *margin,
                &bump_families(&params),
                &budget.budget(),
            )?;
            let table = rep
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.a.to_string(),
                        fmt(r.best_quotient),
                        format!("{:.3e}", r.error),
                        r.family.clone(),
                        r.witness.clone(),
                    ]
                })
                .collect();
            let witness = rep.witness().map(|w| to_value(&w.result)).transpose()?;
            let result = json!({
                "a_hat": rep.a_hat,
                "witness_found": rep.a_hat.is_some(),
                "radial_level": rep.radial_level,
                "margin": rep.margin,
                "rows": rep.rows.iter().map(|r| json!({ "a": r.a, "best_quotient": r.best_quotient, "error": r.error, "family": r.family, "witness": r.witness })).collect::<Vec<_>>(),
                "witness": witness,
            });
            Ok(Outcome {
                result,
                table: Some((scan_header(), table)),
                ok: true,
            })
        }
        Command::DecayFit {
            problem,
            kmin,
            kmax,
        } => {
            let params = problem.params()?.with_a(1.0)?;
            if kmax < kmin {
                return Err(Error::InvalidParams("kmax < kmin".into()));
            }
            let eps: Vec<f64> = (*kmin..=*kmax).map(|k| 2f64.powi(-k)).collect();
            let fit = decay_fit(&params, &eps, BumpProfile::Cone)?;
            let expected = (params.dim() - 1.0) * (params.p - params.s) / (params.dim() - params.s);
            let rows = fit
                .eps
                .iter()
                .zip(&fit.quotients)
                .zip(&fit.errors)
                .map(|((e, q), err)| vec![fmt(*e), fmt(*q), format!("{err:.3e}")])
                .collect();
            let result = json!({ "fit": fit, "expected_slope": expected });
            Ok(Outcome {
                result,
                table: Some((vec!["eps".into(), "quotient".into(), "error".into()], rows)),
                ok: fit.strictly_decreasing,
            })
        }
        Command::DimLimit {
            problem,
            m_grid,
            m,
            tol,
        } => {
            let (n, p) = (problem.n, problem.p());
            let curve = limit_curve(m_grid, n, p)?;
            let annulus = ExplicitRadial::annulus_bump(0.5, 1.0);
            let weighted = weighted_limit_check(&annulus, m_grid, n, p, spec)?;
            let params = validate(RawParams {
                s: 0.0,
                a: 0.0,
                ..problem.raw()
            })?;
            let w = ExplicitRadial::truncated_bubble(BubbleShape::for_params(&params)?, 0.3, 1.0);
            let identities = verify_s_another(*m, n, p, &w, spec)?;
            let ok = identities.iter().all(|r| r.residual <= *tol)
                && weighted.below_energy.iter().all(|&b| b);
            let rows = curve
                .m
                .iter()
                .zip(&curve.values)
                .zip(&curve.gaps)
                .map(|((m, c), g)| vec![m.to_string(), format!("{c:.15e}"), format!("{g:.6e}")])
                .collect();
            let result = json!({ "curve": curve, "weighted": weighted, "identities": identities });
            Ok(Outcome {
                result,
                table: Some((vec!["m".into(), "c".into(), "gap".into()], rows)),
                ok,
            })
        }
        Command::ScalingScan {
            problem,
            scaling,
            kmax,
            b,
            mode,
        } => scaling_scan(problem, *scaling, *kmax, *b, *mode, spec),
    }
}

fn scan_header() -> Vec<String> {
    ["a", "best_quotient", "error", "family", "witness"]
        .iter()
        .map(|s| s.to_string())
        .collect()
}

fn bump_families(params: &ProblemParams) -> Vec<TrialFamily> {
    let mut f = vec![
        TrialFamily::boundary_bump(ProfileChoice::Cone),
        TrialFamily::boundary_bump(ProfileChoice::Smooth),
    ];
    if params.s < params.p {
        f.push(TrialFamily::boundary_bump(ProfileChoice::Bubble));
    }
    f
}

fn radial_test_function(
    f: TestFunction,
    params: &ProblemParams,
    lambda: f64,
    grid: Option<&PathBuf>,
) -> Result<Box<dyn RadialProfile>> {
    let r = params.radius;
    Ok(match f {
        TestFunction::Cone => Box::new(ExplicitRadial::linear_cone(r)),
        TestFunction::Quartic => Box::new(ExplicitRadial::quartic(r)),
        TestFunction::Cosine => Box::new(ExplicitRadial::cosine(r)),
        TestFunction::Extremal => Box::new(IokuExtremal::new(params, lambda)?),
        TestFunction::Bubble => Box::new(ExplicitRadial::truncated_bubble(
            BubbleShape::for_params(params)?,
            1.0 / lambda,
            r,
        )),
        TestFunction::Grid => {
            let path =
                grid.ok_or_else(|| Error::InvalidParams("--function grid needs --grid".into()))?;
            Box::new(GridFunction::load_csv(path, Interp::Linear)?)
        }
        TestFunction::Bump => unreachable!("bumps are not radial"),
    })
}

fn verify_transforms(
    problem: &ProblemArgs,
    kind: TransformKind,
    m: Option<f64>,
    tol: f64,
    spec: &QuadratureSpec,
) -> Result<Outcome> {
    let map = match kind {
        TransformKind::St => {
            let p = problem.p.unwrap_or(problem.n as f64);
            if p != problem.n as f64 {
                return Err(Error::InvalidParams(
                    "the st map is defined only for p = N".into(),
                ));
            }
            let m = m.ok_or_else(|| Error::InvalidParams("st map needs --m".into()))?;
            TransformMap::st(problem.n, m, problem.radius)?
        }
        _ => TransformMap::from_params(kind, &problem.params()?, m)?,
    };
    let mut reports = Vec::new();
    for (side, f) in transform_suite(&map) {
        for id in default_identities(&map) {
            reports.push(verify_norm_identity(&map, &f, side, id, spec)?);
        }
    }
    let max_residual = reports.iter().map(|r| r.residual).fold(0.0, f64::max);
    let rows = reports
        .iter()
        .map(|r| {
            vec![
                r.description.clone(),
                serde_json::to_string(&r.identity).unwrap_or_default(),
                fmt(r.lhs),
                fmt(r.rhs),
                format!("{:.3e}", r.residual),
            ]
        })
        .collect();
    let header = ["function", "identity", "lhs", "rhs", "residual"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    Ok(Outcome {
        result: json!({ "kind": kind, "max_residual": max_residual, "tolerance": tol, "reports": reports }),
        table: Some((header, rows)),
        ok: max_residual <= tol,
    })
}

fn scaling_scan(
    problem: &ProblemArgs,
    scaling: ScanScaling,
    kmax: i32,
    b: f64,
    mode: f64,
    spec: &QuadratureSpec,
) -> Result<Outcome> {
    let n = problem.n;
    let radial: Arc<dyn RadialProfile> = Arc::new(ExplicitRadial::annulus_bump(0.2, 0.9));
    let u = Separable::cosine_mode(radial, mode, 1.0);
    let (points, limit, ok) = match scaling {
        ScanScaling::ScaleN => {
            let p = problem.p.unwrap_or(n as f64);
            if p != n as f64 {
                return Err(Error::InvalidParams("scale_n needs p = N".into()));
            }
            let lams: Vec<f64> = (0..=kmax).map(|k| 2f64.powi(-k)).collect();
            let pts = scaled_energy_curve(ScalingKind::ScaleN { b }, &u, n, p, &lams, spec)?;
            let ok = certify_scale_n_growth(&pts, &u)?;
            (pts, None, ok)
        }
        ScanScaling::ScaleP => {
            let params = problem.params()?;
            let lams: Vec<f64> = (0..=kmax).map(|k| 2f64.powi(k)).collect();
            let kind = ScalingKind::ScaleP { a: params.a };
            let pts = scaled_energy_curve(kind, &u, n, params.p, &lams, spec)?;
            let lim = scale_p_limit_energy(&u, n, params.p, params.a, spec)?;
            let gaps: Vec<f64> = pts
                .iter()
                .map(|q| (q.energy - lim.value).abs() / lim.value)
                .collect();
            let ok = gaps.windows(2).all(|w| w[1] < w[0]);
            (pts, Some((lim, gaps)), ok)
        }
    };
    let rows = points
        .iter()
        .map(|q| {
            vec![
                q.lambda.to_string(),
                fmt(q.energy),
                format!("{:.3e}", q.error),
            ]
        })
        .collect();
    let result = json!({
        "function": u.describe(),
        "points": points,
        "limit": limit.as_ref().map(|(l, _)| json!({ "energy": l.value, "error": l.error })),
        "gaps": limit.map(|(_, g)| g),
        "monotone": ok,
    });
    Ok(Outcome {
        result,
        table: Some((vec!["lambda".into(), "energy".into(), "error".into()], rows)),
        ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invalid_parameters_exit_with_two() {
        assert_eq!(
            run([
                "hslab",
                "constants",
                "--N",
                "3",
                "--p",
                "5",
                "--output",
                "/dev/null"
            ]),
            2
        );
        assert_eq!(run(["hslab", "no-such-command"]), 2);
    }

    #[test]
    fn constants_are_written_with_the_config() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("c.json");
        let code = run([
            "hslab",
            "constants",
            "--N",
            "3",
            "--p",
            "2",
            "--s",
            "1",
            "--output",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(doc["config"]["command"]["command"], "constants");
        assert_eq!(doc["result"]["constants"]["beta"], 3.0);
        assert_eq!(doc["result"]["constants"]["p_star"], 4.0);
        assert_eq!(doc["result"]["constants"]["rearrange_threshold"], 0.25);
    }

    #[test]
    fn st_kind_requires_p_equal_to_n() {
        assert_eq!(
            run([
                "hslab",
                "verify-transforms",
                "--kind",
                "st",
                "--N",
                "2",
                "--p",
                "1.5",
                "--m",
                "3"
            ]),
            2
        );
    }
}
