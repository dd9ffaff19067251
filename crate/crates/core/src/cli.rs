//! Command-line front end. `run_cli` is pure apart from reading input files,
//! so tests drive it directly and compare the returned output.

use std::fmt::Write as _;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::almansi::{almansi_decompose, ReconstructMode};
use crate::corpus::{random_point, rng_for};
use crate::error::{Error, Result};
use crate::index::IndexSet;
use crate::integral::{
    mean_value_check, poisson_check, IntegralCheck, MeanValueFormula, PoissonFormula,
};
use crate::poly::QPolynomial;
use crate::quat::Quaternion;
use crate::slice::{QPoint, SliceFunction};
use crate::tolerances as tol;
use crate::verify::{run_suite, Check, Status, Suite, VerifyConfig, DEFAULT_SAMPLES};

pub const SEED_ENV: &str = "ALMANSI_SEED";
/// Points used by `decompose` to measure the reconstruction residual.
pub const DECOMPOSE_POINTS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CliOutput {
    fn usage(msg: impl Into<String>) -> Self {
        let mut stderr = msg.into();
        if !stderr.ends_with('\n') {
            stderr.push('\n');
        }
        CliOutput {
            code: 2,
            stdout: String::new(),
            stderr,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub tool_version: String,
    pub command: String,
    pub checks: Vec<Check>,
    pub seed: u64,
    pub elapsed_ms: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "almansi",
    version,
    about = "Almansi decompositions of quaternionic slice functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormulaArg {
    Mv1,
    Mv2,
    #[value(name = "mvK")]
    MvK,
    Poisson1,
    Poisson2,
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Defaults to $ALMANSI_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decompose a polynomial along a set of variables.
    Decompose {
        /// Polynomial JSON, inline or a file path.
        #[arg(long)]
        input: String,
        /// Comma-separated variable indices; empty for the trivial decomposition.
        #[arg(long = "H", allow_hyphen_values = true)]
        h: String,
        /// Reconstruct with pointwise ordered products (H must be {1..m}).
        #[arg(long)]
        ordered: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate a polynomial at a point.
    Eval {
        #[arg(long)]
        input: String,
        /// Array of [w, x, y, z] arrays.
        #[arg(long)]
        point: String,
        #[command(flatten)]
        common: Common,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = DEFAULT_SAMPLES, value_parser = clap::value_parser!(u64).range(2..))]
        samples: u64,
        /// Replaces the tolerance of every exact check.
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Check a mean-value or Poisson formula by Monte Carlo.
    Integrate {
        #[arg(long)]
        input: String,
        #[arg(long, value_enum)]
        formula: FormulaArg,
        #[arg(long)]
        center: String,
        /// One radius per variable.
        #[arg(long)]
        radii: String,
        /// Number of leading variables integrated; defaults to n.
        #[arg(long)]
        m: Option<usize>,
        /// Interior points for the Poisson formulas; defaults to zeros.
        #[arg(long)]
        x: Option<String>,
        #[arg(long = "H")]
        h: Option<String>,
        #[arg(long = "K")]
        k: Option<String>,
        #[arg(long, default_value_t = DEFAULT_SAMPLES, value_parser = clap::value_parser!(u64).range(2..))]
        samples: u64,
        #[command(flatten)]
        common: Common,
    },
}

/// Runs the tool with `argv` (program name first), reading the default seed from the environment.
pub fn run_cli(argv: &[String]) -> CliOutput {
    let env = std::env::var(SEED_ENV).ok();
    run_cli_with_env(argv, env.as_deref())
}

/// As [`run_cli`], with the `ALMANSI_SEED` value passed in.
pub fn run_cli_with_env(argv: &[String], env_seed: Option<&str>) -> CliOutput {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                CliOutput::usage(text)
            } else {
                CliOutput {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let command = argv.iter().skip(1).cloned().collect::<Vec<_>>().join(" ");
    let start = Instant::now();
    let (common, outcome) = match &cli.command {
        Command::Decompose { common, .. }
        | Command::Eval { common, .. }
        | Command::Verify { common, .. }
        | Command::Integrate { common, .. } => (common, resolve_seed(common.seed, env_seed)),
    };
    let seed = match outcome {
        Ok(s) => s,
        Err(e) => return CliOutput::usage(format!("error: {e}")),
    };
    let run = match &cli.command {
        Command::Decompose {
            input, h, ordered, ..
        } => decompose(input, h, *ordered, seed),
        Command::Eval { input, point, .. } => eval(input, point),
        Command::Verify {
            suite,
            samples,
            tol,
            ..
        } => verify(suite, *samples, *tol, seed),
        Command::Integrate {
            input,
            formula,
            center,
            radii,
            m,
            x,
            h,
            k,
            samples,
            ..
        } => integrate(
            IntegrateArgs {
                input,
                formula: *formula,
                center,
                radii,
                m: *m,
                x,
                h,
                k,
                samples: *samples,
            },
            seed,
        ),
    };
    let (checks, result) = match run {
        Ok(r) => r,
        Err(e) => return CliOutput::usage(format!("error: {e}")),
    };
    let report = Report {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        command,
        checks,
        seed,
        elapsed_ms: start.elapsed().as_millis() as u64,
        result,
    };
    let code = if report.all_passed() { 0 } else { 1 };
    let stdout = match common.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => render_text(&report, &cli.command),
    };
    CliOutput {
        code,
        stdout,
        stderr: String::new(),
    }
}

fn resolve_seed(flag: Option<u64>, env: Option<&str>) -> Result<u64> {
    match (flag, env) {
        (Some(s), _) => Ok(s),
        (None, Some(v)) => v
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("{SEED_ENV}='{v}' is not an unsigned integer"))),
        (None, None) => Ok(0),
    }
}

/// Inline JSON when the argument starts with `{` or `[`, otherwise a file path.
fn load_json_arg(arg: &str, what: &str) -> Result<String> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        Ok(arg.to_string())
    } else {
        std::fs::read_to_string(arg)
            .map_err(|e| Error::Parse(format!("cannot read {what} '{arg}': {e}")))
    }
}

fn parse_json<T: serde::de::DeserializeOwned>(arg: &str, what: &str) -> Result<T> {
    let text = load_json_arg(arg, what)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("invalid {what}: {e}")))
}

fn parse_poly(arg: &str) -> Result<QPolynomial> {
    parse_json(arg, "polynomial")
}

/// `"1,3"` -> `{1, 3}`; empty means `∅`. Range is checked against `n`.
pub fn parse_index_list(s: &str, n: usize) -> Result<IndexSet> {
    let vars = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| Error::Parse(format!("'{t}' is not a variable index")))
        })
        .collect::<Result<Vec<_>>>()?;
    IndexSet::try_from_vars(&vars, n)
}

type Outcome = Result<(Vec<Check>, Option<Value>)>;

fn decompose(input: &str, h: &str, ordered: bool, seed: u64) -> Outcome {
    let p = parse_poly(input)?;
    let n = p.n();
    let h = parse_index_list(h, n)?;
    let mode = if ordered {
        ReconstructMode::OrderedPointwise
    } else {
        ReconstructMode::Slice
    };
    if ordered && !h.is_initial_interval() {
        return Err(Error::Mode(format!(
            "ordered reconstruction needs H = {{1..m}}, got {h}"
        )));
    }
    let dec = almansi_decompose(&SliceFunction::from_poly(&p), h)?;
    let mut rng = rng_for(seed, 0);
    let mut worst = 0.0f64;
    for _ in 0..DECOMPOSE_POINTS {
        let x = random_point(&mut rng, n, 0.1, 2.0);
        let exact = p.eval(x.coords())?;
        let rec = dec.reconstruct(&x, mode)?;
        worst = worst.max((rec - exact).norm() / (1.0 + exact.norm()));
    }
    let t = if ordered {
        tol::ORDERED_RECONSTRUCTION
    } else {
        tol::RECONSTRUCTION
    };
    let check = Check::new(
        "reconstruction",
        worst,
        t,
        format!(
            "{DECOMPOSE_POINTS} seeded points, {} mode, relative residual",
            if ordered { "ordered" } else { "slice" }
        ),
    );
    let mut result = dec.to_json();
    result["residual"] = json!(worst);
    Ok((vec![check], Some(result)))
}

fn eval(input: &str, point: &str) -> Outcome {
    let p = parse_poly(input)?;
    let x: QPoint = parse_json(point, "point")?;
    if x.n() != p.n() {
        return Err(Error::domain(format!(
            "point has {} coordinates, polynomial has {} variables",
            x.n(),
            p.n()
        )));
    }
    let v = p.eval(x.coords())?;
    Ok((Vec::new(), Some(json!({ "value": v }))))
}

fn verify(suite: &str, samples: u64, tol: Option<f64>, seed: u64) -> Outcome {
    let suite: Suite = suite.parse()?;
    if let Some(t) = tol {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::Parse(format!(
                "--tol {t} must be a nonnegative finite number"
            )));
        }
    }
    let cfg = VerifyConfig { seed, samples, tol };
    Ok((
        run_suite(suite, &cfg),
        Some(json!({ "suite": suite.to_string() })),
    ))
}

struct IntegrateArgs<'a> {
    input: &'a str,
    formula: FormulaArg,
    center: &'a str,
    radii: &'a str,
    m: Option<usize>,
    x: &'a Option<String>,
    h: &'a Option<String>,
    k: &'a Option<String>,
    samples: u64,
}

fn integrate(a: IntegrateArgs<'_>, seed: u64) -> Outcome {
    let p = parse_poly(a.input)?;
    let n = p.n();
    let center: QPoint = parse_json(a.center, "center")?;
    let radii: Vec<f64> = parse_json(a.radii, "radii")?;
    let m = a.m.unwrap_or(n);
    let check: IntegralCheck = match a.formula {
        FormulaArg::Mv1 => mean_value_check(
            &p,
            &center,
            &radii,
            m,
            MeanValueFormula::First,
            a.samples,
            seed,
        )?,
        FormulaArg::Mv2 => mean_value_check(
            &p,
            &center,
            &radii,
            m,
            MeanValueFormula::Second,
            a.samples,
            seed,
        )?,
        FormulaArg::MvK => {
            let h =
                a.h.as_deref()
                    .ok_or_else(|| Error::Parse("mvK needs --H".into()))?;
            let k =
                a.k.as_deref()
                    .ok_or_else(|| Error::Parse("mvK needs --K".into()))?;
            let (h, k) = (parse_index_list(h, n)?, parse_index_list(k, n)?);
            if h.is_empty() {
                return Err(Error::domain("mvK needs a nonempty H"));
            }
            if !k.is_subset(h) {
                return Err(Error::domain(format!("K = {k} is not a subset of H = {h}")));
            }
            let m = h.max().unwrap_or(1);
            mean_value_check(
                &p,
                &center,
                &radii,
                m,
                MeanValueFormula::Components { h, k },
                a.samples,
                seed,
            )?
        }
        FormulaArg::Poisson1 | FormulaArg::Poisson2 => {
            let x: Vec<Quaternion> = match a.x {
                Some(s) => parse_json(s, "interior points")?,
                None => vec![Quaternion::ZERO; m],
            };
            let f = if a.formula == FormulaArg::Poisson1 {
                PoissonFormula::First
            } else {
                PoissonFormula::Second
            };
            poisson_check(&p, &center, &radii, &x, m, f, a.samples, seed)?
        }
    };
    let name = match a.formula {
        FormulaArg::Mv1 => "mean_value_first",
        FormulaArg::Mv2 => "mean_value_second",
        FormulaArg::MvK => "mean_value_component",
        FormulaArg::Poisson1 => "poisson_first",
        FormulaArg::Poisson2 => "poisson_second",
    };
    let c = Check::new(
        name,
        check.discrepancy(),
        check.tolerance(),
        format!(
            "max componentwise |lhs - rhs| against max(3 stderr, 1e-3), {} samples",
            check.rhs.samples
        ),
    );
    let result = json!({
        "lhs": check.lhs,
        "value": check.rhs.value,
        "stderr": check.rhs.stderr,
        "samples": check.rhs.samples,
        "seed": check.rhs.seed,
    });
    Ok((vec![c], Some(result)))
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "fail",
    }
}

fn fmt_q(q: &Value) -> String {
    match q.as_array() {
        Some(a) => {
            let parts: Vec<String> = a
                .iter()
                .map(|v| v.as_f64().map_or("?".into(), |f| format!("{f:.6}")))
                .collect();
            format!("[{}]", parts.join(", "))
        }
        None => q.to_string(),
    }
}

fn render_text(r: &Report, cmd: &Command) -> String {
    let mut out = String::new();
    if let (Command::Decompose { .. }, Some(res)) = (cmd, &r.result) {
        let h: Vec<String> = res["H"]
            .as_array()
            .into_iter()
            .flatten()
            .map(|v| v.to_string())
            .collect();
        let _ = writeln!(out, "H = {{{}}}", h.join(","));
        let _ = writeln!(out, "{:<12} component", "K");
        if let Some(comps) = res["components"].as_object() {
            let mut keys: Vec<(u32, &String)> =
                comps.keys().map(|k| (k.parse().unwrap_or(0), k)).collect();
            keys.sort();
            for (bits, key) in keys {
                let set = IndexSet::from_bits(bits).to_string();
                let _ = writeln!(out, "{:<12} {}", set, comps[key].as_str().unwrap_or("?"));
            }
        }
        out.push('\n');
    }
    if let (Command::Eval { .. }, Some(res)) = (cmd, &r.result) {
        let _ = writeln!(out, "value = {}", fmt_q(&res["value"]));
    }
    if let (Command::Integrate { .. }, Some(res)) = (cmd, &r.result) {
        let _ = writeln!(out, "exact       {}", fmt_q(&res["lhs"]));
        let _ = writeln!(out, "estimate    {}", fmt_q(&res["value"]));
        let _ = writeln!(
            out,
            "stderr      {:.3e}",
            res["stderr"].as_f64().unwrap_or(f64::NAN)
        );
        let _ = writeln!(out, "samples     {}\n", res["samples"]);
    }
    if !r.checks.is_empty() {
        let width = r
            .checks
            .iter()
            .map(|c| c.name.len())
            .max()
            .unwrap_or(5)
            .max(5);
        let _ = writeln!(
            out,
            "{:<width$}  {:<6}  {:>10}  {:>10}",
            "check", "status", "residual", "tolerance"
        );
        for c in &r.checks {
            let res = if c.residual.is_finite() {
                format!("{:.3e}", c.residual)
            } else {
                "n/a".into()
            };
            let _ = writeln!(
                out,
                "{:<width$}  {:<6}  {:>10}  {:>10.0e}",
                c.name,
                status_word(c.status),
                res,
                c.tolerance
            );
        }
        let passed = r.checks.iter().filter(|c| c.passed()).count();
        let _ = writeln!(out, "\n{passed}/{} passed, seed {}", r.checks.len(), r.seed);
        for c in r.checks.iter().filter(|c| !c.passed()) {
            let _ = writeln!(out, "  {}: {}", c.name, c.details);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const X1X2: &str = r#"{"n": 2, "terms": [{"alpha": [1, 1], "coeff": [1, 0, 0, 0]}]}"#;

    fn run(args: &[&str]) -> CliOutput {
        let argv: Vec<String> = std::iter::once("almansi")
            .chain(args.iter().copied())
            .map(String::from)
            .collect();
        run_cli_with_env(&argv, None)
    }

    #[test]
    fn decompose_lists_example_components() {
        let out = run(&["decompose", "--input", X1X2, "--H", "1"]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["result"]["components"]["1"], "2*a1*x2");
        assert_eq!(v["result"]["components"]["0"], "x2");
        assert!(v["result"]["residual"].as_f64().unwrap() < 1e-9);
        assert_eq!(v["checks"][0]["status"], "pass");
    }

    #[test]
    fn out_of_range_variable_is_usage_error() {
        let out = run(&["decompose", "--H", "7", "--input", X1X2]);
        assert_eq!(out.code, 2);
        assert!(
            out.stderr.contains("variable index 7 out of range"),
            "{}",
            out.stderr
        );
    }

    #[test]
    fn ordered_needs_interval() {
        let out = run(&["decompose", "--input", X1X2, "--H", "2", "--ordered"]);
        assert_eq!(out.code, 2);
        let out = run(&["decompose", "--input", X1X2, "--H", "1,2", "--ordered"]);
        assert_eq!(out.code, 0, "{}", out.stderr);
    }

    #[test]
    fn eval_reports_value() {
        let out = run(&["eval", "--input", X1X2, "--point", "[[0,1,0,0],[0,0,1,0]]"]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        // i * j = k
        assert_eq!(v["result"]["value"], json!([0.0, 0.0, 0.0, 1.0]));
    }

    #[test]
    fn bad_input_and_flags_exit_two() {
        assert_eq!(
            run(&["decompose", "--input", "{not json", "--H", "1"]).code,
            2
        );
        assert_eq!(
            run(&["decompose", "--input", "/nonexistent/p.json", "--H", "1"]).code,
            2
        );
        assert_eq!(run(&["verify", "--suite", "nope"]).code, 2);
        assert_eq!(run(&["frobnicate"]).code, 2);
        assert_eq!(run(&["verify", "--tol", "-1"]).code, 2);
    }

    #[test]
    fn seed_resolution() {
        assert_eq!(resolve_seed(None, None).unwrap(), 0);
        assert_eq!(resolve_seed(None, Some("17")).unwrap(), 17);
        assert_eq!(resolve_seed(Some(3), Some("17")).unwrap(), 3);
        assert!(resolve_seed(None, Some("x")).is_err());
        let argv: Vec<String> = [
            "almansi",
            "eval",
            "--input",
            X1X2,
            "--point",
            "[[1,0,0,0],[1,0,0,0]]",
        ]
        .map(String::from)
        .to_vec();
        let out = run_cli_with_env(&argv, Some("99"));
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["seed"], 99);
    }

    #[test]
    fn integrate_constant_is_exact() {
        let c = r#"{"n": 1, "terms": [{"alpha": [0], "coeff": [2, 1, 0, 0]}]}"#;
        let out = run(&[
            "integrate",
            "--input",
            c,
            "--formula",
            "poisson1",
            "--center",
            "[[0,0,0,0]]",
            "--radii",
            "[1]",
            "--x",
            "[[0,0.3,0,0]]",
            "--samples",
            "20000",
        ]);
        assert_eq!(out.code, 0, "{}{}", out.stdout, out.stderr);
    }

    #[test]
    fn integrate_component_formula() {
        let out = run(&[
            "integrate",
            "--input",
            X1X2,
            "--formula",
            "mvK",
            "--center",
            "[[0.2,0,0,0],[0,0.1,0,0]]",
            "--radii",
            "[0.5,0.5]",
            "--H",
            "1,2",
            "--K",
            "2",
            "--samples",
            "20000",
            "--format",
            "text",
        ]);
        assert_eq!(out.code, 0, "{}{}", out.stdout, out.stderr);
        assert!(out.stdout.contains("mean_value_component"));
        let bad = run(&[
            "integrate",
            "--input",
            X1X2,
            "--formula",
            "mvK",
            "--center",
            "[[0,0,0,0],[0,0,0,0]]",
            "--radii",
            "[1,1]",
            "--H",
            "1",
            "--K",
            "2",
        ]);
        assert_eq!(bad.code, 2);
    }

    #[test]
    fn text_format_renders_table() {
        let out = run(&[
            "decompose",
            "--input",
            X1X2,
            "--H",
            "1,2",
            "--format",
            "text",
        ]);
        assert_eq!(out.code, 0);
        assert!(out.stdout.contains("4*a1*a2"));
        assert!(out.stdout.contains("reconstruction"));
    }

    #[test]
    fn help_goes_to_stdout() {
        let out = run(&["--help"]);
        assert_eq!(out.code, 0);
        assert!(out.stdout.contains("decompose"));
    }
}
