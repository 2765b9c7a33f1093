//! Command-line front end. Every subcommand prints one JSON document (or a
//! CSV table) on stdout; exit code 0 means success, 1 a failed mathematical
//! check, 2 invalid input.

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::classgroup::{enumerate_class_group, ClassCharacter, ClassGroup, FundamentalDiscriminant};
use crate::error::{Error, Result};
use crate::gl2lab;
use crate::lfun::{average_local_factor, euler_product_average};
use crate::lowlying::{fejer_test_function, sigma_integral, support_warning, synthetic_family_density, SymmetryMeasure};
use crate::measures::{delta_table, normalization_report, plancherel_measure, QuadratureRule, SpectralMeasure};
use crate::rmt::{self, Ensemble};
use crate::sugano::{decompose_in_u_basis, expand_u};

#[derive(Parser, Debug)]
#[command(name = "bplab", version, about = "Bessel-model spectral laboratory")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sugano polynomials U^{l,m}
    #[command(subcommand)]
    Sugano(SuganoCmd),
    /// Class groups and their characters
    #[command(subcommand)]
    Classgroup(ClassgroupCmd),
    /// Plancherel measures
    #[command(subcommand)]
    Measure(MeasureCmd),
    /// Averaged spin L-function
    #[command(subcommand)]
    Lfun(LfunCmd),
    /// Low-lying zero statistics
    #[command(subcommand)]
    Lowlying(LowlyingCmd),
    /// Random-matrix ensembles
    #[command(subcommand)]
    Rmt(RmtCmd),
    /// GL(2) Petersson, Bessel and tau computations
    #[command(subcommand)]
    Gl2(Gl2Cmd),
}

#[derive(Subcommand, Debug)]
enum SuganoCmd {
    /// Expand one U^{l,m}
    Expand(ExpandArgs),
}

#[derive(Subcommand, Debug)]
enum ClassgroupCmd {
    /// Reduced forms, characters and optional λ_p values
    Info(InfoArgs),
}

#[derive(Subcommand, Debug)]
enum MeasureCmd {
    /// Orthonormality of U^{l,m} against μ_p and the mass normalization
    Check(CheckArgs),
}

#[derive(Subcommand, Debug)]
enum LfunCmd {
    /// Euler product of local averages
    Average(AverageArgs),
}

#[derive(Subcommand, Debug)]
enum LowlyingCmd {
    /// Synthetic one-level density
    Density(DensityArgs),
}

#[derive(Subcommand, Debug)]
enum RmtCmd {
    /// Estimate c_n = 1/E[det(1-g)] on SO(2n)
    Cn(CnArgs),
    /// One-level density of USp(2n) or SO(2n)
    Density(RmtDensityArgs),
}

#[derive(Subcommand, Debug)]
enum Gl2Cmd {
    /// Kloosterman side of the Petersson formula
    Petersson(PeterssonArgs),
    /// Fitted constants for the Bessel bounds
    BesselBounds(BoundsArgs),
    /// Ramanujan tau values
    Tau(TauArgs),
}

#[derive(Args, Debug, Serialize)]
struct CharArgs {
    /// Fundamental discriminant is -d
    #[arg(long)]
    d: u64,
    /// Index into the sorted character list (0 is trivial)
    #[arg(long = "char-index", default_value_t = 0)]
    char_index: usize,
}

#[derive(Args, Debug, Serialize)]
struct ExpandArgs {
    #[command(flatten)]
    #[serde(flatten)]
    chi: CharArgs,
    #[arg(long)]
    p: u64,
    #[arg(long)]
    l: u32,
    #[arg(long)]
    m: u32,
}

#[derive(Args, Debug, Serialize)]
struct InfoArgs {
    #[arg(long)]
    d: u64,
    /// Primes at which to report λ_p
    #[arg(long, value_delimiter = ',')]
    p: Vec<u64>,
}

#[derive(Args, Debug, Serialize)]
struct CheckArgs {
    #[arg(long)]
    d: u64,
    #[arg(long)]
    p: u64,
    /// Restrict to one character; all characters otherwise
    #[arg(long = "char-index")]
    char_index: Option<usize>,
    #[arg(long = "max-degree", default_value_t = 6)]
    max_degree: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

#[derive(Args, Debug, Serialize)]
struct AverageArgs {
    #[command(flatten)]
    #[serde(flatten)]
    chi: CharArgs,
    /// Real part of s
    #[arg(long, default_value_t = 2.0)]
    s: f64,
    #[arg(long = "prime-cutoff", default_value_t = 100_000)]
    prime_cutoff: u64,
    /// Also compare quadrature and closed form at these primes
    #[arg(long, value_delimiter = ',')]
    p: Vec<u64>,
}

#[derive(Args, Debug, Serialize)]
struct DensityArgs {
    #[command(flatten)]
    #[serde(flatten)]
    chi: CharArgs,
    #[arg(long, default_value_t = 10_000.0)]
    k: f64,
    #[arg(long, default_value_t = 0.25)]
    alpha: f64,
    #[arg(long = "prime-cutoff", default_value_t = 1000)]
    prime_cutoff: u64,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug, Serialize)]
struct CnArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug, Serialize)]
struct RmtDensityArgs {
    /// usp or so
    #[arg(long)]
    ensemble: String,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.25)]
    alpha: f64,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    weighted: bool,
}

#[derive(Args, Debug, Serialize)]
struct PeterssonArgs {
    #[arg(long)]
    k: u32,
    #[arg(long = "L")]
    big_l: u64,
    #[arg(long = "c-max")]
    c_max: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
struct BoundsArgs {
    #[arg(long = "k-max", default_value_t = 60)]
    k_max: u32,
    #[arg(long = "x-max", default_value_t = 100.0)]
    x_max: f64,
}

#[derive(Args, Debug, Serialize)]
struct TauArgs {
    #[arg(long, default_value_t = 100)]
    n: usize,
}

/// What a run produced: exit code and the two output streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Report {
    command: &'static str,
    params: Value,
    result: Value,
    diagnostics: Vec<String>,
    passed: bool,
}

impl Report {
    fn new(command: &'static str, params: &impl Serialize, result: impl Serialize) -> Self {
        Report {
            command,
            params: serde_json::to_value(params).unwrap_or(Value::Null),
            result: serde_json::to_value(result).unwrap_or(Value::Null),
            diagnostics: Vec::new(),
            passed: true,
        }
    }
}

fn group(d: u64) -> Result<ClassGroup> {
    Ok(enumerate_class_group(FundamentalDiscriminant::new(d)?))
}

fn character(g: &ClassGroup, index: usize) -> Result<ClassCharacter> {
    let chars = g.characters();
    let n = chars.len();
    chars
        .into_iter()
        .nth(index)
        .ok_or_else(|| Error::invalid(format!("character index {index} out of range (class number {n})")))
}

fn expand(args: &ExpandArgs) -> Result<Report> {
    let g = group(args.chi.d)?;
    let chi = character(&g, args.chi.char_index)?;
    let datum = g.local_datum(&chi, args.p)?;
    let u = expand_u(&datum, args.l as usize, args.m as usize);
    let coords: Vec<Value> = decompose_in_u_basis(&datum, &u)?
        .into_iter()
        .map(|((l, m), c)| json!({"l": l, "m": m, "coefficient": c.to_complex(args.p).re}))
        .collect();
    let result = json!({
        "exact": datum.is_exact(),
        "epsilon": datum.epsilon(),
        "lambda": datum.lambda_f64(),
        "polynomial": u.to_json(),
        "u_basis": coords,
    });
    Ok(Report::new("sugano expand", args, result))
}

fn info(args: &InfoArgs) -> Result<Report> {
    let g = group(args.d)?;
    let forms: Vec<Value> = g.classes().iter().map(|f| json!([f.a, f.b, f.c])).collect();
    let mut chars = Vec::new();
    for (i, chi) in g.characters().iter().enumerate() {
        let mut lambdas = Vec::new();
        for &p in &args.p {
            lambdas.push(json!({"p": p, "lambda": g.lambda_p(chi, p)?}));
        }
        let (lhs, rhs) = g.autcsum_identity(chi);
        chars.push(json!({
            "index": i,
            "order": chi.order(),
            "real": chi.is_real(),
            "d_lambda": chi.d_lambda(),
            "values": (0..g.class_number()).map(|c| { let z = chi.value(c); [z.re, z.im] }).collect::<Vec<_>>(),
            "autcsum": {"lhs": lhs.as_integer(), "rhs": rhs},
            "lambda_p": lambdas,
        }));
    }
    let result = json!({
        "class_number": g.class_number(),
        "unit_count": g.unit_count(),
        "forms": forms,
        "characters": chars,
    });
    Ok(Report::new("classgroup info", args, result))
}

fn check(args: &CheckArgs) -> Result<Report> {
    let g = group(args.d)?;
    let haar = SpectralMeasure::haar();
    let chars: Vec<(usize, ClassCharacter)> = match args.char_index {
        Some(i) => vec![(i, character(&g, i)?)],
        None => g.characters().into_iter().enumerate().collect(),
    };
    let mut out = Vec::new();
    let mut rows_flat = Vec::new();
    let mut passed = true;
    let mut diagnostics = Vec::new();
    for (i, chi) in chars {
        let mu = plancherel_measure(&g, &chi, args.p)?;
        let rows = delta_table(&mu, args.max_degree, args.tol)?;
        let norm = normalization_report(&mu, &haar);
        passed &= rows.iter().all(|r| r.pass) && norm.prefactor_deviation < 1e-10;
        if i == 0 {
            diagnostics.push(format!(
                "printed Haar constant gives mass {:.12} on the ordered region; numerical normalization is used",
                norm.printed_haar_mass
            ));
        }
        for r in &rows {
            rows_flat.push(json!({"char_index": i, "l": r.l, "m": r.m, "value": r.value, "expected": r.expected, "deviation": r.deviation, "pass": r.pass}));
        }
        out.push(json!({"char_index": i, "normalization": norm, "rows": rows}));
    }
    let mut report = Report::new("measure check", args, json!({"pass": passed, "rows": rows_flat, "characters": out}));
    report.passed = passed;
    report.diagnostics = diagnostics;
    Ok(report)
}

fn average(args: &AverageArgs) -> Result<Report> {
    let g = group(args.chi.d)?;
    let chi = character(&g, args.chi.char_index)?;
    let s = Complex64::new(args.s, 0.0);
    let euler = euler_product_average(&g, &chi, s, args.prime_cutoff)?;
    let mut locals = Vec::new();
    for &p in &args.p {
        let mu = plancherel_measure(&g, &chi, p)?;
        let avg = average_local_factor(&mu, s, QuadratureRule::default())?;
        locals.push(json!({"p": p, "quadrature": avg.numeric.re, "closed_form": avg.closed_form.re, "deviation": (avg.numeric - avg.closed_form).norm()}));
    }
    let partials: Vec<Value> = euler.partials.iter().map(|(c, v)| json!({"cutoff": c, "value": v.re})).collect();
    let result = json!({"value": euler.value.re, "primes_used": euler.primes_used, "partials": partials, "local": locals});
    Ok(Report::new("lfun average", args, result))
}

fn density(args: &DensityArgs) -> Result<Report> {
    let g = group(args.chi.d)?;
    let chi = character(&g, args.chi.char_index)?;
    let phi = fejer_test_function(args.alpha)?;
    let r = synthetic_family_density(args.k, &g, &chi, &phi, args.prime_cutoff, args.samples, args.seed)?;
    let mut report = Report::new("lowlying density", args, &r);
    report.diagnostics.extend(support_warning(args.alpha));
    if r.support_truncated {
        report.diagnostics.push("prime cutoff truncates the support of the test function".into());
    }
    Ok(report)
}

fn cn(args: &CnArgs) -> Result<Report> {
    let e = rmt::estimate_cn(args.n, args.samples, args.seed)?;
    Ok(Report::new("rmt cn", args, json!({"c_n": e.value, "stderr": e.stderr, "samples": e.samples})))
}

fn rmt_density(args: &RmtDensityArgs) -> Result<Report> {
    let ensemble: Ensemble = args.ensemble.parse()?;
    let phi = fejer_test_function(args.alpha)?;
    let e = rmt::one_level_density(ensemble, args.n, &phi, args.samples, args.seed, args.weighted)?;
    let target = match ensemble {
        Ensemble::USp => sigma_integral(&phi, SymmetryMeasure::Sp),
        Ensemble::SOeven => sigma_integral(&phi, SymmetryMeasure::O),
    };
    let result = json!({
        "estimate": e.value,
        "stderr": e.stderr,
        "samples": e.samples,
        "finite_n_expectation": if args.weighted { Value::Null } else { json!(rmt::one_level_expectation(ensemble, args.n, &phi)?) },
        "sigma_target": target,
    });
    let mut report = Report::new("rmt density", args, result);
    report.diagnostics.extend(support_warning(args.alpha).filter(|_| args.alpha >= 1.0));
    Ok(report)
}

fn petersson(args: &PeterssonArgs) -> Result<Report> {
    let c_max = args.c_max.unwrap_or_else(|| gl2lab::default_c_max(args.k, args.big_l));
    let side = gl2lab::petersson_kloosterman_side(args.k, args.big_l, c_max)?;
    let delta = if args.big_l == 1 { 1.0 } else { 0.0 };
    // weights with no cusp forms in level one
    let empty_space = matches!(args.k, 6 | 8 | 10 | 14);
    let mut report = Report::new(
        "gl2 petersson",
        args,
        json!({"side": side.value, "delta": delta, "tail_estimate": side.tail_estimate, "c_max": side.c_max, "c_evaluated": side.c_evaluated, "empty_space": empty_space, "deviation": (side.value - delta).abs()}),
    );
    if side.insufficient_cutoff {
        report.diagnostics.push(format!("tail estimate {:e} exceeds 1e-8; raise --c-max", side.tail_estimate));
    }
    if empty_space && (side.value - delta).abs() >= 1e-6 {
        report.passed = false;
        report.diagnostics.push("Kloosterman side disagrees with δ(L,1) in a weight with no cusp forms".into());
    }
    Ok(report)
}

fn bounds(args: &BoundsArgs) -> Result<Report> {
    if args.k_max == 0 || !(args.x_max > 0.0) {
        return Err(Error::invalid("k-max and x-max must be positive"));
    }
    let ks: Vec<u32> = (1..=args.k_max).collect();
    let steps = (args.x_max * 4.0).ceil() as usize;
    let xs: Vec<f64> = (1..=steps).map(|i| i as f64 * args.x_max / steps as f64).collect();
    let fits = gl2lab::verify_bessel_bounds(&ks, &xs)?;
    let mut report = Report::new("gl2 bessel-bounds", args, json!({"rows": fits}));
    report.passed = fits.iter().all(|f| f.max_ratio.is_finite());
    Ok(report)
}

fn tau(args: &TauArgs) -> Result<Report> {
    let q = gl2lab::delta_q_expansion(args.n)?;
    let violation = q.multiplicativity_violation(args.n.min(100));
    let rows: Vec<Value> = q.coefficients.iter().enumerate().map(|(i, t)| json!({"n": i + 1, "tau": t.to_string()})).collect();
    let mut report = Report::new("gl2 tau", args, json!({"multiplicative": violation.is_none(), "rows": rows}));
    if let Some((m, n)) = violation {
        report.passed = false;
        report.diagnostics.push(format!("τ({}) ≠ τ({m})τ({n})", m * n));
    }
    Ok(report)
}

fn dispatch(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Sugano(SuganoCmd::Expand(a)) => expand(a),
        Command::Classgroup(ClassgroupCmd::Info(a)) => info(a),
        Command::Measure(MeasureCmd::Check(a)) => check(a),
        Command::Lfun(LfunCmd::Average(a)) => average(a),
        Command::Lowlying(LowlyingCmd::Density(a)) => density(a),
        Command::Rmt(RmtCmd::Cn(a)) => cn(a),
        Command::Rmt(RmtCmd::Density(a)) => rmt_density(a),
        Command::Gl2(Gl2Cmd::Petersson(a)) => petersson(a),
        Command::Gl2(Gl2Cmd::BesselBounds(a)) => bounds(a),
        Command::Gl2(Gl2Cmd::Tau(a)) => tau(a),
    }
}

fn csv_cell(v: &Value) -> String {
    let raw = match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    };
    if raw.contains([',', '"', '\n']) {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw
    }
}

/// `result.rows` (or the first array of objects) as a table, or its scalar fields
/// as `key,value` lines.
fn to_csv(result: &Value) -> String {
    let table = match result {
        Value::Array(a) => Some(a),
        Value::Object(map) => map.get("rows").into_iter().chain(map.values()).find_map(|v| match v {
            Value::Array(a) if a.first().is_some_and(Value::is_object) => Some(a),
            _ => None,
        }),
        _ => None,
    };
    let mut out = String::new();
    match table {
        Some(rows) => {
            let header: Vec<String> = rows
                .first()
                .and_then(Value::as_object)
                .map(|o| o.keys().cloned().collect())
                .unwrap_or_default();
            out.push_str(&header.join(","));
            out.push('\n');
            for row in rows {
                let cells: Vec<String> = header.iter().map(|h| csv_cell(row.get(h).unwrap_or(&Value::Null))).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
        }
        None => {
            out.push_str("key,value\n");
            if let Value::Object(map) = result {
                for (k, v) in map {
                    out.push_str(&format!("{},{}\n", csv_cell(&Value::String(k.clone())), csv_cell(v)));
                }
            }
        }
    }
    out
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match dispatch(&cli) {
        Ok(report) => {
            let stdout = match cli.format {
                Format::Json => {
                    let doc = json!({
                        "version": env!("CARGO_PKG_VERSION"),
                        "command": report.command,
                        "params": report.params,
                        "result": report.result,
                        "diagnostics": report.diagnostics,
                    });
                    let mut s = serde_json::to_string_pretty(&doc).expect("JSON values serialize");
                    s.push('\n');
                    s
                }
                Format::Csv => to_csv(&report.result),
            };
            let stderr = report.diagnostics.iter().map(|d| format!("warning: {d}\n")).collect();
            Outcome {
                code: if report.passed { 0 } else { 1 },
                stdout,
                stderr,
            }
        }
        Err(e) => Outcome {
            code: if e.is_input_error() { 2 } else { 1 },
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}
