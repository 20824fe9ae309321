//! Command-line front end.
//!
//! Exit codes: 0 success or PASS, 1 computation error, 2 FAIL, 3 usage or
//! input error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::algebra::{PolyParser, Vars};
use crate::corpus::{self, parse_branches, CorpusEntry, Source};
use crate::desing::{desing_iterate, predict_branch, transform_branch_oracle, PredictorRules};
use crate::error::Error;
use crate::geometry::branch::{normalize_at_working_precision, Branch};
use crate::geometry::curve::{CurveModel, CurveSpec};
use crate::geometry::halphen::halphen_rational;
use crate::geometry::quadric::Quadric;
use crate::invariants::{image_degree, stationary_indices, StationaryIndices};
use crate::verify::{base_invariants, check_birational, check_theorem, sample_quadric, Record, SampleConfig, Status, PRNG};

const EXAMPLES: &str = "\
Examples:
  halphen parse-check 'x^2*z + t*z^2 + y^3'
  halphen invariants --curve viviani.json
  halphen transform --curve twisted_cubic.json --seed 7
  halphen desing --branches ladder.json --steps 8 --both
  halphen verify --curve sextic.json --trials 5
  halphen corpus check

Polynomials: sums of products of numbers, variables, sqrt(...), ^ and
parentheses, e.g. -sqrt(2)/2*u^3*v^3 + 1/2*v^6. Curves use x, y, z, t;
parametrizations use u, v.";

#[derive(Parser, Debug)]
#[command(name = "halphen", version, about = "Halphen transforms of space curves", after_help = EXAMPLES)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Rules {
    Stated,
    Amended,
}

impl From<Rules> for PredictorRules {
    fn from(r: Rules) -> Self {
        match r {
            Rules::Stated => PredictorRules::Stated,
            Rules::Amended => PredictorRules::Amended,
        }
    }
}

#[derive(Args, Debug, Clone)]
struct Sampling {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    trials: usize,
    /// Bound on sampled integer coefficients.
    #[arg(long, default_value_t = 10_000)]
    bound: i64,
}

impl Sampling {
    fn config(&self) -> SampleConfig {
        SampleConfig { seed: self.seed, trials: self.trials, bound: self.bound, ..SampleConfig::default() }
    }
}

#[derive(Args, Debug, Clone)]
struct Output {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a polynomial and check that it is homogeneous.
    ParseCheck {
        expr: Option<String>,
        /// Check the polynomials of a curve file instead.
        #[arg(long)]
        curve: Option<PathBuf>,
        /// Variable names, comma separated.
        #[arg(long, default_value = "x,y,z,t")]
        vars: String,
        #[command(flatten)]
        out: Output,
    },
    /// The Halphen transform of a curve for one quadric.
    Transform {
        #[arg(long)]
        curve: PathBuf,
        /// Quadric matrix file; sampled from the seed when absent.
        #[arg(long)]
        quadric: Option<PathBuf>,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        out: Output,
    },
    /// Degree, rank, genus, stationary indices and class of a curve.
    Invariants {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long)]
        branches: Option<PathBuf>,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        out: Output,
    },
    /// Normalized type of each branch.
    BranchType {
        #[arg(long)]
        branches: PathBuf,
        /// Truncate the branches to this many coefficients first.
        #[arg(long)]
        precision: Option<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// Predicted type of the transform of each branch.
    Predict {
        #[arg(long)]
        branches: PathBuf,
        #[arg(long)]
        precision: Option<usize>,
        #[arg(long, value_enum, default_value = "amended")]
        rules: Rules,
        /// Also transform each branch with this quadric.
        #[arg(long)]
        quadric: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// Iterate the Halphen map on each branch.
    Desing {
        #[arg(long)]
        branches: PathBuf,
        #[arg(long, default_value_t = 12)]
        steps: usize,
        #[arg(long)]
        precision: Option<usize>,
        #[arg(long, value_enum, default_value = "amended")]
        rules: Rules,
        /// Report only oracle types.
        #[arg(long, conflicts_with_all = ["predict", "both"])]
        oracle: bool,
        /// Report only predicted types.
        #[arg(long, conflicts_with = "both")]
        predict: bool,
        /// Report both (the default).
        #[arg(long)]
        both: bool,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        out: Output,
    },
    /// Check the transform formulas and birationality; one JSON line per record.
    Verify {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long)]
        branches: Option<PathBuf>,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        out: Output,
    },
    /// The built-in corpus.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Subcommand, Debug)]
enum CorpusAction {
    /// Names and descriptions.
    List,
    /// Print an entry as JSON.
    Show { name: String },
    /// Recompute the expected values of one entry, or of all.
    Check {
        name: Option<String>,
        #[command(flatten)]
        sampling: Sampling,
    },
}

/// Failure of a command, mapped to an exit code.
enum Failure {
    Usage(String),
    Compute(Error),
    /// Checks ran and at least one failed; the report was already printed.
    Fail,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Syntax { .. } | Error::NotHomogeneous { .. } | Error::UnknownVariable { .. } | Error::Invalid(_) => {
                Failure::Usage(e.to_string())
            }
            e => Failure::Compute(e),
        }
    }
}

type CliResult = std::result::Result<(), Failure>;

/// Run with `argv` (program name first), writing to the given streams.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(Failure::Fail) => 2,
        Err(Failure::Compute(e)) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}\n\n{EXAMPLES}");
            3
        }
    }
}

pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(argv, &mut stdout.lock(), &mut stderr.lock())
}

fn read_json(path: &Path) -> std::result::Result<Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_curve(path: &Path) -> std::result::Result<(CurveSpec, Value), Failure> {
    let v = read_json(path)?;
    Ok((CurveSpec::from_json(&v)?, v))
}

fn load_branches(path: &Path, precision: Option<usize>) -> std::result::Result<Vec<Branch>, Failure> {
    let bs = parse_branches(&read_json(path)?)?;
    match precision {
        None => Ok(bs),
        Some(n) => bs
            .iter()
            .map(|b| Ok(Branch::from_series(b.with_precision(n)?.coords().to_vec())?))
            .collect::<crate::Result<Vec<_>>>()
            .map_err(Failure::from),
    }
}

/// Branches from `--branches`, else those embedded in the curve file.
fn curve_branches(curve: &Value, branches: &Option<PathBuf>) -> std::result::Result<Vec<Branch>, Failure> {
    match branches {
        Some(p) => load_branches(p, None),
        None => Ok(parse_branches(curve.get("branches").unwrap_or(&Value::Null))?),
    }
}

fn emit(out: &mut dyn Write, fmt: Format, v: &Value, text: impl FnOnce() -> String) {
    let _ = match fmt {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(v).unwrap()),
        Format::Text => writeln!(out, "{}", text()),
    };
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> CliResult {
    match cmd {
        Command::ParseCheck { expr, curve, vars, out: o } => parse_check(expr, curve, &vars, o.format, out),
        Command::Transform { curve, quadric, sampling, out: o } => transform(&curve, quadric, &sampling.config(), o.format, out),
        Command::Invariants { curve, branches, sampling, out: o } => invariants(&curve, &branches, &sampling.config(), o.format, out),
        Command::BranchType { branches, precision, out: o } => branch_type(&branches, precision, o.format, out),
        Command::Predict { branches, precision, rules, quadric, out: o } => predict(&branches, precision, rules.into(), quadric, o.format, out),
        Command::Desing { branches, steps, precision, rules, oracle, predict, both: _, sampling, out: o } => {
            let show = (!predict, !oracle);
            desing(&branches, steps, precision, rules.into(), show, &sampling.config(), o.format, out)
        }
        Command::Verify { curve, branches, sampling, out: o } => verify(&curve, &branches, &sampling.config(), o.format, out),
        Command::Corpus { action } => corpus_cmd(action, out),
    }
}

fn parse_check(expr: Option<String>, curve: Option<PathBuf>, vars: &str, fmt: Format, out: &mut dyn Write) -> CliResult {
    let report = match (expr, curve) {
        (Some(e), None) => {
            let names: Vec<&str> = vars.split(',').map(str::trim).collect();
            let p = PolyParser::new().parse_poly(&e, &Vars::new(&names))?;
            json!({"polynomial": p.to_string(), "degree": p.degree(), "terms": p.term_count()})
        }
        (None, Some(c)) => {
            let (spec, _) = load_curve(&c)?;
            json!({"curve": spec.to_json(), "degree": spec.degree()})
        }
        _ => return Err(Failure::Usage("give either an expression or --curve".into())),
    };
    emit(out, fmt, &report, || match report.get("polynomial") {
        Some(p) => format!("ok: {} (degree {})", p.as_str().unwrap(), report["degree"]),
        None => format!("ok: curve of degree {}", report["degree"]),
    });
    Ok(())
}

fn quadric_or_sample(path: Option<PathBuf>, cfg: &SampleConfig, draw: u64) -> std::result::Result<(Quadric, Value), Failure> {
    match path {
        Some(p) => {
            let q = Quadric::from_json(&read_json(&p)?)?;
            Ok((q, json!({"file": p.display().to_string()})))
        }
        None => Ok((sample_quadric(cfg, draw)?, json!({"prng": PRNG, "seed": cfg.seed, "draw": draw}))),
    }
}

fn transform(curve: &Path, quadric: Option<PathBuf>, cfg: &SampleConfig, fmt: Format, out: &mut dyn Write) -> CliResult {
    let (spec, _) = load_curve(curve)?;
    let (q, source) = quadric_or_sample(quadric, cfg, 0)?;
    let report = if let Some(rc) = spec.rational() {
        let im = halphen_rational(rc, &q)?;
        let deg = image_degree(im.reduced.components(), cfg)?;
        json!({
            "quadric": q.to_json(),
            "quadric_source": source,
            "raw_degree": im.raw[0].degree().or(im.raw.iter().find_map(|p| p.degree())),
            "gcd": im.gcd.to_string(),
            "reduced": im.reduced.components().iter().map(ToString::to_string).collect::<Vec<_>>(),
            "reduced_degree": im.reduced.degree(),
            "image": deg,
        })
    } else {
        let CurveModel::CompleteIntersection(ci) = &spec.model else { unreachable!() };
        let phi = ci.halphen_polys(&q);
        json!({
            "quadric": q.to_json(),
            "quadric_source": source,
            "phi": phi.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "phi_degree": phi.iter().find_map(|p| p.degree()),
        })
    };
    emit(out, fmt, &report, || match report.get("reduced") {
        Some(r) => format!(
            "reduced psi of degree {} (gcd {}), image degree {}, map degree {}\n{}",
            report["reduced_degree"],
            report["gcd"].as_str().unwrap(),
            report["image"]["image_degree"],
            report["image"]["map_degree"],
            r.as_array().unwrap().iter().map(|p| format!("  {}", p.as_str().unwrap())).collect::<Vec<_>>().join("\n")
        ),
        None => format!(
            "Phi = wedge3(grad F, grad G, grad Q), degree {}\n{}",
            report["phi_degree"],
            report["phi"].as_array().unwrap().iter().map(|p| format!("  {}", p.as_str().unwrap())).collect::<Vec<_>>().join("\n")
        ),
    });
    Ok(())
}

fn invariants(curve: &Path, branches: &Option<PathBuf>, cfg: &SampleConfig, fmt: Format, out: &mut dyn Write) -> CliResult {
    let (spec, raw) = load_curve(curve)?;
    let bs = curve_branches(&raw, branches)?;
    let (base, records) = base_invariants(spec.name.as_deref().unwrap_or("curve"), &spec, &bs, cfg)?;
    let report = json!({
        "degree": base.degree,
        "rank": base.rank,
        "genus": base.genus,
        "genus_source": base.genus_source,
        "branch_types": base.branch_types,
        "k0": base.k0,
        "k1": base.k1,
        "class": base.class,
        "transform_degree": base.degree + base.rank,
        "checks": records,
    });
    emit(out, fmt, &report, || {
        format!(
            "degree {}\nrank {}\ngenus {} ({:?})\nk0 {} k1 {}\nclass {}\ndegree of the transform {}",
            base.degree,
            base.rank,
            base.genus,
            base.genus_source,
            base.k0,
            base.k1,
            base.class.map_or("unknown".into(), |c| c.to_string()),
            base.degree + base.rank
        )
    });
    if records.iter().any(|r| r.status == Status::Fail) {
        return Err(Failure::Fail);
    }
    Ok(())
}

fn branch_type(path: &Path, precision: Option<usize>, fmt: Format, out: &mut dyn Write) -> CliResult {
    let bs = load_branches(path, precision)?;
    let mut rows = Vec::new();
    for b in &bs {
        let nm = normalize_at_working_precision(b)?;
        let (k0, k1) = stationary_indices(&nm.ty);
        rows.push(json!({"type": nm.ty, "k0": k0, "k1": k1, "exact": b.is_exact(), "precision": b.precision()}));
    }
    let types: Vec<_> = rows.iter().map(|r| r["type"].clone()).collect();
    emit(out, fmt, &json!(rows), || types.iter().map(|t| t.to_string()).collect::<Vec<_>>().join("\n"));
    Ok(())
}

fn predict(path: &Path, precision: Option<usize>, rules: PredictorRules, quadric: Option<PathBuf>, fmt: Format, out: &mut dyn Write) -> CliResult {
    let bs = load_branches(path, precision)?;
    let q = quadric.map(|p| read_json(&p).and_then(|v| Ok(Quadric::from_json(&v)?))).transpose()?;
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    for b in &bs {
        let before = normalize_at_working_precision(b)?.ty;
        let (ty, case) = predict_branch(b, rules)?;
        let mut row = json!({"type": before, "predicted": ty, "case": case});
        let mut line = format!("{before} -> {ty} [{}]", case.case);
        if let Some(q) = &q {
            let nm = transform_branch_oracle(b, q)?;
            row["oracle"] = json!(nm.ty);
            line += &format!(" oracle {}", nm.ty);
        }
        rows.push(row);
        lines.push(line);
    }
    emit(out, fmt, &json!(rows), || lines.join("\n"));
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn desing(
    path: &Path,
    steps: usize,
    precision: Option<usize>,
    rules: PredictorRules,
    (show_oracle, show_predict): (bool, bool),
    cfg: &SampleConfig,
    fmt: Format,
    out: &mut dyn Write,
) -> CliResult {
    let bs = load_branches(path, precision)?;
    let mut traces = Vec::new();
    let mut lines = Vec::new();
    for b in &bs {
        let tr = desing_iterate(b, steps, cfg, rules)?;
        let steps_json: Vec<Value> = tr
            .steps
            .iter()
            .map(|s| {
                let mut v = json!({"before": s.before, "monotonicity": s.monotonicity});
                if show_oracle {
                    v["oracle"] = json!(s.oracle);
                    v["draws"] = json!(s.draws);
                }
                if show_predict {
                    v["predicted"] = match &s.predicted {
                        Ok((t, c)) => json!({"type": t, "case": c}),
                        Err(e) => json!({"error": e}),
                    };
                }
                v
            })
            .collect();
        let mut line = tr.initial.to_string();
        for s in &tr.steps {
            let p = match &s.predicted {
                Ok((t, c)) => format!("{t} [{}]", c.case),
                Err(e) => format!("error: {e}"),
            };
            line += &match (show_oracle, show_predict) {
                (true, true) => format!(" -> {} (predicted {p})", s.oracle),
                (true, false) => format!(" -> {}", s.oracle),
                _ => format!(" -> {p}"),
            };
        }
        lines.push(line);
        traces.push(json!({
            "initial": tr.initial,
            "steps": steps_json,
            "reached_ordinary": tr.reached_ordinary,
            "fixed_point": tr.fixed_point,
            "prng": PRNG,
            "seed": cfg.seed,
        }));
    }
    emit(out, fmt, &json!(traces), || lines.join("\n"));
    Ok(())
}

fn print_records(records: &[Record], fmt: Format, out: &mut dyn Write) {
    for r in records {
        let _ = match fmt {
            Format::Json => writeln!(out, "{}", serde_json::to_string(r).unwrap()),
            Format::Text => writeln!(
                out,
                "{:?} {} {}{} ({})",
                r.status,
                r.curve,
                r.check,
                r.trial.map_or(String::new(), |t| format!(" trial {t}")),
                r.route
            ),
        };
    }
}

fn verify(curve: &Path, branches: &Option<PathBuf>, cfg: &SampleConfig, fmt: Format, out: &mut dyn Write) -> CliResult {
    cfg.validate()?;
    let (spec, raw) = load_curve(curve)?;
    let bs = curve_branches(&raw, branches)?;
    let name = spec.name.clone().unwrap_or_else(|| curve.display().to_string());
    let mut reports = vec![check_theorem(&name, &spec, &bs, cfg)?];
    if let Some(rc) = spec.rational() {
        reports.push(check_birational(&name, rc, cfg)?);
    }
    for r in &reports {
        print_records(&r.records, fmt, out);
    }
    if reports.iter().all(|r| r.passed()) {
        Ok(())
    } else {
        Err(Failure::Fail)
    }
}

fn corpus_cmd(action: CorpusAction, out: &mut dyn Write) -> CliResult {
    match action {
        CorpusAction::List => {
            for e in corpus::all()? {
                let _ = writeln!(out, "{:<16} {}", e.name, e.description);
            }
            Ok(())
        }
        CorpusAction::Show { name } => {
            let e = corpus::entry(&name)?;
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&e.raw).unwrap());
            Ok(())
        }
        CorpusAction::Check { name, sampling } => {
            let entries = match name {
                Some(n) => vec![corpus::entry(&n)?],
                None => corpus::all()?,
            };
            let cfg = sampling.config();
            cfg.validate()?;
            let mut ok = true;
            for e in &entries {
                for (key, want, got) in check_entry(e, &cfg)? {
                    let source = match e.expected[&key].source {
                        Source::Published => "published",
                        Source::Derived => "derived",
                    };
                    let status = if want == got { "PASS" } else { "FAIL" };
                    ok &= want == got;
                    let _ = writeln!(out, "{status} {} {key}: expected {want} ({source}), got {got}", e.name);
                }
            }
            if ok {
                Ok(())
            } else {
                Err(Failure::Fail)
            }
        }
    }
}

/// `(key, expected, computed)` for every expected value an entry carries.
pub fn check_entry(e: &CorpusEntry, cfg: &SampleConfig) -> crate::Result<Vec<(String, Value, Value)>> {
    let mut got: Vec<(&str, Value)> = Vec::new();
    let branches = e.branches()?;
    if e.has_curve() {
        let spec = e.curve()?;
        let (base, _) = base_invariants(&e.name, &spec, &branches, cfg)?;
        let q = sample_quadric(cfg, 0)?;
        let images: Vec<_> = branches.iter().map(|b| Ok(transform_branch_oracle(b, &q)?.ty)).collect::<crate::Result<_>>()?;
        let st = StationaryIndices::of(&images);
        let inv = crate::invariants::theorem_invariants(base.degree, base.rank, base.genus, base.genus_source, st.k0, Some(st.k1));
        got.extend([
            ("rank", json!(base.rank)),
            ("genus", json!(base.genus)),
            ("k0", json!(base.k0)),
            ("k1", json!(base.k1)),
            ("class", json!(base.class)),
            ("branch_types", json!(base.branch_types)),
            ("image_types", json!(images)),
            ("transform_degree", json!(inv.degree)),
            ("transform_rank", json!(inv.rank)),
            ("transform_class", json!(inv.class)),
            ("transform_k0", json!(st.k0)),
            ("transform_k1", json!(st.k1)),
        ]);
        if let Some(ci) = spec.complete_intersection() {
            let (corr, _) = crate::invariants::polar_correction(ci, &branches, cfg)?;
            got.push(("node_intersection", json!(corr)));
            got.push(("singular_intersection", json!(corr)));
        }
        if let Some(rc) = spec.rational() {
            let im = halphen_rational(rc, &q)?;
            got.push(("map_degree", json!(image_degree(im.reduced.components(), cfg)?.map_degree)));
        }
    } else {
        for b in &branches {
            let tr = desing_iterate(b, 32, cfg, PredictorRules::default())?;
            got.push(("chain", json!(tr.types())));
        }
    }
    Ok(e
        .expected
        .iter()
        .map(|(k, want)| {
            let value = got.iter().find(|g| g.0 == k).map_or(Value::Null, |g| g.1.clone());
            (k.clone(), want.value.clone(), value)
        })
        .collect())
}

