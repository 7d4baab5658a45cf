//! betarep: eventually periodic expansions in algebraic bases, their
//! spectra and attractor certificates, from the command line.
//!
//! Every subcommand prints one JSON document (spectrum point dumps go to
//! `--emit` as CSV) and output is byte-identical across runs with the same
//! flags and seed. Exit codes: 0 success or positive verdict, 1 negative
//! verdict, 2 inconclusive within the configured budget, 3 usage error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use betarep_core::approx::{suggest_alphabet, validate_cover, AlphabetMode, CoverVerdict};
use betarep_core::attractor::{cross_validate_main2, cylinder_cover, origin_interior_certificate};
use betarep_core::classify::weak_greedy_decision;
use betarep_core::engine::{represent, verify, DomainSpec, Mode, Policy};
use betarep_core::parse::{
    parse_alphabet, parse_element, parse_minpoly, parse_rational, representation_from_json,
};
use betarep_core::places::classify_base;
use betarep_core::spectrum::{enumerate_spectrum, min_gap, separation_bound, DEFAULT_MAX_POINTS};
use betarep_core::{
    CoreError, FieldElement, InteriorOutcome, NumberField, Place, PlaceSystem, PrecCtx,
    SampleSpec, SearchBudget,
};

#[derive(Parser)]
#[command(name = "betarep", version, about = "Expansions in algebraic bases")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify the base and decide the weak-greedy criterion
    Classify(ClassifyArgs),
    /// Compute an eventually periodic representation of x
    Represent(RepresentArgs),
    /// Check a stored representation against a value
    Verify(VerifyArgs),
    /// Suggest a digit alphabet for the base and validate its cover
    Alphabet(AlphabetArgs),
    /// Enumerate a spectrum level, with gap statistics and CSV dumps
    Spectrum(SpectrumArgs),
    /// Cylinder covers and the origin-interior certificate search
    Attractor(AttractorArgs),
    /// Play certificates against the engine on seeded random samples
    Crossval(CrossvalArgs),
}

#[derive(Args)]
struct BaseArgs {
    /// Defining polynomial, written in x ("x^2-x-1") or as JSON coefficients
    #[arg(long, allow_hyphen_values = true)]
    minpoly: String,
    /// Force the distinguished root to this isolation index
    #[arg(long)]
    root_index: Option<usize>,
    /// Starting ball precision in bits
    #[arg(long, default_value_t = 64)]
    prec_start: u32,
    /// Precision-ladder cap in bits
    #[arg(long, default_value_t = 4096)]
    prec_max: u32,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    base: BaseArgs,
    /// Also write the JSON document to this file
    #[arg(long)]
    emit: Option<PathBuf>,
}

#[derive(Args)]
struct RepresentArgs {
    #[command(flatten)]
    base: BaseArgs,
    /// Digit set: inclusive range "lo..hi", inline JSON, or a JSON file
    #[arg(long, allow_hyphen_values = true)]
    alphabet: String,
    /// Value to expand: rational or JSON coefficient array
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    /// Digit selection: "empirical" or "guaranteed"
    #[arg(long, default_value = "empirical")]
    mode: String,
    /// Bound on preperiod + period length
    #[arg(long, default_value_t = 1_000_000)]
    max_iters: u64,
    /// Slack added to the unit-place radius m
    #[arg(long, default_value = "1/16")]
    epsilon: String,
    /// Also write the representation JSON to this file
    #[arg(long)]
    emit: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Stored representation: inline JSON or a file path
    #[arg(long)]
    rep: String,
    /// Expected value: rational or JSON coefficient array
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    #[arg(long, default_value_t = 64)]
    prec_start: u32,
    #[arg(long, default_value_t = 4096)]
    prec_max: u32,
}

#[derive(Args)]
struct AlphabetArgs {
    #[command(flatten)]
    base: BaseArgs,
    /// Construction: "guaranteed", "complex-bound", or an integer m for
    /// the symmetric range {-m..m}
    #[arg(long, default_value = "guaranteed")]
    mode: String,
    /// Cover overlap margin to certify
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<String>,
    /// Write the bare alphabet JSON (reloadable via --alphabet) here
    #[arg(long)]
    emit: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    base: BaseArgs,
    #[arg(long, allow_hyphen_values = true)]
    alphabet: String,
    /// Spectrum level n: sums of n+1 digit coefficients
    #[arg(long)]
    level: u32,
    /// Drop points whose certified norm exceeds this radius
    #[arg(long, allow_hyphen_values = true)]
    prune: Option<String>,
    #[arg(long, default_value_t = DEFAULT_MAX_POINTS)]
    max_points: usize,
    /// Also measure the minimal gap (certified interval)
    #[arg(long)]
    stats: bool,
    /// Write the point dump as CSV: coefficients, then place coordinates
    #[arg(long)]
    emit: Option<PathBuf>,
}

#[derive(Args)]
struct AttractorArgs {
    #[command(flatten)]
    base: BaseArgs,
    #[arg(long, allow_hyphen_values = true)]
    alphabet: String,
    /// Search for a certified ball around the origin inside the attractor
    #[arg(long)]
    check_origin: bool,
    /// Emit the level-n cylinder cover instead
    #[arg(long)]
    cover: Option<u32>,
    /// Deepest unrolling level for the certificate search
    #[arg(long, default_value_t = 12)]
    max_level: u32,
    /// Number of radii tried per level: 1, 1/2, ..., 2^-(steps-1)
    #[arg(long, default_value_t = 9)]
    rho_steps: u32,
    #[arg(long, default_value_t = DEFAULT_MAX_POINTS)]
    max_points: usize,
    #[arg(long)]
    emit: Option<PathBuf>,
}

#[derive(Args)]
struct CrossvalArgs {
    #[command(flatten)]
    base: BaseArgs,
    #[arg(long, allow_hyphen_values = true)]
    alphabet: String,
    /// Random elements drawn from each of Q(beta) and Z[beta]
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
    /// Per-sample orbit budget; exhaustion is reported as a flag
    #[arg(long, default_value_t = 4096)]
    max_iters: u64,
    #[arg(long)]
    emit: Option<PathBuf>,
}

struct CliError {
    code: u8,
    msg: String,
}

impl CliError {
    fn usage(msg: impl Into<String>) -> CliError {
        CliError { code: 3, msg: msg.into() }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> CliError {
        let code = match &e {
            CoreError::IterationCapExceeded { .. }
            | CoreError::PrecisionExhausted { .. }
            | CoreError::MemoryBudgetExceeded(_)
            | CoreError::DenominatorCapExceeded { .. }
            | CoreError::IrreducibilityUndetermined => 2,
            CoreError::NoAdmissibleDigit { .. } => 1,
            _ => 3,
        };
        CliError { code, msg: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let out = match cli.cmd {
        Cmd::Classify(a) => cmd_classify(a),
        Cmd::Represent(a) => cmd_represent(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Alphabet(a) => cmd_alphabet(a),
        Cmd::Spectrum(a) => cmd_spectrum(a),
        Cmd::Attractor(a) => cmd_attractor(a),
        Cmd::Crossval(a) => cmd_crossval(a),
    };
    match out {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("betarep: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}

impl BaseArgs {
    fn prec(&self) -> PrecCtx {
        PrecCtx::new(self.prec_start, self.prec_max)
    }

    fn field(&self) -> Result<NumberField, CliError> {
        Ok(NumberField::new(parse_minpoly(&self.minpoly)?, self.prec())?)
    }

    fn system(&self) -> Result<PlaceSystem, CliError> {
        let field = self.field()?;
        let ps = match self.root_index {
            Some(i) => PlaceSystem::with_distinguished(field, self.prec(), i),
            None => PlaceSystem::new(field, self.prec()),
        }?;
        Ok(ps)
    }
}

/// Resolve an alphabet argument: inclusive integer range, inline JSON, or a
/// path to a JSON file.
fn resolve_alphabet(ps: &PlaceSystem, arg: &str) -> Result<Vec<FieldElement>, CliError> {
    let t = arg.trim();
    let looks_like_range = t
        .split_once("..")
        .is_some_and(|(a, b)| a.trim().parse::<i64>().is_ok() && b.trim().parse::<i64>().is_ok());
    if !looks_like_range && !t.starts_with('[') && !t.starts_with('{') && Path::new(t).exists() {
        let text = fs::read_to_string(t)
            .map_err(|e| CliError::usage(format!("cannot read alphabet file {}: {}", t, e)))?;
        return Ok(parse_alphabet(ps.field(), &text)?);
    }
    Ok(parse_alphabet(ps.field(), t)?)
}

fn print_payload(v: &Value, emit: Option<&PathBuf>) -> Result<(), CliError> {
    let text = format!("{}\n", serde_json::to_string_pretty(v).expect("serializable"));
    print!("{}", text);
    if let Some(path) = emit {
        fs::write(path, &text)
            .map_err(|e| CliError::usage(format!("cannot write {}: {}", path.display(), e)))?;
    }
    Ok(())
}

fn cmd_classify(a: ClassifyArgs) -> Result<u8, CliError> {
    let field = a.base.field()?;
    let label = classify_base(&field, a.base.prec())?;
    let system = match a.base.root_index {
        Some(i) => PlaceSystem::with_distinguished(field, a.base.prec(), i),
        None => PlaceSystem::new(field, a.base.prec()),
    };
    let payload = match system {
        Ok(ps) => match weak_greedy_decision(&ps) {
            Ok(v) => v.dump(),
            Err(CoreError::NotMonic { .. }) => json!({
                "class": label.to_string(),
                "weak_greedy": false,
                "witnesses": [],
                "note": "base is not an algebraic integer",
            }),
            Err(e) => return Err(e.into()),
        },
        Err(CoreError::BaseNotExpanding) => json!({
            "class": label.to_string(),
            "weak_greedy": false,
            "witnesses": [],
            "note": "base is not expanding",
        }),
        Err(e) => return Err(e.into()),
    };
    print_payload(&payload, a.emit.as_ref())?;
    Ok(0)
}

fn parse_mode(s: &str) -> Result<Mode, CliError> {
    match s {
        "empirical" => Ok(Mode::Empirical),
        "guaranteed" => Ok(Mode::Guaranteed),
        other => Err(CliError::usage(format!(
            "mode must be empirical or guaranteed, got {:?}",
            other
        ))),
    }
}

fn cmd_represent(a: RepresentArgs) -> Result<u8, CliError> {
    let ps = a.base.system()?;
    let alphabet = resolve_alphabet(&ps, &a.alphabet)?;
    let x = parse_element(ps.field(), &a.x)?;
    let epsilon = parse_rational(&a.epsilon)?;
    let dom = DomainSpec::for_value(&ps, alphabet, epsilon, &x)?;
    let policy = Policy {
        mode: parse_mode(&a.mode)?,
        max_steps: a.max_iters,
        prec: a.base.prec(),
        denominator_cap: None,
    };
    let rep = represent(&ps, &dom, &x, &policy)?;
    if !verify(&rep, &x)? {
        return Err(CliError { code: 1, msg: "representation failed exact verification".into() });
    }
    let payload = serde_json::to_value(&rep).expect("serializable");
    print_payload(&payload, a.emit.as_ref())?;
    Ok(0)
}

fn cmd_verify(a: VerifyArgs) -> Result<u8, CliError> {
    let text = if a.rep.trim_start().starts_with('{') {
        a.rep.clone()
    } else {
        fs::read_to_string(&a.rep)
            .map_err(|e| CliError::usage(format!("cannot read {}: {}", a.rep, e)))?
    };
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("bad representation JSON: {}", e)))?;
    let prec = PrecCtx::new(a.prec_start, a.prec_max);
    let (field, rep) = representation_from_json(&v, prec)?;
    let x = parse_element(&field, &a.x)?;
    let ok = verify(&rep, &x)?;
    print_payload(&json!({ "verified": ok }), None)?;
    Ok(if ok { 0 } else { 1 })
}

fn cmd_alphabet(a: AlphabetArgs) -> Result<u8, CliError> {
    let ps = a.base.system()?;
    let mode = match a.mode.as_str() {
        "guaranteed" => AlphabetMode::Guaranteed,
        "complex-bound" => AlphabetMode::ComplexPisotBound,
        other => match other.parse::<i64>() {
            Ok(m) => AlphabetMode::IntegerRange(m),
            Err(_) => {
                return Err(CliError::usage(format!(
                    "alphabet mode must be guaranteed, complex-bound or an integer, got {:?}",
                    other
                )))
            }
        },
    };
    let alphabet = suggest_alphabet(&ps, mode, a.base.prec())?;
    let (cover, code) = if matches!(mode, AlphabetMode::IntegerRange(_)) {
        (Value::Null, 0u8)
    } else {
        let delta = match &a.delta {
            Some(d) => parse_rational(d)?,
            None => betarep_core::approx::default_margin(),
        };
        let cert = validate_cover(&ps, &alphabet, &delta, a.base.prec())?;
        let code = match cert.verdict {
            CoverVerdict::Certified => 0,
            CoverVerdict::Indeterminate => 2,
            CoverVerdict::Refuted => 1,
        };
        (serde_json::to_value(&cert).expect("serializable"), code)
    };
    let alpha_json = serde_json::to_value(&alphabet).expect("serializable");
    if let Some(path) = &a.emit {
        let text = format!("{}\n", serde_json::to_string_pretty(&alpha_json).expect("json"));
        fs::write(path, text)
            .map_err(|e| CliError::usage(format!("cannot write {}: {}", path.display(), e)))?;
    }
    let payload = json!({ "alphabet": alpha_json, "cover": cover });
    print_payload(&payload, None)?;
    Ok(code)
}

fn cmd_spectrum(a: SpectrumArgs) -> Result<u8, CliError> {
    let ps = a.base.system()?;
    let alphabet = resolve_alphabet(&ps, &a.alphabet)?;
    let prune = match &a.prune {
        Some(p) => Some(parse_rational(p)?),
        None => None,
    };
    let level = enumerate_spectrum(&ps, &alphabet, a.level, prune.as_ref(), a.max_points)?;
    if let Some(path) = &a.emit {
        let csv = spectrum_csv(&ps, &level)?;
        fs::write(path, csv)
            .map_err(|e| CliError::usage(format!("cannot write {}: {}", path.display(), e)))?;
    }
    let bound = separation_bound(&ps, &alphabet)?;
    let mut payload = json!({
        "level": level.n,
        "points": level.len(),
        "pruned": level.pruned,
        "separation_bound": bound.to_string(),
    });
    if a.stats {
        let (lb, ub) = min_gap(&ps, &level, a.base.prec())?;
        payload["min_gap"] = json!({ "lb": lb.to_string(), "ub": ub.to_string() });
    }
    if let Some(path) = &a.emit {
        payload["csv"] = json!(path.display().to_string());
    }
    print_payload(&payload, None)?;
    Ok(0)
}

/// One row per point: exact coefficients, then floating coordinates at the
/// non-contracting archimedean places.
fn spectrum_csv(
    ps: &PlaceSystem,
    level: &betarep_core::SpectrumLevel,
) -> Result<String, CliError> {
    let degree = ps.field().degree();
    let mut header: Vec<String> = (0..degree).map(|i| format!("c{}", i)).collect();
    for (j, (place, _)) in ps.sbeta_arch().iter().enumerate() {
        match place {
            Place::ComplexPair(_) => {
                header.push(format!("v{}_re", j));
                header.push(format!("v{}_im", j));
            }
            _ => header.push(format!("v{}", j)),
        }
    }
    let coords = level.arch_coords_f64(ps)?;
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for (i, cs) in coords.iter().enumerate() {
        let mut row = level.element(i).coeff_strings();
        for c in cs {
            row.push(format!("{}", c));
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}

fn place_json(place: &Place) -> Value {
    match place {
        Place::Real(i) => json!({ "kind": "real", "root": i }),
        Place::ComplexPair(i) => json!({ "kind": "complex", "root": i }),
        Place::Finite { prime, exp } => {
            json!({ "kind": "finite", "prime": prime.to_string(), "exp": exp })
        }
    }
}

fn cmd_attractor(a: AttractorArgs) -> Result<u8, CliError> {
    let ps = a.base.system()?;
    let alphabet = resolve_alphabet(&ps, &a.alphabet)?;
    if a.check_origin == a.cover.is_some() {
        return Err(CliError::usage("pass exactly one of --check-origin or --cover N"));
    }
    if let Some(n) = a.cover {
        let cover = cylinder_cover(&ps, &alphabet, n)?;
        let points: Vec<Vec<String>> = cover.points.iter().map(|p| p.coeff_strings()).collect();
        let radii: Vec<Value> = cover
            .radii
            .iter()
            .map(|(p, r)| json!({ "place": place_json(p), "radius": r.to_string() }))
            .collect();
        let payload = json!({ "n": cover.n, "points": points, "radii": radii });
        print_payload(&payload, a.emit.as_ref())?;
        return Ok(0);
    }
    let budget = SearchBudget {
        max_level: a.max_level,
        rho_steps: a.rho_steps,
        max_points: a.max_points,
    };
    match origin_interior_certificate(&ps, &alphabet, &budget, a.base.prec())? {
        InteriorOutcome::Certified(cert) => {
            let payload = json!({
                "certified": true,
                "certificate": serde_json::to_value(&cert).expect("serializable"),
            });
            print_payload(&payload, a.emit.as_ref())?;
            Ok(0)
        }
        InteriorOutcome::NotFound { best, one_sided } => {
            let best_json = match best {
                Some((n, rho, achieved)) => json!({
                    "level": n,
                    "rho": rho.to_string(),
                    "achieved": achieved.to_string(),
                }),
                None => Value::Null,
            };
            let payload = json!({
                "certified": false,
                "one_sided": one_sided,
                "best": best_json,
            });
            print_payload(&payload, a.emit.as_ref())?;
            Ok(if one_sided { 1 } else { 2 })
        }
    }
}

fn cmd_crossval(a: CrossvalArgs) -> Result<u8, CliError> {
    let ps = a.base.system()?;
    let alphabet = resolve_alphabet(&ps, &a.alphabet)?;
    let samples = SampleSpec { count: a.samples, seed: a.seed };
    let policy = Policy {
        mode: Mode::Empirical,
        max_steps: a.max_iters,
        prec: a.base.prec(),
        denominator_cap: None,
    };
    let report = cross_validate_main2(&ps, &alphabet, &samples, &policy)?;
    let clean = report.contradictions.is_empty();
    let payload = serde_json::to_value(&report).expect("serializable");
    print_payload(&payload, a.emit.as_ref())?;
    Ok(if clean { 0 } else { 1 })
}
