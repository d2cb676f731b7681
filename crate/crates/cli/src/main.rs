//! Command-line front end: parse state files, dispatch analyses, emit
//! human-readable and machine-readable reports.

#![forbid(unsafe_code)]

mod format;
mod json;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use qmargin_core::classical::{
    classical_maxent_ipf, delta_family, delta_range, marginalize, IpfConfig,
};
use qmargin_core::matrix::Complex64;
use qmargin_core::maxent::{
    irreducible_correlation, marginal_feasibility, maxent_from_marginals, maxent_primal,
    MaxEntResult, SolverConfig,
};
use qmargin_core::state::{von_neumann_entropy, DensityMatrix, PureState};
use qmargin_core::uniqueness::{
    classify, ghz_counterexample, uniqueness_search, ClassificationVerdict, Grouping,
    SearchConfig, SearchReport, VerdictKind, DEFAULT_CLASSIFIER_TOL,
};
use qmargin_core::Error as CoreError;

use format::{classical_to_json, density_to_json, parse_state_file, StateFile};
use json::{complex, format_f64, Json};

const EXIT_INTERNAL: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_DOMAIN: u8 = 4;

const USAGE: &str = "\
qmargin - analysis of multi-party quantum states from their reduced density matrices

USAGE:
    qmargin <COMMAND> [ARGS] [OPTIONS]

COMMANDS:
    analyze <FILE>         Classify a pure state (3 qubits), measure its
                           irreducible correlation, optionally search for a
                           distinct state with the same pair marginals.
                           Accepts pure states of 3 or 4 qubits and 3-qubit
                           density matrices.
    maxent <FILE>          Check feasibility of a marginal set, then
                           reconstruct the maximum-entropy state matching it.
    classical <FILE> MODE  Three-bit distribution tools. MODE is one of:
                             --delta X   apply the parity family shift
                             --range     print the admissible delta interval
                             --ipf       refit from the pair marginals
    counterexample         Emit the pure/mixed pair a|000>+b|111> vs the
                           diagonal mixture; both share every pair marginal.

OPTIONS:
    --search               analyze: also run the uniqueness search
    --restarts N           solver restarts (default: solver-specific)
    --tol X                solver residual tolerance
    --seed N               random seed (default 42)
    --format text|json     report format (default text)
    --out PATH             output state file (maxent) or file prefix
                           (counterexample)
    --a RE[,IM] --b RE[,IM]  coefficients for counterexample
    -h, --help             this message

EXIT CODES:
    0 success (including reports with warnings)
    2 unreadable or malformed input, usage errors
    3 infeasible marginal set
    4 domain violation (delta out of range, degenerate coefficients)

FILE FORMAT (JSON, complex numbers as [re, im]):
    {\"kind\": \"pure\",      \"dims\": [2,2,2], \"amplitudes\": [[re,im], ...]}
    {\"kind\": \"density\",   \"dims\": [2,2,2], \"matrix\": [[[re,im], ...], ...]}
    {\"kind\": \"marginals\", \"dims\": [2,2,2],
     \"marginals\": [{\"subsystems\": [0,1], \"matrix\": ...}, ...]}
    {\"kind\": \"classical\", \"variables\": 3, \"probabilities\": [p, ...]}
";

#[derive(Clone, Copy, PartialEq)]
enum Format {
    Text,
    JsonLike,
}

struct Flags {
    file: Option<PathBuf>,
    search: bool,
    restarts: Option<usize>,
    tol: Option<f64>,
    seed: u64,
    format: Format,
    out: Option<PathBuf>,
    delta: Option<f64>,
    range: bool,
    ipf: bool,
    a: Option<Complex64>,
    b: Option<Complex64>,
}

enum CliError {
    Usage(String),
    Parse(String),
    Infeasible(String),
    Domain(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) => EXIT_PARSE,
            CliError::Infeasible(_) => EXIT_INFEASIBLE,
            CliError::Domain(_) => EXIT_DOMAIN,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m)
            | CliError::Parse(m)
            | CliError::Infeasible(m)
            | CliError::Domain(m)
            | CliError::Internal(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() || args[0] == "-h" || args[0] == "--help" || args[0] == "help" {
        print!("{USAGE}");
        return ExitCode::SUCCESS;
    }
    let command = args[0].clone();
    let flags = match parse_flags(&args[1..]) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {}", e.message());
            return ExitCode::from(e.code());
        }
    };

    let result = match command.as_str() {
        "analyze" => cmd_analyze(&flags),
        "maxent" => cmd_maxent(&flags),
        "classical" => cmd_classical(&flags),
        "counterexample" => cmd_counterexample(&flags),
        other => Err(CliError::Usage(format!(
            "unknown command {other:?}; see --help"
        ))),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn parse_flags(args: &[String]) -> Result<Flags, CliError> {
    let mut flags = Flags {
        file: None,
        search: false,
        restarts: None,
        tol: None,
        seed: 42,
        format: Format::Text,
        out: None,
        delta: None,
        range: false,
        ipf: false,
        a: None,
        b: None,
    };
    let mut iter = args.iter().peekable();
    while let Some(arg) = iter.next() {
        let mut value_for = |name: &str| -> Result<String, CliError> {
            iter.next()
                .cloned()
                .ok_or_else(|| CliError::Usage(format!("{name} requires a value")))
        };
        match arg.as_str() {
            "--search" => flags.search = true,
            "--range" => flags.range = true,
            "--ipf" => flags.ipf = true,
            "--restarts" => {
                flags.restarts = Some(
                    value_for("--restarts")?
                        .parse()
                        .map_err(|_| CliError::Usage("--restarts expects an integer".into()))?,
                )
            }
            "--tol" => {
                flags.tol = Some(
                    value_for("--tol")?
                        .parse()
                        .map_err(|_| CliError::Usage("--tol expects a number".into()))?,
                )
            }
            "--seed" => {
                flags.seed = value_for("--seed")?
                    .parse()
                    .map_err(|_| CliError::Usage("--seed expects an integer".into()))?
            }
            "--delta" => {
                flags.delta = Some(
                    value_for("--delta")?
                        .parse()
                        .map_err(|_| CliError::Usage("--delta expects a number".into()))?,
                )
            }
            "--format" => {
                flags.format = match value_for("--format")?.as_str() {
                    "text" => Format::Text,
                    "json" | "json-like" => Format::JsonLike,
                    other => {
                        return Err(CliError::Usage(format!(
                            "--format expects text or json, got {other:?}"
                        )))
                    }
                }
            }
            "--out" => flags.out = Some(PathBuf::from(value_for("--out")?)),
            "--a" => flags.a = Some(parse_complex_arg(&value_for("--a")?)?),
            "--b" => flags.b = Some(parse_complex_arg(&value_for("--b")?)?),
            other if other.starts_with("--") => {
                return Err(CliError::Usage(format!("unknown flag {other:?}")))
            }
            path => {
                if flags.file.is_some() {
                    return Err(CliError::Usage(format!(
                        "unexpected extra argument {path:?}"
                    )));
                }
                flags.file = Some(PathBuf::from(path));
            }
        }
    }
    Ok(flags)
}

fn parse_complex_arg(text: &str) -> Result<Complex64, CliError> {
    let bad = || CliError::Usage(format!("cannot parse complex number {text:?}; use RE or RE,IM"));
    match text.split_once(',') {
        Some((re, im)) => Ok(Complex64::new(
            re.trim().parse().map_err(|_| bad())?,
            im.trim().parse().map_err(|_| bad())?,
        )),
        None => Ok(Complex64::new(text.trim().parse().map_err(|_| bad())?, 0.0)),
    }
}

fn load_file(flags: &Flags) -> Result<StateFile, CliError> {
    let path = flags
        .file
        .as_ref()
        .ok_or_else(|| CliError::Usage("missing input file argument".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_state_file(&text).map_err(|e| {
        // Overlap inconsistency is an infeasible input, not a syntax problem.
        if e.0.contains("disagree on their overlap") {
            CliError::Infeasible(format!("{}: {e}", path.display()))
        } else {
            CliError::Parse(format!("{}: {e}", path.display()))
        }
    })
}

fn solver_config(flags: &Flags) -> SolverConfig {
    let mut cfg = SolverConfig::default();
    if let Some(r) = flags.restarts {
        cfg.restarts = r;
    }
    if let Some(t) = flags.tol {
        cfg.dual_tolerance = t;
    }
    cfg.seed = flags.seed;
    cfg
}

fn internal(e: CoreError) -> CliError {
    CliError::Internal(e.to_string())
}

fn emit(flags: &Flags, report: Json, text: String) {
    match flags.format {
        Format::Text => print!("{text}"),
        Format::JsonLike => print!("{}", report.render()),
    }
}

fn write_state_file(path: &Path, doc: &Json) -> Result<(), CliError> {
    std::fs::write(path, doc.render())
        .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// analyze

fn grouping_name(g: Grouping) -> &'static str {
    match g {
        Grouping::PairAB => "AB",
        Grouping::PairAC => "AC",
        Grouping::PairBC => "BC",
    }
}

fn verdict_name(kind: VerdictKind) -> &'static str {
    match kind {
        VerdictKind::UniqueGeneric => "unique-generic",
        VerdictKind::ProductSplit => "product-split",
        VerdictKind::SchmidtGhzClass => "schmidt-ghz-class",
    }
}

fn classification_json(verdict: &ClassificationVerdict) -> Json {
    Json::object(vec![
        ("verdict", Json::Str(verdict_name(verdict.kind).into())),
        (
            "product_cut",
            verdict
                .product_cut
                .map_or(Json::Null, |q| Json::Int(q as i64)),
        ),
        ("degenerate", Json::Bool(verdict.degenerate)),
        (
            "groupings",
            Json::Array(
                verdict
                    .invariants
                    .iter()
                    .zip(verdict.d_conditions.iter())
                    .map(|(inv, cond)| {
                        Json::object(vec![
                            ("pair", Json::Str(grouping_name(inv.grouping).into())),
                            ("alpha", complex(inv.alpha.re, inv.alpha.im)),
                            ("beta", complex(inv.beta.re, inv.beta.im)),
                            ("gamma", complex(inv.gamma.re, inv.gamma.im)),
                            ("modulus_match", Json::Bool(cond.modulus_match)),
                            ("phase_real_nonneg", Json::Bool(cond.phase_real_nonneg)),
                        ])
                    })
                    .collect(),
            ),
        ),
    ])
}

fn search_json(report: &SearchReport) -> Json {
    Json::object(vec![
        ("alternative_found", Json::Bool(report.alternative_found)),
        (
            "trace_distance_to_input",
            Json::Float(report.trace_distance_to_input),
        ),
        ("marginal_residual", Json::Float(report.marginal_residual)),
        ("restarts", Json::Int(report.restarts as i64)),
    ])
}

fn cmd_analyze(flags: &Flags) -> Result<(), CliError> {
    let file = load_file(flags)?;
    let cfg = solver_config(flags);
    let mut warnings: Vec<String> = Vec::new();

    enum Input {
        Pure(PureState),
        Density(DensityMatrix),
    }
    let input = match file {
        StateFile::Pure(p) => {
            let n = p.dims().len();
            if !(p.dims().iter().all(|&d| d == 2) && (n == 3 || n == 4)) {
                return Err(CliError::Parse(
                    "analyze expects a pure state of 3 or 4 qubits".into(),
                ));
            }
            Input::Pure(p)
        }
        StateFile::Density(rho) => {
            if rho.dims() != [2, 2, 2] {
                return Err(CliError::Parse(
                    "analyze expects a density matrix of exactly 3 qubits".into(),
                ));
            }
            Input::Density(rho)
        }
        _ => {
            return Err(CliError::Parse(
                "analyze expects a pure or density state file".into(),
            ))
        }
    };

    let (rho, pure, qubits) = match &input {
        Input::Pure(p) => (p.to_density(), Some(p), p.dims().len()),
        Input::Density(rho) => (rho.clone(), None, rho.dims().len()),
    };

    let classification = match pure {
        Some(p) if qubits == 3 => Some(classify(p, DEFAULT_CLASSIFIER_TOL).map_err(internal)?),
        _ => None,
    };

    let correlation = irreducible_correlation(&rho, 2, &cfg).map_err(internal)?;
    if !correlation.converged {
        warnings.push(
            "max-entropy solver did not reach its residual target; correlation is approximate"
                .into(),
        );
    }

    let search = if flags.search {
        match pure {
            Some(p) => {
                let search_cfg = SearchConfig {
                    restarts: flags.restarts.unwrap_or(20),
                    tolerance: flags.tol.unwrap_or(1e-8),
                    seed: flags.seed,
                    ..SearchConfig::default()
                };
                Some(uniqueness_search(p, &search_cfg).map_err(internal)?)
            }
            None => {
                warnings.push("search skipped: it requires a pure state input".into());
                None
            }
        }
    } else {
        None
    };

    let report = Json::object(vec![
        ("command", Json::Str("analyze".into())),
        (
            "input",
            Json::object(vec![
                (
                    "kind",
                    Json::Str(if pure.is_some() { "pure" } else { "density" }.into()),
                ),
                ("qubits", Json::Int(qubits as i64)),
            ]),
        ),
        (
            "classification",
            classification
                .as_ref()
                .map_or(Json::Null, classification_json),
        ),
        (
            "correlation",
            Json::object(vec![
                ("arity", Json::Int(2)),
                ("bits", Json::Float(correlation.correlation_bits)),
                (
                    "reconstruction_entropy_bits",
                    Json::Float(correlation.reconstruction_entropy_bits),
                ),
                (
                    "state_entropy_bits",
                    Json::Float(correlation.state_entropy_bits),
                ),
                ("trace_distance", Json::Float(correlation.trace_distance)),
                ("residual", Json::Float(correlation.residual)),
                ("converged", Json::Bool(correlation.converged)),
                ("via_penalty", Json::Bool(correlation.used_penalty)),
            ]),
        ),
        ("search", search.as_ref().map_or(Json::Null, search_json)),
        (
            "warnings",
            Json::Array(warnings.iter().map(|w| Json::Str(w.clone())).collect()),
        ),
    ]);

    let mut text = String::new();
    text.push_str(&format!(
        "input: {} of {} qubits\n",
        if pure.is_some() { "pure state" } else { "density matrix" },
        qubits
    ));
    if let Some(v) = &classification {
        text.push_str(&format!("verdict: {}\n", verdict_name(v.kind)));
        if let Some(q) = v.product_cut {
            text.push_str(&format!("product cut: qubit {}\n", ["A", "B", "C"][q]));
        }
        if v.degenerate {
            text.push_str("note: all invariants vanish; conditions hold vacuously\n");
        }
        for (inv, cond) in v.invariants.iter().zip(v.d_conditions.iter()) {
            text.push_str(&format!(
                "  pair {}: alpha={} beta={} gamma={} |a|=|b|: {} phase: {}\n",
                grouping_name(inv.grouping),
                fmt_c(inv.alpha),
                fmt_c(inv.beta),
                fmt_c(inv.gamma),
                yes_no(cond.modulus_match),
                yes_no(cond.phase_real_nonneg),
            ));
        }
    }
    text.push_str(&format!(
        "irreducible correlation (pair marginals): {:.6} bits [{}{}]\n",
        correlation.correlation_bits,
        if correlation.converged { "converged" } else { "not converged" },
        if correlation.used_penalty { ", penalty path" } else { ", dual path" },
    ));
    text.push_str(&format!(
        "  reconstruction entropy: {:.6} bits, state entropy: {:.6} bits\n",
        correlation.reconstruction_entropy_bits, correlation.state_entropy_bits
    ));
    text.push_str(&format!(
        "  marginal residual: {:.3e}, trace distance to input: {:.3e}\n",
        correlation.residual, correlation.trace_distance
    ));
    if let Some(s) = &search {
        if s.alternative_found {
            text.push_str(&format!(
                "search: ALTERNATIVE FOUND at trace distance {:.6} (marginal residual {:.3e}, {} restarts)\n",
                s.trace_distance_to_input, s.marginal_residual, s.restarts
            ));
        } else {
            text.push_str(&format!(
                "search: no alternative found (best trace distance {:.3e}, residual {:.3e}, {} restarts)\n",
                s.trace_distance_to_input, s.marginal_residual, s.restarts
            ));
        }
    }
    for w in &warnings {
        text.push_str(&format!("warning: {w}\n"));
    }

    emit(flags, report, text);
    Ok(())
}

fn fmt_c(z: Complex64) -> String {
    format!("({:.6},{:.6})", z.re, z.im)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

// ---------------------------------------------------------------------------
// maxent

fn cmd_maxent(flags: &Flags) -> Result<(), CliError> {
    let set = match load_file(flags)? {
        StateFile::Marginals(set) => set,
        _ => {
            return Err(CliError::Parse(
                "maxent expects a marginals state file".into(),
            ))
        }
    };
    let cfg = solver_config(flags);

    let feasibility = marginal_feasibility(&set, &cfg).map_err(internal)?;
    if !feasibility.feasible {
        let witness_entropy = von_neumann_entropy(&feasibility.witness).map_err(internal)?;
        let report = Json::object(vec![
            ("command", Json::Str("maxent".into())),
            ("feasible", Json::Bool(false)),
            ("best_residual", Json::Float(feasibility.best_residual)),
            (
                "witness",
                Json::object(vec![
                    ("entropy_bits", Json::Float(witness_entropy)),
                    ("purity", Json::Float(feasibility.witness.purity())),
                ]),
            ),
            (
                "restarts_used",
                Json::Int(feasibility.restarts_used as i64),
            ),
        ]);
        let text = format!(
            "infeasible: no state matches these marginals\n\
             best residual (sum of squared Frobenius gaps): {:.6e} over {} restarts\n\
             closest witness: entropy {:.6} bits, purity {:.6}\n",
            feasibility.best_residual,
            feasibility.restarts_used,
            witness_entropy,
            feasibility.witness.purity()
        );
        emit(flags, report, text);
        return Err(CliError::Infeasible(format!(
            "marginal set is infeasible (best residual {:.6e})",
            feasibility.best_residual
        )));
    }

    let dual = maxent_from_marginals(&set, &cfg).map_err(internal)?;
    let (result, method): (MaxEntResult, &str) = if dual.converged {
        (dual, "dual")
    } else {
        let primal = maxent_primal(&set, &cfg, Some(&feasibility.witness)).map_err(internal)?;
        if primal.converged || primal.residual < dual.residual {
            (primal, "penalty")
        } else {
            (dual, "dual")
        }
    };
    let entropy = von_neumann_entropy(&result.state).map_err(internal)?;

    let mut written = Json::Null;
    if let Some(path) = &flags.out {
        write_state_file(path, &density_to_json(&result.state))?;
        written = Json::Str(path.display().to_string());
    }

    let report = Json::object(vec![
        ("command", Json::Str("maxent".into())),
        ("feasible", Json::Bool(true)),
        (
            "feasibility_residual",
            Json::Float(feasibility.best_residual),
        ),
        ("method", Json::Str(method.into())),
        ("converged", Json::Bool(result.converged)),
        ("residual", Json::Float(result.residual)),
        ("iterations", Json::Int(result.iterations as i64)),
        ("entropy_bits", Json::Float(entropy)),
        ("written", written),
    ]);
    let mut text = format!(
        "feasible (residual {:.3e})\n\
         max-entropy reconstruction via {} solver: {}\n\
         marginal residual: {:.3e} after {} iterations\n\
         entropy: {:.6} bits\n",
        feasibility.best_residual,
        method,
        if result.converged { "converged" } else { "NOT converged" },
        result.residual,
        result.iterations,
        entropy
    );
    if let Some(path) = &flags.out {
        text.push_str(&format!("state written to {}\n", path.display()));
    }
    emit(flags, report, text);
    Ok(())
}

// ---------------------------------------------------------------------------
// classical

fn cmd_classical(flags: &Flags) -> Result<(), CliError> {
    let dist = match load_file(flags)? {
        StateFile::Classical(d) => d,
        _ => {
            return Err(CliError::Parse(
                "classical expects a classical state file".into(),
            ))
        }
    };
    if dist.variables() != 3 {
        return Err(CliError::Parse(
            "classical tools operate on exactly 3 binary variables".into(),
        ));
    }
    let modes = flags.delta.is_some() as u8 + flags.range as u8 + flags.ipf as u8;
    if modes != 1 {
        return Err(CliError::Usage(
            "classical requires exactly one of --delta X, --range, --ipf".into(),
        ));
    }

    if let Some(delta) = flags.delta {
        let q = delta_family(&dist, delta).map_err(|e| match e {
            CoreError::DeltaOutOfRange { delta, index } => CliError::Domain(format!(
                "delta {delta} drives probability entry {index} below zero"
            )),
            other => internal(other),
        })?;
        // Verify the parity cancellation on all three pair marginals.
        let mut max_dev = 0.0f64;
        for pair in [[0usize, 1], [0, 2], [1, 2]] {
            let a = marginalize(&q, &pair).map_err(internal)?;
            let b = marginalize(&dist, &pair).map_err(internal)?;
            for (x, y) in a.probs().iter().zip(b.probs().iter()) {
                max_dev = max_dev.max((x - y).abs());
            }
        }
        let check_pass = max_dev <= 1e-12;
        let report = Json::object(vec![
            ("command", Json::Str("classical".into())),
            ("mode", Json::Str("delta".into())),
            ("delta", Json::Float(delta)),
            ("result", classical_to_json(&q)),
            ("marginal_check_max_deviation", Json::Float(max_dev)),
            ("marginal_check", Json::Str(if check_pass { "PASS" } else { "FAIL" }.into())),
        ]);
        let mut text = format!("parity family with delta = {delta}\n");
        for (i, p) in q.probs().iter().enumerate() {
            text.push_str(&format!("  p[{i:03b}] = {}\n", format_f64(*p)));
        }
        text.push_str(&format!(
            "pair-marginal check: {} (max deviation {:.1e})\n",
            if check_pass { "PASS" } else { "FAIL" },
            max_dev
        ));
        emit(flags, report, text);
        return Ok(());
    }

    if flags.range {
        let (lo, hi) = delta_range(&dist).map_err(internal)?;
        let report = Json::object(vec![
            ("command", Json::Str("classical".into())),
            ("mode", Json::Str("range".into())),
            ("delta_min", Json::Float(lo)),
            ("delta_max", Json::Float(hi)),
        ]);
        let text = format!("admissible delta interval: [{}, {}]\n", format_f64(lo), format_f64(hi));
        emit(flags, report, text);
        return Ok(());
    }

    // --ipf: refit the maximum-entropy joint from the three pair marginals.
    let targets = [
        marginalize(&dist, &[0, 1]).map_err(internal)?,
        marginalize(&dist, &[0, 2]).map_err(internal)?,
        marginalize(&dist, &[1, 2]).map_err(internal)?,
    ];
    let fit = classical_maxent_ipf(&targets, &IpfConfig::default()).map_err(internal)?;
    let gap = fit.joint.entropy_bits() - dist.entropy_bits();
    let report = Json::object(vec![
        ("command", Json::Str("classical".into())),
        ("mode", Json::Str("ipf".into())),
        ("converged", Json::Bool(fit.converged)),
        ("residual", Json::Float(fit.residual)),
        ("cycles", Json::Int(fit.cycles as i64)),
        ("entropy_bits", Json::Float(fit.joint.entropy_bits())),
        ("input_entropy_bits", Json::Float(dist.entropy_bits())),
        ("entropy_gap_bits", Json::Float(gap)),
        ("result", classical_to_json(&fit.joint)),
    ]);
    let mut text = format!(
        "iterative proportional fitting: {} in {} cycles (residual {:.3e})\n",
        if fit.converged { "converged" } else { "NOT converged" },
        fit.cycles,
        fit.residual
    );
    for (i, p) in fit.joint.probs().iter().enumerate() {
        text.push_str(&format!("  p[{i:03b}] = {}\n", format_f64(*p)));
    }
    text.push_str(&format!(
        "entropy: {:.6} bits (input {:.6}, gap {:.6})\n",
        fit.joint.entropy_bits(),
        dist.entropy_bits(),
        gap
    ));
    emit(flags, report, text);
    Ok(())
}

// ---------------------------------------------------------------------------
// counterexample

fn cmd_counterexample(flags: &Flags) -> Result<(), CliError> {
    let a = flags
        .a
        .ok_or_else(|| CliError::Usage("counterexample requires --a RE[,IM]".into()))?;
    let b = flags
        .b
        .ok_or_else(|| CliError::Usage("counterexample requires --b RE[,IM]".into()))?;

    let (pure, mixed) = ghz_counterexample(a, b).map_err(|e| match e {
        CoreError::DegenerateCoefficients => {
            CliError::Domain("both coefficients must be nonzero".into())
        }
        CoreError::NotNormalized { drift } => CliError::Domain(format!(
            "|a|^2 + |b|^2 must equal 1 (drift {drift:e})"
        )),
        other => internal(other),
    })?;

    let distance = qmargin_core::state::trace_distance(&pure, &mixed).map_err(internal)?;
    let mut max_dev = 0.0f64;
    for pair in [[0usize, 1], [0, 2], [1, 2]] {
        let x = qmargin_core::state::partial_trace(&pure, &pair).map_err(internal)?;
        let y = qmargin_core::state::partial_trace(&mixed, &pair).map_err(internal)?;
        max_dev = max_dev.max(x.matrix().max_abs_diff(y.matrix()));
    }
    let mixed_entropy = von_neumann_entropy(&mixed).map_err(internal)?;

    let mut written = Vec::new();
    if let Some(prefix) = &flags.out {
        let pure_path = path_with_suffix(prefix, "-pure.json");
        let mixed_path = path_with_suffix(prefix, "-mixed.json");
        write_state_file(&pure_path, &density_to_json(&pure))?;
        write_state_file(&mixed_path, &density_to_json(&mixed))?;
        written.push(pure_path);
        written.push(mixed_path);
    }

    let report = Json::object(vec![
        ("command", Json::Str("counterexample".into())),
        ("a", complex(a.re, a.im)),
        ("b", complex(b.re, b.im)),
        ("trace_distance", Json::Float(distance)),
        ("marginal_max_deviation", Json::Float(max_dev)),
        ("mixed_entropy_bits", Json::Float(mixed_entropy)),
        (
            "written",
            Json::Array(
                written
                    .iter()
                    .map(|p| Json::Str(p.display().to_string()))
                    .collect(),
            ),
        ),
    ]);
    let mut text = format!(
        "pure a|000> + b|111> versus diagonal mixture\n\
         identical pair marginals: max deviation {max_dev:.1e}\n\
         trace distance: {distance:.12} (= |a b|)\n\
         mixture entropy: {mixed_entropy:.6} bits\n"
    );
    for p in &written {
        text.push_str(&format!("written {}\n", p.display()));
    }
    emit(flags, report, text);
    Ok(())
}

fn path_with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}
