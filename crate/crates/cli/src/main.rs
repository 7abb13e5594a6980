//! Command-line front door: build and verify Hopf data from structure
//! constants, construct Coend modules, test projectivity and freeness, and
//! produce or recheck non-flatness witness certificates. All output is
//! newline-terminated JSON; exit code 0 means pass, 1 means a check ran and
//! failed (or was inconclusive), 2 means bad input.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use hopfcert_core::coend::coend;
use hopfcert_core::error::Error as CoreError;
use hopfcert_core::field::Field;
use hopfcert_core::freeword::{eval_word, parse_word};
use hopfcert_core::hopf::{
    build_group_algebra, build_sweedler, build_taft, cyclic_table, dualize, verify_hopf, HopfData,
};
use hopfcert_core::matrix::Matrix;
use hopfcert_core::rep::{
    is_free, is_projective, FreenessVerdict, HopfRef, Projectivity, Rep, Side,
};
use hopfcert_core::witness::{
    build_witness, certify_nonflat, rebuild_witness, recheck, Verdict, WitnessCertificate,
    WitnessParams,
};

#[derive(Parser)]
#[command(name = "hopfcert", version, about = "Exact Hopf algebra computations and non-flatness certificates")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build canonical Hopf data as JSON structure constants.
    Build {
        #[command(subcommand)]
        kind: BuildKind,
    },
    /// Check every Hopf algebra axiom of a JSON file exhaustively.
    Verify {
        #[arg(long)]
        hopf: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Construct the module coalgebra Coend V for a module expression.
    Coend {
        #[arg(long)]
        hopf: PathBuf,
        #[arg(long)]
        module: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide projectivity of a module through a split free cover.
    Projective {
        #[arg(long)]
        hopf: PathBuf,
        #[arg(long)]
        module: String,
        #[arg(long, value_parser = parse_side, default_value = "left")]
        side: Side,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide freeness with a divisibility/invariant certificate.
    Free {
        #[arg(long)]
        hopf: PathBuf,
        #[arg(long)]
        module: String,
        #[arg(long, value_parser = parse_side, default_value = "left")]
        side: Side,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the randomized witness recursion and emit its certificate.
    Witness {
        #[arg(long)]
        hopf: PathBuf,
        #[arg(long, default_value_t = 1)]
        v1: usize,
        #[arg(long, default_value_t = 5)]
        depth: usize,
        #[arg(long, default_value_t = 8)]
        truncation: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        bound: i64,
        #[arg(long, default_value_t = 50)]
        retries: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Assemble the full non-flatness certificate for a Hopf algebra.
    CertifyNonflat {
        #[arg(long)]
        hopf: PathBuf,
        #[arg(long, default_value_t = 1)]
        v1: usize,
        #[arg(long, default_value_t = 5)]
        depth: usize,
        #[arg(long, default_value_t = 8)]
        truncation: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        bound: i64,
        #[arg(long, default_value_t = 50)]
        retries: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-derive every verdict of a certificate from its inputs.
    Recheck {
        #[arg(long)]
        certificate: PathBuf,
        #[arg(long)]
        hopf: PathBuf,
    },
    /// Evaluate a free-algebra word under the representation of a witness.
    Eval {
        #[arg(long)]
        certificate: PathBuf,
        #[arg(long)]
        hopf: PathBuf,
        #[arg(long)]
        word: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum BuildKind {
    /// Group algebra k[G] from a named cyclic group (C2, C3, ...) or a JSON
    /// multiplication table file.
    Group {
        #[arg(long)]
        table: String,
        #[arg(long)]
        field: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The 4-dimensional nonsemisimple Hopf algebra (n = 2 Taft algebra).
    Sweedler {
        #[arg(long)]
        field: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Taft algebra of dimension n^2; needs a primitive n-th root of unity.
    Taft {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        field: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dual Hopf algebra of an existing JSON file.
    Dual {
        #[arg(long)]
        hopf: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_side(s: &str) -> Result<Side, String> {
    match s {
        "left" => Ok(Side::Left),
        "right" => Ok(Side::Right),
        other => Err(format!("side must be left or right, got {other:?}")),
    }
}

enum CliFailure {
    /// A check ran to completion and failed or was inconclusive.
    Checked(String),
    /// Bad input: unreadable files, malformed JSON, violated preconditions.
    Input(String),
}

impl From<CoreError> for CliFailure {
    fn from(e: CoreError) -> CliFailure {
        CliFailure::Input(e.to_string())
    }
}

type CliResult = Result<(), CliFailure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliFailure::Checked(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(CliFailure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> CliResult {
    match cli.cmd {
        Cmd::Build { kind } => run_build(kind),
        Cmd::Verify { hopf, out } => run_verify(&hopf, out.as_deref()),
        Cmd::Coend { hopf, module, out } => run_coend(&hopf, &module, out.as_deref()),
        Cmd::Projective {
            hopf,
            module,
            side,
            out,
        } => run_projective(&hopf, &module, side, out.as_deref()),
        Cmd::Free {
            hopf,
            module,
            side,
            out,
        } => run_free(&hopf, &module, side, out.as_deref()),
        Cmd::Witness {
            hopf,
            v1,
            depth,
            truncation,
            seed,
            bound,
            retries,
            out,
        } => run_witness(
            &hopf,
            WitnessParams {
                v1_dim: v1,
                depth,
                truncation,
                seed,
                bound,
                retries,
            },
            out.as_deref(),
            false,
        ),
        Cmd::CertifyNonflat {
            hopf,
            v1,
            depth,
            truncation,
            seed,
            bound,
            retries,
            out,
        } => run_witness(
            &hopf,
            WitnessParams {
                v1_dim: v1,
                depth,
                truncation,
                seed,
                bound,
                retries,
            },
            out.as_deref(),
            true,
        ),
        Cmd::Recheck { certificate, hopf } => run_recheck(&certificate, &hopf),
        Cmd::Eval {
            certificate,
            hopf,
            word,
            out,
        } => run_eval(&certificate, &hopf, &word, out.as_deref()),
    }
}

fn emit(value: &Value, out: Option<&Path>) -> CliResult {
    let mut text = serde_json::to_string(value)
        .map_err(|e| CliFailure::Input(format!("serialization failed: {e}")))?;
    text.push('\n');
    match out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)
        .map_err(|e| CliFailure::Input(format!("cannot write {}: {e}", tmp.display())))?;
    fs::rename(&tmp, path)
        .map_err(|e| CliFailure::Input(format!("cannot move into place {}: {e}", path.display())))?;
    Ok(())
}

fn load_hopf(path: &Path) -> Result<HopfRef, CliFailure> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliFailure::Input(format!("cannot read {}: {e}", path.display())))?;
    let data: HopfData = serde_json::from_str(&text)
        .map_err(|e| CliFailure::Input(format!("malformed Hopf JSON in {}: {e}", path.display())))?;
    let data = data.normalize().map_err(CliFailure::from)?;
    Ok(Arc::new(data))
}

fn run_build(kind: BuildKind) -> CliResult {
    let (hopf, out) = match kind {
        BuildKind::Group { table, field, out } => {
            let field = Field::parse_flag(&field)?;
            let table = load_group_table(&table)?;
            (build_group_algebra(&table, field)?, out)
        }
        BuildKind::Sweedler { field, out } => {
            let field = Field::parse_flag(&field)?;
            (build_sweedler(field)?, out)
        }
        BuildKind::Taft { n, field, out } => {
            let field = Field::parse_flag(&field)?;
            (build_taft(n, field)?, out)
        }
        BuildKind::Dual { hopf, out } => {
            let h = load_hopf(&hopf)?;
            (dualize(&h), out)
        }
    };
    let value = serde_json::to_value(&hopf)
        .map_err(|e| CliFailure::Input(format!("serialization failed: {e}")))?;
    emit(&value, out.as_deref())
}

fn load_group_table(spec: &str) -> Result<Vec<Vec<usize>>, CliFailure> {
    if let Some(n) = spec.strip_prefix('C') {
        if let Ok(n) = n.parse::<usize>() {
            if n == 0 {
                return Err(CliFailure::Input("cyclic group order must be positive".into()));
            }
            return Ok(cyclic_table(n));
        }
    }
    let text = fs::read_to_string(spec)
        .map_err(|e| CliFailure::Input(format!("cannot read group table {spec}: {e}")))?;
    serde_json::from_str(&text)
        .map_err(|e| CliFailure::Input(format!("malformed group table {spec}: {e}")))
}

fn run_verify(hopf: &Path, out: Option<&Path>) -> CliResult {
    let h = load_hopf(hopf)?;
    let report = verify_hopf(&h)?;
    let value = json!({
        "command": "verify",
        "hopf": hopf.display().to_string(),
        "pass": report.pass,
        "axioms": report.axioms,
    });
    emit(&value, out)?;
    if report.pass {
        Ok(())
    } else {
        Err(CliFailure::Checked("one or more axioms fail".into()))
    }
}

/// Module expressions: `regular`, `trivial:<n>`, a module JSON path, sums
/// with `+`, and `coend:<expr>` applied to the rest of the string.
fn build_module(h: &HopfRef, spec: &str, side: Side) -> Result<Rep, CliFailure> {
    let spec = spec.trim();
    if let Some(inner) = spec.strip_prefix("coend:") {
        let v = build_module(h, inner, Side::Left)?;
        let c = coend(&v)?;
        return Ok(c.as_rep(h));
    }
    let mut parts = spec.split('+').map(str::trim);
    let first = parts
        .next()
        .ok_or_else(|| CliFailure::Input("empty module expression".into()))?;
    let mut acc = build_module_atom(h, first, side)?;
    for part in parts {
        let next = build_module_atom(h, part, side)?;
        acc = acc.direct_sum(&next)?;
    }
    Ok(acc)
}

fn build_module_atom(h: &HopfRef, atom: &str, side: Side) -> Result<Rep, CliFailure> {
    if atom == "regular" {
        return Ok(Rep::regular(h, side));
    }
    if let Some(n) = atom.strip_prefix("trivial:") {
        let n: usize = n
            .parse()
            .map_err(|_| CliFailure::Input(format!("bad trivial dimension in {atom:?}")))?;
        return Ok(Rep::trivial(h, n, side));
    }
    if atom.ends_with(".json") {
        return load_module(h, Path::new(atom));
    }
    Err(CliFailure::Input(format!(
        "unknown module expression {atom:?} (expected regular, trivial:<n>, coend:<expr> or a .json path)"
    )))
}

fn load_module(h: &HopfRef, path: &Path) -> Result<Rep, CliFailure> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliFailure::Input(format!("cannot read {}: {e}", path.display())))?;
    let mut v: Value = serde_json::from_str(&text)
        .map_err(|e| CliFailure::Input(format!("malformed module JSON {}: {e}", path.display())))?;
    // Outputs of the `coend` command wrap the module under a "module" key.
    if let Some(inner) = v.get("module") {
        if inner.is_object() {
            v = inner.clone();
        }
    }
    let side = match v.get("side").and_then(Value::as_str) {
        Some("left") => Side::Left,
        Some("right") => Side::Right,
        _ => return Err(CliFailure::Input("module JSON needs \"side\": left|right".into())),
    };
    let dim = v
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| CliFailure::Input("module JSON needs \"dim\"".into()))? as usize;
    let hopf = match v.get("hopf") {
        Some(inline) if inline.is_object() => {
            let data: HopfData = serde_json::from_value(inline.clone())
                .map_err(|e| CliFailure::Input(format!("inline hopf: {e}")))?;
            Arc::new(data.normalize()?)
        }
        _ => h.clone(),
    };
    let action_raw = v
        .get("action")
        .and_then(Value::as_array)
        .ok_or_else(|| CliFailure::Input("module JSON needs \"action\"".into()))?;
    let mut action = Vec::with_capacity(action_raw.len());
    for m in action_raw {
        let m: Matrix = serde_json::from_value(m.clone())
            .map_err(|e| CliFailure::Input(format!("bad action matrix: {e}")))?;
        action.push(m);
    }
    Rep::new(hopf, side, dim, action).map_err(CliFailure::from)
}

fn module_to_json(r: &Rep) -> Value {
    json!({
        "hopf": r.hopf.as_ref(),
        "side": r.side,
        "dim": r.dim,
        "action": r.action,
    })
}

fn run_coend(hopf: &Path, module: &str, out: Option<&Path>) -> CliResult {
    let h = load_hopf(hopf)?;
    let v = build_module(&h, module, Side::Left)?;
    let c = coend(&v)?;
    c.verify(&h)?;
    let crep = c.as_rep(&h);
    let value = json!({
        "command": "coend",
        "config": {"hopf": hopf.display().to_string(), "module": module},
        "coalgebra": c,
        "module": module_to_json(&crep),
    });
    emit(&value, out)
}

fn run_projective(hopf: &Path, module: &str, side: Side, out: Option<&Path>) -> CliResult {
    let h = load_hopf(hopf)?;
    let m = build_module(&h, module, side)?;
    let cert = is_projective(&m)?;
    let value = json!({
        "command": "projective",
        "config": {"hopf": hopf.display().to_string(), "module": module, "side": m.side},
        "certificate": cert,
    });
    emit(&value, out)?;
    match cert.verdict {
        Projectivity::Projective => Ok(()),
        Projectivity::NotProjective => Err(CliFailure::Checked("module is not projective".into())),
    }
}

fn run_free(hopf: &Path, module: &str, side: Side, out: Option<&Path>) -> CliResult {
    let h = load_hopf(hopf)?;
    let m = build_module(&h, module, side)?;
    let verdict = is_free(&m)?;
    let value = json!({
        "command": "free",
        "config": {"hopf": hopf.display().to_string(), "module": module, "side": m.side},
        "certificate": verdict,
    });
    emit(&value, out)?;
    match verdict {
        FreenessVerdict::Free { .. } => Ok(()),
        FreenessVerdict::NotFree { reason } => {
            Err(CliFailure::Checked(format!("module is not free: {reason}")))
        }
        FreenessVerdict::Inconclusive { reason } => {
            Err(CliFailure::Checked(format!("freeness undecided: {reason}")))
        }
    }
}

fn run_witness(
    hopf: &Path,
    params: WitnessParams,
    out: Option<&Path>,
    nonflat: bool,
) -> CliResult {
    let h = load_hopf(hopf)?;
    let outcome = if nonflat {
        certify_nonflat(&h, &params)?
    } else {
        build_witness(&h, &params)?
    };
    let cert = &outcome.certificate;
    let value = serde_json::to_value(cert)
        .map_err(|e| CliFailure::Input(format!("serialization failed: {e}")))?;
    emit(&value, out)?;
    match cert.verdict {
        Verdict::Pass => Ok(()),
        _ => Err(CliFailure::Checked(
            cert.diagnostic
                .clone()
                .unwrap_or_else(|| "certificate did not pass".into()),
        )),
    }
}

fn run_recheck(certificate: &Path, hopf: &Path) -> CliResult {
    let h = load_hopf(hopf)?;
    let text = fs::read_to_string(certificate)
        .map_err(|e| CliFailure::Input(format!("cannot read {}: {e}", certificate.display())))?;
    let stored: WitnessCertificate = serde_json::from_str(&text).map_err(|e| {
        CliFailure::Input(format!(
            "malformed certificate {}: {e}",
            certificate.display()
        ))
    })?;
    let fresh = recheck(&h, &stored)?;
    let stored_json: Value = serde_json::to_value(&stored).unwrap();
    let fresh_json: Value = serde_json::to_value(&fresh).unwrap();
    if let Some(path) = first_divergence(&stored_json, &fresh_json, String::new()) {
        println!(
            "{}",
            json!({"command": "recheck", "pass": false, "first_divergence": path})
        );
        return Err(CliFailure::Checked(format!(
            "certificate does not re-derive: first divergent field {path}"
        )));
    }
    println!("{}", json!({"command": "recheck", "pass": true}));
    Ok(())
}

fn first_divergence(a: &Value, b: &Value, path: String) -> Option<String> {
    match (a, b) {
        (Value::Object(ma), Value::Object(mb)) => {
            let keys: Vec<&String> = ma.keys().chain(mb.keys()).collect();
            let mut seen = std::collections::BTreeSet::new();
            for k in keys {
                if !seen.insert(k.clone()) {
                    continue;
                }
                let pa = ma.get(k).unwrap_or(&Value::Null);
                let pb = mb.get(k).unwrap_or(&Value::Null);
                if let Some(p) = first_divergence(pa, pb, format!("{path}/{k}")) {
                    return Some(p);
                }
            }
            None
        }
        (Value::Array(xa), Value::Array(xb)) => {
            if xa.len() != xb.len() {
                return Some(format!("{path} (array lengths {} vs {})", xa.len(), xb.len()));
            }
            for (i, (pa, pb)) in xa.iter().zip(xb).enumerate() {
                if let Some(p) = first_divergence(pa, pb, format!("{path}/{i}")) {
                    return Some(p);
                }
            }
            None
        }
        _ => {
            if a == b {
                None
            } else {
                Some(if path.is_empty() { "/".into() } else { path })
            }
        }
    }
}

fn run_eval(certificate: &Path, hopf: &Path, word: &str, out: Option<&Path>) -> CliResult {
    let h = load_hopf(hopf)?;
    let text = fs::read_to_string(certificate)
        .map_err(|e| CliFailure::Input(format!("cannot read {}: {e}", certificate.display())))?;
    let stored: WitnessCertificate = serde_json::from_str(&text).map_err(|e| {
        CliFailure::Input(format!(
            "malformed certificate {}: {e}",
            certificate.display()
        ))
    })?;
    let witness = rebuild_witness(&h, &stored)?;
    let parsed = parse_word(word, &h.field)?;
    let op = eval_word(&witness, &parsed)?;
    let value = json!({
        "command": "eval",
        "config": {"hopf": hopf.display().to_string(), "certificate": certificate.display().to_string(), "word": word},
        "operator": op.to_json(),
    });
    emit(&value, out)
}
