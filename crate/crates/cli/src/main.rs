//! Command-line driver: orbit tables, the Mackey verifier, the axiom
//! checkers, branching graphs with similarity gauges, cone checks for
//! harmonic functionals, and the mixing construction. All numeric output is
//! exact ("num/den" strings); results are deterministic for a fixed
//! configuration, and cacheable with checksum verification.
//!
//! Exit codes: 0 success, 2 infeasible request, 3 check failed,
//! 4 I/O or schema error.

mod cache;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use finq_core::bimodule::{check_bialgebra, check_twisted, GlAlgebra, UBimodule};
use finq_core::error::Error as CoreError;
use finq_core::field::FieldSpec;
use finq_core::graphs::{build_graph, graph_json, similarity_gauge, GaugeOutcome, GraphKind};
use finq_core::harmonic::{
    cone_check, functional_from_json, functional_to_json, mix, mix_closed_form_check, phi_zero,
    psi_zero, Cone, FnSide, Functional, Tower,
};
use finq_core::orbit::{enumerate_orbits, OrbitKind, TableMode};
use finq_core::parabolic::{mackey_check, SettingKind};
use finq_core::ratio::{q_from_string, q_to_string};

struct CliError {
    code: u8,
    msg: String,
}

impl CliError {
    fn new(code: u8, msg: impl Into<String>) -> CliError {
        CliError { code, msg: msg.into() }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> CliError {
        let code = match &e {
            CoreError::Infeasible(_)
            | CoreError::Unsupported(_)
            | CoreError::Dimension(_)
            | CoreError::NotNilpotent => 2,
            CoreError::Schema(_)
            | CoreError::Field(_)
            | CoreError::FieldMismatch(_)
            | CoreError::Internal(_) => 4,
        };
        CliError::new(code, e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "finq", version, about = "exact invariant-function calculus on gl(n, F_q) and u(2n, F_q^2)")]
struct Cli {
    /// Cache directory (default: $FINQ_CACHE_DIR if set, else no cache)
    #[arg(long, global = true)]
    cache_dir: Option<String>,

    /// Write the JSON result here as well as to stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for the brute-force sweeps (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Enumerate adjoint orbits of gl(n, F_q) or u(2n, F_{q^2})
    Orbits {
        /// 'gl' or 'u'
        #[arg(long)]
        kind: String,
        /// defining field size q (prime power; 'p^e' accepted)
        #[arg(long)]
        q: String,
        /// size parameter: matrix size n for gl, half-size n for u
        #[arg(long)]
        n: usize,
        /// 'exhaustive' or 'nilpotent'
        #[arg(long, default_value = "exhaustive")]
        mode: String,
    },
    /// Verify the Mackey identity for two maximal parabolic splits
    Mackey {
        /// 'gl' or 'u'
        #[arg(long)]
        setting: String,
        #[arg(long)]
        q: String,
        /// grading level n = i + j
        #[arg(long)]
        n: usize,
        /// split "i,j" of the first parabolic
        #[arg(long)]
        l: String,
        /// split "i,j" of the second parabolic
        #[arg(long)]
        lprime: String,
    },
    /// Run the bialgebra or twisted-structure axiom battery
    Axioms {
        /// 'bialgebra' or 'twisted'
        #[arg(long)]
        which: String,
        #[arg(long)]
        q: String,
        #[arg(long)]
        maxdeg: usize,
    },
    /// Build a branching graph, optionally with a similarity gauge
    Graph {
        /// 'glb0', 'ub0', 'yhl' or 'yhl-even'
        #[arg(long)]
        which: String,
        #[arg(long)]
        q: String,
        #[arg(long)]
        levels: usize,
        /// Hall-Littlewood parameter override as "num/den" (default 1/q)
        #[arg(long)]
        t: Option<String>,
        /// second graph kind to gauge against
        #[arg(long)]
        gauge: Option<String>,
    },
    /// Check cone membership of a functional
    Harmonic {
        /// 'F', 'F0', 'Ftilde' or 'Ftilde0'
        #[arg(long)]
        cone: String,
        #[arg(long)]
        q: String,
        #[arg(long)]
        levels: usize,
        /// 'builtin:phi0', 'builtin:psi0' or 'file:PATH'
        #[arg(long)]
        phi: String,
    },
    /// Mix two functionals and optionally cross-check the closed form
    Mix {
        #[arg(long)]
        q: String,
        /// mixing parameter as "num/den"
        #[arg(long)]
        s: String,
        /// gl-side functional: 'builtin:phi0' or 'file:PATH'
        #[arg(long, default_value = "builtin:phi0")]
        phi: String,
        /// unitary-side functional: 'builtin:psi0' or 'file:PATH'
        #[arg(long, default_value = "builtin:psi0")]
        psi: String,
        #[arg(long)]
        levels: usize,
        /// also compare the zero-orbit values against the closed form
        #[arg(long)]
        closed_form: bool,
    },
    /// Recompute a deterministic 10% of the cache and compare bytes
    VerifyCache {
        /// percentage of entries to recompute
        #[arg(long, default_value_t = 10)]
        percent: u64,
    },
}

fn parse_split(s: &str) -> Result<(usize, usize), CliError> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| CliError::new(4, format!("bad split '{s}', expected \"i,j\"")))?;
    let i = a.trim().parse().map_err(|_| CliError::new(4, format!("bad split '{s}'")))?;
    let j = b.trim().parse().map_err(|_| CliError::new(4, format!("bad split '{s}'")))?;
    Ok((i, j))
}

fn unitary_field(q: &str) -> Result<Arc<FieldSpec>, CliError> {
    let base = FieldSpec::parse_q(q)?;
    if !base.is_odd() {
        return Err(CliError::new(2, "unitary commands need odd q"));
    }
    Ok(base.quadratic_extension()?)
}

fn load_functional_arg(spec: &str, q: &str, levels: usize, side: FnSide) -> Result<Functional, CliError> {
    match spec {
        "builtin:phi0" => {
            let field = match side {
                FnSide::A => FieldSpec::parse_q(q)?,
                FnSide::B => return Err(CliError::new(4, "phi0 is a gl-side functional")),
            };
            Ok(phi_zero(&field, levels))
        }
        "builtin:psi0" => {
            if side != FnSide::B {
                return Err(CliError::new(4, "psi0 is a unitary-side functional"));
            }
            Ok(psi_zero(&unitary_field(q)?, levels)?)
        }
        other => {
            let path = other
                .strip_prefix("file:")
                .ok_or_else(|| CliError::new(4, format!("bad functional spec '{other}'")))?;
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::new(4, format!("read {path}: {e}")))?;
            let doc: Value = serde_json::from_str(&text)
                .map_err(|e| CliError::new(4, format!("parse {path}: {e}")))?;
            let f = functional_from_json(&doc)?;
            if f.side != side {
                return Err(CliError::new(4, format!("functional in {path} has the wrong side")));
            }
            if f.n_max < levels {
                return Err(CliError::new(
                    2,
                    format!("functional in {path} is truncated below level {levels}"),
                ));
            }
            Ok(f)
        }
    }
}

/// Compute the payload for a cache key. Every cacheable command routes
/// through here, so `verify-cache` can recompute entries from keys alone.
fn compute(key: &Value) -> Result<Value, CliError> {
    let cmd = key["cmd"].as_str().unwrap_or_default();
    match cmd {
        "orbits" => {
            let kind_s = key["kind"].as_str().unwrap_or_default();
            let q = key["q"].as_str().unwrap_or_default();
            let n = key["n"].as_u64().unwrap_or_default() as usize;
            let mode = TableMode::parse(key["mode"].as_str().unwrap_or_default())?;
            let (kind, field, size) = match kind_s {
                "gl" => (OrbitKind::Gl, FieldSpec::parse_q(q)?, n),
                "u" => (OrbitKind::U, unitary_field(q)?, 2 * n),
                other => return Err(CliError::new(4, format!("unknown kind '{other}'"))),
            };
            let table = enumerate_orbits(kind, &field, size, mode)?;
            Ok(table.to_json())
        }
        "mackey" => {
            let setting = key["setting"].as_str().unwrap_or_default();
            let q = key["q"].as_str().unwrap_or_default();
            let l = (
                key["l"][0].as_u64().unwrap_or_default() as usize,
                key["l"][1].as_u64().unwrap_or_default() as usize,
            );
            let lp = (
                key["lprime"][0].as_u64().unwrap_or_default() as usize,
                key["lprime"][1].as_u64().unwrap_or_default() as usize,
            );
            let (kind, field) = match setting {
                "gl" => (SettingKind::Gl, FieldSpec::parse_q(q)?),
                "u" => (SettingKind::U, unitary_field(q)?),
                other => return Err(CliError::new(4, format!("unknown setting '{other}'"))),
            };
            let report = mackey_check(kind, &field, l, lp)?;
            Ok(report.to_json())
        }
        "graph" => {
            let which = GraphKind::parse(key["which"].as_str().unwrap_or_default())?;
            let q = key["q"].as_str().unwrap_or_default();
            let levels = key["levels"].as_u64().unwrap_or_default() as usize;
            let t = match key["t"].as_str() {
                Some(s) => Some(q_from_string(s)?),
                None => None,
            };
            let field = match which {
                GraphKind::Glb0 | GraphKind::Yhl => FieldSpec::parse_q(q)?,
                GraphKind::Ub0 | GraphKind::YhlEven => unitary_field(q)?,
            };
            let g = build_graph(which, &field, levels, t.clone())?;
            let mut doc = graph_json(&g);
            if let Some(gauge_s) = key["gauge"].as_str() {
                let gkind = GraphKind::parse(gauge_s)?;
                let gfield = match gkind {
                    GraphKind::Glb0 | GraphKind::Yhl => FieldSpec::parse_q(q)?,
                    GraphKind::Ub0 | GraphKind::YhlEven => unitary_field(q)?,
                };
                let g2 = build_graph(gkind, &gfield, levels, t)?;
                let gauge_doc = match similarity_gauge(&g, &g2) {
                    GaugeOutcome::Found(f) => json!({
                        "against": gauge_s,
                        "found": true,
                        "f": f.iter()
                            .map(|(k, v)| (k.to_string(), q_to_string(v)))
                            .collect::<std::collections::BTreeMap<_, _>>(),
                    }),
                    GaugeOutcome::Failed { reason } => json!({
                        "against": gauge_s,
                        "found": false,
                        "reason": reason,
                    }),
                };
                doc["gauge"] = gauge_doc;
            }
            Ok(doc)
        }
        other => Err(CliError::new(4, format!("unknown cache key command '{other}'"))),
    }
}

fn run_cached(
    dir: Option<PathBuf>,
    key: Value,
) -> Result<Value, CliError> {
    if let Some(dir) = &dir {
        match cache::lookup(dir, &key) {
            Ok(Some(payload)) => return Ok(payload),
            Ok(None) => {}
            Err(msg) => return Err(CliError::new(4, msg)),
        }
    }
    let payload = compute(&key)?;
    if let Some(dir) = &dir {
        cache::store(dir, &key, &payload).map_err(|msg| CliError::new(4, msg))?;
    }
    Ok(payload)
}

fn run(cli: Cli) -> Result<(Value, u8), CliError> {
    let dir = cache::cache_dir(cli.cache_dir.as_deref());
    match cli.cmd {
        Cmd::Orbits { kind, q, n, mode } => {
            // validate early so bad requests do not reach the cache
            TableMode::parse(&mode)?;
            let key = json!({
                "version": cache::ARTIFACT_VERSION,
                "cmd": "orbits", "kind": kind, "q": q, "n": n, "mode": mode,
            });
            Ok((run_cached(dir, key)?, 0))
        }
        Cmd::Mackey { setting, q, n, l, lprime } => {
            let l = parse_split(&l)?;
            let lp = parse_split(&lprime)?;
            if l.0 + l.1 != n || lp.0 + lp.1 != n {
                return Err(CliError::new(2, "splits must sum to n"));
            }
            let key = json!({
                "version": cache::ARTIFACT_VERSION,
                "cmd": "mackey", "setting": setting, "q": q, "n": n,
                "l": [l.0, l.1], "lprime": [lp.0, lp.1],
            });
            let payload = run_cached(dir, key)?;
            let code = if payload["equal"].as_bool() == Some(true) { 0 } else { 3 };
            Ok((payload, code))
        }
        Cmd::Axioms { which, q, maxdeg } => {
            let report = match which.as_str() {
                "bialgebra" => check_bialgebra(&FieldSpec::parse_q(&q)?, maxdeg)?,
                "twisted" => check_twisted(&unitary_field(&q)?, maxdeg)?,
                other => return Err(CliError::new(4, format!("unknown axiom battery '{other}'"))),
            };
            let passed = report.passed();
            let doc = serde_json::to_value(&report).expect("serializable");
            Ok((doc, if passed { 0 } else { 3 }))
        }
        Cmd::Graph { which, q, levels, t, gauge } => {
            GraphKind::parse(&which)?;
            if let Some(g) = &gauge {
                GraphKind::parse(g)?;
            }
            let mut key = json!({
                "version": cache::ARTIFACT_VERSION,
                "cmd": "graph", "which": which, "q": q, "levels": levels,
            });
            if let Some(t) = &t {
                // normalize the rational so equivalent spellings share a key
                key["t"] = Value::String(q_to_string(&q_from_string(t)?));
            }
            if let Some(g) = &gauge {
                key["gauge"] = Value::String(g.clone());
            }
            let payload = run_cached(dir, key)?;
            let code = if gauge.is_some() && payload["gauge"]["found"].as_bool() != Some(true) {
                3
            } else {
                0
            };
            Ok((payload, code))
        }
        Cmd::Harmonic { cone, q, levels, phi } => {
            let cone = Cone::parse(&cone)?;
            let f = load_functional_arg(&phi, &q, levels, cone.side())?;
            let (doc, passed) = match cone.side() {
                FnSide::A => {
                    let alg = GlAlgebra::new(FieldSpec::parse_q(&q)?);
                    let rep = cone_check(&f, cone, levels, &Tower::Gl(&alg))?;
                    (serde_json::to_value(&rep).expect("serializable"), rep.passed())
                }
                FnSide::B => {
                    let bim = UBimodule::new(unitary_field(&q)?)?;
                    let rep = cone_check(&f, cone, levels, &Tower::U(&bim))?;
                    (serde_json::to_value(&rep).expect("serializable"), rep.passed())
                }
            };
            Ok((doc, if passed { 0 } else { 3 }))
        }
        Cmd::Mix { q, s, phi, psi, levels, closed_form } => {
            let s = q_from_string(&s)?;
            let bim = UBimodule::new(unitary_field(&q)?)?;
            // the gl side of the mixing lives over F_{q^2}
            let q2 = bim.field.q().to_string();
            let phi_f = load_functional_arg(&phi, &q2, levels, FnSide::A)?;
            let psi_f = load_functional_arg(&psi, &q, levels, FnSide::B)?;
            let mixed = mix(&phi_f, &psi_f, &s, &bim)?;
            let rep = cone_check(&mixed, Cone::Ftilde0, levels, &Tower::U(&bim))?;
            let mut doc = json!({
                "schema": "mix/1",
                "q": bim.q(),
                "s": q_to_string(&s),
                "levels": levels,
                "values": functional_to_json(&mixed)["levels"],
                "cone": serde_json::to_value(&rep).expect("serializable"),
            });
            let mut passed = rep.passed();
            if closed_form {
                let cf = mix_closed_form_check(&phi_f, &s, levels, &bim)?;
                passed = passed && cf.passed();
                doc["closed_form"] = serde_json::to_value(&cf).expect("serializable");
            }
            Ok((doc, if passed { 0 } else { 3 }))
        }
        Cmd::VerifyCache { percent } => {
            let Some(dir) = dir else {
                return Err(CliError::new(4, "verify-cache needs --cache-dir or FINQ_CACHE_DIR"));
            };
            let entries = cache::entries(&dir).map_err(|msg| CliError::new(4, msg))?;
            let selected = cache::select_fraction(&entries, percent, |(k, _, _)| cache::key_hash(k));
            let mut mismatches = Vec::new();
            for (key, payload, path) in selected.iter() {
                let fresh = compute(key)?;
                if serde_json::to_vec(&fresh).unwrap() != serde_json::to_vec(payload).unwrap() {
                    mismatches.push(path.display().to_string());
                }
            }
            let doc = json!({
                "schema": "verify-cache/1",
                "entries": entries.len(),
                "checked": selected.len(),
                "mismatches": mismatches,
            });
            let code = if doc["mismatches"].as_array().unwrap().is_empty() { 0 } else { 4 };
            Ok((doc, code))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // best effort; a failure here only means the pool was already built
        let _ = rayon_thread_pool(threads);
    }
    let out = cli.out.clone();
    match run(cli) {
        Ok((doc, code)) => {
            let text = serde_json::to_string_pretty(&doc).expect("serializable");
            println!("{text}");
            if let Some(path) = out {
                if let Err(e) = std::fs::write(&path, text.as_bytes()) {
                    eprintln!("error: write {}: {e}", path.display());
                    return ExitCode::from(4);
                }
            }
            ExitCode::from(code)
        }
        Err(e) => {
            let doc = json!({ "error": e.msg, "exit": e.code });
            eprintln!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
            ExitCode::from(e.code)
        }
    }
}

fn rayon_thread_pool(threads: usize) -> Result<(), String> {
    finq_core::configure_threads(threads)
}
