//! Command-line front end for batch runs: `bound`, `code`, `verify`,
//! `simulate`.
//!
//! Every subcommand reads JSON, writes JSON (stdout or `--out`, atomically
//! via a temp file and rename), records the seed it ran with, and derives
//! all randomness from that one seed — identical inputs and flags
//! reproduce identical bytes.  Exit codes are scriptable: `0` success
//! (including a "capacity zero" outcome), `2` unusable input, `3` a
//! randomized construction ran out of retries (usually a too-small `--q`).

use crate::bound::{best_bound, cut_bound, recommended_prime, uniform_bound, CutBoundReport};
use crate::code::{
    construct_code, empirical_failure_rate, exhaustive_secrecy_check, recommended_code_prime,
    simulate_with_delay, verify_code, LinearCode,
};
use crate::network::{
    build_upper_bounding_network, canonical_cut, parse_network, restrict_wiretap_sets, Network,
    WiretapModel,
};
use crate::rankmax::DEFAULT_ENUM_CAP;
use crate::seed::SeedStream;
use crate::{Error, Result};
use clap::{ArgAction, Parser, Subcommand};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

/// Parsed invocation: one subcommand plus the knobs shared by all of them.
#[derive(Debug, Parser)]
#[command(
    name = "revcut",
    version,
    about = "Cut-set secrecy bounds, and codes achieving them, for networks with backward edges"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Cmd,

    /// Root seed; every random draw in the run derives from it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Write the result here instead of stdout (temp file + rename).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Increase log detail (-v info, -vv debug, -vvv trace).
    #[arg(short, long, global = true, action = ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Evaluate the secrecy bound on every cut of a network (or one --cut).
    Bound {
        /// Network JSON file.
        input: PathBuf,
        /// Prime field size; defaults to one large enough to certify ranks.
        #[arg(long)]
        q: Option<u64>,
        /// Only the cut with exactly these source-side nodes.
        #[arg(long, value_delimiter = ',')]
        cut: Option<Vec<String>>,
        /// Refuse networks with more nodes than this.
        #[arg(long, default_value_t = 20)]
        node_cap: usize,
    },
    /// Construct and certify a code meeting the bound on the bounding network.
    Code {
        /// Network JSON file.
        input: PathBuf,
        /// Prime field size; defaults to one above both certification thresholds.
        #[arg(long)]
        q: Option<u64>,
        /// Build for the cut with exactly these source-side nodes.
        #[arg(long, value_delimiter = ',')]
        cut: Option<Vec<String>>,
        /// Refuse networks with more nodes than this.
        #[arg(long, default_value_t = 20)]
        node_cap: usize,
        /// State-space cap for the exhaustive secrecy check.
        #[arg(long, default_value_t = DEFAULT_ENUM_CAP)]
        enum_cap: u64,
        /// Also sample this many raw draws for the failure-rate envelope.
        #[arg(long, default_value_t = 0)]
        trials: u64,
    },
    /// Re-verify a stored code (exhaustively when the state space allows).
    Verify {
        /// Code JSON as written by `code`, or a bare code object.
        input: PathBuf,
        /// State-space cap for the exhaustive secrecy check.
        #[arg(long, default_value_t = DEFAULT_ENUM_CAP)]
        enum_cap: u64,
    },
    /// Run the unit-delay schedule on a stored code and audit each trace.
    Simulate {
        /// Code JSON as written by `code`, or a bare code object.
        input: PathBuf,
        /// Rounds per trace (at least 2).
        #[arg(long = "T", default_value_t = 10)]
        t_rounds: usize,
        /// Independent traces, one JSON line each.
        #[arg(long, default_value_t = 1)]
        trials: u64,
    },
}

/// Binary entry point; returns the process exit code.
pub fn run() -> i32 {
    match RunConfig::try_parse() {
        Ok(config) => run_config(config),
        Err(e) => {
            let failed = e.use_stderr();
            let _ = e.print();
            if failed {
                2
            } else {
                0 // --help / --version
            }
        }
    }
}

/// Runs an already-parsed invocation; returns the process exit code.
pub fn run_config(config: RunConfig) -> i32 {
    init_logging(config.verbose);
    match execute(&config) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => "warn",
        1 => "info",
        2 => "debug",
        _ => "trace",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .try_init();
}

/// `3` when a randomized construction exhausted its retries, `2` otherwise.
fn exit_code(err: &Error) -> i32 {
    match err {
        Error::RetriesExhausted { .. } | Error::NoSimultaneousMaximizer { .. } => 3,
        _ => 2,
    }
}

fn execute(config: &RunConfig) -> Result<()> {
    match &config.command {
        Cmd::Bound {
            input,
            q,
            cut,
            node_cap,
        } => cmd_bound(config, input, *q, cut.as_deref(), *node_cap),
        Cmd::Code {
            input,
            q,
            cut,
            node_cap,
            enum_cap,
            trials,
        } => cmd_code(config, input, *q, cut.as_deref(), *node_cap, *enum_cap, *trials),
        Cmd::Verify { input, enum_cap } => cmd_verify(config, input, *enum_cap),
        Cmd::Simulate {
            input,
            t_rounds,
            trials,
        } => cmd_simulate(config, input, *t_rounds, *trials),
    }
}

/// Writes `text` to `--out` (atomically) or stdout.
fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => {
            let mut tmp = path.as_os_str().to_owned();
            tmp.push(".tmp");
            let tmp = PathBuf::from(tmp);
            std::fs::write(&tmp, text)?;
            std::fs::rename(&tmp, path)?;
            Ok(())
        }
    }
}

fn pretty(doc: &Value) -> Result<String> {
    Ok(serde_json::to_string_pretty(doc)? + "\n")
}

/// Bound report for one user-selected cut.  Uniform models go through the
/// subset-minimum route so the report carries `k_b`; when `z` exceeds the
/// cut's unit edges, falls back to the clamped per-set route.
fn single_cut_report(
    net: &Network,
    model: &WiretapModel,
    members: &[String],
    q: u64,
    seed: SeedStream,
) -> Result<CutBoundReport> {
    let cut = net.cut_from_members(members)?;
    match model {
        WiretapModel::Uniform { z } => match uniform_bound(net, &cut, *z, q, seed) {
            Ok(report) => Ok(report),
            Err(Error::ZTooLarge { .. }) => {
                let sets = restrict_wiretap_sets(model, net, &cut);
                cut_bound(net, &cut, &sets, q, seed)
            }
            Err(e) => Err(e),
        },
        WiretapModel::Explicit { .. } => {
            let sets = restrict_wiretap_sets(model, net, &cut);
            cut_bound(net, &cut, &sets, q, seed)
        }
    }
}

fn cmd_bound(
    config: &RunConfig,
    input: &Path,
    q: Option<u64>,
    cut: Option<&[String]>,
    node_cap: usize,
) -> Result<()> {
    let text = std::fs::read_to_string(input)?;
    let (net, model) = parse_network(&text)?;
    let q = match q {
        Some(q) => q,
        None => recommended_prime(&net, &model, node_cap)?,
    };
    let seed = SeedStream::new(config.seed);
    let (value, raw_value, best_cut, reports) = match cut {
        Some(members) => {
            let report = single_cut_report(&net, &model, members, q, seed)?;
            (report.value, report.raw_value, 0, vec![report])
        }
        None => {
            let best = best_bound(&net, &model, q, seed, node_cap)?;
            (best.value, best.raw_value, best.best_cut, best.reports)
        }
    };
    let doc = json!({
        "command": "bound",
        "input": input.display().to_string(),
        "seed": config.seed,
        "q": q,
        "node_cap": node_cap,
        "cut": cut.map(|m| m.to_vec()),
        "value": value,
        "raw_value": raw_value,
        "best_cut": best_cut,
        "reports": reports,
    });
    emit(&config.out, &pretty(&doc)?)
}

fn cmd_code(
    config: &RunConfig,
    input: &Path,
    q: Option<u64>,
    cut: Option<&[String]>,
    node_cap: usize,
    enum_cap: u64,
    trials: u64,
) -> Result<()> {
    let text = std::fs::read_to_string(input)?;
    let (net, model) = parse_network(&text)?;
    let q = match q {
        Some(q) => q,
        None => recommended_code_prime(&net, &model, node_cap)?,
    };
    let seed = SeedStream::new(config.seed);

    // the cut whose bound the code must meet: user-selected or the argmin
    let original = match cut {
        Some(members) => single_cut_report(&net, &model, members, q, seed.child(0))?,
        None => {
            let mut best = best_bound(&net, &model, q, seed.child(0), node_cap)?;
            best.reports.swap_remove(best.best_cut)
        }
    };
    if original.value == 0 {
        println!(
            "capacity zero, no code emitted (bound 0 at cut {{{}}})",
            original.cut.v.join(", ")
        );
        return Ok(());
    }

    // lift the cut to its upper-bounding network and recertify there
    let chosen = net
        .cut_from_mask(original.cut.bitmask.parse().expect("bitmask we just wrote"))
        .expect("cut we just evaluated");
    let (gbar, gmodel) = build_upper_bounding_network(&net, &model, &chosen);
    let gcut = canonical_cut(&gbar)?;
    let sets = restrict_wiretap_sets(&gmodel, &gbar, &gcut);
    let greport = cut_bound(&gbar, &gcut, &sets, q, seed.child(1))?;

    let (code, mut verdict) = match construct_code(&greport, seed.child(2)) {
        Ok(pair) => pair,
        Err(Error::NoSecrecyCapacity { .. }) => {
            println!("capacity zero, no code emitted");
            return Ok(());
        }
        Err(Error::RetriesExhausted {
            q,
            attempts,
            diagnostics,
        }) => {
            return Err(Error::RetriesExhausted {
                q,
                attempts,
                diagnostics: format!(
                    "{diagnostics}; q={q} is likely below the certified success \
                     threshold, retry with a larger --q"
                ),
            })
        }
        Err(e) => return Err(e),
    };
    if code.r_s as u64 != original.value {
        return Err(Error::Validation(format!(
            "constructed rate {} does not match the cut bound {}",
            code.r_s, original.value
        )));
    }
    match exhaustive_secrecy_check(&code, enum_cap) {
        Ok(per_set) => verdict.secure_exhaustive = Some(per_set.iter().all(|&s| s)),
        Err(Error::TooLarge { states, cap }) => {
            log::info!("state space {states} above the cap {cap}; exhaustive check skipped")
        }
        Err(e) => return Err(e),
    }
    let failure_stats = match trials {
        0 => None,
        n => Some(empirical_failure_rate(&greport, n, seed.child(3))?),
    };

    let members: Vec<String> = chosen
        .members()
        .iter()
        .map(|&n| net.node_id(n).to_string())
        .collect();
    let gbar_doc = gbar.to_document(
        &gmodel,
        Some(json!({
            "from": input.display().to_string(),
            "cut": members,
            "seed": config.seed,
        })),
    );
    let doc = json!({
        "command": "code",
        "input": input.display().to_string(),
        "seed": config.seed,
        "q": q,
        "node_cap": node_cap,
        "enum_cap": enum_cap,
        "trials": trials,
        "original": { "value": original.value, "report": original },
        "gbar": gbar_doc,
        "bound": greport,
        "code": code,
        "verdict": verdict,
        "failure_stats": failure_stats,
    });
    emit(&config.out, &pretty(&doc)?)
}

/// Accepts either a full `code` output document or a bare code object.
fn extract_code(text: &str) -> Result<LinearCode> {
    let value: Value = serde_json::from_str(text)?;
    let code_value = match value.get("code") {
        Some(inner) => inner.clone(),
        None => value,
    };
    Ok(serde_json::from_value(code_value)?)
}

fn cmd_verify(config: &RunConfig, input: &Path, enum_cap: u64) -> Result<()> {
    let code = extract_code(&std::fs::read_to_string(input)?)?;
    let mut verdict = verify_code(&code)?;
    let (exhaustive_per_set, skipped) = match exhaustive_secrecy_check(&code, enum_cap) {
        Ok(per_set) => {
            verdict.secure_exhaustive = Some(per_set.iter().all(|&s| s));
            (Some(per_set), false)
        }
        Err(Error::TooLarge { states, cap }) => {
            log::warn!("state space {states} above the cap {cap}; algebraic verdict only");
            (None, true)
        }
        Err(e) => return Err(e),
    };

    let edge_name = |row: usize| {
        if row < code.x {
            code.forward_edges[row].clone()
        } else {
            code.backward_edges[row - code.x].clone()
        }
    };
    let failing_sets: Vec<Value> = code
        .wiretap_rows
        .iter()
        .enumerate()
        .filter(|(i, _)| {
            !verdict.per_set_secure[*i]
                || exhaustive_per_set.as_ref().is_some_and(|v| !v[*i])
        })
        .map(|(i, set)| {
            json!({
                "index": i,
                "edges": set.iter().map(|&r| edge_name(r)).collect::<Vec<_>>(),
            })
        })
        .collect();
    let secure =
        verdict.decodable && verdict.secure_algebraic && verdict.secure_exhaustive.unwrap_or(true);

    let doc = json!({
        "command": "verify",
        "input": input.display().to_string(),
        "seed": config.seed,
        "enum_cap": enum_cap,
        "verdict": verdict,
        "exhaustive_per_set": exhaustive_per_set,
        "exhaustive_skipped": skipped,
        "failing_sets": failing_sets,
        "secure": secure,
    });
    emit(&config.out, &pretty(&doc)?)
}

fn cmd_simulate(config: &RunConfig, input: &Path, t_rounds: usize, trials: u64) -> Result<()> {
    let code = extract_code(&std::fs::read_to_string(input)?)?;
    let seed = SeedStream::new(config.seed);
    let trials = trials.max(1);
    let mut lines = Vec::new();
    let mut causality_ok = true;
    let mut security_ok = true;
    let mut rate = None;
    for trial in 0..trials {
        let trace = simulate_with_delay(&code, t_rounds, seed.child(trial))?;
        causality_ok &= trace.causality_ok;
        security_ok &= trace.security_ok;
        rate = Some(trace.effective_rate);
        lines.push(serde_json::to_string(&json!({ "trial": trial, "trace": trace }))?);
    }
    let rate = rate.expect("at least one trial ran");
    let summary = json!({
        "command": "simulate",
        "input": input.display().to_string(),
        "seed": config.seed,
        "t_rounds": t_rounds,
        "trials": trials,
        "effective_rate": rate,
        "rate": rate.as_f64(),
        "message_symbols_per_round": code.r_s,
        "causality_ok": causality_ok,
        "security_ok": security_ok,
    });
    lines.push(serde_json::to_string(&summary)?);
    emit(&config.out, &(lines.join("\n") + "\n"))
}
