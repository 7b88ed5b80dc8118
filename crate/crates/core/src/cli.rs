//! The `locc` command tree.
//!
//! Exit status is 0 on success, 1 when a verification check fails, and 2
//! on invalid input.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::audit::{
    audit_with_tol, blank_insufficiency, classify_all, classify_pair_with_tol, lemma_scan_seeded,
};
use crate::catalog::{GhzLabel, StateSpec, WBasisIndex, WClassParams};
use crate::error::{Error, Result};
use crate::ghz::{all_pairs, all_triples, triple_clonability};
use crate::measures::{cut_entropy, negativity};
use crate::register::{Bipartition, StateVector};
use crate::report::{
    clone_result, emit_report, emit_section, full_report, Format, Measurement, ReportBundle,
    RunConfig,
};

#[derive(Debug, Parser)]
#[command(
    name = "locc",
    version,
    about = "Local cloning analyses for GHZ and W bases"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    #[arg(long, global = true, value_enum, default_value = "table")]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for the random cross-checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Rank / support tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 1e-9)]
    fidelity_tol: f64,
    /// Allowed gap to published negativities.
    #[arg(long, global = true, default_value_t = 1e-3)]
    match_tol: f64,
    /// Grid step of the entropy scan.
    #[arg(long, global = true, default_value_t = 0.02)]
    step: f64,
    /// L1 radius around the W point left out of the scan.
    #[arg(long, global = true, default_value_t = 0.05)]
    radius: f64,
}

impl GlobalArgs {
    fn config(&self) -> RunConfig {
        RunConfig {
            rank_tol: self.tol,
            fidelity_tol: self.fidelity_tol,
            match_tol: self.match_tol,
            step: self.step,
            radius: self.radius,
            seed: self.seed,
            format: self.format,
            out: self.out.clone(),
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// GHZ-basis cloning.
    Ghz {
        #[command(subcommand)]
        cmd: GhzCmd,
    },
    /// W-basis pair analysis.
    W {
        #[command(subcommand)]
        cmd: WCmd,
    },
    /// Entanglement measures of a single state.
    Measure {
        #[command(subcommand)]
        cmd: MeasureCmd,
    },
    /// Every analysis in one bundle.
    Report,
}

#[derive(Debug, Subcommand)]
enum GhzCmd {
    /// Synthesize and verify a cloner for two or three labels `p,i,j`.
    Clone {
        #[arg(long, num_args = 2..=3, required = true)]
        states: Vec<String>,
        #[arg(long, default_value = "0,0,0")]
        blank: String,
    },
    /// Clonability verdicts for triples.
    Triples {
        #[arg(long, conflicts_with = "states")]
        all: bool,
        #[arg(long, num_args = 3)]
        states: Option<Vec<String>>,
    },
    /// Cloners for all 28 pairs.
    Pairs,
}

#[derive(Debug, Subcommand)]
enum WCmd {
    /// Pair taxonomy.
    Classify {
        #[arg(long, conflicts_with = "pair")]
        all: bool,
        #[arg(long)]
        pair: Option<String>,
    },
    /// Negativity before and after ideal cloning.
    Audit {
        #[arg(long)]
        pair: Option<String>,
        #[arg(long, default_value = "W1")]
        blank: String,
    },
    /// Grid scan of W-class cut entropies.
    Lemma,
    /// Certificate that a W-class blank is too weakly entangled.
    BlankCheck {
        #[arg(long)]
        params: String,
    },
}

#[derive(Debug, Subcommand)]
enum MeasureCmd {
    Entropy(MeasureArgs),
    Negativity(MeasureArgs),
}

#[derive(Debug, Args)]
struct MeasureArgs {
    /// Catalog state (`W3`, `0,1,1`, `a,b,c`) or `@file.json` amplitudes.
    #[arg(long)]
    state: String,
    /// One-based qubits on side B, comma separated.
    #[arg(long)]
    cut: String,
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NoCircuitFound(_) | Error::InconsistentVerdict(_) | Error::StructureMismatch(_) => 1,
        _ => 2,
    }
}

fn parse_pair(text: &str) -> Result<(WBasisIndex, WBasisIndex)> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [m, n] = parts[..] else {
        return Err(Error::BadLabel(format!("pair {text:?} is not m,n")));
    };
    let (m, n): (WBasisIndex, WBasisIndex) = (m.parse()?, n.parse()?);
    if m == n {
        return Err(Error::InvalidInput(format!(
            "pair ({m}, {n}) repeats a state"
        )));
    }
    Ok((m.min(n), m.max(n)))
}

fn parse_labels(texts: &[String]) -> Result<Vec<GhzLabel>> {
    texts.iter().map(|s| s.parse()).collect()
}

fn load_state(text: &str) -> Result<StateVector> {
    match text.strip_prefix('@') {
        Some(path) => StateVector::from_json(&std::fs::read_to_string(path)?),
        None => Ok(text.parse::<StateSpec>()?.state()),
    }
}

fn parse_cut(text: &str, n_qubits: usize) -> Result<Bipartition> {
    let side_b = text
        .split(',')
        .map(|t| match t.trim().parse::<usize>() {
            Ok(q) if q >= 1 => Ok(q - 1),
            _ => Err(Error::BadCut(format!("{t:?} is not a one-based qubit"))),
        })
        .collect::<Result<Vec<_>>>()?;
    Bipartition::new(n_qubits, &side_b)
}

/// The bundle a command produced and the section it reports in JSON.
fn execute(cli: &Cli) -> Result<(ReportBundle, Option<&'static str>)> {
    let config = cli.global.config();
    config.validate()?;
    let tol = config.rank_tol;
    let mut bundle = ReportBundle::new(config.clone());
    let section = match &cli.command {
        Command::Report => return Ok((full_report(config)?, None)),
        Command::Ghz { cmd } => match cmd {
            GhzCmd::Clone { states, blank } => {
                let result =
                    clone_result(&parse_labels(states)?, blank.parse()?, config.fidelity_tol)?;
                bundle.add_clone(result);
                "ghz_clone"
            }
            GhzCmd::Triples { states, .. } => {
                let triples = match states {
                    Some(s) => {
                        let labels = parse_labels(s)?;
                        vec![[labels[0], labels[1], labels[2]]]
                    }
                    None => all_triples(),
                };
                for t in triples {
                    bundle.ghz_triples.push(triple_clonability(&t)?);
                }
                "ghz_triples"
            }
            GhzCmd::Pairs => {
                let blank = GhzLabel::new(0, 0, 0)?;
                for pair in all_pairs() {
                    let result = clone_result(&pair, blank, config.fidelity_tol)?;
                    if !result.verified {
                        bundle
                            .discrepancies
                            .push(format!("GHZ pair ({}), ({}) not cloned", pair[0], pair[1]));
                    }
                    bundle.ghz_pairs.push(result);
                }
                "ghz_pairs"
            }
        },
        Command::W { cmd } => match cmd {
            WCmd::Classify { pair, .. } => {
                bundle.classifications = match pair {
                    Some(p) => {
                        let (m, n) = parse_pair(p)?;
                        vec![classify_pair_with_tol(m, n, tol)?]
                    }
                    None => classify_all(tol)?,
                };
                "classifications"
            }
            WCmd::Audit { pair, blank } => {
                let blank: WBasisIndex = blank.parse()?;
                let pairs = match pair {
                    Some(p) => vec![parse_pair(p)?],
                    None => WBasisIndex::pairs(),
                };
                let records = pairs
                    .into_iter()
                    .map(|(m, n)| audit_with_tol(m, n, blank, tol))
                    .collect::<Result<Vec<_>>>()?;
                bundle.add_audits(records);
                "pairs"
            }
            WCmd::Lemma => {
                bundle.set_scan(lemma_scan_seeded(config.step, config.radius, config.seed)?);
                "scan"
            }
            WCmd::BlankCheck { params } => {
                let params: WClassParams = params.parse()?;
                bundle.certificates.push(blank_insufficiency(params)?);
                "certificates"
            }
        },
        Command::Measure { cmd } => {
            let (quantity, args) = match cmd {
                MeasureCmd::Entropy(a) => ("entropy", a),
                MeasureCmd::Negativity(a) => ("negativity", a),
            };
            let state = load_state(&args.state)?;
            let cut = parse_cut(&args.cut, state.n_qubits())?;
            let value = match quantity {
                "entropy" => cut_entropy(&state, &cut)?.entropy_bits,
                _ => negativity(&state.density(), &cut)?,
            };
            bundle.measurements.push(Measurement {
                quantity: quantity.into(),
                state: args.state.clone(),
                cut: cut.to_string(),
                value,
            });
            "measurements"
        }
    };
    Ok((bundle, Some(section)))
}

/// Runs `argv` (program name first), writing the report to `out` or the
/// `--out` path and diagnostics to `err`. Returns the exit status.
pub fn run_with_io<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let (bundle, section) = match execute(&cli) {
        Ok(v) => v,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    let format = cli.global.format;
    let bytes = match (format, section) {
        (Format::Json, Some(s)) => emit_section(&bundle, s),
        _ => emit_report(&bundle, format),
    };
    let bytes = match bytes {
        Ok(b) => b,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 1;
        }
    };
    let written = match &cli.global.out {
        Some(path) => std::fs::write(path, &bytes),
        None => out.write_all(&bytes),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: cannot write report: {e}");
        return 2;
    }
    for d in &bundle.discrepancies {
        let _ = writeln!(err, "check failed: {d}");
    }
    if bundle.passed() {
        0
    } else {
        1
    }
}

pub fn run_command(argv: &[String]) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with_io(argv, &mut stdout.lock(), &mut stderr.lock())
}
