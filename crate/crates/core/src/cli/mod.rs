//! Command-line driver.
//!
//! Exit codes: 0 when everything passed, 1 when a verification failed, 2 for
//! invalid configuration, input files, usage, or exceeded caps.

pub mod config;
mod session;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use itertools::Itertools;
use thiserror::Error;

use crate::qstate::{SparseState, StateError};
use crate::schemes::{advance_complete, advance_setup, encode, Decoder, SchemeError, SchemeKind, SchemeParams};
use crate::verify::{
    equivalence_check, leakage_demo_ogawa, strong_security_sweep, Analyzer, CheckLine, CheckStatus, EquivalenceFailure,
    LeakageOutcome, VerifyError, Witness,
};

pub use config::RunConfig;
pub use session::SessionFile;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verify(e) if !e.is_cap() && !matches!(e, VerifyError::Precondition(_)) => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "qramp", version, about = "Exact ramp quantum secret sharing with advance sharing")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// key=value configuration file; flags override its entries
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// ogawa | zm
    #[arg(long, global = true)]
    pub scheme: Option<String>,
    /// field descriptor, e.g. 7^1 or 2^2/1,1,1
    #[arg(long, global = true)]
    pub field: Option<String>,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub k: Option<usize>,
    #[arg(long = "L", global = true)]
    pub l: Option<usize>,
    /// comma-separated evaluation points (canonical integers)
    #[arg(long, global = true)]
    pub alphas: Option<String>,
    /// comma-separated extra points for zm
    #[arg(long, global = true)]
    pub betas: Option<String>,
    /// comma-separated 1-based shares distributed before the secret exists
    #[arg(long, global = true)]
    pub advanced: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long = "cap-kets", global = true)]
    pub cap_kets: Option<u64>,
    #[arg(long = "cap-dm", global = true)]
    pub cap_dm: Option<u64>,
    /// output file (or directory for verify witnesses)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SecretArgs {
    /// basis secret as comma-separated field elements
    #[arg(long, conflicts_with = "secret_file")]
    pub secret: Option<String>,
    /// secret state in qramp-state format
    #[arg(long = "secret-file")]
    pub secret_file: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Encode a secret directly into n shares
    Encode(SecretArgs),
    /// Prepare the resource state and hand out the advanced shares
    Advance,
    /// Finish an advance-sharing session once the secret is known
    Complete {
        #[arg(long)]
        session: PathBuf,
        #[command(flatten)]
        secret: SecretArgs,
    },
    /// Recover the secret from a qualified set of shares
    Reconstruct {
        #[arg(long)]
        state: PathBuf,
        /// comma-separated 1-based share indices
        #[arg(long)]
        subset: String,
    },
    /// Run verification checks
    Verify {
        #[arg(value_enum)]
        which: Which,
        /// seeded superposed secrets per equivalence run
        #[arg(long, default_value_t = 10)]
        superposed: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Equivalence,
    Access,
    Strong,
    MaxAdvance,
    All,
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match execute(cli, &mut out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = load_config(&cli.global)?;
    match cli.command {
        Command::Encode(secret) => cmd_encode(&cfg, &secret, out),
        Command::Advance => cmd_advance(&cfg, out),
        Command::Complete { session, secret } => cmd_complete(&cfg, &session, &secret, out),
        Command::Reconstruct { state, subset } => cmd_reconstruct(&cfg, &state, &subset, out),
        Command::Verify { which, superposed } => cmd_verify(&cfg, which, superposed, out),
    }
}

fn load_config(g: &GlobalArgs) -> Result<RunConfig, CliError> {
    let base = match &g.config {
        Some(path) => RunConfig::from_text(&read(path)?)?,
        None => RunConfig::default(),
    };
    let flags = RunConfig {
        scheme: g
            .scheme
            .as_deref()
            .map(str::parse::<SchemeKind>)
            .transpose()
            .map_err(|e| CliError::Usage(e.to_string()))?,
        field: g.field.clone(),
        n: g.n,
        k: g.k,
        l: g.l,
        alphas: flag_list("alphas", &g.alphas)?,
        betas: flag_list("betas", &g.betas)?,
        advanced: flag_list("advanced", &g.advanced)?,
        seed: g.seed,
        cap_kets: g.cap_kets,
        cap_dm: g.cap_dm,
        out: g.out.clone(),
    };
    Ok(base.merge(flags))
}

fn flag_list<T: std::str::FromStr>(flag: &str, v: &Option<String>) -> Result<Option<Vec<T>>, CliError> {
    v.as_deref().map(config::parse_csv).transpose().map_err(|e| CliError::Usage(format!("--{flag}: {e}")))
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_path_buf(), message: e.to_string() })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io { path: path.to_path_buf(), message: e.to_string() })
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Io { path: PathBuf::from("<stdout>"), message: e.to_string() }
}

fn load_secret(params: &SchemeParams, args: &SecretArgs) -> Result<SparseState, CliError> {
    match (&args.secret, &args.secret_file) {
        (Some(csv), None) => {
            let values: Vec<u32> = config::parse_csv(csv).map_err(|e| CliError::Usage(format!("--secret: {e}")))?;
            let s = params.secret(&values).map_err(|e| CliError::Usage(format!("--secret: {e}")))?;
            Ok(s.to_state(params))
        }
        (None, Some(path)) => {
            let st = SparseState::from_text(&read(path)?)?;
            params.field().same_field(st.field()).map_err(|e| CliError::Usage(format!("secret file: {e}")))?;
            if st.registers() != params.l() {
                return Err(CliError::Usage(format!(
                    "secret file has {} registers, expected L={}",
                    st.registers(),
                    params.l()
                )));
            }
            Ok(st)
        }
        _ => Err(CliError::Usage("provide exactly one of --secret or --secret-file".into())),
    }
}

/// Writes `text` to `--out` or, without it, to stdout.
fn emit_state(cfg: &RunConfig, state: &SparseState, out: &mut dyn Write) -> Result<(), CliError> {
    let summary = format!("kets={} scale_exp={}", state.len(), state.scale_exp());
    match &cfg.out {
        Some(path) => {
            write_file(path, &state.to_text())?;
            writeln!(out, "wrote {}: {summary}", path.display()).map_err(io_err)?;
        }
        None => {
            out.write_all(state.to_text().as_bytes()).map_err(io_err)?;
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn cmd_encode(cfg: &RunConfig, secret: &SecretArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let params = cfg.params()?;
    let secret = load_secret(&params, secret)?;
    emit_state(cfg, &encode(&params, &secret)?, out)?;
    Ok(0)
}

fn cmd_advance(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, CliError> {
    let params = cfg.params()?;
    let advanced = cfg.advanced_shares(&params)?;
    let session = advance_setup(&params, &advanced, cfg.caps().kets)?;
    let file = SessionFile::from_session(&session);
    let text = file.to_text();
    match &cfg.out {
        Some(path) => write_file(path, &text)?,
        None => out.write_all(text.as_bytes()).map_err(io_err)?,
    }
    let shares = |v: &[usize]| v.iter().map(|i| i + 1).join(",");
    let msg = format!(
        "advanced shares {{{}}} distributed; dealer holds resource halves for {{{}}}; resource kets={}",
        shares(session.advanced()),
        shares(session.dealer_held()),
        session.resource().len()
    );
    if cfg.out.is_some() {
        writeln!(out, "{msg}").map_err(io_err)?;
    } else {
        eprintln!("{msg}");
    }
    Ok(0)
}

fn cmd_complete(cfg: &RunConfig, session_path: &Path, secret: &SecretArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let file = SessionFile::from_text(&read(session_path)?)?;
    let session = file.resume(cfg.caps().kets)?;
    let secret = load_secret(session.params(), secret)?;
    emit_state(cfg, &advance_complete(&session, &secret)?, out)?;
    Ok(0)
}

fn cmd_reconstruct(cfg: &RunConfig, state_path: &Path, subset: &str, out: &mut dyn Write) -> Result<i32, CliError> {
    let params = cfg.params()?;
    let state = SparseState::from_text(&read(state_path)?)?;
    let subset: Vec<usize> = config::parse_csv::<usize>(subset)
        .map_err(|e| CliError::Usage(format!("--subset: {e}")))?
        .into_iter()
        .map(|i| config::to_zero_based(i, params.n()))
        .collect::<Result<_, _>>()?;
    let rec = Decoder::new(&params, &subset, cfg.caps().kets)?.reconstruct(&state)?;
    if rec.secret.len() == 1 {
        let ket = rec.secret.support().next().expect("one ket");
        writeln!(out, "secret: {}", ket.iter().join(",")).map_err(io_err)?;
    } else {
        writeln!(out, "secret state:").map_err(io_err)?;
        emit_state(cfg, &rec.secret, out)?;
    }
    Ok(0)
}

fn cmd_verify(cfg: &RunConfig, which: Which, superposed: usize, out: &mut dyn Write) -> Result<i32, CliError> {
    let params = cfg.params()?;
    let caps = cfg.caps();
    let hash = params.params_hash();
    let dir = cfg.out.clone();
    if let Some(d) = &dir {
        fs::create_dir_all(d).map_err(|e| CliError::Io { path: d.clone(), message: e.to_string() })?;
    }
    let want = |w: Which| which == w || which == Which::All;
    let mut lines: Vec<CheckLine> = Vec::new();
    let mut record = |name: &str, status: CheckStatus, artifact: Option<String>| -> Result<(), CliError> {
        let witness_file = match (&dir, artifact) {
            (Some(d), Some(text)) => {
                let path = d.join(format!("{name}-{hash}.witness"));
                write_file(&path, &text)?;
                Some(path.display().to_string())
            }
            _ => None,
        };
        lines.push(CheckLine { name: name.to_string(), params_hash: hash.clone(), status, witness_file });
        Ok(())
    };

    if want(Which::Equivalence) {
        let advanced = cfg.advanced_shares(&params)?;
        let rep = equivalence_check(&params, &advanced, superposed, cfg.seed(), caps)?;
        eprintln!(
            "equivalence: {} basis + {} superposed secrets, {} kets per basis encoding",
            rep.basis_secrets, rep.superposed_secrets, rep.kets_per_basis_state
        );
        match &rep.failure {
            None => record("equivalence", CheckStatus::Pass, None)?,
            Some(f) => record("equivalence", CheckStatus::Fail, Some(failure_text(f)))?,
        }
    }
    let analyzer = if want(Which::Access) || want(Which::MaxAdvance) { Some(Analyzer::new(&params, caps)?) } else { None };
    if want(Which::Access) {
        let rep = analyzer.as_ref().expect("built").access_structure_report()?;
        let table = rep
            .rows
            .iter()
            .map(|r| {
                format!(
                    "{{{}}} {} duality={}\n",
                    r.subset.iter().map(|i| i + 1).join(","),
                    r.verdict,
                    if r.duality_holds { "ok" } else { "broken" }
                )
            })
            .collect::<String>();
        eprint!("{table}");
        let status = if rep.passed() { CheckStatus::Pass } else { CheckStatus::Fail };
        record("access", status, (status == CheckStatus::Fail).then_some(table))?;
    }
    if want(Which::Strong) {
        match params.kind() {
            SchemeKind::Zm => {
                let sweep = strong_security_sweep(&params, caps)?;
                eprintln!("strong: {} (S, T) pairs checked", sweep.pairs_checked);
                match sweep.witness {
                    None => record("strong", CheckStatus::Pass, None)?,
                    Some(w) => record("strong", CheckStatus::Fail, Some(w.to_text()))?,
                }
            }
            SchemeKind::Ogawa => match leakage_demo_ogawa(&params, caps)? {
                LeakageOutcome::Witness(w) => {
                    eprintln!("leakage: shares {} learn secret coordinates {}", one_based(&w.subset), one_based(w.coords.as_deref().unwrap_or(&[])));
                    record("leakage", CheckStatus::Pass, Some(w.to_text()))?
                }
                LeakageOutcome::Inconclusive { pairs_checked } => {
                    eprintln!("leakage: no leak among {pairs_checked} (S, T) pairs");
                    record("leakage", CheckStatus::Inconclusive, None)?
                }
                LeakageOutcome::Vacuous => {
                    eprintln!("leakage: L=1 leaves no proper part of the secret");
                    record("leakage", CheckStatus::Inconclusive, None)?
                }
            },
        }
    }
    if want(Which::MaxAdvance) {
        let rep = analyzer.as_ref().expect("built").max_advance_check()?;
        for f in &rep.failures {
            eprintln!("max-advance: {f}");
        }
        let status = if rep.passed() { CheckStatus::Pass } else { CheckStatus::Fail };
        record("max-advance", status, rep.witness.as_ref().map(Witness::to_text))?;
    }
    drop(record);
    for line in &lines {
        writeln!(out, "{line}").map_err(io_err)?;
    }
    Ok(if lines.iter().any(|l| l.status == CheckStatus::Fail) { 1 } else { 0 })
}

fn one_based(v: &[usize]) -> String {
    format!("{{{}}}", v.iter().map(|i| i + 1).join(","))
}

fn failure_text(f: &EquivalenceFailure) -> String {
    let list = |v: &[crate::qstate::BasisIndex]| v.iter().map(|k| k.iter().join(" ")).join("\n");
    format!(
        "qramp-equivalence-failure v1\n--- secret\n{}--- direct\n{}--- advanced\n{}--- v1 ({} kets)\n{}\n--- v2 ({} kets)\n{}\n",
        f.secret.to_text(),
        f.direct.to_text(),
        f.advanced.to_text(),
        f.v1.len(),
        list(&f.v1),
        f.v2.len(),
        list(&f.v2)
    )
}
