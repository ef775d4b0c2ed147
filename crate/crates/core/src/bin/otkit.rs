use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use otkit::bench::{bench_compare, bench_np, bench_supersonic, reference_footer};
use otkit::dq::MessageDatabase;
use otkit::harness::{run_session, Protocol, SessionConfig, Tamper};
use otkit::primitives::ByteString;
use otkit::verify::{run_verify, VerifyOptions};

const EXIT_USAGE: u8 = 2;
const EXIT_ABORT: u8 = 3;
const EXIT_VERIFY: u8 = 4;

#[derive(Parser)]
#[command(name = "otkit", version, about = "Delegated, unknown-query and Supersonic oblivious transfer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one protocol session and print the receiver's output as hex.
    Run(RunArgs),
    /// Run the exhaustive correctness checks.
    Verify(VerifyArgs),
    /// Time Supersonic, Naor-Pinkas, or both side by side.
    Bench(BenchArgs),
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Message length in bits.
    #[arg(long, default_value_t = 128)]
    sigma: usize,
    /// Tag length in bits.
    #[arg(long, default_value_t = 128)]
    lambda: usize,
    /// Bit length of the subgroup order q.
    #[arg(long = "group-bits", default_value_t = 512)]
    group_bits: u64,
    #[arg(long = "paillier-bits", default_value_t = 1024)]
    paillier_bits: u64,
    /// Use the toy group P = 23.
    #[arg(long)]
    toy: bool,
}

#[derive(Args)]
struct RunArgs {
    #[arg(value_parser = clap::value_parser!(Protocol))]
    protocol: Protocol,
    #[command(flatten)]
    common: Common,
    /// Receiver's index (issuer's index for the unknown-query protocols).
    #[arg(long, default_value_t = 0)]
    s: u64,
    /// Record index for the multi-receiver protocols.
    #[arg(long, default_value_t = 0)]
    v: usize,
    #[arg(long)]
    m0: Option<String>,
    #[arg(long)]
    m1: Option<String>,
    /// Comma-separated hex messages (compiled-np accepts more than two).
    #[arg(long, value_delimiter = ',')]
    messages: Vec<String>,
    /// Database file: one record per line, two hex fields.
    #[arg(long)]
    db: Option<PathBuf>,
    /// Generated database size when no --db is given.
    #[arg(long, default_value_t = 4)]
    z: usize,
    #[arg(long, value_enum)]
    tamper: Option<TamperArg>,
    /// Write the transcript as line-delimited JSON.
    #[arg(long)]
    transcript: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TamperArg {
    /// Same as beta0.
    Beta,
    Beta0,
    Beta1,
    Tag,
}

impl From<TamperArg> for Tamper {
    fn from(t: TamperArg) -> Self {
        match t {
            TamperArg::Beta | TamperArg::Beta0 => Tamper::Beta0,
            TamperArg::Beta1 => Tamper::Beta1,
            TamperArg::Tag => Tamper::Tag,
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// Small parameters; finishes in a few seconds.
    #[arg(long)]
    toy: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Additionally run tampered sessions and report whether they abort.
    #[arg(long = "inject-tamper", value_enum)]
    inject_tamper: Option<TamperArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchTarget {
    Supersonic,
    Np,
    Compare,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(value_enum)]
    target: BenchTarget,
    #[arg(long, default_value_t = 1000)]
    iters: u64,
    /// Naor-Pinkas iterations in compare mode (defaults to --iters).
    #[arg(long = "np-iters")]
    np_iters: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 128)]
    sigma: usize,
    #[arg(long = "group-bits", default_value_t = 2048)]
    group_bits: u64,
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("usage error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn build_config(args: &RunArgs) -> Result<SessionConfig, String> {
    let sigma_bytes = args.common.sigma / 8;
    let hex = |s: &str| ByteString::from_hex_padded(s, sigma_bytes).map_err(|e| format!("message {s:?}: {e}"));
    let mut messages = Vec::new();
    match (&args.m0, &args.m1) {
        (Some(m0), Some(m1)) => messages = vec![hex(m0)?, hex(m1)?],
        (None, None) => {}
        _ => return Err("--m0 and --m1 go together".into()),
    }
    if !args.messages.is_empty() {
        if !messages.is_empty() {
            return Err("use either --m0/--m1 or --messages".into());
        }
        messages = args.messages.iter().map(|m| hex(m)).collect::<Result<_, _>>()?;
    }
    let db = match &args.db {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            Some(MessageDatabase::parse_text(&text, sigma_bytes).map_err(|e| format!("{}: {e}", path.display()))?)
        }
        None => None,
    };
    Ok(SessionConfig {
        protocol: args.protocol,
        seed: args.common.seed,
        toy: args.common.toy,
        group_bits: args.common.group_bits,
        sigma_bits: args.common.sigma,
        lambda_bits: args.common.lambda,
        paillier_bits: args.common.paillier_bits,
        s: args.s,
        v: args.v,
        messages,
        db,
        z: args.z,
        tamper: args.tamper.map(Tamper::from),
    })
}

fn cmd_run(args: RunArgs) -> ExitCode {
    let config = match build_config(&args) {
        Ok(c) => c,
        Err(e) => return usage(e),
    };
    let transcript = match run_session(&config) {
        Ok(t) => t,
        Err(e) => return usage(format!("{} ({e})", e.name())),
    };
    if let Some(path) = &args.transcript {
        if let Err(e) = std::fs::write(path, transcript.to_jsonl()) {
            eprintln!("cannot write {}: {e}", path.display());
            return ExitCode::FAILURE;
        }
    }
    match (transcript.receiver_value(), transcript.failure()) {
        (Some(m), _) => {
            println!("{}", m.to_hex());
            ExitCode::SUCCESS
        }
        (None, Some((role, e))) => {
            eprintln!("{}: {role} aborted ({e})", e.name());
            ExitCode::from(EXIT_ABORT)
        }
        (None, None) => {
            eprintln!("session ended without output");
            ExitCode::from(EXIT_ABORT)
        }
    }
}

fn cmd_verify(args: VerifyArgs) -> ExitCode {
    let report = run_verify(&VerifyOptions {
        toy: args.toy,
        seed: args.seed,
        inject_tamper: args.inject_tamper.map(Tamper::from),
    });
    print!("{}", report.render());
    if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFY)
    }
}

fn cmd_bench(args: BenchArgs) -> ExitCode {
    if args.iters == 0 {
        return usage("--iters must be at least 1");
    }
    let text = match args.target {
        BenchTarget::Supersonic => bench_supersonic(args.iters, args.sigma, args.seed).map(|r| r.render()),
        BenchTarget::Np => bench_np(args.iters, args.sigma, args.group_bits, args.seed).map(|r| r.render()),
        BenchTarget::Compare => {
            let np_iters = args.np_iters.unwrap_or(args.iters);
            if np_iters == 0 {
                return usage("--np-iters must be at least 1");
            }
            bench_compare(args.iters, np_iters, args.sigma, args.group_bits, args.seed).map(|c| c.render())
        }
    };
    match text {
        Ok(text) => {
            print!("{text}");
            println!("{}", reference_footer());
            ExitCode::SUCCESS
        }
        Err(e) => usage(format!("{} ({e})", e.name())),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Bench(args) => cmd_bench(args),
    }
}
