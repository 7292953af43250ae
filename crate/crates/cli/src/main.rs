use std::io;
use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use smcqa_cli::commands::{self, Failure, Outcome};

/// Answer questions about a medication leaflet.
#[derive(Parser)]
#[command(name = "smcqa", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a model from a plain-text leaflet.
    Ingest {
        corpus: PathBuf,
        /// JSON configuration; missing fields take default values.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "model.json")]
        out: PathBuf,
    },
    /// Export frequency, distance and cluster tables as CSV.
    Stats {
        model: PathBuf,
        #[arg(long, default_value = "stats")]
        outdir: PathBuf,
    },
    /// Answer a single question.
    Ask {
        model: PathBuf,
        question: String,
        #[arg(long)]
        top_k: Option<usize>,
    },
    /// Answer questions read line by line from standard input.
    Repl { model: PathBuf },
    /// Serve the HTTP JSON API.
    Serve {
        model: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
    },
}

fn run(command: Command) -> Outcome {
    let mut out = io::stdout().lock();
    match command {
        Command::Ingest {
            corpus,
            config,
            out: path,
        } => commands::ingest(&corpus, config.as_deref(), &path, &mut out).map(drop),
        Command::Stats { model, outdir } => commands::stats(&model, &outdir, &mut out),
        Command::Ask {
            model,
            question,
            top_k,
        } => commands::ask(&model, &question, top_k, &mut out),
        Command::Repl { model } => commands::repl(&model, io::stdin().lock(), &mut out),
        Command::Serve { model, port, host } => {
            let model = commands::load_model(&model)?;
            let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::Input(e.into()))?;
            runtime
                .block_on(smcqa_cli::api::serve(
                    model,
                    SocketAddr::new(host, port),
                    smcqa_cli::api::interrupt(),
                ))
                .map_err(|e| {
                    Failure::Input(
                        anyhow::Error::new(e).context(format!("serving on {host}:{port}")),
                    )
                })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code() as u8)
        }
    }
}
