//! Command bodies, writing to any output so they can be tested directly.

use std::fmt;
use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;

use anyhow::Context;

use smcqa::text::RawText;
use smcqa::{answer, stats, Model, ModelConfig, Reply, Summary};

/// A failed command, classified by exit status.
#[derive(Debug)]
pub enum Failure {
    /// Bad corpus, configuration or arguments.
    Input(anyhow::Error),
    /// Missing, corrupt or incompatible model.
    Model(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) => 2,
            Failure::Model(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(e) | Failure::Model(e) => {
                // library errors already embed their source in the message
                let mut shown = String::new();
                for cause in e.chain().map(|c| c.to_string()) {
                    if shown.ends_with(&cause) {
                        continue;
                    }
                    if !shown.is_empty() {
                        shown.push_str(": ");
                    }
                    shown.push_str(&cause);
                }
                f.write_str(&shown)
            }
        }
    }
}

impl std::error::Error for Failure {}

pub type Outcome<T = ()> = std::result::Result<T, Failure>;

fn input<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Input(e.into())
}

pub fn load_model(path: &Path) -> Outcome<Model> {
    Model::load(path)
        .with_context(|| format!("loading model {}", path.display()))
        .map_err(Failure::Model)
}

pub fn ingest(
    corpus: &Path,
    config: Option<&Path>,
    out: &Path,
    w: &mut impl Write,
) -> Outcome<Summary> {
    let config = match config {
        Some(path) => {
            ModelConfig::load(path).with_context(|| format!("reading config {}", path.display()))
        }
        None => Ok(ModelConfig::default()),
    }
    .map_err(input)?;
    let text = fs::read_to_string(corpus)
        .with_context(|| format!("reading corpus {}", corpus.display()))
        .map_err(input)?;
    let source_id = corpus
        .file_name()
        .map_or_else(String::new, |n| n.to_string_lossy().into_owned());

    let model = Model::build(&RawText::new(text, source_id), &config).map_err(input)?;
    model
        .save(out)
        .with_context(|| format!("writing model {}", out.display()))
        .map_err(input)?;
    writeln!(w, "{}", model.summary).map_err(input)?;
    writeln!(w, "model written to {}", out.display()).map_err(input)?;
    Ok(model.summary)
}

pub fn stats(model: &Path, outdir: &Path, w: &mut impl Write) -> Outcome {
    let model = load_model(model)?;
    let files = stats::export(&model, outdir)
        .with_context(|| format!("writing statistics to {}", outdir.display()))
        .map_err(input)?;
    for file in files {
        writeln!(w, "{}", file.display()).map_err(input)?;
    }
    Ok(())
}

fn check_top_k(top_k: usize) -> Outcome<usize> {
    if top_k == 0 {
        return Err(input(anyhow::anyhow!("--top-k must be at least 1")));
    }
    Ok(top_k)
}

/// Prints every answer as `relevance  text`, or the fallback text.
pub fn print_reply(reply: &Reply, w: &mut impl Write) -> std::io::Result<()> {
    match reply {
        Reply::Answers { answers } => {
            for a in answers {
                writeln!(w, "{:.2}  {}", a.relative_relevance, a.text)?;
            }
        }
        Reply::Fallback { fallback } => writeln!(w, "{fallback}")?,
    }
    Ok(())
}

pub fn ask(model: &Path, question: &str, top_k: Option<usize>, w: &mut impl Write) -> Outcome {
    let model = load_model(model)?;
    let top_k = check_top_k(top_k.unwrap_or(model.config.top_k))?;
    print_reply(&answer(question, &model, top_k), w).map_err(input)
}

/// One question per line; answers with the best paragraph only. "exit" or
/// end of input quits.
pub fn repl(model: &Path, lines: impl BufRead, w: &mut impl Write) -> Outcome {
    let model = load_model(model)?;
    let io = |r: std::io::Result<()>| r.map_err(input);
    io(write!(w, "> ").and_then(|_| w.flush()))?;
    for line in lines.lines() {
        let line = line.map_err(input)?;
        let question = line.trim();
        if question == "exit" {
            break;
        }
        if !question.is_empty() {
            io(print_reply(&answer(question, &model, 1), w))?;
        }
        io(write!(w, "> ").and_then(|_| w.flush()))?;
    }
    io(writeln!(w))
}
