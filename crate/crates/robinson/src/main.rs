//! Command-line front end. Documents go to stdout, diagnostics to stderr.
//! Exit status: 0 on success, 1 when the input is not Robinson, 2 on
//! unreadable, malformed or mismatched input.
//!
//! Points are labelled 1..n in everything printed, matching the rows of the
//! matrix file.

use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};

use robinson::bench::run_bench;
use robinson::document::{translate_document, TreeDocument, TreeKind};
use robinson::generate::{generate, Profile};
use robinson::io::{read_matrix, write_matrix, Layout, Separator};
use robinson::{
    build_dendrogram, mmodule_tree, recognize_robinson, DissimilarityMatrix, Error, Recognition,
};

/// Stack for the worker thread: several constructions recurse once per
/// tree level, and trees over thousands of points can be that deep.
const STACK_BYTES: usize = 512 << 20;

#[derive(Parser)]
#[command(
    name = "robinson",
    version,
    about = "Recognise Robinson dissimilarities and build their trees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a matrix is Robinson; print a compatible order and
    /// the PQ-tree of all compatible orders.
    Recognize {
        /// Matrix file (stdin if omitted or `-`).
        #[arg(short, long)]
        input: Option<PathBuf>,
        #[arg(short, long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Print one tree of a matrix.
    Tree {
        #[arg(short, long)]
        input: Option<PathBuf>,
        #[arg(short, long, value_enum)]
        tree: Kind,
        #[arg(short, long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Translate a PQ-tree document into an mmodule tree or back.
    Translate {
        /// Tree document in JSON (stdin if omitted or `-`).
        #[arg(short, long)]
        input: Option<PathBuf>,
        /// Matrix file the tree belongs to.
        #[arg(short, long)]
        matrix: PathBuf,
        /// Target kind; defaults to the other kind of the input.
        #[arg(long, value_enum)]
        to: Option<Kind>,
        #[arg(short, long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Print a random Robinson matrix with shuffled labels.
    Generate {
        #[arg(short, long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "generic")]
        profile: Profile,
        /// Write only the upper triangle.
        #[arg(long)]
        upper: bool,
    },
    /// Time the constructions on generated instances.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = [256, 512, 1024])]
        sizes: Vec<usize>,
        #[arg(short, long, default_value_t = 5)]
        repetitions: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "generic")]
        profile: Profile,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Pq,
    Mmodule,
    Dendrogram,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Ascii,
}

/// Why a command stopped; selects the exit status.
enum Failure {
    /// The matrix is not Robinson (exit 1).
    Rejected(Error),
    /// Unreadable, malformed or mismatched input (exit 2).
    Invalid(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Invalid(e)
    }
}

type Outcome = Result<(), Failure>;

fn read_text(path: Option<&PathBuf>) -> anyhow::Result<(String, String)> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            let text =
                fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?;
            Ok((p.display().to_string(), text))
        }
        _ => {
            let mut text = String::new();
            std::io::stdin()
                .read_to_string(&mut text)
                .context("cannot read stdin")?;
            Ok(("<stdin>".into(), text))
        }
    }
}

fn load_matrix(path: Option<&PathBuf>) -> anyhow::Result<DissimilarityMatrix> {
    let (name, text) = read_text(path)?;
    read_matrix(&text).map_err(|e| anyhow!("{name}: {e}"))
}

fn invalid(e: Error) -> Failure {
    Failure::Invalid(anyhow!(e.one_based()))
}

fn render(doc: &TreeDocument, format: Format) -> String {
    match format {
        Format::Json => doc.to_json() + "\n",
        Format::Dot => doc.to_dot(),
        Format::Ascii => doc.to_ascii() + "\n",
    }
}

fn recognized(m: &DissimilarityMatrix) -> Result<(robinson::PqTree, Vec<usize>), Failure> {
    match recognize_robinson(m) {
        Recognition::Accepted { tree, order } => Ok((tree, order)),
        Recognition::Rejected { reason } => Err(Failure::Rejected(reason)),
    }
}

fn labels(order: &[usize]) -> Vec<usize> {
    order.iter().map(|x| x + 1).collect()
}

fn tree_document(m: &DissimilarityMatrix, kind: Kind) -> Result<TreeDocument, Failure> {
    Ok(match kind {
        Kind::Dendrogram => {
            let dg = build_dendrogram(m, m.all().as_slice()).map_err(invalid)?;
            TreeDocument::from_dendrogram(&dg, m.scale())
        }
        Kind::Pq => TreeDocument::from_pq(&recognized(m)?.0, Some(m)),
        Kind::Mmodule => {
            recognized(m)?;
            let mt = mmodule_tree(m, &m.all()).map_err(Failure::Rejected)?;
            TreeDocument::from_mmodule(&mt.canonical(), m.scale())
        }
    })
}

fn cmd_recognize(input: Option<&PathBuf>, format: Format) -> Outcome {
    let m = load_matrix(input)?;
    let (tree, order) = recognized(&m)?;
    let doc = TreeDocument::from_pq(&tree, Some(&m));
    match format {
        Format::Json => {
            let out = serde_json::json!({ "robinson": true, "order": labels(&order), "tree": doc });
            println!(
                "{}",
                serde_json::to_string_pretty(&out).expect("documents serialize")
            );
        }
        Format::Dot | Format::Ascii => {
            let order: Vec<String> = labels(&order).iter().map(|x| x.to_string()).collect();
            println!("order: {}", order.join(" "));
            print!("{}", render(&doc, format));
        }
    }
    Ok(())
}

fn cmd_translate(
    input: Option<&PathBuf>,
    matrix: &PathBuf,
    to: Option<Kind>,
    format: Format,
) -> Outcome {
    let m = load_matrix(Some(matrix))?;
    let (name, text) = read_text(input)?;
    let doc = TreeDocument::from_json(&text).map_err(|e| anyhow!("{name}: {e}"))?;
    recognized(&m)?;
    let wanted = match doc.kind {
        TreeKind::Pq => Kind::Mmodule,
        _ => Kind::Pq,
    };
    if doc.kind == TreeKind::Dendrogram || to.is_some_and(|t| t != wanted) {
        return Err(Failure::Invalid(anyhow!(
            "no translation from a {} document to the requested kind (pq <-> mmodule only)",
            doc.kind.name()
        )));
    }
    let out = translate_document(&m, &doc).map_err(|e| anyhow!("{name}: {}", e.one_based()))?;
    print!("{}", render(&out, format));
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Recognize { input, format } => cmd_recognize(input.as_ref(), format),
        Command::Tree {
            input,
            tree,
            format,
        } => {
            let m = load_matrix(input.as_ref())?;
            print!("{}", render(&tree_document(&m, tree)?, format));
            Ok(())
        }
        Command::Translate {
            input,
            matrix,
            to,
            format,
        } => cmd_translate(input.as_ref(), &matrix, to, format),
        Command::Generate {
            n,
            seed,
            profile,
            upper,
        } => {
            if n == 0 {
                return Err(Failure::Invalid(anyhow!("n must be at least 1")));
            }
            let layout = if upper { Layout::Upper } else { Layout::Full };
            print!(
                "{}",
                write_matrix(&generate(n, seed, profile), layout, Separator::Space)
            );
            Ok(())
        }
        Command::Bench {
            sizes,
            repetitions,
            seed,
            profile,
        } => {
            let table = run_bench(&sizes, repetitions, seed, profile).map_err(invalid)?;
            print!("{table}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let worker = std::thread::Builder::new()
        .stack_size(STACK_BYTES)
        .spawn(move || run(cli));
    let outcome = match worker {
        Ok(handle) => handle
            .join()
            .unwrap_or_else(|_| Err(Failure::Invalid(anyhow!("internal error")))),
        Err(e) => Err(Failure::Invalid(anyhow!("cannot start worker thread: {e}"))),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Rejected(reason)) => {
            eprintln!("not Robinson: {}", reason.one_based());
            ExitCode::from(1)
        }
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
