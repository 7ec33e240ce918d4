use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use outrank_core::document::{write_report, ReportDocument, ReportFormat};
use outrank_core::smaa::{run_smaa, SamplingConfig, DEFAULT_SAMPLE_COUNT};
use outrank_core::{Error, LoadedProblem};

#[derive(Parser)]
#[command(name = "outrank", version, about = "Robust ranking on a hierarchy of interacting criteria")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a problem document and report every issue found.
    Validate { file: PathBuf },
    /// Print the local weights each card deck allows.
    Weights {
        file: PathBuf,
        #[arg(long)]
        node: Option<String>,
    },
    /// Run the stochastic analysis and write the report.
    Run {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SAMPLE_COUNT)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Keep only this node in the report.
        #[arg(long)]
        node: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        /// Persist projects and reports under this directory.
        #[arg(long)]
        data_dir: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => ReportFormat::Json,
            Format::Csv => ReportFormat::Csv,
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Incompatible(_) => 3,
        Error::Io(_) => 4,
        _ => 2,
    }
}

fn load(path: &Path) -> Result<LoadedProblem, Error> {
    let text = std::fs::read_to_string(path)?;
    outrank_core::parse_problem(&text)
}

fn report_error(e: &Error) {
    match e {
        Error::Invalid(issues) => {
            eprintln!("error: invalid problem ({} issue(s))", issues.len());
            for issue in issues.iter() {
                eprintln!("  {issue}");
            }
        }
        other => eprintln!("error: {other}"),
    }
}

fn validate(file: &Path) -> Result<(), Error> {
    let loaded = load(file)?;
    let p = &loaded.problem;
    println!(
        "ok: {} alternatives, {} elementary criteria, {} interactions, {} decks",
        p.alternative_count(),
        p.tree().elementary().len(),
        p.interactions().len(),
        loaded.elicitation.decks().len(),
    );
    println!("fingerprint {}", loaded.document.fingerprint());
    Ok(())
}

fn weights(file: &Path, node: Option<&str>) -> Result<(), Error> {
    let loaded = load(file)?;
    let tree = loaded.problem.tree();
    if let Some(id) = node {
        let idx = tree.lookup(id)?;
        if tree.is_elementary(idx) {
            return Err(Error::InvalidArgument(format!("`{id}` is an elementary criterion")));
        }
    }
    let mut out = String::new();
    for space in loaded.elicitation.spaces() {
        let id = tree.id(space.node);
        if node.is_some_and(|n| n != id) {
            continue;
        }
        let count = match space.choice_count() {
            Some(c) => format!("{c} deck reading(s)"),
            None => "continuous ratio".to_string(),
        };
        let _ = writeln!(out, "{id}: {} level(s), {count}", space.levels().len());
        for (child, (lo, hi)) in space.bounds()? {
            if (hi - lo).abs() < 1e-12 {
                let _ = writeln!(out, "  {child:<8} {lo:.4}");
            } else {
                let _ = writeln!(out, "  {child:<8} [{lo:.4}, {hi:.4}]");
            }
        }
        if let Some(vectors) = space.enumerate() {
            if vectors.len() > 1 {
                let _ = writeln!(out, "  distinct vectors:");
                for v in vectors {
                    let cells: Vec<String> =
                        v.weights.iter().map(|(k, w)| format!("{k}={w:.4}")).collect();
                    let _ = writeln!(out, "    {}", cells.join(" "));
                }
            }
        }
    }
    print!("{out}");
    Ok(())
}

fn run(
    file: &Path,
    samples: usize,
    seed: u64,
    node: Option<&str>,
    format: Format,
    out: Option<&Path>,
) -> Result<(), Error> {
    let loaded = load(file)?;
    if let Some(id) = node {
        let idx = loaded.problem.tree().lookup(id)?;
        if loaded.problem.tree().is_elementary(idx) {
            return Err(Error::InvalidArgument(format!("`{id}` is an elementary criterion")));
        }
    }
    let config = SamplingConfig::new(samples, seed);
    let mut report = run_smaa(&loaded.problem, &loaded.elicitation, &config)?;
    if let Some(id) = node {
        report.nodes.retain(|n| n.node == id);
    }
    let doc = ReportDocument::new(&loaded.document, report);
    let text = write_report(&doc, format.into());
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn serve(host: std::net::IpAddr, port: u16, data_dir: Option<PathBuf>) -> Result<(), Error> {
    tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .init();
    let state = match data_dir {
        Some(dir) => outrank_service::AppState::with_data_dir(dir)?,
        None => outrank_service::AppState::new(),
    };
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(outrank_service::serve((host, port).into(), state))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate { file } => validate(&file),
        Command::Weights { file, node } => weights(&file, node.as_deref()),
        Command::Run { file, samples, seed, node, format, out } => {
            run(&file, samples, seed, node.as_deref(), format, out.as_deref())
        }
        Command::Serve { port, host, data_dir } => serve(host, port, data_dir),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report_error(&e);
            ExitCode::from(exit_code(&e))
        }
    }
}
