//! Command-line driver: argument parsing, dispatch and report handling.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
pub mod report;

pub use report::{Failure, Outcome, Report, Status, Timings, Witness};

#[derive(Parser, Debug)]
#[command(name = "kq", version, about = "Exact checks on finite simplicial sets, Sd, Ex and P-structures")]
pub struct Cli {
    /// Write the full JSON report here.
    #[arg(long, global = true, value_name = "PATH")]
    pub report: Option<PathBuf>,
    /// Write a replayable certificate here.
    #[arg(long, global = true, value_name = "PATH")]
    pub emit_cert: Option<PathBuf>,
    /// Worker threads for independent verification tuples.
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Simplicial set files.
    #[command(subcommand)]
    Sset(SsetCommand),
    /// Barycentric subdivision of a set, with its last-vertex map.
    Sd {
        file: PathBuf,
        /// Truncate the result at this dimension.
        #[arg(long)]
        trunc: Option<usize>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Iterated Ex of a set.
    Ex {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        iters: usize,
        #[arg(long, default_value_t = 2)]
        trunc: usize,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Verification campaigns.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Fill horns in Ex^a X through the next level.
    FillHorn(FillHornArgs),
    /// Factorizations.
    #[command(subcommand)]
    Factor(FactorCommand),
    /// P-structure files and anodyne presentations.
    #[command(subcommand)]
    Pstructure(PstructureCommand),
}

#[derive(Subcommand, Debug)]
pub enum SsetCommand {
    /// Check face normal forms and the simplicial identities.
    Validate { file: PathBuf },
    /// Write a standard simplex, boundary or horn.
    Generate {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Kind {
    Simplex,
    Boundary,
    Horn,
}

#[derive(Subcommand, Debug)]
pub enum VerifyCommand {
    /// The eleven operator identities on every K[n], n ≤ max-n.
    Moss {
        #[arg(long, default_value_t = 5)]
        max_n: usize,
    },
    /// Corner-map P-structures; sweeps n ≤ 2, m ≤ 3 when no tuple is given.
    Corner {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
    },
    /// The P-structure on the unit of Ex relative to Y.
    ExUnit(PairArgs),
    /// Stages of the relative Ex tower, compared with the direct fibre products.
    Tower {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 2)]
        steps: usize,
    },
    /// N(Δ₊/X) against Sd of the free simplicial set on X.
    SdSemisimplicial { file: PathBuf },
    /// The bijection Hom(Sd A, B) ≅ Hom(A, Ex B).
    Adjunction {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value_t = 2)]
        trunc: usize,
    },
    /// Solve every generating lifting problem up to a dimension.
    Fibration {
        #[arg(long)]
        map: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_dim: usize,
        /// Use boundary inclusions instead of horns.
        #[arg(long)]
        trivial: bool,
    },
}

#[derive(Args, Debug)]
pub struct PairArgs {
    #[arg(long)]
    pub x: PathBuf,
    #[arg(long)]
    pub y: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub trunc: usize,
    /// The map X → Y; defaults to the unique map, else the inclusion by names.
    #[arg(long)]
    pub map: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FillHornArgs {
    #[arg(long)]
    pub x: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub level: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    /// The horn Λ^k[n] → Ex^a X; every horn is filled when omitted.
    #[arg(long)]
    pub map: Option<PathBuf>,
    /// Truncation of each Ex level; defaults to n.
    #[arg(long)]
    pub trunc: Option<usize>,
    /// Cap on the number of horns when filling all of them.
    #[arg(long, default_value_t = 200)]
    pub limit: usize,
}

#[derive(Subcommand, Debug)]
pub enum FactorCommand {
    /// Degeneracy quotient followed by a degeneracy-detecting map.
    Degen {
        #[arg(long)]
        map: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum PstructureCommand {
    /// Validate a structure on a cofibration and compile it to horn attachments.
    Compile {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        ps: PathBuf,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Rebuild the target of a presentation and compare.
    Replay {
        #[arg(long)]
        presentation: PathBuf,
    },
}

/// Runs a parsed command line. `echo` is recorded in the report.
pub fn run(cli: &Cli, echo: Vec<String>) -> (Report, i32) {
    let start = Instant::now();
    if let Some(jobs) = cli.jobs {
        // A second initialisation in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global();
    }
    let result = commands::dispatch(cli);
    let (mut outcome, failure) = match result {
        Ok(o) => (o, None),
        Err(f) => {
            let o = Outcome {
                status: Status::Error,
                summary: vec![f.to_string()],
                details: serde_json::Value::Null,
                witnesses: Vec::new(),
                certificate: None,
                artifact: None,
            };
            (o, Some(f))
        }
    };
    let mut code = outcome.status.exit_code(failure.as_ref());
    let writes = [(&cli.emit_cert, outcome.certificate.take()), (&out_path(&cli.command), outcome.artifact.take())];
    for (path, text) in writes {
        if let (Some(path), Some(text)) = (path, text) {
            if let Err(e) = std::fs::write(path, text) {
                outcome.summary.push(format!("cannot write {}: {e}", path.display()));
                outcome.status = Status::Error;
                code = 2;
            }
        }
    }
    let report = Report {
        command: echo,
        status: outcome.status,
        summary: outcome.summary,
        details: outcome.details,
        witnesses: outcome.witnesses,
        timings: Timings { total_ms: start.elapsed().as_millis() },
    };
    if let Some(path) = &cli.report {
        if let Err(e) = std::fs::write(path, report.to_json()) {
            eprintln!("cannot write report {}: {e}", path.display());
            code = 2;
        }
    }
    (report, code)
}

fn out_path(c: &Command) -> Option<PathBuf> {
    match c {
        Command::Sset(SsetCommand::Generate { out, .. }) => Some(out.clone()),
        Command::Sd { out, .. } | Command::Ex { out, .. } | Command::Pstructure(PstructureCommand::Compile { out, .. }) => out.clone(),
        _ => None,
    }
}
