use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wavereduce::cli::{self, CompatCase, Report, RunOptions, EXIT_INVALID};
use wavereduce::minkowski::Frame;

#[derive(Parser)]
#[command(name = "wavereduce", version, about = "Reductions of nonlinear wave equations to two variables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args)]
struct Global {
    /// Number of sample points
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// RNG seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Sampling box
    #[arg(long = "box", num_args = 2, value_names = ["LO", "HI"], global = true, allow_negative_numbers = true)]
    sample_box: Option<Vec<f64>>,
    /// Finite-difference step
    #[arg(long, global = true)]
    fd_step: Option<f64>,
    /// Residual tolerance
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Write the JSON report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Verify a reduction spec and print the reduced equation
    Reduce {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Run the compatibility check for one case
    Compat {
        /// elliptic | hyperbolic | parabolic | first-order
        case: String,
        #[arg(long)]
        spec: PathBuf,
    },
    /// Check the Hessian lemmas on a catalog solution pair
    Lemmas { entry: String },
    /// Compose an ansatz with a reduced solution and verify it
    Solve {
        entry: String,
        /// kink | liouville | free-wave | radial | witness
        solution: String,
        /// key=value
        #[arg(long = "param")]
        params: Vec<String>,
    },
    #[command(subcommand)]
    Catalog(CatalogCmd),
    #[command(subcommand)]
    Frame(FrameCmd),
}

#[derive(Subcommand)]
enum CatalogCmd {
    List,
    Show {
        id: String,
        /// Frame file (four rows)
        #[arg(long)]
        frame: Option<PathBuf>,
        /// Arbitrary function Φ(t) for s3_ex4
        #[arg(long)]
        phi: Option<String>,
    },
}

#[derive(Subcommand)]
enum FrameCmd {
    Generate,
    Validate {
        #[arg(long)]
        spec: PathBuf,
    },
}

fn run(cli: &Cli, opts: &RunOptions) -> wavereduce::Result<Report> {
    let read = |p: &PathBuf| std::fs::read_to_string(p).map_err(wavereduce::Error::from);
    match &cli.command {
        Command::Reduce { spec } => cli::cmd_reduce(&cli::AnsatzSpec::load(spec)?, opts),
        Command::Compat { case, spec } => {
            cli::cmd_compat(case.parse::<CompatCase>()?, &cli::CompatSpec::load(spec)?, opts)
        }
        Command::Lemmas { entry } => cli::cmd_lemmas(entry, opts),
        Command::Solve { entry, solution, params } => {
            cli::cmd_solve(entry, solution, &cli::parse_params(params)?, opts)
        }
        Command::Catalog(CatalogCmd::List) => Ok(cli::cmd_catalog_list()),
        Command::Catalog(CatalogCmd::Show { id, frame, phi }) => {
            let frame = frame.as_ref().map(|p| Frame::from_text(&read(p)?)).transpose()?;
            cli::cmd_catalog_show(id, frame.as_ref(), phi.as_deref())
        }
        Command::Frame(FrameCmd::Generate) => cli::cmd_frame_generate(opts.seed.unwrap_or(0)),
        Command::Frame(FrameCmd::Validate { spec }) => cli::cmd_frame_validate(&read(spec)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let opts = RunOptions {
        samples: g.samples,
        seed: g.seed,
        bounds: g.sample_box.as_ref().map(|b| (b[0], b[1])),
        fd_step: g.fd_step,
        tol: g.tol,
    };
    match run(&cli, &opts) {
        Ok(report) => {
            eprintln!("{}", report.summary);
            let json = report.to_json();
            match &g.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, json + "\n") {
                        eprintln!("error: {e}");
                        return ExitCode::from(EXIT_INVALID as u8);
                    }
                }
                None => {
                    let _ = writeln!(std::io::stdout(), "{json}");
                }
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INVALID as u8)
        }
    }
}
