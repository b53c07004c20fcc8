use cgamotion::cli::run::run;
use cgamotion::cli::scenario::{
    CodecParams, KnotParams, NetParams, Overrides, Params, RopeParams, Scenario, ScenarioFile, SkinParams, SoftParams,
};
use cgamotion::cli::verify::{outcome, run_suite, SUITES};
use cgamotion::cli::{to_json_pretty, write_file, CliError, OutputFormat, EXIT_USAGE};
use cgamotion::fixtures::catalog;
use clap::{Parser, Subcommand};
use cpu_time::ProcessTime;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "cgamotion", version, about = "CGA motion engine: scenario runs, self-checks and fixtures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Run one scenario and write its metric files.
    Run(RunArgs),
    /// Run a self-check suite and print one line per check.
    Verify {
        /// Suite name, or `all`.
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(SUITES.iter().copied().chain(["all"])))]
        suite: String,
        /// Print the checks as JSON instead of text lines.
        #[arg(long)]
        json: bool,
    },
    /// List or regenerate the built-in fixture files.
    Fixtures {
        #[command(subcommand)]
        action: FixtureAction,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    /// Scenario TOML file; flags given on the command line override it.
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    /// Seed for the simulated link and random perturbations [default: 0].
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (default `out/<kind>`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Table format [default: csv].
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    #[command(subcommand)]
    kind: Option<RunKind>,
}

#[derive(Subcommand)]
enum RunKind {
    /// Skin a model in one pose.
    Skin(SkinParams),
    /// Reduce a track to keyframes.
    Codec(CodecParams),
    /// Stream a track over the simulated link.
    Net(NetParams),
    /// Soft-body drills.
    Soft(SoftParams),
    /// Rope drills.
    Rope(RopeParams),
    /// Pull a knot tight.
    Knot(KnotParams),
}

impl From<RunKind> for Params {
    fn from(k: RunKind) -> Self {
        match k {
            RunKind::Skin(p) => Params::Skin(p),
            RunKind::Codec(p) => Params::Codec(p),
            RunKind::Net(p) => Params::Net(p),
            RunKind::Soft(p) => Params::Soft(p),
            RunKind::Rope(p) => Params::Rope(p),
            RunKind::Knot(p) => Params::Knot(p),
        }
    }
}

#[derive(Subcommand)]
enum FixtureAction {
    /// Print every fixture path with its description.
    List,
    /// Write the fixture files, or compare them with `--check`.
    Write {
        #[arg(long, default_value = "fixtures")]
        dir: PathBuf,
        /// Compare instead of writing; fails when any file differs.
        #[arg(long)]
        check: bool,
    },
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run(args) => {
            let file = args.scenario.as_deref().map(ScenarioFile::load).transpose()?;
            let overrides =
                Overrides { params: args.kind.map(Params::from), seed: args.seed, format: args.format, out: args.out };
            let scenario = Scenario::assemble(file, overrides)?;
            let output = run(&scenario)?;
            output.write()?;
            print!("{}", to_json_pretty(&output.summary)?);
            Ok(())
        }
        Command::Verify { suite, json } => {
            let checks = run_suite(&suite)?;
            if json {
                print!("{}", to_json_pretty(&checks)?);
            } else {
                for c in &checks {
                    println!("{}", c.line());
                }
            }
            outcome(&checks)
        }
        Command::Fixtures { action: FixtureAction::List } => {
            for f in catalog() {
                println!("{}\t{}", f.path, f.description);
            }
            Ok(())
        }
        Command::Fixtures { action: FixtureAction::Write { dir, check } } => {
            let files = catalog();
            let mut differ = 0;
            for f in &files {
                let path = dir.join(&f.path);
                if check {
                    let same = std::fs::read(&path).is_ok_and(|b| b == f.contents.as_bytes());
                    println!("{} {}", if same { "ok" } else { "differs" }, path.display());
                    differ += usize::from(!same);
                } else {
                    write_file(&path, f.contents.as_bytes())?;
                    println!("wrote {}", path.display());
                }
            }
            if differ > 0 {
                return Err(CliError::ChecksFailed { failed: differ, total: files.len() });
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let start = ProcessTime::now();
    let result = execute(cli.command);
    eprintln!("cpu time: {:.3} s", start.elapsed().as_secs_f64());
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
