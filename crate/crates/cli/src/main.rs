use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rndunit_cli::output::write_outputs;
use rndunit_cli::run::{run, RunOutput};
use rndunit_cli::scenario::{load_scenario, Overrides, Scenario};
use rndunit_cli::{demo, thread_pool, CliError};

#[derive(Debug, Parser)]
#[command(name = "rndunit", version, about = "Random unitary channels versus their master equations")]
struct Cli {
    /// Only print errors.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct RunFlags {
    /// Output CSV path; overrides the scenario's `output_path`.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Time step; overrides the scenario's `dt`.
    #[arg(long)]
    dt: Option<f64>,
    /// Final time; overrides the scenario's `t_final`.
    #[arg(long = "t-final")]
    t_final: Option<f64>,
    /// Seed for the Monte Carlo cross-check; overrides the scenario's `seed`.
    #[arg(long)]
    seed: Option<u64>,
}

impl RunFlags {
    fn overrides(&self) -> Overrides {
        Overrides {
            output: self.output.clone(),
            dt: self.dt,
            t_final: self.t_final,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario and write its CSV table and run record.
    Run {
        scenario: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Parse and validate a scenario without running it.
    Validate {
        scenario: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Run a built-in scenario: gaussian-dephasing, two-point-breakdown or gksl-qubit.
    Demo {
        #[arg(value_parser = demo::DEMO_NAMES)]
        name: String,
        /// Print the scenario document instead of running it.
        #[arg(long)]
        print_scenario: bool,
        #[command(flatten)]
        flags: RunFlags,
    },
}

fn summarize(out: &RunOutput, csv: &std::path::Path) {
    let r = &out.record;
    println!("{}: {} samples, exact vs embedded {:.2e}", r.scenario, out.series[0].series.len(), r.embedded_max_deviation);
    if let Some(mc) = &r.monte_carlo {
        println!("  monte carlo ({} samples, seed {}): max deviation {:.3e}", mc.samples, mc.seed, mc.max_deviation);
    }
    for g in &r.reports {
        let breakdown = g.breakdown_time.map_or("none".to_owned(), |t| t.to_string());
        println!(
            "  {:<9} max error {:.3e}, breakdown (> {}) at {}, positivity violation {:.1e}",
            g.generator, g.max_error, g.threshold, breakdown, g.positivity_violation
        );
    }
    println!("  wrote {}", csv.display());
}

fn execute(scenario: Scenario, quiet: bool) -> Result<(), CliError> {
    let pool = thread_pool()?;
    let out = pool.install(|| run(&scenario))?;
    let csv = scenario.output_path();
    write_outputs(&out, &csv)?;
    if !quiet {
        summarize(&out, &csv);
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { scenario, flags } => execute(load_scenario(&scenario, &flags.overrides())?, cli.quiet),
        Command::Validate { scenario, flags } => {
            let s = load_scenario(&scenario, &flags.overrides())?;
            if !cli.quiet {
                println!(
                    "{}: ok (dim {}, {} realizations, {} samples, {} generators)",
                    s.name(),
                    s.hs.dim(),
                    s.ensemble.len(),
                    s.times.len(),
                    s.generators.len()
                );
            }
            Ok(())
        }
        Command::Demo {
            name,
            print_scenario,
            flags,
        } => {
            let mut file = demo::demo(&name).expect("clap restricts demo names");
            flags.overrides().apply(&mut file);
            if print_scenario {
                print!("{}", file.to_json());
                return Ok(());
            }
            execute(Scenario::resolve(file)?, cli.quiet)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "error" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
