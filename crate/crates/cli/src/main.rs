use clap::{Parser, Subcommand};
use gaussym::sampler::FamilyRegistry;
use gaussym_cli::{list_catalog, run, OutputFormat, RunConfig, RunOptions};
use std::path::PathBuf;
use std::process::ExitCode;

/// Checks Gaussian rearrangement inequalities on a catalog of test functions.
///
/// Exit status: 0 when no check is violated, 1 on any violation, 2 on a
/// configuration error, 3 when the run or a report write fails.
#[derive(Parser, Debug)]
#[command(name = "gaussym", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the checks selected by a configuration file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Replace the configured seeds with this one.
        #[arg(long)]
        seed_override: Option<u64>,
        /// Output directory; defaults to the config's output_dir, then $GAUSSYM_OUT.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_parser = parse_format)]
        format: Option<OutputFormat>,
    },
    /// List checks with their anchors and families with their parameters.
    List,
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let families = FamilyRegistry::with_defaults();
    match cli.command {
        Command::List => {
            for line in list_catalog(&families) {
                println!("{line}");
            }
            ExitCode::SUCCESS
        }
        Command::Run { config, seed_override, out, format } => {
            let cfg = match RunConfig::from_file(&config, &families) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: configuration error: {e}");
                    return ExitCode::from(2);
                }
            };
            let opts = RunOptions { out_dir: out, format, seed_override };
            match run(cfg, &families, &opts) {
                Ok(summary) => {
                    println!(
                        "{} reports, {} violated, written to {}",
                        summary.reports.len(),
                        summary.violations,
                        summary.out_dir.display()
                    );
                    for r in summary.reports.iter().filter(|r| r.verdict == gaussym::Verdict::Violated) {
                        println!(
                            "violated: {} {} n={} seed={} margin={:e} tolerance={:e}",
                            r.inequality_id, r.function_id, r.dim, r.seed, r.worst_margin, r.tolerance
                        );
                    }
                    ExitCode::from(summary.exit_code() as u8)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
    }
}
