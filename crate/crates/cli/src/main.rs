use std::path::{Path, PathBuf};
use std::process::ExitCode;

use blowup_cli::commands::{cmd_run, cmd_scan, exit, Failure};
use blowup_cli::config::ScenarioConfig;
use blowup_cli::verify::{render, run_suite, Context, Suite};
use blowup_core::variational::ConstantsCache;
use clap::{Parser, Subcommand};

/// Simulates u_t/|x|² − Δu = k(t)uᵖ on a ball and checks blow-up times
/// against closed-form bounds.
///
/// Exit codes: 0 success, 1 output write error, 2 configuration error,
/// 3 solver divergence, 4 verdict failure.
#[derive(Parser, Debug)]
#[command(name = "blowup", version)]
struct Cli {
    /// Scenario file (TOML)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `outputs.dir`
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Seed for every randomized component; overrides `constants.seed`
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for parallel scenarios (0 = all cores)
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Also write SVG plots
    #[arg(long, global = true)]
    plot: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate one scenario and evaluate its bounds
    Run,
    /// Classify amplitudes λ·profile against the blow-up hypotheses
    Scan {
        #[arg(long, default_value_t = 0.1)]
        lambda_min: f64,
        #[arg(long, default_value_t = 100.0)]
        lambda_max: f64,
        #[arg(long, default_value_t = 50)]
        count: usize,
    },
    /// Run a built-in property suite
    Verify {
        /// hardy, energy, well, constants, sandwich or all
        #[arg(default_value = "all")]
        suite: Suite,
    },
}

fn load(cli: &Cli) -> Result<ScenarioConfig, Failure> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| Failure::Config(anyhow::anyhow!("--config <FILE> is required for this command")))?;
    let mut cfg = ScenarioConfig::load(path).map_err(Failure::Config)?;
    cfg.apply_overrides(cli.out_dir.as_deref(), cli.seed, cli.plot);
    Ok(cfg)
}

fn list(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Run => {
            let cfg = load(cli)?;
            let cache = ConstantsCache::new(cfg.constants.options());
            let outcome = cmd_run(&cfg, &cache);
            if let Ok(s) = &outcome {
                list(&s.written);
                let upper = s.bounds.min_upper().map_or("-".into(), |u| format!("{u:.6}"));
                let lower = s.bounds.lower.map_or("-".into(), |l| format!("{:.6e}", l.value));
                println!("status {} after {} steps; lower {lower}, upper {upper}", s.status.label(), s.steps);
                if let Some(v) = s.verdict() {
                    println!("sandwich {:?}: {}", v.outcome, v.reason);
                }
            }
            outcome.map(|_| ())
        }
        Command::Scan { lambda_min, lambda_max, count } => {
            let cfg = load(cli)?;
            let cache = ConstantsCache::new(cfg.constants.options());
            let s = cmd_scan(&cfg, &cache, *lambda_min, *lambda_max, *count)?;
            list(&s.written);
            let w = &s.table.witnesses;
            println!(
                "lambda_J = {:.6}; witnesses: negative energy {:?}, potential well {:?}, Hardy window {:?}",
                s.lambda_j, w.negative_energy, w.potential_well, w.hardy_window
            );
            Ok(())
        }
        Command::Verify { suite } => {
            let seed = cli.seed.unwrap_or(0);
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(cli.jobs)
                .build()
                .map_err(|e| Failure::Config(e.into()))?;
            let cache = ConstantsCache::new(blowup_cli::config::ConstantsBlock { seed, ..Default::default() }.options());
            let rows = run_suite(*suite, &Context { seed, cache: &cache, pool: &pool });
            print!("{}", render(&rows));
            let failed = rows.iter().filter(|r| !r.passed).count();
            if failed > 0 {
                return Err(Failure::Verdict(format!("{failed} check(s) of suite '{suite}' failed")));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(dir) = cli.out_dir.as_deref().filter(|d| d == &Path::new("")) {
        eprintln!("configuration error: empty --out-dir {}", dir.display());
        return ExitCode::from(exit::CONFIG);
    }
    match dispatch(&cli) {
        Ok(()) => ExitCode::from(exit::OK),
        Err(f) => {
            eprintln!("blowup: {f}");
            ExitCode::from(f.code())
        }
    }
}
