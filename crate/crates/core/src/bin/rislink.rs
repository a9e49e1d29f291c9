use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rislink::cli;
use rislink::config::{parse_config, RunConfig, OUTPUT_DIR_ENV};

#[derive(Parser)]
#[command(name = "rislink", version, about = "Binary RIS link-level simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured experiment and write its results.
    Run(Common),
    /// Calibrate noise power to the target random-configuration EVM.
    Calibrate(Common),
    /// Run the channel-hardening sweep.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated pixel counts, e.g. 8,16,32.
        #[arg(long, value_delimiter = ',')]
        m_values: Option<Vec<usize>>,
        #[arg(long)]
        realizations: Option<usize>,
    },
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(short, long)]
    config: Option<PathBuf>,
    #[arg(long)]
    experiment: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(short, long)]
    output_dir: Option<PathBuf>,
    /// Worker threads for ensemble experiments (0 = all cores).
    #[arg(short, long)]
    jobs: Option<usize>,
    /// Override any configuration key, e.g. `--set optimizer.max_loops=5`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Common {
    fn overrides(&self) -> Result<Vec<(String, String)>, String> {
        let mut out = Vec::new();
        if let Some(e) = &self.experiment {
            out.push(("experiment".into(), format!("{e:?}")));
        }
        if let Some(s) = self.seed {
            out.push(("seed".into(), s.to_string()));
        }
        if let Some(d) = &self.output_dir {
            out.push(("output_dir".into(), format!("{:?}", d.to_string_lossy())));
        }
        if let Some(j) = self.jobs {
            out.push(("jobs".into(), j.to_string()));
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| format!("--set expects KEY=VALUE, got {kv:?}"))?;
            out.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(out)
    }

    fn load(&self, extra: Vec<(String, String)>) -> Result<RunConfig, String> {
        let mut overrides = self.overrides()?;
        overrides.extend(extra);
        let env_dir = std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from);
        parse_config(self.config.as_deref(), env_dir.as_deref(), &overrides)
            .map_err(|e| e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    let result = match cli.command {
        Command::Run(common) => common.load(vec![]).and_then(|cfg| {
            cli::run(&cfg, &mut stdout)
                .map(|_| ())
                .map_err(|e| e.to_string())
        }),
        Command::Calibrate(common) => common.load(vec![]).and_then(|cfg| {
            cli::calibrate(&cfg, &mut stdout)
                .map(|_| ())
                .map_err(|e| e.to_string())
        }),
        Command::Sweep {
            common,
            m_values,
            realizations,
        } => {
            let mut extra = vec![("experiment".to_string(), "\"hardening\"".to_string())];
            if let Some(m) = m_values {
                extra.push(("hardening.m_values".into(), format!("{m:?}")));
            }
            if let Some(r) = realizations {
                extra.push(("hardening.realizations_per_m".into(), r.to_string()));
            }
            common.load(extra).and_then(|cfg| {
                cli::run(&cfg, &mut stdout)
                    .map(|_| ())
                    .map_err(|e| e.to_string())
            })
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
