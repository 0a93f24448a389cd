use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use imcf_core::oracle;
use imcf_core::scenario::{self, error_exit_code, exit, RunOptions};
use imcf_core::Error;

#[derive(Parser)]
#[command(name = "imcf", version, about = "Inverse mean curvature flow scenarios in static manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Reserved; flows are deterministic.
    #[arg(long)]
    seed: Option<u64>,
    /// Treat warnings as errors.
    #[arg(long)]
    strict: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its CSV table and JSON summary.
    Flow {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run every *.toml scenario in a directory.
    Sweep {
        /// Directory of scenario files.
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Staticity and mass diagnostics only; prints JSON.
    StaticCheck {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        strict: bool,
    },
    /// Print closed-form reference values as JSON.
    Oracle,
}

fn fail(e: &Error) -> i32 {
    eprintln!("error: {e}");
    error_exit_code(e)
}

fn flow(config: PathBuf, common: Common) -> i32 {
    let opts = RunOptions { strict: common.strict };
    let cfg = match scenario::load_config(&config) {
        Ok(cfg) => cfg,
        Err(e) => return fail(&e),
    };
    let report = match scenario::run_scenario(&cfg, opts) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let paths = match scenario::emit_outputs(&report, &common.out) {
        Ok((paths, _)) => paths,
        Err(e) => return fail(&e),
    };
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let v = &report.verdicts;
    println!(
        "{}: exit {} | monotone={} (worst_increase={:.3e}) deficit>=0={} area_law={} limit={} static={} | {} {}",
        report.scenario,
        report.exit_code,
        v.monotone.pass,
        v.monotone.worst_increase,
        v.deficit.pass,
        v.area_law.pass,
        v.limit.pass,
        v.staticity.pass,
        paths.csv.display(),
        paths.json.display(),
    );
    report.exit_code
}

fn sweep(dir: PathBuf, jobs: usize, common: Common) -> i32 {
    match scenario::run_sweep(&dir, &common.out, jobs, RunOptions { strict: common.strict }) {
        Ok(summary) => {
            for (name, value) in &summary.scenarios {
                println!("{name}: exit {}", value["exit_code"]);
            }
            summary.exit_code
        }
        Err(e) => fail(&e),
    }
}

fn static_check(config: PathBuf, strict: bool) -> i32 {
    let report = match scenario::load_config(&config).and_then(|cfg| scenario::static_check(&cfg)) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    println!("{}", serde_json::to_string_pretty(&report).expect("plain data"));
    if !report.staticity.pass || (strict && !report.warnings.is_empty()) {
        exit::OTHER_VERDICT
    } else {
        exit::PASS
    }
}

fn print_oracle() -> i32 {
    match oracle::table() {
        Ok(t) => {
            println!("{}", serde_json::to_string_pretty(&t).expect("plain data"));
            exit::PASS
        }
        Err(e) => fail(&e),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::PARSE } else { exit::PASS };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let code = match cli.command {
        Command::Flow { config, common } => flow(config, common),
        Command::Sweep { config, jobs, common } => sweep(config, jobs, common),
        Command::StaticCheck { config, strict } => static_check(config, strict),
        Command::Oracle => print_oracle(),
    };
    ExitCode::from(code as u8)
}
