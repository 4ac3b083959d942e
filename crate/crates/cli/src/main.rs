use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};

use tsnsim::control::write_control_log;
use tsnsim::scenario::calibrate::{calibrate, coarse_grid, fine_grid, format_points, passing};
use tsnsim::scenario::case_study::{case_study, case_study_file, srp_scenario, CaseStudyParams};
use tsnsim::scenario::report::{default_cuts, parse_cuts};
use tsnsim::scenario::{
    gcl_calc, read_trace, report, write_trace, GclCalcInput, Rounding, ScenarioConfig, Simulation,
};
use tsnsim::time::SimDuration;

#[derive(Parser)]
#[command(name = "tsnsim", version, about = "Software-defined TSN simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file, or a built-in one (`case-study`, `srp`).
    Run {
        scenario: String,
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for trace.csv, control_log.csv and report.txt.
        #[arg(long, default_value = "tsnsim-out")]
        out: PathBuf,
    },
    /// Compute red/green/yellow phase lengths.
    GclCalc {
        /// Largest frame on the link, bytes.
        #[arg(long)]
        max_frame: u32,
        /// High-priority frame, bytes.
        #[arg(long)]
        hp_frame: u32,
        /// Link rate, bit/s.
        #[arg(long)]
        rate: u64,
        /// Cycle, µs.
        #[arg(long)]
        cycle: String,
        /// Safety margin, µs.
        #[arg(long)]
        margin: String,
        /// Round serialization times to 5 µs before adding the margin.
        #[arg(long)]
        paper_rounding: bool,
    },
    /// Per-flow latency statistics of a trace.
    Report {
        trace: PathBuf,
        /// Comma-separated cut points, e.g. `2s,4s,6s,8s`.
        #[arg(long)]
        cuts: Option<String>,
    },
    /// Print a switch's launch configuration as loaded from a scenario.
    ExportLaunchConfig { scenario: String, switch: String },
    /// Print the built-in case study as a scenario file.
    WriteCaseStudy {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep the case study's per-switch processing delay.
    Calibrate {
        /// Only the 0/2/4/6/8 µs points.
        #[arg(long)]
        coarse: bool,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn load_scenario(name: &str) -> Result<ScenarioConfig> {
    match name {
        "case-study" => Ok(case_study(&CaseStudyParams::default())),
        "srp" => Ok(srp_scenario(1)),
        path => ScenarioConfig::load(Path::new(path)).map_err(|e| anyhow!(e)),
    }
}

fn micros(text: &str) -> Result<SimDuration> {
    format!("{}us", text.trim())
        .parse()
        .map_err(|e| anyhow!("`{text}`: {e}"))
}

fn run(scenario: &str, seed: Option<u64>, out: &Path) -> Result<()> {
    let mut cfg = load_scenario(scenario)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    let mut sim = Simulation::new(&cfg)?;
    sim.run()?;
    let output = sim.into_output();

    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    write_trace(
        &output.trace,
        BufWriter::new(File::create(out.join("trace.csv"))?),
    )?;
    write_control_log(
        &output.control_log,
        BufWriter::new(File::create(out.join("control_log.csv"))?),
    )?;
    let summary = report(&output.trace, &default_cuts()).to_string();
    fs::write(out.join("report.txt"), &summary)?;

    let c = output.conservation;
    println!(
        "{}: seed {} events {} sent {} delivered {} dropped {} queued {}",
        cfg.name, cfg.seed, output.events, c.sent, c.delivered, c.dropped, c.queued
    );
    for r in &output.rpcs {
        let result = match &r.result {
            Some(res) if res.is_ok() => "ok".to_string(),
            Some(res) => format!("{res:?}"),
            None => "no reply".to_string(),
        };
        println!(
            "rpc {} {} {} at {}: {}",
            r.id, r.switch, r.op, r.sent_at, result
        );
    }
    print!("{summary}");
    println!("wrote {}", out.display());
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run {
            scenario,
            seed,
            out,
        } => run(&scenario, seed, &out),
        Command::GclCalc {
            max_frame,
            hp_frame,
            rate,
            cycle,
            margin,
            paper_rounding,
        } => {
            if rate == 0 {
                bail!("--rate must be positive");
            }
            let input = GclCalcInput {
                max_frame,
                hp_frame,
                bitrate: rate,
                cycle: micros(&cycle)?,
                margin: micros(&margin)?,
            };
            let rounding = if paper_rounding {
                Rounding::Paper
            } else {
                Rounding::Exact
            };
            let p = gcl_calc(&input, rounding)?;
            println!("t_red_us={}", p.t_red.as_micros_f64());
            println!("t_green_us={}", p.t_green.as_micros_f64());
            println!("t_yellow_us={}", p.t_yellow.as_micros_f64());
            println!("gcl={}", p.to_gcl());
            Ok(())
        }
        Command::Report { trace, cuts } => {
            let file =
                File::open(&trace).with_context(|| format!("opening {}", trace.display()))?;
            let records = read_trace(file).map_err(|e| anyhow!(e))?;
            let cuts = match cuts {
                Some(c) => parse_cuts(&c)?,
                None => default_cuts(),
            };
            print!("{}", report(&records, &cuts));
            Ok(())
        }
        Command::ExportLaunchConfig { scenario, switch } => {
            let cfg = load_scenario(&scenario)?;
            let sim = Simulation::new(&cfg)?;
            let sw = sim
                .switch(&switch)
                .ok_or_else(|| anyhow!("scenario has no switch `{switch}`"))?;
            print!("{}", sw.export_launch_config().to_toml());
            Ok(())
        }
        Command::WriteCaseStudy { seed, out } => {
            let mut params = CaseStudyParams::default();
            if let Some(seed) = seed {
                params.seed = seed;
            }
            let text = case_study_file(&params);
            match out {
                Some(path) => fs::write(&path, text)?,
                None => io::stdout().write_all(text.as_bytes())?,
            }
            Ok(())
        }
        Command::Calibrate { coarse, seed } => {
            let mut params = CaseStudyParams::default();
            if let Some(seed) = seed {
                params.seed = seed;
            }
            let grid = if coarse { coarse_grid() } else { fine_grid() };
            let points = calibrate(&params, &grid)?;
            print!("{}", format_points(&points));
            let ok: Vec<String> = passing(&points).iter().map(|d| d.to_string()).collect();
            println!(
                "passing: {}",
                if ok.is_empty() {
                    "none".into()
                } else {
                    ok.join(", ")
                }
            );
            Ok(())
        }
    }
}
