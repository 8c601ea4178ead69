use anyhow::{bail, Context, Result};
use auvplan_core::executive::{
    run_mission, write_leg_table, write_transcript, ComputeCharge, ExecMode, MissionRun, Outcome,
};
use auvplan_core::harness::{
    read_records, run_campaign, summarize, write_rankings, write_records, write_summary, write_timings,
    campaign_pairs, CampaignSpec, Preset, RankRow, Scenario,
};
use auvplan_core::opp::{write_convergence_csv, write_trajectory_csv, OppAlgorithm};
use auvplan_core::tamp::{write_iteration_log, TampAlgorithm};
use clap::{Parser, Subcommand, ValueEnum};
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "auvplan", version, about = "Mission routing and path planning for AUVs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random scenario file.
    Generate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = PresetArg::Residual)]
        preset: PresetArg,
        /// Waypoint count.
        #[arg(long)]
        nodes: Option<usize>,
        /// Task count.
        #[arg(long)]
        tasks: Option<usize>,
        /// Total mission time, seconds.
        #[arg(long)]
        total_time: Option<f64>,
        /// Route time threshold, seconds.
        #[arg(long)]
        threshold: Option<f64>,
        /// Output file; stdout when omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Fly one mission and write its report, transcript and planner logs.
    Run {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value_t = TampArg::Ga)]
        tamp: TampArg,
        #[arg(long, value_enum, default_value_t = OppArg::De)]
        opp: OppArg,
        /// Mission seed; the scenario seed when omitted.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = ModeArg::Sequential)]
        mode: ModeArg,
        #[arg(long, value_enum)]
        cost: Option<CostArg>,
        #[arg(short, long, default_value = "out")]
        out: PathBuf,
    },
    /// Run a Monte Carlo campaign over algorithm pairs.
    Montecarlo {
        scenario: PathBuf,
        #[arg(long, default_value_t = 30)]
        runs: usize,
        /// Run the full 150-run study.
        #[arg(long, conflicts_with = "runs")]
        full: bool,
        /// Comma-separated `tamp:opp` pairs, or `all`.
        #[arg(long, default_value = "all", value_parser = parse_pairs)]
        pairs: PairList,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Smallest waypoint count drawn per run.
        #[arg(long, default_value_t = 30)]
        min_nodes: usize,
        /// Largest waypoint count drawn per run.
        #[arg(long, default_value_t = 50)]
        max_nodes: usize,
        #[arg(long, value_enum)]
        cost: Option<CostArg>,
        #[arg(short, long, default_value = "campaign")]
        out: PathBuf,
    },
    /// Summarize a campaign record file.
    Report {
        records: PathBuf,
        /// Output directory; next to the records when omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Residual,
    Budget,
    Replan,
}

#[derive(Clone, Copy, ValueEnum)]
enum TampArg {
    Aco,
    Bbo,
    Ga,
    Pso,
}

#[derive(Clone, Copy, ValueEnum)]
enum OppArg {
    De,
    Fa,
    Bbo,
    Pso,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Sequential,
    Concurrent,
}

#[derive(Clone, Copy, ValueEnum)]
enum CostArg {
    /// Charge measured planner time.
    Wall,
    /// Charge 1 s per route plan and 0.5 s per path plan.
    Fixed,
}

type PairList = Vec<(TampAlgorithm, OppAlgorithm)>;

fn tamp_of(a: TampArg) -> TampAlgorithm {
    match a {
        TampArg::Aco => TampAlgorithm::Aco,
        TampArg::Bbo => TampAlgorithm::Bbo,
        TampArg::Ga => TampAlgorithm::Ga,
        TampArg::Pso => TampAlgorithm::Pso,
    }
}

fn opp_of(a: OppArg) -> OppAlgorithm {
    match a {
        OppArg::De => OppAlgorithm::De,
        OppArg::Fa => OppAlgorithm::Fa,
        OppArg::Bbo => OppAlgorithm::Bbo,
        OppArg::Pso => OppAlgorithm::Pso,
    }
}

fn charge_of(c: CostArg) -> ComputeCharge {
    match c {
        CostArg::Wall => ComputeCharge::WallClock,
        CostArg::Fixed => ComputeCharge::deterministic(),
    }
}

fn parse_pairs(s: &str) -> Result<PairList, String> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(campaign_pairs());
    }
    s.split(',')
        .map(|item| {
            let (t, o) = item.split_once(':').ok_or_else(|| format!("`{item}` is not tamp:opp"))?;
            let t = TampArg::from_str(t.trim(), true).map_err(|_| format!("unknown route planner `{t}`"))?;
            let o = OppArg::from_str(o.trim(), true).map_err(|_| format!("unknown path planner `{o}`"))?;
            Ok((tamp_of(t), opp_of(o)))
        })
        .collect()
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Scenario::from_toml(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_run(dir: &Path, run: &MissionRun) -> Result<()> {
    fs::create_dir_all(dir.join("legs"))?;
    serde_json::to_writer_pretty(create(&dir.join("report.json"))?, &run.report)?;
    write_transcript(&run.transcript, create(&dir.join("transcript.jsonl"))?)?;
    write_leg_table(&run.report.legs, create(&dir.join("legs.csv"))?)?;
    for (k, log) in run.tamp_logs.iter().enumerate() {
        write_iteration_log(log, create(&dir.join(format!("route_plan_{k:02}.csv")))?)?;
    }
    for (k, leg) in run.legs.iter().enumerate() {
        write_convergence_csv(&leg.convergence, create(&dir.join(format!("legs/leg_{k:02}_convergence.csv")))?)?;
        write_trajectory_csv(&leg.samples, create(&dir.join(format!("legs/leg_{k:02}_trajectory.csv")))?)?;
    }
    Ok(())
}

fn print_rankings(rows: &[RankRow]) {
    let mut last = ("", "");
    for r in rows.iter().filter(|r| r.group_kind != "pair") {
        if (r.group_kind.as_str(), r.metric.as_str()) != last {
            println!("{} / {}:", r.group_kind, r.metric);
            last = (r.group_kind.as_str(), r.metric.as_str());
        }
        let flag = if r.tied { " (tie)" } else { "" };
        println!("  {}. {:<8} {:.6}{flag}", r.rank, r.group, r.median);
    }
}

fn report_into(records_path: &Path, dir: &Path) -> Result<()> {
    let records = read_records(File::open(records_path).with_context(|| format!("reading {}", records_path.display()))?)?;
    let report = summarize(&records)?;
    fs::create_dir_all(dir)?;
    write_summary(&report.summary, create(&dir.join("summary.csv"))?)?;
    write_rankings(&report.rankings, create(&dir.join("rankings.csv"))?)?;
    print_rankings(&report.rankings);
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { seed, preset, nodes, tasks, total_time, threshold, out } => {
            let preset = match preset {
                PresetArg::Residual => Preset::Residual,
                PresetArg::Budget => Preset::Budget,
                PresetArg::Replan => Preset::Replan,
            };
            let mut s = Scenario::generate(seed, preset)?;
            if let Some(n) = nodes {
                s.graph.node_count = n;
            }
            if let Some(n) = tasks {
                s.tasks.count = n;
            }
            if let Some(t) = total_time {
                s.mission.total_time = t;
            }
            if threshold.is_some() {
                s.mission.route_threshold = threshold;
            }
            s.validate()?;
            let text = s.to_toml()?;
            match out {
                Some(path) => fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
        }
        Command::Run { scenario, tamp, opp, seed, mode, cost, out } => {
            let s = load_scenario(&scenario)?;
            let world = s.build_world()?;
            let mut cfg = s.mission.clone();
            cfg.tamp.algorithm = tamp_of(tamp);
            cfg.opp.algorithm = opp_of(opp);
            cfg.seed = seed.unwrap_or(s.seed);
            cfg.mode = match mode {
                ModeArg::Sequential => ExecMode::Sequential,
                ModeArg::Concurrent => ExecMode::Concurrent,
            };
            if let Some(c) = cost {
                cfg.charge = charge_of(c);
            }
            let run = run_mission(&world, &cfg)?;
            write_run(&out, &run)?;
            let r = &run.report;
            let status = match r.outcome {
                Outcome::Completed => "completed",
                Outcome::Late => "late",
                Outcome::Failed => "FAILED",
            };
            println!(
                "{status}: {} legs, {} re-plans, residual {:.1} s, mission cost {:.4}, weight {:.1}",
                r.legs.len(),
                r.replans,
                r.residual_time,
                r.mission_cost,
                r.total_weight
            );
        }
        Command::Montecarlo { scenario, runs, full, pairs, seed, threads, min_nodes, max_nodes, cost, out } => {
            let mut s = load_scenario(&scenario)?;
            if let Some(c) = cost {
                s.mission.charge = charge_of(c);
            }
            if threads == 0 {
                bail!("--threads must be at least 1");
            }
            if min_nodes > max_nodes {
                bail!("--min-nodes exceeds --max-nodes");
            }
            let spec = CampaignSpec {
                runs: if full { 150 } else { runs },
                pairs,
                seed,
                threads,
                node_range: (min_nodes, max_nodes),
                ..Default::default()
            };
            let campaign = run_campaign(&s, &spec)?;
            fs::create_dir_all(&out)?;
            let records_path = out.join("records.csv");
            write_records(&campaign.records, create(&records_path)?)?;
            write_timings(&campaign.timings, create(&out.join("timing.csv"))?)?;
            let errors = campaign.records.iter().filter(|r| r.is_error()).count();
            println!("{} records ({errors} setup errors) in {}", campaign.records.len(), out.display());
            report_into(&records_path, &out)?;
        }
        Command::Report { records, out } => {
            let dir = out.unwrap_or_else(|| records.parent().map(Path::to_path_buf).unwrap_or_default());
            report_into(&records, &dir)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
