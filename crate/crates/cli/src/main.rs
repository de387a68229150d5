use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use birdsim::agent::{
    bench, parse_config, play_episode, AgentConfig, BenchConfig, EpisodeResult, NaiveAgent, SimAgent,
};
use birdsim::perception::{overlay, perceive, report, to_scene};
use birdsim::planner::{plan, run_simulation_traced, Candidate};
use birdsim::render::{encode_image, rasterize, read_classmap, write_classmap, write_image, Palette};
use birdsim::world::{current_score, load_level, state_hash, Scene, Shot};

#[derive(Parser)]
#[command(name = "birdsim", version, about = "Slingshot physics game, perception pipeline and simulation-based agent")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum AgentKind {
    Sim,
    Naive,
}

#[derive(Subcommand)]
enum Command {
    /// Play one level to the end.
    Play {
        level: PathBuf,
        #[arg(long, value_enum, default_value = "sim")]
        agent: AgentKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Writes the frame and planner sweep of every shot here.
        #[arg(long)]
        dump_dir: Option<PathBuf>,
    },
    /// Run both agents on every level of a directory.
    Bench {
        #[arg(long)]
        levels: PathBuf,
        #[arg(long, default_value_t = 4)]
        trials: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Reconstruct a scene from a classmap.
    Perceive {
        classmap: PathBuf,
        #[arg(long)]
        overlay: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Simulate shots in the agent's reconstruction of a level.
    Simulate {
        level: PathBuf,
        #[arg(long, required_unless_present = "sweep", conflicts_with = "sweep")]
        angle: Option<f64>,
        #[arg(long, requires = "angle")]
        tap: Option<f64>,
        /// Per-step trace of a single shot.
        #[arg(long, requires = "angle")]
        trace: Option<PathBuf>,
        /// Run the full planner sweep.
        #[arg(long)]
        sweep: bool,
        #[arg(long, requires = "sweep")]
        csv: Option<PathBuf>,
        /// Simulate the ground-truth level instead of the perceived one.
        #[arg(long)]
        truth: bool,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Render a level.
    Render {
        level: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        classmap: Option<PathBuf>,
    },
}

fn load_config(path: Option<&Path>) -> Result<AgentConfig> {
    match path {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            parse_config(&text).with_context(|| format!("in {}", p.display()))
        }
        None => Ok(AgentConfig::default()),
    }
}

fn load_scene(path: &Path) -> Result<Scene> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    load_level(&text).with_context(|| format!("in {}", path.display()))
}

fn level_name(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn print_episode(r: &EpisodeResult) {
    for (i, s) in r.shots.iter().enumerate() {
        let tap = s.shot.tap_time.map(|t| format!(" tap {t:.3}s")).unwrap_or_default();
        let predicted = s
            .predicted
            .map(|(raw, robust)| format!(" predicted {raw} (robust {robust:.1})"))
            .unwrap_or_default();
        println!(
            "shot {}: angle {:.3}{tap} score {} -> {}{predicted}",
            i + 1,
            s.shot.angle,
            s.score_before,
            s.score_after
        );
    }
    println!(
        "{} {}: {} score {} birds {} pigs remaining {}",
        r.agent,
        r.level,
        r.outcome.name(),
        r.score,
        r.birds_used,
        r.pigs_remaining
    );
}

fn imagined(truth: &Scene, cfg: &AgentConfig, use_truth: bool) -> Result<Scene> {
    if use_truth {
        return Ok(truth.clone());
    }
    let rec = perceive(&rasterize(truth, cfg.width, cfg.height), &cfg.perception)?;
    Ok(to_scene(&rec, &cfg.template))
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Play { level, agent, seed, config, dump_dir } => {
            let cfg = load_config(config.as_deref())?;
            let truth = load_scene(&level)?;
            if let Some(d) = &dump_dir {
                fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
            }
            let mut dump_err = None;
            let on_shot = |i: usize, grid: &_, choice: &birdsim::agent::Choice| {
                let Some(d) = &dump_dir else { return };
                let mut res = write_classmap(grid, d.join(format!("shot{:02}.pgm", i + 1))).map_err(anyhow::Error::from);
                if let (Ok(()), Some(dec)) = (&res, &choice.decision) {
                    res = fs::write(d.join(format!("shot{:02}_sweep.csv", i + 1)), dec.sweep_csv()).map_err(Into::into);
                }
                if let Err(e) = res {
                    dump_err.get_or_insert(e);
                }
            };
            let name = level_name(&level);
            let result = match agent {
                AgentKind::Sim => play_episode(&name, truth, &mut SimAgent::new(cfg.clone()), &cfg, on_shot),
                AgentKind::Naive => play_episode(&name, truth, &mut NaiveAgent::new(cfg.clone(), seed), &cfg, on_shot),
            };
            if let Some(e) = dump_err {
                return Err(e.context("writing dump"));
            }
            print_episode(&result);
        }
        Command::Bench { levels, trials, csv, seed, config } => {
            let cfg = load_config(config.as_deref())?;
            let mut paths: Vec<PathBuf> = fs::read_dir(&levels)
                .with_context(|| format!("reading {}", levels.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "level"))
                .collect();
            paths.sort();
            if paths.is_empty() {
                bail!("no .level files in {}", levels.display());
            }
            let scenes = paths
                .iter()
                .map(|p| Ok((level_name(p), load_scene(p)?)))
                .collect::<Result<Vec<_>>>()?;
            let report = bench(&scenes, &BenchConfig { trials, base_seed: seed, agent: cfg });
            if let Some(p) = &csv {
                fs::write(p, report.csv()).with_context(|| format!("writing {}", p.display()))?;
            }
            print!("{}", report.render());
        }
        Command::Perceive { classmap, overlay: overlay_path, report: report_path } => {
            let grid = read_classmap(&classmap).with_context(|| format!("reading {}", classmap.display()))?;
            let cfg = AgentConfig::default();
            let rec = perceive(&grid, &cfg.perception)?;
            if let Some(p) = &overlay_path {
                fs::write(p, encode_image(&overlay(&grid, &rec))).with_context(|| format!("writing {}", p.display()))?;
            }
            write_out(report_path.as_deref(), &report(&rec))?;
        }
        Command::Simulate { level, angle, tap, trace, sweep, csv, truth, config, workers } => {
            let mut cfg = load_config(config.as_deref())?;
            if let Some(w) = workers {
                cfg.planner.workers = w;
            }
            let scene = imagined(&load_scene(&level)?, &cfg, truth)?;
            if sweep {
                let d = plan(&scene, &cfg.planner)?;
                write_out(csv.as_deref(), &d.sweep_csv())?;
                if csv.is_some() {
                    println!(
                        "chosen angle {:.4} raw {} robust {:.1} (raw argmax angle {:.4})",
                        d.chosen.angle,
                        d.raw_score,
                        d.robust_score,
                        d.per_angle[d.raw_argmax()].candidate.shot.angle
                    );
                }
            } else {
                let angle = angle.expect("clap enforces --angle without --sweep");
                let shot = Shot { angle, tap_time: tap };
                let mut rows = String::from("step,time,score,alive_pigs,active_bodies,destroyed,state_hash\n");
                let candidate = Candidate { angle_index: 0, tap_index: tap.map(|_| 0), shot };
                let out = run_simulation_traced(&scene, candidate, &cfg.planner, |s, ev| {
                    if trace.is_some() {
                        let destroyed: Vec<String> = ev.destroyed.iter().map(|d| d.to_string()).collect();
                        let _ = writeln!(
                            rows,
                            "{},{:.4},{},{},{},{},{:016x}",
                            s.steps,
                            s.time,
                            current_score(s),
                            s.alive_pigs(),
                            s.bodies.iter().filter(|b| b.is_dynamic()).count(),
                            destroyed.join(" "),
                            state_hash(s)
                        );
                    }
                })?;
                if let Some(p) = &trace {
                    fs::write(p, rows).with_context(|| format!("writing {}", p.display()))?;
                }
                println!(
                    "angle {:.4} score {} pigs killed {} destroyed {} steps {} settled {} tapped {} hash {:016x}",
                    angle, out.score, out.pigs_killed, out.destroyed, out.steps, out.settled, out.tapped, out.trace_hash
                );
            }
        }
        Command::Render { level, out, classmap } => {
            let cfg = AgentConfig::default();
            let scene = load_scene(&level)?;
            let grid = rasterize(&scene, cfg.width, cfg.height);
            write_image(&grid, &Palette, &out).with_context(|| format!("writing {}", out.display()))?;
            if let Some(p) = &classmap {
                write_classmap(&grid, p).with_context(|| format!("writing {}", p.display()))?;
            }
        }
    }
    Ok(())
}
