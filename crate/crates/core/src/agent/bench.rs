use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use super::{naive_agent_play, sim_agent_play, AgentConfig, EpisodeResult};
use crate::world::Scene;

pub const AGENTS: [&str; 2] = ["sim", "naive"];

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub trials: usize,
    /// The naive agent plays trial `t` with seed `base_seed + t`.
    pub base_seed: u64,
    pub agent: AgentConfig,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self { trials: 4, base_seed: 0, agent: AgentConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub level: String,
    pub trial: usize,
    pub result: EpisodeResult,
}

/// Per-agent aggregates, computed once when the report is built.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentSummary {
    pub total: i64,
    pub trial_totals: Vec<i64>,
    pub level_averages: BTreeMap<String, f64>,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub levels: Vec<String>,
    pub trials: usize,
    /// Ordered by level, trial, then agent.
    pub rows: Vec<BenchRow>,
    pub summaries: BTreeMap<String, AgentSummary>,
}

/// Plays every level `trials` times with both agents. Episodes run in
/// parallel; the report order is fixed.
pub fn bench(levels: &[(String, Scene)], cfg: &BenchConfig) -> BenchReport {
    let mut jobs = Vec::new();
    for (li, _) in levels.iter().enumerate() {
        for trial in 0..cfg.trials {
            for agent in AGENTS {
                jobs.push((li, trial, agent));
            }
        }
    }
    let rows = jobs
        .par_iter()
        .map(|&(li, trial, agent)| {
            let (name, scene) = &levels[li];
            let result = match agent {
                "sim" => sim_agent_play(name, scene.clone(), &cfg.agent),
                _ => naive_agent_play(name, scene.clone(), &cfg.agent, cfg.base_seed + trial as u64),
            };
            BenchRow { level: name.clone(), trial, result }
        })
        .collect();
    BenchReport::from_rows(levels.iter().map(|(n, _)| n.clone()).collect(), cfg.trials, rows)
}

impl BenchReport {
    pub fn from_rows(levels: Vec<String>, trials: usize, rows: Vec<BenchRow>) -> Self {
        let summaries = AGENTS
            .iter()
            .map(|&a| (a.to_string(), summarize(&levels, trials, &rows, a)))
            .collect();
        Self { levels, trials, rows, summaries }
    }

    pub fn summary(&self, agent: &str) -> &AgentSummary {
        &self.summaries[agent]
    }

    /// `(sim - naive) / naive`, as a fraction.
    pub fn improvement(&self) -> f64 {
        let sim = self.summary("sim").total as f64;
        let naive = self.summary("naive").total as f64;
        if naive == 0.0 {
            if sim == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            (sim - naive) / naive
        }
    }

    /// Recomputes every aggregate from the rows and compares.
    pub fn is_consistent(&self) -> bool {
        AGENTS.iter().all(|&a| summarize(&self.levels, self.trials, &self.rows, a) == self.summaries[a])
            && self.summaries.values().all(|s| s.trial_totals.iter().sum::<i64>() == s.total)
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("level,trial,agent,score,birds_used,pigs_remaining,failed,outcome\n");
        for r in &self.rows {
            let e = &r.result;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.level,
                r.trial + 1,
                e.agent,
                e.score,
                e.birds_used,
                e.pigs_remaining,
                e.failed,
                e.outcome.name()
            );
        }
        out
    }

    /// Scores of one agent laid out by level and trial, with per-level
    /// averages and a totals row. Failed episodes are marked `*`.
    pub fn table(&self, agent: &str) -> String {
        let s = self.summary(agent);
        let mut out = String::new();
        let _ = write!(out, "{:<14}", "level");
        for t in 0..self.trials {
            let _ = write!(out, "{:>12}", format!("trial {}", t + 1));
        }
        let _ = writeln!(out, "{:>12}", "avg");
        for level in &self.levels {
            let _ = write!(out, "{level:<14}");
            for t in 0..self.trials {
                let cell = self
                    .rows
                    .iter()
                    .find(|r| &r.level == level && r.trial == t && r.result.agent == agent)
                    .map(|r| format!("{}{}", r.result.score, if r.result.failed { "*" } else { "" }))
                    .unwrap_or_default();
                let _ = write!(out, "{cell:>12}");
            }
            let _ = writeln!(out, "{:>12.1}", s.level_averages[level]);
        }
        let _ = write!(out, "{:<14}", "total");
        for t in &s.trial_totals {
            let _ = write!(out, "{t:>12}");
        }
        let _ = writeln!(out, "{:>12.1}", s.total as f64 / self.trials.max(1) as f64);
        out
    }

    /// Both tables, the improvement and the failure counts.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (agent, title) in [("naive", "naive agent"), ("sim", "simulation agent")] {
            let _ = writeln!(out, "{title}\n{}", self.table(agent));
        }
        let _ = writeln!(
            out,
            "total: sim {} naive {}  improvement {:+.1}%",
            self.summary("sim").total,
            self.summary("naive").total,
            100.0 * self.improvement()
        );
        let _ = writeln!(
            out,
            "failures: sim {} naive {}",
            self.summary("sim").failures,
            self.summary("naive").failures
        );
        out
    }
}

fn summarize(levels: &[String], trials: usize, rows: &[BenchRow], agent: &str) -> AgentSummary {
    let mine: Vec<&BenchRow> = rows.iter().filter(|r| r.result.agent == agent).collect();
    let mut trial_totals = vec![0; trials];
    for r in &mine {
        if r.trial < trials {
            trial_totals[r.trial] += r.result.score;
        }
    }
    let level_averages = levels
        .iter()
        .map(|l| {
            let scores: Vec<i64> = mine.iter().filter(|r| &r.level == l).map(|r| r.result.score).collect();
            let avg = if scores.is_empty() { 0.0 } else { scores.iter().sum::<i64>() as f64 / scores.len() as f64 };
            (l.clone(), avg)
        })
        .collect();
    AgentSummary {
        total: mine.iter().map(|r| r.result.score).sum(),
        trial_totals,
        level_averages,
        failures: mine.iter().filter(|r| r.result.failed).count(),
    }
}
