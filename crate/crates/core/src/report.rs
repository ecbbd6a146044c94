//! Speed profiles, per-trial summaries and strategy comparisons.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::control::{
    detect_dance, trailing_dance_window, DanceReport, StrategyKind, DEFAULT_TOGGLE_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::sim::TrialLog;

/// Distance over which [`TrialSummary::mean_speed`] is measured (m).
pub const MEAN_SPEED_EXTENT: f64 = 200.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeedSample {
    pub t: f64,
    pub s: f64,
    pub v: f64,
}

/// Speed against path position for one agent, one sample per tick.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeedProfile {
    pub agent_id: String,
    pub strategy: StrategyKind,
    pub samples: Vec<SpeedSample>,
}

impl SpeedProfile {
    /// Index of the first sample at rest after the agent has moved.
    pub fn first_stop(&self) -> Option<usize> {
        let moving = self.samples.iter().position(|x| x.v > 0.0)?;
        self.samples[moving..]
            .iter()
            .position(|x| x.v == 0.0)
            .map(|k| k + moving)
    }

    /// Samples up to and including the first stop, or all of them.
    pub fn approach(&self) -> &[SpeedSample] {
        match self.first_stop() {
            Some(k) => &self.samples[..=k],
            None => &self.samples,
        }
    }

    /// Linear interpolation of speed and time at position `s` along the
    /// approach. `None` outside the covered positions.
    pub fn at_position(&self, s: f64) -> Option<SpeedSample> {
        let a = self.approach();
        let first = a.first()?;
        if s < first.s || s > a.last()?.s {
            return None;
        }
        let k = a.partition_point(|x| x.s < s);
        if k == 0 {
            // first sample sits exactly at s; use its latest occurrence
            let last_here = a.partition_point(|x| x.s <= s) - 1;
            return Some(a[last_here]);
        }
        let (p, q) = (a[k - 1], a[k]);
        let u = (s - p.s) / (q.s - p.s);
        Some(SpeedSample {
            t: p.t + u * (q.t - p.t),
            s,
            v: p.v + u * (q.v - p.v),
        })
    }

    /// Distance over elapsed time from the first sample to position `s`.
    pub fn mean_speed_to(&self, s: f64) -> Option<f64> {
        let first = self.samples.first()?;
        let hit = self.at_position(s)?;
        let dt = hit.t - first.t;
        if dt > 0.0 {
            Some((s - first.s) / dt)
        } else {
            None
        }
    }
}

pub fn speed_profile(log: &TrialLog, agent_id: &str) -> Result<SpeedProfile> {
    let spec = log
        .config
        .agent(agent_id)
        .ok_or_else(|| Error::UnknownAgent(agent_id.to_owned()))?;
    Ok(SpeedProfile {
        agent_id: agent_id.to_owned(),
        strategy: spec.strategy.kind,
        samples: log
            .records_for(agent_id)
            .map(|r| SpeedSample { t: r.t, s: r.s, v: r.v })
            .collect(),
    })
}

/// Contingency flag per tick for one agent.
pub fn contingency_samples(log: &TrialLog, agent_id: &str) -> Vec<(f64, bool)> {
    log.records_for(agent_id).map(|r| (r.t, r.contingency)).collect()
}

/// Dance report over the final window before the agent's first stop, or
/// before the end of the log when it never stops.
pub fn ending_dance(log: &TrialLog, agent_id: &str, window_s: f64) -> Result<DanceReport> {
    let profile = speed_profile(log, agent_id)?;
    let samples = contingency_samples(log, agent_id);
    let end = match profile.first_stop() {
        Some(k) if !log.terminated_by_collision => k + 1,
        _ => samples.len(),
    };
    Ok(trailing_dance_window(&samples[..end], DEFAULT_TOGGLE_THRESHOLD, window_s))
}

/// Smallest position `s*` on the `step` grid in `[lo, hi]` at which `early`
/// has the higher mean speed over the approach to `s*` while `late` is at
/// least as fast as `early` at every sample from `s*` to the first stop of
/// either profile.
pub fn speed_crossover(
    early: &SpeedProfile,
    late: &SpeedProfile,
    lo: f64,
    hi: f64,
    step: f64,
) -> Option<f64> {
    let stop_of = |p: &SpeedProfile| p.approach().last().map(|x| x.s);
    let stop = stop_of(early)?.min(stop_of(late)?);
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|k| lo + k as f64 * step).find(|&s| {
        if s > stop {
            return false;
        }
        let (Some(me), Some(ml)) = (early.mean_speed_to(s), late.mean_speed_to(s)) else {
            return false;
        };
        me >= ml
            && early
                .approach()
                .iter()
                .filter(|x| x.s >= s && x.s <= stop)
                .all(|x| late.at_position(x.s).is_some_and(|y| x.v <= y.v))
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub agent_id: String,
    pub strategy: StrategyKind,
    pub collided: bool,
    /// Smallest physical clearance to any other agent (m); ≤ 0 on contact.
    pub min_gap: f64,
    pub final_position: f64,
    pub toggle_count: usize,
    /// Mean speed over the first [`MEAN_SPEED_EXTENT`] metres, absent when
    /// the agent never got that far.
    pub mean_speed: Option<f64>,
    pub first_contingency_position: Option<f64>,
}

/// Summary of the log's primary agent.
pub fn summarize(log: &TrialLog) -> TrialSummary {
    let primary = log.config.primary_agent();
    summarize_agent(log, &primary.id).expect("primary agent is in its own config")
}

pub fn summarize_agent(log: &TrialLog, agent_id: &str) -> Result<TrialSummary> {
    let profile = speed_profile(log, agent_id)?;
    let cfg = &log.config;

    // every logged state plus the states after the last tick
    let mut frames: Vec<Vec<(&str, f64)>> = Vec::new();
    let n = cfg.agents.len();
    for chunk in log.records.chunks(n) {
        frames.push(chunk.iter().map(|r| (r.agent_id.as_str(), r.s)).collect());
    }
    frames.push(
        log.final_states
            .iter()
            .map(|a| (a.agent_id.as_str(), a.state.s))
            .collect(),
    );
    let mut min_gap = f64::INFINITY;
    let me = cfg.agent(agent_id).expect("checked by speed_profile");
    for frame in &frames {
        let Some(&(_, s_me)) = frame.iter().find(|(id, _)| *id == agent_id) else {
            continue;
        };
        let p_me = me.active().point_at_extended(s_me)?;
        for &(id, s) in frame.iter().filter(|(id, _)| *id != agent_id) {
            let other = cfg.agent(id).ok_or_else(|| Error::UnknownAgent(id.to_owned()))?;
            let p = other.active().point_at_extended(s)?;
            min_gap = min_gap.min(p_me.distance(p) - me.radius - other.radius);
        }
    }

    let final_position = log
        .final_states
        .iter()
        .find(|a| a.agent_id == agent_id)
        .map(|a| a.state.s)
        .or_else(|| profile.samples.last().map(|x| x.s))
        .unwrap_or(me.s0);

    let toggles = contingency_samples(log, agent_id);
    Ok(TrialSummary {
        agent_id: agent_id.to_owned(),
        strategy: profile.strategy,
        collided: log.collisions().next().is_some(),
        min_gap,
        final_position,
        toggle_count: detect_dance(&toggles, DEFAULT_TOGGLE_THRESHOLD).toggle_count,
        mean_speed: profile.mean_speed_to(MEAN_SPEED_EXTENT),
        first_contingency_position: log
            .records_for(agent_id)
            .find(|r| r.contingency)
            .map(|r| r.s),
    })
}

impl TrialSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub rows: Vec<TrialSummary>,
}

fn strategy_rank(kind: StrategyKind) -> usize {
    StrategyKind::ALL.iter().position(|&k| k == kind).unwrap_or(usize::MAX)
}

/// Rows ordered Tightening, Conservative, None; ties keep input order.
pub fn compare(summaries: &[TrialSummary]) -> Comparison {
    let mut rows = summaries.to_vec();
    rows.sort_by_key(|r| strategy_rank(r.strategy));
    Comparison { rows }
}

impl Comparison {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("comparison serializes")
    }

    pub fn to_table(&self) -> String {
        let fmt_opt = |x: Option<f64>| x.map_or_else(|| "-".to_owned(), |x| format!("{x:.3}"));
        let header = [
            "strategy",
            "agent",
            "collided",
            "min_gap",
            "final_position",
            "toggles",
            "mean_speed",
            "first_contingency",
        ];
        let body: Vec<[String; 8]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.strategy.to_string(),
                    r.agent_id.clone(),
                    r.collided.to_string(),
                    format!("{:.3}", r.min_gap),
                    format!("{:.3}", r.final_position),
                    r.toggle_count.to_string(),
                    fmt_opt(r.mean_speed),
                    fmt_opt(r.first_contingency_position),
                ]
            })
            .collect();
        let mut widths = header.map(str::len);
        for row in &body {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = String::new();
        let mut line = |cells: &[&str]| {
            let parts: Vec<String> = cells
                .iter()
                .zip(widths)
                .enumerate()
                .map(|(i, (c, w))| if i < 2 { format!("{c:<w$}") } else { format!("{c:>w$}") })
                .collect();
            let _ = writeln!(out, "{}", parts.join("  ").trim_end());
        };
        line(&header);
        for row in &body {
            line(&row.iter().map(String::as_str).collect::<Vec<_>>());
        }
        out
    }
}
