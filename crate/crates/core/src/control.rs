//! The contingency-invoking control layer.
//!
//! Guidance proposes an acceleration. The controller clamps it to the
//! strategy's bounds, looks one tick ahead under the planning model, and
//! replaces it with the contingency (maximal model braking) whenever the
//! predicted stopping path would no longer be clear of other agents'
//! stopping regions.
//!
//! Constraint tightening pulls the throttle bound down toward the contingency
//! deceleration as the free gap ahead approaches the current stopping
//! distance:
//!
//! ```text
//! d      = v² / (2 · decel)
//! λ      = clamp((g − d) / (β·d + ε), 0, 1)
//! a_hi   = −decel + λ · (a_max + decel)
//! ```
//!
//! The braking bound never moves.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::{predict_model, stopping_distance, AgentState, ModelParams};
use crate::error::DomainError;
use crate::geom::{point_segment_distance, PolylinePath, Vec2};
use crate::safety::{disjointness, stopping_path, SafetyParams, StoppingRegion};

pub const NOMINAL_BRAKE_FRACTION: f64 = 0.9;
pub const CONSERVATIVE_BRAKE_FRACTION: f64 = 0.8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSet {
    pub a_lo: f64,
    pub a_hi: f64,
}

impl ConstraintSet {
    pub fn contingency(decel_mag: f64) -> Self {
        ConstraintSet {
            a_lo: -decel_mag,
            a_hi: -decel_mag,
        }
    }

    pub fn clamp(&self, a: f64) -> f64 {
        a.clamp(self.a_lo, self.a_hi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyKind {
    Tightening,
    Conservative,
    None,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 3] = [
        StrategyKind::Tightening,
        StrategyKind::Conservative,
        StrategyKind::None,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StrategyKind::Tightening => "tightening",
            StrategyKind::Conservative => "conservative",
            StrategyKind::None => "none",
        }
    }

    /// Fraction of peak braking the planning model assumes.
    pub fn brake_fraction(self) -> f64 {
        match self {
            StrategyKind::Conservative => CONSERVATIVE_BRAKE_FRACTION,
            StrategyKind::Tightening | StrategyKind::None => NOMINAL_BRAKE_FRACTION,
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrategyKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "tightening" => Ok(StrategyKind::Tightening),
            "conservative" => Ok(StrategyKind::Conservative),
            "none" => Ok(StrategyKind::None),
            other => Err(format!(
                "unknown strategy `{other}` (expected tightening, conservative or none)"
            )),
        }
    }
}

fn default_beta() -> f64 {
    1.0
}

fn default_epsilon() -> f64 {
    1.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Strategy {
    pub kind: StrategyKind,
    /// Width of the tightening band as a multiple of the stopping distance.
    #[serde(default = "default_beta")]
    pub beta: f64,
    /// Width of the tightening band at standstill (m).
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Extra ticks a contingency stays engaged after the lookahead clears.
    /// Zero releases immediately.
    #[serde(default)]
    pub release_hold_ticks: u32,
}

impl Strategy {
    pub fn new(kind: StrategyKind) -> Self {
        Strategy {
            kind,
            beta: default_beta(),
            epsilon: default_epsilon(),
            release_hold_ticks: 0,
        }
    }

    pub fn tightening(beta: f64, epsilon: f64) -> Self {
        Strategy {
            beta,
            epsilon,
            ..Self::new(StrategyKind::Tightening)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Command {
    pub a_cmd: f64,
    pub contingency_active: bool,
    pub bounds_used: ConstraintSet,
    /// Free gap minus current stopping distance (m); negative when violated.
    pub margin: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DanceReport {
    pub toggle_count: usize,
    pub dance_detected: bool,
    pub window: (f64, f64),
}

pub const DEFAULT_TOGGLE_THRESHOLD: usize = 6;
pub const DEFAULT_DANCE_WINDOW_S: f64 = 10.0;

const SEARCH_ITERS: usize = 200;

/// First arclength offset in `[0, len]` along `a + dir·σ` at which the point
/// comes strictly within `reach` of segment `q0q1`.
fn first_entry(a: Vec2, dir: Vec2, len: f64, q0: Vec2, q1: Vec2, reach: f64) -> Option<f64> {
    let dist = |sigma: f64| point_segment_distance(a + dir * sigma, q0, q1);
    if dist(0.0) < reach {
        return Some(0.0);
    }
    // distance to a convex set along a line is convex: locate the minimum
    let (mut lo, mut hi) = (0.0, len);
    for _ in 0..SEARCH_ITERS {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if dist(m1) <= dist(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
        if hi - lo <= f64::EPSILON * len.max(1.0) {
            break;
        }
    }
    let sigma_min = 0.5 * (lo + hi);
    if dist(sigma_min) >= reach {
        return None;
    }
    // dist is decreasing on [0, sigma_min]; bisect the crossing
    let (mut outside, mut inside) = (0.0, sigma_min);
    for _ in 0..SEARCH_ITERS {
        let mid = 0.5 * (outside + inside);
        if mid <= outside || mid >= inside {
            break;
        }
        if dist(mid) < reach {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    Some(outside)
}

/// Free arclength the ego can sweep along `path` from its current position
/// before its footprint (`footprint_radius`, already inflated) first
/// overlaps another agent's stopping region. The search covers
/// `[s, s + horizon]`, continuing past the path end along the final segment.
/// Returns `f64::INFINITY` when nothing is hit, and 0 when already touching.
pub fn gap_to_region(
    ego: &AgentState,
    ego_id: &str,
    path: &PolylinePath,
    footprint_radius: f64,
    others: &[StoppingRegion],
    horizon: f64,
) -> f64 {
    let capsules: Vec<_> = others
        .iter()
        .filter(|r| r.agent_id != ego_id)
        .flat_map(|r| r.members.iter())
        .flat_map(|m| m.footprint.capsules.iter())
        .collect();
    if capsules.is_empty() {
        return f64::INFINITY;
    }
    let s0 = ego.s.clamp(0.0, path.length());
    let s_end = s0 + horizon.max(0.0);

    // straight pieces [start arclength, end arclength] covering the search span
    let mut pieces = Vec::new();
    if path.is_stationary() {
        pieces.push((s0, s0));
    } else {
        let cum = path.cumulative_arclength();
        for i in 0..path.segment_count() {
            let (a, b) = (cum[i], cum[i + 1]);
            if b > s0 && a < s_end {
                pieces.push((a.max(s0), b.min(s_end)));
            }
        }
        if s_end > path.length() {
            pieces.push((path.length().max(s0), s_end));
        }
        if pieces.is_empty() {
            pieces.push((s0, s0));
        }
    }

    let mut best = f64::INFINITY;
    for (a, b) in pieces {
        if a - s0 >= best {
            break;
        }
        let start = path.point_at_extended(a).expect("piece start within path");
        let end = path.point_at_extended(b).expect("piece end within path");
        let len = b - a;
        let dir = if len > 0.0 { (end - start) * (1.0 / start.distance(end)) } else { Vec2::ZERO };
        for c in &capsules {
            let reach = footprint_radius + c.radius;
            if let Some(sigma) =
                first_entry(start, dir, len, c.segment_start, c.segment_end, reach)
            {
                best = best.min(a - s0 + sigma);
            }
        }
    }
    best.max(0.0)
}

/// Acceleration bounds for `strategy` at speed `v` with free gap `g`.
pub fn tightened_bounds(v: f64, g: f64, strategy: &Strategy, model: &ModelParams) -> ConstraintSet {
    let decel = strategy.kind.brake_fraction() * model.a_brake_peak;
    let nominal = ConstraintSet {
        a_lo: -decel,
        a_hi: model.a_max,
    };
    match strategy.kind {
        StrategyKind::None | StrategyKind::Conservative => nominal,
        StrategyKind::Tightening => {
            let lambda = tightening_lambda(v, g, decel, strategy.beta, strategy.epsilon);
            if lambda >= 1.0 {
                return nominal;
            }
            ConstraintSet {
                a_lo: -decel,
                a_hi: -decel + lambda * (model.a_max + decel),
            }
        }
    }
}

/// Proximity weight: 0 at or inside the stopping distance, 1 once the gap
/// exceeds it by `beta·d + epsilon`.
pub fn tightening_lambda(v: f64, g: f64, decel: f64, beta: f64, epsilon: f64) -> f64 {
    let d = v * v / (2.0 * decel);
    let excess = g - d;
    if excess <= 0.0 {
        return 0.0;
    }
    if g.is_infinite() {
        return 1.0;
    }
    let band = beta * d + epsilon;
    if band <= 0.0 {
        return 1.0;
    }
    (excess / band).clamp(0.0, 1.0)
}

/// Everything the controller observes for one agent at one tick.
#[derive(Clone, Copy, Debug)]
pub struct ControlContext<'a> {
    pub agent_id: &'a str,
    pub state: &'a AgentState,
    pub path: &'a PolylinePath,
    pub path_index: usize,
    pub radius: f64,
    pub safety: &'a SafetyParams,
    pub dt: f64,
    /// Published stopping regions of every agent at the start of the tick.
    pub regions: &'a [StoppingRegion],
}

impl ControlContext<'_> {
    fn footprint_radius(&self) -> f64 {
        self.radius + self.safety.inflation_margin
    }

    /// Search horizon for the gap: the rest of the path or the current
    /// stopping distance, whichever reaches further.
    fn horizon(&self) -> f64 {
        let d = stopping_distance(self.state.v, self.safety.contingency_decel_mag).unwrap_or(0.0);
        (self.path.length() - self.state.s).max(0.0).max(d)
    }

    pub fn gap(&self) -> f64 {
        gap_to_region(
            self.state,
            self.agent_id,
            self.path,
            self.footprint_radius(),
            self.regions,
            self.horizon(),
        )
    }

    /// True when the stopping path along the followed path at `state` is
    /// clear of every other region.
    pub fn clear_at(&self, state: &AgentState) -> Result<bool, DomainError> {
        let mine = stopping_path(self.agent_id, self.path_index, state, self.path, self.safety, self.radius)?;
        let ego = StoppingRegion {
            agent_id: self.agent_id.to_owned(),
            members: vec![mine],
        };
        Ok(disjointness(&ego, self.regions).holds)
    }
}

/// Clamp guidance into `bounds`, then veto it with the contingency if one
/// model tick under the clamped command would leave no clear stopping path.
/// `hold` forces the contingency regardless of the lookahead.
pub fn select_command(
    ctx: &ControlContext<'_>,
    guidance_accel: f64,
    bounds: ConstraintSet,
    gap: f64,
    hold: bool,
) -> Result<Command, DomainError> {
    let decel = ctx.safety.contingency_decel_mag;
    let d = stopping_distance(ctx.state.v, decel)?;
    let margin = gap - d;
    let candidate = bounds.clamp(guidance_accel);
    let predicted = predict_model(ctx.state, candidate, ctx.dt);
    let contingency = hold || !ctx.clear_at(&predicted)?;
    Ok(Command {
        a_cmd: if contingency { -decel } else { candidate },
        contingency_active: contingency,
        bounds_used: bounds,
        margin,
    })
}

/// Count contingency on/off transitions across `samples` of `(t, active)`.
pub fn detect_dance(samples: &[(f64, bool)], toggle_threshold: usize) -> DanceReport {
    let toggle_count = samples.windows(2).filter(|w| w[0].1 != w[1].1).count();
    let window = match (samples.first(), samples.last()) {
        (Some(a), Some(b)) => (a.0, b.0),
        _ => (0.0, 0.0),
    };
    DanceReport {
        toggle_count,
        dance_detected: toggle_count >= toggle_threshold,
        window,
    }
}

/// Densest `window_s`-long window of `samples` by toggle count. Ties keep
/// the earliest window.
pub fn densest_dance_window(
    samples: &[(f64, bool)],
    toggle_threshold: usize,
    window_s: f64,
) -> DanceReport {
    let mut best = detect_dance(&samples[..samples.len().min(1)], toggle_threshold);
    let mut hi = 0;
    for lo in 0..samples.len() {
        hi = hi.max(lo);
        while hi + 1 < samples.len() && samples[hi + 1].0 - samples[lo].0 <= window_s + 1e-9 {
            hi += 1;
        }
        let report = detect_dance(&samples[lo..=hi], toggle_threshold);
        if report.toggle_count > best.toggle_count {
            best = report;
        }
    }
    best
}

/// Dance report over the final `window_s` seconds of `samples`.
pub fn trailing_dance_window(
    samples: &[(f64, bool)],
    toggle_threshold: usize,
    window_s: f64,
) -> DanceReport {
    let Some(&(t_end, _)) = samples.last() else {
        return detect_dance(samples, toggle_threshold);
    };
    let start = samples.partition_point(|&(t, _)| t < t_end - window_s - 1e-9);
    detect_dance(&samples[start..], toggle_threshold)
}
