//! Deterministic discrete-time engine.
//!
//! Each tick every agent publishes its stopping region from the pre-tick
//! state, every controller decides from that same snapshot, and then all
//! plants advance together. Records within a tick are ordered by agent id,
//! so the order agents appear in the scenario does not affect the log.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::control::{
    densest_dance_window, select_command, tightened_bounds, Command, ConstraintSet,
    ControlContext, DanceReport, Strategy, StrategyKind, DEFAULT_DANCE_WINDOW_S,
    DEFAULT_TOGGLE_THRESHOLD,
};
use crate::dynamics::{step_plant, AgentState, ModelParams, PlantParams};
use crate::error::{ConfigError, DomainError, Error, Result};
use crate::geom::{PolylinePath, Vec2};
use crate::safety::{disjointness, stopping_region, SafetyParams, StoppingRegion};

/// Actuation lag that makes the unmitigated paper run collide while the
/// conservative model does not. Found by the calibration sweep in the
/// acceptance suite.
pub const CALIBRATED_TAU: f64 = 0.3;

pub const DEFAULT_DT: f64 = 0.05;
pub const DEFAULT_DURATION: f64 = 60.0;

/// Gain (1/s) of the cruise guidance speed loop.
pub const CRUISE_GAIN: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GuidanceSpec {
    /// Constant `+a_max`, regardless of surroundings.
    FullThrottle {},
    CruiseTo { target_speed: f64 },
    Stationary {},
}

impl GuidanceSpec {
    pub fn acceleration(&self, state: &AgentState, model: &ModelParams) -> f64 {
        match *self {
            GuidanceSpec::FullThrottle {} => model.a_max,
            GuidanceSpec::CruiseTo { target_speed } => {
                (CRUISE_GAIN * (target_speed - state.v)).clamp(-model.decel(), model.a_max)
            }
            GuidanceSpec::Stationary {} => 0.0,
        }
    }
}

fn is_zero(v: &usize) -> bool {
    *v == 0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    pub id: String,
    /// Followable paths, all sharing one arclength coordinate.
    pub paths: Vec<PolylinePath>,
    /// Index of the path the agent actually drives.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub active_path: usize,
    pub s0: f64,
    pub v0: f64,
    /// Physical footprint radius (m).
    pub radius: f64,
    pub model: ModelParams,
    pub plant: PlantParams,
    pub safety: SafetyParams,
    pub strategy: Strategy,
    pub guidance: GuidanceSpec,
    /// Upper speed limit of the plant (m/s).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speed_cap: Option<f64>,
}

impl AgentSpec {
    pub fn active(&self) -> &PolylinePath {
        &self.paths[self.active_path]
    }

    /// Switch strategy, keeping the model brake fraction and the contingency
    /// deceleration consistent with it.
    pub fn set_strategy(&mut self, kind: StrategyKind) {
        self.strategy.kind = kind;
        self.model.brake_fraction = kind.brake_fraction();
        self.safety.contingency_decel_mag = self.model.decel();
    }

    pub fn position(&self, state: &AgentState) -> Vec2 {
        self.active()
            .point_at_extended(state.s)
            .expect("state arclength validated non-negative")
    }

    fn validate(&self, i: usize) -> std::result::Result<(), ConfigError> {
        let f = |name: &str| format!("agents[{i}].{name}");
        let finite_pos = |name: &str, x: f64| {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(ConfigError::new(f(name), format!("must be positive and finite, got {x}")))
            }
        };
        if self.id.is_empty()
            || !self
                .id
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            return Err(ConfigError::new(
                f("id"),
                "must be non-empty and use only ASCII letters, digits, `_` or `-`",
            ));
        }
        if self.paths.is_empty() {
            return Err(ConfigError::new(f("paths"), "at least one path is required"));
        }
        if self.active_path >= self.paths.len() {
            return Err(ConfigError::new(
                f("active_path"),
                format!("index {} but only {} paths", self.active_path, self.paths.len()),
            ));
        }
        for (k, p) in self.paths.iter().enumerate() {
            if !(self.s0.is_finite() && self.s0 >= 0.0 && self.s0 <= p.length()) {
                return Err(ConfigError::new(
                    f("s0"),
                    format!("{} outside [0, {}] of paths[{k}]", self.s0, p.length()),
                ));
            }
        }
        if !(self.v0.is_finite() && self.v0 >= 0.0) {
            return Err(ConfigError::new(f("v0"), format!("must be >= 0, got {}", self.v0)));
        }
        finite_pos("radius", self.radius)?;
        finite_pos("model.a_max", self.model.a_max)?;
        finite_pos("model.a_brake_peak", self.model.a_brake_peak)?;
        let fraction = self.model.brake_fraction;
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(ConfigError::new(
                f("model.brake_fraction"),
                format!("must lie in (0, 1], got {fraction}"),
            ));
        }
        let expected = self.strategy.kind.brake_fraction();
        if (fraction - expected).abs() > 1e-12 {
            return Err(ConfigError::new(
                f("model.brake_fraction"),
                format!("strategy {} requires {expected}, got {fraction}", self.strategy.kind),
            ));
        }
        let tau = self.plant.actuation_lag_tau;
        if !(tau.is_finite() && tau >= 0.0) {
            return Err(ConfigError::new(
                f("plant.actuation_lag_tau"),
                format!("must be >= 0, got {tau}"),
            ));
        }
        finite_pos("plant.a_brake_peak", self.plant.a_brake_peak)?;
        if self.plant.a_brake_peak < self.model.decel() {
            return Err(ConfigError::new(
                f("plant.a_brake_peak"),
                "must be at least the model deceleration",
            ));
        }
        let m = self.safety.inflation_margin;
        if !(m.is_finite() && m >= 0.0) {
            return Err(ConfigError::new(
                f("safety.inflation_margin"),
                format!("must be >= 0, got {m}"),
            ));
        }
        let c = self.safety.contingency_decel_mag;
        if (c - self.model.decel()).abs() > 1e-9 * self.model.decel() || c.is_nan() {
            return Err(ConfigError::new(
                f("safety.contingency_decel_mag"),
                format!(
                    "must equal model.brake_fraction * model.a_brake_peak = {}, got {c}",
                    self.model.decel()
                ),
            ));
        }
        if !(self.strategy.beta.is_finite() && self.strategy.beta >= 0.0) {
            return Err(ConfigError::new(f("strategy.beta"), "must be >= 0"));
        }
        finite_pos("strategy.epsilon", self.strategy.epsilon)?;
        match self.guidance {
            GuidanceSpec::CruiseTo { target_speed } if !(target_speed.is_finite() && target_speed >= 0.0) => {
                return Err(ConfigError::new(f("guidance.target_speed"), "must be >= 0"));
            }
            _ => {}
        }
        if let Some(cap) = self.speed_cap {
            finite_pos("speed_cap", cap)?;
            if self.v0 > cap {
                return Err(ConfigError::new(f("v0"), "exceeds speed_cap"));
            }
        }
        if self.active().is_stationary() {
            if self.v0 != 0.0 {
                return Err(ConfigError::new(f("v0"), "a one-vertex path cannot move"));
            }
            if !matches!(self.guidance, GuidanceSpec::Stationary {}) {
                return Err(ConfigError::new(
                    f("guidance"),
                    "a one-vertex path needs stationary guidance",
                ));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub dt: f64,
    pub duration: f64,
    pub agents: Vec<AgentSpec>,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

impl ScenarioConfig {
    pub fn validate(&self) -> std::result::Result<(), ConfigError> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(ConfigError::new("dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.duration.is_finite() && self.duration >= self.dt) {
            return Err(ConfigError::new("duration", "must be finite and at least dt"));
        }
        if self.agents.is_empty() {
            return Err(ConfigError::new("agents", "at least one agent is required"));
        }
        let mut seen = HashSet::new();
        for (i, a) in self.agents.iter().enumerate() {
            if !seen.insert(a.id.as_str()) {
                return Err(ConfigError::new(format!("agents[{i}].id"), format!("duplicate id `{}`", a.id)));
            }
            a.validate(i)?;
        }
        Ok(())
    }

    pub fn tick_count(&self) -> usize {
        (self.duration / self.dt + 1e-9).floor() as usize
    }

    pub fn agent(&self, id: &str) -> Option<&AgentSpec> {
        self.agents.iter().find(|a| a.id == id)
    }

    /// Parse a scenario document. Unknown keys are rejected.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("scenario: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// Apply `kind` to every agent that is not stationary.
    pub fn with_strategy(mut self, kind: StrategyKind) -> Self {
        for a in &mut self.agents {
            if !matches!(a.guidance, GuidanceSpec::Stationary {}) {
                a.set_strategy(kind);
            }
        }
        self
    }

    /// Strategy label of the first moving agent.
    pub fn primary_strategy(&self) -> StrategyKind {
        self.primary_agent().strategy.kind
    }

    /// The first agent with non-stationary guidance, else the first agent.
    pub fn primary_agent(&self) -> &AgentSpec {
        self.agents
            .iter()
            .find(|a| !matches!(a.guidance, GuidanceSpec::Stationary {}))
            .unwrap_or(&self.agents[0])
    }
}

/// f64 fields that may be +infinity travel as `null` in JSON.
pub(crate) mod inf_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_infinite() && *x > 0.0 {
            s.serialize_none()
        } else {
            s.serialize_f64(*x)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TickRecord {
    pub t: f64,
    pub agent_id: String,
    pub s: f64,
    pub v: f64,
    pub a_cmd: f64,
    /// Acceleration the plant realized over this tick.
    pub a_applied: f64,
    pub contingency: bool,
    pub a_hi_eff: f64,
    #[serde(with = "inf_as_null")]
    pub gap: f64,
    pub disjoint: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollisionEvent {
    pub t: f64,
    pub agent_a: String,
    pub agent_b: String,
    pub penetration: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TrialEvent {
    Collision(CollisionEvent),
    Dance { agent_id: String, report: DanceReport },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentSnapshot {
    pub agent_id: String,
    pub state: AgentState,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialLog {
    pub config: ScenarioConfig,
    pub ticks: usize,
    pub terminated_by_collision: bool,
    pub records: Vec<TickRecord>,
    pub events: Vec<TrialEvent>,
    /// States after the last executed tick.
    pub final_states: Vec<AgentSnapshot>,
}

pub const CSV_HEADER: &str = "t,agent_id,s,v,a_cmd,a_applied,contingency,a_hi_eff,gap,disjoint";

impl TrialLog {
    pub fn collisions(&self) -> impl Iterator<Item = &CollisionEvent> {
        self.events.iter().filter_map(|e| match e {
            TrialEvent::Collision(c) => Some(c),
            _ => None,
        })
    }

    pub fn records_for<'a>(&'a self, agent_id: &'a str) -> impl Iterator<Item = &'a TickRecord> + 'a {
        self.records.iter().filter(move |r| r.agent_id == agent_id)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.records.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            use std::fmt::Write;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                r.t,
                r.agent_id,
                r.s,
                r.v,
                r.a_cmd,
                r.a_applied,
                r.contingency as u8,
                r.a_hi_eff,
                r.gap,
                r.disjoint as u8
            )
            .unwrap();
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("log serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("trial log: {e}")))
    }
}

/// Parse the per-tick CSV written by [`TrialLog::to_csv`].
pub fn records_from_csv(text: &str) -> Result<Vec<TickRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        _ => return Err(Error::Parse("csv: missing or unexpected header".into())),
    }
    let num = |field: &str, line: usize| {
        field
            .parse::<f64>()
            .map_err(|e| Error::Parse(format!("csv line {line}: `{field}`: {e}")))
    };
    let flag = |field: &str, line: usize| match field {
        "1" => Ok(true),
        "0" => Ok(false),
        _ => Err(Error::Parse(format!("csv line {line}: bad flag `{field}`"))),
    };
    lines
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            let n = i + 2;
            let c: Vec<&str> = l.split(',').collect();
            if c.len() != 10 {
                return Err(Error::Parse(format!("csv line {n}: expected 10 columns")));
            }
            Ok(TickRecord {
                t: num(c[0], n)?,
                agent_id: c[1].to_owned(),
                s: num(c[2], n)?,
                v: num(c[3], n)?,
                a_cmd: num(c[4], n)?,
                a_applied: num(c[5], n)?,
                contingency: flag(c[6], n)?,
                a_hi_eff: num(c[7], n)?,
                gap: num(c[8], n)?,
                disjoint: flag(c[9], n)?,
            })
        })
        .collect()
}

/// Physical (non-inflated) disc overlap between every pair of agents.
pub fn collision_check(t: f64, agents: &[(&str, Vec2, f64)]) -> Vec<CollisionEvent> {
    let mut events = Vec::new();
    for (i, a) in agents.iter().enumerate() {
        for b in &agents[i + 1..] {
            let reach = a.2 + b.2;
            let d = a.1.distance(b.1);
            if d < reach {
                let (first, second) = if a.0 <= b.0 { (a.0, b.0) } else { (b.0, a.0) };
                events.push(CollisionEvent {
                    t,
                    agent_a: first.to_owned(),
                    agent_b: second.to_owned(),
                    penetration: reach - d,
                });
            }
        }
    }
    events
}

/// Outcome of one controller evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Decision {
    pub command: Command,
    pub gap: f64,
    pub disjoint: bool,
}

fn decide(
    spec: &AgentSpec,
    state: &AgentState,
    regions: &[StoppingRegion],
    own: &StoppingRegion,
    dt: f64,
    hold: bool,
) -> std::result::Result<Decision, DomainError> {
    let ctx = ControlContext {
        agent_id: &spec.id,
        state,
        path: spec.active(),
        path_index: spec.active_path,
        radius: spec.radius,
        safety: &spec.safety,
        dt,
        regions,
    };
    let gap = ctx.gap();
    let bounds: ConstraintSet = tightened_bounds(state.v, gap, &spec.strategy, &spec.model);
    let guidance = spec.guidance.acceleration(state, &spec.model);
    let command = select_command(&ctx, guidance, bounds, gap, hold)?;
    Ok(Decision {
        command,
        gap,
        disjoint: disjointness(own, regions).holds,
    })
}

/// Plant input for a decision. Braking commands are expressed against the
/// model's assumed authority and realized at the same fraction of the
/// plant's peak, so an invoked contingency engages full braking.
pub fn plant_command(spec: &AgentSpec, command: &Command) -> f64 {
    if command.a_cmd < 0.0 {
        command.a_cmd * spec.plant.a_brake_peak / spec.model.decel()
    } else {
        command.a_cmd
    }
}

fn advance(spec: &AgentSpec, state: &AgentState, a_cmd: f64, dt: f64) -> AgentState {
    let path = spec.active();
    if path.is_stationary() {
        return AgentState { t: state.t + dt, ..*state };
    }
    let mut next = step_plant(state, a_cmd, dt, &spec.plant);
    if let Some(cap) = spec.speed_cap {
        if next.v > cap {
            // reach the cap part way through the tick, then cruise
            let a = next.a_applied;
            let t_cap = if a > 0.0 { ((cap - state.v) / a).clamp(0.0, dt) } else { 0.0 };
            next.s = state.s + state.v * t_cap + 0.5 * a * t_cap * t_cap + cap * (dt - t_cap);
            next.v = cap;
        }
    }
    if next.s >= path.length() {
        next.s = path.length();
        next.v = 0.0;
    }
    next
}

/// Run a scenario to completion or first collision.
pub fn run_trial(config: &ScenarioConfig) -> Result<TrialLog> {
    config.validate()?;
    let dt = config.dt;
    let n_ticks = config.tick_count();
    let agents = &config.agents;

    let mut order: Vec<usize> = (0..agents.len()).collect();
    order.sort_by(|&a, &b| agents[a].id.cmp(&agents[b].id));

    let mut states: Vec<AgentState> = agents
        .iter()
        .map(|a| AgentState {
            s: a.s0,
            v: a.v0,
            a_applied: 0.0,
            t: 0.0,
        })
        .collect();
    let mut hold_left = vec![0u32; agents.len()];
    let mut records = Vec::with_capacity(n_ticks * agents.len());
    let mut events = Vec::new();
    let mut terminated = false;
    let mut ticks = 0;

    for k in 0..n_ticks {
        let t = k as f64 * dt;
        let regions = agents
            .iter()
            .zip(&states)
            .map(|(a, s)| stopping_region(&a.id, s, &a.paths, &a.safety, a.radius))
            .collect::<std::result::Result<Vec<_>, _>>()?;

        let mut decisions = Vec::with_capacity(agents.len());
        for (i, spec) in agents.iter().enumerate() {
            let mut d = decide(spec, &states[i], &regions, &regions[i], dt, false)?;
            if d.command.contingency_active {
                hold_left[i] = spec.strategy.release_hold_ticks;
            } else if hold_left[i] > 0 {
                hold_left[i] -= 1;
                d = decide(spec, &states[i], &regions, &regions[i], dt, true)?;
            }
            decisions.push(d);
        }

        let next: Vec<AgentState> = agents
            .iter()
            .zip(&states)
            .zip(&decisions)
            .map(|((spec, s), d)| advance(spec, s, plant_command(spec, &d.command), dt))
            .collect();

        for &i in &order {
            let (s, d) = (&states[i], &decisions[i]);
            records.push(TickRecord {
                t,
                agent_id: agents[i].id.clone(),
                s: s.s,
                v: s.v,
                a_cmd: d.command.a_cmd,
                a_applied: next[i].a_applied,
                contingency: d.command.contingency_active,
                a_hi_eff: d.command.bounds_used.a_hi,
                gap: d.gap,
                disjoint: d.disjoint,
            });
        }
        states = next;
        ticks += 1;

        let bodies: Vec<(&str, Vec2, f64)> = order
            .iter()
            .map(|&i| (agents[i].id.as_str(), agents[i].position(&states[i]), agents[i].radius))
            .collect();
        let hits = collision_check(t + dt, &bodies);
        if !hits.is_empty() {
            events.extend(hits.into_iter().map(TrialEvent::Collision));
            terminated = true;
            break;
        }
    }

    for &i in &order {
        let samples: Vec<(f64, bool)> = records
            .iter()
            .filter(|r| r.agent_id == agents[i].id)
            .map(|r| (r.t, r.contingency))
            .collect();
        let report = densest_dance_window(&samples, DEFAULT_TOGGLE_THRESHOLD, DEFAULT_DANCE_WINDOW_S);
        if report.dance_detected {
            events.push(TrialEvent::Dance {
                agent_id: agents[i].id.clone(),
                report,
            });
        }
    }

    let final_states = order
        .iter()
        .map(|&i| AgentSnapshot {
            agent_id: agents[i].id.clone(),
            state: states[i],
        })
        .collect();

    Ok(TrialLog {
        config: config.clone(),
        ticks,
        terminated_by_collision: terminated,
        records,
        events,
        final_states,
    })
}

fn straight(from: Vec2, to: Vec2) -> PolylinePath {
    PolylinePath::segment(from, to).expect("distinct endpoints")
}

fn vehicle(
    id: &str,
    path: PolylinePath,
    kind: StrategyKind,
    tau: f64,
    inflation: f64,
) -> AgentSpec {
    let mut spec = AgentSpec {
        id: id.to_owned(),
        paths: vec![path],
        active_path: 0,
        s0: 0.0,
        v0: 0.0,
        radius: 1.0,
        model: ModelParams {
            a_max: 3.5,
            a_brake_peak: 8.0,
            brake_fraction: kind.brake_fraction(),
        },
        plant: PlantParams {
            actuation_lag_tau: tau,
            a_brake_peak: 8.0,
        },
        safety: SafetyParams {
            inflation_margin: inflation,
            contingency_decel_mag: 0.0,
        },
        strategy: Strategy::new(kind),
        guidance: GuidanceSpec::FullThrottle {},
        speed_cap: Some(40.0),
    };
    spec.set_strategy(kind);
    spec
}

/// Stationary disc agent.
pub fn stationary_agent(id: &str, at: Vec2, radius: f64) -> AgentSpec {
    let mut spec = vehicle(id, PolylinePath::stationary(at), StrategyKind::None, 0.0, 0.0);
    spec.radius = radius;
    spec.guidance = GuidanceSpec::Stationary {};
    spec.speed_cap = None;
    spec
}

pub const CYCLIST_POSITION: f64 = 225.0;
/// Tightening parameters used by the cyclist scenario.
pub const PAPER_TIGHTENING_BETA: f64 = 0.1;
pub const PAPER_TIGHTENING_EPSILON: f64 = 15.0;

pub fn paper_strategy(kind: StrategyKind) -> Strategy {
    Strategy {
        kind,
        ..Strategy::tightening(PAPER_TIGHTENING_BETA, PAPER_TIGHTENING_EPSILON)
    }
}

/// A vehicle driven at full throttle down a 300 m straight road toward a
/// stopped cyclist at 225 m.
pub fn paper_scenario(kind: StrategyKind) -> ScenarioConfig {
    paper_scenario_with(paper_strategy(kind), CALIBRATED_TAU)
}

pub fn paper_scenario_with(strategy: Strategy, tau: f64) -> ScenarioConfig {
    let mut ego = vehicle(
        "ego",
        straight(Vec2::ZERO, Vec2::new(300.0, 0.0)),
        strategy.kind,
        tau,
        0.25,
    );
    ego.strategy = strategy;
    ego.set_strategy(strategy.kind);
    let cyclist = stationary_agent("cyclist", Vec2::new(CYCLIST_POSITION, 0.0), 0.5);
    let mut metadata = BTreeMap::new();
    metadata.insert("scenario".into(), "paper".into());
    metadata.insert("calibrated_tau".into(), CALIBRATED_TAU.to_string());
    metadata.insert("tau".into(), tau.to_string());
    ScenarioConfig {
        dt: DEFAULT_DT,
        duration: DEFAULT_DURATION,
        agents: vec![ego, cyclist],
        metadata,
    }
}

/// Two vehicles facing each other on one 200 m line, both at full throttle
/// with no mitigation and exact plants.
pub fn corridor_scenario() -> ScenarioConfig {
    let west = vehicle(
        "west",
        straight(Vec2::ZERO, Vec2::new(200.0, 0.0)),
        StrategyKind::None,
        0.0,
        0.25,
    );
    let east = vehicle(
        "east",
        straight(Vec2::new(200.0, 0.0), Vec2::ZERO),
        StrategyKind::None,
        0.0,
        0.25,
    );
    let mut metadata = BTreeMap::new();
    metadata.insert("scenario".into(), "corridor".into());
    ScenarioConfig {
        dt: DEFAULT_DT,
        duration: DEFAULT_DURATION,
        agents: vec![west, east],
        metadata,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stationary_agent_runs_quietly() {
        let cfg = ScenarioConfig {
            dt: 0.05,
            duration: 1.0,
            agents: vec![stationary_agent("post", Vec2::new(5.0, 5.0), 0.5)],
            metadata: BTreeMap::new(),
        };
        let log = run_trial(&cfg).unwrap();
        assert_eq!(log.ticks, 20);
        assert_eq!(log.records.len(), 20);
        assert!(log.records.iter().all(|r| r.v == 0.0 && r.s == 0.0));
        assert!(log.events.is_empty());
    }

    #[test]
    fn collision_examples() {
        let none = collision_check(0.0, &[("a", Vec2::ZERO, 1.0), ("b", Vec2::new(10.0, 0.0), 0.5)]);
        assert!(none.is_empty());

        let same = collision_check(0.0, &[("a", Vec2::ZERO, 1.0), ("b", Vec2::ZERO, 0.5)]);
        assert_eq!(same.len(), 1);
        assert_eq!(same[0].penetration, 1.5);

        let close = collision_check(0.0, &[("b", Vec2::ZERO, 1.0), ("a", Vec2::new(1.4, 0.0), 0.5)]);
        assert!((close[0].penetration - 0.1).abs() < 1e-12);
        assert_eq!((close[0].agent_a.as_str(), close[0].agent_b.as_str()), ("a", "b"));

        let touching = collision_check(0.0, &[("a", Vec2::ZERO, 1.0), ("b", Vec2::new(1.5, 0.0), 0.5)]);
        assert!(touching.is_empty());
    }

    #[test]
    fn paper_configs_differ_only_in_strategy() {
        let t = paper_scenario(StrategyKind::Tightening);
        let n = paper_scenario(StrategyKind::None);
        let c = paper_scenario(StrategyKind::Conservative);
        assert_eq!(t.agents[1], n.agents[1]);
        assert_eq!(t.agents[0].guidance, n.agents[0].guidance);
        assert_eq!(t.agents[0].plant, c.agents[0].plant);
        let mut t_as_none = t.agents[0].clone();
        t_as_none.strategy = n.agents[0].strategy;
        assert_eq!(t_as_none, n.agents[0]);
        assert_eq!(c.agents[0].model.brake_fraction, 0.8);
        assert_eq!(c.agents[0].safety.contingency_decel_mag, 6.4);
        assert_eq!(t.agents[1].active().vertices(), &[Vec2::new(225.0, 0.0)]);
        for cfg in [&t, &n, &c] {
            cfg.validate().unwrap();
        }
    }

    #[test]
    fn validation_names_the_field() {
        let mut cfg = paper_scenario(StrategyKind::None);
        cfg.agents[0].radius = 0.0;
        assert_eq!(cfg.validate().unwrap_err().field, "agents[0].radius");

        let mut cfg = paper_scenario(StrategyKind::None);
        cfg.dt = 0.0;
        assert_eq!(cfg.validate().unwrap_err().field, "dt");

        let mut cfg = paper_scenario(StrategyKind::None);
        cfg.agents[1].id = "ego".into();
        assert_eq!(cfg.validate().unwrap_err().field, "agents[1].id");

        let mut cfg = paper_scenario(StrategyKind::None);
        cfg.agents[0].model.brake_fraction = 0.8;
        assert_eq!(cfg.validate().unwrap_err().field, "agents[0].model.brake_fraction");

        let mut cfg = paper_scenario(StrategyKind::None);
        cfg.agents[0].safety.contingency_decel_mag = 8.0;
        assert_eq!(cfg.validate().unwrap_err().field, "agents[0].safety.contingency_decel_mag");

        let mut cfg = paper_scenario(StrategyKind::None);
        cfg.agents[1].v0 = 1.0;
        assert_eq!(cfg.validate().unwrap_err().field, "agents[1].v0");

        let mut cfg = paper_scenario(StrategyKind::None);
        cfg.agents[0].s0 = 301.0;
        assert_eq!(cfg.validate().unwrap_err().field, "agents[0].s0");

        let mut cfg = paper_scenario(StrategyKind::None);
        cfg.duration = 0.01;
        assert_eq!(cfg.validate().unwrap_err().field, "duration");

        assert!(matches!(run_trial(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn scenario_json_is_strict() {
        let cfg = paper_scenario(StrategyKind::Tightening);
        let text = cfg.to_json();
        assert_eq!(ScenarioConfig::from_json(&text).unwrap(), cfg);

        let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        doc["agents"][0]["colour"] = "red".into();
        assert!(ScenarioConfig::from_json(&doc.to_string()).is_err());

        let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        doc["agents"][0]["guidance"]["extra"] = 1.into();
        assert!(ScenarioConfig::from_json(&doc.to_string()).is_err());

        let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        doc["agents"][0]["paths"][0] = serde_json::json!([[0.0, 0.0], [0.0, 0.0]]);
        assert!(ScenarioConfig::from_json(&doc.to_string()).is_err());
    }

    #[test]
    fn cruise_guidance() {
        let model = ModelParams {
            a_max: 3.5,
            a_brake_peak: 8.0,
            brake_fraction: 0.9,
        };
        let g = GuidanceSpec::CruiseTo { target_speed: 10.0 };
        assert_eq!(g.acceleration(&AgentState::new(0.0, 9.0), &model), 1.0);
        assert_eq!(g.acceleration(&AgentState::new(0.0, 0.0), &model), 3.5);
        assert_eq!(g.acceleration(&AgentState::new(0.0, 30.0), &model), -7.2);
    }

    #[test]
    fn speed_cap_limits_plant() {
        let mut cfg = ScenarioConfig {
            dt: 0.05,
            duration: 20.0,
            agents: vec![vehicle(
                "solo",
                straight(Vec2::ZERO, Vec2::new(1000.0, 0.0)),
                StrategyKind::None,
                0.0,
                0.25,
            )],
            metadata: BTreeMap::new(),
        };
        cfg.agents[0].speed_cap = Some(10.0);
        let log = run_trial(&cfg).unwrap();
        assert!(log.records.iter().all(|r| r.v <= 10.0));
        let last = log.final_states[0].state;
        assert_eq!(last.v, 10.0);
        // 10/3.5 s of acceleration, then cruise
        let t_acc = 10.0 / 3.5;
        let expected = 0.5 * 10.0 * t_acc + 10.0 * (20.0 - t_acc);
        assert!((last.s - expected).abs() < 1e-6, "{} vs {expected}", last.s);
    }

    #[test]
    fn csv_round_trip() {
        let log = run_trial(&paper_scenario(StrategyKind::Tightening)).unwrap();
        let csv = log.to_csv();
        assert!(csv.starts_with("t,agent_id,s,v,a_cmd,a_applied,contingency,a_hi_eff,gap,disjoint\n"));
        assert_eq!(records_from_csv(&csv).unwrap(), log.records);
        assert!(records_from_csv("nope\n").is_err());
    }
}
