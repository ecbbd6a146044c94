//! Stopping paths, stopping regions and the disjointness check.
//!
//! A stopping path is the footprint an agent sweeps while braking to rest
//! along one of its paths at its contingency deceleration. Its stopping
//! region is the collection of stopping paths over every path it could
//! follow. The safety property holds for an agent when at least one of its
//! stopping paths is clear of every other agent's stopping region.

use serde::{Deserialize, Serialize};

use crate::dynamics::{stopping_distance, AgentState};
use crate::error::DomainError;
use crate::geom::{chains_disjoint, CapsuleChain, PolylinePath};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SafetyParams {
    /// Extra footprint radius used only for safety reasoning (m).
    pub inflation_margin: f64,
    /// Deceleration magnitude the agent's contingency assumes (m/s²).
    pub contingency_decel_mag: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StoppingPath {
    pub agent_id: String,
    pub path_index: usize,
    /// `[s, s + d_stop]`; the end may lie past the path end.
    pub span: (f64, f64),
    pub footprint: CapsuleChain,
    pub d_stop: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StoppingRegion {
    pub agent_id: String,
    pub members: Vec<StoppingPath>,
}

impl StoppingRegion {
    pub fn member(&self, path_index: usize) -> Option<&StoppingPath> {
        self.members.iter().find(|m| m.path_index == path_index)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockingPair {
    pub other_agent: String,
    /// Ego path whose stopping path is blocked.
    pub path_index: usize,
    /// Path of the other agent whose stopping path blocks it.
    pub other_path_index: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisjointnessReport {
    pub holds: bool,
    pub safe_path_indices: Vec<usize>,
    pub blocking_pairs: Vec<BlockingPair>,
}

impl DisjointnessReport {
    pub fn is_safe(&self, path_index: usize) -> bool {
        self.safe_path_indices.contains(&path_index)
    }
}

/// Footprint swept while braking to rest from `state` along `path`.
///
/// The path end is open: a stop that overruns it continues along the final
/// segment.
pub fn stopping_path(
    agent_id: &str,
    path_index: usize,
    state: &AgentState,
    path: &PolylinePath,
    params: &SafetyParams,
    radius: f64,
) -> Result<StoppingPath, DomainError> {
    let d_stop = stopping_distance(state.v, params.contingency_decel_mag)?;
    // a stationary path cannot carry the agent anywhere
    let d_stop = if path.is_stationary() { 0.0 } else { d_stop };
    let s = state.s.min(path.length());
    let span = (s, s + d_stop);
    let footprint = path.sweep_extended(span.0, span.1, radius + params.inflation_margin)?;
    Ok(StoppingPath {
        agent_id: agent_id.to_owned(),
        path_index,
        span,
        footprint,
        d_stop,
    })
}

/// One stopping path per followable path. The agent's arclength is shared
/// across paths.
pub fn stopping_region(
    agent_id: &str,
    state: &AgentState,
    paths: &[PolylinePath],
    params: &SafetyParams,
    radius: f64,
) -> Result<StoppingRegion, DomainError> {
    if paths.is_empty() {
        return Err(DomainError::NoPaths);
    }
    let members = paths
        .iter()
        .enumerate()
        .map(|(i, p)| stopping_path(agent_id, i, state, p, params, radius))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(StoppingRegion {
        agent_id: agent_id.to_owned(),
        members,
    })
}

/// Checks every ego stopping path against every member of every other region.
pub fn disjointness(ego: &StoppingRegion, others: &[StoppingRegion]) -> DisjointnessReport {
    let mut safe_path_indices = Vec::new();
    let mut blocking_pairs = Vec::new();
    for member in &ego.members {
        let mut clear = true;
        for other in others.iter().filter(|o| o.agent_id != ego.agent_id) {
            for theirs in &other.members {
                if !chains_disjoint(&member.footprint, &theirs.footprint) {
                    clear = false;
                    blocking_pairs.push(BlockingPair {
                        other_agent: other.agent_id.clone(),
                        path_index: member.path_index,
                        other_path_index: theirs.path_index,
                    });
                }
            }
        }
        if clear {
            safe_path_indices.push(member.path_index);
        }
    }
    DisjointnessReport {
        holds: !safe_path_indices.is_empty(),
        safe_path_indices,
        blocking_pairs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{Capsule, Vec2};

    fn road() -> PolylinePath {
        PolylinePath::segment(Vec2::ZERO, Vec2::new(300.0, 0.0)).unwrap()
    }

    fn params(inflation: f64, decel: f64) -> SafetyParams {
        SafetyParams {
            inflation_margin: inflation,
            contingency_decel_mag: decel,
        }
    }

    fn cyclist() -> StoppingRegion {
        let p = PolylinePath::stationary(Vec2::new(225.0, 0.0));
        stopping_region("cyclist", &AgentState::at_rest(0.0), &[p], &params(0.0, 7.2), 0.5)
            .unwrap()
    }

    #[test]
    fn at_rest_is_standing_disc() {
        let sp = stopping_path("a", 0, &AgentState::at_rest(12.0), &road(), &params(0.25, 7.2), 1.0)
            .unwrap();
        assert_eq!(sp.span, (12.0, 12.0));
        assert_eq!(sp.footprint.capsules, vec![Capsule::disc(Vec2::new(12.0, 0.0), 1.25).unwrap()]);
    }

    #[test]
    fn moving_span_matches_closed_form() {
        let sp = stopping_path("a", 0, &AgentState::new(100.0, 20.0), &road(), &params(0.0, 7.2), 1.0)
            .unwrap();
        assert_eq!(sp.span.0, 100.0);
        assert!((sp.span.1 - (100.0 + 250.0 / 9.0)).abs() < 1e-12);
        assert_eq!(sp.footprint.capsules.len(), 1);
    }

    #[test]
    fn stationary_path_is_disc() {
        let r = cyclist();
        assert_eq!(r.members.len(), 1);
        assert_eq!(
            r.members[0].footprint.capsules,
            vec![Capsule::disc(Vec2::new(225.0, 0.0), 0.5).unwrap()]
        );
    }

    #[test]
    fn overrun_extends_past_path_end() {
        let short = PolylinePath::segment(Vec2::ZERO, Vec2::new(10.0, 0.0)).unwrap();
        let sp = stopping_path("a", 0, &AgentState::new(5.0, 12.0), &short, &params(0.0, 7.2), 1.0)
            .unwrap();
        assert!(sp.footprint.end().x > 10.0);
    }

    #[test]
    fn region_requires_paths() {
        let err = stopping_region("a", &AgentState::at_rest(0.0), &[], &params(0.0, 7.2), 1.0);
        assert_eq!(err, Err(DomainError::NoPaths));
    }

    #[test]
    fn two_lane_region_is_symmetric() {
        let lanes = [
            PolylinePath::segment(Vec2::new(0.0, 0.0), Vec2::new(100.0, 0.0)).unwrap(),
            PolylinePath::segment(Vec2::new(0.0, 3.5), Vec2::new(100.0, 3.5)).unwrap(),
        ];
        let r = stopping_region("a", &AgentState::new(10.0, 15.0), &lanes, &params(0.25, 7.2), 1.0)
            .unwrap();
        assert_eq!(r.members.len(), 2);
        assert_eq!(r.members[0].span, r.members[1].span);
        assert_eq!(r.members[1].footprint.start().y - r.members[0].footprint.start().y, 3.5);

        let still = stopping_region("a", &AgentState::at_rest(10.0), &lanes, &params(0.25, 7.2), 1.0)
            .unwrap();
        assert_eq!(still.members[0].footprint.start(), Vec2::new(10.0, 0.0));
        assert_eq!(still.members[1].footprint.start(), Vec2::new(10.0, 3.5));
    }

    #[test]
    fn no_others_is_vacuously_safe() {
        let r = stopping_region("a", &AgentState::new(0.0, 20.0), &[road()], &params(0.0, 7.2), 1.0)
            .unwrap();
        let rep = disjointness(&r, &[]);
        assert!(rep.holds);
        assert_eq!(rep.safe_path_indices, vec![0]);
        assert!(rep.blocking_pairs.is_empty());
    }

    #[test]
    fn far_from_cyclist_holds() {
        let r = stopping_region("ego", &AgentState::new(0.0, 20.0), &[road()], &params(0.0, 7.2), 1.0)
            .unwrap();
        assert!(disjointness(&r, &[cyclist()]).holds);
    }

    #[test]
    fn near_cyclist_fails_and_blocks_both_ways() {
        let r = stopping_region("ego", &AgentState::new(200.0, 20.0), &[road()], &params(0.0, 7.2), 1.0)
            .unwrap();
        let rep = disjointness(&r, &[cyclist()]);
        assert!(!rep.holds);
        assert_eq!(
            rep.blocking_pairs,
            vec![BlockingPair {
                other_agent: "cyclist".into(),
                path_index: 0,
                other_path_index: 0,
            }]
        );
        assert!(!disjointness(&cyclist(), &[r]).holds);
    }

    #[test]
    fn own_region_is_ignored() {
        let r = stopping_region("ego", &AgentState::new(0.0, 20.0), &[road()], &params(0.0, 7.2), 1.0)
            .unwrap();
        assert!(disjointness(&r, std::slice::from_ref(&r)).holds);
    }
}
