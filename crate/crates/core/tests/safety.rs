use dance_core::geom::{PolylinePath, Vec2};
use dance_core::safety::{disjointness, stopping_path, stopping_region};
use dance_core::{AgentState, SafetyParams};
use proptest::prelude::*;

fn params(inflation: f64, decel: f64) -> SafetyParams {
    SafetyParams {
        inflation_margin: inflation,
        contingency_decel_mag: decel,
    }
}

fn pt() -> impl Strategy<Value = Vec2> {
    (-50.0..50.0f64, -50.0..50.0f64).prop_map(|(x, y)| Vec2::new(x, y))
}

fn path() -> impl Strategy<Value = PolylinePath> {
    prop::collection::vec(pt(), 1..5).prop_filter_map("valid path", |v| PolylinePath::new(v).ok())
}

#[derive(Debug, Clone)]
struct Scene {
    ego_paths: Vec<PolylinePath>,
    other_paths: Vec<PolylinePath>,
    ego: AgentState,
    other: AgentState,
}

fn scene() -> impl Strategy<Value = Scene> {
    (
        prop::collection::vec(path(), 1..3),
        prop::collection::vec(path(), 1..3),
        0.0..30.0f64,
        0.0..30.0f64,
        0.0..30.0f64,
        0.0..30.0f64,
    )
        .prop_map(|(ego_paths, other_paths, s1, v1, s2, v2)| Scene {
            ego_paths,
            other_paths,
            ego: AgentState::new(s1, v1),
            other: AgentState::new(s2, v2),
        })
}

fn holds(sc: &Scene, inflation: f64, decel: f64) -> bool {
    let p = params(inflation, decel);
    let ego = stopping_region("ego", &sc.ego, &sc.ego_paths, &p, 1.0).unwrap();
    let other = stopping_region("other", &sc.other, &sc.other_paths, &p, 1.0).unwrap();
    disjointness(&ego, &[other]).holds
}

proptest! {
    #[test]
    fn faster_footprint_covers_slower(
        path in path(),
        s in 0.0..40.0f64,
        v1 in 0.0..30.0f64,
        dv in 0.0..10.0f64,
        probes in prop::collection::vec((0.0..1.0f64, 0.0..std::f64::consts::TAU, 0.0..0.99f64), 30),
    ) {
        let p = params(0.25, 7.2);
        let slow = stopping_path("a", 0, &AgentState::new(s, v1), &path, &p, 1.0).unwrap();
        let fast = stopping_path("a", 0, &AgentState::new(s, v1 + dv), &path, &p, 1.0).unwrap();
        let r = 1.25;
        for (along, angle, frac) in probes {
            let k = ((along * slow.footprint.capsules.len() as f64) as usize).min(slow.footprint.capsules.len() - 1);
            let cap = &slow.footprint.capsules[k];
            let q = cap.segment_start.lerp(cap.segment_end, along) + Vec2::new(angle.cos(), angle.sin()) * (frac * r);
            prop_assert!(fast.footprint.contains_point(q));
        }
    }

    #[test]
    fn more_conservatism_never_creates_safety(
        sc in scene(),
        infl in 0.0..1.0f64,
        extra in 0.0..1.0f64,
        decel in 3.0..8.0f64,
        less in 0.0..2.5f64,
    ) {
        if holds(&sc, infl + extra, decel - less) {
            prop_assert!(holds(&sc, infl, decel));
        }
    }

    #[test]
    fn resting_agents_with_room_are_disjoint(a in pt(), b in pt(), infl in 0.0..1.0f64) {
        let reach = 2.0 * (1.0 + infl);
        prop_assume!(a.distance(b) >= reach);
        let p = params(infl, 7.2);
        let ra = stopping_region("a", &AgentState::at_rest(0.0), &[PolylinePath::stationary(a)], &p, 1.0).unwrap();
        let rb = stopping_region("b", &AgentState::at_rest(0.0), &[PolylinePath::stationary(b)], &p, 1.0).unwrap();
        prop_assert!(disjointness(&ra, &[rb]).holds);
    }

    #[test]
    fn blocking_is_symmetric_for_single_paths(
        pa in path(), pb in path(),
        sa in 0.0..30.0f64, va in 0.0..30.0f64,
        sb in 0.0..30.0f64, vb in 0.0..30.0f64,
    ) {
        let p = params(0.25, 7.2);
        let ra = stopping_region("a", &AgentState::new(sa, va), &[pa], &p, 1.0).unwrap();
        let rb = stopping_region("b", &AgentState::new(sb, vb), &[pb], &p, 1.0).unwrap();
        prop_assert_eq!(disjointness(&ra, std::slice::from_ref(&rb)).holds, disjointness(&rb, &[ra]).holds);
    }
}

#[test]
fn second_lane_rescues_disjointness() {
    let lanes = [
        PolylinePath::segment(Vec2::new(0.0, 0.0), Vec2::new(100.0, 0.0)).unwrap(),
        PolylinePath::segment(Vec2::new(0.0, 4.0), Vec2::new(100.0, 4.0)).unwrap(),
    ];
    let p = params(0.25, 7.2);
    let ego = stopping_region("ego", &AgentState::new(10.0, 20.0), &lanes, &p, 1.0).unwrap();
    let post = stopping_region(
        "post",
        &AgentState::at_rest(0.0),
        &[PolylinePath::stationary(Vec2::new(25.0, 0.0))],
        &p,
        0.5,
    )
    .unwrap();
    let rep = disjointness(&ego, &[post]);
    assert!(rep.holds);
    assert_eq!(rep.safe_path_indices, vec![1]);
    assert_eq!(rep.blocking_pairs.len(), 1);
    assert_eq!(rep.blocking_pairs[0].path_index, 0);
}
