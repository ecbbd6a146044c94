use dance_core::geom::{capsules_intersect, segment_distance, Capsule, PolylinePath, Vec2};
use proptest::prelude::*;

fn pt() -> impl Strategy<Value = Vec2> {
    (-20.0..20.0f64, -20.0..20.0f64).prop_map(|(x, y)| Vec2::new(x, y))
}

fn capsule() -> impl Strategy<Value = Capsule> {
    (pt(), pt(), any::<bool>(), 0.01..5.0f64).prop_map(|(a, b, disc, r)| {
        let b = if disc { a } else { b };
        Capsule::new(a, b, r).unwrap()
    })
}

fn polyline() -> impl Strategy<Value = PolylinePath> {
    prop::collection::vec(pt(), 2..7).prop_filter_map("distinct consecutive vertices", |v| {
        PolylinePath::new(v).ok()
    })
}

// Closest distance between two segments by dense sampling of the first one,
// refined with golden-section search (the distance to a segment along a line
// is convex).
fn sampled_segment_distance(a0: Vec2, a1: Vec2, b0: Vec2, b1: Vec2) -> f64 {
    let to_b = |p: Vec2| {
        let d = b1 - b0;
        let len2 = d.dot(d);
        let t = if len2 == 0.0 { 0.0 } else { ((p - b0).dot(d) / len2).clamp(0.0, 1.0) };
        p.distance(b0 + d * t)
    };
    let f = |t: f64| to_b(a0 + (a1 - a0) * t);
    let n = 256;
    let best = (0..=n).map(|i| i as f64 / n as f64).min_by(|x, y| f(*x).total_cmp(&f(*y))).unwrap();
    let (mut lo, mut hi) = ((best - 1.0 / n as f64).max(0.0), (best + 1.0 / n as f64).min(1.0));
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let (m1, m2) = (hi - phi * (hi - lo), lo + phi * (hi - lo));
        if f(m1) <= f(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    f(0.5 * (lo + hi)).min(f(best))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn intersection_is_symmetric(a in capsule(), b in capsule()) {
        prop_assert_eq!(capsules_intersect(&a, &b), capsules_intersect(&b, &a));
    }

    #[test]
    fn intersection_matches_sampling_oracle(a in capsule(), b in capsule()) {
        let d = sampled_segment_distance(a.segment_start, a.segment_end, b.segment_start, b.segment_end);
        let reach = a.radius + b.radius;
        prop_assume!((d - reach).abs() >= 1e-6);
        prop_assert_eq!(capsules_intersect(&a, &b), d < reach);
    }

    #[test]
    fn segment_distance_matches_oracle(a0 in pt(), a1 in pt(), b0 in pt(), b1 in pt()) {
        let d = segment_distance(a0, a1, b0, b1);
        prop_assert!((d - sampled_segment_distance(a0, a1, b0, b1)).abs() < 1e-7);
        prop_assert!((d - segment_distance(b0, b1, a0, a1)).abs() < 1e-12);
    }
}

proptest! {
    #[test]
    fn sweep_endpoints_follow_the_path(path in polyline(), u in 0.0..1.0f64, w in 0.0..1.0f64, r in 0.01..3.0f64) {
        let len = path.length();
        let (s0, s1) = if u <= w { (u * len, w * len) } else { (w * len, u * len) };
        let chain = path.sweep(s0, s1, r).unwrap();
        prop_assert!(chain.start().distance(path.point_at_arclength(s0).unwrap()) < 1e-9);
        prop_assert!(chain.end().distance(path.point_at_arclength(s1).unwrap()) < 1e-9);
        for pair in chain.capsules.windows(2) {
            prop_assert_eq!(pair[0].segment_end, pair[1].segment_start);
        }
    }

    #[test]
    fn larger_span_covers_smaller(
        path in polyline(),
        cuts in prop::collection::vec(0.0..1.0f64, 4),
        r in 0.05..3.0f64,
        probes in prop::collection::vec((0.0..1.0f64, 0.0..std::f64::consts::TAU, 0.0..0.99f64), 40),
    ) {
        let mut c = cuts.clone();
        c.sort_by(f64::total_cmp);
        let len = path.length();
        let outer = path.sweep(c[0] * len, c[3] * len, r).unwrap();
        let inner = path.sweep(c[1] * len, c[2] * len, r).unwrap();
        for (along, angle, frac) in probes {
            let k = ((along * inner.capsules.len() as f64) as usize).min(inner.capsules.len() - 1);
            let cap = &inner.capsules[k];
            let core = cap.segment_start.lerp(cap.segment_end, along);
            let p = core + Vec2::new(angle.cos(), angle.sin()) * (frac * r);
            prop_assert!(outer.contains_point(p));
        }
    }
}

#[test]
fn tangent_capsules_are_disjoint() {
    let a = Capsule::new(Vec2::new(0.0, 0.0), Vec2::new(4.0, 0.0), 1.0).unwrap();
    let b = Capsule::new(Vec2::new(0.0, 3.0), Vec2::new(4.0, 3.0), 2.0).unwrap();
    assert!(!capsules_intersect(&a, &b));
    let c = Capsule::disc(Vec2::new(6.0, 0.0), 1.0).unwrap();
    assert!(!capsules_intersect(&a, &c));
}

#[test]
fn crossing_cores_have_zero_distance() {
    let d = segment_distance(
        Vec2::new(-1.0, -1.0),
        Vec2::new(1.0, 1.0),
        Vec2::new(-1.0, 1.0),
        Vec2::new(1.0, -1.0),
    );
    assert_eq!(d, 0.0);
}
