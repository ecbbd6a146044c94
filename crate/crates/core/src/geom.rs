//! Planar polyline paths and capsule (swept disc) geometry.
//!
//! Every footprint in the simulator is a disc of fixed radius. Sweeping that
//! disc along a polyline between two arclengths yields a chain of capsules,
//! one per traversed segment, which is an exact representation of the swept
//! area. Intersection is decided on the capsule cores (line segments) with a
//! strict inequality, so touching capsules are disjoint.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::GeomError;

/// A 2-D point or vector in meters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, rhs: Vec2) -> f64 {
        self.x * rhs.x + self.y * rhs.y
    }

    pub fn length_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn length(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, rhs: Vec2) -> f64 {
        (self - rhs).length()
    }

    pub fn lerp(self, rhs: Vec2, t: f64) -> Vec2 {
        self + (rhs - self) * t
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from(p: [f64; 2]) -> Self {
        Vec2::new(p[0], p[1])
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(p: Vec2) -> Self {
        [p.x, p.y]
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// A path parameterized by arclength.
///
/// A single vertex is the degenerate path of something that never moves.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec2>", into = "Vec<Vec2>")]
pub struct PolylinePath {
    vertices: Vec<Vec2>,
    cumulative: Vec<f64>,
}

impl PolylinePath {
    pub fn new(vertices: Vec<Vec2>) -> Result<Self, GeomError> {
        if vertices.is_empty() {
            return Err(GeomError::EmptyPath);
        }
        if let Some(i) = vertices.iter().position(|v| !v.is_finite()) {
            return Err(GeomError::NonFiniteVertex(i));
        }
        let mut cumulative = Vec::with_capacity(vertices.len());
        cumulative.push(0.0);
        for (i, pair) in vertices.windows(2).enumerate() {
            let len = pair[0].distance(pair[1]);
            if len == 0.0 {
                return Err(GeomError::DuplicateVertex(i + 1));
            }
            cumulative.push(cumulative[i] + len);
        }
        Ok(PolylinePath {
            vertices,
            cumulative,
        })
    }

    /// Straight path from `from` to `to`.
    pub fn segment(from: Vec2, to: Vec2) -> Result<Self, GeomError> {
        Self::new(vec![from, to])
    }

    /// One-vertex path for a stationary object.
    pub fn stationary(at: Vec2) -> Self {
        PolylinePath {
            vertices: vec![at],
            cumulative: vec![0.0],
        }
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn cumulative_arclength(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn length(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    pub fn is_stationary(&self) -> bool {
        self.vertices.len() == 1
    }

    pub fn segment_count(&self) -> usize {
        self.vertices.len() - 1
    }

    fn check_range(&self, s: f64) -> Result<(), GeomError> {
        if s.is_finite() && (0.0..=self.length()).contains(&s) {
            Ok(())
        } else {
            Err(GeomError::ArclengthOutOfRange {
                s,
                length: self.length(),
            })
        }
    }

    /// Index of the segment containing `s`; vertices belong to the segment
    /// they start, except the final vertex.
    fn segment_index(&self, s: f64) -> usize {
        let n = self.segment_count();
        // first i with cumulative[i + 1] > s
        let idx = self.cumulative[1..].partition_point(|&c| c <= s);
        idx.min(n - 1)
    }

    pub fn point_at_arclength(&self, s: f64) -> Result<Vec2, GeomError> {
        self.check_range(s)?;
        Ok(self.point_unchecked(s))
    }

    fn point_unchecked(&self, s: f64) -> Vec2 {
        if self.is_stationary() {
            return self.vertices[0];
        }
        let i = self.segment_index(s);
        let (s_a, s_b) = (self.cumulative[i], self.cumulative[i + 1]);
        if s == s_a {
            return self.vertices[i];
        }
        if s == s_b {
            return self.vertices[i + 1];
        }
        let t = (s - s_a) / (s_b - s_a);
        self.vertices[i].lerp(self.vertices[i + 1], t)
    }

    /// Unit direction of the final segment, or `None` for a stationary path.
    pub fn end_direction(&self) -> Option<Vec2> {
        let n = self.vertices.len();
        if n < 2 {
            return None;
        }
        let d = self.vertices[n - 1] - self.vertices[n - 2];
        Some(d * (1.0 / d.length()))
    }

    /// Like [`point_at_arclength`](Self::point_at_arclength) but arclengths
    /// past the end continue along the final segment's direction. A
    /// stationary path stays at its vertex.
    pub fn point_at_extended(&self, s: f64) -> Result<Vec2, GeomError> {
        if !s.is_finite() || s < 0.0 {
            return Err(GeomError::ArclengthOutOfRange {
                s,
                length: self.length(),
            });
        }
        let len = self.length();
        if s <= len {
            return Ok(self.point_unchecked(s));
        }
        Ok(match self.end_direction() {
            Some(dir) => self.vertices[self.vertices.len() - 1] + dir * (s - len),
            None => self.vertices[0],
        })
    }

    /// Swept footprint of a disc of `radius` moving from `s0` to `s1`.
    pub fn sweep(&self, s0: f64, s1: f64, radius: f64) -> Result<CapsuleChain, GeomError> {
        self.check_range(s0)?;
        self.check_range(s1)?;
        self.sweep_inner(s0, s1, radius)
    }

    /// Sweep that may run past the path end (open path end).
    pub fn sweep_extended(
        &self,
        s0: f64,
        s1: f64,
        radius: f64,
    ) -> Result<CapsuleChain, GeomError> {
        self.check_range(s0)?;
        if !s1.is_finite() {
            return Err(GeomError::ArclengthOutOfRange {
                s: s1,
                length: self.length(),
            });
        }
        self.sweep_inner(s0, s1, radius)
    }

    fn sweep_inner(&self, s0: f64, s1: f64, radius: f64) -> Result<CapsuleChain, GeomError> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(GeomError::InvalidRadius(radius));
        }
        if s1 < s0 {
            return Err(GeomError::ReversedSpan { s0, s1 });
        }
        let start = self.point_at_extended(s0)?;
        if s0 == s1 || self.is_stationary() {
            return Ok(CapsuleChain {
                capsules: vec![Capsule::disc(start, radius)?],
                total_arclength: 0.0,
            });
        }

        let mut capsules = Vec::new();
        let mut from = start;
        // vertices strictly inside (s0, s1) split the sweep
        for (i, &c) in self.cumulative.iter().enumerate() {
            if c > s0 && c < s1 {
                let to = self.vertices[i];
                capsules.push(Capsule::new(from, to, radius)?);
                from = to;
            }
        }
        capsules.push(Capsule::new(from, self.point_at_extended(s1)?, radius)?);
        Ok(CapsuleChain {
            capsules,
            total_arclength: s1 - s0,
        })
    }
}

impl TryFrom<Vec<Vec2>> for PolylinePath {
    type Error = GeomError;
    fn try_from(v: Vec<Vec2>) -> Result<Self, GeomError> {
        PolylinePath::new(v)
    }
}

impl From<PolylinePath> for Vec<Vec2> {
    fn from(p: PolylinePath) -> Self {
        p.vertices
    }
}

/// A line segment dilated by `radius`. `start == end` is a disc.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Capsule {
    pub segment_start: Vec2,
    pub segment_end: Vec2,
    pub radius: f64,
}

impl Capsule {
    pub fn new(segment_start: Vec2, segment_end: Vec2, radius: f64) -> Result<Self, GeomError> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(GeomError::InvalidRadius(radius));
        }
        Ok(Capsule {
            segment_start,
            segment_end,
            radius,
        })
    }

    pub fn disc(center: Vec2, radius: f64) -> Result<Self, GeomError> {
        Self::new(center, center, radius)
    }

    pub fn core_length(&self) -> f64 {
        self.segment_start.distance(self.segment_end)
    }

    /// Distance from `p` to the core segment.
    pub fn core_distance_to_point(&self, p: Vec2) -> f64 {
        point_segment_distance(p, self.segment_start, self.segment_end)
    }

    pub fn contains_point(&self, p: Vec2) -> bool {
        self.core_distance_to_point(p) < self.radius
    }
}

/// Consecutive capsules produced by a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapsuleChain {
    pub capsules: Vec<Capsule>,
    pub total_arclength: f64,
}

impl CapsuleChain {
    pub fn start(&self) -> Vec2 {
        self.capsules[0].segment_start
    }

    pub fn end(&self) -> Vec2 {
        self.capsules[self.capsules.len() - 1].segment_end
    }

    pub fn contains_point(&self, p: Vec2) -> bool {
        self.capsules.iter().any(|c| c.contains_point(p))
    }

    /// Largest radius in the chain.
    pub fn max_radius(&self) -> f64 {
        self.capsules.iter().fold(0.0, |m, c| m.max(c.radius))
    }
}

pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.length_squared();
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}

/// Minimum distance between segments `p1q1` and `p2q2`.
///
/// Clamped closest-point computation for two segments, handling the
/// degenerate (point) cases.
pub fn segment_distance(p1: Vec2, q1: Vec2, p2: Vec2, q2: Vec2) -> f64 {
    const EPS: f64 = 1e-18;
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.length_squared();
    let e = d2.length_squared();
    let f = d2.dot(r);

    let (s, t);
    if a <= EPS && e <= EPS {
        return p1.distance(p2);
    }
    if a <= EPS {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(r);
        if e <= EPS {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(d2);
            let denom = a * e - b * b;
            let mut s_ = if denom > EPS * a * e {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let mut t_ = (b * s_ + f) / e;
            if t_ < 0.0 {
                t_ = 0.0;
                s_ = (-c / a).clamp(0.0, 1.0);
            } else if t_ > 1.0 {
                t_ = 1.0;
                s_ = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s_;
            t = t_;
        }
    }
    let c1 = p1 + d1 * s;
    let c2 = p2 + d2 * t;
    let d = c1.distance(c2);
    // Proper crossings need an exact zero; the clamped projection can leave
    // rounding residue there.
    if d > 0.0 && segments_cross(p1, q1, p2, q2) {
        return 0.0;
    }
    d
}

fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn segments_cross(p1: Vec2, q1: Vec2, p2: Vec2, q2: Vec2) -> bool {
    let o1 = orient(p1, q1, p2);
    let o2 = orient(p1, q1, q2);
    let o3 = orient(p2, q2, p1);
    let o4 = orient(p2, q2, q1);
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

/// Distance between the core segments of two capsules.
pub fn core_distance(a: &Capsule, b: &Capsule) -> f64 {
    segment_distance(a.segment_start, a.segment_end, b.segment_start, b.segment_end)
}

/// True iff the capsules overlap with positive area. Tangency is disjoint.
pub fn capsules_intersect(a: &Capsule, b: &Capsule) -> bool {
    core_distance(a, b) < a.radius + b.radius
}

pub fn chains_disjoint(a: &CapsuleChain, b: &CapsuleChain) -> bool {
    !a.capsules
        .iter()
        .any(|ca| b.capsules.iter().any(|cb| capsules_intersect(ca, cb)))
}
