//! Point-to-polyline distances and segment intersection on a uniform grid index.

use std::collections::HashMap;

use super::curve::dist;

/// Distance from `p` to segment `ab`, with the foot parameter in `[0, 1]`.
#[inline]
pub fn point_segment(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> (f64, f64) {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 > 0.0 {
        (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let q = [a[0] + t * d[0], a[1] + t * d[1]];
    (dist(p, q), t)
}

/// Nearest-segment queries against a fixed polyline, through a hierarchy of
/// bounding boxes over contiguous runs of segments.
pub struct PolylineIndex<'a> {
    points: &'a [[f64; 2]],
    /// Complete binary tree in heap order; node `k` covers a run of segments.
    boxes: Vec<Aabb>,
    ranges: Vec<(u32, u32)>,
}

#[derive(Debug, Clone, Copy)]
struct Aabb {
    lo: [f64; 2],
    hi: [f64; 2],
}

impl Aabb {
    fn of_segments(points: &[[f64; 2]], from: usize, to: usize) -> Self {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &points[from..=to] {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        Self { lo, hi }
    }

    #[inline]
    fn distance2(&self, p: [f64; 2]) -> f64 {
        let dx = (self.lo[0] - p[0]).max(p[0] - self.hi[0]).max(0.0);
        let dy = (self.lo[1] - p[1]).max(p[1] - self.hi[1]).max(0.0);
        dx * dx + dy * dy
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Nearest {
    pub distance: f64,
    pub segment: usize,
    pub t: f64,
}

const LEAF: usize = 8;

impl<'a> PolylineIndex<'a> {
    pub fn new(points: &'a [[f64; 2]]) -> Self {
        assert!(points.len() >= 2);
        let segs = points.len() - 1;
        let mut index = Self {
            points,
            boxes: Vec::new(),
            ranges: Vec::new(),
        };
        index.build(0, 0, segs);
        index
    }

    fn build(&mut self, node: usize, from: usize, to: usize) {
        if self.boxes.len() <= node {
            let fill = Aabb {
                lo: [0.0; 2],
                hi: [0.0; 2],
            };
            self.boxes.resize(node + 1, fill);
            self.ranges.resize(node + 1, (0, 0));
        }
        self.boxes[node] = Aabb::of_segments(self.points, from, to);
        self.ranges[node] = (from as u32, to as u32);
        if to - from > LEAF {
            let mid = (from + to) / 2;
            self.build(2 * node + 1, from, mid);
            self.build(2 * node + 2, mid, to);
        }
    }

    pub fn points(&self) -> &[[f64; 2]] {
        self.points
    }

    pub fn nearest(&self, p: [f64; 2]) -> Nearest {
        let mut best = Nearest {
            distance: f64::INFINITY,
            segment: 0,
            t: 0.0,
        };
        let mut best2 = f64::INFINITY;
        let mut stack = Vec::with_capacity(64);
        stack.push(0usize);
        while let Some(node) = stack.pop() {
            if self.boxes[node].distance2(p) > best2 {
                continue;
            }
            let (from, to) = self.ranges[node];
            let (from, to) = (from as usize, to as usize);
            if to - from <= LEAF {
                for s in from..to {
                    let (d, t) = point_segment(p, self.points[s], self.points[s + 1]);
                    if d < best.distance || (d == best.distance && s < best.segment) {
                        best = Nearest {
                            distance: d,
                            segment: s,
                            t,
                        };
                        best2 = d * d;
                    }
                }
                continue;
            }
            let (l, r) = (2 * node + 1, 2 * node + 2);
            // visit the nearer child first
            if self.boxes[l].distance2(p) <= self.boxes[r].distance2(p) {
                stack.push(r);
                stack.push(l);
            } else {
                stack.push(l);
                stack.push(r);
            }
        }
        best
    }

    pub fn distance(&self, p: [f64; 2]) -> f64 {
        self.nearest(p).distance
    }

    /// Distance with sign: positive on the side of the left normal of the
    /// indexed polyline (the outward side for left-to-right profiles).
    pub fn signed_distance(&self, p: [f64; 2]) -> f64 {
        let nn = self.nearest(p);
        let pts = self.points;
        let s = nn.segment;
        let seg_normal = |k: usize| {
            let (a, b) = (pts[k], pts[k + 1]);
            let l = dist(a, b).max(1e-300);
            [-(b[1] - a[1]) / l, (b[0] - a[0]) / l]
        };
        let mut nrm = seg_normal(s);
        let foot;
        if nn.t <= 0.0 && s > 0 {
            let m = seg_normal(s - 1);
            nrm = [nrm[0] + m[0], nrm[1] + m[1]];
            foot = pts[s];
        } else if nn.t >= 1.0 && s + 2 < pts.len() {
            let m = seg_normal(s + 1);
            nrm = [nrm[0] + m[0], nrm[1] + m[1]];
            foot = pts[s + 1];
        } else {
            let (a, b) = (pts[s], pts[s + 1]);
            foot = [a[0] + nn.t * (b[0] - a[0]), a[1] + nn.t * (b[1] - a[1])];
        }
        let side = (p[0] - foot[0]) * nrm[0] + (p[1] - foot[1]) * nrm[1];
        if side >= 0.0 {
            nn.distance
        } else {
            -nn.distance
        }
    }
}

/// Largest distance from a vertex of `curve` to `reference`.
pub fn sup_distance(curve: &[[f64; 2]], reference: &PolylineIndex) -> (f64, usize) {
    let mut best = (0.0, 0);
    for (i, p) in curve.iter().enumerate() {
        let d = reference.distance(*p);
        if d > best.0 {
            best = (d, i);
        }
    }
    best
}

/// Minimum distance between two polylines that do not cross: the minimum is
/// attained at a vertex of one of them.
pub fn polyline_distance(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    let ia = PolylineIndex::new(a);
    let ib = PolylineIndex::new(b);
    let ab = a
        .iter()
        .map(|p| ib.distance(*p))
        .fold(f64::INFINITY, f64::min);
    let ba = b
        .iter()
        .map(|p| ia.distance(*p))
        .fold(f64::INFINITY, f64::min);
    ab.min(ba)
}

#[inline]
fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// Closed-segment intersection test.
pub fn segments_intersect(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if ((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0))
        && ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0))
    {
        return true;
    }
    let on = |p: [f64; 2], q: [f64; 2], r: [f64; 2]| {
        r[0] >= p[0].min(q[0])
            && r[0] <= p[0].max(q[0])
            && r[1] >= p[1].min(q[1])
            && r[1] <= p[1].max(q[1])
    };
    (o1 == 0.0 && on(a, b, c))
        || (o2 == 0.0 && on(a, b, d))
        || (o3 == 0.0 && on(c, d, a))
        || (o4 == 0.0 && on(c, d, b))
}

/// True when no two non-adjacent segments intersect.
pub fn is_simple(points: &[[f64; 2]]) -> bool {
    if points.len() < 4 {
        return true;
    }
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in points {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let mean = points.windows(2).map(|w| dist(w[0], w[1])).sum::<f64>() / (points.len() - 1) as f64;
    let extent = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
    let cell = (2.0 * mean).max(extent / 4096.0).max(1e-12);
    let cover = |a: [f64; 2], b: [f64; 2]| {
        let i0 = ((a[0].min(b[0]) - lo[0]) / cell).floor() as i64;
        let i1 = ((a[0].max(b[0]) - lo[0]) / cell).floor() as i64;
        let j0 = ((a[1].min(b[1]) - lo[1]) / cell).floor() as i64;
        let j1 = ((a[1].max(b[1]) - lo[1]) / cell).floor() as i64;
        (i0..=i1).flat_map(move |i| (j0..=j1).map(move |j| (i, j)))
    };
    let mut cells: HashMap<(i64, i64), Vec<u32>> = HashMap::new();
    for s in 0..points.len() - 1 {
        for key in cover(points[s], points[s + 1]) {
            let list = cells.entry(key).or_default();
            for &o in list.iter() {
                let o = o as usize;
                if o + 1 < s
                    && segments_intersect(points[s], points[s + 1], points[o], points[o + 1])
                {
                    return false;
                }
            }
            list.push(s as u32);
        }
    }
    true
}

/// All-pairs check, used as an oracle.
pub fn is_simple_brute_force(points: &[[f64; 2]]) -> bool {
    let m = points.len().saturating_sub(1);
    for s in 0..m {
        for o in (s + 2)..m {
            if segments_intersect(points[s], points[s + 1], points[o], points[o + 1]) {
                return false;
            }
        }
    }
    true
}
