//! Deterministic reductions and sphere quadrature.

use std::f64::consts::PI;

/// Pairwise (cascade) summation in a fixed order; the result depends only on
/// the input slice, never on thread scheduling.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 64;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Pairwise sum of `f(i)` for `i in 0..n` without materialising the terms.
pub fn pairwise_sum_by(n: usize, f: &(impl Fn(usize) -> f64 + Sync)) -> f64 {
    fn rec(lo: usize, hi: usize, f: &(impl Fn(usize) -> f64 + Sync)) -> f64 {
        const LEAF: usize = 64;
        if hi - lo <= LEAF {
            return (lo..hi).map(f).sum();
        }
        let mid = lo + (hi - lo) / 2;
        if hi - lo > 1 << 16 {
            let (a, b) = rayon::join(|| rec(lo, mid, f), || rec(mid, hi, f));
            a + b
        } else {
            rec(lo, mid, f) + rec(mid, hi, f)
        }
    }
    rec(0, n, f)
}

/// Triangulated unit sphere obtained by repeated 4-way subdivision of an
/// icosahedron. Triangles are oriented counter-clockwise seen from outside.
#[derive(Debug, Clone)]
pub struct Icosphere {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
}

impl Icosphere {
    pub fn new(level: u32) -> Self {
        let t = (1.0 + 5f64.sqrt()) / 2.0;
        let raw = [
            [-1.0, t, 0.0],
            [1.0, t, 0.0],
            [-1.0, -t, 0.0],
            [1.0, -t, 0.0],
            [0.0, -1.0, t],
            [0.0, 1.0, t],
            [0.0, -1.0, -t],
            [0.0, 1.0, -t],
            [t, 0.0, -1.0],
            [t, 0.0, 1.0],
            [-t, 0.0, -1.0],
            [-t, 0.0, 1.0],
        ];
        let mut vertices: Vec<[f64; 3]> = raw.iter().map(|v| normalize(*v)).collect();
        let mut triangles: Vec<[usize; 3]> = vec![
            [0, 11, 5],
            [0, 5, 1],
            [0, 1, 7],
            [0, 7, 10],
            [0, 10, 11],
            [1, 5, 9],
            [5, 11, 4],
            [11, 10, 2],
            [10, 7, 6],
            [7, 1, 8],
            [3, 9, 4],
            [3, 4, 2],
            [3, 2, 6],
            [3, 6, 8],
            [3, 8, 9],
            [4, 9, 5],
            [2, 4, 11],
            [6, 2, 10],
            [8, 6, 7],
            [9, 8, 1],
        ];
        for _ in 0..level {
            let mut cache = std::collections::HashMap::new();
            let mut midpoint = |a: usize, b: usize, verts: &mut Vec<[f64; 3]>| -> usize {
                let key = if a < b { (a, b) } else { (b, a) };
                *cache.entry(key).or_insert_with(|| {
                    let (p, q) = (verts[a], verts[b]);
                    verts.push(normalize([p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                    verts.len() - 1
                })
            };
            let mut next = Vec::with_capacity(triangles.len() * 4);
            for &[a, b, c] in &triangles {
                let ab = midpoint(a, b, &mut vertices);
                let bc = midpoint(b, c, &mut vertices);
                let ca = midpoint(c, a, &mut vertices);
                next.push([a, ab, ca]);
                next.push([b, bc, ab]);
                next.push([c, ca, bc]);
                next.push([ab, bc, ca]);
            }
            triangles = next;
        }
        Icosphere { vertices, triangles }
    }

    /// Quadrature nodes (normalised triangle centroids) and weights (exact
    /// spherical-triangle solid angles) on the unit sphere. Weights sum to 4π.
    pub fn quadrature(&self) -> Vec<([f64; 3], f64)> {
        self.triangles
            .iter()
            .map(|&[a, b, c]| {
                let (p, q, r) = (self.vertices[a], self.vertices[b], self.vertices[c]);
                let centroid = normalize([
                    p[0] + q[0] + r[0],
                    p[1] + q[1] + r[1],
                    p[2] + q[2] + r[2],
                ]);
                (centroid, solid_angle(p, q, r))
            })
            .collect()
    }
}

/// Signed solid angle of the spherical triangle spanned by three unit vectors
/// (Van Oosterom–Strackee).
pub fn solid_angle(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    let num = dot(a, cross(b, c));
    let den = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
    2.0 * num.atan2(den)
}

pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = dot(v, v).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Area of the unit sphere, used to sanity check quadratures.
pub const SPHERE_AREA: f64 = 4.0 * PI;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_small_input() {
        let v: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        let naive: f64 = v.iter().sum();
        assert!((pairwise_sum(&v) - naive).abs() < 1e-12);
        assert_eq!(pairwise_sum(&v), pairwise_sum_by(v.len(), &|i| v[i]));
    }

    #[test]
    fn icosphere_counts_and_area() {
        for level in 0..5 {
            let s = Icosphere::new(level);
            assert_eq!(s.triangles.len(), 20 * 4usize.pow(level));
            assert_eq!(s.vertices.len(), 10 * 4usize.pow(level) + 2);
            let total: f64 = s.quadrature().iter().map(|q| q.1).sum();
            assert!((total - SPHERE_AREA).abs() < 1e-10, "level {level}: {total}");
        }
    }

    #[test]
    fn triangles_face_outward() {
        let s = Icosphere::new(2);
        for &[a, b, c] in &s.triangles {
            assert!(solid_angle(s.vertices[a], s.vertices[b], s.vertices[c]) > 0.0);
        }
    }
}
