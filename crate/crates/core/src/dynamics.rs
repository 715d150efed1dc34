//! Orbits, the horseshoe strip construction, phase-space slices of the coupled
//! map and sampled manifold meshes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold2d::Series2D;
use crate::manifold4d::Series4D;
use crate::maps::{MapParams4D, PhaseMap, Point2D, Point4D};

pub const DEFAULT_ESCAPE_RADIUS: f64 = 1e3;
pub const DEFAULT_SLICE_TOLERANCE: f64 = 1e-4;
pub const DEFAULT_HORSESHOE_A: f64 = 5.0;
pub const DEFAULT_HORSESHOE_GRID: usize = 1000;
pub const DEFAULT_MESH_RESOLUTION: usize = 200;
/// Columns occupied below this fraction of the fullest column separate bands.
pub const BAND_OCCUPANCY_FRACTION: f64 = 0.5;

/// `y` coordinate of the period-2 point `(1/sqrt 6, -1/sqrt 6)`.
pub fn default_y2_star() -> f64 {
    -1.0 / 6f64.sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub points: Vec<Vec<f64>>,
    pub escaped: bool,
    pub escape_index: Option<usize>,
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Iterates `map` for up to `n_steps` steps. The orbit stops at the first
/// point outside `escape_radius`, which is kept as the last entry.
pub fn iterate_orbit(map: &dyn PhaseMap, start: &[f64], n_steps: usize, escape_radius: f64) -> OrbitRecord {
    let mut points = vec![start.to_vec()];
    if norm(start) > escape_radius {
        return OrbitRecord {
            points,
            escaped: true,
            escape_index: Some(0),
        };
    }
    let mut p = start.to_vec();
    for k in 1..=n_steps {
        match map.forward(&p) {
            Ok(next) => {
                let out = norm(&next) > escape_radius;
                points.push(next.clone());
                if out {
                    return OrbitRecord {
                        points,
                        escaped: true,
                        escape_index: Some(k),
                    };
                }
                p = next;
            }
            Err(_) => {
                points.push(vec![f64::INFINITY; p.len()]);
                return OrbitRecord {
                    points,
                    escaped: true,
                    escape_index: Some(k),
                };
            }
        }
    }
    OrbitRecord {
        points,
        escaped: false,
        escape_index: None,
    }
}

/// Orbits of several seeds, computed in parallel and returned in seed order.
pub fn iterate_orbits(
    map: &dyn PhaseMap,
    seeds: &[Vec<f64>],
    n_steps: usize,
    escape_radius: f64,
) -> Vec<OrbitRecord> {
    seeds
        .par_iter()
        .map(|s| iterate_orbit(map, s, n_steps, escape_radius))
        .collect()
}

/// The map `(x, y) -> (y, -x + 3 a^3 y^3 - 5/2 a y)` conjugate to the cubic map
/// at unit determinant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorseshoeMap {
    pub a: f64,
}

impl HorseshoeMap {
    fn p(&self, y: f64) -> f64 {
        3.0 * self.a.powi(3) * y.powi(3) - 2.5 * self.a * y
    }

    pub fn apply(&self, [x, y]: Point2D) -> Point2D {
        [y, -x + self.p(y)]
    }

    pub fn inverse(&self, [x, y]: Point2D) -> Point2D {
        [self.p(x) - y, x]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorseshoeSets {
    pub grid_n: usize,
    /// The grid over `Q = [-1/2, 1/2]^2`.
    pub square: Vec<Point2D>,
    /// Grid points of `Q` lying in the forward image `f(Q)`.
    pub forward: Vec<Point2D>,
    /// Points of `forward` whose image stays in `Q`.
    pub both: Vec<Point2D>,
}

fn in_square(p: Point2D) -> bool {
    p[0].abs() <= 0.5 && p[1].abs() <= 0.5
}

/// Samples `Q`, `Q ∩ f(Q)` and `f^{-1}(Q) ∩ Q ∩ f(Q)` on a `grid_n x grid_n`
/// grid of cell centres.
pub fn horseshoe_strips(a: f64, grid_n: usize) -> Result<HorseshoeSets> {
    if grid_n < 2 {
        return Err(Error::InvalidArgument("horseshoe grid needs grid_n >= 2".into()));
    }
    let map = HorseshoeMap { a };
    let coord = |k: usize| -0.5 + (k as f64 + 0.5) / grid_n as f64;
    let square: Vec<Point2D> = (0..grid_n)
        .flat_map(|i| (0..grid_n).map(move |j| [coord(i), coord(j)]))
        .collect();
    let forward: Vec<Point2D> = square
        .iter()
        .copied()
        .filter(|&z| in_square(map.inverse(z)))
        .collect();
    let both = forward
        .iter()
        .copied()
        .filter(|&z| in_square(map.apply(z)))
        .collect();
    Ok(HorseshoeSets {
        grid_n,
        square,
        forward,
        both,
    })
}

/// Vertical bands of a point set on the horseshoe grid, found from the
/// histogram of `x` coordinates: columns holding less than
/// [`BAND_OCCUPANCY_FRACTION`] of the fullest column act as gaps. Returns the
/// `x` extents of each band.
pub fn vertical_bands(points: &[Point2D], grid_n: usize) -> Vec<(f64, f64)> {
    let mut counts = vec![0usize; grid_n];
    for p in points {
        let k = (((p[0] + 0.5) * grid_n as f64).floor() as isize).clamp(0, grid_n as isize - 1);
        counts[k as usize] += 1;
    }
    let max = counts.iter().copied().max().unwrap_or(0);
    if max == 0 {
        return Vec::new();
    }
    let threshold = BAND_OCCUPANCY_FRACTION * max as f64;
    let coord = |k: usize| -0.5 + (k as f64 + 0.5) / grid_n as f64;
    let mut bands = Vec::new();
    let mut open: Option<usize> = None;
    for (k, &c) in counts.iter().enumerate() {
        let filled = c as f64 >= threshold;
        match (filled, open) {
            (true, None) => open = Some(k),
            (false, Some(s)) => {
                bands.push((coord(s), coord(k - 1)));
                open = None;
            }
            _ => {}
        }
    }
    if let Some(s) = open {
        bands.push((coord(s), coord(grid_n - 1)));
    }
    bands
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlicePoint {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub seed_index: usize,
    /// Iterate number along the seed's orbit.
    pub source_index: usize,
}

/// Iterates each seed and keeps `(x1, y1, x2)` of every orbit point with
/// `|y2 - y2_star| < tolerance`. Orbits stop once they leave
/// [`DEFAULT_ESCAPE_RADIUS`].
pub fn slice_4d(
    params: &MapParams4D,
    seeds: &[Point4D],
    n_steps: usize,
    y2_star: f64,
    tolerance: f64,
) -> Result<Vec<SlicePoint>> {
    if !(tolerance > 0.0) {
        return Err(Error::InvalidArgument("slice tolerance must be positive".into()));
    }
    let per_seed: Vec<Vec<SlicePoint>> = seeds
        .par_iter()
        .enumerate()
        .map(|(seed_index, &seed)| {
            let mut out = Vec::new();
            let mut p = seed;
            for k in 0..=n_steps {
                if (p[3] - y2_star).abs() < tolerance {
                    out.push(SlicePoint {
                        x1: p[0],
                        y1: p[1],
                        x2: p[2],
                        seed_index,
                        source_index: k,
                    });
                }
                if k == n_steps {
                    break;
                }
                match params.apply(p) {
                    Ok(next) if norm(&next) <= DEFAULT_ESCAPE_RADIUS => p = next,
                    _ => break,
                }
            }
            out
        })
        .collect();
    Ok(per_seed.into_iter().flatten().collect())
}

/// Series evaluated on a uniform parameter grid. Rows follow the second
/// parameter, columns the first; a curve is a single row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub rows: usize,
    pub cols: usize,
    pub bounds: Vec<(f64, f64)>,
    /// Row-major records: parameters followed by the phase-space point.
    pub records: Vec<Vec<f64>>,
}

fn axis(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| {
        if n == 1 {
            lo
        } else {
            lo + (hi - lo) * k as f64 / (n - 1) as f64
        }
    })
}

/// Parametrization to be sampled on a mesh.
#[derive(Debug, Clone, Copy)]
pub enum MeshSource<'a> {
    Curve(&'a Series2D),
    Surface(&'a Series4D),
}

pub fn sample_manifold_grid(source: MeshSource<'_>, bounds: &[(f64, f64)], resolution: usize) -> Result<Mesh> {
    if resolution == 0 {
        return Err(Error::InvalidArgument("mesh resolution must be positive".into()));
    }
    match source {
        MeshSource::Curve(s) => {
            let &[(lo, hi)] = bounds else {
                return Err(Error::InvalidArgument("a curve mesh needs one parameter range".into()));
            };
            let records = axis(lo, hi, resolution)
                .map(|t| {
                    let [x, y] = s.eval(t);
                    vec![t, x, y]
                })
                .collect();
            Ok(Mesh {
                rows: 1,
                cols: resolution,
                bounds: bounds.to_vec(),
                records,
            })
        }
        MeshSource::Surface(s) => {
            let &[(ulo, uhi), (vlo, vhi)] = bounds else {
                return Err(Error::InvalidArgument("a surface mesh needs two parameter ranges".into()));
            };
            let us: Vec<f64> = axis(ulo, uhi, resolution).collect();
            let vs: Vec<f64> = axis(vlo, vhi, resolution).collect();
            let records = vs
                .par_iter()
                .flat_map_iter(|&v| {
                    us.iter().map(move |&u| {
                        let p = s.eval(u, v);
                        vec![u, v, p[0], p[1], p[2], p[3]]
                    })
                })
                .collect();
            Ok(Mesh {
                rows: resolution,
                cols: resolution,
                bounds: bounds.to_vec(),
                records,
            })
        }
    }
}

/// Globalized manifold curve: a fundamental segment `t in [t_max/|lambda|, t_max]`
/// (and its mirror) pushed through `iterations` applications of the map, or of
/// its inverse for a stable series. Each returned curve is one image of the
/// segment; points that diverge are dropped.
pub fn iterated_manifold_curves(
    s: &Series2D,
    t_max: f64,
    n_points: usize,
    iterations: usize,
) -> Result<Vec<Vec<Point2D>>> {
    if n_points < 2 || !(t_max > 0.0) {
        return Err(Error::InvalidArgument("need t_max > 0 and at least 2 points".into()));
    }
    let lo = t_max / s.lambda.abs();
    let seg: Vec<Point2D> = axis(lo, t_max, n_points)
        .chain(axis(-t_max, -lo, n_points))
        .map(|t| s.eval(t))
        .collect();
    let step = |p: Point2D| match s.branch {
        crate::manifold2d::Branch::Unstable => s.params.apply(p),
        crate::manifold2d::Branch::Stable => s.params.inverse(p),
    };
    let mut curves = vec![seg];
    for _ in 0..iterations {
        let next: Vec<Point2D> = curves
            .last()
            .expect("at least one curve")
            .iter()
            .filter_map(|&p| step(p).ok().filter(|q| norm(q) <= DEFAULT_ESCAPE_RADIUS))
            .collect();
        curves.push(next);
    }
    Ok(curves)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold2d::{compute_coeffs_2d, Branch};
    use crate::manifold4d::compute_coeffs_4d;
    use crate::maps::MapParams2D;
    use approx::assert_abs_diff_eq;

    const STD: MapParams2D = MapParams2D { c: -2.5, delta: 1.0 };

    #[test]
    fn origin_orbit_is_constant() {
        let o = iterate_orbit(&STD, &[0.0, 0.0], 50, DEFAULT_ESCAPE_RADIUS);
        assert!(!o.escaped);
        assert_eq!(o.points.len(), 51);
        assert!(o.points.iter().all(|p| p == &vec![0.0, 0.0]));
    }

    #[test]
    fn period_two_cycle() {
        let r = 1.0 / 6f64.sqrt();
        let o = iterate_orbit(&STD, &[r, -r], 2, DEFAULT_ESCAPE_RADIUS);
        assert!((o.points[1][0] + r).abs() < 1e-12 && (o.points[1][1] - r).abs() < 1e-12);
        assert!((o.points[2][0] - r).abs() < 1e-12 && (o.points[2][1] + r).abs() < 1e-12);
    }

    #[test]
    fn escaping_orbit() {
        let o = iterate_orbit(&STD, &[0.6, -0.6], 100, DEFAULT_ESCAPE_RADIUS);
        assert!(o.escaped);
        let k = o.escape_index.unwrap();
        assert!(k <= 100);
        assert_eq!(o.points.len(), k + 1);
        assert!(norm(o.points.last().unwrap()) > DEFAULT_ESCAPE_RADIUS);
        // a larger radius never escapes earlier
        let far = iterate_orbit(&STD, &[0.6, -0.6], 100, 1e6);
        assert!(far.escape_index.unwrap_or(usize::MAX) >= k);
    }

    #[test]
    fn parallel_orbits_keep_seed_order() {
        let seeds: Vec<Vec<f64>> = (0..8).map(|k| vec![0.05 * k as f64, 0.0]).collect();
        let orbits = iterate_orbits(&STD, &seeds, 20, DEFAULT_ESCAPE_RADIUS);
        for (s, o) in seeds.iter().zip(&orbits) {
            assert_eq!(&o.points[0], s);
        }
    }

    #[test]
    fn horseshoe_map_round_trip() {
        let m = HorseshoeMap { a: 5.0 };
        for p in [[0.1, -0.2], [0.3, 0.4], [-0.45, 0.05]] {
            let q = m.inverse(m.apply(p));
            assert_abs_diff_eq!(q[0], p[0], epsilon = 1e-13);
            assert_abs_diff_eq!(q[1], p[1], epsilon = 1e-13);
        }
    }

    #[test]
    fn horseshoe_three_bands() {
        let sets = horseshoe_strips(DEFAULT_HORSESHOE_A, DEFAULT_HORSESHOE_GRID).unwrap();
        assert_eq!(sets.square.len(), 1_000_000);
        assert!(sets.both.len() <= sets.forward.len() && sets.forward.len() <= sets.square.len());
        let bands = vertical_bands(&sets.forward, sets.grid_n);
        assert_eq!(bands.len(), 3, "{bands:?}");
        let intervals = [(-1.03, -0.149), (-0.05, 0.05), (0.149, 1.03)];
        for (b, v) in bands.iter().zip(intervals) {
            assert!(b.0 > v.0 && b.1 < v.1, "band {b:?} outside {v:?}");
        }
        // the strips lie around the roots of p
        let r = 1.0 / 30f64.sqrt();
        assert!(bands[0].0 < -r && -r < bands[0].1);
        assert!(bands[2].0 < r && r < bands[2].1);
    }

    #[test]
    fn horseshoe_small_grid_contains_origin() {
        // odd grid puts a cell centre at the fixed point
        let sets = horseshoe_strips(5.0, 11).unwrap();
        for set in [&sets.square, &sets.forward, &sets.both] {
            assert!(set.iter().any(|p| p[0].abs() < 1e-15 && p[1].abs() < 1e-15));
        }
        assert!(horseshoe_strips(5.0, 1).is_err());
    }

    #[test]
    fn slice_emits_seed_on_plane() {
        let p = MapParams4D::new(-2.5, 1.0, 0.0);
        let y = default_y2_star();
        let pts = slice_4d(&p, &[[0.1, 0.2, 0.3, y]], 0, y, DEFAULT_SLICE_TOLERANCE).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!((pts[0].x1, pts[0].y1, pts[0].x2), (0.1, 0.2, 0.3));
        assert_eq!(pts[0].source_index, 0);
        // the origin never reaches the plane
        let none = slice_4d(&p, &[[0.0; 4]], 1000, y, DEFAULT_SLICE_TOLERANCE).unwrap();
        assert!(none.is_empty());
        assert!(slice_4d(&p, &[[0.0; 4]], 10, y, 0.0).is_err());
    }

    #[test]
    fn slice_points_near_elliptic_cycle() {
        let p = MapParams4D::new(-2.5, 1.0, 0.0);
        let e = 1.0 / 6f64.sqrt();
        let seed = [e + 0.02, -e, e + 0.01, -e + 0.01];
        let pts = slice_4d(&p, &[seed], 200_000, -e, 1e-3).unwrap();
        assert!(!pts.is_empty());
        for q in &pts {
            // regular orbit: stays near the period-2 cycle (x^e, y^e, x^e) or its image
            let d1 = ((q.x1 - e).powi(2) + (q.y1 + e).powi(2) + (q.x2 - e).powi(2)).sqrt();
            assert!(d1 < 0.1, "{q:?}");
        }
        // emission count scales with the tolerance
        let wide = slice_4d(&p, &[seed], 200_000, -e, 1e-2).unwrap();
        let ratio = wide.len() as f64 / pts.len() as f64;
        assert!((5.0..=20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn curve_mesh_within_validity() {
        let s = compute_coeffs_2d(STD, Branch::Unstable, 34).unwrap();
        let m = sample_manifold_grid(MeshSource::Curve(&s), &[(-0.75, 0.75)], 101).unwrap();
        assert_eq!((m.rows, m.cols, m.records.len()), (1, 101, 101));
        for r in &m.records {
            assert!(s.defining_error(r[0]) < 1e-15);
        }
    }

    #[test]
    fn surface_mesh_structure() {
        let p = MapParams4D::new(-2.5, 1.0, 0.0);
        // corners at radius 0.71, inside the certified polar radius of N = 50
        let s = compute_coeffs_4d(p, Branch::Unstable, 50).unwrap();
        let m = sample_manifold_grid(MeshSource::Surface(&s), &[(-0.5, 0.5), (-0.5, 0.5)], 5).unwrap();
        assert_eq!(m.records.len(), 25);
        // centre node is the origin
        assert_eq!(&m.records[12][..2], &[0.0, 0.0]);
        assert!(m.records[12][2..].iter().all(|x| *x == 0.0));
        // row-major: u varies fastest
        assert_eq!(m.records[1][0], -0.25);
        assert_eq!(m.records[1][1], -0.5);
        for r in &m.records {
            assert!(s.defining_error(r[0], r[1]) < 1e-15);
        }
        assert!(sample_manifold_grid(MeshSource::Surface(&s), &[(-0.5, 0.5)], 5).is_err());
    }

    #[test]
    fn iterated_curves_stay_on_manifold() {
        let s = compute_coeffs_2d(STD, Branch::Unstable, 100).unwrap();
        let curves = iterated_manifold_curves(&s, 0.5, 50, 3).unwrap();
        assert_eq!(curves.len(), 4);
        // the first image of the fundamental segment is the series at lambda t
        let t = 0.5;
        let img = s.params.apply(s.eval(t)).unwrap();
        let direct = s.eval(s.lambda * t);
        assert_abs_diff_eq!(img[0], direct[0], epsilon = 1e-14);
        assert_eq!(curves[1].len(), 100);
    }
}
