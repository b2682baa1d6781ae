use std::collections::HashMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CapfieldError, Result};
use crate::sphere::cap::uniform_on_sphere;
use crate::sphere::point::{angle_of_chord, SpherePoint};

/// A 2^{-n}-separated net on S^d: min pairwise chordal distance ≥ 2^{-level},
/// every sphere point within 2^{-level} of the net. Levels nest: a level-n net
/// is the prefix of the level-(n+1) net built by the same call.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Net {
    pub d: usize,
    pub level: u32,
    pub seed: u64,
    pub points: Vec<SpherePoint>,
    /// Exact minimum pairwise chordal distance.
    pub separation: f64,
    /// Largest distance from a sphere point to the net: exact on the circle,
    /// a sampled estimate on higher spheres.
    pub covering_gap: f64,
    pub covering_exact: bool,
}

impl Net {
    pub fn cardinality(&self) -> usize {
        self.points.len()
    }
}

/// Verification summary for a net, recomputed from the point list.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetReport {
    pub level: u32,
    pub cardinality: usize,
    pub separation: f64,
    pub separation_ok: bool,
    pub covering_gap: f64,
    pub covering_ok: bool,
    /// cardinality / 2^{level·d}
    pub cardinality_ratio: f64,
}

/// Builds nested nets R_1, …, R_{n_max}. The circle gets an exact maximal
/// construction; higher spheres run greedy insertion over a low-discrepancy
/// stream followed by uniform dart batches until a full batch inserts nothing.
pub fn build_net(d: usize, n_max: u32, seed: u64) -> Result<Vec<Net>> {
    if d == 0 {
        return Err(CapfieldError::OutOfRange("nets need d ≥ 1".into()));
    }
    if n_max == 0 {
        return Err(CapfieldError::OutOfRange("nets need n_max ≥ 1".into()));
    }
    if d == 1 {
        build_net_circle(n_max, seed)
    } else {
        build_net_greedy(d, n_max, seed)
    }
}

fn level_rng(seed: u64, level: u32, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(
        seed ^ (level as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ stream.wrapping_mul(0xd134_2543_de82_ef95),
    )
}

/// Exact circle nets. State is the list of angles in insertion order; each
/// level fills every angular gap G with the largest m such that the spacing
/// G/(m+1) still has chord ≥ 2^{-level}. Gaps end below twice the separation
/// angle, so the covering radius chord stays below 2^{-level}.
fn build_net_circle(n_max: u32, seed: u64) -> Result<Vec<Net>> {
    let mut rng = level_rng(seed, 0, 0);
    let mut angles: Vec<f64> = vec![rng.gen::<f64>() * 2.0 * PI];
    let mut nets = Vec::with_capacity(n_max as usize);
    for level in 1..=n_max {
        let sep = 2.0_f64.powi(-(level as i32));
        let delta = angle_of_chord(sep);
        let mut sorted = angles.clone();
        sorted.sort_by(|a, b| a.total_cmp(b));
        let k = sorted.len();
        let mut new_angles = Vec::new();
        for i in 0..k {
            let left = sorted[i];
            let gap = if i + 1 < k {
                sorted[i + 1] - left
            } else {
                sorted[0] + 2.0 * PI - left
            };
            let mut m = (gap / delta).floor() as i64; // candidate count + 1
            m -= 1;
            // largest m whose spacing chord clears the separation in floats
            while m > 0 {
                let t = gap / (m + 1) as f64;
                if 2.0 * (0.5 * t).sin() >= sep {
                    break;
                }
                m -= 1;
            }
            for j in 1..=m {
                new_angles.push((left + gap * j as f64 / (m + 1) as f64).rem_euclid(2.0 * PI));
            }
        }
        new_angles.sort_by(|a, b| a.total_cmp(b));
        angles.extend_from_slice(&new_angles);

        let mut sorted = angles.clone();
        sorted.sort_by(|a, b| a.total_cmp(b));
        let mut min_gap = f64::INFINITY;
        let mut max_gap: f64 = 0.0;
        for i in 0..sorted.len() {
            let g = if i + 1 < sorted.len() {
                sorted[i + 1] - sorted[i]
            } else {
                sorted[0] + 2.0 * PI - sorted[i]
            };
            min_gap = min_gap.min(g);
            max_gap = max_gap.max(g);
        }
        let separation = 2.0 * (0.5 * min_gap).sin();
        let covering_gap = 2.0 * (0.25 * max_gap).sin();
        nets.push(Net {
            d: 1,
            level,
            seed,
            points: angles.iter().map(|&a| SpherePoint::from_angle(a)).collect(),
            separation,
            covering_gap,
            covering_exact: true,
        });
    }
    Ok(nets)
}

fn build_net_greedy(d: usize, n_max: u32, seed: u64) -> Result<Vec<Net>> {
    let mut pts: Vec<SpherePoint> = Vec::new();
    let mut nets = Vec::with_capacity(n_max as usize);
    for level in 1..=n_max {
        let sep = 2.0_f64.powi(-(level as i32));
        let mut grid = NeighborGrid::new(d + 1, sep);
        for p in &pts {
            grid.insert(p.coords());
        }
        let try_insert = |grid: &mut NeighborGrid, pts: &mut Vec<SpherePoint>, p: SpherePoint| {
            if !grid.any_within(p.coords(), sep) {
                grid.insert(p.coords());
                pts.push(p);
                true
            } else {
                false
            }
        };
        let (covering_gap, covering_exact);
        if d == 2 {
            // low-discrepancy starting stream, then certified hole repair
            let m = (512usize << (2 * level.min(12))).min(4_000_000);
            let rot = random_rotation3(&mut level_rng(seed, level, 1));
            for i in 0..m {
                let p = fibonacci_point(i, m, &rot);
                try_insert(&mut grid, &mut pts, p);
            }
            let eta = 0.9 * (4.0 * PI / m as f64).sqrt();
            covering_gap = voronoi_repair(&mut grid, &mut pts, sep, eta);
            covering_exact = true;
        } else {
            // uniform dart batches until two in a row insert nothing
            let batch = 100_000usize.max(16 << (2 * level.min(12)));
            let mut dart_rng = level_rng(seed, level, 2);
            let mut quiet = 0;
            for _round in 0..60 {
                let mut inserted = 0usize;
                for _ in 0..batch {
                    let p = uniform_on_sphere(d, &mut dart_rng);
                    if try_insert(&mut grid, &mut pts, p) {
                        inserted += 1;
                    }
                }
                quiet = if inserted == 0 { quiet + 1 } else { 0 };
                if quiet >= 2 {
                    break;
                }
            }
            // sampled covering estimate on a stream independent of the darts
            let mut cov_rng = level_rng(seed, level, 3);
            let samples = 100_000usize.max(32 << (2 * level.min(12)));
            let mut gap: f64 = 0.0;
            for _ in 0..samples {
                let q = uniform_on_sphere(d, &mut cov_rng);
                if let Some((_, dist)) = grid.nearest(q.coords()) {
                    gap = gap.max(dist);
                }
            }
            covering_gap = gap;
            covering_exact = false;
        }
        let separation = grid.min_pairwise().unwrap_or(f64::INFINITY);
        nets.push(Net {
            d,
            level,
            seed,
            points: pts.clone(),
            separation,
            covering_gap,
            covering_exact,
        });
    }
    Ok(nets)
}

/// Certified covering control on S². Local maxima of the distance to a finite
/// point set sit at spherical Voronoi vertices, the circumcenters of triples
/// of mutually near points. Any vertex at distance ≥ sep from the net is a
/// hole and can be inserted without breaking the separation; the sweep repeats
/// until none remain, and the last sweep's largest vertex distance is the
/// exact covering radius.
fn voronoi_repair(
    grid: &mut NeighborGrid,
    pts: &mut Vec<SpherePoint>,
    sep: f64,
    stream_resolution: f64,
) -> f64 {
    // circumradius of any hole is at most sep + stream resolution
    let neighbor_radius = (3.0 * sep).max(2.2 * (sep + stream_resolution));
    for _sweep in 0..200 {
        let mut worst: f64 = 0.0;
        let mut holes: Vec<(f64, [f64; 3])> = Vec::new();
        for i in 0..pts.len() {
            let pi3 = [pts[i].coords()[0], pts[i].coords()[1], pts[i].coords()[2]];
            let nbrs = grid.within(&pi3, neighbor_radius);
            let idxs: Vec<usize> = nbrs
                .iter()
                .map(|&(j, _)| j as usize)
                .filter(|&j| j > i)
                .collect();
            for a in 0..idxs.len() {
                for b in (a + 1)..idxs.len() {
                    let pj = pts[idxs[a]].coords();
                    let pk = pts[idxs[b]].coords();
                    let pj3 = [pj[0], pj[1], pj[2]];
                    let pk3 = [pk[0], pk[1], pk[2]];
                    for c in circumcenters(&pi3, &pj3, &pk3) {
                        let r2 = (c[0] - pi3[0]) * (c[0] - pi3[0])
                            + (c[1] - pi3[1]) * (c[1] - pi3[1])
                            + (c[2] - pi3[2]) * (c[2] - pi3[2]);
                        let r = r2.sqrt();
                        if r > neighbor_radius {
                            continue;
                        }
                        if let Some((_, nd)) = grid.nearest(&c) {
                            if nd + 1e-12 >= r {
                                // generators are nearest: genuine Voronoi vertex
                                worst = worst.max(nd);
                                if nd >= sep {
                                    holes.push((nd, c));
                                }
                            }
                        }
                    }
                }
            }
        }
        if holes.is_empty() {
            return worst;
        }
        holes.sort_by(|x, y| y.0.total_cmp(&x.0));
        let mut inserted = 0usize;
        for (_, c) in holes {
            if grid.nearest(&c).is_none_or(|(_, nd)| nd >= sep) {
                if let Ok(p) = SpherePoint::normalized(c.to_vec()) {
                    grid.insert(p.coords());
                    pts.push(p);
                    inserted += 1;
                }
            }
        }
        if inserted == 0 {
            return worst;
        }
    }
    f64::INFINITY
}

/// Both unit circumcenters of a point triple on S²: the directions orthogonal
/// to p − q and p − r.
fn circumcenters(p: &[f64; 3], q: &[f64; 3], r: &[f64; 3]) -> Vec<[f64; 3]> {
    let u = [p[0] - q[0], p[1] - q[1], p[2] - q[2]];
    let v = [p[0] - r[0], p[1] - r[1], p[2] - r[2]];
    let c = [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ];
    let n = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
    if n < 1e-14 {
        return Vec::new();
    }
    vec![
        [c[0] / n, c[1] / n, c[2] / n],
        [-c[0] / n, -c[1] / n, -c[2] / n],
    ]
}

fn fibonacci_point(i: usize, m: usize, rot: &[[f64; 3]; 3]) -> SpherePoint {
    let z = 1.0 - (2.0 * i as f64 + 1.0) / m as f64;
    let r = (1.0 - z * z).max(0.0).sqrt();
    let phi = i as f64 * PI * (3.0 - 5.0_f64.sqrt());
    let v = [r * phi.cos(), r * phi.sin(), z];
    let coords: Vec<f64> = (0..3)
        .map(|row| rot[row][0] * v[0] + rot[row][1] * v[1] + rot[row][2] * v[2])
        .collect();
    SpherePoint::normalized(coords).expect("rotated unit vector")
}

/// Rotation matrix from a uniform random unit quaternion.
fn random_rotation3(rng: &mut impl Rng) -> [[f64; 3]; 3] {
    let mut q = [0.0f64; 4];
    loop {
        let mut norm2 = 0.0;
        for qi in q.iter_mut() {
            let u1: f64 = rng.gen::<f64>().max(1e-300);
            let u2: f64 = rng.gen();
            *qi = (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos();
            norm2 += *qi * *qi;
        }
        if norm2 > 1e-12 {
            let n = norm2.sqrt();
            for qi in q.iter_mut() {
                *qi /= n;
            }
            break;
        }
    }
    let (w, x, y, z) = (q[0], q[1], q[2], q[3]);
    [
        [
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
        ],
        [
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
        ],
        [
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        ],
    ]
}

/// Recomputes the invariants of a net from its point list.
pub fn verify_net(net: &Net, samples: usize, seed: u64) -> NetReport {
    let sep_target = 2.0_f64.powi(-(net.level as i32));
    let mut grid = NeighborGrid::new(net.d + 1, sep_target);
    for p in &net.points {
        grid.insert(p.coords());
    }
    let separation = grid.min_pairwise().unwrap_or(f64::INFINITY);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut covering_gap: f64 = 0.0;
    for _ in 0..samples {
        let q = uniform_on_sphere(net.d, &mut rng);
        if let Some((_, dist)) = grid.nearest(q.coords()) {
            covering_gap = covering_gap.max(dist);
        }
    }
    NetReport {
        level: net.level,
        cardinality: net.points.len(),
        separation,
        separation_ok: separation >= sep_target,
        covering_gap,
        covering_ok: covering_gap < sep_target,
        cardinality_ratio: net.points.len() as f64
            / 2.0_f64.powi(net.level as i32 * net.d as i32),
    }
}

/// Structural checks for a (possibly deserialized) family: consecutive levels
/// starting at 1, shared dimension, prefix nesting, points on the sphere, and
/// each level's recomputed minimum pairwise distance at least 2^(-level).
pub fn validate_net_family(nets: &[Net]) -> Result<()> {
    if nets.is_empty() {
        return Err(CapfieldError::BadNetFamily);
    }
    let d = nets[0].d;
    for (i, net) in nets.iter().enumerate() {
        if net.level != i as u32 + 1 || net.d != d || net.points.is_empty() {
            return Err(CapfieldError::BadNetFamily);
        }
        for p in &net.points {
            if p.d() != d {
                return Err(CapfieldError::DimensionMismatch {
                    expected: d + 1,
                    got: p.coords().len(),
                });
            }
            let deviation = (p.dot(p) - 1.0).abs();
            if deviation > 1e-9 {
                return Err(CapfieldError::OffSphere { deviation });
            }
        }
        if i > 0 {
            let prev = &nets[i - 1];
            if net.points.len() < prev.points.len()
                || net.points[..prev.points.len()] != prev.points[..]
            {
                return Err(CapfieldError::BadNetFamily);
            }
        }
        let sep_target = 2.0_f64.powi(-(net.level as i32));
        let mut grid = NeighborGrid::new(d + 1, sep_target);
        for p in &net.points {
            grid.insert(p.coords());
        }
        if let Some(min) = grid.min_pairwise() {
            if min < sep_target - 1e-12 {
                return Err(CapfieldError::OutOfRange(format!(
                    "separation invariant violated at level {}: minimum pairwise distance {min:.6e} is below 2^-{}",
                    net.level, net.level
                )));
            }
            if (net.separation - min).abs() > 1e-9 {
                return Err(CapfieldError::OutOfRange(format!(
                    "recorded separation {:.6e} at level {} disagrees with the point list ({min:.6e})",
                    net.separation, net.level
                )));
            }
        }
    }
    Ok(())
}

/// Uniform grid over ambient coordinates for near-neighbor queries on the
/// sphere; cell size equals the query scale so searches touch 3^{d+1} cells.
pub(crate) struct NeighborGrid {
    cell: f64,
    dim: usize,
    map: HashMap<Vec<i32>, Vec<u32>>,
    pts: Vec<Vec<f64>>,
}

impl NeighborGrid {
    pub fn new(dim: usize, cell: f64) -> Self {
        NeighborGrid {
            cell: cell.max(1e-9),
            dim,
            map: HashMap::new(),
            pts: Vec::new(),
        }
    }

    fn key(&self, coords: &[f64]) -> Vec<i32> {
        coords.iter().map(|&x| (x / self.cell).floor() as i32).collect()
    }

    pub fn insert(&mut self, coords: &[f64]) -> u32 {
        debug_assert_eq!(coords.len(), self.dim);
        let idx = self.pts.len() as u32;
        self.map.entry(self.key(coords)).or_default().push(idx);
        self.pts.push(coords.to_vec());
        idx
    }

    fn dist2(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
    }

    fn for_each_in_box(&self, center: &[i32], reach: i32, mut f: impl FnMut(u32, &[f64])) {
        let dim = self.dim;
        let mut offs = vec![-reach; dim];
        'outer: loop {
            let key: Vec<i32> = center.iter().zip(&offs).map(|(c, o)| c + o).collect();
            if let Some(bucket) = self.map.get(&key) {
                for &idx in bucket {
                    f(idx, &self.pts[idx as usize]);
                }
            }
            for i in 0..dim {
                offs[i] += 1;
                if offs[i] <= reach {
                    continue 'outer;
                }
                offs[i] = -reach;
            }
            break;
        }
    }

    /// All stored points at distance ≤ r from q, with their distances.
    pub fn within(&self, q: &[f64], r: f64) -> Vec<(u32, f64)> {
        let reach = (r / self.cell).ceil() as i32;
        let center = self.key(q);
        let r2 = r * r;
        let mut out = Vec::new();
        self.for_each_in_box(&center, reach, |idx, p| {
            let d2 = Self::dist2(q, p);
            if d2 <= r2 {
                out.push((idx, d2.sqrt()));
            }
        });
        out
    }

    /// Any stored point at distance < r from q?
    pub fn any_within(&self, q: &[f64], r: f64) -> bool {
        let reach = (r / self.cell).ceil() as i32;
        let center = self.key(q);
        let r2 = r * r;
        let mut found = false;
        self.for_each_in_box(&center, reach, |_, p| {
            if !found && Self::dist2(q, p) < r2 {
                found = true;
            }
        });
        found
    }

    /// Index and distance of the closest stored point.
    pub fn nearest(&self, q: &[f64]) -> Option<(u32, f64)> {
        if self.pts.is_empty() {
            return None;
        }
        let center = self.key(q);
        let mut reach = 1i32;
        loop {
            let mut best: Option<(u32, f64)> = None;
            self.for_each_in_box(&center, reach, |idx, p| {
                let d2 = Self::dist2(q, p);
                if best.map_or(true, |(_, bd)| d2 < bd * bd) {
                    best = Some((idx, d2.sqrt()));
                }
            });
            if let Some((_, bd)) = best {
                // nothing outside the box can be closer than (reach)·cell
                if bd <= reach as f64 * self.cell {
                    return best;
                }
            }
            reach *= 2;
            if reach as f64 * self.cell > 4.0 {
                // the whole sphere fits in the box by now; scan is complete
                let mut global: Option<(u32, f64)> = None;
                for (idx, p) in self.pts.iter().enumerate() {
                    let dd = Self::dist2(q, p).sqrt();
                    if global.map_or(true, |(_, bd)| dd < bd) {
                        global = Some((idx as u32, dd));
                    }
                }
                return global;
            }
        }
    }

    /// Exact minimum pairwise distance, assuming it is below 3·cell
    /// (true for maximal nets, whose nearest neighbors sit within twice the
    /// separation); falls back to a full scan for tiny sets.
    pub fn min_pairwise(&self) -> Option<f64> {
        if self.pts.len() < 2 {
            return None;
        }
        if self.pts.len() <= 64 {
            let mut best = f64::INFINITY;
            for i in 0..self.pts.len() {
                for j in (i + 1)..self.pts.len() {
                    best = best.min(Self::dist2(&self.pts[i], &self.pts[j]));
                }
            }
            return Some(best.sqrt());
        }
        let mut best2 = f64::INFINITY;
        for (i, p) in self.pts.iter().enumerate() {
            let center = self.key(p);
            self.for_each_in_box(&center, 3, |j, qp| {
                if (j as usize) > i {
                    best2 = best2.min(Self::dist2(p, qp));
                }
            });
        }
        Some(best2.sqrt())
    }
}
