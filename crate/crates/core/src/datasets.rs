//! Synthetic point clouds, density scores and the density-Rips bifiltration.
//!
//! All generators draw from a ChaCha8 stream seeded with the given seed, so a
//! fixed seed and fixed parameters reproduce the same cloud on every platform.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::complex::{BifilteredComplex, Bigrade, Simplex};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    pub points: Vec<[f64; 2]>,
    pub label: Option<i64>,
    pub seed: u64,
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn poisson_count(rng: &mut ChaCha8Rng, mean: f64) -> Result<usize> {
    if mean == 0.0 {
        return Ok(0);
    }
    let d = Poisson::new(mean)
        .map_err(|e| Error::InvalidArgument(format!("Poisson mean {mean}: {e}")))?;
    Ok(d.sample(rng) as usize)
}

// ---------------------------------------------------------------- shapes

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeParams {
    /// Minimum gap between the outer boundaries of two shapes.
    pub separation: f64,
    /// Outer radii are drawn uniformly from this range.
    pub radius_range: (f64, f64),
    /// Inner radius of an annulus as a fraction of its outer radius.
    pub annulus_inner_ratio: f64,
    /// Fraction of the points that is uniform noise, drawn uniformly from this range.
    pub noise_range: (f64, f64),
    /// Placement attempts before giving up.
    pub max_attempts: usize,
}

impl Default for ShapeParams {
    fn default() -> Self {
        ShapeParams {
            separation: 0.03,
            radius_range: (0.06, 0.12),
            annulus_inner_ratio: 0.5,
            noise_range: (0.0, 0.15),
            max_attempts: 10_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Shape {
    pub center: [f64; 2],
    pub radius: f64,
    /// Zero for a disk.
    pub inner_radius: f64,
}

impl Shape {
    pub fn is_annulus(&self) -> bool {
        self.inner_radius > 0.0
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        let d = dist(self.center, p);
        d <= self.radius * (1.0 + 1e-12) && d >= self.inner_radius * (1.0 - 1e-12)
    }

    fn area(&self) -> f64 {
        PI * (self.radius * self.radius - self.inner_radius * self.inner_radius)
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> [f64; 2] {
        let (a, b) = (self.inner_radius.powi(2), self.radius.powi(2));
        let rho = (a + (b - a) * rng.gen::<f64>()).sqrt();
        let theta = 2.0 * PI * rng.gen::<f64>();
        [
            self.center[0] + rho * theta.cos(),
            self.center[1] + rho * theta.sin(),
        ]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShapeSample {
    pub cloud: PointCloud,
    pub shapes: Vec<Shape>,
}

/// Class `i` holds `i` annuli and `5 - i` disks in the unit square plus
/// uniform noise; the label is `i`.
pub fn gen_shapes(
    class_id: usize,
    n_points: usize,
    seed: u64,
    params: &ShapeParams,
) -> Result<ShapeSample> {
    if class_id > 4 {
        return Err(Error::InvalidArgument(format!(
            "shape class must be in 0..=4, got {class_id}"
        )));
    }
    let (rlo, rhi) = params.radius_range;
    let (nlo, nhi) = params.noise_range;
    if !(params.separation > 0.0 && rlo > 0.0 && rlo <= rhi && rhi < 0.5) {
        return Err(Error::InvalidArgument(
            "separation and radii must be positive with radii below 0.5".into(),
        ));
    }
    if !(0.0..1.0).contains(&params.annulus_inner_ratio) || params.annulus_inner_ratio == 0.0 {
        return Err(Error::InvalidArgument(
            "annulus inner ratio must be in (0, 1)".into(),
        ));
    }
    if !(0.0 <= nlo && nlo <= nhi && nhi <= 1.0) {
        return Err(Error::InvalidArgument(
            "noise range must lie in [0, 1]".into(),
        ));
    }

    let mut rng = rng(seed);
    let mut shapes: Vec<Shape> = Vec::with_capacity(5);
    let mut attempts = 0;
    while shapes.len() < 5 {
        attempts += 1;
        if attempts > params.max_attempts {
            return Err(Error::Placement {
                shape: shapes.len(),
                attempts: params.max_attempts,
            });
        }
        let radius = rng.gen_range(rlo..=rhi);
        let center = [
            rng.gen_range(radius..=1.0 - radius),
            rng.gen_range(radius..=1.0 - radius),
        ];
        let inner_radius = if shapes.len() < class_id {
            radius * params.annulus_inner_ratio
        } else {
            0.0
        };
        let candidate = Shape {
            center,
            radius,
            inner_radius,
        };
        if shapes
            .iter()
            .all(|s| dist(s.center, center) - s.radius - radius >= params.separation)
        {
            shapes.push(candidate);
        }
    }

    let noise = rng.gen_range(nlo..=nhi);
    let n_noise = ((n_points as f64) * noise).round() as usize;
    let total_area: f64 = shapes.iter().map(Shape::area).sum();
    let mut points = Vec::with_capacity(n_points);
    for _ in n_noise..n_points {
        let mut u = rng.gen::<f64>() * total_area;
        let mut pick = shapes.len() - 1;
        for (k, s) in shapes.iter().enumerate() {
            if u < s.area() {
                pick = k;
                break;
            }
            u -= s.area();
        }
        points.push(shapes[pick].sample(&mut rng));
    }
    for _ in 0..n_noise {
        points.push([rng.gen(), rng.gen()]);
    }
    Ok(ShapeSample {
        cloud: PointCloud {
            points,
            label: Some(class_id as i64),
            seed,
        },
        shapes,
    })
}

// ---------------------------------------------------------------- orbits

/// The five parameter values used as orbit classes.
pub const ORBIT_CLASSES: [f64; 5] = [2.5, 3.5, 4.0, 4.1, 4.3];

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OrbitStart {
    /// Starting point drawn uniformly from the unit square.
    Seed(u64),
    Point(f64, f64),
}

/// `n` iterates of `x' = x + r y (1 - y)`, `y' = y + r x' (1 - x')`, both mod 1,
/// starting with the initial point itself. The label is the index of `r` in
/// [`ORBIT_CLASSES`] when it is one of them.
pub fn gen_orbit(r: f64, n: usize, start: OrbitStart) -> Result<PointCloud> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "r must be positive, got {r}"
        )));
    }
    let (mut x, mut y, seed) = match start {
        OrbitStart::Seed(seed) => {
            let mut rng = rng(seed);
            (rng.gen::<f64>(), rng.gen::<f64>(), seed)
        }
        OrbitStart::Point(x, y) => {
            if !((0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y)) {
                return Err(Error::InvalidArgument(format!(
                    "starting point ({x}, {y}) is outside the unit square"
                )));
            }
            (x.rem_euclid(1.0), y.rem_euclid(1.0), 0)
        }
    };
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        points.push([x, y]);
        x = (x + r * y * (1.0 - y)).rem_euclid(1.0);
        y = (y + r * x * (1.0 - x)).rem_euclid(1.0);
    }
    Ok(PointCloud {
        points,
        label: ORBIT_CLASSES.iter().position(|&c| c == r).map(|i| i as i64),
        seed,
    })
}

// ---------------------------------------------------------------- processes

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessKind {
    Poisson,
    Matern,
    Strauss,
    BaddeleySilverman,
}

impl ProcessKind {
    pub const ALL: [ProcessKind; 4] = [
        ProcessKind::Poisson,
        ProcessKind::Matern,
        ProcessKind::Strauss,
        ProcessKind::BaddeleySilverman,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProcessKind::Poisson => "poisson",
            ProcessKind::Matern => "matern",
            ProcessKind::Strauss => "strauss",
            ProcessKind::BaddeleySilverman => "baddeley_silverman",
        }
    }
}

impl fmt::Display for ProcessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProcessKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProcessKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown process `{s}`; expected poisson, matern, strauss or baddeley_silverman"
                ))
            })
    }
}

/// Parameters of the four processes. The defaults give about 200 points on
/// average; the Strauss sampler is an approximate fixed-budget chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProcessParams {
    pub poisson_intensity: f64,
    pub matern_parent_intensity: f64,
    pub matern_mean_children: f64,
    pub matern_radius: f64,
    pub strauss_beta: f64,
    pub strauss_gamma: f64,
    pub strauss_radius: f64,
    pub strauss_iterations: usize,
    /// Cells per side of the Baddeley-Silverman grid.
    pub bs_grid: usize,
}

impl Default for ProcessParams {
    fn default() -> Self {
        ProcessParams {
            poisson_intensity: 200.0,
            matern_parent_intensity: 20.0,
            matern_mean_children: 10.0,
            matern_radius: 0.1,
            strauss_beta: 300.0,
            strauss_gamma: 0.3,
            strauss_radius: 0.03,
            strauss_iterations: 20_000,
            bs_grid: 14,
        }
    }
}

/// A sample of the named process in the unit square. The label is the
/// index of the kind in [`ProcessKind::ALL`].
pub fn gen_process(kind: ProcessKind, params: &ProcessParams, seed: u64) -> Result<PointCloud> {
    let mut rng = rng(seed);
    let points = match kind {
        ProcessKind::Poisson => {
            let n = poisson_count(&mut rng, params.poisson_intensity)?;
            (0..n).map(|_| [rng.gen(), rng.gen()]).collect()
        }
        ProcessKind::Matern => matern(&mut rng, params)?,
        ProcessKind::Strauss => strauss(&mut rng, params)?,
        ProcessKind::BaddeleySilverman => baddeley_silverman(&mut rng, params.bs_grid)?,
    };
    Ok(PointCloud {
        points,
        label: ProcessKind::ALL
            .iter()
            .position(|&k| k == kind)
            .map(|i| i as i64),
        seed,
    })
}

fn matern(rng: &mut ChaCha8Rng, p: &ProcessParams) -> Result<Vec<[f64; 2]>> {
    let r = p.matern_radius;
    if r.is_nan() || r <= 0.0 {
        return Err(Error::InvalidArgument(
            "Matérn radius must be positive".into(),
        ));
    }
    // Parents live in the window grown by r so the clustering is stationary.
    let side = 1.0 + 2.0 * r;
    let n_parents = poisson_count(rng, p.matern_parent_intensity * side * side)?;
    let mut points = Vec::new();
    for _ in 0..n_parents {
        let parent = [rng.gen::<f64>() * side - r, rng.gen::<f64>() * side - r];
        let disk = Shape {
            center: parent,
            radius: r,
            inner_radius: 0.0,
        };
        for _ in 0..poisson_count(rng, p.matern_mean_children)? {
            let c = disk.sample(rng);
            if (0.0..=1.0).contains(&c[0]) && (0.0..=1.0).contains(&c[1]) {
                points.push(c);
            }
        }
    }
    Ok(points)
}

fn strauss(rng: &mut ChaCha8Rng, p: &ProcessParams) -> Result<Vec<[f64; 2]>> {
    if !(p.strauss_beta > 0.0 && (0.0..=1.0).contains(&p.strauss_gamma) && p.strauss_radius > 0.0) {
        return Err(Error::InvalidArgument(
            "Strauss needs beta > 0, gamma in [0, 1] and a positive radius".into(),
        ));
    }
    let close = |u: [f64; 2], pts: &[[f64; 2]], skip: usize| {
        pts.iter()
            .enumerate()
            .filter(|&(k, &q)| k != skip && dist(u, q) <= p.strauss_radius)
            .count() as i32
    };
    let mut pts: Vec<[f64; 2]> = Vec::new();
    for _ in 0..p.strauss_iterations {
        if rng.gen::<bool>() {
            let u = [rng.gen(), rng.gen()];
            let ratio = p.strauss_beta * p.strauss_gamma.powi(close(u, &pts, usize::MAX))
                / (pts.len() + 1) as f64;
            if rng.gen::<f64>() < ratio {
                pts.push(u);
            }
        } else if !pts.is_empty() {
            let k = rng.gen_range(0..pts.len());
            let weight = p.strauss_beta * p.strauss_gamma.powi(close(pts[k], &pts, k));
            if rng.gen::<f64>() * weight < pts.len() as f64 {
                pts.swap_remove(k);
            }
        }
    }
    Ok(pts)
}

fn baddeley_silverman(rng: &mut ChaCha8Rng, k: usize) -> Result<Vec<[f64; 2]>> {
    if k == 0 {
        return Err(Error::InvalidArgument("grid size must be positive".into()));
    }
    let h = 1.0 / k as f64;
    let mut points = Vec::new();
    for i in 0..k {
        for j in 0..k {
            let u = rng.gen::<f64>();
            let count = if u < 0.45 {
                0
            } else if u < 0.55 {
                1
            } else {
                2
            };
            for _ in 0..count {
                points.push([
                    (i as f64 + rng.gen::<f64>()) * h,
                    (j as f64 + rng.gen::<f64>()) * h,
                ]);
            }
        }
    }
    Ok(points)
}

// ---------------------------------------------------------------- density

/// Neighbour counts within `radius` (the point itself excluded), rank
/// normalized to `[0, 1]` with ties sharing their mean rank.
pub fn density_scores(points: &[[f64; 2]], radius: f64) -> Result<Vec<f64>> {
    if radius.is_nan() || radius <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "density radius must be positive, got {radius}"
        )));
    }
    let counts = neighbour_counts(points, radius);
    Ok(rank_normalize(&counts))
}

pub fn neighbour_counts(points: &[[f64; 2]], radius: f64) -> Vec<usize> {
    let n = points.len();
    let mut counts = vec![0; n];
    for i in 0..n {
        for j in i + 1..n {
            if dist(points[i], points[j]) <= radius {
                counts[i] += 1;
                counts[j] += 1;
            }
        }
    }
    counts
}

fn rank_normalize(counts: &[usize]) -> Vec<f64> {
    let n = counts.len();
    if n <= 1 {
        return vec![0.0; n];
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| counts[i]);
    let mut scores = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start;
        while end < n && counts[order[end]] == counts[order[start]] {
            end += 1;
        }
        let mean_rank = (start + end - 1) as f64 / 2.0;
        for &i in &order[start..end] {
            scores[i] = mean_rank / (n - 1) as f64;
        }
        start = end;
    }
    scores
}

// ---------------------------------------------------------------- Rips

/// Density-Rips bifiltration: vertex `v` at `(0, score v)`, every clique of
/// points pairwise within `r_max` at (largest pairwise distance, largest
/// score), up to dimension `max_dim`. Simplices come out by dimension, then
/// lexicographically.
pub fn rips_bifiltration(
    points: &[[f64; 2]],
    scores: &[f64],
    r_max: f64,
    max_dim: usize,
    max_simplices: Option<usize>,
) -> Result<BifilteredComplex> {
    if r_max.is_nan() || r_max <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "r_max must be positive, got {r_max}"
        )));
    }
    if max_dim == 0 {
        return Err(Error::InvalidArgument("max_dim must be at least 1".into()));
    }
    if scores.len() != points.len() {
        return Err(Error::InvalidArgument(format!(
            "{} scores for {} points",
            scores.len(),
            points.len()
        )));
    }
    let n = points.len();
    if n > u32::MAX as usize {
        return Err(Error::InvalidArgument("too many points".into()));
    }
    let mut upper: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            let d = dist(points[i], points[j]);
            if d <= r_max {
                upper[i].push((j, d));
            }
        }
    }

    let limit = max_simplices.unwrap_or(usize::MAX);
    let mut by_dim: Vec<Vec<(Simplex, Bigrade)>> = vec![Vec::new(); max_dim + 1];
    let mut total = 0;
    let mut push = |dim: usize, vs: &[usize], x: f64, y: f64| -> Result<()> {
        total += 1;
        if total > limit {
            return Err(Error::SimplexBudget { limit });
        }
        let simplex = Simplex::new(vs.iter().map(|&v| v as u32).collect())?;
        by_dim[dim].push((simplex, Bigrade::new(x, y)?));
        Ok(())
    };

    // Depth-first clique extension over increasing vertex ids.
    struct Frame {
        vertices: Vec<usize>,
        candidates: Vec<usize>,
        x: f64,
        y: f64,
    }
    for v in 0..n {
        push(0, &[v], 0.0, scores[v])?;
        let mut stack = vec![Frame {
            vertices: vec![v],
            candidates: upper[v].iter().map(|&(u, _)| u).collect(),
            x: 0.0,
            y: scores[v],
        }];
        while let Some(f) = stack.pop() {
            let dim = f.vertices.len();
            // Reverse so that lexicographically smaller cofaces pop first.
            let extend = if dim <= max_dim {
                f.candidates.len()
            } else {
                0
            };
            for (k, &u) in f.candidates[..extend].iter().enumerate().rev() {
                let mut x = f.x;
                for &w in &f.vertices {
                    x = x.max(pair_distance(&upper, w, u));
                }
                let y = f.y.max(scores[u]);
                let mut vertices = f.vertices.clone();
                vertices.push(u);
                let candidates = if dim < max_dim {
                    f.candidates[k + 1..]
                        .iter()
                        .copied()
                        .filter(|&c| upper[u].binary_search_by_key(&c, |&(j, _)| j).is_ok())
                        .collect()
                } else {
                    Vec::new()
                };
                stack.push(Frame {
                    vertices,
                    candidates,
                    x,
                    y,
                });
            }
            if dim > 1 {
                push(dim - 1, &f.vertices, f.x, f.y)?;
            }
        }
    }
    for level in &mut by_dim {
        level.sort_by(|a, b| a.0.cmp(&b.0));
    }
    Ok(BifilteredComplex::new(
        by_dim.into_iter().flatten().collect(),
    ))
}

fn pair_distance(upper: &[Vec<(usize, f64)>], a: usize, b: usize) -> f64 {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let row = &upper[lo];
    row[row
        .binary_search_by_key(&hi, |&(j, _)| j)
        .expect("clique members are adjacent")]
    .1
}
