#![allow(dead_code)]

use graphcode::complex::{Bigrade, GradedMatrix, MatrixMode};
use graphcode::datasets::{density_scores, rips_bifiltration};
use graphcode::gcode::Graphcode;
use graphcode::pipeline::{Input, Prepared, PrimaryParameter};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const THREE_SLICES: &str = include_str!("../data/three_slices.scc");
pub const SQUARE: &str = include_str!("../data/square.txt");

/// `(layer, birth, death)` of every node, sorted.
pub fn node_triples(gc: &Graphcode) -> Vec<(usize, f64, f64)> {
    let mut v: Vec<_> = gc
        .nodes
        .iter()
        .map(|n| (n.layer, n.bar.birth, n.bar.death))
        .collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

pub type Triple = (usize, f64, f64);

/// Edges as pairs of `(layer, birth, death)`, sorted.
pub fn edge_triples(gc: &Graphcode) -> Vec<(Triple, Triple)> {
    let t = |i: usize| {
        let n = &gc.nodes[i];
        (n.layer, n.bar.birth, n.bar.death)
    };
    let mut v: Vec<_> = gc.edges.iter().map(|&(a, b)| (t(a), t(b))).collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

/// Density-Rips complex on at most 12 points, prepared in degree 1.
pub fn random_rips(seed: u64) -> Prepared {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(3..=12);
    // Half of the clouds are noisy circles, which carry long degree-1 bars.
    let ring = rng.gen::<bool>();
    let points: Vec<[f64; 2]> = (0..n)
        .map(|k| {
            if ring {
                let t = (k as f64 + 0.9 * rng.gen::<f64>()) / n as f64 * std::f64::consts::TAU;
                let r = 0.35 + 0.15 * (rng.gen::<f64>() - 0.5);
                [0.5 + r * t.cos(), 0.5 + r * t.sin()]
            } else {
                [rng.gen(), rng.gen()]
            }
        })
        .collect();
    let scores = density_scores(&points, 0.3).unwrap();
    let r_max = rng.gen_range(0.3..0.9);
    let complex = rips_bifiltration(&points, &scores, r_max, 2, None).unwrap();
    Prepared::new(Input::Simplicial(complex), 1, PrimaryParameter::First).unwrap()
}

/// Random admissible presentation with at most 40 generators on a small
/// integer grid, so that grade ties are common.
pub fn random_presentation(seed: u64) -> Prepared {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_gen = rng.gen_range(1..=40);
    let n_rel = rng.gen_range(0..=n_gen + 5);
    let grid = |rng: &mut ChaCha8Rng| rng.gen_range(0..6) as f64;
    let gens: Vec<(usize, Bigrade)> = (0..n_gen)
        .map(|i| (i, Bigrade::new(grid(&mut rng), grid(&mut rng)).unwrap()))
        .collect();
    let mut rels = Vec::new();
    for id in 0..n_rel {
        let k = rng.gen_range(1..=3.min(n_gen));
        let mut support: Vec<usize> = (0..k).map(|_| rng.gen_range(0..n_gen)).collect();
        support.sort_unstable();
        support.dedup();
        let mut g = Bigrade::new(0.0, 0.0).unwrap();
        for &i in &support {
            g = g.join(&gens[i].1);
        }
        let g = Bigrade::new(
            g.x + rng.gen_range(0..3) as f64,
            g.y + rng.gen_range(0..3) as f64,
        )
        .unwrap();
        rels.push((id, support, g));
    }
    let m = GradedMatrix::from_unsorted(MatrixMode::Presentation, None, gens, rels).unwrap();
    Prepared::new(Input::Presentation(m), 0, PrimaryParameter::First).unwrap()
}
