mod common;

use std::collections::HashSet;

use common::{random_presentation, random_rips};
use graphcode::formats::{parse_presentation, read_graphcode, write_graphcode, write_presentation};
use graphcode::gcode::{threshold_filter, SliceMode};
use graphcode::pipeline::Input;
use graphcode::z2core::{reduce, ReductionLog, Z2Column};
use proptest::prelude::*;

fn columns() -> impl Strategy<Value = Vec<Z2Column>> {
    prop::collection::vec(prop::collection::vec(0usize..24, 0..6), 0..20)
        .prop_map(|cols| cols.into_iter().map(Z2Column::from_indices).collect())
}

/// Rank over Z2 by elimination on 64-bit masks.
fn rank(cols: &[Z2Column]) -> usize {
    let mut basis: Vec<u64> = Vec::new();
    for c in cols {
        let mut v = c.support().iter().fold(0u64, |m, &r| m | 1 << r);
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn reduction_invariants(cols in columns()) {
        let mut log = ReductionLog::new();
        let reduced = reduce(&cols, Some(&mut log));
        let pivots: Vec<usize> = reduced.iter().filter_map(Z2Column::pivot).collect();
        let distinct: HashSet<usize> = pivots.iter().copied().collect();
        prop_assert_eq!(distinct.len(), pivots.len());
        prop_assert_eq!(pivots.len(), rank(&cols));
        for j in 0..=cols.len() {
            prop_assert_eq!(rank(&reduced[..j]), rank(&cols[..j]));
        }
        prop_assert_eq!(log.replay(&cols), reduced.clone());
        for &(target, source) in &log.events {
            prop_assert!(source < target);
        }
    }

    #[test]
    fn added_columns_are_final(cols in columns()) {
        let mut log = ReductionLog::new();
        let reduced = reduce(&cols, Some(&mut log));
        let mut state = cols.clone();
        for &(target, source) in &log.events {
            prop_assert_eq!(&state[source], &reduced[source]);
            let s = state[source].clone();
            state[target].add_assign(&s);
        }
    }

    #[test]
    fn rips_batched_matches_oracle(seed in any::<u64>(), s in 1usize..=6) {
        let p = random_rips(seed);
        let gc = p.graphcode(s, SliceMode::Equidistant, true).unwrap();
        let report = p.verify(&gc).unwrap();
        prop_assert!(report.all_ok(), "{:?}", report);
        let naive = p.naive_graphcode(s, false).unwrap();
        for l in 1..=gc.slices {
            prop_assert_eq!(gc.layer_bars(l), naive.layer_bars(l));
        }
    }

    #[test]
    fn presentation_batched_matches_oracle(seed in any::<u64>(), s in 1usize..=6) {
        let p = random_presentation(seed);
        let gc = p.graphcode(s, SliceMode::Equidistant, true).unwrap();
        let report = p.verify(&gc).unwrap();
        prop_assert!(report.all_ok(), "{:?}", report);
        let naive = p.naive_graphcode(s, true).unwrap();
        prop_assert!(p.verify(&naive).unwrap().all_ok());
    }

    #[test]
    fn quantile_slicing_verifies(seed in any::<u64>(), s in 1usize..=6) {
        let p = random_presentation(seed);
        let gc = p.graphcode(s, SliceMode::Quantile, true).unwrap();
        prop_assert!(p.verify(&gc).unwrap().all_ok());
    }

    #[test]
    fn every_bar_dies_by_the_sentinel(seed in any::<u64>()) {
        let p = random_rips(seed);
        let gc = p.graphcode(3, SliceMode::Equidistant, false).unwrap();
        let s = p.matrix.sentinel().unwrap();
        for n in &gc.nodes {
            prop_assert!(n.bar.birth <= n.bar.death && n.bar.death <= s);
            prop_assert_eq!(n.bar.essential, n.bar.death == s);
        }
    }

    #[test]
    fn threshold_is_an_induced_subgraph(seed in any::<u64>(), t in 0.0f64..3.0) {
        let p = random_presentation(seed);
        let gc = p.graphcode(4, SliceMode::Equidistant, false).unwrap();
        let f = threshold_filter(&gc, t).unwrap();
        let kept: Vec<_> = gc.nodes.iter().filter(|n| n.bar.persistence() > t).collect();
        prop_assert_eq!(f.nodes.len(), kept.len());
        for (a, b) in f.nodes.iter().zip(&kept) {
            prop_assert_eq!(a.bar, b.bar);
            prop_assert_eq!(a.layer, b.layer);
        }
        let old_of: Vec<usize> = kept.iter().map(|n| n.id).collect();
        let expected: Vec<(usize, usize)> = gc
            .edges
            .iter()
            .filter_map(|&(v, w)| {
                let a = old_of.iter().position(|&o| o == v)?;
                let b = old_of.iter().position(|&o| o == w)?;
                Some((a, b))
            })
            .collect();
        let mut expected = expected;
        expected.sort_unstable();
        prop_assert_eq!(&f.edges, &expected);
    }

    #[test]
    fn graphcode_json_round_trip(seed in any::<u64>()) {
        let p = random_presentation(seed);
        let gc = p.graphcode(3, SliceMode::Equidistant, false).unwrap();
        let json = write_graphcode(&gc, true);
        prop_assert_eq!(read_graphcode(&json).unwrap(), gc);
    }

    #[test]
    fn presentation_text_round_trip(seed in any::<u64>()) {
        let p = random_presentation(seed);
        let Input::Presentation(m) = &p.input else { unreachable!() };
        let text = write_presentation(m).unwrap();
        let parsed = parse_presentation(&text).unwrap();
        prop_assert_eq!(&parsed, m);
        prop_assert_eq!(write_presentation(&parsed).unwrap(), text);
    }

    #[test]
    fn edges_connect_consecutive_layers(seed in any::<u64>(), s in 1usize..=6) {
        let p = random_presentation(seed);
        let gc = p.graphcode(s, SliceMode::Equidistant, false).unwrap();
        for &(v, w) in &gc.edges {
            prop_assert_eq!(gc.nodes[w].layer, gc.nodes[v].layer + 1);
        }
    }
}
