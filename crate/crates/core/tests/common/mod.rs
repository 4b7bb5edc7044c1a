#![allow(dead_code)]

use proptest::prelude::*;
use slopekit::function::Probe;
use slopekit::setval::SetValuedMapping;
use slopekit::{ExtReal, FiniteMetricSpace};

/// A connected weighted graph: a random spanning tree plus extra edges.
pub fn space_strategy(max: usize) -> impl Strategy<Value = FiniteMetricSpace> {
    (1usize..=max).prop_flat_map(|n| {
        let parents = proptest::collection::vec((any::<prop::sample::Index>(), 1u8..=4), n.saturating_sub(1));
        let extra = proptest::collection::vec((0..n, 0..n, 1u8..=4), 0..n);
        (Just(n), parents, extra).prop_map(|(n, parents, extra)| {
            let mut edges: Vec<(usize, usize, f64)> = parents
                .iter()
                .enumerate()
                .map(|(k, (idx, w))| (k + 1, idx.index(k + 1), 0.5 * *w as f64))
                .collect();
            edges.extend(extra.iter().map(|&(a, b, w)| (a, b, 0.5 * w as f64)));
            FiniteMetricSpace::from_graph(n, &edges).unwrap()
        })
    })
}

pub fn probe_strategy() -> impl Strategy<Value = Probe<FiniteMetricSpace>> {
    space_strategy(50).prop_flat_map(|space| {
        let n = space.len();
        let value = prop_oneof![
            3 => (0u8..=8).prop_map(|k| ExtReal::finite(0.25 * k as f64)),
            1 => Just(ExtReal::INFINITY),
        ];
        (Just(space), proptest::collection::vec(value, n), 0..n).prop_map(|(space, mut values, base)| {
            values[base] = ExtReal::ZERO;
            Probe::finite(space, values, base).unwrap()
        })
    })
}

/// A finite relation between two random spaces, with its base pair.
pub fn relation_strategy() -> impl Strategy<Value = SetValuedMapping<FiniteMetricSpace, FiniteMetricSpace>> {
    (space_strategy(12), space_strategy(8)).prop_flat_map(|(left, right)| {
        let (n, m) = (left.len(), right.len());
        let pairs = proptest::collection::vec((0..n, 0..m), 0..3 * n);
        (Just(left), Just(right), pairs, 0..n, 0..m).prop_map(|(left, right, mut pairs, bx, by)| {
            pairs.push((bx, by));
            pairs.sort_unstable();
            pairs.dedup();
            SetValuedMapping::finite(left, right, &pairs, (bx, by)).unwrap()
        })
    })
}
