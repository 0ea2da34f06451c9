#![allow(dead_code)]

use egtq::{MixedStrategy, PayoffMatrix};
use proptest::prelude::*;

pub fn payoff(n: usize, bound: f64) -> impl Strategy<Value = PayoffMatrix> {
    prop::collection::vec(-bound..bound, n * n).prop_map(move |v| {
        let rows: Vec<Vec<f64>> = v.chunks(n).map(<[f64]>::to_vec).collect();
        PayoffMatrix::from_rows(&rows).unwrap()
    })
}

/// Point in the open simplex, bounded away from the faces.
pub fn interior(n: usize) -> impl Strategy<Value = MixedStrategy> {
    prop::collection::vec(0.05f64..1.0, n).prop_map(normalized)
}

/// Any point of the simplex, including faces and vertices.
pub fn simplex(n: usize) -> impl Strategy<Value = MixedStrategy> {
    prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..1.0], n)
        .prop_filter("needs positive mass", |v| v.iter().sum::<f64>() > 1e-3)
        .prop_map(normalized)
}

pub fn normalized(v: Vec<f64>) -> MixedStrategy {
    let s: f64 = v.iter().sum();
    MixedStrategy::new(v.into_iter().map(|w| w / s).collect::<Vec<_>>()).unwrap()
}

pub fn game_and_point(dims: &'static [usize], bound: f64) -> impl Strategy<Value = (PayoffMatrix, MixedStrategy)> {
    prop::sample::select(dims).prop_flat_map(move |n| (payoff(n, bound), interior(n)))
}

pub fn dist(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, n)
        .prop_filter("needs positive mass", |v| v.iter().sum::<f64>() > 1e-3)
        .prop_map(|v| {
            let s: f64 = v.iter().sum();
            v.into_iter().map(|w| w / s).collect()
        })
}
