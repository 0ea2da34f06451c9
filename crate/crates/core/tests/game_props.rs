mod common;

use common::{game_and_point, payoff, simplex};
use egtq::{
    average_fitness, certify_ess, certify_nash, expected_payoff, find_fixed_points, fitness,
    MixedStrategy, PayoffMatrix, Verdict, DEFAULT_TOL,
};
use proptest::prelude::*;

fn with_column_shift(a: &PayoffMatrix, col: usize, c: f64) -> PayoffMatrix {
    let mut m = a.matrix().clone();
    m.column_mut(col).add_scalar_mut(c);
    PayoffMatrix::new(m).unwrap()
}

/// Integer-valued games so that ties are exact and shifting a column cannot
/// move a deviation across the tolerance band.
fn integer_game(n: usize) -> impl Strategy<Value = PayoffMatrix> {
    prop::collection::vec(-4i32..=4, n * n).prop_map(move |v| {
        let rows: Vec<Vec<f64>> = v.chunks(n).map(|r| r.iter().map(|&a| a as f64).collect()).collect();
        PayoffMatrix::from_rows(&rows).unwrap()
    })
}

proptest! {
    #[test]
    fn average_fitness_is_weighted_fitness((a, x) in game_and_point(&[2, 3, 4, 6], 5.0)) {
        let f = fitness(&x, &a).unwrap();
        let direct: f64 = x.as_slice().iter().zip(f.iter()).map(|(xi, fi)| xi * fi).sum();
        prop_assert!((average_fitness(&x, &a).unwrap() - direct).abs() <= 1e-12);
    }

    #[test]
    fn expected_payoff_is_bilinear(
        (a, p1, p2, q) in (2usize..=5).prop_flat_map(|n| (payoff(n, 5.0), simplex(n), simplex(n), simplex(n))),
        alpha in 0.0f64..=1.0,
    ) {
        let mix: Vec<f64> = p1.as_slice().iter().zip(p2.as_slice())
            .map(|(u, v)| alpha * u + (1.0 - alpha) * v)
            .collect();
        let mix = MixedStrategy::new(mix).unwrap();
        let lhs = expected_payoff(&mix, &q, &a).unwrap();
        let rhs = alpha * expected_payoff(&p1, &q, &a).unwrap()
            + (1.0 - alpha) * expected_payoff(&p2, &q, &a).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12);
    }

    #[test]
    fn ess_implies_nash((a, p) in (2usize..=4).prop_flat_map(|n| (integer_game(n), simplex(n)))) {
        if certify_ess(&p, &a, DEFAULT_TOL).unwrap().verdict == Verdict::Ess {
            let nash = certify_nash(&p, &a, DEFAULT_TOL).unwrap().verdict;
            prop_assert!(matches!(nash, Verdict::Nash | Verdict::StrictNash));
        }
    }

    #[test]
    fn pure_ess_implies_nash((a, i) in (2usize..=4).prop_flat_map(|n| (integer_game(n), 0..n))) {
        let p = MixedStrategy::pure(a.dim(), i).unwrap();
        if certify_ess(&p, &a, DEFAULT_TOL).unwrap().verdict == Verdict::Ess {
            prop_assert!(certify_nash(&p, &a, DEFAULT_TOL).unwrap().verdict.is_equilibrium());
        }
    }

    #[test]
    fn column_shift_keeps_verdicts(
        (a, col) in (2usize..=4).prop_flat_map(|n| (integer_game(n), 0..n)),
        c in prop::sample::select(vec![-5.0, 7.0]),
    ) {
        let shifted = with_column_shift(&a, col, c);
        let n = a.dim();
        let mut candidates: Vec<MixedStrategy> = (0..n).map(|i| MixedStrategy::pure(n, i).unwrap()).collect();
        candidates.push(MixedStrategy::uniform(n).unwrap());
        for fp in find_fixed_points(&a, DEFAULT_TOL).unwrap().points {
            candidates.push(fp.strategy);
        }
        for p in &candidates {
            prop_assert_eq!(
                certify_nash(p, &a, DEFAULT_TOL).unwrap().verdict,
                certify_nash(p, &shifted, DEFAULT_TOL).unwrap().verdict
            );
            prop_assert_eq!(
                certify_ess(p, &a, DEFAULT_TOL).unwrap().verdict,
                certify_ess(p, &shifted, DEFAULT_TOL).unwrap().verdict
            );
        }
    }
}
