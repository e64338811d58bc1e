//! Jacobians checked against exact symbolic differentiation.
//!
//! The network output is expanded as a polynomial over the rationals in the
//! inputs and all weights at once, differentiated by each weight, evaluated
//! at an integer point, and only then reduced modulo the prime.

#[path = "support/symbolic.rs"]
mod symbolic;

use neurovariety::algebra::Prime;
use neurovariety::pnn::Architecture;
use neurovariety::rank::{jacobian_at, weights_from_values};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symbolic::{columns_of, oracle_jacobian, small_architectures};

#[test]
fn hand_derived_two_one_one() {
    let arch = Architecture::parse("2-1-1", 2).unwrap();
    let prime = Prime::mersenne31();
    let oracle = oracle_jacobian(&arch, &[1, 1, 1], prime);
    assert_eq!(oracle, vec![vec![2, 2, 0], vec![0, 2, 2], vec![1, 2, 1]]);
    let fast = jacobian_at(&arch, &weights_from_values(&arch, &[1, 1, 1], prime).unwrap()).unwrap();
    assert_eq!(columns_of(&fast), oracle);
}

#[test]
fn matches_symbolic_differentiation_on_small_architectures() {
    let archs = small_architectures(6);
    assert!(archs.len() > 50);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    for widths in &archs {
        for r in [1, 2, 3] {
            let arch = Architecture::new(widths.clone(), r).unwrap();
            if arch.output_degree().unwrap() > 81 {
                continue;
            }
            for prime in [Prime::new(101).unwrap(), Prime::mersenne31()] {
                let values: Vec<u64> = (0..arch.param_count()).map(|_| rng.gen_range(0..1000)).collect();
                let oracle = oracle_jacobian(&arch, &values, prime);
                let fast = jacobian_at(&arch, &weights_from_values(&arch, &values, prime).unwrap()).unwrap();
                assert_eq!(columns_of(&fast), oracle, "{} r={r} p={prime}", arch.label());
                checked += 1;
            }
        }
    }
    assert!(checked > 100, "only {checked} cases");
}
