use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tkrank::field::FieldContext;
use tkrank::generate::{random_setcover, random_tripartition};
use tkrank::io::{from_json_str, to_json_string, DecompositionFile};
use tkrank::setcover::{reduce_and_solve, solve_brute_setcover};
use tkrank::tk::{build_tk, group_decomposition};
use tkrank::tripartition::{solve_brute, solve_tensor, solve_wht, TensorSolverConfig};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wht_count_equals_brute_count(seed in any::<u64>(), n in 1usize..=5, size in 0usize..12, plant in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_tripartition(n, size, plant, &mut rng).unwrap();
        prop_assert_eq!(solve_wht(&inst).unwrap().count, solve_brute(&inst).count as i128);
    }

    #[test]
    fn tensor_solver_is_one_sided(seed in any::<u64>(), n in 1usize..=3, size in 0usize..6, k in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_tripartition(n, size, false, &mut rng).unwrap();
        let d = group_decomposition(k, FieldContext::mersenne31()).unwrap();
        let answer = solve_tensor(&inst, &d, &TensorSolverConfig::new(k, seed)).unwrap().answer;
        prop_assert!(!answer || solve_brute(&inst).answer);
    }

    #[test]
    fn reduction_agrees_with_exact(seed in any::<u64>(), n in 1usize..=9, s in 1usize..=3, t in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let plant = n.div_ceil(s) <= t;
        let inst = random_setcover(n, s, t, n, plant, &mut rng).unwrap();
        let outcome = reduce_and_solve(&inst, |tri| Ok(solve_wht(tri)?.answer)).unwrap();
        prop_assert_eq!(outcome.answer, solve_brute_setcover(&inst).unwrap());
    }
}

#[test]
fn decomposition_file_round_trip_still_verifies() {
    let field = FieldContext::new(1_000_003).unwrap();
    let d = group_decomposition(2, field).unwrap();
    let text = to_json_string(&DecompositionFile::from(&d)).unwrap();
    let back = from_json_str::<DecompositionFile>(&text)
        .unwrap()
        .into_decomposition()
        .unwrap();
    assert_eq!(back, d);
    assert!(back.verify(&build_tk(2, field).unwrap()).unwrap());
}
