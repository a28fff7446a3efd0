//! The randomized tensor-evaluation decider on planted and unplanted
//! instances, with its trial schedule.
//!
//! cargo run --release --example tensor_solver

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tkrank::field::FieldContext;
use tkrank::generate::random_tripartition;
use tkrank::tk::group_decomposition;
use tkrank::tripartition::{
    detection_lower_bound, solve_brute, solve_tensor, TensorSolverConfig, TrialPlan,
};

fn main() -> tkrank::error::Result<()> {
    let field = FieldContext::mersenne31();
    for (n, k) in [(2, 1), (3, 1), (4, 1), (4, 2), (6, 2), (6, 3)] {
        let plan = TrialPlan::new(n, k, 5.0)?;
        println!(
            "n={n} k={k}: r={}, p={}, trials={}",
            plan.r,
            plan.p_string(),
            plan.trials
        );
    }
    println!(
        "detection >= {:.4}",
        detection_lower_bound(5.0, field.modulus() as f64)
    );

    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for k in [1, 2] {
        let d = group_decomposition(k, field)?;
        let (mut hits, mut yes, mut false_positives) = (0, 0, 0);
        for i in 0..200 {
            let inst = random_tripartition(4, 5, i % 2 == 0, &mut rng)?;
            let config = TensorSolverConfig::new(k, i);
            let answer = solve_tensor(&inst, &d, &config)?.answer;
            if solve_brute(&inst).answer {
                yes += 1;
                hits += usize::from(answer);
            } else {
                false_positives += usize::from(answer);
            }
        }
        println!("k={k}: detected {hits}/{yes} yes-instances, {false_positives} false positives");
    }
    Ok(())
}
