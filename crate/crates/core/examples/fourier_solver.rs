//! Counts balanced tripartitions with the Walsh–Hadamard solver and
//! compares against brute force.
//!
//! cargo run --release --example fourier_solver

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tkrank::bench::{render_bench, run_bench, BenchConfig, Suite};
use tkrank::combinatorics::SubsetMask;
use tkrank::generate::random_tripartition;
use tkrank::tripartition::{solve_brute, solve_wht, TripartitionInstance};

fn main() -> tkrank::error::Result<()> {
    // {1,4} {2,5} {3,6} is the only way to split [6] here
    let set = |e: &[usize]| SubsetMask::from_elements(e, 6);
    let inst = TripartitionInstance::new(
        2,
        [
            vec![set(&[1, 4])?, set(&[1, 2])?],
            vec![set(&[2, 5])?, set(&[3, 4])?],
            vec![set(&[3, 6])?, set(&[1, 6])?],
        ],
    )?;
    let brute = solve_brute(&inst);
    println!(
        "hand-made instance: count {}, witness {:?}",
        solve_wht(&inst)?.count,
        brute.witness.map(|w| w.map(|s| s.to_string()))
    );

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 1..=6 {
        let inst = random_tripartition(n, 20, n % 2 == 0, &mut rng)?;
        let (b, w) = (solve_brute(&inst), solve_wht(&inst)?);
        println!(
            "n={n}: brute {} ({}), wht {} ({})",
            b.answer, b.count, w.answer, w.count
        );
    }

    let config = BenchConfig {
        repetitions: 5,
        ..BenchConfig::new(Suite::Wht, vec![4, 5, 6, 7])
    };
    print!("{}", render_bench(&run_bench(&config)?));
    Ok(())
}
