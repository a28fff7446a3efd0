//! Evaluates Kronecker powers of T_k through a decomposition and checks the
//! result against the materialised power.
//!
//! cargo run --release --example kron_eval

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tkrank::field::FieldContext;
use tkrank::tk::{build_tk, group_decomposition};

fn main() -> tkrank::error::Result<()> {
    let field = FieldContext::mersenne31();
    let mut rng = ChaCha8Rng::seed_from_u64(11);

    for (k, r) in [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2)] {
        let d = group_decomposition(k, field)?;
        let power = build_tk(k, field)?.kron_power(r)?;
        let n = power.dims()[0];
        let mut point = || {
            (0..n)
                .map(|_| field.sample_uniform(&mut rng))
                .collect::<Vec<_>>()
        };
        let (x, y, z) = (point(), point(), point());
        let fast = d.eval_kron(r, &x, &y, &z)?;
        let naive = power.eval_naive(&x, &y, &z)?;
        println!(
            "k={k} r={r}: dim {n:>4}, support {:>6}, value {fast} ({})",
            power.support_len(),
            fast == naive
        );
    }

    // larger powers are only evaluated, never built
    let d = group_decomposition(1, field)?;
    for r in [4, 6, 8] {
        let n = 3usize.pow(r as u32);
        let mut point = || {
            (0..n)
                .map(|_| field.sample_uniform(&mut rng))
                .collect::<Vec<_>>()
        };
        let (x, y, z) = (point(), point(), point());
        let start = Instant::now();
        let value = d.eval_kron(r, &x, &y, &z)?;
        println!("k=1 r={r}: dim {n}, value {value}, {:.2?}", start.elapsed());
    }
    Ok(())
}
