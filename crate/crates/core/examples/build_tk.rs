//! Builds T_k for k = 1..4 and prints its size, support and structure.
//!
//! cargo run --release --example build_tk

use tkrank::field::FieldContext;
use tkrank::tk::{build_tk, dimension, support_size, verify_tightness};

fn main() -> tkrank::error::Result<()> {
    let field = FieldContext::mersenne31();
    println!(
        "{:>2}  {:>5}  {:>8}  {:>6}  flattening ranks",
        "k", "dim", "support", "tight"
    );
    for k in 1..=4 {
        let t = build_tk(k, field)?;
        assert_eq!(t.support_len(), support_size(k));
        // the exhaustive checks stop at k = 3 (a 495 x 245025 flattening at k = 4)
        let (tight, ranks) = if k <= 3 {
            let ranks = [
                t.flattening_rank(1)?,
                t.flattening_rank(2)?,
                t.flattening_rank(3)?,
            ];
            (verify_tightness(k)?.to_string(), format!("{ranks:?}"))
        } else {
            ("-".into(), "-".into())
        };
        println!(
            "{k:>2}  {:>5}  {:>8}  {tight:>6}  {ranks}",
            dimension(k),
            t.support_len()
        );
    }

    // T_1 is the sum over the six permutations of three singletons
    let t1 = build_tk(1, field)?;
    let entries: Vec<_> = t1.entries().map(|(idx, _)| idx).collect();
    println!("T_1 support: {entries:?}");
    Ok(())
}
