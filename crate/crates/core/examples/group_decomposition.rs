//! Character decompositions of T_k: writes the 2^(3k-1)-term decomposition,
//! verifies it by expansion for k <= 3 and at random points for k = 4.
//!
//! cargo run --release --example group_decomposition

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tkrank::combinatorics::enumerate_ksubsets;
use tkrank::field::FieldContext;
use tkrank::tk::{
    build_tk, certify_at_random_points, group_decomposition, group_map_f,
    naive_group_decomposition, verify_group_map,
};

fn main() -> tkrank::error::Result<()> {
    let field = FieldContext::mersenne31();

    println!("labels for k = 1:");
    for s in enumerate_ksubsets(3, 1) {
        println!("  {s} -> {}", group_map_f(s, 1)?);
    }

    for k in 1..=3 {
        let t = build_tk(k, field)?;
        let d = group_decomposition(k, field)?;
        let naive = naive_group_decomposition(k, field)?;
        println!(
            "k={k}: labels valid {}, rank {} ({}), naive rank {} ({})",
            verify_group_map(k)?,
            d.rank(),
            verdict(d.verify(&t)?),
            naive.rank(),
            verdict(naive.verify(&t)?),
        );
    }

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let d4 = group_decomposition(4, field)?;
    let ok = certify_at_random_points(&d4, &build_tk(4, field)?, 3, &mut rng)?;
    println!("k=4: rank {}, agrees at 3 random points: {ok}", d4.rank());

    // a damaged decomposition no longer expands to T_2
    let mut broken = group_decomposition(2, field)?;
    broken.terms_mut()[0].scale = field.elem(1);
    println!(
        "k=2 with one scale changed: {}",
        verdict(broken.verify(&build_tk(2, field)?)?)
    );
    Ok(())
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "valid"
    } else {
        "invalid"
    }
}
