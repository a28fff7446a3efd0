//! Set cover decided through balanced tripartitioning.
//!
//! cargo run --release --example set_cover

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tkrank::combinatorics::SubsetMask;
use tkrank::field::FieldContext;
use tkrank::generate::random_setcover;
use tkrank::setcover::{min_cover_size, reduce_and_solve, SetCoverInstance};
use tkrank::tk::group_decomposition;
use tkrank::tripartition::{solve_tensor, solve_wht, TensorSolverConfig};

fn main() -> tkrank::error::Result<()> {
    let set = |e: &[usize]| SubsetMask::from_elements(e, 9);
    let sets = vec![
        set(&[1, 2, 3])?,
        set(&[4, 5, 6])?,
        set(&[7, 8, 9])?,
        set(&[3, 4])?,
        set(&[6, 7])?,
    ];
    for t in [2, 3] {
        let inst = SetCoverInstance::new(9, t, 3, sets.clone())?;
        let out = reduce_and_solve(&inst, |tri| Ok(solve_wht(tri)?.answer))?;
        println!(
            "t={t}: cover exists {} ({} tripartition calls)",
            out.answer, out.calls
        );
    }

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let d = group_decomposition(1, FieldContext::mersenne31())?;
    for i in 0..8u64 {
        let inst = random_setcover(10, 3, 4, 8, i % 2 == 0, &mut rng)?;
        let min = min_cover_size(&inst)?;
        let wht = reduce_and_solve(&inst, |tri| Ok(solve_wht(tri)?.answer))?;
        let mut seed = i << 32;
        let tensor = reduce_and_solve(&inst, |tri| {
            seed += 1;
            Ok(solve_tensor(tri, &d, &TensorSolverConfig::new(1, seed))?.answer)
        })?;
        println!(
            "instance {i}: min cover {min:?}, t={}, wht {}, tensor {} ({} calls)",
            inst.t(),
            wht.answer,
            tensor.answer,
            tensor.calls
        );
    }
    Ok(())
}
