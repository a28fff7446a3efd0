//! Writes and reads the JSON artifacts: instances, tensors and decompositions.
//!
//! cargo run --release --example file_formats

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tkrank::field::FieldContext;
use tkrank::generate::{random_setcover, random_tripartition};
use tkrank::io::{
    from_json_str, to_json_string, DecompositionFile, InstanceFile, SetCoverFile, TensorFile,
    TripartitionFile,
};
use tkrank::tk::{build_tk, group_decomposition};

fn main() -> tkrank::error::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let tri = random_tripartition(2, 2, true, &mut rng)?;
    let text = to_json_string(&TripartitionFile::from(&tri))?;
    println!("{text}");
    assert!(matches!(
        from_json_str::<InstanceFile>(&text)?,
        InstanceFile::Tripartition(_)
    ));

    let sc = random_setcover(6, 2, 3, 3, true, &mut rng)?;
    println!("{}", serde_json::to_string(&SetCoverFile::from(&sc))?);

    let field = FieldContext::new(7)?;
    println!(
        "{}",
        serde_json::to_string(&TensorFile::from(&build_tk(1, field)?))?
    );
    let d = group_decomposition(1, field)?;
    let text = serde_json::to_string(&DecompositionFile::from(&d))?;
    println!("{text}");
    let back = from_json_str::<DecompositionFile>(&text)?.into_decomposition()?;
    println!("round trip equal: {}", back == d);

    match from_json_str::<TripartitionFile>("{\"n\": 2, \"families\": [") {
        Err(e) => println!("malformed: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
