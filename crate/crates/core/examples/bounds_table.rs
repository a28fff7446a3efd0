//! Runtime bases and rank thresholds as functions of k.
//!
//! cargo run --release --example bounds_table

use tkrank::analysis::{
    first_beating_k, limiting_base_per_element, rank_threshold_table, render_runtime_table,
    render_threshold_table, runtime_base_table,
};
use tkrank::tk::bounds_report;

fn main() -> tkrank::error::Result<()> {
    let rows = runtime_base_table(16)?;
    print!("{}", render_runtime_table(&rows));
    println!("first k beating 8^n: {:?}", first_beating_k(&rows));
    println!(
        "per-element base tends to {:.4}\n",
        limiting_base_per_element()
    );

    print!("{}", render_threshold_table(&rank_threshold_table(8)?));
    println!();
    println!("{}", bounds_report(2, Some(40))?);
    Ok(())
}
