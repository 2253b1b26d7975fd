//! Generates a synthetic river dataset, writes it as CSV and summarizes how
//! often the 24-step horizon maximum crosses the 100 cm warning line.

use std::path::Path;

use qtlstm::data::synth_flood_series;

fn main() -> qtlstm::Result<()> {
    let length = 2000;
    let table = synth_flood_series(length, 1, 0.012, 1.5)?;
    let out = Path::new("flood_synth.csv");
    table.write_csv(out)?;
    println!("wrote {} rows to {}", table.n_rows(), out.display());

    let level: Vec<f64> = table
        .column("level")?
        .values
        .iter()
        .map(|v| v.unwrap())
        .collect();
    let min = level.iter().copied().fold(f64::INFINITY, f64::min);
    let max = level.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    println!("level range: {min:.1} .. {max:.1} cm");

    let horizon = 24;
    let above = (0..level.len() - horizon)
        .filter(|&t| level[t..t + horizon].iter().any(|&v| v > 100.0))
        .count();
    println!(
        "fraction of {horizon}-step horizons with a >100 cm event: {:.1}%",
        100.0 * above as f64 / (level.len() - horizon) as f64
    );
    Ok(())
}
