// Any envelope works: here a skewed pulse given as samples, loaded from an
// in-memory CSV exactly as the CLI would load a file.
use cavity_store::prelude::*;
use cavity_store::pulse::read_tabulated_csv;

fn main() -> Result<()> {
    let mut csv = String::from("t,amplitude\n");
    for i in 0..=2400 {
        let t = i as f64 * 0.05;
        // slow rise, faster fall
        let x = t - 40.0;
        let w = if x < 0.0 { 10.0 } else { 6.0 };
        csv.push_str(&format!("{t},{}\n", (-(x / w).powi(2)).exp()));
    }
    let records = read_tabulated_csv(csv.as_bytes())?;
    let (shape, scale) = load_tabulated(&records)?;
    println!("rescaled by {scale:.6}, peak at {:.2}, fwhm {:.3}", shape.peak_time(), shape.duration());

    let config = SystemConfig::for_pulse(&shape, 1.0)?;
    let profile = synthesize_profile(&shape, &config)?;
    let run = integrate(&shape, &config, &profile, &ErrorModel::IDEAL)?;
    println!("efficiency {:.9}, residual {:.2e}", run.efficiency, run.conservation_residual);
    Ok(())
}
