// Print the ideal coupling g(t) for a sech pulse at a few instants, and write
// the whole profile as CSV to stdout when asked.
//
// $ cargo run --release --example coupling_profile -- --csv > g.csv
use std::io;

use cavity_store::prelude::*;

fn main() -> Result<()> {
    let shape = PulseShape::sech_from_linewidth(1.0, 20.0, 10.0)?;
    let config = SystemConfig::for_pulse(&shape, 1.0)?;
    let profile = synthesize_profile(&shape, &config)?;

    if std::env::args().any(|a| a == "--csv") {
        return profile.write_csv(io::stdout().lock(), false);
    }

    let v = profile.validity();
    println!("peak at {:.3}, t_p = {:.3}", shape.peak_time(), shape.duration());
    println!("max|g| = {:.4}  ok = {}  min radicand = {:.2e}", profile.max_abs_g(), v.ok, v.min_radicand);
    for k in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        let t = shape.peak_time() + k * shape.duration();
        println!("  g({t:8.3}) = {:+.6}", profile.value_at(t));
    }
    // g is negative while the pulse rises and vanishes after switch-off
    Ok(())
}
