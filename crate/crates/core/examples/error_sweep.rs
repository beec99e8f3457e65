// Efficiency under a miscalibrated coupling: amplitude factor g0 and a timing
// offset τ (in units of t_p). Sweep points run on a rayon pool.
//
// $ cargo run --release --example error_sweep
use cavity_store::prelude::*;
use cavity_store::sweep::linspace;

fn main() -> Result<()> {
    let shape = PulseShape::gaussian_from_linewidth(1.0, 20.0, 5.0)?;
    let config = SystemConfig::for_pulse(&shape, 1.0)?;

    for (axis, values) in [
        (SweepAxis::AmplitudeFactor, linspace(0.8, 1.2, 9)),
        (SweepAxis::DelayFraction, linspace(-0.2, 0.2, 9)),
    ] {
        let result = run_sweep(&SweepSpec::new(shape.clone(), config, axis, values)?)?;
        println!("{axis:?}");
        for (v, e) in result.values.iter().zip(&result.efficiencies) {
            println!("  {v:+.3}  {e:.6}");
        }
        let s = summarize(&result);
        println!("  worst {:.6} at {:+.3}, monotone = {}", s.min_efficiency, s.worst_value, s.monotone);
    }
    Ok(())
}
