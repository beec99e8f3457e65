// Store a Gaussian photon (κt_p = 20, peak at 5η) in cavity B with the ideal coupling.
//
// $ cargo run --release --example ideal_storage
use cavity_store::prelude::*;

fn main() -> Result<()> {
    let shape = PulseShape::gaussian_from_linewidth(1.0, 20.0, 5.0)?;
    let config = SystemConfig::for_pulse(&shape, 1.0)?;
    let profile = synthesize_profile(&shape, &config)?;
    let run = integrate(&shape, &config, &profile, &ErrorModel::IDEAL)?;

    println!("grid points        {}", run.len());
    println!("switch-off at κt = {:.3}", profile.switch_off_time().unwrap_or(f64::NAN));
    println!("efficiency         {:.12}", efficiency_at_infinity(&run)?);
    println!("max |alpha_out|    {:.3e}", run.max_alpha_out);
    println!("energy residual    {:.3e}", run.conservation_residual);
    Ok(())
}
