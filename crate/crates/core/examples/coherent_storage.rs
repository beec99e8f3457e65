// A coherent input with a mean of 5 photons. The coupling does not depend on
// n_p; only the stored mean photon number scales. κβ = 10, peak at 10β.
use cavity_store::prelude::*;

fn main() -> Result<()> {
    let shape = PulseShape::sech(100.0, 10.0)?;
    let config = SystemConfig::for_pulse(&shape, 1.0)?.with_photons(5.0)?;
    let profile = coherent_coupling(&shape, &config)?;
    let run = integrate(&shape, &config, &profile, &ErrorModel::IDEAL)?;
    let n = coherent_expectations(&run, config.n_p);

    let step = run.len() / 8;
    for i in (0..run.len()).step_by(step) {
        println!("κt = {:7.2}   <n_B> = {:.6}", run.times[i], n[i]);
    }
    println!("final <n_B> = {:.9}", n[n.len() - 1]);
    Ok(())
}
