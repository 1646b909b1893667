//! The default inequality sweep plus individual Marcinkiewicz-Zygmund ratios.
use bk_autoreg::ineq::{full_sweep, mz_ratios, SweepConfig};
use bk_autoreg::{ModelSpec, NoiseSpec};

fn main() -> bk_autoreg::Result<()> {
    let config = SweepConfig::default();
    for r in full_sweep(&config)? {
        println!(
            "{:<28} {:?}: {:>7} instances, {} violations, {} flagged, worst margin {:.3e}",
            r.name, r.method, r.instances_checked, r.violations, r.flagged, r.worst_margin
        );
    }
    let model = ModelSpec::constant(0.5)?;
    for m in [1.0, 1.5, 2.0, 3.0, 4.0] {
        let ratios = mz_ratios(&model, &NoiseSpec::Rademacher, m, 12)?;
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().copied().fold(0.0, f64::max);
        println!("q = 0.5, Rademacher, m = {m}: E|S_n|^m / E(sum a^2 theta^2)^(m/2) in [{lo:.4}, {hi:.4}] for n <= 12");
    }
    Ok(())
}
