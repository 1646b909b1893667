//! Monte Carlo tail estimates with Wilson intervals, checked against exact
//! enumeration for Rademacher noise.
use bk_autoreg::oracle::enumerate_tail;
use bk_autoreg::{Engine, ModelSpec, NoiseSpec, TailQuery};

fn main() -> bk_autoreg::Result<()> {
    let engine = Engine::new(200_000, 11)?;
    let model = ModelSpec::constant(-0.5)?;
    println!("Rademacher, q = -0.5, p = 1, eps = 0.5");
    for n in [2u64, 4, 8, 12] {
        let query = TailQuery::new(n, 1.0, 0.5)?;
        let est = engine.estimate_tail(&model, &NoiseSpec::Rademacher, &query)?;
        let exact = enumerate_tail(&model, &NoiseSpec::Rademacher, &query)?;
        println!(
            "n = {n:>2}: estimate {:.5} [{:.5}, {:.5}]  exact {exact:.5}  covered {}",
            est.point, est.ci_low, est.ci_high, est.contains(exact)
        );
    }
    println!("Student t(1.8), q = 0.9, p = 1, eps = 1");
    let spec = NoiseSpec::StudentT { nu: 1.8 };
    let model = ModelSpec::constant(0.9)?;
    for n in [16u64, 256, 4096] {
        let est = engine.estimate_tail(&model, &spec, &TailQuery::new(n, 1.0, 1.0)?)?;
        println!("n = {n:>4}: {:.5} [{:.5}, {:.5}] from {} hits", est.point, est.ci_low, est.ci_high, est.hits);
    }
    Ok(())
}
