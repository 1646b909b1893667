//! Symmetric Pareto(1.5) noise has no second moment, so with `p = 1, r = 2`
//! the series diverges. The log-log slope of the terms sits near -1/2.
use bk_autoreg::series::{accumulate_bands, powers_of_two, predict};
use bk_autoreg::{Engine, ModelSpec, NoiseSpec, SeriesParams};

fn main() -> bk_autoreg::Result<()> {
    let model = ModelSpec::constant(0.0)?;
    let spec = NoiseSpec::SymmetricPareto { alpha: 1.5, scale: 1.0 };
    let params = SeriesParams::new(1.0, 2.0, 1.0)?;
    let curve = Engine::new(20_000, 5)?.tail_curve(&model, &spec, &params, &powers_of_two(4, 12))?;
    let bands = accumulate_bands(&curve, &params)?;
    for row in &bands.center.rows {
        println!("n = {:>5}: tail {:.5}  term {:.5}  partial sum {:.2}", row.n, row.tail.point, row.term, row.partial_sum);
    }
    println!("slope {:.3}", bands.center.slope.unwrap_or(f64::NAN));
    println!("diagnosed {} (pessimistic {}, optimistic {})", bands.center.verdict, bands.pessimistic.verdict, bands.optimistic.verdict);
    println!("predicted {}", predict(&model, &params, &spec)?);
    Ok(())
}
