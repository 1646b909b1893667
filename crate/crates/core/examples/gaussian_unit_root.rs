//! Exact Gaussian tails for the unit-root model `q = 1`.
//!
//! At `p = 2/3` the tail converges to a positive constant; at `p = 0.7` it
//! increases towards 1.
use bk_autoreg::oracle::{exact_gaussian_tail, unit_root_limit, variance_of_sum, TailQuery};
use bk_autoreg::ModelSpec;

fn main() -> bk_autoreg::Result<()> {
    let model = ModelSpec::constant(1.0)?;
    println!("limit at p = 2/3: {:.10}", unit_root_limit(1.0));
    println!("{:>9} {:>14} {:>12} {:>12}", "n", "Var S_n", "p = 2/3", "p = 0.7");
    for n in [10u64, 100, 1_000, 10_000, 100_000, 1_000_000] {
        let var = variance_of_sum(&model, n, 1.0)?;
        let a = exact_gaussian_tail(&model, &TailQuery::new(n, 2.0 / 3.0, 1.0)?, 1.0)?;
        let b = exact_gaussian_tail(&model, &TailQuery::new(n, 0.7, 1.0)?, 1.0)?;
        println!("{n:>9} {var:>14.6e} {a:>12.8} {b:>12.8}");
    }
    Ok(())
}
