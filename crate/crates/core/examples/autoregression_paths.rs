//! One path under several coefficients, computed both by the recursion and by
//! the weighted-sum representation.
use bk_autoreg::distributions::sample;
use bk_autoreg::model::{simulate_path, weight_row};
use bk_autoreg::rng::Stream;
use bk_autoreg::{ModelSpec, NoiseSpec, PathMode};

fn main() -> bk_autoreg::Result<()> {
    let n = 20;
    let mut rng = Stream::new(42);
    let noise: Vec<f64> = (0..n).map(|_| sample(&NoiseSpec::standard_normal(), &mut rng)).collect::<Result<_, _>>()?;
    for q in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        let model = ModelSpec::constant(q)?;
        let rec = simulate_path(&model, &noise, PathMode::Recursive)?;
        let wtd = simulate_path(&model, &noise, PathMode::Weighted)?;
        let gap = rec.partial_sums.iter().zip(&wtd.partial_sums).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let row = weight_row(&model, n)?;
        println!(
            "q = {q:>4}: S_20 = {:>9.4}, max |rec - weighted| = {gap:.1e}, a(20,1) = {}, a(20,20) = {}",
            rec.partial_sums[n - 1], row[0], row[n - 1]
        );
    }
    Ok(())
}
