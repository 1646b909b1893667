//! Series partial sums, slope diagnostic and the predicted verdict for a few
//! configurations.
use bk_autoreg::series::{accumulate_bands, compare, powers_of_two, predict};
use bk_autoreg::{Engine, ModelSpec, NoiseSpec, SeriesParams};

fn main() -> bk_autoreg::Result<()> {
    let engine = Engine::new(20_000, 3)?;
    let cases = [
        (0.5, "normal:1", 1.0, 2.0),
        (-0.9, "normal:1", 0.5, 1.0),
        (1.0, "normal:1", 0.7, 1.4),
        (0.0, "pareto:1.5", 1.0, 2.0),
        (1.0, "student:1.8", 0.5, 1.0),
    ];
    for (q, noise, p, r) in cases {
        let model = ModelSpec::constant(q)?;
        let spec: NoiseSpec = noise.parse()?;
        let params = SeriesParams::new(p, r, 1.0)?;
        let curve = engine.tail_curve(&model, &spec, &params, &powers_of_two(4, 12))?;
        let bands = accumulate_bands(&curve, &params)?;
        let predicted = predict(&model, &params, &spec)?;
        let slope = bands.center.slope.map_or("none".into(), |s| format!("{s:.3}"));
        println!(
            "q = {q:>4}, {noise:<11}, p = {p}, r = {r}: slope {slope:>7}, partial sum {:.4}, diagnosed {}, predicted {}, {}",
            bands.center.last_partial_sum(),
            bands.center.verdict,
            predicted,
            compare(&predicted, &bands.center.verdict)
        );
    }
    Ok(())
}
