//! Supported innovation laws: tail index, mean, absolute moments and a few draws.
use bk_autoreg::distributions::sample;
use bk_autoreg::rng::Stream;
use bk_autoreg::NoiseSpec;

fn main() -> bk_autoreg::Result<()> {
    let specs = ["normal:1", "rademacher", "uniform:2", "pareto:1.5", "student:2.5", "twopoint:-1,2,0.6666666666666666"];
    for text in specs {
        let spec: NoiseSpec = text.parse()?;
        let mut rng = Stream::new(7);
        let draws: Vec<String> = (0..4).map(|_| sample(&spec, &mut rng).map(|x| format!("{x:.3}"))).collect::<Result<_, _>>()?;
        println!(
            "{text:<34} tail index {:>5}  mean {:>6.3}  E|X|^1 {:>8.4}  E|X|^2 {:>8.4}  draws [{}]",
            spec.tail_index(),
            spec.mean(),
            spec.abs_moment(1.0)?.value(),
            spec.abs_moment(2.0)?.value(),
            draws.join(", ")
        );
    }
    Ok(())
}
