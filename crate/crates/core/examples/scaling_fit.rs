//! Fitting the growth rate of a percentile TTS against problem size.

use qabench::bench::{scaling_fit, Estimate, ScanOptions, SizeMeasure};
use rand::Rng;

fn main() -> qabench::Result<()> {
    let mut rng = qabench::rng::stream(3, 0);
    let sizes: Vec<f64> = (4..=12).map(f64::from).collect();
    // synthetic per-instance TTS growing as 2^{L/2} with log-normal-ish spread
    let tts: Vec<Vec<Estimate>> = sizes
        .iter()
        .map(|&l| {
            (0..30)
                .map(|_| Estimate::Value(2f64.powf(0.5 * l) * rng.gen_range(-0.4f64..0.4).exp()))
                .collect()
        })
        .collect();
    for measure in [SizeMeasure::Linear, SizeMeasure::SqrtN] {
        let fit = scaling_fit(&sizes, measure, &tts, &ScanOptions::default())?;
        println!(
            "{measure:?}: slope {:.4} [{:.4}, {:.4}], intercept {:.3}",
            fit.slope.estimate, fit.slope.lower, fit.slope.upper, fit.intercept
        );
    }
    println!("true slope in L: {:.4}", 0.5 * std::f64::consts::LN_2);
    Ok(())
}
