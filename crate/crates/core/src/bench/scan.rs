use serde::{Deserialize, Serialize};

use super::{
    central_interval, dirichlet_weights, gauge_average, success_prob, tts, weighted_quantile, BenchReport, Estimate,
    Flag, Interval, ReportPoint, DEFAULT_PERCENTILE, MIN_RESAMPLES,
};
use crate::error::{Error, Result};
use crate::instances::{IsingInstance, ENERGY_TOLERANCE};
use crate::rng;
use crate::solvers::{solve_exact, Solver, SolverConfig};

/// Settings shared by scans and fits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScanOptions {
    pub p_d: f64,
    /// Hardness percentile over instances; 0.5 is the median.
    pub percentile: f64,
    pub resamples: usize,
    pub level: f64,
    /// Bootstrap seed.
    pub seed: u64,
    pub gauges: usize,
    /// Run time charged per sweep when converting sweeps to `t_f`.
    pub time_per_sweep: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            p_d: 0.99,
            percentile: DEFAULT_PERCENTILE,
            resamples: 1000,
            level: 0.95,
            seed: 0,
            gauges: 1,
            time_per_sweep: 1.0,
        }
    }
}

impl ScanOptions {
    fn check(&self) -> Result<()> {
        if !(self.percentile > 0.0 && self.percentile <= 1.0) {
            return Err(Error::param(format!("percentile {} outside (0, 1]", self.percentile)));
        }
        if self.resamples < MIN_RESAMPLES {
            return Err(Error::param(format!("at least {MIN_RESAMPLES} resamples required")));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::param(format!("interval level {} outside (0, 1)", self.level)));
        }
        if !(self.time_per_sweep > 0.0) {
            return Err(Error::param("time per sweep must be positive"));
        }
        Ok(())
    }
}

/// Known ground energy, or the exact solver's when none is recorded.
pub fn scan_ground_energy(instance: &IsingInstance) -> Result<f64> {
    match instance.known_ground_energy() {
        Some(e) => Ok(e),
        None => Ok(solve_exact(instance)?.ground_energy),
    }
}

/// TTS percentile over instances as a function of sweeps.
///
/// Instance `i` is solved with seed `derive_seed(template.seed, i)` at every
/// axis point. The optimum is the smallest finite percentile; an optimum at
/// either end of the grid is flagged, as is a curve with no finite point.
pub fn optimal_tf_scan(
    instances: &[IsingInstance],
    solver: &dyn Solver,
    template: &SolverConfig,
    axis: &[u64],
    options: &ScanOptions,
) -> Result<BenchReport> {
    if instances.is_empty() {
        return Err(Error::param("no instances to scan"));
    }
    let grounds = instances.iter().map(scan_ground_energy).collect::<Result<Vec<_>>>()?;
    let mut report = tts_curve(instances.len(), axis, options, |i, sweeps| {
        let cfg = template
            .clone()
            .with_sweeps(sweeps)
            .with_seed(rng::derive_seed(template.seed, i as u64));
        let avg = gauge_average(&instances[i], solver, &cfg, options.gauges, rng::derive_seed(options.seed, i as u64))?;
        success_prob(&avg.pooled, grounds[i], ENERGY_TOLERANCE)
    })?;
    report.seeds.insert("solver".into(), template.seed);
    report.params.insert("solver".into(), solver.id().into());
    Ok(report)
}

/// Per-instance TTS at every axis point, from a success-probability oracle.
/// Rows are instances, columns axis points.
pub fn tts_table(
    instances: usize,
    axis: &[u64],
    options: &ScanOptions,
    success: impl Fn(usize, u64) -> Result<f64>,
) -> Result<Vec<Vec<Estimate>>> {
    options.check()?;
    if axis.len() < 3 {
        return Err(Error::param("an annealing-time scan needs at least 3 grid points"));
    }
    if axis[0] == 0 || axis.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("sweep grid must be positive and strictly increasing"));
    }
    if instances == 0 {
        return Err(Error::param("no instances to scan"));
    }
    (0..instances)
        .map(|i| {
            axis.iter()
                .map(|&sweeps| tts(success(i, sweeps)?, options.p_d, sweeps as f64 * options.time_per_sweep))
                .collect()
        })
        .collect()
}

/// Builds the percentile TTS curve of [`optimal_tf_scan`] from a
/// per-instance TTS table (rows instances, columns axis points).
pub fn tts_curve_from_table(table: &[Vec<Estimate>], axis: &[u64], options: &ScanOptions) -> Result<BenchReport> {
    options.check()?;
    let mut report = BenchReport::new("tts", "sweeps", options.level);
    for (k, &sweeps) in axis.iter().enumerate() {
        let keys: Vec<f64> = table.iter().map(|row| row[k].key()).collect();
        let q = options.percentile;
        let interval = super::bayesian_bootstrap(
            &keys,
            |d, w| weighted_quantile(d, w, q),
            options.resamples,
            options.level,
            rng::derive_seed(options.seed, k as u64),
        )?;
        if interval.degenerate {
            report.flag(Flag::DegenerateBootstrap);
        }
        report.points.push(ReportPoint {
            axis: sweeps as f64,
            estimate: Estimate::from_key(interval.estimate),
            lower: Estimate::from_key(interval.lower),
            upper: Estimate::from_key(interval.upper),
        });
    }
    let best = report
        .points
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.estimate.is_unsolved())
        .fold(None::<(usize, f64)>, |b, (k, p)| match b {
            Some((_, v)) if v <= p.estimate.key() => b,
            _ => Some((k, p.estimate.key())),
        });
    match best {
        None => report.flag(Flag::InsufficientSamples),
        Some((k, _)) => {
            let p = report.points[k].clone();
            report.optimum = Some(p.axis);
            report.estimate = p.estimate;
            report.lower = p.lower;
            report.upper = p.upper;
            if k == 0 || k == axis.len() - 1 {
                report.flag(Flag::BoundaryOptimum);
            }
        }
    }
    report.seeds.insert("bootstrap".into(), options.seed);
    report.params.insert("p_d".into(), options.p_d.into());
    report.params.insert("percentile".into(), options.percentile.into());
    report.params.insert("resamples".into(), options.resamples.into());
    report.params.insert("gauges".into(), options.gauges.into());
    report.params.insert("time_per_sweep".into(), options.time_per_sweep.into());
    report.params.insert("instances".into(), table.len().into());
    Ok(report)
}

/// [`tts_table`] followed by [`tts_curve_from_table`].
pub fn tts_curve(
    instances: usize,
    axis: &[u64],
    options: &ScanOptions,
    success: impl Fn(usize, u64) -> Result<f64>,
) -> Result<BenchReport> {
    let table = tts_table(instances, axis, options, success)?;
    tts_curve_from_table(&table, axis, options)
}

/// How problem size enters the exponential scaling model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeMeasure {
    /// Chimera grid size `L`.
    Linear,
    /// `√N` with `N = 8L²` qubits of `C_L`.
    SqrtN,
}

pub fn size_measure(grid_size: f64, measure: SizeMeasure) -> f64 {
    match measure {
        SizeMeasure::Linear => grid_size,
        SizeMeasure::SqrtN => (8.0 * grid_size * grid_size).sqrt(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub measure: SizeMeasure,
    pub sizes: Vec<f64>,
    /// Percentile TTS per size.
    pub percentiles: Vec<f64>,
    /// Slope of `ln TTS` against the size measure.
    pub slope: Interval,
    pub intercept: f64,
}

impl ScalingFit {
    pub fn report(&self) -> BenchReport {
        let mut r = BenchReport::new("scaling_slope", "size", self.slope.level);
        r.estimate = Estimate::Value(self.slope.estimate);
        r.lower = Estimate::Value(self.slope.lower);
        r.upper = Estimate::Value(self.slope.upper);
        r.points = self
            .sizes
            .iter()
            .zip(&self.percentiles)
            .map(|(&s, &t)| ReportPoint {
                axis: s,
                estimate: Estimate::Value(t),
                lower: Estimate::Value(t),
                upper: Estimate::Value(t),
            })
            .collect();
        r.params.insert("measure".into(), serde_json::to_value(self.measure).unwrap());
        r.params.insert("intercept".into(), self.intercept.into());
        r
    }
}

fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Fits `ln TTS_q = a + b·m(L)` where `TTS_q` is the percentile over the
/// instances of each size. The slope interval resamples instances within
/// each size with flat-Dirichlet weights.
pub fn scaling_fit(
    grid_sizes: &[f64],
    measure: SizeMeasure,
    tts_by_size: &[Vec<Estimate>],
    options: &ScanOptions,
) -> Result<ScalingFit> {
    options.check()?;
    if grid_sizes.len() != tts_by_size.len() {
        return Err(Error::LengthMismatch {
            expected: grid_sizes.len(),
            got: tts_by_size.len(),
        });
    }
    if grid_sizes.len() < 3 {
        return Err(Error::param("a scaling fit needs at least 3 sizes"));
    }
    let unsolved: Vec<String> = grid_sizes
        .iter()
        .zip(tts_by_size)
        .filter(|(_, s)| s.is_empty() || s.iter().any(|e| e.is_unsolved()))
        .map(|(l, _)| l.to_string())
        .collect();
    if !unsolved.is_empty() {
        return Err(Error::param(format!(
            "unsolved or missing TTS values at sizes {}",
            unsolved.join(", ")
        )));
    }
    let logs: Vec<Vec<f64>> = tts_by_size
        .iter()
        .map(|s| s.iter().map(|e| e.key().ln()).collect())
        .collect();
    if logs.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::param("TTS values must be positive"));
    }
    let x: Vec<f64> = grid_sizes.iter().map(|&l| size_measure(l, measure)).collect();
    if x.windows(2).any(|w| w[0] == w[1]) || x.iter().all(|&v| v == x[0]) {
        return Err(Error::param("sizes must be distinct"));
    }
    let q = options.percentile;
    let fit = |weights: &[Vec<f64>]| {
        let y: Vec<f64> = logs.iter().zip(weights).map(|(l, w)| weighted_quantile(l, w, q)).collect();
        least_squares(&x, &y)
    };
    let uniform: Vec<Vec<f64>> = logs.iter().map(|l| vec![1.0 / l.len() as f64; l.len()]).collect();
    let (slope, intercept) = fit(&uniform);
    let mut rng = rng::stream(options.seed, 0);
    let stats: Vec<f64> = (0..options.resamples)
        .map(|_| {
            let w: Vec<Vec<f64>> = logs.iter().map(|l| dirichlet_weights(l.len(), &mut rng)).collect();
            fit(&w).0
        })
        .collect();
    let mut interval = central_interval(stats, slope, options.level);
    interval.degenerate = logs.iter().all(|l| l.len() < 2);
    Ok(ScalingFit {
        measure,
        sizes: x,
        percentiles: uniform.iter().zip(&logs).map(|(w, l)| weighted_quantile(l, w, q).exp()).collect(),
        slope: interval,
        intercept,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::StubSolver;
    use crate::instances::gen_frustrated_loops;
    use crate::topology::build_chimera;

    fn planted_set(count: u64) -> Vec<IsingInstance> {
        let g = build_chimera(1, &[]).unwrap();
        (0..count).map(|s| gen_frustrated_loops(&g, 0.5, 3.0, s, None).unwrap()).collect()
    }

    fn opts() -> ScanOptions {
        ScanOptions {
            resamples: 200,
            ..ScanOptions::default()
        }
    }

    #[test]
    fn u_shaped_curve_has_interior_optimum() {
        // p rises steeply then saturates, so TTS falls as 1/t then grows as t
        let grid = [10, 20, 40, 80, 160, 320];
        let stub = StubSolver::from_fn(&grid, |t| 1.0 - (-((t as f64 / 60.0).powi(2))).exp()).unwrap();
        let cfg = SolverConfig::default().with_repetitions(2000);
        let r = optimal_tf_scan(&planted_set(3), &stub, &cfg, &grid, &opts()).unwrap();
        assert!(!r.has_flag(Flag::BoundaryOptimum), "{}", r.to_csv());
        let opt = r.optimum.unwrap();
        assert!(opt > 10.0 && opt < 320.0);
    }

    #[test]
    fn monotone_curve_is_flagged() {
        let grid = [10, 20, 40];
        let stub = StubSolver::from_fn(&grid, |t| t as f64 / 400.0).unwrap();
        let cfg = SolverConfig::default().with_repetitions(500);
        let r = optimal_tf_scan(&planted_set(2), &stub, &cfg, &grid, &opts()).unwrap();
        assert!(r.has_flag(Flag::BoundaryOptimum));
        assert_eq!(r.optimum, Some(40.0));
    }

    #[test]
    fn unsolved_everywhere() {
        let grid = [10, 20, 40];
        let stub = StubSolver::from_fn(&grid, |_| 0.0).unwrap();
        let cfg = SolverConfig::default().with_repetitions(50);
        let r = optimal_tf_scan(&planted_set(2), &stub, &cfg, &grid, &opts()).unwrap();
        assert!(r.has_flag(Flag::InsufficientSamples));
        assert!(r.points.iter().all(|p| p.estimate.is_unsolved()));
        assert!(optimal_tf_scan(&planted_set(1), &stub, &cfg, &grid[..2], &opts()).is_err());
    }

    #[test]
    fn scan_is_reproducible() {
        let grid = [10, 20, 40];
        let stub = StubSolver::from_fn(&grid, |t| t as f64 / 100.0).unwrap();
        let cfg = SolverConfig::default().with_repetitions(100).with_seed(3);
        let a = optimal_tf_scan(&planted_set(2), &stub, &cfg, &grid, &opts()).unwrap();
        let b = optimal_tf_scan(&planted_set(2), &stub, &cfg, &grid, &opts()).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn recovers_exponential_slope() {
        let sizes: Vec<f64> = (4..=12).map(f64::from).collect();
        let mut r = rng::stream(11, 0);
        let series: Vec<Vec<Estimate>> = sizes
            .iter()
            .map(|&l| {
                (0..25)
                    .map(|_| {
                        let noise: f64 = rand::Rng::gen_range(&mut r, -0.3..0.3);
                        Estimate::Value(2f64.powf(0.5 * l) * noise.exp())
                    })
                    .collect()
            })
            .collect();
        let fit = scaling_fit(&sizes, SizeMeasure::Linear, &series, &opts()).unwrap();
        let truth = 0.5 * std::f64::consts::LN_2;
        assert!(fit.slope.contains(truth), "{:?}", fit.slope);
        let flat: Vec<Vec<Estimate>> = sizes.iter().map(|_| vec![Estimate::Value(7.0); 4]).collect();
        let fit = scaling_fit(&sizes, SizeMeasure::SqrtN, &flat, &opts()).unwrap();
        assert!(fit.slope.contains(0.0));
    }

    #[test]
    fn scaling_fit_preconditions() {
        let two = vec![vec![Estimate::Value(1.0)], vec![Estimate::Value(2.0)]];
        assert!(scaling_fit(&[4.0, 5.0], SizeMeasure::Linear, &two, &opts()).is_err());
        let series = vec![
            vec![Estimate::Value(1.0)],
            vec![Estimate::Unsolved],
            vec![Estimate::Value(3.0)],
        ];
        let err = scaling_fit(&[4.0, 5.0, 6.0], SizeMeasure::Linear, &series, &opts()).unwrap_err();
        assert!(err.to_string().contains('5'), "{err}");
    }
}
