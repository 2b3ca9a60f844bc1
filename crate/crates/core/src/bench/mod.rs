//! Benchmark statistics: success probability, time-to-solution, optimal
//! stopping, Bayesian bootstrap, gauge averaging and scaling fits.

mod report;
mod scan;
mod stub;

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::instances::{apply_gauge, gauge_transform, IsingInstance, Spin, ENERGY_TOLERANCE};
use crate::rng;
use crate::solvers::{SampleSet, Solver, SolverConfig};

pub use report::{BenchReport, Flag, ReportPoint};
pub use scan::{
    optimal_tf_scan, scaling_fit, scan_ground_energy, size_measure, tts_curve, tts_curve_from_table, tts_table, ScalingFit, ScanOptions,
    SizeMeasure,
};
pub use stub::StubSolver;

pub const DEFAULT_PERCENTILE: f64 = 0.5;
pub const MIN_RESAMPLES: usize = 100;

/// A time estimate, or the marker for a target that was never reached.
///
/// Ordered with `Unsolved` above every value. Serialized as a number or the
/// string `"unsolved"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Estimate {
    Value(f64),
    Unsolved,
}

impl Estimate {
    pub fn value(self) -> Option<f64> {
        match self {
            Estimate::Value(v) => Some(v),
            Estimate::Unsolved => None,
        }
    }

    pub fn is_unsolved(self) -> bool {
        self == Estimate::Unsolved
    }

    pub(crate) fn key(self) -> f64 {
        self.value().unwrap_or(f64::INFINITY)
    }

    pub(crate) fn from_key(x: f64) -> Estimate {
        if x.is_finite() {
            Estimate::Value(x)
        } else {
            Estimate::Unsolved
        }
    }
}

impl fmt::Display for Estimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Estimate::Value(v) => write!(f, "{v}"),
            Estimate::Unsolved => f.write_str("unsolved"),
        }
    }
}

impl Serialize for Estimate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Estimate::Value(v) => s.serialize_f64(*v),
            Estimate::Unsolved => s.serialize_str("unsolved"),
        }
    }
}

impl<'de> Deserialize<'de> for Estimate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Estimate::Value(v)),
            Raw::Text(t) if t == "unsolved" => Ok(Estimate::Unsolved),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("expected a number or \"unsolved\", got {t:?}"))),
        }
    }
}

/// Fraction of repetitions with energy at most `ground_energy + tolerance`.
pub fn success_prob(samples: &SampleSet, ground_energy: f64, tolerance: f64) -> Result<f64> {
    fraction_at_or_below(samples, ground_energy + tolerance)
}

fn fraction_at_or_below(samples: &SampleSet, threshold: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::param("success probability of an empty sample set"));
    }
    let hits = samples.energies.iter().filter(|&&e| e <= threshold).count();
    Ok(hits as f64 / samples.len() as f64)
}

/// `t_f · max(1, ln(1 − p_d) / ln(1 − p))`.
///
/// Floored at one run: fewer than one run is not physical. `p = 0` gives
/// [`Estimate::Unsolved`].
pub fn tts(p: f64, p_d: f64, t_f: f64) -> Result<Estimate> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!("success probability {p} outside [0, 1]")));
    }
    if !(p_d > 0.0 && p_d < 1.0) {
        return Err(Error::param(format!("desired probability {p_d} outside (0, 1)")));
    }
    if !(t_f > 0.0 && t_f.is_finite()) {
        return Err(Error::param(format!("run time {t_f} must be positive")));
    }
    if p == 0.0 {
        return Ok(Estimate::Unsolved);
    }
    if p == 1.0 {
        return Ok(Estimate::Value(t_f));
    }
    let runs = ((1.0 - p_d).ln() / (1.0 - p).ln()).max(1.0);
    Ok(Estimate::Value(t_f * runs))
}

/// Time to reach `target_energy` at least once with probability `p_d`.
pub fn ttt(samples: &SampleSet, target_energy: f64, p_d: f64, t_f: f64) -> Result<Estimate> {
    tts(fraction_at_or_below(samples, target_energy + ENERGY_TOLERANCE)?, p_d, t_f)
}

/// Optimal number of draws under the with-recall stopping rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoppingPolicy {
    pub n_star: usize,
    pub expected_reward: f64,
    /// `E[max of n draws] − c·n` for `n = 1..=budget`.
    pub curve: Vec<f64>,
}

/// Chooses how many draws to take from the empirical distribution of
/// `values` when each draw costs `cost` and the best draw is kept.
///
/// `budget` defaults to the number of values. Ties go to the smaller count,
/// except that with zero cost continuing is free and the budget is returned.
pub fn stopping_reward(values: &[f64], cost: f64, budget: Option<usize>) -> Result<StoppingPolicy> {
    if values.is_empty() {
        return Err(Error::param("stopping rule needs at least one value"));
    }
    if !(cost >= 0.0 && cost.is_finite()) {
        return Err(Error::param(format!("cost per sample {cost} must be finite and nonnegative")));
    }
    let budget = budget.unwrap_or(values.len());
    if budget == 0 {
        return Err(Error::param("budget must be at least one draw"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    let curve: Vec<f64> = (1..=budget)
        .map(|n| {
            let expected_max: f64 = sorted
                .iter()
                .enumerate()
                .map(|(k, v)| v * (((k + 1) as f64 / m).powi(n as i32) - (k as f64 / m).powi(n as i32)))
                .sum();
            expected_max - cost * n as f64
        })
        .collect();
    let n_star = if cost == 0.0 {
        budget
    } else {
        let mut best = 0;
        for (k, &v) in curve.iter().enumerate() {
            if v > curve[best] {
                best = k;
            }
        }
        best + 1
    };
    Ok(StoppingPolicy {
        n_star,
        expected_reward: curve[n_star - 1],
        curve,
    })
}

/// Central bootstrap interval. `lower ≤ estimate ≤ upper` always holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    /// Set when fewer than two observations made resampling meaningless.
    pub degenerate: bool,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Flat-Dirichlet weights: normalized Exp(1) draws, all strictly positive.
pub fn dirichlet_weights<R: Rng>(len: usize, rng: &mut R) -> Vec<f64> {
    let mut w: Vec<f64> = (0..len)
        .map(|_| loop {
            let x: f64 = rng.sample(Exp1);
            if x > 0.0 {
                break x;
            }
        })
        .collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    w
}

/// Centred on the first observation so constant data come back exactly.
pub fn weighted_mean(data: &[f64], weights: &[f64]) -> f64 {
    let Some(&origin) = data.first() else {
        return f64::NAN;
    };
    origin + data.iter().zip(weights).map(|(x, w)| (x - origin) * w).sum::<f64>() / weights.iter().sum::<f64>()
}

/// Smallest value whose cumulative weight reaches `q` of the total.
/// Infinite values sort last, so they represent unsolved entries.
pub fn weighted_quantile(data: &[f64], weights: &[f64], q: f64) -> f64 {
    let mut order: Vec<usize> = (0..data.len()).collect();
    order.sort_by(|&a, &b| data[a].total_cmp(&data[b]));
    let total: f64 = weights.iter().sum();
    let mut acc = 0.0;
    for &k in &order {
        acc += weights[k];
        if acc >= q * total * (1.0 - 1e-12) {
            return data[k];
        }
    }
    data[order[order.len() - 1]]
}

fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    if lo == hi || sorted[hi] == sorted[lo] {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

/// Bayesian bootstrap of `statistic(data, weights)` over `resamples`
/// flat-Dirichlet weight vectors.
///
/// The estimate uses uniform weights. A single observation yields a
/// zero-width interval flagged as degenerate; identical observations give a
/// zero-width interval without the flag.
pub fn bayesian_bootstrap<F>(data: &[f64], statistic: F, resamples: usize, level: f64, seed: u64) -> Result<Interval>
where
    F: Fn(&[f64], &[f64]) -> f64,
{
    if data.is_empty() {
        return Err(Error::param("bootstrap of an empty data set"));
    }
    if resamples < MIN_RESAMPLES {
        return Err(Error::param(format!("at least {MIN_RESAMPLES} resamples required, got {resamples}")));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::param(format!("interval level {level} outside (0, 1)")));
    }
    let uniform = vec![1.0 / data.len() as f64; data.len()];
    let estimate = statistic(data, &uniform);
    // Identical observations leave every reweighting unchanged up to rounding.
    let constant = data.iter().all(|x| x.to_bits() == data[0].to_bits());
    if data.len() < 2 || constant {
        return Ok(Interval {
            estimate,
            lower: estimate,
            upper: estimate,
            level,
            degenerate: data.len() < 2,
        });
    }
    let mut rng = rng::stream(seed, 0);
    let stats: Vec<f64> = (0..resamples)
        .map(|_| statistic(data, &dirichlet_weights(data.len(), &mut rng)))
        .collect();
    Ok(central_interval(stats, estimate, level))
}

/// Central `level` quantiles of bootstrap statistics, widened to contain `estimate`.
pub(crate) fn central_interval(mut stats: Vec<f64>, estimate: f64, level: f64) -> Interval {
    stats.sort_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0;
    Interval {
        estimate,
        lower: quantile_sorted(&stats, tail).min(estimate),
        upper: quantile_sorted(&stats, 1.0 - tail).max(estimate),
        level,
        degenerate: false,
    }
}

/// Bootstrap interval for `p̂₁ − p̂₂` between two independent 0/1 samples.
pub fn success_difference(a: &[f64], b: &[f64], resamples: usize, level: f64, seed: u64) -> Result<Interval> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::param("difference bootstrap needs two observations per side"));
    }
    if resamples < MIN_RESAMPLES || !(level > 0.0 && level < 1.0) {
        return Err(Error::param("invalid bootstrap settings"));
    }
    let mut rng = rng::stream(seed, 1);
    let stats: Vec<f64> = (0..resamples)
        .map(|_| {
            let wa = dirichlet_weights(a.len(), &mut rng);
            let wb = dirichlet_weights(b.len(), &mut rng);
            weighted_mean(a, &wa) - weighted_mean(b, &wb)
        })
        .collect();
    let mean = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
    Ok(central_interval(stats, mean(a) - mean(b), level))
}

/// Pooled samples over several gauges, mapped back to the original labels.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeAverage {
    pub pooled: SampleSet,
    pub gauges: Vec<Vec<Spin>>,
    pub per_gauge: Vec<SampleSet>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeDispersion {
    pub success: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
}

impl GaugeAverage {
    pub fn dispersion(&self, ground_energy: f64, tolerance: f64) -> Result<GaugeDispersion> {
        let success = self
            .per_gauge
            .iter()
            .map(|s| success_prob(s, ground_energy, tolerance))
            .collect::<Result<Vec<_>>>()?;
        let mean = success.iter().sum::<f64>() / success.len() as f64;
        let variance = success.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / success.len() as f64;
        Ok(GaugeDispersion { success, mean, variance })
    }
}

/// Gauge `g` uses seed `config.seed` for `g = 0` and a derived seed after.
fn gauge_seed(seed: u64, g: usize) -> u64 {
    if g == 0 {
        seed
    } else {
        rng::derive_seed(seed, g as u64)
    }
}

/// Solves `gauges` random gauge transforms of `instance` and pools the
/// results. Gauge 0 is the identity, so one gauge equals a plain solve.
pub fn gauge_average(
    instance: &IsingInstance,
    solver: &dyn Solver,
    config: &SolverConfig,
    gauges: usize,
    seed: u64,
) -> Result<GaugeAverage> {
    if gauges == 0 {
        return Err(Error::param("gauge count must be at least 1"));
    }
    let mut rng = rng::stream(seed, 0);
    let list: Vec<Vec<Spin>> = (0..gauges)
        .map(|g| {
            if g == 0 {
                vec![1; instance.n()]
            } else {
                (0..instance.n()).map(|_| *[1, -1].choose(&mut rng).unwrap()).collect()
            }
        })
        .collect();
    gauge_average_with(instance, solver, config, &list)
}

/// As [`gauge_average`] with explicit gauge vectors.
pub fn gauge_average_with(
    instance: &IsingInstance,
    solver: &dyn Solver,
    config: &SolverConfig,
    gauges: &[Vec<Spin>],
) -> Result<GaugeAverage> {
    if gauges.is_empty() {
        return Err(Error::param("gauge count must be at least 1"));
    }
    let mut per_gauge = Vec::with_capacity(gauges.len());
    for (g, gauge) in gauges.iter().enumerate() {
        let transformed = gauge_transform(instance, gauge)?;
        let cfg = config.clone().with_seed(gauge_seed(config.seed, g));
        let mut set = solver.solve(&transformed, &cfg)?;
        for s in set.states.iter_mut() {
            *s = apply_gauge(gauge, s);
        }
        set.energies = set.states.iter().map(|s| instance.energy(s)).collect::<Result<_>>()?;
        per_gauge.push(set);
    }
    let pooled = SampleSet::pooled(&per_gauge).expect("at least one gauge");
    Ok(GaugeAverage {
        pooled,
        gauges: gauges.to_vec(),
        per_gauge,
    })
}
