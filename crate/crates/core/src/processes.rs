//! Martingale bookkeeping and the exponential supermartingale
//!
//! ```text
//!     V_m(η) = exp( η M_m − η²/2 · ([M]_m + ⟨M⟩_m) )
//! ```
//!
//! which is a positive supermartingale with `E[V_m(η)] ≤ 1` for every
//! square-integrable martingale `M` and every real `η`. No boundedness or
//! exponential-moment assumption on the increments is needed, which is what
//! lets the certificates handle heavy-tailed losses.
//!
//! [`supermartingale_mean_check`] verifies the property statistically for any
//! [`IncrementModel`].

use rand::{Rng, RngCore};
use rand_distr::{Distribution, LogNormal, Pareto};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::montecarlo::{mean_stderr, run_trials};
use crate::scalar::Scalar;

/// Running `(M_m, [M]_m, ⟨M⟩_m)` for one martingale.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct VariationLedger<F> {
    pub m: usize,
    /// `M_m`, the sum of increments.
    pub sum: F,
    /// `[M]_m`, the sum of squared increments.
    pub bracket: F,
    /// `⟨M⟩_m`, the sum of conditional second moments.
    pub angle: F,
}

impl<F: Scalar> VariationLedger<F> {
    pub fn new() -> Self {
        VariationLedger { m: 0, sum: F::zero(), bracket: F::zero(), angle: F::zero() }
    }

    pub fn accumulate(self, x: F, cond_second_moment: F) -> Result<Self> {
        if !(cond_second_moment >= F::zero()) {
            return Err(Error::domain(format!(
                "conditional second moment must be nonnegative, got {cond_second_moment}"
            )));
        }
        Ok(VariationLedger {
            m: self.m + 1,
            sum: self.sum + x,
            bracket: self.bracket + x * x,
            angle: self.angle + cond_second_moment,
        })
    }
}

/// `log V_m(η) = η M − η²/2 ([M] + ⟨M⟩)`.
pub fn bercu_touati_log_value<F: Scalar>(eta: F, ledger: &VariationLedger<F>) -> F {
    if eta == F::zero() {
        return F::zero();
    }
    eta * ledger.sum - eta * eta * F::lit(0.5) * (ledger.bracket + ledger.angle)
}

/// One martingale-difference draw together with its conditional second moment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Increment {
    pub x: f64,
    pub cond_second_moment: f64,
}

/// Generator of martingale differences.
///
/// Implementations promise `E[x | history] = 0` and
/// `E[x² | history] = cond_second_moment`. The promise is checked
/// statistically by [`supermartingale_mean_check`], not per call.
pub trait IncrementModel: Sync {
    fn sample(&self, rng: &mut dyn RngCore, history: &VariationLedger<f64>) -> Increment;
    fn description(&self) -> String;
}

/// Stock increment models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum StockIncrements {
    /// `x ≡ 0`.
    Degenerate,
    /// `±scale` with equal probability.
    Rademacher { scale: f64 },
    /// `L − E[L]` with `L ~ LogNormal(mu, sigma)`.
    CenteredLogNormal { mu: f64, sigma: f64 },
    /// `X − E[X]` with `X ~ Pareto(scale, shape)`, `shape > 2`.
    CenteredPareto { scale: f64, shape: f64 },
    /// Rademacher whose scale depends on the path: `1` while `M ≥ 0`, `high` otherwise.
    PathDependentRademacher { high: f64 },
}

impl StockIncrements {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            StockIncrements::Degenerate => true,
            StockIncrements::Rademacher { scale } => scale.is_finite() && scale >= 0.0,
            StockIncrements::CenteredLogNormal { mu, sigma } => mu.is_finite() && sigma > 0.0,
            StockIncrements::CenteredPareto { scale, shape } => scale > 0.0 && shape > 2.0,
            StockIncrements::PathDependentRademacher { high } => high.is_finite() && high >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain(format!("invalid increment model {self:?}")))
        }
    }
}

impl IncrementModel for StockIncrements {
    fn sample(&self, rng: &mut dyn RngCore, history: &VariationLedger<f64>) -> Increment {
        match *self {
            StockIncrements::Degenerate => Increment { x: 0.0, cond_second_moment: 0.0 },
            StockIncrements::Rademacher { scale } => {
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                Increment { x: sign * scale, cond_second_moment: scale * scale }
            }
            StockIncrements::CenteredLogNormal { mu, sigma } => {
                let s2 = sigma * sigma;
                let mean = (mu + 0.5 * s2).exp();
                let var = (s2.exp() - 1.0) * (2.0 * mu + s2).exp();
                let l = LogNormal::new(mu, sigma).expect("validated").sample(rng);
                Increment { x: l - mean, cond_second_moment: var }
            }
            StockIncrements::CenteredPareto { scale, shape } => {
                let mean = shape * scale / (shape - 1.0);
                let var = scale * scale * shape / ((shape - 1.0).powi(2) * (shape - 2.0));
                let x = Pareto::new(scale, shape).expect("validated").sample(rng);
                Increment { x: x - mean, cond_second_moment: var }
            }
            StockIncrements::PathDependentRademacher { high } => {
                let scale = if history.sum >= 0.0 { 1.0 } else { high };
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                Increment { x: sign * scale, cond_second_moment: scale * scale }
            }
        }
    }

    fn description(&self) -> String {
        match *self {
            StockIncrements::Degenerate => "degenerate (x = 0)".to_string(),
            StockIncrements::Rademacher { scale } => format!("rademacher(scale={scale})"),
            StockIncrements::CenteredLogNormal { mu, sigma } => {
                format!("centered_lognormal(mu={mu}, sigma={sigma})")
            }
            StockIncrements::CenteredPareto { scale, shape } => {
                format!("centered_pareto(scale={scale}, shape={shape})")
            }
            StockIncrements::PathDependentRademacher { high } => {
                format!("path_dependent_rademacher(high={high})")
            }
        }
    }
}

/// Per-step Monte Carlo means of `V_m(η)` and of the raw increments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupermartingaleCheck {
    pub eta: f64,
    pub trials: usize,
    pub mean_by_step: Vec<f64>,
    pub stderr_by_step: Vec<f64>,
    pub increment_mean_by_step: Vec<f64>,
    pub increment_stderr_by_step: Vec<f64>,
}

impl SupermartingaleCheck {
    /// Steps `m` (1-based) where `mean > 1 + k·stderr`.
    pub fn exceedances(&self, k: f64) -> Vec<usize> {
        self.mean_by_step
            .iter()
            .zip(&self.stderr_by_step)
            .enumerate()
            .filter(|(_, (m, s))| **m > 1.0 + k * **s)
            .map(|(i, _)| i + 1)
            .collect()
    }

    /// Steps where the increment mean is more than `k` standard errors from 0.
    pub fn increment_bias(&self, k: f64) -> Vec<usize> {
        self.increment_mean_by_step
            .iter()
            .zip(&self.increment_stderr_by_step)
            .enumerate()
            .filter(|(_, (m, s))| m.abs() > k * **s)
            .map(|(i, _)| i + 1)
            .collect()
    }
}

pub fn supermartingale_mean_check(
    model: &dyn IncrementModel,
    eta: f64,
    horizon: usize,
    trials: usize,
    seed: u64,
) -> Result<SupermartingaleCheck> {
    if trials < 100 {
        return Err(Error::domain(format!("supermartingale check needs at least 100 trials, got {trials}")));
    }
    if horizon == 0 {
        return Err(Error::domain("horizon must be positive"));
    }
    let paths = run_trials(trials, seed, |_, rng| {
        let mut ledger = VariationLedger::<f64>::new();
        let mut values = Vec::with_capacity(horizon);
        let mut increments = Vec::with_capacity(horizon);
        for _ in 0..horizon {
            let inc = model.sample(rng, &ledger);
            ledger = ledger
                .accumulate(inc.x, inc.cond_second_moment)
                .expect("increment model returned a negative second moment");
            values.push(bercu_touati_log_value(eta, &ledger).exp());
            increments.push(inc.x);
        }
        (values, increments)
    });

    let mut check = SupermartingaleCheck {
        eta,
        trials,
        mean_by_step: Vec::with_capacity(horizon),
        stderr_by_step: Vec::with_capacity(horizon),
        increment_mean_by_step: Vec::with_capacity(horizon),
        increment_stderr_by_step: Vec::with_capacity(horizon),
    };
    for step in 0..horizon {
        let (m, s) = mean_stderr(paths.iter().map(|p| p.0[step]));
        check.mean_by_step.push(m);
        check.stderr_by_step.push(s);
        let (m, s) = mean_stderr(paths.iter().map(|p| p.1[step]));
        check.increment_mean_by_step.push(m);
        check.increment_stderr_by_step.push(s);
    }
    Ok(check)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accumulate_examples() {
        let l = VariationLedger::<f64>::new().accumulate(0.0, 0.0).unwrap();
        assert_eq!(l, VariationLedger { m: 1, sum: 0.0, bracket: 0.0, angle: 0.0 });
        let l = VariationLedger::<f64>::new().accumulate(2.0, 4.0).unwrap();
        assert_eq!(l, VariationLedger { m: 1, sum: 2.0, bracket: 4.0, angle: 4.0 });
        let l = VariationLedger::<f64>::new().accumulate(1.0, 1.0).unwrap().accumulate(-1.0, 1.0).unwrap();
        assert_eq!(l, VariationLedger { m: 2, sum: 0.0, bracket: 2.0, angle: 2.0 });
    }

    #[test]
    fn negative_second_moment_is_rejected() {
        assert!(matches!(VariationLedger::<f64>::new().accumulate(1.0, -0.1), Err(Error::Domain(_))));
        assert!(VariationLedger::<f64>::new().accumulate(1.0, f64::NAN).is_err());
    }

    #[test]
    fn log_value_examples() {
        let l = VariationLedger { m: 1, sum: 2.0f64, bracket: 4.0, angle: 4.0 };
        assert_eq!(bercu_touati_log_value(0.0, &l), 0.0);
        assert_eq!(bercu_touati_log_value(1.0, &l), -2.0);
        assert_eq!(bercu_touati_log_value(-1.0, &l), -6.0);
        let big = VariationLedger { m: 1, sum: 1e6f64, bracket: 1e6, angle: 0.0 };
        assert!(bercu_touati_log_value(1.0, &big).is_finite());
    }

    #[test]
    fn log_value_in_single_precision() {
        let l = VariationLedger::<f32>::new().accumulate(2.0, 4.0).unwrap();
        assert_eq!(bercu_touati_log_value(1.0f32, &l), -2.0);
    }

    #[test]
    fn degenerate_model_is_exactly_one() {
        let c = supermartingale_mean_check(&StockIncrements::Degenerate, 0.7, 10, 100, 1).unwrap();
        assert!(c.mean_by_step.iter().all(|&m| m == 1.0));
        assert!(c.stderr_by_step.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn too_few_trials_is_rejected() {
        assert!(supermartingale_mean_check(&StockIncrements::Degenerate, 0.1, 10, 99, 1).is_err());
    }

    #[test]
    fn rademacher_is_a_supermartingale() {
        let c = supermartingale_mean_check(&StockIncrements::Rademacher { scale: 1.0 }, 0.5, 50, 10_000, 3).unwrap();
        assert!(c.exceedances(3.0).is_empty(), "{:?}", c.exceedances(3.0));
        assert!(c.increment_bias(4.0).is_empty());
        // bracket = angle = m here, so V_m(η) = exp(η M − η² m): mean strictly below 1
        assert!(c.mean_by_step[49] < 1.0);
    }

    #[test]
    fn centered_lognormal_is_a_supermartingale() {
        let m = StockIncrements::CenteredLogNormal { mu: 0.0, sigma: 1.0 };
        let c = supermartingale_mean_check(&m, 0.1, 50, 10_000, 4).unwrap();
        assert!(c.exceedances(3.0).is_empty());
        assert!(c.increment_bias(4.0).is_empty());
    }

    #[test]
    fn path_dependent_model_keeps_the_property() {
        let m = StockIncrements::PathDependentRademacher { high: 3.0 };
        let c = supermartingale_mean_check(&m, 0.3, 40, 5_000, 9).unwrap();
        assert!(c.exceedances(3.0).is_empty());
        assert!(c.increment_bias(4.0).is_empty());
    }
}
