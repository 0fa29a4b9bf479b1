//! Anytime coverage experiments.
//!
//! Each trial simulates one path to the horizon and records the first `m` at
//! which some posterior breaks the bound. Risks and conditional variances are
//! exact (closed-form moments), so a violation is never an estimation
//! artefact.
//!
//! Two posterior sets are supported. The exact mode uses the
//! Donsker–Varadhan identity `sup_Q {E_Q[ψ] − KL(Q, P)} = log E_P[exp ψ]`:
//! each bound fails for some `Q` iff a log-partition exceeds the confidence
//! level, which gives the supremum over all posteriors in closed form. The
//! registered mode checks a fixed set (uniform, the risk minimizer as a point
//! mass, and the learner's Gibbs posterior).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::{CoverageTarget, ExperimentConfig, PosteriorSetMode, PriorRuleKind};
use super::output::real;
use super::HarnessError;
use crate::certificates::{martingale_bound, online_bound, MixedVariation, OnlineStep};
use crate::distributions::StockDistribution;
use crate::error::Result;
use crate::learners::{
    run_online_gibbs, AnalyticMoments, BatchStats, DataModel, LossSpec, Predictors, PriorRule, VIOLATION_TOLERANCE,
};
use crate::measures::{kl_divergence, log_expect_exp, PosteriorMeasure};
use crate::montecarlo::{run_trials, TrialRng, RNG_ALGORITHM};

type Measure = PosteriorMeasure<f64>;

/// Largest finite space for which `auto` picks the exact supremum.
pub const EXACT_SUPREMUM_MAX_SIZE: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub spec_version: String,
    pub rng_algorithm: String,
    pub seed: u64,
    pub target: String,
    pub posterior_set: String,
    pub trials: usize,
    pub horizon: usize,
    #[serde(with = "real")]
    pub delta: f64,
    #[serde(with = "real")]
    pub lambda: f64,
    pub violations_anytime: usize,
    #[serde(with = "real")]
    pub violation_freq: f64,
    /// `sqrt(δ(1−δ)/trials)`.
    #[serde(with = "real")]
    pub binomial_stderr: f64,
    /// `sqrt(f(1−f)/trials)` at the observed frequency.
    #[serde(with = "real")]
    pub estimate_stderr: f64,
    /// `δ + 3 · binomial_stderr`.
    #[serde(with = "real")]
    pub limit: f64,
    pub within_limit: bool,
    pub first_violation_histogram: BTreeMap<usize, usize>,
}

impl CoverageReport {
    /// Aggregates per-trial first-violation times, in trial order.
    pub fn from_first_violations(
        target: &str,
        posterior_set: &str,
        seed: u64,
        horizon: usize,
        delta: f64,
        lambda: f64,
        first: &[Option<usize>],
    ) -> Self {
        let trials = first.len();
        let mut histogram = BTreeMap::new();
        for m in first.iter().flatten() {
            *histogram.entry(*m).or_insert(0) += 1;
        }
        let violations: usize = histogram.values().sum();
        let n = trials as f64;
        let freq = violations as f64 / n;
        let binomial_stderr = (delta * (1.0 - delta) / n).sqrt();
        let limit = delta + 3.0 * binomial_stderr;
        CoverageReport {
            spec_version: super::output::SPEC_VERSION.to_string(),
            rng_algorithm: RNG_ALGORITHM.to_string(),
            seed,
            target: target.to_string(),
            posterior_set: posterior_set.to_string(),
            trials,
            horizon,
            delta,
            lambda,
            violations_anytime: violations,
            violation_freq: freq,
            binomial_stderr,
            estimate_stderr: (freq * (1.0 - freq) / n).sqrt(),
            limit,
            within_limit: freq <= limit,
            first_violation_histogram: histogram,
        }
    }
}

/// Everything a coverage trial needs, resolved from the config.
#[derive(Debug, Clone)]
pub struct CoverageSetup {
    pub target: CoverageTarget,
    pub exact: bool,
    pub dist: StockDistribution,
    pub loss: LossSpec,
    pub predictors: Predictors,
    pub prior: Measure,
    pub moments: AnalyticMoments,
    pub variance: Vec<f64>,
    pub lambda: f64,
    pub delta: f64,
    pub horizon: usize,
    pub prior_rule: PriorRuleKind,
}

impl CoverageSetup {
    pub fn from_config(config: &ExperimentConfig) -> std::result::Result<Self, HarnessError> {
        let predictors = config.model.predictors()?;
        let prior = config.model.prior(&predictors)?;
        let loss = config.model.loss.spec();
        let dist = config.model.data;
        let moments = AnalyticMoments::compute(&dist, &loss, &predictors).ok_or_else(|| {
            HarnessError::Runtime(format!(
                "unsupported: coverage needs closed-form risks for {} loss on {dist:?}",
                loss.name()
            ))
        })?;
        let exact = match config.coverage.posterior_set {
            PosteriorSetMode::Exact => true,
            PosteriorSetMode::Registered => false,
            PosteriorSetMode::Auto => predictors.len() <= EXACT_SUPREMUM_MAX_SIZE,
        };
        let variance = moments.variance();
        Ok(CoverageSetup {
            target: config.coverage.target,
            exact,
            dist,
            loss,
            predictors,
            prior,
            moments,
            variance,
            lambda: config.lambda,
            delta: config.delta,
            horizon: config.horizon,
            prior_rule: config.online.prior_rule,
        })
    }

    pub fn posterior_set_name(&self) -> &'static str {
        match (self.target, self.exact) {
            (CoverageTarget::VilleDirect, _) => "prior_mixture",
            (_, true) => "exact_supremum",
            (CoverageTarget::Online, false) => "registered:learner,uniform,analytic_best",
            (_, false) => "registered:uniform,analytic_best,gibbs",
        }
    }

    fn registered(&self, gibbs: Option<Measure>) -> Result<Vec<Measure>> {
        let space = self.predictors.space().clone();
        let mut set = vec![
            PosteriorMeasure::uniform(space.clone())?,
            PosteriorMeasure::point_mass(space, self.moments.best_index())?,
        ];
        set.extend(gibbs);
        Ok(set)
    }

    fn losses(&self, rng: &mut TrialRng) -> Result<Vec<f64>> {
        self.predictors.losses(&self.loss, self.dist.sample(rng))
    }

    /// First `m` at which the target bound fails, if any.
    pub fn trial(&self, rng: &mut TrialRng) -> Result<Option<usize>> {
        match self.target {
            CoverageTarget::VilleDirect | CoverageTarget::Martingale => self.martingale_trial(rng),
            CoverageTarget::Batch => self.batch_trial(rng),
            CoverageTarget::Online => self.online_trial(rng),
        }
    }

    fn martingale_trial(&self, rng: &mut TrialRng) -> Result<Option<usize>> {
        let k = self.predictors.len();
        let lambda = self.lambda;
        let ville = self.target == CoverageTarget::VilleDirect;
        let level = if ville { self.delta.recip().ln() } else { (2.0 / self.delta).ln() };
        let (mut sum, mut bracket, mut angle) = (vec![0.0; k], vec![0.0; k], vec![0.0; k]);
        let mut stats = BatchStats::new(k);
        for m in 1..=self.horizon {
            let losses = self.losses(rng)?;
            for h in 0..k {
                // M_m(h) = Σ (E_{i−1} ℓ − ℓ)
                let d = self.moments.risk[h] - losses[h];
                sum[h] += d;
                bracket[h] += d * d;
                angle[h] += self.variance[h];
            }
            stats.push(&losses);
            let violated = if ville || self.exact {
                let psi = |eta: f64| -> Vec<f64> {
                    (0..k).map(|h| eta * sum[h] - 0.5 * lambda * lambda * (bracket[h] + angle[h])).collect()
                };
                let up = log_expect_exp(&self.prior, &psi(lambda))?;
                let worst = if ville { up } else { up.max(log_expect_exp(&self.prior, &psi(-lambda))?) };
                worst > level + VIOLATION_TOLERANCE
            } else {
                let mut any = false;
                for q in self.registered(Some(stats.gibbs(&self.prior, lambda)?))? {
                    let variation = MixedVariation { m, bracket: q.expect(&bracket)?, angle: q.expect(&angle)? };
                    let bound = martingale_bound(kl_divergence(&q, &self.prior)?, self.delta, lambda, variation)?;
                    any |= q.expect(&sum)?.abs() > bound.value + VIOLATION_TOLERANCE;
                }
                any
            };
            if violated {
                return Ok(Some(m));
            }
        }
        Ok(None)
    }

    fn batch_trial(&self, rng: &mut TrialRng) -> Result<Option<usize>> {
        let k = self.predictors.len();
        let lambda = self.lambda;
        let level = (2.0 / self.delta).ln();
        let mut stats = BatchStats::new(k);
        for m in 1..=self.horizon {
            stats.push(&self.losses(rng)?);
            let violated = if self.exact {
                // fails for some Q iff log E_P exp(λm g) > log(2/δ) with
                // g = R − R_m − λ/2 (1/m)Σℓ² − λ/2 Quad
                let mf = m as f64;
                let psi: Vec<f64> = (0..k)
                    .map(|h| {
                        let g = self.moments.risk[h]
                            - stats.sum_loss[h] / mf
                            - 0.5 * lambda * stats.sum_sq[h] / mf
                            - 0.5 * lambda * self.moments.quad[h];
                        lambda * mf * g
                    })
                    .collect();
                log_expect_exp(&self.prior, &psi)? > level + VIOLATION_TOLERANCE
            } else {
                let mut any = false;
                for q in self.registered(Some(stats.gibbs(&self.prior, lambda)?))? {
                    let bound = stats.certificate(&q, &self.prior, lambda, self.delta, Some(&self.moments))?;
                    any |= q.expect(&self.moments.risk)? > bound.value + VIOLATION_TOLERANCE;
                }
                any
            };
            if violated {
                return Ok(Some(m));
            }
        }
        Ok(None)
    }

    fn online_trial(&self, rng: &mut TrialRng) -> Result<Option<usize>> {
        let stream = DataModel::sample_stream(self.dist, self.horizon, rng)?;
        let rule = match self.prior_rule {
            PriorRuleKind::Fixed => PriorRule::Fixed(self.prior.clone()),
            PriorRuleKind::PreviousPosterior => PriorRule::PreviousPosterior { initial: self.prior.clone() },
        };
        let lambda = self.lambda;
        let trace = run_online_gibbs(&stream, &self.loss, &self.predictors, &rule, lambda, self.delta)?;
        let values = match &stream {
            DataModel::Stream { values, .. } => values,
            DataModel::Iid(_) => unreachable!(),
        };
        let losses: Vec<Vec<f64>> =
            values.iter().map(|&z| self.predictors.losses(&self.loss, z)).collect::<Result<_>>()?;

        if self.exact {
            let level = self.delta.recip().ln();
            let mut total = 0.0;
            for (i, l) in losses.iter().enumerate() {
                let psi: Vec<f64> = (0..l.len())
                    .map(|h| {
                        let r = self.moments.risk[h];
                        let vhat = (l[h] - r) * (l[h] - r);
                        lambda * (r - l[h]) - 0.5 * lambda * lambda * (vhat + self.variance[h])
                    })
                    .collect();
                total += log_expect_exp(&trace.priors[i], &psi)?;
                if total > level + VIOLATION_TOLERANCE {
                    return Ok(Some(i + 1));
                }
            }
            return Ok(None);
        }

        // the learner's own posterior sequence
        let risks = trace.conditional_risk.as_ref().expect("stream carries its source");
        let bounds = trace.certificates_by_step(self.delta, lambda)?;
        let mut first: Option<usize> = None;
        let mut lhs = 0.0;
        for (i, b) in bounds.iter().enumerate() {
            lhs += risks[i];
            if lhs > b.value + VIOLATION_TOLERANCE {
                first = Some(i + 1);
                break;
            }
        }
        // constant sequences Q_i = Q against the learner's priors
        for q in self.registered(None)? {
            let mut steps = Vec::with_capacity(losses.len());
            let mut lhs = 0.0;
            for (i, l) in losses.iter().enumerate() {
                if first.is_some_and(|f| i + 1 >= f) {
                    break;
                }
                let vhat: Vec<f64> = l.iter().zip(&self.moments.risk).map(|(x, r)| (x - r) * (x - r)).collect();
                steps.push(OnlineStep {
                    loss_q: q.expect(l)?,
                    vhat_q: q.expect(&vhat)?,
                    v_q: q.expect(&self.variance)?,
                    kl: kl_divergence(&q, &trace.priors[i])?,
                });
                lhs += q.expect(&self.moments.risk)?;
                if lhs > online_bound(&steps, self.delta, lambda)?.value + VIOLATION_TOLERANCE {
                    first = Some(i + 1);
                    break;
                }
            }
        }
        Ok(first)
    }
}

/// Runs the configured coverage experiment.
pub fn run_coverage(config: &ExperimentConfig) -> std::result::Result<CoverageReport, HarnessError> {
    let setup = CoverageSetup::from_config(config)?;
    let results = run_trials(config.trials, config.seed, |_, rng| setup.trial(rng));
    let first = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(CoverageReport::from_first_violations(
        setup.target.name(),
        setup.posterior_set_name(),
        config.seed,
        config.horizon,
        config.delta,
        config.lambda,
        &first,
    ))
}
