//! Gibbs learners over finite sets of real-valued predictors.
//!
//! The batch learner minimizes
//! `E_Q[(1/m) Σ (ℓ + λ/2 ℓ²)] + KL(Q, P)/(λm)` and the online learner, at
//! each round, `E_Q[ℓ(h, z_i) + λ/2 ℓ(h, z_i)²] + KL(Q, P_i)/λ` against a
//! prior built from the strictly earlier observations. Both minimizers are
//! Gibbs posteriors. Each learner emits the matching certificate; the
//! theoretical second-order terms come from closed-form moments of the data
//! family when those exist and are otherwise replaced by plug-in estimates,
//! in which case the certificate is marked as not certified.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::certificates::{batch_bound, online_bound, BoundCertificate, EmpiricalMoments, OnlineStep};
use crate::distributions::StockDistribution;
use crate::error::{Error, Result};
use crate::measures::{gibbs_posterior, kl_divergence, HypothesisSpace, PosteriorMeasure, ScoreFunction};

type Measure = PosteriorMeasure<f64>;
type Certificate = BoundCertificate<f64>;

/// A rule that sees only the observations so far.
pub type PrefixRule = Arc<dyn Fn(&[f64]) -> Result<Measure> + Send + Sync>;

/// Loss `ℓ(h, z) ≥ 0` for a real predictor `h` and observation `z`.
#[derive(Clone)]
pub enum LossSpec {
    /// `(h − z)²`.
    Quadratic,
    /// `|h − z|`.
    Absolute,
    Custom {
        name: String,
        f: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    },
}

impl fmt::Debug for LossSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl LossSpec {
    pub fn custom(name: impl Into<String>, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        LossSpec::Custom { name: name.into(), f: Arc::new(f) }
    }

    pub fn name(&self) -> &str {
        match self {
            LossSpec::Quadratic => "quadratic",
            LossSpec::Absolute => "absolute",
            LossSpec::Custom { name, .. } => name,
        }
    }

    pub fn eval(&self, h: f64, z: f64) -> Result<f64> {
        let l = match self {
            LossSpec::Quadratic => (h - z) * (h - z),
            LossSpec::Absolute => (h - z).abs(),
            LossSpec::Custom { f, .. } => f(h, z),
        };
        if l >= 0.0 {
            Ok(l)
        } else {
            Err(Error::domain(format!("loss {} returned {l} at h={h}, z={z}", self.name())))
        }
    }
}

/// A finite hypothesis space whose elements are real constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Predictors {
    space: HypothesisSpace,
    values: Vec<f64>,
}

impl Predictors {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("predictor values must be finite"));
        }
        let space = HypothesisSpace::finite(values.iter().map(|v| format!("{v}")))?;
        Ok(Predictors { space, values })
    }

    pub fn space(&self) -> &HypothesisSpace {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `ℓ(h, z)` for every hypothesis.
    pub fn losses(&self, loss: &LossSpec, z: f64) -> Result<Vec<f64>> {
        self.values.iter().map(|&h| loss.eval(h, z)).collect()
    }

    fn check_measure(&self, q: &Measure) -> Result<()> {
        if !q.support().same_as(&self.space) {
            return Err(Error::domain("measure does not live on the predictor space"));
        }
        Ok(())
    }
}

/// Exact risk `R(h) = E ℓ(h, z)` and `Quad(h) = E ℓ(h, z)²` per hypothesis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticMoments {
    pub risk: Vec<f64>,
    pub quad: Vec<f64>,
}

impl AnalyticMoments {
    /// Closed forms for the stock losses; `None` for custom losses or families without one.
    pub fn compute(dist: &StockDistribution, loss: &LossSpec, predictors: &Predictors) -> Option<Self> {
        let m: Vec<f64> = (1..=4).map(|k| dist.raw_moment(k)).collect();
        let mut risk = Vec::with_capacity(predictors.len());
        let mut quad = Vec::with_capacity(predictors.len());
        for &h in predictors.values() {
            let second = h * h - 2.0 * h * m[0] + m[1];
            match loss {
                LossSpec::Quadratic => {
                    risk.push(second);
                    quad.push(if m[2].is_infinite() || m[3].is_infinite() {
                        f64::INFINITY
                    } else {
                        let v = h.powi(4) - 4.0 * h.powi(3) * m[0] + 6.0 * h * h * m[1] - 4.0 * h * m[2] + m[3];
                        v.max(0.0)
                    });
                }
                LossSpec::Absolute => {
                    risk.push(dist.mean_abs_deviation_from(h)?);
                    quad.push(second);
                }
                LossSpec::Custom { .. } => return None,
            }
        }
        Some(AnalyticMoments { risk, quad })
    }

    /// Conditional variance `Quad(h) − R(h)²` (`+inf` when `Quad` is).
    pub fn variance(&self) -> Vec<f64> {
        self.risk
            .iter()
            .zip(&self.quad)
            .map(|(&r, &q)| if q.is_infinite() { f64::INFINITY } else { (q - r * r).max(0.0) })
            .collect()
    }

    /// Index of the risk minimizer, ties to the lowest index.
    pub fn best_index(&self) -> usize {
        let mut best = 0;
        for (i, &r) in self.risk.iter().enumerate() {
            if r < self.risk[best] {
                best = i;
            }
        }
        best
    }
}

/// Where observations come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DataModel {
    Iid(StockDistribution),
    /// An explicit sequence; `source` records the family it was drawn from, if any.
    Stream {
        values: Vec<f64>,
        source: Option<StockDistribution>,
    },
}

impl DataModel {
    pub fn sample_stream<R: Rng + ?Sized>(dist: StockDistribution, n: usize, rng: &mut R) -> Result<Self> {
        dist.validate()?;
        let values = (0..n).map(|_| dist.sample(rng)).collect();
        Ok(DataModel::Stream { values, source: Some(dist) })
    }

    pub fn source(&self) -> Option<&StockDistribution> {
        match self {
            DataModel::Iid(d) => Some(d),
            DataModel::Stream { source, .. } => source.as_ref(),
        }
    }

    pub fn analytic_moments(&self, loss: &LossSpec, predictors: &Predictors) -> Option<AnalyticMoments> {
        self.source().and_then(|d| AnalyticMoments::compute(d, loss, predictors))
    }
}

/// Running per-hypothesis sums of `ℓ` and `ℓ²` over a growing sample.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchStats {
    pub m: usize,
    pub sum_loss: Vec<f64>,
    pub sum_sq: Vec<f64>,
}

impl BatchStats {
    pub fn new(size: usize) -> Self {
        BatchStats { m: 0, sum_loss: vec![0.0; size], sum_sq: vec![0.0; size] }
    }

    pub fn from_data(data: &[f64], loss: &LossSpec, predictors: &Predictors) -> Result<Self> {
        let mut s = Self::new(predictors.len());
        for &z in data {
            s.push(&predictors.losses(loss, z)?);
        }
        Ok(s)
    }

    pub fn push(&mut self, losses: &[f64]) {
        debug_assert_eq!(losses.len(), self.sum_loss.len());
        self.m += 1;
        for (i, &l) in losses.iter().enumerate() {
            self.sum_loss[i] += l;
            self.sum_sq[i] += l * l;
        }
    }

    /// Empirical risk `R_m(h)`.
    pub fn mean_loss(&self) -> Vec<f64> {
        let m = self.m as f64;
        self.sum_loss.iter().map(|s| s / m).collect()
    }

    pub fn mean_sq(&self) -> Vec<f64> {
        let m = self.m as f64;
        self.sum_sq.iter().map(|s| s / m).collect()
    }

    /// `(1/m) Σ (ℓ + λ/2 ℓ²)` per hypothesis.
    pub fn score(&self, lambda: f64) -> Vec<f64> {
        let m = self.m as f64;
        self.sum_loss.iter().zip(&self.sum_sq).map(|(l, s)| (l + 0.5 * lambda * s) / m).collect()
    }

    /// Batch Gibbs posterior for the current sample.
    pub fn gibbs(&self, prior: &Measure, lambda: f64) -> Result<Measure> {
        if self.m == 0 {
            return Err(Error::domain("batch learner needs m >= 1"));
        }
        check_lambda(lambda)?;
        gibbs_posterior(prior, &ScoreFunction::table(self.score(lambda)), lambda * self.m as f64)
    }

    /// The batch certificate for posterior `q`, plus whether it is certified.
    pub fn certificate(
        &self,
        q: &Measure,
        prior: &Measure,
        lambda: f64,
        delta: f64,
        analytic: Option<&AnalyticMoments>,
    ) -> Result<Certificate> {
        let mean_loss = q.expect(&self.mean_loss())?;
        let mean_sq = q.expect(&self.mean_sq())?;
        let quad = match analytic {
            Some(a) => q.expect(&a.quad)?,
            None => mean_sq,
        };
        let moments = EmpiricalMoments::new(mean_loss, mean_sq, quad, self.m)?;
        Ok(batch_bound(moments, kl_divergence(q, prior)?, delta, lambda)?.with_certified(analytic.is_some()))
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("lambda must be positive and finite, got {lambda}")))
    }
}

fn require_finite_space(prior: &Measure) -> Result<()> {
    if prior.support().is_finite() {
        Ok(())
    } else {
        Err(Error::unsupported("learners optimize over finite hypothesis spaces only"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchFit {
    pub posterior: Measure,
    pub certificate: Certificate,
    /// `E_Q[score] + KL(Q, P)/(λm)` at the returned posterior.
    pub objective: f64,
}

/// Batch Gibbs learner with its certificate.
///
/// `analytic` supplies the exact `Quad(h)`; without it the certificate uses
/// the empirical second moment and is flagged as not certified.
pub fn fit_batch_gibbs(
    data: &[f64],
    loss: &LossSpec,
    prior: &Measure,
    predictors: &Predictors,
    lambda: f64,
    delta: f64,
    analytic: Option<&AnalyticMoments>,
) -> Result<BatchFit> {
    require_finite_space(prior)?;
    predictors.check_measure(prior)?;
    let stats = BatchStats::from_data(data, loss, predictors)?;
    let posterior = stats.gibbs(prior, lambda)?;
    let certificate = stats.certificate(&posterior, prior, lambda, delta, analytic)?;
    let objective =
        posterior.expect(&stats.score(lambda))? + kl_divergence(&posterior, prior)? / (lambda * stats.m as f64);
    Ok(BatchFit { posterior, certificate, objective })
}

/// How the online learner builds `P_i` from `z_1..z_{i−1}`.
#[derive(Clone)]
pub enum PriorRule {
    Fixed(Measure),
    /// `P_1 = initial`, then `P_i = Q̂_i`, the posterior produced at the previous round.
    PreviousPosterior {
        initial: Measure,
    },
    /// Receives only the prefix `z_1..z_{i−1}`.
    Custom(PrefixRule),
}

impl fmt::Debug for PriorRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PriorRule::Fixed(p) => write!(f, "Fixed({p})"),
            PriorRule::PreviousPosterior { initial } => write!(f, "PreviousPosterior({initial})"),
            PriorRule::Custom(_) => f.write_str("Custom(<fn>)"),
        }
    }
}

/// Everything the online learner did, round by round.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LearnerTrace {
    /// `P_1..P_m`.
    pub priors: Vec<Measure>,
    /// `Q̂_2..Q̂_{m+1}`; entry `i` is the posterior paired with round `i`.
    pub posteriors: Vec<Measure>,
    pub per_step: Vec<OnlineStep<f64>>,
    /// `E_{Q̂_{i+1}}[E_{i−1} ℓ(h, z_i)]` when exact conditional risks are known.
    pub conditional_risk: Option<Vec<f64>>,
    pub certificate: Certificate,
}

impl LearnerTrace {
    pub fn len(&self) -> usize {
        self.per_step.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_step.is_empty()
    }

    /// The online certificate on every prefix `1..=m`.
    pub fn certificates_by_step(&self, delta: f64, lambda: f64) -> Result<Vec<Certificate>> {
        (1..=self.per_step.len())
            .map(|m| {
                online_bound(&self.per_step[..m], delta, lambda).map(|c| c.with_certified(self.certificate.certified))
            })
            .collect()
    }
}

/// Sequential Gibbs learner over an explicit stream.
///
/// Conditional risks and variances are exact when the stream records a stock
/// source with closed-form moments; otherwise they are estimated from the
/// prefix (mean and sample variance of past losses) and the certificate is
/// flagged as not certified.
pub fn run_online_gibbs(
    stream: &DataModel,
    loss: &LossSpec,
    predictors: &Predictors,
    prior_rule: &PriorRule,
    lambda: f64,
    delta: f64,
) -> Result<LearnerTrace> {
    let values = match stream {
        DataModel::Stream { values, .. } => values,
        DataModel::Iid(_) => return Err(Error::domain("online learner needs an explicit stream; sample one first")),
    };
    if values.is_empty() {
        return Err(Error::domain("online learner needs a nonempty stream"));
    }
    check_lambda(lambda)?;
    let analytic = stream.analytic_moments(loss, predictors);
    let variance = analytic.as_ref().map(AnalyticMoments::variance);
    let k = predictors.len();
    let mut past = BatchStats::new(k);
    let mut priors = Vec::with_capacity(values.len());
    let mut posteriors: Vec<Measure> = Vec::with_capacity(values.len());
    let mut per_step = Vec::with_capacity(values.len());
    let mut conditional_risk = analytic.as_ref().map(|_| Vec::with_capacity(values.len()));

    for (i, &z) in values.iter().enumerate() {
        let prior = match prior_rule {
            PriorRule::Fixed(p) => p.clone(),
            PriorRule::PreviousPosterior { initial } => posteriors.last().unwrap_or(initial).clone(),
            PriorRule::Custom(f) => f(&values[..i])?,
        };
        require_finite_space(&prior)?;
        predictors.check_measure(&prior)?;

        let losses = predictors.losses(loss, z)?;
        let score: Vec<f64> = losses.iter().map(|&l| l + 0.5 * lambda * l * l).collect();
        let q = gibbs_posterior(&prior, &ScoreFunction::table(score), lambda)?;

        let (expected, cond_var) = match (&analytic, &variance) {
            (Some(a), Some(v)) => (a.risk.clone(), v.clone()),
            _ => plug_in_moments(&past),
        };
        let vhat: Vec<f64> = losses.iter().zip(&expected).map(|(l, e)| (l - e) * (l - e)).collect();
        per_step.push(OnlineStep {
            loss_q: q.expect(&losses)?,
            vhat_q: q.expect(&vhat)?,
            v_q: q.expect(&cond_var)?,
            kl: kl_divergence(&q, &prior)?,
        });
        if let (Some(risks), Some(a)) = (conditional_risk.as_mut(), &analytic) {
            risks.push(q.expect(&a.risk)?);
        }
        past.push(&losses);
        priors.push(prior);
        posteriors.push(q);
    }

    let certificate = online_bound(&per_step, delta, lambda)?.with_certified(analytic.is_some());
    Ok(LearnerTrace { priors, posteriors, per_step, conditional_risk, certificate })
}

/// Prefix mean and sample variance of past losses (zero before enough data).
fn plug_in_moments(past: &BatchStats) -> (Vec<f64>, Vec<f64>) {
    if past.m == 0 {
        let z = vec![0.0; past.sum_loss.len()];
        return (z.clone(), z);
    }
    let n = past.m as f64;
    let mean = past.mean_loss();
    let var = past
        .sum_sq
        .iter()
        .zip(&mean)
        .map(|(s, mu)| if past.m < 2 { 0.0 } else { ((s - n * mu * mu) / (n - 1.0)).max(0.0) })
        .collect();
    (mean, var)
}

/// Which posterior the anytime monitor evaluates at each `m`.
#[derive(Clone)]
pub enum PosteriorRule {
    Prior,
    Fixed(Measure),
    /// The batch Gibbs posterior on the current prefix.
    GibbsBatch,
    Custom(PrefixRule),
}

impl fmt::Debug for PosteriorRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PosteriorRule::Prior => f.write_str("Prior"),
            PosteriorRule::Fixed(q) => write!(f, "Fixed({q})"),
            PosteriorRule::GibbsBatch => f.write_str("GibbsBatch"),
            PosteriorRule::Custom(_) => f.write_str("Custom(<fn>)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonitorRow {
    pub m: usize,
    /// `E_Q[R]`, exact.
    pub lhs: f64,
    pub rhs: Certificate,
    pub violated: bool,
}

/// Tolerance used when adjudicating `lhs > rhs`.
pub const VIOLATION_TOLERANCE: f64 = 1e-9;

/// Samples `horizon` iid points and evaluates both sides of the batch bound at every `m`.
#[allow(clippy::too_many_arguments)]
pub fn anytime_batch_monitor<R: Rng + ?Sized>(
    dist: &StockDistribution,
    loss: &LossSpec,
    predictors: &Predictors,
    prior: &Measure,
    rule: &PosteriorRule,
    lambda: f64,
    delta: f64,
    horizon: usize,
    rng: &mut R,
) -> Result<Vec<MonitorRow>> {
    dist.validate()?;
    require_finite_space(prior)?;
    predictors.check_measure(prior)?;
    let analytic = AnalyticMoments::compute(dist, loss, predictors)
        .ok_or_else(|| Error::unsupported("the anytime monitor needs closed-form risks for this loss and family"))?;
    let mut stats = BatchStats::new(predictors.len());
    let mut prefix = Vec::with_capacity(horizon);
    let mut rows = Vec::with_capacity(horizon);
    for m in 1..=horizon {
        let z = dist.sample(rng);
        prefix.push(z);
        stats.push(&predictors.losses(loss, z)?);
        let q = match rule {
            PosteriorRule::Prior => prior.clone(),
            PosteriorRule::Fixed(q) => q.clone(),
            PosteriorRule::GibbsBatch => stats.gibbs(prior, lambda)?,
            PosteriorRule::Custom(f) => f(&prefix)?,
        };
        predictors.check_measure(&q)?;
        let lhs = q.expect(&analytic.risk)?;
        let rhs = stats.certificate(&q, prior, lambda, delta, Some(&analytic))?;
        rows.push(MonitorRow { m, lhs, violated: lhs > rhs.value + VIOLATION_TOLERANCE, rhs });
    }
    Ok(rows)
}
