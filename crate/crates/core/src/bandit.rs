//! Off-policy estimation for a K-armed bandit with an exploration floor.
//!
//! At round `i` the player draws `A_i ~ π_i` with `min_a π_i(a) ≥ ε_i` and
//! observes `R_i = R_i(A_i)`. The importance-weighted samples
//! `R_i^a = R_i / π_i(a)` if `A_i = a` (else 0) give unbiased estimates
//! `R̂_m(a)` of the arm means and of the gaps `Δ(a) = R(a*) − R(a)`. The trace
//! also tracks, per arm, the martingale `m(Δ̂_m(a) − Δ(a))`, its quadratic
//! variation `V̂_m(a)` and its predictable variation `V_m(a)`; the latter is
//! computed in closed form from `π_i` and the arm moments.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::certificates::{bandit_regret_bound, BoundCertificate};
use crate::distributions::StockDistribution;
use crate::error::{Error, Result};
use crate::measures::PosteriorMeasure;
use crate::montecarlo::run_trials;

type Measure = PosteriorMeasure<f64>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BanditEnv {
    arms: Vec<StockDistribution>,
    means: Vec<f64>,
    second_moments: Vec<f64>,
    c: f64,
    best_arm: usize,
}

impl BanditEnv {
    pub fn new(arms: Vec<StockDistribution>) -> Result<Self> {
        if arms.len() < 2 {
            return Err(Error::domain("a bandit needs at least two arms"));
        }
        for a in &arms {
            a.validate()?;
        }
        let means: Vec<f64> = arms.iter().map(StockDistribution::mean).collect();
        let second_moments: Vec<f64> = arms.iter().map(StockDistribution::second_moment).collect();
        if second_moments.iter().any(|s| !s.is_finite()) {
            return Err(Error::domain("every arm needs a finite second moment"));
        }
        let c = second_moments.iter().copied().fold(0.0, f64::max);
        let mut best_arm = 0;
        for (a, &r) in means.iter().enumerate() {
            if r > means[best_arm] {
                best_arm = a;
            }
        }
        Ok(BanditEnv { arms, means, second_moments, c, best_arm })
    }

    pub fn k(&self) -> usize {
        self.arms.len()
    }

    pub fn arms(&self) -> &[StockDistribution] {
        &self.arms
    }

    /// `R(a)`.
    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn second_moments(&self) -> &[f64] {
        &self.second_moments
    }

    /// `max_a E[R(a)²]`.
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn best_arm(&self) -> usize {
        self.best_arm
    }

    /// `Δ(a) = R(a*) − R(a)`.
    pub fn gaps(&self) -> Vec<f64> {
        let best = self.means[self.best_arm];
        self.means.iter().map(|r| best - r).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BasePolicy {
    Uniform,
    /// `∝ exp(R̂_{i−1}(a) / temperature)`.
    SoftmaxOnEmpirical {
        temperature: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EpsSchedule {
    Constant {
        eps: f64,
    },
    /// `ε_i = min(1/K, i^{−1/3})`.
    CubeRootDecay,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolicySchedule {
    pub base: BasePolicy,
    pub eps: EpsSchedule,
}

impl PolicySchedule {
    pub fn validate(&self, k: usize) -> Result<()> {
        if let EpsSchedule::Constant { eps } = self.eps {
            if !(eps > 0.0 && eps * k as f64 <= 1.0 + 1e-12) {
                return Err(Error::domain(format!("constant eps must lie in (0, 1/K], got {eps} with K = {k}")));
            }
        }
        if let BasePolicy::SoftmaxOnEmpirical { temperature } = self.base {
            if !(temperature > 0.0 && temperature.is_finite()) {
                return Err(Error::domain("softmax temperature must be positive"));
            }
        }
        Ok(())
    }

    /// `ε_i` for the 1-based round `i`.
    pub fn eps(&self, i: usize, k: usize) -> f64 {
        match self.eps {
            EpsSchedule::Constant { eps } => eps,
            EpsSchedule::CubeRootDecay => (1.0 / k as f64).min((i.max(1) as f64).powf(-1.0 / 3.0)),
        }
    }

    /// `π_i = (1 − Kε_i) base + ε_i`, from the estimates before round `i`.
    pub fn policy(&self, i: usize, empirical_means: &[f64]) -> Vec<f64> {
        let k = empirical_means.len();
        let eps = self.eps(i, k);
        let base: Vec<f64> = match self.base {
            BasePolicy::Uniform => vec![1.0 / k as f64; k],
            BasePolicy::SoftmaxOnEmpirical { temperature } => {
                let max = empirical_means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let w: Vec<f64> = empirical_means.iter().map(|r| ((r - max) / temperature).exp()).collect();
                let s: f64 = w.iter().sum();
                w.into_iter().map(|x| x / s).collect()
            }
        };
        let mix = 1.0 - k as f64 * eps;
        base.into_iter().map(|b| mix * b + eps).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BanditRound {
    pub policy: Vec<f64>,
    pub action: usize,
    pub reward: f64,
}

impl BanditRound {
    /// `R_i^a` for every arm.
    pub fn importance_weighted(&self) -> Vec<f64> {
        (0..self.policy.len()).map(|a| if a == self.action { self.reward / self.policy[a] } else { 0.0 }).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BanditTrace {
    pub rounds: Vec<BanditRound>,
    /// `Σ_i R_i^a`.
    pub sum_iw: Vec<f64>,
    /// `V_m(a)`, analytic.
    pub v: Vec<f64>,
    /// `V̂_m(a)`.
    pub vhat: Vec<f64>,
    best_arm: usize,
}

impl BanditTrace {
    pub fn new(env: &BanditEnv) -> Self {
        let k = env.k();
        BanditTrace {
            rounds: Vec::new(),
            sum_iw: vec![0.0; k],
            v: vec![0.0; k],
            vhat: vec![0.0; k],
            best_arm: env.best_arm,
        }
    }

    pub fn m(&self) -> usize {
        self.rounds.len()
    }

    /// `R̂_m(a)`; zero before the first round.
    pub fn empirical_means(&self) -> Vec<f64> {
        let m = self.m().max(1) as f64;
        self.sum_iw.iter().map(|s| s / m).collect()
    }

    /// `Δ̂_m(a) = R̂_m(a*) − R̂_m(a)`.
    pub fn empirical_gaps(&self) -> Vec<f64> {
        let r = self.empirical_means();
        r.iter().map(|x| r[self.best_arm] - x).collect()
    }
}

fn sample_action<R: Rng + ?Sized>(policy: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (a, p) in policy.iter().enumerate() {
        acc += p;
        if u < acc {
            return a;
        }
    }
    policy.len() - 1
}

/// Plays one round and updates every running quantity.
pub fn play_round<R: Rng + ?Sized>(env: &BanditEnv, schedule: &PolicySchedule, trace: &mut BanditTrace, rng: &mut R) {
    let i = trace.m() + 1;
    let policy = schedule.policy(i, &trace.empirical_means());
    let action = sample_action(&policy, rng);
    let reward = env.arms[action].sample(rng);
    let round = BanditRound { policy, action, reward };
    let iw = round.importance_weighted();
    let gaps = env.gaps();
    let star = env.best_arm;
    let pi = &round.policy;
    let star_term = env.second_moments[star] / pi[star];
    for a in 0..env.k() {
        trace.sum_iw[a] += iw[a];
        let d = iw[star] - iw[a] - gaps[a];
        trace.vhat[a] += d * d;
        if a != star {
            // cross term vanishes: R^{a*} R^a = 0 since only one arm is played
            trace.v[a] += (star_term + env.second_moments[a] / pi[a] - gaps[a] * gaps[a]).max(0.0);
        }
    }
    trace.rounds.push(round);
}

pub fn run_rounds<R: Rng + ?Sized>(env: &BanditEnv, schedule: &PolicySchedule, m: usize, rng: &mut R) -> BanditTrace {
    let mut trace = BanditTrace::new(env);
    for _ in 0..m {
        play_round(env, schedule, &mut trace, rng);
    }
    trace
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegretStats {
    pub delta_q: f64,
    pub delta_hat_q: f64,
    pub v_q: f64,
    pub vhat_q: f64,
}

pub fn regret_stats(trace: &BanditTrace, env: &BanditEnv, q: &Measure) -> Result<RegretStats> {
    if q.support().size() != env.k() {
        return Err(Error::domain("posterior must live on the arms"));
    }
    Ok(RegretStats {
        delta_q: q.expect(&env.gaps())?,
        delta_hat_q: q.expect(&trace.empirical_gaps())?,
        v_q: q.expect(&trace.v)?,
        vhat_q: q.expect(&trace.vhat)?,
    })
}

/// `max_a V_m(a) / (2 C m / ε_m)`; zero for an empty trace.
pub fn lemma5_ratio(trace: &BanditTrace, env: &BanditEnv, eps_m: f64) -> f64 {
    let m = trace.m();
    let vmax = trace.v.iter().copied().fold(0.0, f64::max);
    if m == 0 || vmax == 0.0 {
        return 0.0;
    }
    vmax / (2.0 * env.c * m as f64 / eps_m)
}

/// `4 C K m / (ε_m δ)`.
pub fn lemma6_threshold(env: &BanditEnv, m: usize, eps_m: f64, delta: f64) -> f64 {
    4.0 * env.c * env.k() as f64 * m as f64 / (eps_m * delta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma6Check {
    pub trials: usize,
    pub violations: usize,
    pub violation_freq: f64,
    pub threshold: f64,
}

/// Frequency over independent traces of `max_a V̂_m(a) > threshold_scale · 4CKm/(ε_m δ)`.
pub fn lemma6_check(
    env: &BanditEnv,
    schedule: &PolicySchedule,
    m: usize,
    delta: f64,
    trials: usize,
    seed: u64,
    threshold_scale: f64,
) -> Result<Lemma6Check> {
    schedule.validate(env.k())?;
    if trials == 0 || m == 0 {
        return Err(Error::domain("lemma 6 check needs m >= 1 and trials >= 1"));
    }
    let threshold = threshold_scale * lemma6_threshold(env, m, schedule.eps(m, env.k()), delta);
    let hits = run_trials(trials, seed, |_, rng| {
        let trace = run_rounds(env, schedule, m, rng);
        trace.vhat.iter().copied().fold(0.0, f64::max) > threshold
    });
    let violations = hits.iter().filter(|h| **h).count();
    Ok(Lemma6Check { trials, violations, violation_freq: violations as f64 / trials as f64, threshold })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PosteriorCoverage {
    pub delta_q: f64,
    pub delta_hat_q: f64,
    pub covered: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BanditExperiment {
    pub trace: BanditTrace,
    pub certificate: BoundCertificate<f64>,
    pub per_q: Vec<PosteriorCoverage>,
    /// `sup_Q |Δ(Q) − Δ̂_m(Q)| = max_a |Δ(a) − Δ̂_m(a)|`, attained at a point mass.
    pub sup_error: f64,
    pub covered_all: bool,
}

/// Plays `m` rounds and checks the single-time certificate for each posterior
/// in `q_list` and for the supremum over all posteriors.
pub fn run_bandit_experiment<R: Rng + ?Sized>(
    env: &BanditEnv,
    schedule: &PolicySchedule,
    m: usize,
    delta: f64,
    q_list: &[Measure],
    rng: &mut R,
) -> Result<BanditExperiment> {
    schedule.validate(env.k())?;
    let certificate = bandit_regret_bound(env.k(), delta, m, schedule.eps(m, env.k()))?;
    let trace = run_rounds(env, schedule, m, rng);
    let per_q = q_list
        .iter()
        .map(|q| {
            let s = regret_stats(&trace, env, q)?;
            Ok(PosteriorCoverage {
                delta_q: s.delta_q,
                delta_hat_q: s.delta_hat_q,
                covered: (s.delta_q - s.delta_hat_q).abs() <= certificate.value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let sup_error = env.gaps().iter().zip(trace.empirical_gaps()).map(|(d, dh)| (d - dh).abs()).fold(0.0, f64::max);
    let covered_all = sup_error <= certificate.value;
    Ok(BanditExperiment { trace, certificate, per_q, sup_error, covered_all })
}
