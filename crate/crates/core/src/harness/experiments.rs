//! Supermartingale, tightness, bandit, online and batch experiments.

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, PriorRuleKind};
use super::coverage::CoverageReport;
use super::output::{fmt_real, parse_real, real, SPEC_VERSION};
use super::HarnessError;
use crate::bandit::{lemma5_ratio, lemma6_threshold, run_bandit_experiment, BanditEnv};
use crate::certificates::{
    baseline_catoni, baseline_hype, baseline_online_bounded, baseline_seldin, batch_bound, cor1_bound, cor2_bounds,
    cor3_bound, hype_exp_moment_log, martingale_bound, BoundCertificate, CertificateKind, Cor1Variance,
    EmpiricalMoments, MixedVariation, SeldinVariance,
};
use crate::distributions::StockDistribution;
use crate::error::Result;
use crate::learners::{
    anytime_batch_monitor, fit_batch_gibbs, run_online_gibbs, AnalyticMoments, BatchStats, DataModel, LossSpec,
    MonitorRow, PosteriorRule, Predictors, PriorRule,
};
use crate::measures::{kl_divergence, HypothesisSpace, PosteriorMeasure};
use crate::montecarlo::{run_trials, trial_rng, RNG_ALGORITHM};
use crate::processes::{supermartingale_mean_check, IncrementModel};

type Measure = PosteriorMeasure<f64>;
type Certificate = BoundCertificate<f64>;

/// JSON view of a certificate; reals may be non-finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub kind: CertificateKind,
    #[serde(with = "real")]
    pub value: f64,
    #[serde(with = "real")]
    pub empirical_term: f64,
    #[serde(with = "real")]
    pub kl_term: f64,
    #[serde(with = "real")]
    pub confidence_term: f64,
    #[serde(with = "real")]
    pub variance_term: f64,
    #[serde(with = "real")]
    pub lambda: f64,
    #[serde(with = "real")]
    pub delta: f64,
    pub m: usize,
    pub assumptions_hold: bool,
    pub certified: bool,
}

impl From<&Certificate> for CertificateRecord {
    fn from(c: &Certificate) -> Self {
        CertificateRecord {
            kind: c.kind,
            value: c.value,
            empirical_term: c.empirical_term,
            kl_term: c.kl_term,
            confidence_term: c.confidence_term,
            variance_term: c.variance_term,
            lambda: c.lambda,
            delta: c.delta,
            m: c.m,
            assumptions_hold: c.assumptions_hold,
            certified: c.certified,
        }
    }
}

// ---------------------------------------------------------------- supermartingale

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupermartingaleSummary {
    pub model: String,
    #[serde(with = "real")]
    pub eta: f64,
    /// `max_m (mean_m − 1) / stderr_m` (`-inf` when every stderr is zero and means ≤ 1).
    #[serde(with = "real")]
    pub max_excess_z: f64,
    /// Steps with `mean > 1 + 3 · stderr`.
    pub exceedances: Vec<usize>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupermartingaleReport {
    pub spec_version: String,
    pub rng_algorithm: String,
    pub seed: u64,
    pub trials: usize,
    pub horizon: usize,
    pub checks: Vec<SupermartingaleSummary>,
}

pub const SUPERMARTINGALE_HEADER: [&str; 7] =
    ["model", "eta", "m", "mean", "stderr", "increment_mean", "increment_stderr"];

pub fn run_supermartingale(
    config: &ExperimentConfig,
) -> std::result::Result<(SupermartingaleReport, Vec<Vec<String>>), HarnessError> {
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for model in &config.supermartingale.models {
        for &eta in &config.supermartingale.eta {
            let c = supermartingale_mean_check(
                model as &dyn IncrementModel,
                eta,
                config.horizon,
                config.trials,
                config.seed,
            )?;
            let name = model.description();
            for m in 0..config.horizon {
                rows.push(vec![
                    name.clone(),
                    fmt_real(eta),
                    (m + 1).to_string(),
                    fmt_real(c.mean_by_step[m]),
                    fmt_real(c.stderr_by_step[m]),
                    fmt_real(c.increment_mean_by_step[m]),
                    fmt_real(c.increment_stderr_by_step[m]),
                ]);
            }
            let max_excess_z = c
                .mean_by_step
                .iter()
                .zip(&c.stderr_by_step)
                .map(|(m, s)| {
                    if *s > 0.0 {
                        (m - 1.0) / s
                    } else if *m > 1.0 {
                        f64::INFINITY
                    } else {
                        f64::NEG_INFINITY
                    }
                })
                .fold(f64::NEG_INFINITY, f64::max);
            let exceedances = c.exceedances(3.0);
            checks.push(SupermartingaleSummary {
                model: name,
                eta,
                max_excess_z,
                pass: exceedances.is_empty(),
                exceedances,
            });
        }
    }
    let report = SupermartingaleReport {
        spec_version: SPEC_VERSION.to_string(),
        rng_algorithm: RNG_ALGORITHM.to_string(),
        seed: config.seed,
        trials: config.trials,
        horizon: config.horizon,
        checks,
    };
    Ok((report, rows))
}

// ---------------------------------------------------------------- tightness

/// One evaluated certificate on the shared bounded-loss statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct TightnessRow {
    pub m: usize,
    pub lambda: f64,
    pub certificate_kind: CertificateKind,
    pub variant: String,
    pub value: f64,
    pub validity_flag: bool,
    pub empirical_term: f64,
    pub kl_term: f64,
    pub confidence_term: f64,
    pub variance_term: f64,
    /// The certificate rescaled to a bound on `R(Q) − R_m(Q)`.
    pub gap_bound: f64,
    /// The realized `R(Q) − R_m(Q)` (exact risks).
    pub realized_gap: f64,
}

pub const TIGHTNESS_HEADER: [&str; 12] = [
    "m",
    "lambda",
    "certificate_kind",
    "variant",
    "value",
    "validity_flag",
    "empirical_term",
    "kl_term",
    "confidence_term",
    "variance_term",
    "gap_bound",
    "realized_gap",
];

impl TightnessRow {
    pub fn to_record(&self) -> Vec<String> {
        vec![
            self.m.to_string(),
            fmt_real(self.lambda),
            self.certificate_kind.name().to_string(),
            self.variant.clone(),
            fmt_real(self.value),
            self.validity_flag.to_string(),
            fmt_real(self.empirical_term),
            fmt_real(self.kl_term),
            fmt_real(self.confidence_term),
            fmt_real(self.variance_term),
            fmt_real(self.gap_bound),
            fmt_real(self.realized_gap),
        ]
    }

    pub fn from_record(r: &[String]) -> Option<Self> {
        if r.len() != TIGHTNESS_HEADER.len() {
            return None;
        }
        Some(TightnessRow {
            m: r[0].parse().ok()?,
            lambda: parse_real(&r[1])?,
            certificate_kind: CertificateKind::from_name(&r[2])?,
            variant: r[3].clone(),
            value: parse_real(&r[4])?,
            validity_flag: r[5].parse().ok()?,
            empirical_term: parse_real(&r[6])?,
            kl_term: parse_real(&r[7])?,
            confidence_term: parse_real(&r[8])?,
            variance_term: parse_real(&r[9])?,
            gap_bound: parse_real(&r[10])?,
            realized_gap: parse_real(&r[11])?,
        })
    }

    fn new(c: &Certificate, variant: &str, gap_bound: f64, realized_gap: f64) -> Self {
        TightnessRow {
            m: c.m,
            lambda: c.lambda,
            certificate_kind: c.kind,
            variant: variant.to_string(),
            value: c.value,
            validity_flag: c.assumptions_hold && c.certified,
            empirical_term: c.empirical_term,
            kl_term: c.kl_term,
            confidence_term: c.confidence_term,
            variance_term: c.variance_term,
            gap_bound,
            realized_gap,
        }
    }
}

/// Loss bound `K` of the tightness setting: absolute loss, data and predictors in `[0, 1]`.
pub const TIGHTNESS_K: f64 = 1.0;

/// Evaluates every certificate on one shared sample of uniform `[0, 1]` data
/// under absolute loss, for the Gibbs posterior at each `(m, λ)`.
pub fn run_tightness(config: &ExperimentConfig) -> std::result::Result<Vec<TightnessRow>, HarnessError> {
    let t = &config.tightness;
    let delta = config.delta;
    let predictors = Predictors::new(t.predictors.clone())?;
    let prior = PosteriorMeasure::uniform(predictors.space().clone())?;
    let dist = StockDistribution::Uniform { low: 0.0, high: 1.0 };
    let loss = LossSpec::Absolute;
    let moments = AnalyticMoments::compute(&dist, &loss, &predictors).expect("uniform absolute loss has closed forms");
    let variance = moments.variance();
    let k2 = TIGHTNESS_K * TIGHTNESS_K;

    let horizon = t.m_grid.iter().copied().max().unwrap_or(0);
    let mut rng = trial_rng(config.seed, 0);
    let data: Vec<f64> = (0..horizon).map(|_| dist.sample(&mut rng)).collect();

    let mut rows = Vec::new();
    for &m in &t.m_grid {
        let stats = BatchStats::from_data(&data[..m], &loss, &predictors)?;
        let mf = m as f64;
        // martingale sums M_m(h) = Σ (R(h) − ℓ(h, z_i)) and variations
        let mut bracket = vec![0.0; predictors.len()];
        for &z in &data[..m] {
            for (h, l) in predictors.losses(&loss, z)?.into_iter().enumerate() {
                bracket[h] += (moments.risk[h] - l) * (moments.risk[h] - l);
            }
        }
        let angle: Vec<f64> = variance.iter().map(|v| v * mf).collect();

        for &lambda in &t.lambda_grid {
            let q = stats.gibbs(&prior, lambda)?;
            let kl = kl_divergence(&q, &prior)?;
            let risk_q = q.expect(&moments.risk)?;
            let emp_q = q.expect(&stats.mean_loss())?;
            let realized = risk_q - emp_q;
            let (b_q, a_q) = (q.expect(&bracket)?, q.expect(&angle)?);

            let mart = martingale_bound(kl, delta, lambda, MixedVariation { m, bracket: b_q, angle: a_q })?;
            rows.push(TightnessRow::new(&mart, "empirical", mart.value / mf, realized));
            let c1 = cor1_bound(kl, m, delta, lambda, Cor1Variance::Empirical { bracket: b_q, angle: a_q })?;
            rows.push(TightnessRow::new(&c1, "empirical", c1.value / mf, realized));
            let c1b = cor1_bound(kl, m, delta, lambda, Cor1Variance::BoundedIncrements { c_squared_sum: mf * k2 })?;
            rows.push(TightnessRow::new(&c1b, "bounded_increments", c1b.value / mf, realized));
            let s = baseline_seldin(kl, m, delta, lambda, SeldinVariance::Variance(a_q), TIGHTNESS_K)?;
            rows.push(TightnessRow::new(&s, "variance", s.value / mf, realized));
            let sc = baseline_seldin(kl, m, delta, lambda, SeldinVariance::CBound(mf * k2), TIGHTNESS_K)?;
            rows.push(TightnessRow::new(&sc, "c_bound", sc.value / mf, realized));

            let c2 = cor2_bounds(kl, delta, lambda, m, TIGHTNESS_K)?;
            rows.push(TightnessRow::new(&c2.anytime, "", c2.anytime.value, realized));
            rows.push(TightnessRow::new(&c2.local, "", c2.local.value, realized));
            let cat = baseline_catoni(kl, delta, lambda, m, TIGHTNESS_K, emp_q)?;
            rows.push(TightnessRow::new(&cat, "", cat.value - emp_q, realized));

            let mom = EmpiricalMoments::new(emp_q, q.expect(&stats.mean_sq())?, q.expect(&moments.quad)?, m)?;
            let b = batch_bound(mom, kl, delta, lambda)?;
            rows.push(TightnessRow::new(&b, "", b.value - emp_q, realized));
            let ob = baseline_online_bounded(mf * emp_q, kl, delta, lambda, m, TIGHTNESS_K)?;
            rows.push(TightnessRow::new(&ob, "", (ob.value - mf * emp_q) / mf, realized));
        }

        // kinds that fix λ through α: the posterior is the Gibbs one at λ = m^{α−1}
        let alpha = t.alpha;
        let lambda_alpha = mf.powf(alpha - 1.0);
        let q = stats.gibbs(&prior, lambda_alpha)?;
        let kl = kl_divergence(&q, &prior)?;
        let emp_q = q.expect(&stats.mean_loss())?;
        let realized = q.expect(&moments.risk)? - emp_q;
        let mom = EmpiricalMoments::new(emp_q, q.expect(&stats.mean_sq())?, q.expect(&moments.quad)?, m)?;
        let envelope: Vec<f64> = predictors.values().iter().map(|&h| dist.abs_envelope(h)).collect();
        let k2_q = q.expect(&envelope.iter().map(|k| k * k).collect::<Vec<_>>())?;
        let c3 = cor3_bound(mom, kl, delta, alpha, k2_q)?;
        rows.push(TightnessRow::new(&c3, "", c3.value - emp_q, realized));
        let exp_moment = hype_exp_moment_log(&prior, &envelope, alpha, m)?;
        let hy = baseline_hype(kl, delta, alpha, m, exp_moment, emp_q)?;
        rows.push(TightnessRow::new(&hy, "", hy.value - emp_q, realized));
    }
    Ok(rows)
}

// ---------------------------------------------------------------- bandit

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BanditReport {
    pub spec_version: String,
    pub rng_algorithm: String,
    pub seed: u64,
    pub trials: usize,
    pub k: usize,
    pub m: usize,
    #[serde(with = "real")]
    pub delta: f64,
    #[serde(with = "real")]
    pub eps_m: f64,
    #[serde(with = "real::vec")]
    pub arm_means: Vec<f64>,
    #[serde(with = "real")]
    pub c: f64,
    pub best_arm: usize,
    pub certificate: CertificateRecord,
    /// Trials where `sup_Q |Δ(Q) − Δ̂_m(Q)|` exceeded the certificate.
    pub coverage_violations: usize,
    #[serde(with = "real")]
    pub coverage_freq: f64,
    #[serde(with = "real")]
    pub mean_sup_error: f64,
    #[serde(with = "real")]
    pub lemma5_max_ratio: f64,
    pub lemma5_pass: bool,
    #[serde(with = "real")]
    pub lemma6_threshold: f64,
    pub lemma6_violations: usize,
    #[serde(with = "real")]
    pub lemma6_freq: f64,
    /// `δ/2 + 3 sqrt((δ/2)/trials)`.
    #[serde(with = "real")]
    pub lemma6_limit: f64,
    pub lemma6_pass: bool,
}

struct BanditTrial {
    sup_error: f64,
    covered: bool,
    ratio: f64,
    max_vhat: f64,
}

pub fn run_bandit(config: &ExperimentConfig) -> std::result::Result<(CoverageReport, BanditReport), HarnessError> {
    let b = &config.bandit;
    let env = BanditEnv::new(b.arms.clone())?;
    let schedule = b.schedule();
    let k = env.k();
    let eps_m = schedule.eps(b.m, k);
    let space = HypothesisSpace::indexed(k)?;
    let mut q_list: Vec<Measure> = vec![PosteriorMeasure::uniform(space.clone())?];
    for a in 0..k {
        q_list.push(PosteriorMeasure::point_mass(space.clone(), a)?);
    }
    let delta = config.delta;
    let threshold = lemma6_threshold(&env, b.m, eps_m, delta);
    let results = run_trials(config.trials, config.seed, |_, rng| -> Result<BanditTrial> {
        let ex = run_bandit_experiment(&env, &schedule, b.m, delta, &q_list, rng)?;
        Ok(BanditTrial {
            sup_error: ex.sup_error,
            covered: ex.covered_all && ex.per_q.iter().all(|p| p.covered),
            ratio: lemma5_ratio(&ex.trace, &env, eps_m),
            max_vhat: ex.trace.vhat.iter().copied().fold(0.0, f64::max),
        })
    });
    let trials = results.into_iter().collect::<Result<Vec<_>>>()?;
    let certificate = crate::certificates::bandit_regret_bound(k, delta, b.m, eps_m)?;

    let first: Vec<Option<usize>> = trials.iter().map(|t| (!t.covered).then_some(b.m)).collect();
    let coverage = CoverageReport::from_first_violations(
        "bandit",
        "all_posteriors",
        config.seed,
        b.m,
        delta,
        certificate.lambda,
        &first,
    );
    let n = trials.len() as f64;
    let lemma5_max_ratio = trials.iter().map(|t| t.ratio).fold(0.0, f64::max);
    let lemma6_violations = trials.iter().filter(|t| t.max_vhat > threshold).count();
    let lemma6_freq = lemma6_violations as f64 / n;
    let lemma6_limit = delta / 2.0 + 3.0 * (delta / 2.0 / n).sqrt();
    let report = BanditReport {
        spec_version: SPEC_VERSION.to_string(),
        rng_algorithm: RNG_ALGORITHM.to_string(),
        seed: config.seed,
        trials: trials.len(),
        k,
        m: b.m,
        delta,
        eps_m,
        arm_means: env.means().to_vec(),
        c: env.c(),
        best_arm: env.best_arm(),
        certificate: CertificateRecord::from(&certificate),
        coverage_violations: coverage.violations_anytime,
        coverage_freq: coverage.violation_freq,
        mean_sup_error: trials.iter().map(|t| t.sup_error).sum::<f64>() / n,
        lemma5_max_ratio,
        lemma5_pass: lemma5_max_ratio <= 1.0 + 1e-9,
        lemma6_threshold: threshold,
        lemma6_violations,
        lemma6_freq,
        lemma6_limit,
        lemma6_pass: lemma6_freq <= lemma6_limit,
    };
    Ok((coverage, report))
}

// ---------------------------------------------------------------- online

pub const ONLINE_HEADER: [&str; 9] =
    ["step", "loss_q", "vhat_q", "v_q", "kl", "conditional_risk", "cumulative_risk", "certificate", "violated"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnlineReport {
    pub spec_version: String,
    pub rng_algorithm: String,
    pub seed: u64,
    pub horizon: usize,
    pub prior_rule: PriorRuleKind,
    #[serde(with = "real")]
    pub lambda: f64,
    #[serde(with = "real")]
    pub delta: f64,
    pub certificate: CertificateRecord,
    #[serde(with = "real")]
    pub cumulative_risk: f64,
    pub any_violation: bool,
    #[serde(with = "real::vec")]
    pub final_posterior: Vec<f64>,
}

pub fn run_online(config: &ExperimentConfig) -> std::result::Result<(OnlineReport, Vec<Vec<String>>), HarnessError> {
    let predictors = config.model.predictors()?;
    let prior = config.model.prior(&predictors)?;
    let loss = config.model.loss.spec();
    let mut rng = trial_rng(config.seed, 0);
    let stream = DataModel::sample_stream(config.model.data, config.horizon, &mut rng)?;
    let rule = match config.online.prior_rule {
        PriorRuleKind::Fixed => PriorRule::Fixed(prior),
        PriorRuleKind::PreviousPosterior => PriorRule::PreviousPosterior { initial: prior },
    };
    let trace = run_online_gibbs(&stream, &loss, &predictors, &rule, config.lambda, config.delta)?;
    let bounds = trace.certificates_by_step(config.delta, config.lambda)?;
    let mut rows = Vec::with_capacity(trace.len());
    let mut cumulative = 0.0;
    let mut any_violation = false;
    for (i, s) in trace.per_step.iter().enumerate() {
        let risk = trace.conditional_risk.as_ref().map_or(f64::NAN, |r| r[i]);
        cumulative += risk;
        let violated = cumulative > bounds[i].value + crate::learners::VIOLATION_TOLERANCE;
        any_violation |= violated;
        rows.push(vec![
            (i + 1).to_string(),
            fmt_real(s.loss_q),
            fmt_real(s.vhat_q),
            fmt_real(s.v_q),
            fmt_real(s.kl),
            fmt_real(risk),
            fmt_real(cumulative),
            fmt_real(bounds[i].value),
            violated.to_string(),
        ]);
    }
    let report = OnlineReport {
        spec_version: SPEC_VERSION.to_string(),
        rng_algorithm: RNG_ALGORITHM.to_string(),
        seed: config.seed,
        horizon: config.horizon,
        prior_rule: config.online.prior_rule,
        lambda: config.lambda,
        delta: config.delta,
        certificate: CertificateRecord::from(&trace.certificate),
        cumulative_risk: cumulative,
        any_violation,
        final_posterior: trace.posteriors.last().and_then(|q| q.weights()).map(<[f64]>::to_vec).unwrap_or_default(),
    };
    Ok((report, rows))
}

// ---------------------------------------------------------------- batch

pub const MONITOR_HEADER: [&str; 8] =
    ["m", "lhs", "certificate", "empirical_term", "kl_term", "confidence_term", "variance_term", "violated"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    pub spec_version: String,
    pub rng_algorithm: String,
    pub seed: u64,
    pub m: usize,
    #[serde(with = "real")]
    pub lambda: f64,
    #[serde(with = "real")]
    pub delta: f64,
    #[serde(with = "real::vec")]
    pub posterior: Vec<f64>,
    pub certificate: CertificateRecord,
    #[serde(with = "real")]
    pub objective: f64,
    /// `E_Q[R]` when closed forms exist.
    #[serde(with = "real")]
    pub risk_q: f64,
    pub monitor_violations: usize,
}

pub fn run_batch(config: &ExperimentConfig) -> std::result::Result<(BatchReport, Vec<Vec<String>>), HarnessError> {
    let predictors = config.model.predictors()?;
    let prior = config.model.prior(&predictors)?;
    let loss = config.model.loss.spec();
    let dist = config.model.data;
    let analytic = AnalyticMoments::compute(&dist, &loss, &predictors);

    // the monitor and the final fit see the same sample: same stream, same order
    let monitor: Vec<MonitorRow> = if analytic.is_some() {
        let mut rng = trial_rng(config.seed, 0);
        anytime_batch_monitor(
            &dist,
            &loss,
            &predictors,
            &prior,
            &PosteriorRule::GibbsBatch,
            config.lambda,
            config.delta,
            config.horizon,
            &mut rng,
        )?
    } else {
        Vec::new()
    };
    let mut rng = trial_rng(config.seed, 0);
    let data: Vec<f64> = (0..config.horizon).map(|_| dist.sample(&mut rng)).collect();
    let fit = fit_batch_gibbs(&data, &loss, &prior, &predictors, config.lambda, config.delta, analytic.as_ref())?;

    let rows = monitor
        .iter()
        .map(|r| {
            vec![
                r.m.to_string(),
                fmt_real(r.lhs),
                fmt_real(r.rhs.value),
                fmt_real(r.rhs.empirical_term),
                fmt_real(r.rhs.kl_term),
                fmt_real(r.rhs.confidence_term),
                fmt_real(r.rhs.variance_term),
                r.violated.to_string(),
            ]
        })
        .collect();
    let report = BatchReport {
        spec_version: SPEC_VERSION.to_string(),
        rng_algorithm: RNG_ALGORITHM.to_string(),
        seed: config.seed,
        m: config.horizon,
        lambda: config.lambda,
        delta: config.delta,
        posterior: fit.posterior.weights().map(<[f64]>::to_vec).unwrap_or_default(),
        certificate: CertificateRecord::from(&fit.certificate),
        objective: fit.objective,
        risk_q: match &analytic {
            Some(a) => fit.posterior.expect(&a.risk)?,
            None => f64::NAN,
        },
        monitor_violations: monitor.iter().filter(|r| r.violated).count(),
    };
    Ok((report, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        let mut c = ExperimentConfig { trials: 100, horizon: 20, delta: 0.1, ..Default::default() };
        c.tightness.m_grid = vec![5, 50];
        c.bandit.m = 200;
        c
    }

    #[test]
    fn tightness_relations_hold_row_by_row() {
        let rows = run_tightness(&small()).unwrap();
        let find = |m: usize, l: f64, kind: CertificateKind, variant: &str| {
            rows.iter()
                .find(|r| r.m == m && r.lambda == l && r.certificate_kind == kind && r.variant == variant)
                .unwrap()
                .clone()
        };
        for &m in &[5usize, 50] {
            for &l in &small().tightness.lambda_grid {
                let local = find(m, l, CertificateKind::Cor2Local, "");
                let cat = find(m, l, CertificateKind::CatoniBaseline, "");
                assert_rel!(local.kl_term, cat.kl_term, 1e-15);
                assert_rel!(local.confidence_term - cat.confidence_term, 2f64.ln() / l, 1e-12);
                assert_rel!(local.variance_term, 2.0 * cat.variance_term, 1e-15);
                let c1 = find(m, l, CertificateKind::Cor1, "bounded_increments");
                let s = find(m, l, CertificateKind::SeldinBaseline, "c_bound");
                assert_rel!(s.variance_term, (std::f64::consts::E - 2.0) * c1.variance_term, 1e-14);
                assert_eq!(s.confidence_term, c1.confidence_term);
            }
        }
    }

    #[test]
    fn tightness_rows_round_trip() {
        for r in run_tightness(&small()).unwrap() {
            assert_eq!(TightnessRow::from_record(&r.to_record()).unwrap(), r);
        }
    }

    #[test]
    fn bandit_reports_are_consistent() {
        let (cov, rep) = run_bandit(&small()).unwrap();
        assert_eq!(cov.violations_anytime, rep.coverage_violations);
        assert!(rep.lemma5_pass);
        assert_eq!(cov.first_violation_histogram.values().sum::<usize>(), cov.violations_anytime);
    }

    #[test]
    fn online_and_batch_run() {
        let (rep, rows) = run_online(&small()).unwrap();
        assert_eq!(rows.len(), 20);
        assert!(rep.certificate.certified);
        let (rep, rows) = run_batch(&small()).unwrap();
        assert_eq!(rows.len(), 20);
        assert_eq!(rep.posterior.len(), 3);
    }
}
