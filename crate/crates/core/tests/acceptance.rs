//! Acceptance suite: one PASS/FAIL line per criterion, with its runtime budget.
//!
//! Runs without the libtest harness so the lines are always printed; the
//! process exits non-zero if any criterion fails.

use std::path::Path;
use std::time::{Duration, Instant};

use pacmart::bandit::{BasePolicy, EpsSchedule};
use pacmart::certificates::*;
use pacmart::distributions::StockDistribution;
use pacmart::harness::config::{CoverageTarget, ExperimentConfig, LossKind, PosteriorSetMode, PriorRuleKind};
use pacmart::harness::experiments::{run_bandit, run_tightness};
use pacmart::harness::run_coverage;
use pacmart::learners::{fit_batch_gibbs, run_online_gibbs, DataModel, LossSpec, Predictors, PriorRule};
use pacmart::measures::{
    change_of_measure_gap, gibbs_posterior, kl_divergence, HypothesisSpace, PosteriorMeasure, ScoreFunction,
};
use pacmart::processes::{bercu_touati_log_value, supermartingale_mean_check, StockIncrements, VariationLedger};
use pacmart::CertificateKind;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Measure = PosteriorMeasure<f64>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn binomial_limit(delta: f64, trials: usize) -> f64 {
    delta + 3.0 * (delta * (1.0 - delta) / trials as f64).sqrt()
}

fn random_weights(rng: &mut ChaCha8Rng, n: usize, allow_zeros: bool) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n)
        .map(|_| if allow_zeros && rng.random::<f64>() < 0.2 { 0.0 } else { -rng.random::<f64>().max(1e-300).ln() })
        .collect();
    if w.iter().all(|x| *x == 0.0) {
        w[0] = 1.0;
    }
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

// 1. Change of measure on random finite instances.
fn change_of_measure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = f64::INFINITY;
    for _ in 0..1000 {
        let n = rng.random_range(1..=16);
        let space = HypothesisSpace::indexed(n).unwrap();
        let q = Measure::categorical(space.clone(), random_weights(&mut rng, n, true)).unwrap();
        let p = Measure::categorical(space, random_weights(&mut rng, n, true)).unwrap();
        let psi: Vec<f64> = (0..n).map(|_| rng.random_range(-20.0..=20.0)).collect();
        let g = change_of_measure_gap(&ScoreFunction::table(psi), &q, &p).unwrap();
        worst = worst.min(g.slack);
    }
    outcome(worst >= -1e-9, format!("1000 instances, min slack {worst:.3e}"))
}

// 2. Mean of V_m(η) stays below 1 + 3 stderr.
fn supermartingale() -> Outcome {
    let models = [
        StockIncrements::Rademacher { scale: 1.0 },
        StockIncrements::CenteredLogNormal { mu: 0.0, sigma: 1.0 },
        StockIncrements::CenteredPareto { scale: 1.0, shape: 3.0 },
    ];
    let mut failures = Vec::new();
    let mut checks = 0;
    for (i, model) in models.iter().enumerate() {
        for eta in [0.05, 0.1, 0.5] {
            let c = supermartingale_mean_check(model, eta, 50, 10_000, 100 + i as u64).unwrap();
            checks += 1;
            let bad = c.exceedances(3.0);
            if !bad.is_empty() {
                failures.push(format!("{model:?} eta={eta} steps {bad:?}"));
            }
        }
    }
    outcome(failures.is_empty(), format!("{checks} model/eta pairs, 50 steps, 10000 trials; failures: {failures:?}"))
}

#[allow(clippy::too_many_arguments)]
fn coverage_config(
    target: CoverageTarget,
    data: StockDistribution,
    loss: LossKind,
    lambda: f64,
    delta: f64,
    horizon: usize,
    trials: usize,
    seed: u64,
) -> ExperimentConfig {
    let mut c = ExperimentConfig { seed, trials, horizon, delta, lambda, ..Default::default() };
    c.model.predictors = vec![0.5, 1.5, 2.5];
    c.model.data = data;
    c.model.loss = loss;
    c.coverage.target = target;
    c.coverage.posterior_set = PosteriorSetMode::Auto;
    c
}

// 3. Ville's inequality for the prior mixture of exponential supermartingales.
fn ville_direct() -> Outcome {
    let data = StockDistribution::LogNormal { mu: 0.0, sigma: 0.5 };
    let mut ok = true;
    let mut parts = Vec::new();
    for delta in [0.1, 0.2] {
        let c = coverage_config(CoverageTarget::VilleDirect, data, LossKind::Quadratic, 0.5, delta, 200, 5000, 3);
        let r = run_coverage(&c).unwrap();
        let limit = binomial_limit(delta, 5000);
        ok &= r.violation_freq <= limit;
        parts.push(format!("delta={delta}: freq {:.4} <= {limit:.4}", r.violation_freq));
    }
    outcome(ok, parts.join("; "))
}

// 4. Anytime coverage of the batch bound under heavy tails.
fn batch_coverage() -> Outcome {
    let lognormal = StockDistribution::LogNormal { mu: 0.0, sigma: 1.0 };
    let pareto = StockDistribution::Pareto { scale: 1.0, shape: 3.0 };
    let mut ok = true;
    let mut parts = Vec::new();
    let limit = 0.2 + 0.017;
    let cases = [
        ("lognormal/quadratic", lognormal, LossKind::Quadratic),
        ("pareto3/quadratic", pareto, LossKind::Quadratic),
        ("pareto3/absolute", pareto, LossKind::Absolute),
    ];
    for (name, data, loss) in cases {
        for lambda in [0.1, 0.3] {
            for mode in [PosteriorSetMode::Exact, PosteriorSetMode::Registered] {
                let mut c = coverage_config(CoverageTarget::Batch, data, loss, lambda, 0.2, 200, 5000, 4);
                c.coverage.posterior_set = mode;
                let r = run_coverage(&c).unwrap();
                ok &= r.violation_freq <= limit;
                parts.push(format!("{name} l={lambda} {}: {:.4}", r.posterior_set, r.violation_freq));
            }
        }
    }
    outcome(ok, format!("limit {limit}; {}", parts.join(", ")))
}

// 5. Anytime coverage of the online bound with the previous-posterior prior.
fn online_coverage() -> Outcome {
    let data = StockDistribution::LogNormal { mu: 0.0, sigma: 0.75 };
    let mut ok = true;
    let mut parts = Vec::new();
    let limit = binomial_limit(0.2, 2000);
    for mode in [PosteriorSetMode::Exact, PosteriorSetMode::Registered] {
        let mut c = coverage_config(CoverageTarget::Online, data, LossKind::Quadratic, 0.3, 0.2, 100, 2000, 5);
        c.online.prior_rule = PriorRuleKind::PreviousPosterior;
        c.coverage.posterior_set = mode;
        let r = run_coverage(&c).unwrap();
        ok &= r.violation_freq <= limit;
        parts.push(format!("{}: {:.4}", r.posterior_set, r.violation_freq));
    }
    outcome(ok, format!("limit {limit:.4}; {}", parts.join(", ")))
}

// 6. Bandit certificate and the two variance lemmas.
fn bandit() -> Outcome {
    let mut c = ExperimentConfig { seed: 6, trials: 1000, delta: 0.2, ..Default::default() };
    c.bandit.arms = vec![
        StockDistribution::LogNormal { mu: -1.0, sigma: 0.75 },
        StockDistribution::LogNormal { mu: -1.2, sigma: 0.75 },
    ];
    c.bandit.base = BasePolicy::Uniform;
    c.bandit.eps = EpsSchedule::Constant { eps: 0.05 };
    c.bandit.m = 2000;
    let (cov, rep) = run_bandit(&c).unwrap();
    let a = cov.violation_freq <= binomial_limit(0.2, 1000);
    let b = rep.lemma5_pass;
    let lemma6 = rep.lemma6_freq <= rep.lemma6_limit;
    outcome(
        a && b && lemma6,
        format!(
            "C = {:.4}; (a) uncovered {:.4} (bound {:.4}, mean sup error {:.4}); (b) max Lemma-5 ratio {:.6}; (c) Lemma-6 freq {:.4} <= {:.4}",
            rep.c, cov.violation_freq, rep.certificate.value, rep.mean_sup_error, rep.lemma5_max_ratio, rep.lemma6_freq, rep.lemma6_limit
        ),
    )
}

/// All points of the simplex on a grid of step `1/steps`.
fn simplex_grid(k: usize, steps: usize) -> Vec<Vec<f64>> {
    fn rec(k: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for i in 0..=left {
            cur.push(i);
            rec(k - 1, left - i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, steps, &mut Vec::new(), &mut out);
    out.into_iter().map(|v| v.into_iter().map(|i| i as f64 / steps as f64).collect()).collect()
}

/// `E_q[score] + KL(q, p)/beta` written out directly.
fn objective(q: &[f64], p: &[f64], score: &[f64], beta: f64) -> f64 {
    let mut e = 0.0;
    let mut kl = 0.0;
    for i in 0..q.len() {
        if q[i] > 0.0 {
            e += q[i] * score[i];
            kl += q[i] * (q[i] / p[i]).ln();
        }
    }
    e + kl / beta
}

fn beats_grid(q: &[f64], p: &[f64], score: &[f64], beta: f64, grid: &[Vec<f64>]) -> bool {
    let best = objective(q, p, score, beta);
    grid.iter().all(|g| best <= objective(g, p, score, beta) + 1e-9)
}

// 7. Gibbs posteriors minimize the learners' objectives.
fn gibbs_optimality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let grids: Vec<Vec<Vec<f64>>> = (0..=4).map(|k| if k == 0 { Vec::new() } else { simplex_grid(k, 50) }).collect();
    let mut failures = 0;
    let mut checks = 0;
    for _ in 0..100 {
        let k = rng.random_range(2..=4);
        let predictors = Predictors::new((0..k).map(|_| rng.random_range(-2.0..2.0)).collect()).unwrap();
        let prior = Measure::categorical(predictors.space().clone(), random_weights(&mut rng, k, false)).unwrap();
        let lambda = rng.random_range(0.05..2.0);
        let m = rng.random_range(1..=5);
        let data: Vec<f64> = (0..m).map(|_| rng.random_range(-2.0..2.0)).collect();
        let loss = if rng.random::<bool>() { LossSpec::Quadratic } else { LossSpec::Absolute };

        let fit = fit_batch_gibbs(&data, &loss, &prior, &predictors, lambda, 0.1, None).unwrap();
        let mut score = vec![0.0; k];
        for &z in &data {
            for (h, s) in score.iter_mut().enumerate() {
                let l = loss.eval(predictors.values()[h], z).unwrap();
                *s += (l + 0.5 * lambda * l * l) / m as f64;
            }
        }
        checks += 1;
        if !beats_grid(fit.posterior.weights().unwrap(), prior.weights().unwrap(), &score, lambda * m as f64, &grids[k])
        {
            failures += 1;
        }

        let rule = PriorRule::PreviousPosterior { initial: prior.clone() };
        let stream = DataModel::Stream { values: data.clone(), source: None };
        let trace = run_online_gibbs(&stream, &loss, &predictors, &rule, lambda, 0.1).unwrap();
        for (i, &z) in data.iter().enumerate() {
            let score: Vec<f64> = predictors
                .values()
                .iter()
                .map(|&h| {
                    let l = loss.eval(h, z).unwrap();
                    l + 0.5 * lambda * l * l
                })
                .collect();
            checks += 1;
            let q = trace.posteriors[i].weights().unwrap();
            if !beats_grid(q, trace.priors[i].weights().unwrap(), &score, lambda, &grids[k]) {
                failures += 1;
            }
        }
    }
    outcome(failures == 0, format!("100 instances, {checks} posteriors vs step-0.02 simplex grid, {failures} beaten"))
}

fn rel_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * b.abs().max(f64::MIN_POSITIVE)
}

// 8. Evaluators against hand-evaluated formulas; tightness-table identities.
#[allow(clippy::approx_constant)]
fn formula_cross_checks() -> Outcome {
    let ln = f64::ln;
    let e = std::f64::consts::E;
    let z = MixedVariation { m: 1, bracket: 0.0, angle: 0.0 };
    let zero_m = |m| EmpiricalMoments::new(0.0, 0.0, 0.0, m).unwrap();
    let s4 = HypothesisSpace::indexed(4).unwrap();
    let s3 = HypothesisSpace::indexed(3).unwrap();
    let s2 = HypothesisSpace::indexed(2).unwrap();
    let gibbs =
        gibbs_posterior(&Measure::uniform(s3.clone()).unwrap(), &ScoreFunction::table(vec![0.0, 1.0, 2.0]), 1.0)
            .unwrap();
    let gnorm = 1.0 + (-1.0f64).exp() + (-2.0f64).exp();
    let ledger = VariationLedger::<f64>::new().accumulate(2.0, 4.0).unwrap();
    let learner_predictors = Predictors::new(vec![-1.0, 0.0, 1.0]).unwrap();
    let learner = fit_batch_gibbs(
        &[0.0, 0.0, 0.0],
        &LossSpec::Quadratic,
        &Measure::uniform(learner_predictors.space().clone()).unwrap(),
        &learner_predictors,
        1.0,
        0.1,
        None,
    )
    .unwrap();
    let learner_w = learner.posterior.weights().unwrap().to_vec();

    // (label, evaluated, hand formula)
    let checks: Vec<(&str, f64, f64)> = vec![
        (
            "KL(point, U4)",
            kl_divergence(&Measure::point_mass(s4.clone(), 1).unwrap(), &Measure::uniform(s4).unwrap()).unwrap(),
            ln(4.0),
        ),
        ("gibbs w1", gibbs.weights().unwrap()[1], (-1.0f64).exp() / gnorm),
        ("gibbs w2", gibbs.weights().unwrap()[2], (-2.0f64).exp() / gnorm),
        ("ledger m", ledger.m as f64, 1.0),
        ("ledger sum", ledger.sum, 2.0),
        ("ledger bracket", ledger.bracket, 4.0),
        ("ledger angle", ledger.angle, 4.0),
        ("BT eta=1", bercu_touati_log_value(1.0, &ledger), 2.0 - 4.0),
        ("BT eta=-1", bercu_touati_log_value(-1.0, &ledger), -2.0 - 4.0),
        ("thm1", martingale_bound(0.0, 0.5, 1.0, z).unwrap().value, ln(4.0)),
        ("thm1 delta->1", martingale_bound(0.0, 1.0 - 1e-12, 1.0, z).unwrap().value, ln(2.0 / (1.0 - 1e-12))),
        ("lambda*", optimal_lambda_oracle(0.0, 2.0 * (-2.0f64).exp(), 3.0).unwrap(), (2.0f64 * 2.0 / 3.0).sqrt()),
        ("thm2 zeros", batch_bound(zero_m(10), 0.0, 0.5, 1.0).unwrap().value, ln(4.0) / 10.0),
        (
            "thm2",
            batch_bound(EmpiricalMoments::new(0.3, 0.2, 0.25, 100).unwrap(), 1.0, 0.1, 0.5).unwrap().value,
            0.3 + 0.05 + (1.0 + ln(20.0)) / 50.0 + 0.0625,
        ),
        (
            "thm3 one step",
            online_bound(&[OnlineStep { loss_q: 0.0, vhat_q: 0.0, v_q: 0.0, kl: 0.0 }], 0.5, 1.0).unwrap().value,
            ln(2.0),
        ),
        (
            "thm3 two steps",
            online_bound(
                &[
                    OnlineStep { loss_q: 1.0, vhat_q: 0.0, v_q: 0.0, kl: 0.5 },
                    OnlineStep { loss_q: 2.0, vhat_q: 0.0, v_q: 0.0, kl: 0.5 },
                ],
                0.1,
                1.0,
            )
            .unwrap()
            .value,
            3.0 + 1.0 + ln(10.0),
        ),
        (
            "thm4 m=1e4",
            bandit_regret_bound(2, 0.1, 10_000, 0.05).unwrap().value,
            2.0 * (41.0 * (ln(2.0) + ln(40.0)) / 500.0).sqrt(),
        ),
        (
            "thm4 m=4e4",
            bandit_regret_bound(2, 0.1, 40_000, 0.05).unwrap().value,
            (41.0 * (ln(2.0) + ln(40.0)) / 500.0).sqrt(),
        ),
        (
            "cor1",
            cor1_bound(0.0, 1, 0.5, 1.0, Cor1Variance::Empirical { bracket: 0.0, angle: 0.0 }).unwrap().value,
            ln(4.0) + 2.0 * ln(2.0),
        ),
        ("cor2 anytime m=1", cor2_bounds(0.0, 0.5, 1.0, 1, 1.0).unwrap().anytime.value, ln(4.0) + 1.0),
        ("cor2 local m=1", cor2_bounds(0.0, 0.5, 1.0, 1, 1.0).unwrap().local.value, ln(4.0) + 1.0),
        ("cor2 local", cor2_bounds(0.0, 0.5, 0.1, 100, 2.0).unwrap().local.value, 10.0 * ln(4.0) + 0.004),
        ("cor3 zeros", cor3_bound(zero_m(100), 0.0, 0.5, 0.5, 0.0).unwrap().value, ln(2.0) / 10.0),
        ("cor3 K2 term", cor3_bound(zero_m(100), 0.0, 0.5, 0.5, 4.0).unwrap().variance_term, 4.0 / 20.0),
        (
            "seldin",
            baseline_seldin(0.0, 1, 0.5, 1.0, SeldinVariance::Variance(0.0), 1.0).unwrap().value,
            2.0 * ln(2.0) + ln(4.0),
        ),
        (
            "seldin (e-2)",
            baseline_seldin(0.0, 1, 0.5, 1.0, SeldinVariance::Variance(1.0), 1.0).unwrap().variance_term,
            e - 2.0,
        ),
        ("catoni", baseline_catoni(0.0, 0.5, 1.0, 1, 1e-300, 0.0).unwrap().value, ln(2.0)),
        (
            "hype exp moment",
            hype_exp_moment_log(&Measure::uniform(s2).unwrap(), &[1.0, 2.0], 0.0, 1).unwrap(),
            ln(((0.5f64).exp() + (2.0f64).exp()) / 2.0),
        ),
        ("online bounded", baseline_online_bounded(0.0, 0.0, 0.5, 1.0, 1, 0.0).unwrap().value, ln(2.0)),
        ("batch learner w0", learner_w[0], (-4.5f64).exp() / (1.0 + 2.0 * (-4.5f64).exp())),
        ("batch learner w1", learner_w[1], 1.0 / (1.0 + 2.0 * (-4.5f64).exp())),
    ];
    let mut bad: Vec<String> = checks
        .iter()
        .filter(|(_, got, want)| !rel_close(*got, *want))
        .map(|(n, got, want)| format!("{n}: {got} vs {want}"))
        .collect();

    // The decimals printed next to the hand formulas, checked at their printed
    // precision. Four of them disagree with their own formulas; those are
    // reported, not counted as evaluator failures.
    let printed: [(&str, f64, i32); 17] = [
        ("KL(point, U4)", 1.386294, 6),
        ("thm1", 1.386294, 6),
        ("thm1 delta->1", 0.693147, 6),
        ("thm2 zeros", 0.138629, 6),
        ("thm2", 0.49241, 5),
        ("thm3 one step", 0.693147, 6),
        ("thm3 two steps", 6.302585, 6),
        ("thm4 m=1e4", 1.19876, 5),
        ("thm4 m=4e4", 0.59938, 5),
        ("cor1", 2.079442, 6),
        ("cor2 local", 13.8669, 4),
        ("cor3 zeros", 0.069315, 6),
        ("cor3 K2 term", 0.2, 1),
        ("seldin", 2.772589, 6),
        ("seldin (e-2)", 0.718282, 6),
        ("hype exp moment", 1.51444, 5),
        ("lambda* (V=4)", 1.0, 6),
    ];
    let known_slips = ["thm4 m=1e4", "thm4 m=4e4", "cor1", "hype exp moment"];
    let lambda_v4 = optimal_lambda_oracle(0.0, 2.0 * (-2.0f64).exp(), 4.0).unwrap();
    let mut slips = Vec::new();
    for (label, literal, digits) in printed {
        let got = if label == "lambda* (V=4)" { lambda_v4 } else { checks.iter().find(|c| c.0 == label).unwrap().1 };
        if (got - literal).abs() > 0.5 * 10f64.powi(-digits) + 1e-12 {
            if known_slips.contains(&label) {
                slips.push(format!("{label}: printed {literal}, formula gives {got:.7}"));
            } else {
                bad.push(format!("printed {label}: {got} vs {literal}"));
            }
        }
    }

    // tightness identities, row by row
    let mut c = ExperimentConfig { seed: 8, delta: 0.1, ..Default::default() };
    c.tightness.m_grid = vec![10, 100, 1000];
    c.tightness.lambda_grid = vec![0.05, 0.1, 0.5];
    let rows = run_tightness(&c).unwrap();
    let mut identities = 0;
    for &m in &c.tightness.m_grid {
        for &l in &c.tightness.lambda_grid {
            let find = |kind: CertificateKind, variant: &str| {
                rows.iter()
                    .find(|r| r.m == m && r.lambda == l && r.certificate_kind == kind && r.variant == variant)
                    .unwrap()
            };
            let local = find(CertificateKind::Cor2Local, "");
            let cat = find(CertificateKind::CatoniBaseline, "");
            let c1 = find(CertificateKind::Cor1, "bounded_increments");
            let sel = find(CertificateKind::SeldinBaseline, "c_bound");
            let diff = (local.value - local.empirical_term) - (cat.value - cat.empirical_term);
            let expected = ln(2.0) / l + l / (2.0 * m as f64);
            if !rel_close(diff, expected) || !rel_close(local.variance_term, 2.0 * cat.variance_term) {
                bad.push(format!("catoni relation at m={m} l={l}"));
            }
            if !rel_close(sel.variance_term, (e - 2.0) * c1.variance_term) || sel.confidence_term != c1.confidence_term
            {
                bad.push(format!("seldin relation at m={m} l={l}"));
            }
            identities += 2;
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "{} hand formulas at 1e-9 relative, {} printed decimals, {identities} tightness identities; \
             mismatches: {bad:?}; printed decimals that contradict their own formula: {slips:?}",
            checks.len(),
            printed.len()
        ),
    )
}

fn files_in(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

// 9. Byte-identical outputs for worker counts 1 and 8.
fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("c.toml");
    std::fs::write(
        &config,
        "seed = 11\ntrials = 200\nhorizon = 40\ndelta = 0.2\nlambda = 0.3\n\
         [bandit]\nm = 300\n[supermartingale]\neta = [0.1, 0.5]\n[tightness]\nm_grid = [10, 40]\n",
    )
    .unwrap();
    let mut differing = Vec::new();
    let mut compared = 0;
    for sub in ["coverage", "supermartingale", "tightness", "bandit", "online", "batch"] {
        let mut outputs = Vec::new();
        for workers in ["1", "8"] {
            let out = tmp.path().join(format!("{sub}-{workers}"));
            let code = pacmart::harness::cli_main([
                "pacmart",
                sub,
                "--config",
                config.to_str().unwrap(),
                "--output",
                out.to_str().unwrap(),
                "--workers",
                workers,
            ]);
            if code != 0 {
                differing.push(format!("{sub} exited {code}"));
            }
            outputs.push(files_in(&out));
        }
        compared += outputs[0].len();
        if outputs[0] != outputs[1] || outputs[0].is_empty() {
            differing.push(sub.to_string());
        }
    }
    outcome(differing.is_empty(), format!("6 subcommands, {compared} files compared; differing: {differing:?}"))
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("1 change of measure", change_of_measure, Duration::from_secs(1)),
        ("2 supermartingale", supermartingale, Duration::from_secs(30)),
        ("3 ville direct", ville_direct, Duration::from_secs(120)),
        ("4 batch anytime coverage", batch_coverage, Duration::from_secs(300)),
        ("5 online anytime coverage", online_coverage, Duration::from_secs(300)),
        ("6 bandit", bandit, Duration::from_secs(300)),
        ("7 gibbs optimality", gibbs_optimality, Duration::from_secs(60)),
        ("8 formula cross-checks", formula_cross_checks, Duration::from_secs(1)),
        ("9 determinism", determinism, Duration::from_secs(300)),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, run, budget) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let in_budget = elapsed <= budget;
        let pass = o.pass && in_budget;
        if !pass {
            failed += 1;
        }
        println!(
            "[{}] criterion {name}: {} ({:.2} s, budget {} s{})",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64(),
            budget.as_secs(),
            if in_budget { "" } else { ", OVER BUDGET" }
        );
    }
    if failed > 0 {
        println!("acceptance: {failed} criteria failed");
        std::process::exit(1);
    }
    println!("acceptance: all criteria passed");
}
