use pacmart::bandit::{BasePolicy, EpsSchedule, PolicySchedule};
use pacmart::certificates::{batch_bound, online_bound, union_weight, EmpiricalMoments, OnlineStep};
use pacmart::learners::{run_online_gibbs, DataModel, LossSpec, Predictors, PriorRule};
use pacmart::measures::{
    change_of_measure_gap, gibbs_objective, gibbs_posterior, kl_divergence, HypothesisSpace, PosteriorMeasure,
    ScoreFunction,
};
use proptest::prelude::*;

type Measure = PosteriorMeasure<f64>;

fn weights(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, n).prop_map(|mut w| {
        if w.iter().all(|x| *x == 0.0) {
            w[0] = 1.0;
        }
        let s: f64 = w.iter().sum();
        w.iter().map(|x| x / s).collect()
    })
}

fn instance() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
    (1usize..10).prop_flat_map(|n| (weights(n), weights(n), prop::collection::vec(-20.0f64..20.0, n)))
}

fn measure(w: Vec<f64>) -> Measure {
    Measure::categorical(HypothesisSpace::indexed(w.len()).unwrap(), w).unwrap()
}

proptest! {
    #[test]
    fn change_of_measure_has_nonnegative_slack((q, p, psi) in instance()) {
        let g = change_of_measure_gap(&ScoreFunction::table(psi), &measure(q), &measure(p)).unwrap();
        prop_assert!(g.slack >= -1e-9, "slack {}", g.slack);
    }

    #[test]
    fn kl_is_nonnegative_and_zero_on_self((q, p, _) in instance()) {
        let (q, p) = (measure(q), measure(p));
        prop_assert!(kl_divergence(&q, &p).unwrap() >= -1e-12);
        prop_assert!(kl_divergence(&p, &p).unwrap().abs() <= 1e-12);
    }

    #[test]
    fn gibbs_beats_any_other_posterior((q, p, psi) in instance(), beta in 0.05f64..5.0) {
        let p = measure(p);
        let score = ScoreFunction::table(psi);
        let g = gibbs_posterior(&p, &score, beta).unwrap();
        let best = gibbs_objective(&g, &p, &score, beta).unwrap();
        let other = gibbs_objective(&measure(q), &p, &score, beta).unwrap();
        prop_assert!(best <= other + 1e-9, "{best} > {other}");
    }

    #[test]
    fn union_weights_sum_below_delta(delta in 0.001f64..1.0, n in 1usize..500) {
        let s: f64 = (1..=n).map(|k| union_weight(k, delta)).sum();
        prop_assert!(s <= delta * (1.0 + 1e-12));
        prop_assert!((s - delta * n as f64 / (n + 1) as f64).abs() <= 1e-12);
    }

    #[test]
    fn batch_certificate_reconstructs_and_is_monotone(
        mean in 0.0f64..5.0,
        extra in 0.0f64..5.0,
        quad in 0.0f64..10.0,
        m in 1usize..10_000,
        kl in 0.0f64..10.0,
        delta in 0.01f64..0.9,
        lambda in 0.01f64..3.0,
    ) {
        let mom = EmpiricalMoments::new(mean, mean * mean + extra, quad, m).unwrap();
        let c = batch_bound(mom, kl, delta, lambda).unwrap();
        prop_assert!((c.reconstruct() - c.value).abs() <= 1e-12 * c.value.abs().max(1.0));
        prop_assert!(c.value >= mean);
        let more_kl = batch_bound(mom, kl + 1.0, delta, lambda).unwrap();
        let less_delta = batch_bound(mom, kl, delta / 2.0, lambda).unwrap();
        prop_assert!(more_kl.value > c.value);
        prop_assert!(less_delta.value > c.value);
    }

    #[test]
    fn zero_loss_online_value_is_confidence_only(n in 1usize..50, delta in 0.01f64..0.99, lambda in 0.01f64..3.0) {
        let steps = vec![OnlineStep { loss_q: 0.0, vhat_q: 0.0, v_q: 0.0, kl: 0.0 }; n];
        let c = online_bound(&steps, delta, lambda).unwrap();
        let expected = (1.0 / delta).ln() / lambda;
        prop_assert!((c.value - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn online_learner_is_causal(
        data in prop::collection::vec(-3.0f64..3.0, 2..12),
        replacement in prop::collection::vec(-3.0f64..3.0, 12),
        cut_frac in 0.0f64..1.0,
        lambda in 0.05f64..2.0,
    ) {
        let cut = ((data.len() as f64) * cut_frac) as usize;
        let mut changed = data.clone();
        for (i, v) in changed.iter_mut().enumerate().skip(cut) {
            *v = replacement[i];
        }
        let predictors = Predictors::new(vec![-1.0, 0.0, 1.5]).unwrap();
        let rule = PriorRule::PreviousPosterior { initial: Measure::uniform(predictors.space().clone()).unwrap() };
        let run = |values: Vec<f64>| {
            run_online_gibbs(&DataModel::Stream { values, source: None }, &LossSpec::Absolute, &predictors, &rule, lambda, 0.1)
                .unwrap()
        };
        let (a, b) = (run(data), run(changed));
        // P_i sees z_1..z_{i-1}; the posterior paired with round i sees z_1..z_i
        prop_assert_eq!(&a.priors[..=cut.min(a.priors.len() - 1)], &b.priors[..=cut.min(b.priors.len() - 1)]);
        prop_assert_eq!(&a.posteriors[..cut], &b.posteriors[..cut]);
        for s in &a.per_step {
            prop_assert!(s.loss_q >= 0.0 && s.vhat_q >= 0.0 && s.v_q >= 0.0 && s.kl >= -1e-12);
        }
    }

    #[test]
    fn policy_respects_exploration_floor(
        means in prop::collection::vec(-5.0f64..5.0, 2..6),
        frac in 0.01f64..1.0,
        temperature in 0.05f64..5.0,
        round in 1usize..10_000,
        softmax in any::<bool>(),
        decay in any::<bool>(),
    ) {
        let k = means.len();
        let base = if softmax { BasePolicy::SoftmaxOnEmpirical { temperature } } else { BasePolicy::Uniform };
        let eps = if decay { EpsSchedule::CubeRootDecay } else { EpsSchedule::Constant { eps: frac / k as f64 } };
        let schedule = PolicySchedule { base, eps };
        schedule.validate(k).unwrap();
        let pi = schedule.policy(round, &means);
        let floor = schedule.eps(round, k);
        prop_assert!((pi.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        for p in pi {
            prop_assert!(p >= floor * (1.0 - 1e-12));
        }
    }
}
