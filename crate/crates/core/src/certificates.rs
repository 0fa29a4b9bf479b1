//! Bound evaluators.
//!
//! Every evaluator is pure arithmetic over caller-supplied statistics and
//! returns a [`BoundCertificate`] whose value is the sum of four additive
//! contributions:
//!
//! ```text
//!     value = empirical_term + kl_term + confidence_term + variance_term
//! ```
//!
//! Each term is stored already scaled by the kind-specific factors (`1/λ`,
//! `1/(λm)`, `λ/2`, ...), so the value is re-derivable from the stored
//! fields. A `+inf` KL yields a `+inf` certificate instead of an error.
//!
//! The martingale-type kinds (`Martingale`, `Cor1`, `SeldinBaseline`) bound
//! `|M_m(Q)|`; the learning kinds bound a risk or a generalisation gap; the
//! bandit kind bounds `|Δ(Q) − Δ̂_m(Q)|`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{log_expect_exp, PosteriorMeasure};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CertificateKind {
    Martingale,
    Batch,
    Online,
    Bandit,
    Cor1,
    Cor2Anytime,
    Cor2Local,
    Cor3,
    SeldinBaseline,
    CatoniBaseline,
    HypeBaseline,
    OnlineBoundedBaseline,
}

impl CertificateKind {
    pub const ALL: [CertificateKind; 12] = [
        CertificateKind::Martingale,
        CertificateKind::Batch,
        CertificateKind::Online,
        CertificateKind::Bandit,
        CertificateKind::Cor1,
        CertificateKind::Cor2Anytime,
        CertificateKind::Cor2Local,
        CertificateKind::Cor3,
        CertificateKind::SeldinBaseline,
        CertificateKind::CatoniBaseline,
        CertificateKind::HypeBaseline,
        CertificateKind::OnlineBoundedBaseline,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CertificateKind::Martingale => "martingale",
            CertificateKind::Batch => "batch",
            CertificateKind::Online => "online",
            CertificateKind::Bandit => "bandit",
            CertificateKind::Cor1 => "cor1",
            CertificateKind::Cor2Anytime => "cor2_anytime",
            CertificateKind::Cor2Local => "cor2_local",
            CertificateKind::Cor3 => "cor3",
            CertificateKind::SeldinBaseline => "seldin_baseline",
            CertificateKind::CatoniBaseline => "catoni_baseline",
            CertificateKind::HypeBaseline => "hype_baseline",
            CertificateKind::OnlineBoundedBaseline => "online_bounded_baseline",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    /// True for kinds whose value bounds the martingale `|M_m(Q)|` (scale `m`).
    pub fn bounds_martingale(self) -> bool {
        matches!(self, CertificateKind::Martingale | CertificateKind::Cor1 | CertificateKind::SeldinBaseline)
    }
}

impl fmt::Display for CertificateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An evaluated bound with its decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate<F> {
    pub kind: CertificateKind,
    pub value: F,
    pub empirical_term: F,
    pub kl_term: F,
    pub confidence_term: F,
    pub variance_term: F,
    pub lambda: F,
    pub delta: F,
    pub m: usize,
    /// False when a baseline's own validity constraint is not met.
    pub assumptions_hold: bool,
    /// False when some input was a plug-in estimate rather than an exact value.
    pub certified: bool,
}

/// Additive contributions, already scaled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Terms<F> {
    pub empirical: F,
    pub kl: F,
    pub confidence: F,
    pub variance: F,
}

impl<F: Scalar> BoundCertificate<F> {
    pub fn assemble(kind: CertificateKind, terms: Terms<F>, lambda: F, delta: F, m: usize) -> Self {
        let Terms { empirical, kl, confidence, variance } = terms;
        debug_assert!(
            [empirical, kl, confidence, variance].iter().all(|t| !(*t < F::zero())),
            "negative term in {kind}: {empirical} {kl} {confidence} {variance}"
        );
        let mut cert = BoundCertificate {
            kind,
            value: F::zero(),
            empirical_term: empirical,
            kl_term: kl,
            confidence_term: confidence,
            variance_term: variance,
            lambda,
            delta,
            m,
            assumptions_hold: true,
            certified: true,
        };
        cert.value = cert.reconstruct();
        cert
    }

    /// Recombines the stored terms.
    pub fn reconstruct(&self) -> F {
        let parts = [self.empirical_term, self.kl_term, self.confidence_term, self.variance_term];
        if parts.iter().any(|t| *t == F::infinity()) {
            F::infinity()
        } else {
            parts.into_iter().sum()
        }
    }

    /// Value with the empirical term removed: a bound on the gap (or on `|M_m|`).
    pub fn excess(&self) -> F {
        if self.value == F::infinity() {
            F::infinity()
        } else {
            self.value - self.empirical_term
        }
    }

    pub fn with_certified(mut self, certified: bool) -> Self {
        self.certified = certified;
        self
    }

    pub fn with_assumptions(mut self, hold: bool) -> Self {
        self.assumptions_hold = hold;
        self
    }
}

fn check_delta<F: Scalar>(delta: F) -> Result<()> {
    if delta > F::zero() && delta < F::one() {
        Ok(())
    } else {
        Err(Error::domain(format!("delta must lie in (0, 1), got {delta}")))
    }
}

fn check_positive<F: Scalar>(name: &str, x: F) -> Result<()> {
    if x > F::zero() && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive and finite, got {x}")))
    }
}

/// Nonnegative; `+inf` allowed (propagates to the bound).
fn check_nonneg<F: Scalar>(name: &str, x: F) -> Result<()> {
    if x >= F::zero() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be nonnegative, got {x}")))
    }
}

fn check_m(m: usize) -> Result<()> {
    if m >= 1 {
        Ok(())
    } else {
        Err(Error::domain("sample size m must be at least 1"))
    }
}

/// `x / d` keeping `+inf` numerators infinite.
fn over<F: Scalar>(x: F, d: F) -> F {
    if x == F::infinity() {
        F::infinity()
    } else {
        x / d
    }
}

/// `Q`-averaged quadratic and predictable variations at time `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedVariation<F> {
    pub m: usize,
    pub bracket: F,
    pub angle: F,
}

/// `|M_m(Q)| ≤ (KL + log(2/δ))/λ + λ/2 ([M]_m(Q) + ⟨M⟩_m(Q))`, simultaneously over `m` and `Q`.
pub fn martingale_bound<F: Scalar>(
    kl: F,
    delta: F,
    lambda: F,
    variation: MixedVariation<F>,
) -> Result<BoundCertificate<F>> {
    check_nonneg("kl", kl)?;
    check_delta(delta)?;
    check_positive("lambda", lambda)?;
    check_nonneg("bracket", variation.bracket)?;
    check_nonneg("angle", variation.angle)?;
    let half = F::lit(0.5);
    Ok(BoundCertificate::assemble(
        CertificateKind::Martingale,
        Terms {
            empirical: F::zero(),
            kl: over(kl, lambda),
            confidence: (F::lit(2.0) / delta).ln() / lambda,
            variance: half * lambda * (variation.bracket + variation.angle),
        },
        lambda,
        delta,
        variation.m,
    ))
}

/// Minimizer in `λ` of the martingale bound: `sqrt(2 (KL + log(2/δ)) / variance_sum)`.
///
/// Diagnostic only: a `λ` chosen from the data is not covered by any certificate.
pub fn optimal_lambda_oracle<F: Scalar>(kl: F, delta: F, variance_sum: F) -> Result<F> {
    check_nonneg("kl", kl)?;
    check_delta(delta)?;
    if !(variance_sum > F::zero()) {
        return Err(Error::domain("variance_sum must be positive for the lambda oracle"));
    }
    Ok((F::lit(2.0) * (kl + (F::lit(2.0) / delta).ln()) / variance_sum).sqrt())
}

/// Posterior-averaged empirical statistics of a batch sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMoments<F> {
    /// `E_Q[R_m]`.
    pub mean_loss: F,
    /// `E_Q[(1/m) Σ ℓ²]`.
    pub mean_sq_loss: F,
    /// `E_Q[Quad]`.
    pub quad: F,
    pub m: usize,
}

impl<F: Scalar> EmpiricalMoments<F> {
    pub fn new(mean_loss: F, mean_sq_loss: F, quad: F, m: usize) -> Result<Self> {
        check_nonneg("mean_loss", mean_loss)?;
        check_nonneg("mean_sq_loss", mean_sq_loss)?;
        check_nonneg("quad", quad)?;
        check_m(m)?;
        Ok(EmpiricalMoments { mean_loss, mean_sq_loss, quad, m })
    }
}

/// `E_Q[R] ≤ E_Q[R_m] + λ/2 E_Q[(1/m)Σℓ²] + (KL + log(2/δ))/(λm) + λ/2 E_Q[Quad]`, for all `m`.
pub fn batch_bound<F: Scalar>(moments: EmpiricalMoments<F>, kl: F, delta: F, lambda: F) -> Result<BoundCertificate<F>> {
    check_nonneg("kl", kl)?;
    check_delta(delta)?;
    check_positive("lambda", lambda)?;
    check_m(moments.m)?;
    let half = F::lit(0.5);
    let lm = lambda * F::from_count(moments.m);
    Ok(BoundCertificate::assemble(
        CertificateKind::Batch,
        Terms {
            empirical: moments.mean_loss + half * lambda * moments.mean_sq_loss,
            kl: over(kl, lm),
            confidence: (F::lit(2.0) / delta).ln() / lm,
            variance: if moments.quad == F::infinity() { F::infinity() } else { half * lambda * moments.quad },
        },
        lambda,
        delta,
        moments.m,
    ))
}

/// Posterior-averaged statistics of one online round.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OnlineStep<F> {
    /// `E_{Q_i}[ℓ(h, z_i)]`.
    pub loss_q: F,
    /// `E_{Q_i}[(ℓ(h, z_i) − E_{i−1}ℓ(h, z_i))²]`.
    pub vhat_q: F,
    /// `E_{Q_i}[V_i(h)]`, the conditional variance.
    pub v_q: F,
    /// `KL(Q_i ‖ P_i)`.
    pub kl: F,
}

/// `Σ E_{Q_i}[E_{i−1}ℓ] ≤ Σ loss_Q + λ/2 Σ (V̂ + V) + Σ KL_i/λ + log(1/δ)/λ`.
pub fn online_bound<F: Scalar>(steps: &[OnlineStep<F>], delta: F, lambda: F) -> Result<BoundCertificate<F>> {
    if steps.is_empty() {
        return Err(Error::domain("online bound needs at least one step"));
    }
    check_delta(delta)?;
    check_positive("lambda", lambda)?;
    let mut loss = F::zero();
    let mut var = F::zero();
    let mut kl = F::zero();
    for s in steps {
        check_nonneg("loss_q", s.loss_q)?;
        check_nonneg("vhat_q", s.vhat_q)?;
        check_nonneg("v_q", s.v_q)?;
        check_nonneg("kl_i", s.kl)?;
        loss = loss + s.loss_q;
        var = var + s.vhat_q + s.v_q;
        kl = kl + s.kl;
    }
    Ok(BoundCertificate::assemble(
        CertificateKind::Online,
        Terms {
            empirical: loss,
            kl: over(kl, lambda),
            confidence: delta.recip().ln() / lambda,
            variance: F::lit(0.5) * lambda * var,
        },
        lambda,
        delta,
        steps.len(),
    ))
}

fn bandit_terms<F: Scalar>(k: usize, delta: F, m: usize, eps_m: F, second_moment: F) -> Result<BoundCertificate<F>> {
    if k < 2 {
        return Err(Error::domain("bandit needs at least two arms"));
    }
    check_delta(delta)?;
    check_m(m)?;
    if !(eps_m > F::zero() && eps_m <= F::one()) {
        return Err(Error::domain(format!("eps_m must lie in (0, 1], got {eps_m}")));
    }
    let kf = F::from_count(k);
    if eps_m * kf > F::one() + F::lit(1e-12) {
        return Err(Error::domain(format!("infeasible exploration floor: eps_m * K = {} > 1", eps_m * kf)));
    }
    let mf = F::from_count(m);
    let log_k = kf.ln();
    let log_conf = (F::lit(4.0) / delta).ln();
    let spread = second_moment * (F::one() + F::lit(2.0) * kf / delta) / eps_m;
    // the λ_m that balances the two halves of the bound
    let lambda = ((log_k + log_conf) / (mf * spread)).sqrt();
    let lm = lambda * mf;
    Ok(BoundCertificate::assemble(
        CertificateKind::Bandit,
        Terms { empirical: F::zero(), kl: log_k / lm, confidence: log_conf / lm, variance: lambda * spread },
        lambda,
        delta,
        m,
    ))
}

/// `2 sqrt((1 + 2K/δ)(log K + log(4/δ)) / (m ε_m))`, valid at the single time `m`.
pub fn bandit_regret_bound<F: Scalar>(k: usize, delta: F, m: usize, eps_m: F) -> Result<BoundCertificate<F>> {
    bandit_terms(k, delta, m, eps_m, F::one())
}

/// The same bound keeping the reward second-moment constant `C`
/// (`sup_a E[R(a)²] ≤ C`): it scales by `sqrt(C)` and coincides with
/// [`bandit_regret_bound`] at `C = 1`.
pub fn bandit_regret_bound_with_moment<F: Scalar>(
    k: usize,
    delta: F,
    m: usize,
    eps_m: F,
    second_moment: F,
) -> Result<BoundCertificate<F>> {
    check_positive("second moment bound C", second_moment)?;
    bandit_terms(k, delta, m, eps_m, second_moment)
}

/// Union-bound weight `δ_k = δ / (k(k+1))`; these sum to `δ` over `k ≥ 1`.
pub fn union_weight<F: Scalar>(k: usize, delta: F) -> F {
    assert!(k >= 1, "union weights are indexed from 1");
    delta / (F::from_count(k) * F::from_count(k + 1))
}

/// Variance input of the first corollary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Cor1Variance<F> {
    /// `λ_k/2 (V̂_m(Q) + V_m(Q))`, valid for every `(m, λ_k, P_k)`.
    Empirical { bracket: F, angle: F },
    /// `λ_m Σ_{i≤m} C_i²` for increments bounded by `C_i`, at `k = m`.
    BoundedIncrements { c_squared_sum: F },
}

/// `|M_m(Q)| ≤ (KL + 2 log(k+1) + log(2/δ))/λ_k + variance term`.
pub fn cor1_bound<F: Scalar>(
    kl: F,
    k: usize,
    delta: F,
    lambda_k: F,
    variance: Cor1Variance<F>,
) -> Result<BoundCertificate<F>> {
    check_nonneg("kl", kl)?;
    check_m(k)?;
    check_delta(delta)?;
    check_positive("lambda_k", lambda_k)?;
    let variance_term = match variance {
        Cor1Variance::Empirical { bracket, angle } => {
            check_nonneg("bracket", bracket)?;
            check_nonneg("angle", angle)?;
            F::lit(0.5) * lambda_k * (bracket + angle)
        }
        Cor1Variance::BoundedIncrements { c_squared_sum } => {
            check_nonneg("c_squared_sum", c_squared_sum)?;
            lambda_k * c_squared_sum
        }
    };
    let union = F::lit(2.0) * F::from_count(k + 1).ln();
    Ok(BoundCertificate::assemble(
        CertificateKind::Cor1,
        Terms {
            empirical: F::zero(),
            kl: over(kl, lambda_k),
            confidence: (union + (F::lit(2.0) / delta).ln()) / lambda_k,
            variance: variance_term,
        },
        lambda_k,
        delta,
        k,
    ))
}

/// Anytime and local bounds on the generalisation gap for losses bounded by `K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cor2Bounds<F> {
    /// `(KL + log(2/δ))/(λm) + λK²`, for all `m` simultaneously.
    pub anytime: BoundCertificate<F>,
    /// `(KL + log(2/δ))/λ + λK²/m`, at a single `m`.
    pub local: BoundCertificate<F>,
}

pub fn cor2_bounds<F: Scalar>(kl: F, delta: F, lambda: F, m: usize, k_bound: F) -> Result<Cor2Bounds<F>> {
    check_nonneg("kl", kl)?;
    check_delta(delta)?;
    check_positive("lambda", lambda)?;
    check_m(m)?;
    check_nonneg("K", k_bound)?;
    let mf = F::from_count(m);
    let conf = (F::lit(2.0) / delta).ln();
    let k2 = k_bound * k_bound;
    let anytime = BoundCertificate::assemble(
        CertificateKind::Cor2Anytime,
        Terms {
            empirical: F::zero(),
            kl: over(kl, lambda * mf),
            confidence: conf / (lambda * mf),
            variance: lambda * k2,
        },
        lambda,
        delta,
        m,
    );
    let local = BoundCertificate::assemble(
        CertificateKind::Cor2Local,
        Terms { empirical: F::zero(), kl: over(kl, lambda), confidence: conf / lambda, variance: lambda * k2 / mf },
        lambda,
        delta,
        m,
    );
    Ok(Cor2Bounds { anytime, local })
}

/// HYPE-style bound obtained with `λ = m^{α−1}`:
///
/// ```text
///     E_Q[(1/m)Σ(ℓ + ℓ²/(2m^{1−α}))] + (KL + log(1/δ))/m^α + E_Q[K²]/(2m^{1−α})
/// ```
pub fn cor3_bound<F: Scalar>(
    moments: EmpiricalMoments<F>,
    kl: F,
    delta: F,
    alpha: F,
    k2_q: F,
) -> Result<BoundCertificate<F>> {
    check_nonneg("kl", kl)?;
    check_delta(delta)?;
    check_m(moments.m)?;
    check_nonneg("K2_Q", k2_q)?;
    if !(alpha >= F::zero() && alpha <= F::one()) {
        return Err(Error::domain(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    let mf = F::from_count(moments.m);
    let m_alpha = mf.powf(alpha);
    let m_rest = mf.powf(F::one() - alpha);
    let two = F::lit(2.0);
    Ok(BoundCertificate::assemble(
        CertificateKind::Cor3,
        Terms {
            empirical: moments.mean_loss + moments.mean_sq_loss / (two * m_rest),
            kl: over(kl, m_alpha),
            confidence: delta.recip().ln() / m_alpha,
            variance: over(k2_q, two * m_rest),
        },
        m_rest.recip(),
        delta,
        moments.m,
    ))
}

/// Variance input of the Bernstein-type baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SeldinVariance<F> {
    /// Cumulative conditional variance `V_m(Q)`.
    Variance(F),
    /// `Σ_{i≤m} C_i²`.
    CBound(F),
}

/// `(KL + 2 log(m+1) + log(2/δ))/λ_m + (e−2) λ_m · variance`.
///
/// The baseline needs `λ_m ≤ 1/C_m`; this is recorded in `assumptions_hold`
/// rather than enforced.
pub fn baseline_seldin<F: Scalar>(
    kl: F,
    m: usize,
    delta: F,
    lambda_m: F,
    variance: SeldinVariance<F>,
    increment_bound: F,
) -> Result<BoundCertificate<F>> {
    check_nonneg("kl", kl)?;
    check_m(m)?;
    check_delta(delta)?;
    check_positive("lambda_m", lambda_m)?;
    check_nonneg("C_m", increment_bound)?;
    let v = match variance {
        SeldinVariance::Variance(v) | SeldinVariance::CBound(v) => v,
    };
    check_nonneg("variance", v)?;
    let union = F::lit(2.0) * F::from_count(m + 1).ln();
    let cert = BoundCertificate::assemble(
        CertificateKind::SeldinBaseline,
        Terms {
            empirical: F::zero(),
            kl: over(kl, lambda_m),
            confidence: (union + (F::lit(2.0) / delta).ln()) / lambda_m,
            variance: (F::E() - F::lit(2.0)) * lambda_m * v,
        },
        lambda_m,
        delta,
        m,
    );
    Ok(cert.with_assumptions(lambda_m * increment_bound <= F::one()))
}

/// `R_m(Q) + (KL + log(1/δ))/λ + λK²/(2m)` for losses bounded by `K`, single `m`.
pub fn baseline_catoni<F: Scalar>(
    kl: F,
    delta: F,
    lambda: F,
    m: usize,
    k_bound: F,
    empirical_risk_q: F,
) -> Result<BoundCertificate<F>> {
    check_nonneg("kl", kl)?;
    check_delta(delta)?;
    check_positive("lambda", lambda)?;
    check_m(m)?;
    check_nonneg("K", k_bound)?;
    check_nonneg("empirical risk", empirical_risk_q)?;
    Ok(BoundCertificate::assemble(
        CertificateKind::CatoniBaseline,
        Terms {
            empirical: empirical_risk_q,
            kl: over(kl, lambda),
            confidence: delta.recip().ln() / lambda,
            variance: lambda * k_bound * k_bound / (F::lit(2.0) * F::from_count(m)),
        },
        lambda,
        delta,
        m,
    ))
}

/// `log E_P[exp(K(h)² / (2 m^{1−2α}))]` for a finite prior and envelope `K(h)`.
pub fn hype_exp_moment_log<F: Scalar>(prior: &PosteriorMeasure<F>, envelope: &[F], alpha: F, m: usize) -> Result<F> {
    check_m(m)?;
    let scale = F::lit(2.0) * F::from_count(m).powf(F::one() - F::lit(2.0) * alpha);
    let psi: Vec<F> = envelope.iter().map(|&k| k * k / scale).collect();
    log_expect_exp(prior, &psi)
}

/// `R_m(Q) + (KL + log(1/δ))/m^α + log E_P[exp(K²/(2m^{1−2α}))]/m^α`, single `m`.
pub fn baseline_hype<F: Scalar>(
    kl: F,
    delta: F,
    alpha: F,
    m: usize,
    exp_moment_log: F,
    empirical_risk_q: F,
) -> Result<BoundCertificate<F>> {
    check_nonneg("kl", kl)?;
    check_delta(delta)?;
    check_m(m)?;
    check_nonneg("exp_moment_log", exp_moment_log)?;
    check_nonneg("empirical risk", empirical_risk_q)?;
    if !alpha.is_finite() {
        return Err(Error::domain("alpha must be finite"));
    }
    let m_alpha = F::from_count(m).powf(alpha);
    Ok(BoundCertificate::assemble(
        CertificateKind::HypeBaseline,
        Terms {
            empirical: empirical_risk_q,
            kl: over(kl, m_alpha),
            confidence: delta.recip().ln() / m_alpha,
            variance: over(exp_moment_log, m_alpha),
        },
        m_alpha,
        delta,
        m,
    ))
}

/// `Σℓ + ΣKL/λ + λmK²/2 + log(1/δ)/λ` for online learning with losses bounded by `K`.
pub fn baseline_online_bounded<F: Scalar>(
    cumulative_loss_q: F,
    kl_sum: F,
    delta: F,
    lambda: F,
    m: usize,
    k_bound: F,
) -> Result<BoundCertificate<F>> {
    check_nonneg("cumulative loss", cumulative_loss_q)?;
    check_nonneg("kl_sum", kl_sum)?;
    check_delta(delta)?;
    check_positive("lambda", lambda)?;
    check_m(m)?;
    check_nonneg("K", k_bound)?;
    Ok(BoundCertificate::assemble(
        CertificateKind::OnlineBoundedBaseline,
        Terms {
            empirical: cumulative_loss_q,
            kl: over(kl_sum, lambda),
            confidence: delta.recip().ln() / lambda,
            variance: F::lit(0.5) * lambda * F::from_count(m) * k_bound * k_bound,
        },
        lambda,
        delta,
        m,
    ))
}
