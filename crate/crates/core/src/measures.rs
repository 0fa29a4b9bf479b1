//! Probability measures over hypothesis spaces.
//!
//! Two families are representable exactly: categoricals over a finite set of
//! labelled hypotheses, and diagonal Gaussians over `R^d`. On top of them this
//! module provides the KL divergence, the change-of-measure (Donsker–Varadhan)
//! inequality as a checkable gap, and the Gibbs minimizer
//!
//! ```text
//!     Q*(h) ∝ P(h) · exp(−β · score(h))  =  argmin_Q  E_Q[score] + KL(Q, P) / β
//! ```
//!
//! All exponential aggregations go through a max-shifted log-sum-exp.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// The set of predictors a measure lives on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum HypothesisSpace {
    Finite { labels: Arc<[String]> },
    Euclidean { dim: usize },
}

impl HypothesisSpace {
    pub fn finite<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::domain("finite hypothesis space needs at least one hypothesis"));
        }
        Ok(HypothesisSpace::Finite { labels: labels.into() })
    }

    /// Finite space labelled `h0, h1, ...`.
    pub fn indexed(size: usize) -> Result<Self> {
        Self::finite((0..size).map(|i| format!("h{i}")))
    }

    pub fn euclidean(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("euclidean hypothesis space needs dim >= 1"));
        }
        Ok(HypothesisSpace::Euclidean { dim })
    }

    /// Number of hypotheses (finite) or the dimension (euclidean).
    pub fn size(&self) -> usize {
        match self {
            HypothesisSpace::Finite { labels } => labels.len(),
            HypothesisSpace::Euclidean { dim } => *dim,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, HypothesisSpace::Finite { .. })
    }

    pub fn labels(&self) -> Option<&[String]> {
        match self {
            HypothesisSpace::Finite { labels } => Some(labels),
            HypothesisSpace::Euclidean { .. } => None,
        }
    }

    /// Structural equality, short-circuiting on shared label storage.
    pub fn same_as(&self, other: &Self) -> bool {
        match (self, other) {
            (HypothesisSpace::Finite { labels: a }, HypothesisSpace::Finite { labels: b }) => {
                Arc::ptr_eq(a, b) || a == b
            }
            (HypothesisSpace::Euclidean { dim: a }, HypothesisSpace::Euclidean { dim: b }) => a == b,
            _ => false,
        }
    }
}

/// Parametric form of a [`PosteriorMeasure`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MeasureForm<F> {
    Categorical { weights: Vec<F> },
    DiagGaussian { mean: Vec<F>, variance: Vec<F> },
}

/// A prior or posterior over a [`HypothesisSpace`].
///
/// Fields are private so the invariants (simplex weights, positive
/// variances, form matching the support) hold for every value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PosteriorMeasure<F> {
    support: HypothesisSpace,
    form: MeasureForm<F>,
}

impl<F: Scalar> PosteriorMeasure<F> {
    pub fn categorical(support: HypothesisSpace, weights: Vec<F>) -> Result<Self> {
        let HypothesisSpace::Finite { labels } = &support else {
            return Err(Error::domain("categorical measure requires a finite hypothesis space"));
        };
        if weights.len() != labels.len() {
            return Err(Error::domain(format!("expected {} weights, got {}", labels.len(), weights.len())));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < F::zero()) {
            return Err(Error::domain("categorical weights must be finite and nonnegative"));
        }
        let total: F = weights.iter().copied().sum();
        if (total - F::one()).abs() > F::simplex_tolerance(weights.len()) {
            return Err(Error::domain(format!("categorical weights sum to {total}, not 1")));
        }
        Ok(PosteriorMeasure { support, form: MeasureForm::Categorical { weights } })
    }

    pub fn uniform(support: HypothesisSpace) -> Result<Self> {
        let n = support.size();
        if !support.is_finite() {
            return Err(Error::domain("uniform measure requires a finite hypothesis space"));
        }
        let w = F::one() / F::from_count(n);
        Self::categorical(support, vec![w; n])
    }

    pub fn point_mass(support: HypothesisSpace, index: usize) -> Result<Self> {
        let n = support.size();
        if index >= n {
            return Err(Error::domain(format!("point mass index {index} out of range {n}")));
        }
        let mut weights = vec![F::zero(); n];
        weights[index] = F::one();
        Self::categorical(support, weights)
    }

    /// Builds a categorical from unnormalized log-weights (`-inf` allowed).
    pub fn from_log_weights(support: HypothesisSpace, log_weights: &[F]) -> Result<Self> {
        if log_weights.iter().any(|x| x.is_nan() || *x == F::infinity()) {
            return Err(Error::domain("log-weights must not be NaN or +inf"));
        }
        let norm = log_sum_exp(log_weights);
        if norm == F::neg_infinity() {
            return Err(Error::domain("all weights are zero"));
        }
        let mut weights: Vec<F> = log_weights.iter().map(|&lw| (lw - norm).exp()).collect();
        // lse normalization is exact up to rounding; renormalize the residue
        let total: F = weights.iter().copied().sum();
        for w in &mut weights {
            *w = *w / total;
        }
        Self::categorical(support, weights)
    }

    pub fn gaussian(support: HypothesisSpace, mean: Vec<F>, variance: Vec<F>) -> Result<Self> {
        let HypothesisSpace::Euclidean { dim } = support else {
            return Err(Error::domain("gaussian measure requires a euclidean hypothesis space"));
        };
        if mean.len() != dim || variance.len() != dim {
            return Err(Error::domain(format!("gaussian parameters must have length {dim}")));
        }
        if mean.iter().any(|m| !m.is_finite()) {
            return Err(Error::domain("gaussian mean must be finite"));
        }
        if variance.iter().any(|v| !v.is_finite() || *v <= F::zero()) {
            return Err(Error::domain("gaussian variances must be finite and strictly positive"));
        }
        Ok(PosteriorMeasure { support, form: MeasureForm::DiagGaussian { mean, variance } })
    }

    pub fn support(&self) -> &HypothesisSpace {
        &self.support
    }

    pub fn form(&self) -> &MeasureForm<F> {
        &self.form
    }

    /// Categorical weights; `None` for Gaussians.
    pub fn weights(&self) -> Option<&[F]> {
        match &self.form {
            MeasureForm::Categorical { weights } => Some(weights),
            MeasureForm::DiagGaussian { .. } => None,
        }
    }

    fn categorical_weights(&self, what: &str) -> Result<&[F]> {
        self.weights().ok_or_else(|| Error::domain(format!("{what} requires a categorical measure")))
    }

    /// `E_Q[values]` over a finite support, skipping zero-mass atoms.
    pub fn expect(&self, values: &[F]) -> Result<F> {
        let w = self.categorical_weights("expectation")?;
        if values.len() != w.len() {
            return Err(Error::domain("value table does not match the support size"));
        }
        Ok(w.iter().zip(values).filter(|(wi, _)| **wi > F::zero()).map(|(&wi, &v)| wi * v).sum())
    }

    /// Total variation distance between two categoricals on the same support.
    pub fn total_variation(&self, other: &Self) -> Result<F> {
        check_compatible(self, other)?;
        let a = self.categorical_weights("total variation")?;
        let b = other.categorical_weights("total variation")?;
        Ok(a.iter().zip(b).map(|(x, y)| (*x - *y).abs()).sum::<F>() * F::lit(0.5))
    }

    /// Product of finite categoricals, flattened in row-major order of the factors.
    pub fn product(factors: &[Self]) -> Result<Self> {
        let mut labels = vec![String::new()];
        let mut weights = vec![F::one()];
        for (k, f) in factors.iter().enumerate() {
            let fw = f.categorical_weights("product")?;
            let fl = f.support.labels().expect("categorical has labels");
            let mut nl = Vec::with_capacity(labels.len() * fl.len());
            let mut nw = Vec::with_capacity(weights.len() * fw.len());
            for (l, w) in labels.iter().zip(&weights) {
                for (fl, fw) in fl.iter().zip(fw) {
                    nl.push(if k == 0 { fl.clone() } else { format!("{l},{fl}") });
                    nw.push(*w * *fw);
                }
            }
            labels = nl;
            weights = nw;
        }
        if factors.is_empty() {
            return Err(Error::domain("product of zero factors"));
        }
        let total: F = weights.iter().copied().sum();
        weights.iter_mut().for_each(|w| *w = *w / total);
        Self::categorical(HypothesisSpace::finite(labels)?, weights)
    }
}

impl<F: Scalar> fmt::Display for PosteriorMeasure<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.form {
            MeasureForm::Categorical { weights } => {
                write!(f, "Categorical[")?;
                for (i, w) in weights.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{w}")?;
                }
                write!(f, "]")
            }
            MeasureForm::DiagGaussian { mean, variance } => {
                write!(f, "DiagGaussian(dim={}, mean[0]={}, var[0]={})", mean.len(), mean[0], variance[0])
            }
        }
    }
}

pub type ScoreFn<F> = Arc<dyn Fn(&[F]) -> F + Send + Sync>;

/// Score (ψ, or an empirical objective) evaluated on a hypothesis space.
#[derive(Clone)]
pub enum ScoreFunction<F> {
    /// One value per hypothesis of a finite space.
    Table(Vec<F>),
    /// A callable on hypothesis vectors of a euclidean space.
    Callable(ScoreFn<F>),
}

impl<F: Scalar> ScoreFunction<F> {
    pub fn table(values: Vec<F>) -> Self {
        ScoreFunction::Table(values)
    }

    pub fn constant(size: usize, c: F) -> Self {
        ScoreFunction::Table(vec![c; size])
    }

    pub fn callable(f: impl Fn(&[F]) -> F + Send + Sync + 'static) -> Self {
        ScoreFunction::Callable(Arc::new(f))
    }

    /// Table values checked against a finite support.
    pub fn values_on(&self, space: &HypothesisSpace) -> Result<&[F]> {
        match (self, space) {
            (ScoreFunction::Table(v), HypothesisSpace::Finite { labels }) => {
                if v.len() != labels.len() {
                    Err(Error::domain(format!(
                        "score table has {} entries for a support of size {}",
                        v.len(),
                        labels.len()
                    )))
                } else if v.iter().any(|x| x.is_nan()) {
                    Err(Error::domain("score table contains NaN"))
                } else {
                    Ok(v)
                }
            }
            _ => Err(Error::domain("score table requires a finite hypothesis space")),
        }
    }

    pub fn evaluate_at(&self, h: &[F]) -> Result<F> {
        match self {
            ScoreFunction::Callable(f) => Ok(f(h)),
            ScoreFunction::Table(_) => Err(Error::domain("table scores are indexed, not evaluated at vectors")),
        }
    }
}

impl<F: fmt::Debug> fmt::Debug for ScoreFunction<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScoreFunction::Table(v) => f.debug_tuple("Table").field(v).finish(),
            ScoreFunction::Callable(_) => f.write_str("Callable(..)"),
        }
    }
}

/// `log Σ exp(x_i)` with the maximum shifted out.
///
/// Returns `-inf` for an empty slice or all `-inf` entries, `+inf` if any
/// entry is `+inf`.
pub fn log_sum_exp<F: Scalar>(xs: &[F]) -> F {
    let max = xs.iter().copied().fold(F::neg_infinity(), F::max);
    if max == F::neg_infinity() || max == F::infinity() {
        return max;
    }
    let s: F = xs.iter().map(|&x| (x - max).exp()).sum();
    max + s.ln()
}

/// `log E_P[exp(ψ)]` for a categorical `P`, i.e. `lse(log p_i + ψ_i)` over atoms with `p_i > 0`.
pub fn log_expect_exp<F: Scalar>(p: &PosteriorMeasure<F>, psi: &[F]) -> Result<F> {
    let w = p.categorical_weights("log E_P[exp]")?;
    if psi.len() != w.len() {
        return Err(Error::domain("value table does not match the support size"));
    }
    let terms: Vec<F> = w.iter().zip(psi).filter(|(wi, _)| **wi > F::zero()).map(|(&wi, &x)| wi.ln() + x).collect();
    Ok(log_sum_exp(&terms))
}

fn check_compatible<F: Scalar>(q: &PosteriorMeasure<F>, p: &PosteriorMeasure<F>) -> Result<()> {
    if !q.support.same_as(&p.support) {
        return Err(Error::domain("measures live on different hypothesis spaces"));
    }
    match (&q.form, &p.form) {
        (MeasureForm::Categorical { .. }, MeasureForm::Categorical { .. })
        | (MeasureForm::DiagGaussian { .. }, MeasureForm::DiagGaussian { .. }) => Ok(()),
        _ => Err(Error::domain("measures have different parametric forms")),
    }
}

/// `KL(q ‖ p)`; `+inf` when `q` is not absolutely continuous w.r.t. `p`.
pub fn kl_divergence<F: Scalar>(q: &PosteriorMeasure<F>, p: &PosteriorMeasure<F>) -> Result<F> {
    check_compatible(q, p)?;
    let kl = match (&q.form, &p.form) {
        (MeasureForm::Categorical { weights: qw }, MeasureForm::Categorical { weights: pw }) => {
            let mut acc = F::zero();
            for (&qi, &pi) in qw.iter().zip(pw) {
                if qi <= F::zero() {
                    continue;
                }
                if pi <= F::zero() {
                    return Ok(F::infinity());
                }
                acc = acc + qi * (qi / pi).ln();
            }
            acc
        }
        (
            MeasureForm::DiagGaussian { mean: mq, variance: vq },
            MeasureForm::DiagGaussian { mean: mp, variance: vp },
        ) => {
            let half = F::lit(0.5);
            mq.iter()
                .zip(vq)
                .zip(mp.iter().zip(vp))
                .map(|((&m1, &v1), (&m2, &v2))| {
                    let ratio = v1 / v2;
                    let d = m2 - m1;
                    half * (ratio + d * d / v2 - F::one() - ratio.ln())
                })
                .sum()
        }
        _ => unreachable!("checked by check_compatible"),
    };
    Ok(kl.max(F::zero()))
}

/// Sum of factor-wise KLs, i.e. the KL between the two product measures.
pub fn kl_divergence_product<F: Scalar>(qs: &[PosteriorMeasure<F>], ps: &[PosteriorMeasure<F>]) -> Result<F> {
    if qs.len() != ps.len() {
        return Err(Error::domain("product measures have different numbers of factors"));
    }
    qs.iter().zip(ps).map(|(q, p)| kl_divergence(q, p)).sum()
}

/// Both sides of `E_Q[ψ] ≤ KL(Q, P) + log E_P[exp ψ]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChangeOfMeasureGap<F> {
    pub lhs: F,
    pub rhs: F,
    pub slack: F,
}

pub fn change_of_measure_gap<F: Scalar>(
    psi: &ScoreFunction<F>,
    q: &PosteriorMeasure<F>,
    p: &PosteriorMeasure<F>,
) -> Result<ChangeOfMeasureGap<F>> {
    check_compatible(q, p)?;
    let values = psi.values_on(q.support())?;
    let lhs = q.expect(values)?;
    let kl = kl_divergence(q, p)?;
    let rhs = if kl == F::infinity() { F::infinity() } else { kl + log_expect_exp(p, values)? };
    let slack = if rhs == F::infinity() { F::infinity() } else { rhs - lhs };
    Ok(ChangeOfMeasureGap { lhs, rhs, slack })
}

/// Gibbs posterior `Q*(h) ∝ P(h) exp(−β score(h))`.
pub fn gibbs_posterior<F: Scalar>(
    p: &PosteriorMeasure<F>,
    score: &ScoreFunction<F>,
    beta: F,
) -> Result<PosteriorMeasure<F>> {
    if !(beta > F::zero()) || !beta.is_finite() {
        return Err(Error::domain(format!("gibbs temperature must be positive and finite, got {beta}")));
    }
    let pw = p.categorical_weights("gibbs posterior")?;
    let values = score.values_on(p.support())?;
    let log_w: Vec<F> = pw
        .iter()
        .zip(values)
        .map(|(&wi, &s)| {
            if wi <= F::zero() {
                F::neg_infinity()
            } else {
                let penalty = beta * s;
                // beta * 1e308 may overflow to +inf: that atom gets no mass
                if penalty == F::infinity() {
                    F::neg_infinity()
                } else {
                    wi.ln() - penalty
                }
            }
        })
        .collect();
    PosteriorMeasure::from_log_weights(p.support().clone(), &log_w)
        .map_err(|_| Error::domain("gibbs posterior has no mass: all prior weights vanish under the score"))
}

/// The objective `E_Q[score] + KL(Q, P) / β` minimized by [`gibbs_posterior`].
pub fn gibbs_objective<F: Scalar>(
    q: &PosteriorMeasure<F>,
    p: &PosteriorMeasure<F>,
    score: &ScoreFunction<F>,
    beta: F,
) -> Result<F> {
    let values = score.values_on(q.support())?;
    Ok(q.expect(values)? + kl_divergence(q, p)? / beta)
}
