//! Stock data and reward families with closed-form moments.
//!
//! Coverage experiments adjudicate violations against exact risks, so every
//! family here exposes raw moments up to order four (possibly `+inf`) and,
//! where one exists, the closed form of `E|h − z|`.

use rand::Rng;
use rand_distr::{Distribution, LogNormal, Normal, Pareto, StudentT};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum StockDistribution {
    Constant {
        value: f64,
    },
    Uniform {
        low: f64,
        high: f64,
    },
    Gaussian {
        mean: f64,
        sd: f64,
    },
    /// `exp(N(mu, sigma²))`.
    LogNormal {
        mu: f64,
        sigma: f64,
    },
    /// Density `shape · scale^shape / x^(shape+1)` on `[scale, ∞)`.
    Pareto {
        scale: f64,
        shape: f64,
    },
    /// `loc + scale · T_df`.
    StudentT {
        loc: f64,
        scale: f64,
        df: f64,
    },
}

fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

impl StockDistribution {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            StockDistribution::Constant { value } => value.is_finite(),
            StockDistribution::Uniform { low, high } => low.is_finite() && high.is_finite() && low < high,
            StockDistribution::Gaussian { mean, sd } => mean.is_finite() && sd > 0.0 && sd.is_finite(),
            StockDistribution::LogNormal { mu, sigma } => mu.is_finite() && sigma > 0.0 && sigma.is_finite(),
            StockDistribution::Pareto { scale, shape } => scale > 0.0 && shape > 2.0 && scale.is_finite(),
            StockDistribution::StudentT { loc, scale, df } => loc.is_finite() && scale > 0.0 && df > 2.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain(format!("invalid parameters (finite variance required) for {self:?}")))
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            StockDistribution::Constant { value } => value,
            StockDistribution::Uniform { low, high } => rng.random_range(low..high),
            StockDistribution::Gaussian { mean, sd } => Normal::new(mean, sd).expect("validated").sample(rng),
            StockDistribution::LogNormal { mu, sigma } => LogNormal::new(mu, sigma).expect("validated").sample(rng),
            StockDistribution::Pareto { scale, shape } => Pareto::new(scale, shape).expect("validated").sample(rng),
            StockDistribution::StudentT { loc, scale, df } => {
                loc + scale * StudentT::new(df).expect("validated").sample(rng)
            }
        }
    }

    /// `E[z^k]` for `k ≤ 4`; `+inf` when the moment does not exist.
    pub fn raw_moment(&self, k: u32) -> f64 {
        assert!(k <= 4, "raw moments are provided up to order 4");
        if k == 0 {
            return 1.0;
        }
        let kf = f64::from(k);
        match *self {
            StockDistribution::Constant { value } => value.powi(k as i32),
            StockDistribution::Uniform { low, high } => {
                (high.powi(k as i32 + 1) - low.powi(k as i32 + 1)) / ((kf + 1.0) * (high - low))
            }
            StockDistribution::Gaussian { mean, sd } => {
                let v = sd * sd;
                raw_from_central(mean, v, 0.0, 3.0 * v * v, k)
            }
            StockDistribution::LogNormal { mu, sigma } => (kf * mu + 0.5 * kf * kf * sigma * sigma).exp(),
            StockDistribution::Pareto { scale, shape } => {
                if shape > kf {
                    shape * scale.powi(k as i32) / (shape - kf)
                } else {
                    f64::INFINITY
                }
            }
            StockDistribution::StudentT { loc, scale, df } => {
                let v = scale * scale * df / (df - 2.0);
                let c3 = if df > 3.0 { 0.0 } else { f64::INFINITY };
                let c4 =
                    if df > 4.0 { scale.powi(4) * 3.0 * df * df / ((df - 2.0) * (df - 4.0)) } else { f64::INFINITY };
                raw_from_central(loc, v, c3, c4, k)
            }
        }
    }

    pub fn mean(&self) -> f64 {
        self.raw_moment(1)
    }

    pub fn second_moment(&self) -> f64 {
        self.raw_moment(2)
    }

    pub fn variance(&self) -> f64 {
        match *self {
            StockDistribution::Constant { .. } => 0.0,
            StockDistribution::Gaussian { sd, .. } => sd * sd,
            StockDistribution::LogNormal { mu, sigma } => {
                let s2 = sigma * sigma;
                (s2.exp() - 1.0) * (2.0 * mu + s2).exp()
            }
            StockDistribution::Pareto { scale, shape } => {
                scale * scale * shape / ((shape - 1.0).powi(2) * (shape - 2.0))
            }
            StockDistribution::StudentT { scale, df, .. } => scale * scale * df / (df - 2.0),
            StockDistribution::Uniform { low, high } => (high - low).powi(2) / 12.0,
        }
    }

    /// `E|h − z|`, when a closed form is implemented for the family.
    pub fn mean_abs_deviation_from(&self, h: f64) -> Option<f64> {
        match *self {
            StockDistribution::Constant { value } => Some((h - value).abs()),
            StockDistribution::Uniform { low, high } => {
                let w = high - low;
                let r = if h <= low {
                    (low + high) / 2.0 - h
                } else if h >= high {
                    h - (low + high) / 2.0
                } else {
                    ((h - low).powi(2) + (high - h).powi(2)) / (2.0 * w)
                };
                Some(r)
            }
            StockDistribution::Gaussian { mean, sd } => {
                let t = (h - mean) / sd;
                Some(sd * (2.0 * std_normal_pdf(t) + t * (2.0 * std_normal_cdf(t) - 1.0)))
            }
            // E|h − z| = E z − h + 2 E[(h − z)^+]
            StockDistribution::LogNormal { mu, sigma } => {
                let m1 = self.mean();
                let below = if h > 0.0 {
                    let a = (h.ln() - mu) / sigma;
                    h * std_normal_cdf(a) - m1 * std_normal_cdf(a - sigma)
                } else {
                    0.0
                };
                Some(m1 - h + 2.0 * below)
            }
            StockDistribution::Pareto { scale, shape } => {
                let m1 = self.mean();
                let below = if h > scale {
                    // ∫_scale^h F(t) dt with F(t) = 1 − (scale/t)^shape
                    let tail = scale.powf(shape) * (h.powf(1.0 - shape) - scale.powf(1.0 - shape)) / (1.0 - shape);
                    (h - scale) - tail
                } else {
                    0.0
                };
                Some(m1 - h + 2.0 * below)
            }
            StockDistribution::StudentT { .. } => None,
        }
    }

    /// Largest possible value of `|h − z|` over the support, `+inf` when unbounded.
    pub fn abs_envelope(&self, h: f64) -> f64 {
        match *self {
            StockDistribution::Constant { value } => (h - value).abs(),
            StockDistribution::Uniform { low, high } => (h - low).abs().max((high - h).abs()),
            _ => f64::INFINITY,
        }
    }
}

fn raw_from_central(mu: f64, var: f64, c3: f64, c4: f64, k: u32) -> f64 {
    match k {
        1 => mu,
        2 => mu * mu + var,
        3 => mu.powi(3) + 3.0 * mu * var + c3,
        4 => {
            if c3.is_infinite() || c4.is_infinite() {
                f64::INFINITY
            } else {
                mu.powi(4) + 6.0 * mu * mu * var + 4.0 * mu * c3 + c4
            }
        }
        _ => unreachable!(),
    }
}
