//! Ensemble parametrization, index shifts and soft-edge scaling parameters.
//!
//! Levels are scaled so that the weights are `exp(-c x^2)` (Gaussian) or
//! `x^alpha exp(-c x)` (Laguerre) with `c = 1/2` for beta = 1 and `c = 1`
//! for beta = 2, 4. The Laguerre exponent is carried through the Wishart
//! parameter `p = n - 1 + 2 (alpha + 1) / beta`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Beta {
    Orthogonal,
    Unitary,
    Symplectic,
}

impl Beta {
    pub fn new(beta: u32) -> Result<Self> {
        match beta {
            1 => Ok(Beta::Orthogonal),
            2 => Ok(Beta::Unitary),
            4 => Ok(Beta::Symplectic),
            b => Err(Error::InvalidBeta(b)),
        }
    }

    pub fn value(self) -> u32 {
        match self {
            Beta::Orthogonal => 1,
            Beta::Unitary => 2,
            Beta::Symplectic => 4,
        }
    }

    /// Scale constant of the weight function.
    pub fn weight_scale(self) -> f64 {
        match self {
            Beta::Orthogonal => 0.5,
            _ => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Gaussian,
    Laguerre,
}

/// An n-dimensional Gaussian or Laguerre beta-ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub family: Family,
    pub beta: Beta,
    pub n: usize,
    /// Wishart parameter; `None` for the Gaussian family.
    pub p: Option<f64>,
}

impl EnsembleSpec {
    pub fn gaussian(beta: Beta, n: usize) -> Result<Self> {
        let spec = EnsembleSpec {
            family: Family::Gaussian,
            beta,
            n,
            p: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn laguerre(beta: Beta, n: usize, p: f64) -> Result<Self> {
        let spec = EnsembleSpec {
            family: Family::Laguerre,
            beta,
            n,
            p: Some(p),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidEnsemble(
                "dimension n must be positive".into(),
            ));
        }
        match (self.family, self.p) {
            (Family::Gaussian, None) => Ok(()),
            (Family::Gaussian, Some(_)) => Err(Error::InvalidEnsemble(
                "Gaussian ensembles take no Wishart parameter".into(),
            )),
            (Family::Laguerre, None) => Err(Error::InvalidEnsemble(
                "Laguerre ensembles need a Wishart parameter p".into(),
            )),
            (Family::Laguerre, Some(p)) => {
                if p.is_finite() && p > self.n as f64 - 1.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidEnsemble(format!(
                        "Wishart parameter p = {p} must exceed n - 1 = {}",
                        self.n as f64 - 1.0
                    )))
                }
            }
        }
    }

    /// Laguerre exponent alpha of the weight `x^alpha exp(-c x)`.
    pub fn alpha(&self) -> Option<f64> {
        let b = self.beta.value() as f64;
        self.p.map(|p| b * (p - self.n as f64 + 1.0) / 2.0 - 1.0)
    }

    /// Shifted indices `(n', p')` of the expansion frame.
    pub fn shifted_index(&self) -> EffectiveIndex {
        let shift = |x: f64| match self.beta {
            Beta::Orthogonal => x - 0.5,
            Beta::Unitary => x,
            Beta::Symplectic => 2.0 * x + 0.5,
        };
        EffectiveIndex {
            family: self.family,
            n: shift(self.n as f64),
            p: self.p.map(shift),
        }
    }

    /// Scaling parameters evaluated at the shifted index.
    pub fn expansion_scaling(&self) -> Result<ScalingParams> {
        scaling(&self.shifted_index())
    }
}

/// `n'`: the half-integer shift that removes odd powers of `h^(1/2)`.
pub fn n_prime(beta: u32, n: usize) -> Result<f64> {
    let beta = Beta::new(beta)?;
    if n == 0 {
        return Err(Error::InvalidEnsemble("n must be at least 1".into()));
    }
    let n = n as f64;
    Ok(match beta {
        Beta::Orthogonal => n - 0.5,
        Beta::Unitary => n,
        Beta::Symplectic => 2.0 * n + 0.5,
    })
}

/// An ensemble index that may be real (half-integer shifts, real Wishart parameter).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveIndex {
    pub family: Family,
    pub n: f64,
    pub p: Option<f64>,
}

impl EffectiveIndex {
    pub fn gaussian(n: f64) -> Self {
        EffectiveIndex {
            family: Family::Gaussian,
            n,
            p: None,
        }
    }

    pub fn laguerre(n: f64, p: f64) -> Self {
        EffectiveIndex {
            family: Family::Laguerre,
            n,
            p: Some(p),
        }
    }
}

/// Centering `mu`, scale `sigma`, expansion parameter `h` and `tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub mu: f64,
    pub sigma: f64,
    pub h: f64,
    pub tau: f64,
    pub n_prime: f64,
}

impl ScalingParams {
    /// Level `x = mu + sigma * s`.
    pub fn level(&self, s: f64) -> f64 {
        self.mu + self.sigma * s
    }

    /// Scaled variable `s = (x - mu) / sigma`.
    pub fn scaled(&self, x: f64) -> f64 {
        (x - self.mu) / self.sigma
    }
}

pub fn scaling(index: &EffectiveIndex) -> Result<ScalingParams> {
    let nu = index.n;
    if !(nu > 0.0) {
        return Err(Error::NonPositiveIndex(nu));
    }
    match index.family {
        Family::Gaussian => {
            let mu = (2.0 * nu).sqrt();
            let sigma = std::f64::consts::FRAC_1_SQRT_2 * nu.powf(-1.0 / 6.0);
            Ok(ScalingParams {
                mu,
                sigma,
                h: 0.25 * nu.powf(-2.0 / 3.0),
                tau: 0.0,
                n_prime: nu,
            })
        }
        Family::Laguerre => {
            let p = index.p.ok_or_else(|| {
                Error::InvalidEnsemble("Laguerre scaling needs a Wishart parameter".into())
            })?;
            if !(p > 0.0) {
                return Err(Error::NonPositiveIndex(p));
            }
            let (sn, sp) = (nu.sqrt(), p.sqrt());
            let sum = sn + sp;
            let inv = 1.0 / sn + 1.0 / sp;
            let mu = sum * sum;
            let sigma = sum * inv.cbrt();
            let tau = 4.0 / (sum * inv);
            let h = 0.25 * inv.powf(4.0 / 3.0);
            Ok(ScalingParams {
                mu,
                sigma,
                h,
                tau,
                n_prime: nu,
            })
        }
    }
}
