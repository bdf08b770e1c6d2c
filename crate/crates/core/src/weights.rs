//! Weight parameters for the ball weight
//! `W(x) = (1 - |x|^2)^alpha * prod_i |x_i|^{gamma_i}`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dimension, singularity exponents and the scalars derived from them.
///
/// `alpha > -1` and every `gamma_i > -1` are exactly the constraints that
/// keep the weight integrable on the ball.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightParams<S> {
    dim: usize,
    alpha: S,
    gamma: Vec<S>,
}

impl<S: Scalar> WeightParams<S> {
    pub fn new(dim: usize, alpha: S, gamma: Vec<S>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidWeight("dimension must be positive".into()));
        }
        if gamma.len() != dim {
            return Err(Error::InvalidWeight(format!(
                "gamma has {} entries but dimension is {dim}",
                gamma.len()
            )));
        }
        if !(alpha.clone() + S::one()).is_positive() {
            return Err(Error::InvalidWeight(format!(
                "alpha = {alpha} must exceed -1"
            )));
        }
        for (i, g) in gamma.iter().enumerate() {
            if !(g.clone() + S::one()).is_positive() {
                return Err(Error::InvalidWeight(format!(
                    "gamma[{i}] = {g} must exceed -1"
                )));
            }
        }
        Ok(WeightParams { dim, alpha, gamma })
    }

    /// `gamma = 0` weight of the same dimension and `alpha`.
    pub fn without_gamma(&self) -> Self {
        WeightParams {
            dim: self.dim,
            alpha: self.alpha.clone(),
            gamma: vec![S::zero(); self.dim],
        }
    }

    /// Same parameters with `alpha` raised by `shift`.
    pub fn alpha_shifted(&self, shift: u32) -> Self {
        WeightParams {
            dim: self.dim,
            alpha: self.alpha.clone() + S::from_int(shift as i64),
            gamma: self.gamma.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alpha(&self) -> &S {
        &self.alpha
    }

    pub fn gamma(&self, axis: usize) -> &S {
        &self.gamma[axis]
    }

    pub fn gammas(&self) -> &[S] {
        &self.gamma
    }

    /// `s(gamma) = sum_i gamma_i`.
    pub fn s_gamma(&self) -> S {
        self.gamma
            .iter()
            .fold(S::zero(), |acc, g| acc + g.clone())
    }

    /// Spectral parameter `lambda = alpha + s(gamma)/2 + d/2`.
    pub fn lambda(&self) -> S {
        let half = S::from_ratio(1, 2);
        self.alpha.clone()
            + half.clone() * self.s_gamma()
            + half * S::from_int(self.dim as i64)
    }

    /// Sturm-Liouville eigenvalue `n (n + 2 lambda)` of degree `n`.
    pub fn eigenvalue(&self, n: u32) -> S {
        let n = S::from_int(n as i64);
        n.clone() * (n + S::from_int(2) * self.lambda())
    }

    /// Shift `K = max(0, -1 - 2 lambda) + 1`, making the shifted eigenvalues
    /// `n(n + 2 lambda) + K` strictly positive for all `n >= 0`.
    pub fn k_shift(&self) -> S {
        let neg = -S::one() - S::from_int(2) * self.lambda();
        if neg.is_positive() {
            neg + S::one()
        } else {
            S::one()
        }
    }

    /// Difference bound `M = 2 |lambda| sum_i |gamma_i| + (sum_i |gamma_i|)^2`,
    /// the explicit constant dominating the reflection terms of the
    /// Sturm-Liouville bilinear form.
    pub fn m_bound(&self) -> S {
        let abs_sum = self
            .gamma
            .iter()
            .fold(S::zero(), |acc, g| acc + g.abs());
        S::from_int(2) * self.lambda().abs() * abs_sum.clone() + abs_sum.clone() * abs_sum
    }

    /// Jacobi second parameter `beta' = s(gamma)/2 + (d-2)/2` of the radial
    /// profile of orthogonal polynomials for this weight.
    pub fn beta_prime(&self) -> S {
        let half = S::from_ratio(1, 2);
        half.clone() * self.s_gamma() + half * S::from_int(self.dim as i64 - 2)
    }

    /// Restriction to the first coordinate (`d = 1` corner case).
    pub fn first_axis(&self) -> Self {
        WeightParams {
            dim: 1,
            alpha: self.alpha.clone(),
            gamma: vec![self.gamma[0].clone()],
        }
    }

    pub fn to_f64(&self) -> WeightParams<f64> {
        WeightParams {
            dim: self.dim,
            alpha: self.alpha.to_f64(),
            gamma: self.gamma.iter().map(|g| g.to_f64()).collect(),
        }
    }
}

impl WeightParams<f64> {
    /// Lossless lift into the rational backend: every finite `f64` is
    /// exactly a binary rational.
    pub fn to_exact(&self) -> WeightParams<crate::scalar::Rational> {
        use num_traits::FromPrimitive;
        let lift = |x: f64| {
            crate::scalar::Rational::from_f64(x).expect("finite weight parameter")
        };
        WeightParams {
            dim: self.dim,
            alpha: lift(self.alpha),
            gamma: self.gamma.iter().map(|g| lift(*g)).collect(),
        }
    }
}
