//! Exact weighted integration of polynomials against the ball weight and all
//! the inner products built on it: the weighted L2 pairing (with integer
//! raises of `alpha`), the Dunkl-Sobolev pairing, the Sturm-Liouville
//! bilinear forms and the equivalent first-order inner product.
//!
//! All values are unit-mass normalized: `moment(0) = 1` exactly. This keeps
//! every moment rational for rational parameters and leaves eigenvalues,
//! ratios and projection residuals unchanged. The absolute mass of the
//! weight is available separately for reporting.

use std::collections::HashMap;
use std::sync::RwLock;

use crate::dunkl::{dunkl, dunkl_angular, dunkl_gradient, one_minus_norm_sq, sturm_liouville, SturmLiouvilleForm};
use crate::error::{Error, Result};
use crate::multipoly::{MultiIndex, Polynomial};
use crate::scalar::{pochhammer, Scalar};
use crate::weights::WeightParams;

/// Moment cache and inner-product engine for one weight.
///
/// Concurrent reads are lock-cheap; cache inserts are guarded and
/// last-write-wins (moment values are deterministic, so racing writers
/// agree).
pub struct MomentEngine<S> {
    w: WeightParams<S>,
    cache: RwLock<HashMap<MultiIndex, S>>,
}

impl<S: Scalar> MomentEngine<S> {
    pub fn new(w: WeightParams<S>) -> Self {
        MomentEngine {
            w,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn weight(&self) -> &WeightParams<S> {
        &self.w
    }

    /// Unit-mass moment of the monomial `x^a`. Zero whenever any exponent is
    /// odd; for `a = 2b` the value is
    /// `prod_i ((gamma_i + 1)/2)_{b_i} / (lambda + 1)_{|b|}`
    /// (rising factorials), rational for rational parameters.
    pub fn moment(&self, a: &MultiIndex) -> S {
        assert_eq!(a.dim(), self.w.dim(), "moment index dimension mismatch");
        if !a.all_even() {
            return S::zero();
        }
        if let Some(hit) = self.cache.read().expect("moment cache poisoned").get(a) {
            return hit.clone();
        }
        let half = S::from_ratio(1, 2);
        let mut numerator = S::one();
        let mut total_b = 0;
        for axis in 0..a.dim() {
            let b = a.get(axis) / 2;
            total_b += b;
            let base = half.clone() * (self.w.gamma(axis).clone() + S::one());
            numerator = numerator * pochhammer(&base, b);
        }
        let denominator = pochhammer(&(self.w.lambda() + S::one()), total_b);
        let value = numerator / denominator;
        self.cache
            .write()
            .expect("moment cache poisoned")
            .insert(a.clone(), value.clone());
        value
    }

    /// Unit-mass integral of a polynomial (equals its pairing with `1`).
    pub fn integrate(&self, p: &Polynomial<S>) -> S {
        let mut acc = S::zero();
        for (a, c) in p.terms() {
            if a.all_even() {
                acc = acc + c.clone() * self.moment(a);
            }
        }
        acc
    }

    /// `<p, q>` against the weight with `alpha` raised by `alpha_shift`,
    /// computed by expanding `(1 - |x|^2)^shift` into moments.
    pub fn inner_product(&self, p: &Polynomial<S>, q: &Polynomial<S>, alpha_shift: u32) -> S {
        assert_eq!(p.dim(), q.dim(), "polynomial dimension mismatch");
        let mut product = p.mul(q);
        if alpha_shift > 0 {
            product = product.mul(&one_minus_norm_sq(p.dim()).pow(alpha_shift));
        }
        self.integrate(&product)
    }

    pub fn norm_sq(&self, p: &Polynomial<S>, alpha_shift: u32) -> S {
        self.inner_product(p, p, alpha_shift)
    }

    /// Dunkl-Sobolev inner product of order `m`: the weighted L2 pairings of
    /// all `k`-fold Dunkl gradients, `k <= m`, with multinomial multiplicities.
    pub fn sobolev_inner(&self, p: &Polynomial<S>, q: &Polynomial<S>, m: u32) -> S {
        let mut acc = S::zero();
        for k in 0..=m {
            let gp = dunkl_gradient(p, &self.w, k);
            let gq = dunkl_gradient(q, &self.w, k);
            for ((_, mult, dp), (_, _, dq)) in gp.iter().zip(gq.iter()) {
                let pairing = self.inner_product(dp, dq, 0);
                acc = acc + S::from_int(*mult as i64) * pairing;
            }
        }
        acc
    }

    pub fn sobolev_norm_sq(&self, p: &Polynomial<S>, m: u32) -> S {
        self.sobolev_inner(p, p, m)
    }

    /// Sturm-Liouville bilinear form
    /// `B(u,v) = sum_i <D_i u, D_i v>_{alpha+1}
    ///         + sum_{i<j} <D_{i,j} u, D_{i,j} v>
    ///         - 2 lambda sum_i gamma_i <Skew_i u, Skew_i v>
    ///         + sum_{i,j} gamma_i gamma_j <Skew_i Skew_j u, Skew_i Skew_j v>`;
    /// `shifted` adds `K <u, v>`, making the form positive definite.
    pub fn bilinear_b(&self, u: &Polynomial<S>, v: &Polynomial<S>, shifted: bool) -> S {
        let d = self.w.dim();
        let mut acc = S::zero();
        for i in 0..d {
            acc = acc + self.inner_product(&dunkl(u, i, &self.w), &dunkl(v, i, &self.w), 1);
        }
        for i in 0..d {
            for j in (i + 1)..d {
                acc = acc
                    + self.inner_product(
                        &dunkl_angular(u, i, j, &self.w),
                        &dunkl_angular(v, i, j, &self.w),
                        0,
                    );
            }
        }
        let two_lambda = S::from_int(2) * self.w.lambda();
        for i in 0..d {
            let coeff = two_lambda.clone() * self.w.gamma(i).clone();
            acc = acc - coeff * self.inner_product(&u.skew(i), &v.skew(i), 0);
        }
        for i in 0..d {
            for j in 0..d {
                let coeff = self.w.gamma(i).clone() * self.w.gamma(j).clone();
                acc = acc
                    + coeff * self.inner_product(&u.skew(j).skew(i), &v.skew(j).skew(i), 0);
            }
        }
        if shifted {
            acc = acc + self.w.k_shift() * self.inner_product(u, v, 0);
        }
        acc
    }

    /// Equivalent first-order inner product
    /// `<D u, D v> + <S_0 u, S_0 v>`; positive definite on polynomials
    /// because only constants have vanishing Dunkl gradient.
    pub fn equiv_h1_inner(&self, u: &Polynomial<S>, v: &Polynomial<S>) -> S {
        let mut acc = S::zero();
        for j in 0..self.w.dim() {
            acc = acc + self.inner_product(&dunkl(u, j, &self.w), &dunkl(v, j, &self.w), 0);
        }
        // Unit mass makes <S_0 u, S_0 v> = <u, 1> <v, 1>.
        acc + self.integrate(u) * self.integrate(v)
    }

    /// `<L u, v>` with the strong-form Sturm-Liouville operator; equals
    /// `B(u, v)` (the weak form), which the check suite verifies.
    pub fn sturm_liouville_pairing(&self, u: &Polynomial<S>, v: &Polynomial<S>) -> S {
        self.inner_product(&sturm_liouville(u, &self.w, SturmLiouvilleForm::Strong), v, 0)
    }

    /// Absolute mass of the weight over the ball (the Gamma/Beta closed
    /// form), through log-Gamma to avoid overflow. Reporting only; every
    /// internal quantity is unit-mass normalized.
    pub fn mass_absolute(&self) -> f64 {
        let lg = libm::lgamma;
        let wf = self.w.to_f64();
        let mut log = lg(wf.alpha() + 1.0) - lg(wf.lambda() + 1.0);
        for axis in 0..wf.dim() {
            log += lg((wf.gamma(axis) + 1.0) / 2.0);
        }
        log.exp()
    }
}

impl MomentEngine<f64> {
    /// Unit-mass moment of `x^a * prod_i |x_i|^{theta_i}` for real exponent
    /// shifts `theta`. Demands `gamma_i + theta_i > -1` on every shifted
    /// axis; zero whenever some `a_i` is odd. Irrational in general, so this
    /// lives only in the float backend.
    pub fn moment_shifted(&self, a: &MultiIndex, theta: &[f64]) -> Result<f64> {
        assert_eq!(a.dim(), self.w.dim(), "moment index dimension mismatch");
        assert_eq!(theta.len(), self.w.dim(), "theta length mismatch");
        let mut theta_sum = 0.0;
        for axis in 0..self.w.dim() {
            let g = self.w.gamma(axis) + theta[axis];
            if g <= -1.0 {
                return Err(Error::NonIntegrable {
                    axis,
                    value: g,
                });
            }
            theta_sum += theta[axis];
        }
        if !a.all_even() {
            return Ok(0.0);
        }
        if theta.iter().all(|t| *t == 0.0) {
            return Ok(self.moment(a));
        }
        let lg = libm::lgamma;
        let lambda = self.w.lambda();
        let mut log = lg(lambda + 1.0);
        let mut total_b = 0u32;
        for axis in 0..self.w.dim() {
            let b = a.get(axis) / 2;
            total_b += b;
            let gamma = *self.w.gamma(axis);
            log += lg(b as f64 + (gamma + theta[axis] + 1.0) / 2.0) - lg((gamma + 1.0) / 2.0);
        }
        log -= lg(lambda + theta_sum / 2.0 + total_b as f64 + 1.0);
        Ok(log.exp())
    }
}
