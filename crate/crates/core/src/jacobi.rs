//! Jacobi polynomial utilities: three-term recurrence evaluation, exact
//! coefficient expansion, weighted norms and the radial composition
//! `P_n(2|x|^2 - 1)` that generates the radial orthogonal polynomials on
//! the ball.

use crate::error::{Error, Result};
use crate::multipoly::Polynomial;
use crate::scalar::Scalar;

fn check_params(a: f64, b: f64) -> Result<()> {
    if a <= -1.0 || b <= -1.0 {
        return Err(Error::InvalidWeight(format!(
            "Jacobi parameters must exceed -1, got ({a}, {b})"
        )));
    }
    Ok(())
}

/// Evaluate `P_n^{(a,b)}(x)` by the three-term recurrence.
pub fn jacobi_eval(n: u32, a: f64, b: f64, x: f64) -> Result<f64> {
    check_params(a, b)?;
    if n == 0 {
        return Ok(1.0);
    }
    let mut prev = 1.0;
    let mut cur = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * x;
    for m in 2..=n {
        let m = m as f64;
        let c = 2.0 * m + a + b;
        let a1 = 2.0 * m * (m + a + b) * (c - 2.0);
        let a2 = (c - 1.0) * (a * a - b * b);
        let a3 = (c - 1.0) * c * (c - 2.0);
        let a4 = 2.0 * (m + a - 1.0) * (m + b - 1.0) * c;
        let next = ((a2 + a3 * x) * cur - a4 * prev) / a1;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// `P_n^{(a,b)}` as a univariate [`Polynomial`], built by the same
/// recurrence on exact coefficients.
pub fn jacobi_poly<S: Scalar>(n: u32, a: &S, b: &S) -> Polynomial<S> {
    let x = Polynomial::<S>::var(1, 0);
    if n == 0 {
        return Polynomial::one(1);
    }
    let half = S::from_ratio(1, 2);
    let mut prev = Polynomial::one(1);
    let mut cur = Polynomial::constant(1, half.clone() * (a.clone() - b.clone())).add(
        &x.scale(&(half * (a.clone() + b.clone() + S::from_int(2)))),
    );
    for m in 2..=n {
        let m = S::from_int(m as i64);
        let c = S::from_int(2) * m.clone() + a.clone() + b.clone();
        let a1 = S::from_int(2) * m.clone() * (m.clone() + a.clone() + b.clone()) * (c.clone() - S::from_int(2));
        let a2 = (c.clone() - S::one()) * (a.clone() * a.clone() - b.clone() * b.clone());
        let a3 = (c.clone() - S::one()) * c.clone() * (c.clone() - S::from_int(2));
        let a4 = S::from_int(2)
            * (m.clone() + a.clone() - S::one())
            * (m + b.clone() - S::one())
            * c;
        let next = cur
            .scale(&a2)
            .add(&x.mul(&cur).scale(&a3))
            .sub(&prev.scale(&a4))
            .scale(&(S::one() / a1));
        prev = cur;
        cur = next;
    }
    cur
}

/// The radial polynomial `P_n^{(a,b)}(2 |x|^2 - 1)` in dimension `dim`.
pub fn jacobi_radial<S: Scalar>(n: u32, a: &S, b: &S, dim: usize) -> Polynomial<S> {
    let coeffs = jacobi_poly(n, a, b);
    // t = 2 |x|^2 - 1, substituted by Horner on the 1-D coefficients.
    let mut t = Polynomial::<S>::one(dim).neg();
    for axis in 0..dim {
        t = t.add(&Polynomial::var(dim, axis).pow(2).scale(&S::from_int(2)));
    }
    let mut acc = Polynomial::zero(dim);
    for k in (0..=n as usize).rev(){
        let mut idx = crate::multipoly::MultiIndex::zero(1);
        for _ in 0..k {
            idx = idx.plus(&crate::multipoly::MultiIndex::unit(1, 0));
        }
        let c = coeffs.coeff(&idx);
        acc = acc.mul(&t).add(&Polynomial::constant(dim, c));
    }
    acc
}

/// Squared weighted norm `h_n^{(a,b)} = int_{-1}^{1} P_n^2 (1-x)^a (1+x)^b dx`
/// evaluated through log-Gamma; the `n = 0` case uses the Beta-function form.
pub fn jacobi_norm(n: u32, a: f64, b: f64) -> Result<f64> {
    check_params(a, b)?;
    let lg = libm::lgamma;
    if n == 0 {
        let log = (a + b + 1.0) * std::f64::consts::LN_2 + lg(a + 1.0) + lg(b + 1.0)
            - lg(a + b + 2.0);
        return Ok(log.exp());
    }
    let n = n as f64;
    let log = (a + b + 1.0) * std::f64::consts::LN_2 + lg(n + a + 1.0) + lg(n + b + 1.0)
        - lg(n + 1.0)
        - lg(n + a + b + 1.0);
    Ok(log.exp() / (2.0 * n + a + b + 1.0))
}
