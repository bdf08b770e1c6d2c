//! Dunkl operators and the differential-difference operators derived from
//! them: adjoints, angular operators, the h-Laplacian and the
//! Sturm-Liouville operator, all as polynomial-to-polynomial maps.

use crate::multipoly::{MultiIndex, Polynomial};
use crate::scalar::Scalar;
use crate::weights::WeightParams;

/// Dunkl operator along `axis`: `D_j p = d_j p + (gamma_j / 2) rho_j(p)`.
/// Lowers the polynomial degree by at least one.
pub fn dunkl<S: Scalar>(p: &Polynomial<S>, axis: usize, w: &WeightParams<S>) -> Polynomial<S> {
    assert_eq!(p.dim(), w.dim(), "polynomial/weight dimension mismatch");
    let half_gamma = S::from_ratio(1, 2) * w.gamma(axis).clone();
    p.partial_derivative(axis)
        .add(&p.rho(axis).scale(&half_gamma))
}

/// Adjoint-type operator `D*_j p = -(1 - |x|^2) D_j p + 2 (alpha + 1) x_j p`.
/// Raises the degree by at most one and lowers the weight parameter.
pub fn dunkl_star<S: Scalar>(p: &Polynomial<S>, axis: usize, w: &WeightParams<S>) -> Polynomial<S> {
    let dp = dunkl(p, axis, w);
    let shell = one_minus_norm_sq(p.dim());
    let two_ap1 = S::from_int(2) * (w.alpha().clone() + S::one());
    shell
        .mul(&dp)
        .neg()
        .add(&p.mul_monomial(&MultiIndex::unit(p.dim(), axis)).scale(&two_ap1))
}

/// Angular operator `D_{i,j} = x_i D_j - x_j D_i`; the null operator when
/// `i = j`. Preserves both degree and weight parameter.
pub fn dunkl_angular<S: Scalar>(
    p: &Polynomial<S>,
    i: usize,
    j: usize,
    w: &WeightParams<S>,
) -> Polynomial<S> {
    if i == j {
        return Polynomial::zero(p.dim());
    }
    let d = p.dim();
    dunkl(p, j, w)
        .mul_monomial(&MultiIndex::unit(d, i))
        .sub(&dunkl(p, i, w).mul_monomial(&MultiIndex::unit(d, j)))
}

/// h-Laplacian: the sum of squared Dunkl operators.
pub fn h_laplacian<S: Scalar>(p: &Polynomial<S>, w: &WeightParams<S>) -> Polynomial<S> {
    let mut acc = Polynomial::zero(p.dim());
    for j in 0..w.dim() {
        acc = acc.add(&dunkl(&dunkl(p, j, w), j, w));
    }
    acc
}

/// Which algebraic form of the Sturm-Liouville operator to expand.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SturmLiouvilleForm {
    /// `-Delta_h + (x.grad)^2 + 2 lambda (x.grad)`; the cheap default.
    Strong,
    /// Expansion through adjoints, angular operators and reflection terms.
    /// Kept as an independent route so the equality of the two forms is a
    /// test target rather than trusted algebra.
    Product,
}

/// Sturm-Liouville operator whose eigenspaces are the orthogonal polynomial
/// spaces, with eigenvalue `n (n + 2 lambda)` on degree-`n` elements.
pub fn sturm_liouville<S: Scalar>(
    p: &Polynomial<S>,
    w: &WeightParams<S>,
    form: SturmLiouvilleForm,
) -> Polynomial<S> {
    assert_eq!(p.dim(), w.dim(), "polynomial/weight dimension mismatch");
    match form {
        SturmLiouvilleForm::Strong => {
            let euler = p.x_dot_grad();
            let two_lambda = S::from_int(2) * w.lambda();
            h_laplacian(p, w)
                .neg()
                .add(&euler.x_dot_grad())
                .add(&euler.scale(&two_lambda))
        }
        SturmLiouvilleForm::Product => {
            let d = w.dim();
            let mut acc = Polynomial::zero(d);
            for i in 0..d {
                acc = acc.add(&dunkl_star(&dunkl(p, i, w), i, w));
            }
            for i in 0..d {
                for j in (i + 1)..d {
                    acc = acc.sub(&dunkl_angular(&dunkl_angular(p, i, j, w), i, j, w));
                }
            }
            let two_lambda = S::from_int(2) * w.lambda();
            for i in 0..d {
                let coeff = two_lambda.clone() * w.gamma(i).clone();
                acc = acc.sub(&p.skew(i).scale(&coeff));
            }
            for i in 0..d {
                for j in 0..d {
                    let coeff = w.gamma(i).clone() * w.gamma(j).clone();
                    acc = acc.add(&p.skew(j).skew(i).scale(&coeff));
                }
            }
            acc
        }
    }
}

/// Composite Dunkl operator `D_b = D_1^{b_1} ... D_d^{b_d}` (well defined in
/// any application order because the components commute).
pub fn dunkl_multi<S: Scalar>(
    p: &Polynomial<S>,
    b: &MultiIndex,
    w: &WeightParams<S>,
) -> Polynomial<S> {
    let mut q = p.clone();
    for axis in 0..b.dim() {
        for _ in 0..b.get(axis) {
            q = dunkl(&q, axis, w);
        }
    }
    q
}

/// All multi-indices of dimension `dim` with total degree exactly `k`,
/// in graded-lex order.
pub fn multi_indices_of_degree(dim: usize, k: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut current = vec![0u32; dim];
    fill(&mut out, &mut current, 0, k);
    fn fill(out: &mut Vec<MultiIndex>, current: &mut Vec<u32>, axis: usize, remaining: u32) {
        if axis + 1 == current.len() {
            current[axis] = remaining;
            out.push(MultiIndex::new(current.clone()));
            current[axis] = 0;
            return;
        }
        for e in (0..=remaining).rev() {
            current[axis] = e;
            fill(out, current, axis + 1, remaining - e);
        }
        current[axis] = 0;
    }
    out
}

/// All multi-indices with total degree at most `n`, in graded-lex order.
pub fn multi_indices_up_to(dim: usize, n: u32) -> Vec<MultiIndex> {
    (0..=n)
        .flat_map(|k| multi_indices_of_degree(dim, k))
        .collect()
}

/// Multinomial coefficient `k! / (b_1! ... b_d!)` for `|b| = k`.
pub fn multinomial(b: &MultiIndex) -> u64 {
    let mut value = 1u64;
    let mut seen = 0u64;
    for axis in 0..b.dim() {
        for i in 1..=b.get(axis) as u64 {
            seen += 1;
            value = value * seen / i;
        }
    }
    value
}

/// The `k`-fold Dunkl gradient: every component `D_b p` with `|b| = k`
/// together with its multiplicity in the `k`-dimensional gradient array.
pub fn dunkl_gradient<S: Scalar>(
    p: &Polynomial<S>,
    w: &WeightParams<S>,
    k: u32,
) -> Vec<(MultiIndex, u64, Polynomial<S>)> {
    multi_indices_of_degree(w.dim(), k)
        .into_iter()
        .map(|b| {
            let mult = multinomial(&b);
            let q = dunkl_multi(p, &b, w);
            (b, mult, q)
        })
        .collect()
}

/// The polynomial `1 - |x|^2`.
pub fn one_minus_norm_sq<S: Scalar>(dim: usize) -> Polynomial<S> {
    let mut p = Polynomial::one(dim);
    for axis in 0..dim {
        let mut sq = MultiIndex::zero(dim);
        sq = sq.plus(&MultiIndex::unit(dim, axis)).plus(&MultiIndex::unit(dim, axis));
        p = p.sub(&Polynomial::monomial(dim, sq, S::one()));
    }
    p
}
