//! Sparse multivariate polynomial arithmetic, coordinate reflections, parity
//! projections and the exponent-shift operators built on them.
//!
//! Polynomials are immutable values: every operation returns a fresh
//! canonical-form result (no stored zero coefficients, terms ordered by the
//! global graded-lexicographic order). The term order makes float evaluation
//! and serialization reproducible.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Exponent vector of a monomial; `|a|` is the total degree.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    /// Unit vector along `axis` (0-based).
    pub fn unit(dim: usize, axis: usize) -> Self {
        assert!(axis < dim, "axis {axis} out of range for dimension {dim}");
        let mut e = vec![0; dim];
        e[axis] = 1;
        MultiIndex(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn get(&self, axis: usize) -> u32 {
        self.0[axis]
    }

    /// Component-wise sum (monomial product).
    pub fn plus(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.dim(), other.dim());
        MultiIndex(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Lower the exponent on `axis` by one; `None` if it is already zero.
    pub fn lower(&self, axis: usize) -> Option<MultiIndex> {
        if self.0[axis] == 0 {
            return None;
        }
        let mut e = self.0.clone();
        e[axis] -= 1;
        Some(MultiIndex(e))
    }

    pub fn all_even(&self) -> bool {
        self.0.iter().all(|&a| a % 2 == 0)
    }
}

impl Ord for MultiIndex {
    /// Graded lexicographic: sort by total degree, then so that within one
    /// degree `x1^k` precedes `x1^{k-1} x2`, etc.
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Which parity component [`Polynomial::sym_skew`] extracts.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Parity {
    /// Even part under the axis reflection.
    Sym,
    /// Odd part under the axis reflection.
    Skew,
}

/// Sparse multivariate polynomial over a scalar backend.
///
/// Degree of the zero polynomial is `-1`, matching the convention that the
/// polynomial space of negative degree is `{0}`.
#[derive(Clone, PartialEq, Debug)]
pub struct Polynomial<S> {
    dim: usize,
    terms: BTreeMap<MultiIndex, S>,
}

impl<S: Scalar> Polynomial<S> {
    pub fn zero(dim: usize) -> Self {
        Polynomial {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: S) -> Self {
        let mut p = Self::zero(dim);
        p.insert(MultiIndex::zero(dim), c);
        p
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, S::one())
    }

    /// The coordinate polynomial `x_axis` (0-based).
    pub fn var(dim: usize, axis: usize) -> Self {
        Self::monomial(dim, MultiIndex::unit(dim, axis), S::one())
    }

    pub fn monomial(dim: usize, index: MultiIndex, coeff: S) -> Self {
        assert_eq!(index.dim(), dim, "multi-index dimension mismatch");
        let mut p = Self::zero(dim);
        p.insert(index, coeff);
        p
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (MultiIndex, S)>) -> Self {
        let mut p = Self::zero(dim);
        for (a, c) in terms {
            assert_eq!(a.dim(), dim, "multi-index dimension mismatch");
            p.insert(a, c);
        }
        p
    }

    fn insert(&mut self, index: MultiIndex, coeff: S) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(index) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + coeff;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; `-1` for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.terms
            .keys()
            .map(|a| a.total_degree() as i64)
            .max()
            .unwrap_or(-1)
    }

    /// Terms in graded-lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &S)> {
        self.terms.iter()
    }

    pub fn coeff(&self, index: &MultiIndex) -> S {
        self.terms.get(index).cloned().unwrap_or_else(S::zero)
    }

    /// Rebuild the polynomial by mapping each term; `f` returns the new
    /// coefficient/index pair or `None` to drop the term.
    fn map_terms(&self, mut f: impl FnMut(&MultiIndex, &S) -> Option<(MultiIndex, S)>) -> Self {
        let mut out = Self::zero(self.dim);
        for (a, c) in &self.terms {
            if let Some((b, d)) = f(a, c) {
                out.insert(b, d);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "polynomial dimension mismatch");
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.insert(a.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_terms(|a, c| Some((a.clone(), -c.clone())))
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        self.map_terms(|a, k| Some((a.clone(), k.clone() * c.clone())))
    }

    /// Multiply by the monomial `x^a`.
    pub fn mul_monomial(&self, a: &MultiIndex) -> Self {
        assert_eq!(a.dim(), self.dim, "multi-index dimension mismatch");
        self.map_terms(|b, c| Some((b.plus(a), c.clone())))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "polynomial dimension mismatch");
        let mut out = Self::zero(self.dim);
        for (a, c) in &self.terms {
            for (b, d) in &other.terms {
                out.insert(a.plus(b), c.clone() * d.clone());
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one(self.dim);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Composition with the reflection flipping coordinate `axis`:
    /// multiplies each term by `(-1)^{a_axis}`. An involution.
    pub fn reflect(&self, axis: usize) -> Self {
        assert!(axis < self.dim, "axis {axis} out of range");
        self.map_terms(|a, c| {
            let c = if a.get(axis) % 2 == 1 {
                -c.clone()
            } else {
                c.clone()
            };
            Some((a.clone(), c))
        })
    }

    /// Even (`Sym`) or odd (`Skew`) part under the reflection of `axis`.
    /// `sym + skew` recovers the polynomial and the two parts compose to zero.
    pub fn sym_skew(&self, axis: usize, which: Parity) -> Self {
        assert!(axis < self.dim, "axis {axis} out of range");
        let keep_odd = matches!(which, Parity::Skew);
        self.map_terms(|a, c| {
            if (a.get(axis) % 2 == 1) == keep_odd {
                Some((a.clone(), c.clone()))
            } else {
                None
            }
        })
    }

    pub fn sym(&self, axis: usize) -> Self {
        self.sym_skew(axis, Parity::Sym)
    }

    pub fn skew(&self, axis: usize) -> Self {
        self.sym_skew(axis, Parity::Skew)
    }

    /// The difference-quotient operator `rho_axis`: twice the odd part
    /// divided by the coordinate, an exact exponent shift on odd terms.
    /// Lowers the degree by at least one.
    pub fn rho(&self, axis: usize) -> Self {
        assert!(axis < self.dim, "axis {axis} out of range");
        self.map_terms(|a, c| {
            if a.get(axis) % 2 == 1 {
                let two = S::from_int(2);
                Some((a.lower(axis).expect("odd exponent"), two * c.clone()))
            } else {
                None
            }
        })
    }

    /// Hadamard-type averaging operator `H_k` along `axis`: scales each term
    /// by `(1 - (-1)^{m+k+1})/(m+k+1)` where `m` is the axis exponent, i.e.
    /// by `2/(m+k+1)` when `m+k` is even and kills the term otherwise.
    /// `H_0` applied to a partial derivative reproduces `rho` on polynomials.
    pub fn hadamard_h(&self, k: u32, axis: usize) -> Self {
        assert!(axis < self.dim, "axis {axis} out of range");
        self.map_terms(|a, c| {
            let m = a.get(axis);
            if (m + k) % 2 == 0 {
                let factor = S::from_ratio(2, (m + k + 1) as i64);
                Some((a.clone(), factor * c.clone()))
            } else {
                None
            }
        })
    }

    pub fn partial_derivative(&self, axis: usize) -> Self {
        assert!(axis < self.dim, "axis {axis} out of range");
        self.map_terms(|a, c| {
            a.lower(axis)
                .map(|b| (b, S::from_int(a.get(axis) as i64) * c.clone()))
        })
    }

    /// The Euler operator `x . grad`: multiplies each term by its total
    /// degree (the exact action on homogeneous components).
    pub fn x_dot_grad(&self) -> Self {
        self.map_terms(|a, c| {
            let k = a.total_degree();
            if k == 0 {
                None
            } else {
                Some((a.clone(), S::from_int(k as i64) * c.clone()))
            }
        })
    }

    /// Evaluate at a point, accumulating in the deterministic term order.
    pub fn eval(&self, x: &[S]) -> S {
        assert_eq!(x.len(), self.dim, "point length mismatch");
        let mut acc = S::zero();
        for (a, c) in &self.terms {
            let mut term = c.clone();
            for (axis, &e) in a.exponents().iter().enumerate() {
                for _ in 0..e {
                    term = term * x[axis].clone();
                }
            }
            acc = acc + term;
        }
        acc
    }

    /// Parity under the central reflection `x -> -x`: `Some(0)`/`Some(1)` if
    /// every term has even/odd total degree, `None` for mixed parity.
    pub fn central_parity(&self) -> Option<u32> {
        let mut parity = None;
        for a in self.terms.keys() {
            let p = a.total_degree() % 2;
            match parity {
                None => parity = Some(p),
                Some(q) if q != p => return None,
                _ => {}
            }
        }
        parity
    }

    /// One term per line: `<coeff> <a_1> ... <a_d>`, graded-lex order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (a, c) in &self.terms {
            out.push_str(&Self::term_text(a, c));
            out.push('\n');
        }
        out
    }

    /// All terms on one line, separated by `"; "` (used by `basis --print`).
    pub fn to_inline_text(&self) -> String {
        self.terms
            .iter()
            .map(|(a, c)| Self::term_text(a, c))
            .collect::<Vec<_>>()
            .join("; ")
    }

    fn term_text(a: &MultiIndex, c: &S) -> String {
        let exps = a
            .exponents()
            .iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        format!("{c} {exps}")
    }

    /// Parse the `to_text` format. Every line must carry `dim + 1` fields.
    pub fn parse_text(dim: usize, text: &str) -> Result<Self> {
        let mut p = Self::zero(dim);
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != dim + 1 {
                return Err(Error::Parse(format!(
                    "line {}: expected coefficient plus {dim} exponents, got {} fields",
                    lineno + 1,
                    fields.len()
                )));
            }
            let coeff = S::parse(fields[0])?;
            let exps = fields[1..]
                .iter()
                .map(|f| {
                    f.parse::<u32>()
                        .map_err(|_| Error::Parse(format!("line {}: bad exponent `{f}`", lineno + 1)))
                })
                .collect::<Result<Vec<u32>>>()?;
            p.insert(MultiIndex::new(exps), coeff);
        }
        Ok(p)
    }
}

impl<S: Scalar> fmt::Display for Polynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        write!(f, "{}", self.to_inline_text())
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::scalar::Rational;
    use proptest::prelude::*;

    fn x1() -> Polynomial<Rational> {
        Polynomial::var(2, 0)
    }

    fn x2() -> Polynomial<Rational> {
        Polynomial::var(2, 1)
    }

    fn rat(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn add_cancels_to_canonical_zero() {
        let p = x1().add(&x1().neg());
        assert!(p.is_zero());
        assert_eq!(p.degree(), -1);
    }

    #[test]
    fn mul_monomial_on_one() {
        let one = Polynomial::<Rational>::one(2);
        let sq = one.mul_monomial(&MultiIndex::new(vec![2, 0]));
        assert_eq!(sq, x1().mul(&x1()));
        assert_eq!(sq.degree(), 2);
    }

    #[test]
    fn scale_distributes() {
        let p = x1().add(&x2()).scale(&rat(2, 1));
        assert_eq!(p, x1().scale(&rat(2, 1)).add(&x2().scale(&rat(2, 1))));
    }

    #[test]
    fn reflect_examples() {
        assert_eq!(x1().reflect(0), x1().neg());
        let p = x1().mul(&x1()).mul(&x2()); // x1^2 x2
        assert_eq!(p.reflect(0), p);
        let q = x1().mul(&x2());
        assert_eq!(q.reflect(1), q.neg());
    }

    #[test]
    fn sym_skew_examples() {
        let p = x1().add(&x1().mul(&x1())); // x1 + x1^2
        assert_eq!(p.sym(0), x1().mul(&x1()));
        assert_eq!(p.skew(0), x1());
        let c = Polynomial::constant(2, rat(7, 3));
        assert!(c.skew(0).is_zero());
        assert!(c.skew(1).is_zero());
    }

    #[test]
    fn rho_examples() {
        assert_eq!(x1().rho(0), Polynomial::constant(2, rat(2, 1)));
        assert!(x1().mul(&x1()).rho(0).is_zero());
        let x1cubed = x1().pow(3);
        assert_eq!(x1cubed.rho(0), x1().pow(2).scale(&rat(2, 1)));
    }

    #[test]
    fn hadamard_monomial_action() {
        // Distinguished axis is the last one here, matching d in dimension 2.
        let one = Polynomial::<Rational>::one(2);
        assert_eq!(one.hadamard_h(0, 1), one.scale(&rat(2, 1)));
        assert!(x2().hadamard_h(0, 1).is_zero());
        let x2sq = x2().pow(2);
        assert_eq!(x2sq.hadamard_h(0, 1), x2sq.scale(&rat(2, 3)));
    }

    #[test]
    fn hadamard_h0_of_derivative_is_rho() {
        // H_0(d_j f) = rho_j(f) on polynomials.
        let f = x1()
            .pow(3)
            .add(&x1().mul(&x2().pow(2)))
            .add(&x2().pow(4))
            .add(&Polynomial::one(2));
        for axis in 0..2 {
            assert_eq!(f.partial_derivative(axis).hadamard_h(0, axis), f.rho(axis));
        }
    }

    #[test]
    fn derivative_and_eval() {
        let p = x1().pow(2).mul(&x2());
        assert_eq!(p.partial_derivative(0), x1().mul(&x2()).scale(&rat(2, 1)));
        assert!(x1().partial_derivative(1).is_zero());
        let q = x1().pow(2).add(&x2());
        assert_eq!(q.eval(&[rat(1, 1), rat(1, 2)]), rat(3, 2));
    }

    #[test]
    fn graded_lex_term_order() {
        let p = Polynomial::from_terms(
            2,
            vec![
                (MultiIndex::new(vec![0, 2]), rat(1, 1)),
                (MultiIndex::new(vec![1, 0]), rat(1, 1)),
                (MultiIndex::new(vec![2, 0]), rat(1, 1)),
                (MultiIndex::new(vec![0, 0]), rat(1, 1)),
                (MultiIndex::new(vec![1, 1]), rat(1, 1)),
            ],
        );
        let order: Vec<Vec<u32>> = p.terms().map(|(a, _)| a.exponents().to_vec()).collect();
        assert_eq!(
            order,
            vec![
                vec![0, 0],
                vec![1, 0],
                vec![2, 0],
                vec![1, 1],
                vec![0, 2]
            ]
        );
    }

    #[test]
    fn text_round_trip() {
        let p = x1().pow(2).scale(&rat(-3, 7)).add(&x2());
        let parsed = Polynomial::<Rational>::parse_text(2, &p.to_text()).unwrap();
        assert_eq!(parsed, p);
        assert!(Polynomial::<Rational>::parse_text(2, "1 2").is_err());
    }

    #[test]
    #[should_panic(expected = "dimension mismatch")]
    fn dimension_mismatch_panics() {
        let p = Polynomial::<Rational>::var(2, 0);
        let q = Polynomial::<Rational>::var(3, 0);
        let _ = p.add(&q);
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn axis_out_of_range_panics() {
        let _ = x1().reflect(2);
    }

    /// Random rational polynomial: degree <= `max_deg`, coefficients n/16.
    pub(crate) fn arb_poly(
        dim: usize,
        max_deg: u32,
    ) -> impl Strategy<Value = Polynomial<Rational>> {
        let indices = crate::dunkl::multi_indices_up_to(dim, max_deg);
        let n = indices.len();
        proptest::collection::vec(-16i64..=16, n).prop_map(move |coeffs| {
            Polynomial::from_terms(
                dim,
                indices
                    .iter()
                    .cloned()
                    .zip(coeffs.into_iter().map(|c| Rational::from_ratio(c, 16))),
            )
        })
    }

    proptest! {
        #[test]
        fn reflect_is_linear_involution(p in arb_poly(3, 8), q in arb_poly(3, 8), axis in 0usize..3) {
            prop_assert_eq!(p.reflect(axis).reflect(axis), p.clone());
            prop_assert_eq!(
                p.add(&q).reflect(axis),
                p.reflect(axis).add(&q.reflect(axis))
            );
        }

        #[test]
        fn sym_skew_complementary_idempotent(p in arb_poly(3, 8), axis in 0usize..3) {
            let s = p.sym(axis);
            let k = p.skew(axis);
            prop_assert_eq!(s.add(&k), p.clone());
            prop_assert_eq!(s.sym(axis), s.clone());
            prop_assert_eq!(k.skew(axis), k.clone());
            prop_assert!(s.skew(axis).is_zero());
            prop_assert!(k.sym(axis).is_zero());
        }

        #[test]
        fn rho_times_coordinate_is_twice_skew(p in arb_poly(3, 8), axis in 0usize..3) {
            let lhs = p.rho(axis).mul_monomial(&MultiIndex::unit(3, axis));
            let rhs = p.skew(axis).scale(&Rational::from_int(2));
            prop_assert_eq!(lhs, rhs);
            if !p.skew(axis).is_zero() {
                prop_assert!(p.rho(axis).degree() <= p.degree() - 1);
            }
        }

        #[test]
        fn four_way_parity_decomposition(p in arb_poly(3, 8)) {
            // Sym/Skew commute across distinct axes and the four parts sum back.
            let (i, j) = (0, 1);
            let sum = p.sym(i).sym(j)
                .add(&p.sym(i).skew(j))
                .add(&p.skew(i).sym(j))
                .add(&p.skew(i).skew(j));
            prop_assert_eq!(sum, p.clone());
            prop_assert_eq!(p.sym(i).skew(j), p.skew(j).sym(i));
        }
    }
}
