//! Orthogonal bases of the spaces `V_k` of degree-`k` orthogonal
//! polynomials, the projectors onto them, truncation operators, and the
//! closed-form test-function families with exact inner-product rules.
//!
//! The basis is produced by degree-graded modified Gram-Schmidt over the
//! monomials in graded-lex order. In the float backend every completed
//! vector gets one full reorthogonalization pass and is scaled to unit norm
//! (classical GS loses orthogonality around degree 8 for singular weights);
//! the rational backend runs plain GS and keeps exact squared norms instead
//! of normalizing, since rationals have no square roots.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jacobi::jacobi_radial;
use crate::moments::MomentEngine;
use crate::multipoly::{MultiIndex, Polynomial};
use crate::scalar::Scalar;
use crate::weights::WeightParams;

const RANK_PIVOT: f64 = 1e-13;

/// One basis vector of some `V_k`, with the bookkeeping that makes repeated
/// projections cheap: its dense coefficients over the monomial list and the
/// precomputed pairings `<x^a, e>` for every monomial `a` up to the
/// extension degree.
pub struct BasisElement<S> {
    pub poly: Polynomial<S>,
    /// Squared norm; exactly `1` in the float backend after normalization.
    pub norm_sq: S,
    dense: Vec<S>,
    moment_image: Vec<S>,
}

/// Orthogonal basis of all `V_k`, `k <= max_degree`, for one weight.
pub struct OrthoBasis<S> {
    engine: Arc<MomentEngine<S>>,
    max_degree: u32,
    rank: HashMap<MultiIndex, usize>,
    level_start: Vec<usize>,
    elements: Vec<BasisElement<S>>,
}

impl<S: Scalar> OrthoBasis<S> {
    /// Build the basis up to `max_degree`.
    pub fn build(engine: Arc<MomentEngine<S>>, max_degree: u32) -> Result<Self> {
        Self::build_with_extension(engine, max_degree, max_degree)
    }

    /// Build the basis up to `max_degree`, precomputing pairings against all
    /// monomials up to `ext_degree >= max_degree` so that polynomials of
    /// degree up to `ext_degree` project through the fast path.
    pub fn build_with_extension(
        engine: Arc<MomentEngine<S>>,
        max_degree: u32,
        ext_degree: u32,
    ) -> Result<Self> {
        assert!(ext_degree >= max_degree);
        let dim = engine.weight().dim();
        let monomials = crate::dunkl::multi_indices_up_to(dim, ext_degree);
        let rank: HashMap<MultiIndex, usize> = monomials
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
        let n_main = monomials
            .iter()
            .take_while(|a| a.total_degree() <= max_degree)
            .count();
        let n_ext = monomials.len();

        // Gram rows over all ext monomials, columns over the main block.
        let gram: Vec<Vec<S>> = (0..n_ext)
            .map(|i| {
                (0..n_main)
                    .map(|j| engine.moment(&monomials[i].plus(&monomials[j])))
                    .collect()
            })
            .collect();

        let mut level_start = Vec::new();
        let mut elements: Vec<BasisElement<S>> = Vec::with_capacity(n_main);
        let passes = if S::EXACT { 1 } else { 2 };

        for k in 0..n_main {
            let degree = monomials[k].total_degree();
            while level_start.len() <= degree as usize {
                level_start.push(k);
            }
            let mut v = vec![S::zero(); n_main];
            v[k] = S::one();
            for _ in 0..passes {
                for prior in elements.iter() {
                    let mut proj = S::zero();
                    for (mi, vi) in prior.moment_image.iter().zip(&v) {
                        if !vi.is_zero() {
                            proj = proj + mi.clone() * vi.clone();
                        }
                    }
                    let coeff = proj / prior.norm_sq.clone();
                    for (vi, di) in v.iter_mut().zip(&prior.dense) {
                        if !di.is_zero() {
                            *vi = vi.clone() - coeff.clone() * di.clone();
                        }
                    }
                }
            }
            // Pairing of a dense vector against one Gram row.
            let row_dot = |row: &[S], v: &[S]| {
                let mut acc = S::zero();
                for (g, vj) in row.iter().zip(v) {
                    if !vj.is_zero() {
                        acc = acc + g.clone() * vj.clone();
                    }
                }
                acc
            };
            let mut norm_sq = S::zero();
            for (i, vi) in v.iter().enumerate() {
                if !vi.is_zero() {
                    norm_sq = norm_sq + vi.clone() * row_dot(&gram[i], &v);
                }
            }
            let pivot = (norm_sq.to_f64() / gram[k][k].to_f64()).max(0.0).sqrt();
            if !norm_sq.is_positive() || (!S::EXACT && pivot < RANK_PIVOT) {
                return Err(Error::RankDeficient { degree, pivot });
            }
            if let Some(scale) = norm_sq.inv_sqrt() {
                for c in v.iter_mut() {
                    *c = c.clone() * scale.clone();
                }
                norm_sq = S::one();
            }
            let moment_image: Vec<S> = gram.iter().map(|row| row_dot(row, &v)).collect();
            let poly = Polynomial::from_terms(
                dim,
                v.iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(i, c)| (monomials[i].clone(), c.clone())),
            );
            elements.push(BasisElement {
                poly,
                norm_sq,
                dense: v,
                moment_image,
            });
        }
        level_start.push(n_main);
        Ok(OrthoBasis {
            engine,
            max_degree,
            rank,
            level_start,
            elements,
        })
    }

    pub fn engine(&self) -> &Arc<MomentEngine<S>> {
        &self.engine
    }

    pub fn weight(&self) -> &WeightParams<S> {
        self.engine.weight()
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    /// Basis of `V_k`.
    pub fn level(&self, k: u32) -> &[BasisElement<S>] {
        let (lo, hi) = self.level_range(k);
        &self.elements[lo..hi]
    }

    fn level_range(&self, k: u32) -> (usize, usize) {
        let k = k as usize;
        (self.level_start[k], self.level_start[k + 1])
    }

    /// `<u, e>` for a basis element, via the precomputed pairings when `u`
    /// fits under the extension degree and through the moment engine
    /// otherwise.
    pub fn inner_with_element(&self, u: &Polynomial<S>, element: &BasisElement<S>) -> S {
        let mut acc = S::zero();
        for (a, c) in u.terms() {
            match self.rank.get(a) {
                Some(&i) => acc = acc + c.clone() * element.moment_image[i].clone(),
                None => {
                    return self.engine.inner_product(u, &element.poly, 0);
                }
            }
        }
        acc
    }

    /// Expansion coefficients of `proj_k(u)` over `level(k)` for all
    /// `k <= max_degree` (coefficients are against unnormalized elements,
    /// i.e. `<u, e> / |e|^2`).
    pub fn component_coeffs(&self, u: &Polynomial<S>) -> Vec<Vec<S>> {
        (0..=self.max_degree)
            .map(|k| {
                self.level(k)
                    .iter()
                    .map(|e| self.inner_with_element(u, e) / e.norm_sq.clone())
                    .collect()
            })
            .collect()
    }

    /// `|proj_k(u)|^2` for all `k <= max_degree`.
    pub fn component_norms_sq(&self, u: &Polynomial<S>) -> Vec<S> {
        self.component_coeffs(u)
            .iter()
            .enumerate()
            .map(|(k, coeffs)| {
                let mut acc = S::zero();
                for (c, e) in coeffs.iter().zip(self.level(k as u32)) {
                    acc = acc + c.clone() * c.clone() * e.norm_sq.clone();
                }
                acc
            })
            .collect()
    }

    /// All projections `proj_k(u)`, `k = 0..=max_degree`, from one
    /// coefficient pass.
    pub fn components(&self, u: &Polynomial<S>) -> Vec<Polynomial<S>> {
        self.component_coeffs(u)
            .iter()
            .enumerate()
            .map(|(k, coeffs)| {
                let mut out = Polynomial::zero(u.dim());
                for (c, e) in coeffs.iter().zip(self.level(k as u32)) {
                    out = out.add(&e.poly.scale(c));
                }
                out
            })
            .collect()
    }

    /// Orthogonal projection of `u` onto `V_k`; zero for `k < 0`.
    pub fn project_component(&self, u: &Polynomial<S>, k: i64) -> Result<Polynomial<S>> {
        if k < 0 {
            return Ok(Polynomial::zero(u.dim()));
        }
        if k > self.max_degree as i64 {
            return Err(Error::DegreeOutOfRange {
                requested: k,
                max: self.max_degree,
            });
        }
        let mut out = Polynomial::zero(u.dim());
        for e in self.level(k as u32) {
            let coeff = self.inner_with_element(u, e) / e.norm_sq.clone();
            out = out.add(&e.poly.scale(&coeff));
        }
        Ok(out)
    }

    /// Truncation `S_N(u) = sum_{k <= N} proj_k(u)`; zero for `N < 0`.
    pub fn truncate(&self, u: &Polynomial<S>, n: i64) -> Result<Polynomial<S>> {
        if n < 0 {
            return Ok(Polynomial::zero(u.dim()));
        }
        if n > self.max_degree as i64 {
            return Err(Error::DegreeOutOfRange {
                requested: n,
                max: self.max_degree,
            });
        }
        let mut out = Polynomial::zero(u.dim());
        for k in 0..=n {
            out = out.add(&self.project_component(u, k)?);
        }
        Ok(out)
    }

    /// `basis --print` lines: one polynomial per line, `k=<degree>
    /// i=<index>: ` followed by the text serialization of its terms.
    pub fn print_lines(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.elements.len());
        for k in 0..=self.max_degree {
            for (i, e) in self.level(k).iter().enumerate() {
                out.push(format!("k={k} i={i}: {}", e.poly.to_inline_text()));
            }
        }
        out
    }
}

impl OrthoBasis<f64> {
    /// `<u, e>` for a test function against a basis element.
    pub fn inner_tf_element(&self, u: &TestFunction, element: &BasisElement<f64>) -> Result<f64> {
        u.inner_with_poly(&self.engine, &element.poly)
    }

    /// Expansion coefficients of `proj_k(u)` for a test function, all levels.
    pub fn component_coeffs_tf(&self, u: &TestFunction) -> Result<Vec<Vec<f64>>> {
        (0..=self.max_degree)
            .map(|k| {
                self.level(k)
                    .iter()
                    .map(|e| Ok(self.inner_tf_element(u, e)? / e.norm_sq))
                    .collect()
            })
            .collect()
    }

    /// `|proj_k(u)|^2` for a test function, all levels.
    pub fn component_norms_sq_tf(&self, u: &TestFunction) -> Result<Vec<f64>> {
        Ok(self
            .component_coeffs_tf(u)?
            .iter()
            .enumerate()
            .map(|(k, coeffs)| {
                coeffs
                    .iter()
                    .zip(self.level(k as u32))
                    .map(|(c, e)| c * c * e.norm_sq)
                    .sum()
            })
            .collect())
    }

    /// Projection of a test function onto `V_k`.
    pub fn project_component_tf(&self, u: &TestFunction, k: i64) -> Result<Polynomial<f64>> {
        if k < 0 {
            return Ok(Polynomial::zero(self.weight().dim()));
        }
        if k > self.max_degree as i64 {
            return Err(Error::DegreeOutOfRange {
                requested: k,
                max: self.max_degree,
            });
        }
        let mut out = Polynomial::zero(self.weight().dim());
        for e in self.level(k as u32) {
            let coeff = self.inner_tf_element(u, e)? / e.norm_sq;
            out = out.add(&e.poly.scale(&coeff));
        }
        Ok(out)
    }

    /// Truncation `S_N` of a test function.
    pub fn truncate_tf(&self, u: &TestFunction, n: i64) -> Result<Polynomial<f64>> {
        let mut out = Polynomial::zero(self.weight().dim());
        for k in 0..=n.min(self.max_degree as i64) {
            out = out.add(&self.project_component_tf(u, k)?);
        }
        Ok(out)
    }
}

/// Closed-form test-function families with exact inner products against
/// polynomials. Axis powers and their signed variants exist only in the
/// float backend because their moments are irrational.
#[derive(Clone, Debug)]
pub enum TestFunction {
    /// An ordinary polynomial.
    Poly(Polynomial<f64>),
    /// `|x_axis|^theta`, or `sign(x_axis) |x_axis|^theta` when `signed`.
    /// The unsigned variant is even under the axis reflection, the signed
    /// one odd. Integrability of its own norm needs `gamma + 2 theta > -1`.
    AxisPower {
        axis: usize,
        theta: f64,
        signed: bool,
    },
    /// Finite radial Jacobi series `sum_n c_n P_n^{(alpha, beta')}(2|x|^2-1)`
    /// in the parameters of the ambient weight; each term lies in `V_{2n}`.
    RadialJacobi { coeffs: Vec<f64> },
}

/// A Dunkl derivative of a test function, when it stays in the family.
pub struct ScaledTestFunction {
    pub scale: f64,
    pub fun: TestFunction,
}

impl TestFunction {
    /// Polynomial expansion where one exists (`Poly` and `RadialJacobi`).
    pub fn as_polynomial(&self, w: &WeightParams<f64>) -> Option<Polynomial<f64>> {
        match self {
            TestFunction::Poly(p) => Some(p.clone()),
            TestFunction::RadialJacobi { coeffs } => {
                let mut acc = Polynomial::zero(w.dim());
                for (n, c) in coeffs.iter().enumerate() {
                    acc = acc.add(
                        &jacobi_radial(n as u32, w.alpha(), &w.beta_prime(), w.dim()).scale(c),
                    );
                }
                Some(acc)
            }
            TestFunction::AxisPower { .. } => None,
        }
    }

    /// Exact `<u, p>` against a polynomial.
    pub fn inner_with_poly(&self, engine: &MomentEngine<f64>, p: &Polynomial<f64>) -> Result<f64> {
        let w = engine.weight();
        match self {
            TestFunction::Poly(u) => Ok(engine.inner_product(u, p, 0)),
            TestFunction::RadialJacobi { .. } => {
                let u = self.as_polynomial(w).expect("radial series expands");
                Ok(engine.inner_product(&u, p, 0))
            }
            TestFunction::AxisPower {
                axis,
                theta,
                signed,
            } => {
                let mut acc = 0.0;
                let mut shift = vec![0.0; w.dim()];
                for (a, c) in p.terms() {
                    let value = if *signed {
                        // Only terms odd in the axis survive; fold the sign
                        // and one power of the coordinate into theta.
                        if a.get(*axis) % 2 == 0 {
                            continue;
                        }
                        shift[*axis] = theta + 1.0;
                        let lowered = a.lower(*axis).expect("odd exponent");
                        let v = engine.moment_shifted(&lowered, &shift)?;
                        shift[*axis] = 0.0;
                        v
                    } else {
                        if a.get(*axis) % 2 == 1 {
                            continue;
                        }
                        shift[*axis] = *theta;
                        let v = engine.moment_shifted(a, &shift)?;
                        shift[*axis] = 0.0;
                        v
                    };
                    acc += c * value;
                }
                Ok(acc)
            }
        }
    }

    /// Exact squared norm `|u|^2` under the engine's weight.
    pub fn norm_sq(&self, engine: &MomentEngine<f64>) -> Result<f64> {
        let w = engine.weight();
        match self {
            TestFunction::Poly(u) => Ok(engine.norm_sq(u, 0)),
            TestFunction::RadialJacobi { .. } => {
                let u = self.as_polynomial(w).expect("radial series expands");
                Ok(engine.norm_sq(&u, 0))
            }
            TestFunction::AxisPower { axis, theta, .. } => {
                let mut shift = vec![0.0; w.dim()];
                shift[*axis] = 2.0 * theta;
                engine.moment_shifted(&MultiIndex::zero(w.dim()), &shift)
            }
        }
    }

    /// The Dunkl derivative `D_j u`, which stays inside the closed-form
    /// family: axis powers map to scaled axis powers of the opposite parity
    /// on their own axis (and to zero across axes), polynomials map to
    /// polynomials.
    pub fn dunkl_component(&self, w: &WeightParams<f64>, j: usize) -> Result<ScaledTestFunction> {
        match self {
            TestFunction::Poly(_) | TestFunction::RadialJacobi { .. } => {
                let u = self.as_polynomial(w).expect("polynomial variant");
                Ok(ScaledTestFunction {
                    scale: 1.0,
                    fun: TestFunction::Poly(crate::dunkl::dunkl(&u, j, w)),
                })
            }
            TestFunction::AxisPower {
                axis,
                theta,
                signed,
            } => {
                if *axis != j {
                    return Ok(ScaledTestFunction {
                        scale: 0.0,
                        fun: TestFunction::Poly(Polynomial::zero(w.dim())),
                    });
                }
                // Unsigned |x|^t: D = t sign(x)|x|^{t-1}.
                // Signed sign(x)|x|^t: D = (t + gamma_j) |x|^{t-1}.
                let scale = if *signed {
                    theta + w.gamma(j)
                } else {
                    *theta
                };
                Ok(ScaledTestFunction {
                    scale,
                    fun: TestFunction::AxisPower {
                        axis: *axis,
                        theta: theta - 1.0,
                        signed: !signed,
                    },
                })
            }
        }
    }
}
