//! Functions on a degree-2 symplectic graded manifold in a Darboux chart.
//!
//! Coordinates are `x^1..x^n` (degree 0), odd `θ^1..θ^m` (degree 1) and
//! momenta `p_1..p_n` (degree 2). Elements are kept in a canonical form:
//! a map from monomial keys to nonzero rational coefficients, with the odd
//! factors of every monomial sorted by index. Equality of
//! [`SuperPolynomial`]s is therefore equality of term maps.
//!
//! # Bracket convention
//!
//! The Poisson superbracket of degree -2 used throughout the crate is
//!
//! ```text
//! {F, G} = Σ_i (∂F/∂p_i · ∂G/∂x^i − ∂F/∂x^i · ∂G/∂p_i)
//!        + Σ_{a,b} g^{ab} (F ∂⃖/∂θ^a)(∂⃗/∂θ^b G)
//! ```
//!
//! with right derivatives on the left argument and left derivatives on the
//! right one. For `F` of parity `|F|`, `F ∂⃖/∂θ^a = (−1)^{|F|+1} ∂⃗F/∂θ^a`.
//! This gives `{p_i, x^j} = δ_i^j`, `{θ^a, θ^b} = g^{ab}`; the bracket is
//! graded skew-symmetric, a graded biderivation and satisfies graded Jacobi.
//! A section `e_a` of the underlying vector bundle is represented by the
//! degree-1 function `Σ_b g_{ab} θ^b`, so that brackets of such lifts give
//! the metric `g_{ab}` itself.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::poly::{format_exponents, Poly};
use crate::rational::{coefficient_prefix, Q};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

/// Maximum odd rank; odd factors live in a `u64` bitmask.
pub const MAX_ODD_RANK: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoordKind {
    Base,
    Odd,
    Momentum,
}

impl CoordKind {
    pub fn degree(self) -> u32 {
        match self {
            CoordKind::Base => 0,
            CoordKind::Odd => 1,
            CoordKind::Momentum => 2,
        }
    }
}

/// A chart coordinate. `index` is 1-based, as in `x^1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GradedCoordinate {
    pub name: String,
    pub kind: CoordKind,
    pub index: usize,
}

impl GradedCoordinate {
    pub fn degree(&self) -> u32 {
        self.kind.degree()
    }

    pub fn parity(&self) -> u32 {
        self.degree() % 2
    }
}

/// A Darboux chart: base dimension `n`, odd rank `m` and the symmetric
/// invertible matrix `g_{ab}` of the fibre pairing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedContext {
    n: usize,
    m: usize,
    g: Matrix,
    g_inv: Matrix,
    odd_names: Vec<String>,
}

impl GradedContext {
    pub fn new(n: usize, g: Matrix) -> Result<Arc<Self>> {
        let m = g.rows();
        let names = (1..=m).map(|a| format!("xi{a}")).collect();
        Self::with_odd_names(n, g, names)
    }

    pub fn with_odd_names(n: usize, g: Matrix, odd_names: Vec<String>) -> Result<Arc<Self>> {
        if !g.is_square() {
            return Err(Error::InvalidMetric(format!("{}x{} is not square", g.rows(), g.cols())));
        }
        if !g.is_symmetric() {
            return Err(Error::InvalidMetric("not symmetric".into()));
        }
        let m = g.rows();
        if m > MAX_ODD_RANK {
            return Err(Error::InvalidMetric(format!("odd rank {m} exceeds {MAX_ODD_RANK}")));
        }
        if odd_names.len() != m {
            return Err(Error::DimensionMismatch { expected: m, found: odd_names.len() });
        }
        let g_inv = g.inverse().map_err(|_| Error::InvalidMetric("not invertible".into()))?;
        Ok(Arc::new(GradedContext { n, m, g, g_inv, odd_names }))
    }

    /// `g = I_m`.
    pub fn euclidean(n: usize, m: usize) -> Arc<Self> {
        Self::new(n, Matrix::identity(m)).expect("identity metric is valid")
    }

    /// The chart of `T*[2]T[1]R^n`: odd coordinates `ξ^1..ξ^n, ψ_1..ψ_n`
    /// with `{ξ^i, ψ_j} = δ^i_j` and all other odd pairings zero.
    pub fn hyperbolic(n: usize) -> Arc<Self> {
        let g = hyperbolic_metric(n);
        let names = (1..=n)
            .map(|i| format!("xi{i}"))
            .chain((1..=n).map(|i| format!("psi{i}")))
            .collect();
        Self::with_odd_names(n, g, names).expect("hyperbolic metric is valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn metric(&self) -> &Matrix {
        &self.g
    }

    pub fn metric_inverse(&self) -> &Matrix {
        &self.g_inv
    }

    pub fn odd_name(&self, a: usize) -> &str {
        &self.odd_names[a]
    }

    /// Coordinate of the given kind with 1-based `index`.
    pub fn coordinate(&self, kind: CoordKind, index: usize) -> Result<GradedCoordinate> {
        let bound = match kind {
            CoordKind::Odd => self.m,
            _ => self.n,
        };
        if index == 0 || index > bound {
            return Err(Error::Invalid(format!("{kind:?} coordinate index {index} out of range 1..={bound}")));
        }
        let name = match kind {
            CoordKind::Base => format!("x{index}"),
            CoordKind::Momentum => format!("p{index}"),
            CoordKind::Odd => self.odd_names[index - 1].clone(),
        };
        Ok(GradedCoordinate { name, kind, index })
    }

    pub fn coordinates(&self) -> Vec<GradedCoordinate> {
        let mut out = Vec::new();
        for (kind, bound) in [(CoordKind::Base, self.n), (CoordKind::Odd, self.m), (CoordKind::Momentum, self.n)] {
            for i in 1..=bound {
                out.push(self.coordinate(kind, i).unwrap());
            }
        }
        out
    }
}

pub fn hyperbolic_metric(n: usize) -> Matrix {
    Matrix::from_fn(2 * n, 2 * n, |i, j| {
        if (i + n == j) || (j + n == i) {
            Q::one()
        } else {
            Q::zero()
        }
    })
}

/// Canonical monomial key: exponents of `x` and `p`, plus the set of odd
/// factors as a bitmask (bit `a` is `θ^{a+1}`), ordered by index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonomialKey {
    pub x: Vec<u32>,
    pub p: Vec<u32>,
    pub odd: u64,
}

impl MonomialKey {
    pub fn unit(n: usize) -> Self {
        MonomialKey { x: vec![0; n], p: vec![0; n], odd: 0 }
    }

    pub fn degree(&self) -> u32 {
        2 * self.p.iter().sum::<u32>() + self.odd.count_ones()
    }

    pub fn parity(&self) -> u32 {
        self.odd.count_ones() % 2
    }

    pub fn odd_factors(&self) -> Vec<usize> {
        bits(self.odd).collect()
    }
}

/// A single term in expanded form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomial {
    pub coefficient: Q,
    pub x_exponents: Vec<u32>,
    pub p_exponents: Vec<u32>,
    /// Zero-based odd indices, strictly increasing.
    pub odd_factors: Vec<usize>,
}

impl Monomial {
    pub fn degree(&self) -> u32 {
        2 * self.p_exponents.iter().sum::<u32>() + self.odd_factors.len() as u32
    }
}

fn bits(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |b| mask & (1u64 << b) != 0)
}

/// Product `θ^S · θ^T` of two sorted odd monomials: `None` if they share a
/// factor, otherwise `(negative, S ∪ T)`.
fn odd_product(s: u64, t: u64) -> Option<(bool, u64)> {
    if s & t != 0 {
        return None;
    }
    // each factor of T must hop over the factors of S with a larger index
    let mut swaps = 0u32;
    for j in bits(t) {
        swaps += (s >> j).count_ones();
    }
    Some((swaps % 2 == 1, s | t))
}

/// Left derivative `∂⃗/∂θ^a` of the sorted odd monomial `S`.
fn strip_left(s: u64, a: usize) -> Option<(bool, u64)> {
    let bit = 1u64 << a;
    if s & bit == 0 {
        return None;
    }
    let before = (s & (bit - 1)).count_ones();
    Some((before % 2 == 1, s & !bit))
}

/// Right derivative `∂⃖/∂θ^a` of the sorted odd monomial `S`.
fn strip_right(s: u64, a: usize) -> Option<(bool, u64)> {
    let bit = 1u64 << a;
    if s & bit == 0 {
        return None;
    }
    let after = (s >> a >> 1).count_ones();
    Some((after % 2 == 1, s & !bit))
}

fn signed(c: Q, negative: bool) -> Q {
    if negative {
        -c
    } else {
        c
    }
}

/// Element of the graded algebra of functions on the chart.
#[derive(Clone, Debug)]
pub struct SuperPolynomial {
    ctx: Arc<GradedContext>,
    terms: BTreeMap<MonomialKey, Q>,
}

impl PartialEq for SuperPolynomial {
    fn eq(&self, other: &Self) -> bool {
        same_context(&self.ctx, &other.ctx) && self.terms == other.terms
    }
}

impl Eq for SuperPolynomial {}

fn same_context(a: &Arc<GradedContext>, b: &Arc<GradedContext>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl SuperPolynomial {
    pub fn zero(ctx: &Arc<GradedContext>) -> Self {
        SuperPolynomial { ctx: ctx.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(ctx: &Arc<GradedContext>, c: Q) -> Self {
        let mut f = Self::zero(ctx);
        f.add_term(MonomialKey::unit(ctx.n), c);
        f
    }

    pub fn one(ctx: &Arc<GradedContext>) -> Self {
        Self::constant(ctx, Q::one())
    }

    /// `x^{i+1}`.
    pub fn x(ctx: &Arc<GradedContext>, i: usize) -> Self {
        assert!(i < ctx.n);
        let mut k = MonomialKey::unit(ctx.n);
        k.x[i] = 1;
        Self::from_key(ctx, k, Q::one())
    }

    /// `p_{i+1}`.
    pub fn p(ctx: &Arc<GradedContext>, i: usize) -> Self {
        assert!(i < ctx.n);
        let mut k = MonomialKey::unit(ctx.n);
        k.p[i] = 1;
        Self::from_key(ctx, k, Q::one())
    }

    /// `θ^{a+1}`.
    pub fn theta(ctx: &Arc<GradedContext>, a: usize) -> Self {
        assert!(a < ctx.m);
        let mut k = MonomialKey::unit(ctx.n);
        k.odd = 1u64 << a;
        Self::from_key(ctx, k, Q::one())
    }

    pub fn coordinate(ctx: &Arc<GradedContext>, c: &GradedCoordinate) -> Result<Self> {
        ctx.coordinate(c.kind, c.index)?;
        Ok(match c.kind {
            CoordKind::Base => Self::x(ctx, c.index - 1),
            CoordKind::Odd => Self::theta(ctx, c.index - 1),
            CoordKind::Momentum => Self::p(ctx, c.index - 1),
        })
    }

    /// Lift of a polynomial in the base coordinates into degree 0.
    pub fn from_base(ctx: &Arc<GradedContext>, f: &Poly) -> Self {
        assert_eq!(f.nvars(), ctx.n, "base polynomial in the wrong number of variables");
        let mut out = Self::zero(ctx);
        for (e, c) in f.terms() {
            let k = MonomialKey { x: e.clone(), p: vec![0; ctx.n], odd: 0 };
            out.add_term(k, c.clone());
        }
        out
    }

    /// Builds a term from an explicit, possibly unsorted, list of odd
    /// factors (zero-based); the sign of sorting is absorbed.
    pub fn monomial(
        ctx: &Arc<GradedContext>,
        coefficient: Q,
        x: Vec<u32>,
        p: Vec<u32>,
        odd_factors: &[usize],
    ) -> Result<Self> {
        if x.len() != ctx.n || p.len() != ctx.n {
            return Err(Error::DimensionMismatch { expected: ctx.n, found: x.len().max(p.len()) });
        }
        let mut mask = 0u64;
        let mut negative = false;
        for &a in odd_factors {
            if a >= ctx.m {
                return Err(Error::Invalid(format!("odd index {a} out of range")));
            }
            match odd_product(mask, 1u64 << a) {
                Some((neg, m2)) => {
                    negative ^= neg;
                    mask = m2;
                }
                None => return Ok(Self::zero(ctx)),
            }
        }
        Ok(Self::from_key(ctx, MonomialKey { x, p, odd: mask }, signed(coefficient, negative)))
    }

    fn from_key(ctx: &Arc<GradedContext>, k: MonomialKey, c: Q) -> Self {
        let mut f = Self::zero(ctx);
        f.add_term(k, c);
        f
    }

    pub fn context(&self) -> &Arc<GradedContext> {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MonomialKey, &Q)> {
        self.terms.iter()
    }

    pub fn monomials(&self) -> Vec<Monomial> {
        self.terms
            .iter()
            .map(|(k, c)| Monomial {
                coefficient: c.clone(),
                x_exponents: k.x.clone(),
                p_exponents: k.p.clone(),
                odd_factors: k.odd_factors(),
            })
            .collect()
    }

    pub(crate) fn add_term(&mut self, k: MonomialKey, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(k) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_context(&self, other: &SuperPolynomial) -> Result<()> {
        if same_context(&self.ctx, &other.ctx) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    /// The degree if every term has the same degree; `None` for zero or
    /// mixed degrees.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(MonomialKey::degree);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    /// `true` if `self` is zero or homogeneous of degree `d`.
    pub fn is_homogeneous_of(&self, d: u32) -> bool {
        self.terms.keys().all(|k| k.degree() == d)
    }

    /// Parity when all terms share one, zero included (even).
    pub fn parity(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(MonomialKey::parity);
        let Some(first) = it.next() else { return Some(0) };
        it.all(|p| p == first).then_some(first)
    }

    pub fn degree_components(&self) -> BTreeMap<u32, SuperPolynomial> {
        let mut out: BTreeMap<u32, SuperPolynomial> = BTreeMap::new();
        for (k, c) in &self.terms {
            out.entry(k.degree())
                .or_insert_with(|| SuperPolynomial::zero(&self.ctx))
                .add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Q) -> SuperPolynomial {
        let mut out = SuperPolynomial::zero(&self.ctx);
        if c.is_zero() {
            return out;
        }
        out.terms = self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect();
        out
    }

    pub fn try_add(&self, other: &SuperPolynomial) -> Result<SuperPolynomial> {
        self.check_context(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &SuperPolynomial) -> Result<SuperPolynomial> {
        self.check_context(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), -c.clone());
        }
        Ok(out)
    }

    /// Supercommutative product.
    pub fn multiply(&self, other: &SuperPolynomial) -> Result<SuperPolynomial> {
        self.check_context(other)?;
        let mut out = SuperPolynomial::zero(&self.ctx);
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                let Some((neg, odd)) = odd_product(k1.odd, k2.odd) else { continue };
                let k = MonomialKey {
                    x: add_exps(&k1.x, &k2.x),
                    p: add_exps(&k1.p, &k2.p),
                    odd,
                };
                out.add_term(k, signed(c1 * c2, neg));
            }
        }
        Ok(out)
    }

    /// Partial derivative; for odd coordinates this is the left derivative.
    pub fn partial(&self, c: &GradedCoordinate) -> Result<SuperPolynomial> {
        self.ctx.coordinate(c.kind, c.index)?;
        let i = c.index - 1;
        let mut out = SuperPolynomial::zero(&self.ctx);
        for (k, v) in &self.terms {
            match c.kind {
                CoordKind::Base | CoordKind::Momentum => {
                    let mut k2 = k.clone();
                    let e = if c.kind == CoordKind::Base { &mut k2.x[i] } else { &mut k2.p[i] };
                    if *e == 0 {
                        continue;
                    }
                    let factor = Q::from_integer((*e).into());
                    *e -= 1;
                    out.add_term(k2, v * factor);
                }
                CoordKind::Odd => {
                    let Some((neg, odd)) = strip_left(k.odd, i) else { continue };
                    let k2 = MonomialKey { odd, ..k.clone() };
                    out.add_term(k2, signed(v.clone(), neg));
                }
            }
        }
        Ok(out)
    }

    /// The degree -2 Poisson superbracket `{self, other}`; see the module
    /// docs for the convention.
    pub fn poisson_bracket(&self, other: &SuperPolynomial) -> Result<SuperPolynomial> {
        self.check_context(other)?;
        let ctx = &self.ctx;
        let n = ctx.n;
        let g_inv = &ctx.g_inv;
        let mut out = SuperPolynomial::zero(ctx);
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                let c12 = c1 * c2;
                // x-p part: both derivatives are even, the odd parts just multiply
                if let Some((neg, odd)) = odd_product(k1.odd, k2.odd) {
                    for i in 0..n {
                        let coef = i64::from(k1.p[i]) * i64::from(k2.x[i])
                            - i64::from(k1.x[i]) * i64::from(k2.p[i]);
                        if coef == 0 {
                            continue;
                        }
                        let mut x = add_exps(&k1.x, &k2.x);
                        let mut p = add_exps(&k1.p, &k2.p);
                        x[i] -= 1;
                        p[i] -= 1;
                        let v = &c12 * Q::from_integer(coef.into());
                        out.add_term(MonomialKey { x, p, odd }, signed(v, neg));
                    }
                }
                // odd part: g^{ab} (F ∂⃖_a)(∂⃗_b G)
                if k1.odd == 0 || k2.odd == 0 {
                    continue;
                }
                for a in bits(k1.odd) {
                    let Some((neg1, s)) = strip_right(k1.odd, a) else { continue };
                    for b in bits(k2.odd) {
                        let gab = &g_inv[(a, b)];
                        if gab.is_zero() {
                            continue;
                        }
                        let Some((neg2, t)) = strip_left(k2.odd, b) else { continue };
                        let Some((neg3, odd)) = odd_product(s, t) else { continue };
                        let k = MonomialKey {
                            x: add_exps(&k1.x, &k2.x),
                            p: add_exps(&k1.p, &k2.p),
                            odd,
                        };
                        out.add_term(k, signed(&c12 * gab, neg1 ^ neg2 ^ neg3));
                    }
                }
            }
        }
        Ok(out)
    }

    /// For `F = Σ_a v_a(x) θ^a` (no momenta), the coefficient functions
    /// `v_a`. `None` if `F` has any other kind of term.
    pub fn odd_linear_coefficients(&self) -> Option<Vec<Poly>> {
        let n = self.ctx.n;
        let mut out = vec![Poly::zero(n); self.ctx.m];
        for (k, c) in &self.terms {
            if k.odd.count_ones() != 1 || k.p.iter().any(|&e| e > 0) {
                return None;
            }
            let a = k.odd.trailing_zeros() as usize;
            out[a] += &Poly::monomial(n, k.x.clone(), c.clone());
        }
        Some(out)
    }

    /// For `F` of degree 0, the underlying base polynomial.
    pub fn as_base(&self) -> Option<Poly> {
        let n = self.ctx.n;
        let mut out = Poly::zero(n);
        for (k, c) in &self.terms {
            if k.odd != 0 || k.p.iter().any(|&e| e > 0) {
                return None;
            }
            out += &Poly::monomial(n, k.x.clone(), c.clone());
        }
        Some(out)
    }

    /// `true` if no term depends on the base coordinates.
    pub fn has_constant_coefficients(&self) -> bool {
        self.terms.keys().all(|k| k.x.iter().all(|&e| e == 0))
    }
}

fn add_exps(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

impl fmt::Display for SuperPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.terms {
            let mut parts = Vec::new();
            let xs = format_exponents(&k.x);
            if !xs.is_empty() {
                parts.push(xs);
            }
            for a in bits(k.odd) {
                parts.push(self.ctx.odd_names[a].clone());
            }
            for (i, &e) in k.p.iter().enumerate() {
                match e {
                    0 => {}
                    1 => parts.push(format!("p{}", i + 1)),
                    _ => parts.push(format!("p{}^{}", i + 1, e)),
                }
            }
            let mono = parts.join("*");
            let s = if mono.is_empty() {
                coefficient_prefix(c, true)
            } else {
                format!("{}{}", coefficient_prefix(c, false), mono)
            };
            if first {
                write!(f, "{s}")?;
                first = false;
            } else if let Some(rest) = s.strip_prefix('-') {
                write!(f, " - {rest}")?;
            } else {
                write!(f, " + {s}")?;
            }
        }
        Ok(())
    }
}

impl Add<&SuperPolynomial> for &SuperPolynomial {
    type Output = SuperPolynomial;
    fn add(self, rhs: &SuperPolynomial) -> SuperPolynomial {
        self.try_add(rhs).expect("context mismatch in addition")
    }
}

impl Sub<&SuperPolynomial> for &SuperPolynomial {
    type Output = SuperPolynomial;
    fn sub(self, rhs: &SuperPolynomial) -> SuperPolynomial {
        self.try_sub(rhs).expect("context mismatch in subtraction")
    }
}

impl Mul<&SuperPolynomial> for &SuperPolynomial {
    type Output = SuperPolynomial;
    fn mul(self, rhs: &SuperPolynomial) -> SuperPolynomial {
        self.multiply(rhs).expect("context mismatch in product")
    }
}

impl Neg for &SuperPolynomial {
    type Output = SuperPolynomial;
    fn neg(self) -> SuperPolynomial {
        self.scale(&-Q::one())
    }
}

/// Shorthand for `f.poisson_bracket(g)` that panics on a context mismatch.
pub fn pb(f: &SuperPolynomial, g: &SuperPolynomial) -> SuperPolynomial {
    f.poisson_bracket(g).expect("context mismatch in bracket")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qi;

    fn ctx() -> Arc<GradedContext> {
        GradedContext::euclidean(2, 3)
    }

    #[test]
    fn odd_squares_vanish_and_anticommute() {
        let c = ctx();
        let t1 = SuperPolynomial::theta(&c, 0);
        let t2 = SuperPolynomial::theta(&c, 1);
        assert!((&t1 * &t1).is_zero());
        let t21 = &t2 * &t1;
        let t12 = &t1 * &t2;
        assert_eq!(t21, -&t12);
        assert_eq!(t21.to_string(), "-xi1*xi2");
    }

    #[test]
    fn even_coordinates_commute() {
        let c = ctx();
        let x1 = SuperPolynomial::x(&c, 0);
        let p1 = SuperPolynomial::p(&c, 0);
        let prod = &(&x1 + &p1) * &x1;
        assert_eq!(prod, &(&x1 * &x1) + &(&x1 * &p1));
        assert_eq!(prod.to_string(), "x1*p1 + x1^2");
    }

    #[test]
    fn partial_derivatives() {
        let c = ctx();
        let x1 = SuperPolynomial::x(&c, 0);
        let p1 = SuperPolynomial::p(&c, 0);
        let t1 = SuperPolynomial::theta(&c, 0);
        let t2 = SuperPolynomial::theta(&c, 1);
        let p1c = c.coordinate(CoordKind::Momentum, 1).unwrap();
        let t1c = c.coordinate(CoordKind::Odd, 1).unwrap();
        let t2c = c.coordinate(CoordKind::Odd, 2).unwrap();
        assert_eq!((&x1 * &p1).partial(&p1c).unwrap(), x1);
        let t12 = &t1 * &t2;
        assert_eq!(t12.partial(&t2c).unwrap(), -&t1);
        assert_eq!(t12.partial(&t1c).unwrap(), t2);
        assert!(x1.partial(&t1c).unwrap().is_zero());
    }

    #[test]
    fn coordinate_pairings() {
        let c = GradedContext::hyperbolic(2);
        let x1 = SuperPolynomial::x(&c, 0);
        let p1 = SuperPolynomial::p(&c, 0);
        let p2 = SuperPolynomial::p(&c, 1);
        let one = SuperPolynomial::one(&c);
        assert_eq!(pb(&p1, &x1), one);
        assert_eq!(pb(&x1, &p1), -&one);
        assert!(pb(&p2, &x1).is_zero());
        let xi1 = SuperPolynomial::theta(&c, 0);
        let psi1 = SuperPolynomial::theta(&c, 2);
        assert!(pb(&xi1, &xi1).is_zero());
        assert_eq!(pb(&xi1, &psi1), one);
        assert_eq!(pb(&psi1, &xi1), one);
        let f = &(&x1 * &p2) + &(&xi1 * &psi1);
        assert!(pb(&f, &one).is_zero());
        assert!(pb(&one, &f).is_zero());
    }

    #[test]
    fn euclidean_odd_pairing_is_metric_inverse() {
        let g = Matrix::from_rows(vec![vec![qi(2), qi(1)], vec![qi(1), qi(1)]]).unwrap();
        let c = GradedContext::new(1, g).unwrap();
        let t1 = SuperPolynomial::theta(&c, 0);
        let t2 = SuperPolynomial::theta(&c, 1);
        // g^{-1} = [[1, -1], [-1, 2]]
        assert_eq!(pb(&t1, &t1), SuperPolynomial::constant(&c, qi(1)));
        assert_eq!(pb(&t1, &t2), SuperPolynomial::constant(&c, qi(-1)));
        assert_eq!(pb(&t2, &t2), SuperPolynomial::constant(&c, qi(2)));
    }

    #[test]
    fn degree_components_split() {
        let c = ctx();
        let x1 = SuperPolynomial::x(&c, 0);
        let p1 = SuperPolynomial::p(&c, 0);
        let t1 = SuperPolynomial::theta(&c, 0);
        let t2 = SuperPolynomial::theta(&c, 1);
        let comps = (&(&x1 + &t1) + &p1).degree_components();
        assert_eq!(comps.len(), 3);
        assert_eq!(comps[&0], x1);
        assert_eq!(comps[&1], t1);
        assert_eq!(comps[&2], p1);
        assert!(SuperPolynomial::zero(&c).degree_components().is_empty());
        let mixed = &(&t1 * &t2) + &(&x1 * &p1);
        let comps = mixed.degree_components();
        assert_eq!(comps.keys().copied().collect::<Vec<_>>(), vec![2]);
        assert_eq!(comps[&2], mixed);
    }

    #[test]
    fn context_mismatch_is_rejected() {
        let a = SuperPolynomial::x(&GradedContext::euclidean(2, 2), 0);
        let b = SuperPolynomial::x(&GradedContext::euclidean(2, 3), 0);
        assert_eq!(a.multiply(&b), Err(Error::ContextMismatch));
        assert_eq!(a.poisson_bracket(&b), Err(Error::ContextMismatch));
        // structurally equal contexts are interchangeable
        let c = SuperPolynomial::x(&GradedContext::euclidean(2, 2), 0);
        assert!(a.multiply(&c).is_ok());
    }

    #[test]
    fn explicit_monomial_sorting_sign() {
        let c = ctx();
        let f = SuperPolynomial::monomial(&c, qi(1), vec![0, 0], vec![0, 0], &[2, 0, 1]).unwrap();
        // θ3 θ1 θ2 = θ1 θ2 θ3 (two transpositions)
        let t = |a| SuperPolynomial::theta(&c, a);
        assert_eq!(f, &(&t(0) * &t(1)) * &t(2));
        let z = SuperPolynomial::monomial(&c, qi(1), vec![0, 0], vec![0, 0], &[1, 1]).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn invalid_metrics() {
        let nonsym = Matrix::from_rows(vec![vec![qi(1), qi(2)], vec![qi(0), qi(1)]]).unwrap();
        assert!(GradedContext::new(1, nonsym).is_err());
        let singular = Matrix::from_rows(vec![vec![qi(1), qi(1)], vec![qi(1), qi(1)]]).unwrap();
        assert!(GradedContext::new(1, singular).is_err());
    }
}
