//! Finite-dimensional Leibniz algebras over the rationals.
//!
//! A product is stored by its structure constants `e_a ∘ e_b = Σ_d c_{ab}^d e_d`.
//! Every identity is multilinear, so checking it on basis elements is
//! exhaustive.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rational::Q;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Bilinear map `V × V → V` given on basis pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StructureConstants {
    dim: usize,
    data: Vec<Q>,
}

impl StructureConstants {
    pub fn zero(dim: usize) -> Self {
        StructureConstants { dim, data: vec![Q::zero(); dim * dim * dim] }
    }

    /// `c[a][b][d]` is the `e_d` component of `e_a ∘ e_b`.
    pub fn from_nested(c: Vec<Vec<Vec<Q>>>) -> Result<Self> {
        let dim = c.len();
        let mut out = Self::zero(dim);
        for (a, rows) in c.into_iter().enumerate() {
            if rows.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: rows.len() });
            }
            for (b, v) in rows.into_iter().enumerate() {
                if v.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
                }
                for (d, x) in v.into_iter().enumerate() {
                    out.set(a, b, d, x);
                }
            }
        }
        Ok(out)
    }

    /// Builds the table from a closure returning `e_a ∘ e_b`.
    pub fn from_products(dim: usize, mut f: impl FnMut(usize, usize) -> Vec<Q>) -> Self {
        let mut out = Self::zero(dim);
        for a in 0..dim {
            for b in 0..dim {
                let v = f(a, b);
                assert_eq!(v.len(), dim);
                for (d, x) in v.into_iter().enumerate() {
                    out.set(a, b, d, x);
                }
            }
        }
        out
    }

    pub fn to_nested(&self) -> Vec<Vec<Vec<Q>>> {
        (0..self.dim)
            .map(|a| (0..self.dim).map(|b| self.basis_product(a, b)).collect())
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn idx(&self, a: usize, b: usize, d: usize) -> usize {
        (a * self.dim + b) * self.dim + d
    }

    pub fn get(&self, a: usize, b: usize, d: usize) -> &Q {
        &self.data[self.idx(a, b, d)]
    }

    pub fn set(&mut self, a: usize, b: usize, d: usize, v: Q) {
        let i = self.idx(a, b, d);
        self.data[i] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn basis_product(&self, a: usize, b: usize) -> Vec<Q> {
        (0..self.dim).map(|d| self.get(a, b, d).clone()).collect()
    }

    pub fn product(&self, x: &[Q], y: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.dim];
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (b, yb) in y.iter().enumerate() {
                if yb.is_zero() {
                    continue;
                }
                let s = xa * yb;
                for (d, o) in out.iter_mut().enumerate() {
                    let c = self.get(a, b, d);
                    if !c.is_zero() {
                        *o += &s * c;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        StructureConstants {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        StructureConstants { dim: self.dim, data: self.data.iter().map(|v| v * c).collect() }
    }

    /// First basis triple violating `(X∘Y)∘Z = X∘(Y∘Z) − Y∘(X∘Z)`.
    pub fn jacobi_violation(&self) -> Option<[usize; 3]> {
        let d = self.dim;
        let e = |i| unit(d, i);
        for a in 0..d {
            for b in 0..d {
                let ab = self.basis_product(a, b);
                for c in 0..d {
                    let lhs = self.product(&ab, &e(c));
                    let bc = self.basis_product(b, c);
                    let ac = self.basis_product(a, c);
                    let rhs = sub(&self.product(&e(a), &bc), &self.product(&e(b), &ac));
                    if lhs != rhs {
                        return Some([a, b, c]);
                    }
                }
            }
        }
        None
    }

    pub fn satisfies_jacobi(&self) -> bool {
        self.jacobi_violation().is_none()
    }
}

pub(crate) fn unit(dim: usize, i: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); dim];
    v[i] = Q::from_integer(1.into());
    v
}

fn add(x: &[Q], y: &[Q]) -> Vec<Q> {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

fn sub(x: &[Q], y: &[Q]) -> Vec<Q> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

fn dot(x: &[Q], y: &[Q]) -> Q {
    x.iter().zip(y).fold(Q::zero(), |acc, (a, b)| acc + a * b)
}

/// Leibniz product plus an optional invariant metric `g_{ab}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeibnizAlgebra {
    constants: StructureConstants,
    metric: Option<Matrix>,
}

impl LeibnizAlgebra {
    pub fn new(constants: StructureConstants) -> Self {
        LeibnizAlgebra { constants, metric: None }
    }

    pub fn with_metric(constants: StructureConstants, metric: Matrix) -> Result<Self> {
        let dim = constants.dim();
        if metric.rows() != dim || metric.cols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: metric.rows() });
        }
        if !metric.is_symmetric() {
            return Err(Error::InvalidMetric("not symmetric".into()));
        }
        if metric.inverse().is_err() {
            return Err(Error::InvalidMetric("not invertible".into()));
        }
        Ok(LeibnizAlgebra { constants, metric: Some(metric) })
    }

    pub fn abelian(dim: usize) -> Self {
        Self::new(StructureConstants::zero(dim))
    }

    /// `e_1 ∘ e_1 = e_2`, all other products zero.
    pub fn nilpotent_2d() -> Self {
        let mut c = StructureConstants::zero(2);
        c.set(0, 0, 1, Q::from_integer(1.into()));
        Self::new(c)
    }

    /// `e_a ∘ e_b = Σ_d ε_{abd} e_d`, the cross product on `Q^3`.
    pub fn cross_product() -> Self {
        let mut c = StructureConstants::zero(3);
        for (a, b, d) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            c.set(a, b, d, Q::from_integer(1.into()));
            c.set(b, a, d, Q::from_integer((-1).into()));
        }
        Self::new(c)
    }

    pub fn dim(&self) -> usize {
        self.constants.dim()
    }

    pub fn constants(&self) -> &StructureConstants {
        &self.constants
    }

    pub fn metric(&self) -> Option<&Matrix> {
        self.metric.as_ref()
    }

    pub fn product(&self, x: &[Q], y: &[Q]) -> Vec<Q> {
        self.constants.product(x, y)
    }

    fn check_tensor(&self, n: &TensorEndo) -> Result<()> {
        if n.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: n.dim() });
        }
        Ok(())
    }
}

/// Endomorphism `N` with `N(e_a) = Σ_b matrix[b][a] e_b` (images in columns).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorEndo {
    matrix: Matrix,
}

impl TensorEndo {
    pub fn new(matrix: Matrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch { expected: matrix.rows(), found: matrix.cols() });
        }
        Ok(TensorEndo { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        TensorEndo { matrix: Matrix::identity(dim) }
    }

    pub fn scalar(dim: usize, c: Q) -> Self {
        TensorEndo { matrix: Matrix::scalar(dim, c) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn apply(&self, v: &[Q]) -> Vec<Q> {
        self.matrix.apply(v)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &TensorEndo) -> TensorEndo {
        TensorEndo { matrix: self.matrix.mul(&other.matrix) }
    }
}

/// Contracted product of an arbitrary bilinear map:
/// `X ∘_N Y = N(X)∘Y + X∘N(Y) − N(X∘Y)`.
pub fn contract(c: &StructureConstants, n: &TensorEndo) -> StructureConstants {
    let dim = c.dim();
    StructureConstants::from_products(dim, |a, b| {
        let (x, y) = (unit(dim, a), unit(dim, b));
        let nx = n.apply(&x);
        let ny = n.apply(&y);
        let t1 = c.product(&nx, &y);
        let t2 = c.product(&x, &ny);
        let t3 = n.apply(&c.product(&x, &y));
        sub(&add(&t1, &t2), &t3)
    })
}

/// `Tor_N(X, Y) = N(X)∘N(Y) − N(X ∘_N Y)` for an arbitrary bilinear map.
pub fn torsion_of(c: &StructureConstants, n: &TensorEndo) -> StructureConstants {
    let dim = c.dim();
    let cn = contract(c, n);
    StructureConstants::from_products(dim, |a, b| {
        let nx = n.apply(&unit(dim, a));
        let ny = n.apply(&unit(dim, b));
        sub(&c.product(&nx, &ny), &n.apply(&cn.basis_product(a, b)))
    })
}

pub fn jacobi_check(l: &LeibnizAlgebra) -> bool {
    l.constants.satisfies_jacobi()
}

pub fn contracted_product(l: &LeibnizAlgebra, n: &TensorEndo) -> Result<StructureConstants> {
    l.check_tensor(n)?;
    Ok(contract(&l.constants, n))
}

pub fn torsion(l: &LeibnizAlgebra, n: &TensorEndo) -> Result<StructureConstants> {
    l.check_tensor(n)?;
    Ok(torsion_of(&l.constants, n))
}

/// First basis triple where `δT ≠ 0`, with
///
/// ```text
/// (δT)(X,Y,Z) = T(X, Y∘Z) − T(X∘Y, Z) − T(Y, X∘Z)
///             − T(X,Y)∘Z + X∘T(Y,Z) − Y∘T(X,Z)
/// ```
pub fn cocycle_violation(l: &LeibnizAlgebra, t: &StructureConstants) -> Option<[usize; 3]> {
    let dim = l.dim();
    let c = &l.constants;
    for a in 0..dim {
        for b in 0..dim {
            for d in 0..dim {
                let (x, y, z) = (unit(dim, a), unit(dim, b), unit(dim, d));
                let terms = [
                    t.product(&x, &c.product(&y, &z)),
                    t.product(&c.product(&x, &y), &z),
                    t.product(&y, &c.product(&x, &z)),
                    c.product(&t.product(&x, &y), &z),
                    c.product(&x, &t.product(&y, &z)),
                    c.product(&y, &t.product(&x, &z)),
                ];
                let signs = [1, -1, -1, -1, 1, -1];
                let mut acc = vec![Q::zero(); dim];
                for (term, s) in terms.iter().zip(signs) {
                    acc = if s > 0 { add(&acc, term) } else { sub(&acc, term) };
                }
                if acc.iter().any(|v| !v.is_zero()) {
                    return Some([a, b, d]);
                }
            }
        }
    }
    None
}

pub fn cocycle_check(l: &LeibnizAlgebra, t: &StructureConstants) -> Result<bool> {
    if t.dim() != l.dim() {
        return Err(Error::DimensionMismatch { expected: l.dim(), found: t.dim() });
    }
    Ok(cocycle_violation(l, t).is_none())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TensorClass {
    Nijenhuis,
    WeakNijenhuis,
    Neither,
}

impl fmt::Display for TensorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TensorClass::Nijenhuis => "nijenhuis",
            TensorClass::WeakNijenhuis => "weak_nijenhuis",
            TensorClass::Neither => "neither",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NijenhuisReport {
    pub torsion_zero: bool,
    pub cocycle: bool,
    pub classification: TensorClass,
    /// Whether `∘_N` itself satisfies the Leibniz identity. Expected to
    /// agree with `cocycle`.
    pub contracted_is_leibniz: bool,
}

pub fn classify_tensor(l: &LeibnizAlgebra, n: &TensorEndo) -> Result<NijenhuisReport> {
    let tor = torsion(l, n)?;
    let torsion_zero = tor.is_zero();
    let cocycle = torsion_zero || cocycle_violation(l, &tor).is_none();
    let classification = if torsion_zero {
        TensorClass::Nijenhuis
    } else if cocycle {
        TensorClass::WeakNijenhuis
    } else {
        TensorClass::Neither
    };
    let contracted_is_leibniz = contract(&l.constants, n).satisfies_jacobi();
    Ok(NijenhuisReport { torsion_zero, cocycle, classification, contracted_is_leibniz })
}

/// Witness for a failed quadratic-Lie-algebra check: `(a, b, c)` with the
/// identity that failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointCourantViolation {
    pub indices: [usize; 3],
    pub identity: &'static str,
    pub value: Q,
}

/// `⟨X, Y∘Z + Z∘Y⟩ = 0` and `⟨X∘Y, Z⟩ + ⟨Y, X∘Z⟩ = 0` on basis triples: the
/// Courant axioms over a point, polarized.
pub fn point_courant_violation(l: &LeibnizAlgebra) -> Result<Option<PointCourantViolation>> {
    let g = l.metric.as_ref().ok_or(Error::MissingMetric)?;
    let dim = l.dim();
    let c = &l.constants;
    let pair = |x: &[Q], y: &[Q]| dot(x, &g.apply(y));
    let triples = || {
        (0..dim).flat_map(move |a| (0..dim).flat_map(move |b| (0..dim).map(move |d| [a, b, d])))
    };
    for [a, b, d] in triples() {
        let (x, y, z) = (unit(dim, a), unit(dim, b), unit(dim, d));
        let v = pair(&x, &add(&c.product(&y, &z), &c.product(&z, &y)));
        if !v.is_zero() {
            return Ok(Some(PointCourantViolation {
                indices: [a, b, d],
                identity: "<X, Y∘Z + Z∘Y> = 0",
                value: v,
            }));
        }
    }
    for [a, b, d] in triples() {
        let (x, y, z) = (unit(dim, a), unit(dim, b), unit(dim, d));
        let v = pair(&c.product(&x, &y), &z) + pair(&y, &c.product(&x, &z));
        if !v.is_zero() {
            return Ok(Some(PointCourantViolation {
                indices: [a, b, d],
                identity: "<X∘Y, Z> + <Y, X∘Z> = 0",
                value: v,
            }));
        }
    }
    Ok(None)
}

pub fn point_courant_check(l: &LeibnizAlgebra) -> Result<bool> {
    Ok(point_courant_violation(l)?.is_none())
}

/// Whether `∘_N + λ∘` is a Leibniz product. Only meaningful when `N` is
/// (weak) Nijenhuis.
pub fn compatibility_pencil_check(l: &LeibnizAlgebra, n: &TensorEndo, lambda: &Q) -> Result<bool> {
    let report = classify_tensor(l, n)?;
    if report.classification == TensorClass::Neither {
        return Err(Error::Precondition("tensor is neither Nijenhuis nor weak Nijenhuis".into()));
    }
    let pencil = contract(&l.constants, n).add(&l.constants.scale(lambda));
    Ok(pencil.satisfies_jacobi())
}

/// `X ∘ N²Y = N²(X∘Y)` and `N²(Y∘Z + Z∘Y) = N²Y∘Z + N²Z∘Y` on basis
/// elements.
pub fn square_commutes_check(l: &LeibnizAlgebra, n: &TensorEndo) -> Result<bool> {
    l.check_tensor(n)?;
    let dim = l.dim();
    let n2 = n.compose(n);
    let c = &l.constants;
    for a in 0..dim {
        for b in 0..dim {
            let (x, y) = (unit(dim, a), unit(dim, b));
            if c.product(&x, &n2.apply(&y)) != n2.apply(&c.product(&x, &y)) {
                return Ok(false);
            }
            let lhs = n2.apply(&add(&c.product(&x, &y), &c.product(&y, &x)));
            let rhs = add(&c.product(&n2.apply(&x), &y), &c.product(&n2.apply(&y), &x));
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `X (∘_N)_N Y = 2 Tor_N(X, Y) + X ∘_{N²} Y`, each side built separately.
pub fn twice_contracted_identity(c: &StructureConstants, n: &TensorEndo) -> bool {
    let lhs = contract(&contract(c, n), n);
    let rhs = torsion_of(c, n)
        .scale(&Q::from_integer(2.into()))
        .add(&contract(c, &n.compose(n)));
    lhs == rhs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn mat(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| qi(v)).collect()).collect()).unwrap()
    }

    /// Independent brute-force Jacobi: expands every term through explicit
    /// index sums over the structure constants.
    fn brute_jacobi(c: &StructureConstants) -> bool {
        let d = c.dim();
        for a in 0..d {
            for b in 0..d {
                for e in 0..d {
                    for out in 0..d {
                        let mut lhs = Q::zero();
                        let mut rhs = Q::zero();
                        for k in 0..d {
                            lhs += c.get(a, b, k) * c.get(k, e, out);
                            rhs += c.get(b, e, k) * c.get(a, k, out);
                            rhs -= c.get(a, e, k) * c.get(b, k, out);
                        }
                        if lhs != rhs {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    #[test]
    fn jacobi_examples() {
        assert!(jacobi_check(&LeibnizAlgebra::abelian(3)));
        let nil = LeibnizAlgebra::nilpotent_2d();
        assert!(jacobi_check(&nil));
        assert!(brute_jacobi(nil.constants()));
        let cross = LeibnizAlgebra::cross_product();
        assert!(jacobi_check(&cross));
        assert!(brute_jacobi(cross.constants()));
        // e1∘e2 = e1, e2∘e1 = e2 is not Leibniz
        let mut c = StructureConstants::zero(2);
        c.set(0, 1, 0, qi(1));
        c.set(1, 0, 1, qi(1));
        assert!(!brute_jacobi(&c));
        assert!(c.jacobi_violation().is_some());
    }

    #[test]
    fn contracted_product_limits() {
        let cross = LeibnizAlgebra::cross_product();
        let id = TensorEndo::identity(3);
        assert_eq!(&contracted_product(&cross, &id).unwrap(), cross.constants());
        let zero = TensorEndo::scalar(3, qi(0));
        assert!(contracted_product(&cross, &zero).unwrap().is_zero());
    }

    #[test]
    fn contracted_product_cross_diag() {
        // Expansion oracle for N = diag(1,1,0) on the cross product:
        // X∘_N Y = NX×Y + X×NY − N(X×Y) on each basis pair, by hand:
        // e1,e2: e3 + e3 − 0 = 2e3;  e2,e3: e1 + 0 − e1 = 0;  e3,e1: 0 + e2 − e2 = 0.
        let cross = LeibnizAlgebra::cross_product();
        let n = TensorEndo::new(mat(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 0]])).unwrap();
        let cn = contracted_product(&cross, &n).unwrap();
        let expected = StructureConstants::from_nested(vec![
            vec![vec![qi(0); 3], vec![qi(0), qi(0), qi(2)], vec![qi(0); 3]],
            vec![vec![qi(0), qi(0), qi(-2)], vec![qi(0); 3], vec![qi(0); 3]],
            vec![vec![qi(0); 3], vec![qi(0); 3], vec![qi(0); 3]],
        ])
        .unwrap();
        assert_eq!(cn, expected);
    }

    #[test]
    fn torsion_examples() {
        let cross = LeibnizAlgebra::cross_product();
        assert!(torsion(&cross, &TensorEndo::scalar(3, q(-7, 3))).unwrap().is_zero());
        // N(e1) = e2, N(e2) = 0 on e1∘e1 = e2: every pair gives 0 by hand.
        let nil = LeibnizAlgebra::nilpotent_2d();
        let n = TensorEndo::new(mat(&[&[0, 0], &[1, 0]])).unwrap();
        assert!(torsion(&nil, &n).unwrap().is_zero());
        assert_eq!(classify_tensor(&nil, &n).unwrap().classification, TensorClass::Nijenhuis);
        assert_eq!(
            classify_tensor(&cross, &TensorEndo::identity(3)).unwrap().classification,
            TensorClass::Nijenhuis
        );
    }

    #[test]
    fn torsion_matches_double_evaluation() {
        // Oracle: evaluate Tor_N(X,Y) with index sums, independent of `contract`.
        let cross = LeibnizAlgebra::cross_product();
        let c = cross.constants();
        let n = mat(&[&[1, 2, 0], &[-1, 0, 3], &[2, 1, -1]]);
        let tor = torsion(&cross, &TensorEndo::new(n.clone()).unwrap()).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                for out in 0..3 {
                    // N(e_a)∘N(e_b)
                    let mut v = Q::zero();
                    for i in 0..3 {
                        for j in 0..3 {
                            v += &n[(i, a)] * &n[(j, b)] * c.get(i, j, out);
                        }
                    }
                    // −N(N e_a ∘ e_b + e_a ∘ N e_b − N(e_a ∘ e_b))
                    for k in 0..3 {
                        let mut inner = Q::zero();
                        for i in 0..3 {
                            inner += &n[(i, a)] * c.get(i, b, k);
                            inner += &n[(i, b)] * c.get(a, i, k);
                            inner -= &n[(k, i)] * c.get(a, b, i);
                        }
                        v -= &n[(out, k)] * inner;
                    }
                    assert_eq!(&v, tor.get(a, b, out), "pair ({a},{b}) component {out}");
                }
            }
        }
    }

    #[test]
    fn cocycle_examples() {
        let cross = LeibnizAlgebra::cross_product();
        assert!(cocycle_check(&cross, &StructureConstants::zero(3)).unwrap());
        let tor = torsion(&cross, &TensorEndo::identity(3)).unwrap();
        assert!(cocycle_check(&cross, &tor).unwrap());
        let mut t = StructureConstants::zero(3);
        t.set(0, 1, 2, q(3, 2));
        t.set(2, 2, 0, qi(-1));
        assert!(cocycle_check(&LeibnizAlgebra::abelian(3), &t).unwrap());
        assert!(cocycle_check(&cross, &StructureConstants::zero(2)).is_err());
    }

    #[test]
    fn point_courant_examples() {
        let cross = LeibnizAlgebra::with_metric(
            LeibnizAlgebra::cross_product().constants().clone(),
            Matrix::identity(3),
        )
        .unwrap();
        assert!(point_courant_check(&cross).unwrap());
        let ab = LeibnizAlgebra::with_metric(StructureConstants::zero(2), mat(&[&[0, 1], &[1, 0]])).unwrap();
        assert!(point_courant_check(&ab).unwrap());
        let nil = LeibnizAlgebra::with_metric(
            LeibnizAlgebra::nilpotent_2d().constants().clone(),
            Matrix::identity(2),
        )
        .unwrap();
        let w = point_courant_violation(&nil).unwrap().unwrap();
        assert_eq!(w.indices, [1, 0, 0]);
        assert_eq!(w.value, qi(2));
        assert_eq!(point_courant_check(&LeibnizAlgebra::cross_product()), Err(Error::MissingMetric));
    }

    #[test]
    fn pencil_examples() {
        let nil = LeibnizAlgebra::nilpotent_2d();
        let n = TensorEndo::new(mat(&[&[0, 0], &[1, 0]])).unwrap();
        for lambda in [qi(0), qi(1), qi(-1), qi(3)] {
            assert!(compatibility_pencil_check(&nil, &n, &lambda).unwrap());
        }
        let cross = LeibnizAlgebra::cross_product();
        for lambda in [qi(0), q(5, 2), qi(-2)] {
            assert!(compatibility_pencil_check(&cross, &TensorEndo::identity(3), &lambda).unwrap());
        }
    }

    #[test]
    fn neither_class_breaks_jacobi() {
        let hemi = LeibnizAlgebra::new(crate::random::hemisemidirect_aff());
        assert!(jacobi_check(&hemi));
        let n = TensorEndo::new(mat(&[&[1, 0, 2, 0], &[0, -1, 0, 1], &[3, 0, 0, 0], &[0, 1, 1, 2]])).unwrap();
        let r = classify_tensor(&hemi, &n).unwrap();
        assert_eq!(r.classification, TensorClass::Neither);
        assert!(!r.contracted_is_leibniz);
        assert!(!brute_jacobi(&contracted_product(&hemi, &n).unwrap()));
        assert!(compatibility_pencil_check(&hemi, &n, &qi(1)).is_err());
    }

    #[test]
    fn three_dimensional_lie_torsion_is_always_a_cocycle() {
        // On the cross product every contracted bracket stays Leibniz.
        let cross = LeibnizAlgebra::cross_product();
        let n = TensorEndo::new(mat(&[&[1, 2, 0], &[-1, 0, 3], &[2, 1, -1]])).unwrap();
        let r = classify_tensor(&cross, &n).unwrap();
        assert_eq!(r.classification, TensorClass::WeakNijenhuis);
        assert!(r.contracted_is_leibniz);
    }

    #[test]
    fn twice_contracted_identity_holds() {
        let cross = LeibnizAlgebra::cross_product();
        let n = TensorEndo::new(mat(&[&[1, 2, 0], &[-1, 0, 3], &[2, 1, -1]])).unwrap();
        assert!(twice_contracted_identity(cross.constants(), &n));
    }
}
