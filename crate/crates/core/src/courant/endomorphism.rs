use super::PolySection;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::poly::{Poly, WirePoly};
use crate::rational::Q;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Block {
    /// `TM → TM`
    A,
    /// `T*M → TM`
    Pi,
    /// `TM → T*M`
    Beta,
    /// `T*M → T*M`
    D,
}

/// A `(1,1)`-tensor on `TR^n ⊕ T*R^n` in block form
///
/// ```text
/// N(X + ξ) = (A X + π ξ) + (β X + D ξ)
/// ```
///
/// stored as one `2n × 2n` polynomial matrix `[[A, π], [β, D]]` acting on
/// component vectors `(X^1..X^n, ξ_1..ξ_n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GenEndomorphism {
    n: usize,
    entries: Vec<Poly>,
}

impl GenEndomorphism {
    pub fn zero(n: usize) -> Self {
        GenEndomorphism { n, entries: vec![Poly::zero(n); 4 * n * n] }
    }

    pub fn scalar(n: usize, c: Q) -> Self {
        let mut out = Self::zero(n);
        for i in 0..2 * n {
            out.set(i, i, Poly::constant(n, c.clone()));
        }
        out
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, crate::rational::one())
    }

    /// `diag(a·I, d·I)`.
    pub fn diag_blocks(n: usize, a: Q, d: Q) -> Self {
        let mut out = Self::zero(n);
        for i in 0..n {
            out.set(i, i, Poly::constant(n, a.clone()));
            out.set(n + i, n + i, Poly::constant(n, d.clone()));
        }
        out
    }

    pub fn from_blocks(a: Vec<Vec<Poly>>, pi: Vec<Vec<Poly>>, beta: Vec<Vec<Poly>>, d: Vec<Vec<Poly>>) -> Result<Self> {
        let n = a.len();
        let mut out = Self::zero(n);
        for (blk, m) in [(Block::A, a), (Block::Pi, pi), (Block::Beta, beta), (Block::D, d)] {
            if m.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: m.len() });
            }
            for (i, row) in m.into_iter().enumerate() {
                if row.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, found: row.len() });
                }
                for (j, p) in row.into_iter().enumerate() {
                    if p.nvars() != n {
                        return Err(Error::DimensionMismatch { expected: n, found: p.nvars() });
                    }
                    let (r, c) = Self::block_offset(n, blk);
                    out.set(r + i, c + j, p);
                }
            }
        }
        Ok(out)
    }

    /// Constant endomorphism from a `2n × 2n` rational matrix in the basis
    /// `∂_1..∂_n, dx^1..dx^n` (images in columns).
    pub fn from_constant(m: &Matrix) -> Result<Self> {
        if !m.is_square() || !m.rows().is_multiple_of(2) {
            return Err(Error::Invalid(format!("expected a 2n x 2n matrix, got {}x{}", m.rows(), m.cols())));
        }
        let n = m.rows() / 2;
        let mut out = Self::zero(n);
        for i in 0..2 * n {
            for j in 0..2 * n {
                out.set(i, j, Poly::constant(n, m[(i, j)].clone()));
            }
        }
        Ok(out)
    }

    /// `N_ω` for a constant nondegenerate skew matrix `ω`: `A = D = 0`,
    /// `β = ω`, `π = −ω⁻¹`, so that `N² = −I`.
    pub fn from_symplectic(omega: &Matrix) -> Result<Self> {
        let n = omega.rows();
        if omega.transpose() != omega.scale(&-crate::rational::one()) {
            return Err(Error::Invalid("ω must be skew-symmetric".into()));
        }
        let inv = omega.inverse()?;
        let mut full = Matrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                full[(i, n + j)] = -inv[(i, j)].clone();
                full[(n + i, j)] = omega[(i, j)].clone();
            }
        }
        Self::from_constant(&full)
    }

    fn block_offset(n: usize, b: Block) -> (usize, usize) {
        match b {
            Block::A => (0, 0),
            Block::Pi => (0, n),
            Block::Beta => (n, 0),
            Block::D => (n, n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i * 2 * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Poly) {
        let k = i * 2 * self.n + j;
        self.entries[k] = p;
    }

    pub fn block(&self, b: Block) -> Vec<Vec<Poly>> {
        let n = self.n;
        let (r, c) = Self::block_offset(n, b);
        (0..n).map(|i| (0..n).map(|j| self.get(r + i, c + j).clone()).collect()).collect()
    }

    pub fn apply(&self, s: &PolySection) -> PolySection {
        assert_eq!(s.n(), self.n, "endomorphism and section over different dimensions");
        let comps: Vec<&Poly> = s.components().collect();
        let out = (0..2 * self.n)
            .map(|i| {
                let mut acc = Poly::zero(self.n);
                for (j, c) in comps.iter().enumerate() {
                    let e = self.get(i, j);
                    if !e.is_zero() && !c.is_zero() {
                        acc += &(e * *c);
                    }
                }
                acc
            })
            .collect();
        PolySection::from_components(self.n, out)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &GenEndomorphism) -> GenEndomorphism {
        let m = 2 * self.n;
        let mut out = Self::zero(self.n);
        for i in 0..m {
            for j in 0..m {
                let mut acc = Poly::zero(self.n);
                for k in 0..m {
                    let (a, b) = (self.get(i, k), other.get(k, j));
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn add(&self, other: &GenEndomorphism) -> GenEndomorphism {
        GenEndomorphism {
            n: self.n,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &GenEndomorphism) -> GenEndomorphism {
        GenEndomorphism {
            n: self.n,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: &Q) -> GenEndomorphism {
        GenEndomorphism { n: self.n, entries: self.entries.iter().map(|p| p.scale(c)).collect() }
    }

    /// Adjoint with respect to the pairing: `(Dᵀ, πᵀ, βᵀ, Aᵀ)`.
    pub fn adjoint(&self) -> GenEndomorphism {
        let n = self.n;
        let t = |b: Block| -> Vec<Vec<Poly>> {
            let m = self.block(b);
            (0..n).map(|i| (0..n).map(|j| m[j][i].clone()).collect()).collect()
        };
        Self::from_blocks(t(Block::D), t(Block::Pi), t(Block::Beta), t(Block::A))
            .expect("blocks of a valid endomorphism")
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Poly::is_zero)
    }

    pub fn as_constant_matrix(&self) -> Option<Matrix> {
        let m = 2 * self.n;
        let mut out = Matrix::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                out[(i, j)] = self.get(i, j).as_constant()?;
            }
        }
        Some(out)
    }

    /// `Some(c)` when the endomorphism is `c·I` with `c` constant.
    pub fn as_scalar(&self) -> Option<Q> {
        self.as_constant_matrix()?.as_scalar()
    }
}

impl fmt::Display for GenEndomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = 2 * self.n;
        write!(f, "[")?;
        for i in 0..m {
            if i > 0 {
                write!(f, ", ")?;
            }
            let row: Vec<String> = (0..m).map(|j| self.get(i, j).to_string()).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Wire form with the four `n × n` blocks named `A`, `pi`, `beta`, `D`;
/// an omitted block is zero.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireEndomorphism {
    #[serde(rename = "A", default)]
    pub a: Vec<Vec<WirePoly>>,
    #[serde(default)]
    pub pi: Vec<Vec<WirePoly>>,
    #[serde(default)]
    pub beta: Vec<Vec<WirePoly>>,
    #[serde(rename = "D", default)]
    pub d: Vec<Vec<WirePoly>>,
}

impl WireEndomorphism {
    pub fn from_endomorphism(e: &GenEndomorphism) -> Self {
        let conv = |b| {
            e.block(b)
                .iter()
                .map(|r| r.iter().map(WirePoly::from_poly).collect())
                .collect()
        };
        WireEndomorphism { a: conv(Block::A), pi: conv(Block::Pi), beta: conv(Block::Beta), d: conv(Block::D) }
    }

    /// Converts, naming the offending block (`"A"`, `"pi"`, ...) on error.
    pub fn to_endomorphism(&self, n: usize) -> std::result::Result<GenEndomorphism, (String, String)> {
        let conv = |name: &str, m: &Vec<Vec<WirePoly>>| -> std::result::Result<Vec<Vec<Poly>>, (String, String)> {
            if m.is_empty() {
                return Ok(vec![vec![Poly::zero(n); n]; n]);
            }
            if m.len() != n || m.iter().any(|r| r.len() != n) {
                return Err((name.to_string(), format!("block must be {n}x{n}")));
            }
            m.iter()
                .map(|r| r.iter().map(|p| p.to_poly(n)).collect::<std::result::Result<Vec<_>, _>>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| (name.to_string(), e))
        };
        GenEndomorphism::from_blocks(
            conv("A", &self.a)?,
            conv("pi", &self.pi)?,
            conv("beta", &self.beta)?,
            conv("D", &self.d)?,
        )
        .map_err(|e| (String::new(), e.to_string()))
    }
}
