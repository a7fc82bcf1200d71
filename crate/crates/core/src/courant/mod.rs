//! The standard Courant algebroid `TR^n ⊕ T*R^n` with polynomial
//! coefficients.
//!
//! Sections `X + ξ` carry polynomial vector and covector components. The
//! product is the Dorfman bracket
//!
//! ```text
//! (X + ξ) ∘ (Y + η) = [X, Y] + £_X η − i_Y dξ
//! ```
//!
//! with pairing `⟨X + ξ, Y + η⟩ = i_X η + i_Y ξ` (no factor one half) and
//! anchor the projection to `X`.
//!
//! Identities quantified over all sections are discharged on a *generating
//! set*: basis sections `∂_i`, `dx^i` multiplied by base monomials of degree
//! at most `d` (see [`generating_set`]).

mod checks;
mod commutant;
mod endomorphism;

pub use checks::*;
pub use commutant::{commutant_solve, in_span, CommutantSolution, CommutantStage};
pub use endomorphism::{Block, GenEndomorphism, WireEndomorphism};

use crate::error::{Error, Result};
use crate::poly::{format_exponents, monomials_up_to, Poly, WirePoly};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Default degree bound for generating sets.
pub const DEFAULT_DEGREE_BOUND: u32 = 2;

/// Section `X + ξ` of `TR^n ⊕ T*R^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolySection {
    vector: Vec<Poly>,
    form: Vec<Poly>,
}

impl PolySection {
    pub fn new(vector: Vec<Poly>, form: Vec<Poly>) -> Result<Self> {
        let n = vector.len();
        if form.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: form.len() });
        }
        if let Some(p) = vector.iter().chain(&form).find(|p| p.nvars() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: p.nvars() });
        }
        Ok(PolySection { vector, form })
    }

    pub fn zero(n: usize) -> Self {
        PolySection { vector: vec![Poly::zero(n); n], form: vec![Poly::zero(n); n] }
    }

    /// `∂_{i+1}`.
    pub fn partial(n: usize, i: usize) -> Self {
        let mut s = Self::zero(n);
        s.vector[i] = Poly::one(n);
        s
    }

    /// `dx^{i+1}`.
    pub fn dx(n: usize, i: usize) -> Self {
        let mut s = Self::zero(n);
        s.form[i] = Poly::one(n);
        s
    }

    /// Basis section `k` in the order `∂_1..∂_n, dx^1..dx^n`.
    pub fn basis(n: usize, k: usize) -> Self {
        if k < n {
            Self::partial(n, k)
        } else {
            Self::dx(n, k - n)
        }
    }

    pub fn n(&self) -> usize {
        self.vector.len()
    }

    pub fn vector(&self) -> &[Poly] {
        &self.vector
    }

    pub fn form(&self) -> &[Poly] {
        &self.form
    }

    /// Components in the order `X^1..X^n, ξ_1..ξ_n`.
    pub fn components(&self) -> impl Iterator<Item = &Poly> {
        self.vector.iter().chain(&self.form)
    }

    pub fn from_components(n: usize, comps: Vec<Poly>) -> Self {
        assert_eq!(comps.len(), 2 * n);
        let mut comps = comps;
        let form = comps.split_off(n);
        PolySection { vector: comps, form }
    }

    pub fn is_zero(&self) -> bool {
        self.components().all(Poly::is_zero)
    }

    pub fn times(&self, f: &Poly) -> PolySection {
        PolySection {
            vector: self.vector.iter().map(|v| v * f).collect(),
            form: self.form.iter().map(|v| v * f).collect(),
        }
    }

    pub fn scale(&self, c: &crate::Q) -> PolySection {
        PolySection {
            vector: self.vector.iter().map(|v| v.scale(c)).collect(),
            form: self.form.iter().map(|v| v.scale(c)).collect(),
        }
    }

    pub fn add(&self, other: &PolySection) -> PolySection {
        PolySection {
            vector: self.vector.iter().zip(&other.vector).map(|(a, b)| a + b).collect(),
            form: self.form.iter().zip(&other.form).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &PolySection) -> PolySection {
        PolySection {
            vector: self.vector.iter().zip(&other.vector).map(|(a, b)| a - b).collect(),
            form: self.form.iter().zip(&other.form).map(|(a, b)| a - b).collect(),
        }
    }

    fn check_same_n(&self, other: &PolySection) -> Result<()> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: other.n() });
        }
        Ok(())
    }
}

impl fmt::Display for PolySection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        let labelled = self
            .vector
            .iter()
            .enumerate()
            .map(|(i, c)| (c, format!("∂{}", i + 1)))
            .chain(self.form.iter().enumerate().map(|(i, c)| (c, format!("dx{}", i + 1))));
        for (c, label) in labelled {
            if c.is_zero() {
                continue;
            }
            let coef = match c.as_constant() {
                Some(k) if k == crate::rational::one() => String::new(),
                Some(k) if k == -crate::rational::one() => "-".to_string(),
                _ if c.len() == 1 => format!("{c}*"),
                _ => format!("({c})*"),
            };
            parts.push(format!("{coef}{label}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// `X(f)` for a vector field with polynomial coefficients.
fn apply_vector(x: &[Poly], f: &Poly) -> Poly {
    let n = f.nvars();
    let mut out = Poly::zero(n);
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        let df = f.derivative(i);
        if !df.is_zero() {
            out += &(xi * &df);
        }
    }
    out
}

pub(crate) fn dorfman_raw(a: &PolySection, b: &PolySection) -> PolySection {
    let n = a.n();
    let (x, xi) = (&a.vector, &a.form);
    let (y, eta) = (&b.vector, &b.form);
    // [X, Y]^i = X(Y^i) − Y(X^i)
    let vector = (0..n).map(|i| &apply_vector(x, &y[i]) - &apply_vector(y, &x[i])).collect();
    // (£_X η)_i = X(η_i) + Σ_j η_j ∂_i X^j ;  (i_Y dξ)_i = Σ_j Y^j (∂_j ξ_i − ∂_i ξ_j)
    let form = (0..n)
        .map(|i| {
            let mut c = apply_vector(x, &eta[i]);
            for j in 0..n {
                if !eta[j].is_zero() {
                    c += &(&eta[j] * &x[j].derivative(i));
                }
                if !y[j].is_zero() {
                    let curl = &xi[i].derivative(j) - &xi[j].derivative(i);
                    if !curl.is_zero() {
                        c -= &(&y[j] * &curl);
                    }
                }
            }
            c
        })
        .collect();
    PolySection { vector, form }
}

/// The Dorfman bracket.
pub fn dorfman(a: &PolySection, b: &PolySection) -> Result<PolySection> {
    a.check_same_n(b)?;
    Ok(dorfman_raw(a, b))
}

pub(crate) fn pairing_raw(a: &PolySection, b: &PolySection) -> Poly {
    let mut out = Poly::zero(a.n());
    for i in 0..a.n() {
        out += &(&a.vector[i] * &b.form[i]);
        out += &(&b.vector[i] * &a.form[i]);
    }
    out
}

/// `⟨X + ξ, Y + η⟩ = i_X η + i_Y ξ`.
pub fn pairing(a: &PolySection, b: &PolySection) -> Result<Poly> {
    a.check_same_n(b)?;
    Ok(pairing_raw(a, b))
}

/// `ρ(X + ξ)(f) = X(f)`.
pub fn anchor(a: &PolySection, f: &Poly) -> Result<Poly> {
    if f.nvars() != a.n() {
        return Err(Error::DimensionMismatch { expected: a.n(), found: f.nvars() });
    }
    Ok(apply_vector(&a.vector, f))
}

/// `df = Σ ∂_i f dx^i`.
pub fn exact_form(f: &Poly) -> PolySection {
    let n = f.nvars();
    PolySection { vector: vec![Poly::zero(n); n], form: (0..n).map(|i| f.derivative(i)).collect() }
}

/// Basis sections times every base monomial of degree `<= degree_bound`,
/// ordered by monomial, then basis index.
pub fn generating_set(n: usize, degree_bound: u32) -> Vec<PolySection> {
    let mut out = Vec::new();
    for e in monomials_up_to(n, degree_bound) {
        let m = Poly::monomial(n, e, crate::rational::one());
        for k in 0..2 * n {
            out.push(PolySection::basis(n, k).times(&m));
        }
    }
    out
}

/// Monomials used as test functions alongside generating sets.
pub fn test_functions(n: usize, degree_bound: u32) -> Vec<Poly> {
    monomials_up_to(n, degree_bound)
        .into_iter()
        .map(|e| Poly::monomial(n, e, crate::rational::one()))
        .collect()
}

/// Human-readable name of a base monomial, `1` for the unit.
pub fn monomial_name(e: &[u32]) -> String {
    let s = format_exponents(e);
    if s.is_empty() {
        "1".into()
    } else {
        s
    }
}

/// Wire form `{"vector": [poly...], "form": [poly...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireSection {
    pub vector: Vec<WirePoly>,
    pub form: Vec<WirePoly>,
}

impl WireSection {
    pub fn from_section(s: &PolySection) -> Self {
        WireSection {
            vector: s.vector.iter().map(WirePoly::from_poly).collect(),
            form: s.form.iter().map(WirePoly::from_poly).collect(),
        }
    }

    pub fn to_section(&self, n: usize) -> std::result::Result<PolySection, String> {
        if self.vector.len() != n || self.form.len() != n {
            return Err(format!("section must have {n} vector and {n} form components"));
        }
        let conv = |v: &[WirePoly]| v.iter().map(|p| p.to_poly(n)).collect::<std::result::Result<Vec<_>, _>>();
        PolySection::new(conv(&self.vector)?, conv(&self.form)?).map_err(|e| e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qi;

    fn x(n: usize, i: usize) -> Poly {
        Poly::var(n, i)
    }

    #[test]
    fn dorfman_proof_identities() {
        let n = 2;
        // (x²∂₁) ∘ ∂₂ = −∂₁
        let a = PolySection::partial(n, 0).times(&x(n, 1));
        assert_eq!(dorfman(&a, &PolySection::partial(n, 1)).unwrap(), PolySection::partial(n, 0).scale(&qi(-1)));
        // (x²∂₁) ∘ dx¹ = dx²
        assert_eq!(dorfman(&a, &PolySection::dx(n, 0)).unwrap(), PolySection::dx(n, 1));
        // (∂₁ + x²dx¹) ∘ (∂₁ + x²dx¹) = d(x²)
        let s = PolySection::partial(n, 0).add(&PolySection::dx(n, 0).times(&x(n, 1)));
        assert_eq!(dorfman(&s, &s).unwrap(), PolySection::dx(n, 1));
    }

    #[test]
    fn pairing_and_anchor() {
        let n = 2;
        let d1 = PolySection::partial(n, 0);
        let d2 = PolySection::partial(n, 1);
        let dx1 = PolySection::dx(n, 0);
        assert_eq!(pairing(&d1, &dx1).unwrap(), Poly::one(n));
        assert!(pairing(&d1, &d2).unwrap().is_zero());
        let s = d1.add(&dx1);
        assert_eq!(pairing(&s, &s).unwrap(), Poly::constant(n, qi(2)));
        let f = &x(n, 0) * &x(n, 1);
        assert_eq!(anchor(&d1.add(&PolySection::dx(n, 1).scale(&qi(7))), &f).unwrap(), x(n, 1));
        assert!(anchor(&dx1, &f).unwrap().is_zero());
        assert_eq!(anchor(&d2.times(&x(n, 0)), &x(n, 1)).unwrap(), x(n, 0));
    }

    #[test]
    fn dimension_mismatch() {
        assert!(dorfman(&PolySection::partial(2, 0), &PolySection::partial(3, 0)).is_err());
        assert!(pairing(&PolySection::partial(2, 0), &PolySection::partial(3, 0)).is_err());
        assert!(anchor(&PolySection::partial(2, 0), &Poly::one(3)).is_err());
    }

    #[test]
    fn generating_set_size_and_display() {
        assert_eq!(generating_set(2, 2).len(), 4 * 6);
        assert_eq!(generating_set(3, 1).len(), 6 * 4);
        let s = PolySection::partial(2, 0).times(&x(2, 1)).add(&PolySection::dx(2, 1));
        assert_eq!(s.to_string(), "x2*∂1 + dx2");
        assert_eq!(PolySection::zero(2).to_string(), "0");
    }
}
