//! Commutative polynomials with rational coefficients in the base
//! coordinates `x^1, ..., x^n`.

use crate::rational::{coefficient_prefix, WireRational, Q};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

pub type Exponents = Vec<u32>;

/// Sparse polynomial in `nvars` commuting variables. Zero is the empty map;
/// stored coefficients are never zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exponents, Q>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Q::one())
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        Self::monomial(nvars, vec![0; nvars], c)
    }

    /// The coordinate `x^{i+1}` (zero-based index `i`).
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index {i} out of range for {nvars} variables");
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(nvars, e, Q::one())
    }

    pub fn monomial(nvars: usize, exponents: Exponents, c: Q) -> Self {
        assert_eq!(exponents.len(), nvars, "exponent vector length");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exponents, c);
        }
        Poly { nvars, terms }
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponents, Q)>) -> Self {
        let mut p = Poly::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Q)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exponents: &[u32]) -> Q {
        self.terms.get(exponents).cloned().unwrap_or_else(Q::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// The value if the polynomial is a constant (zero included).
    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&k| k == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub(crate) fn add_term(&mut self, e: Exponents, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
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

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Partial derivative with respect to `x^{i+1}`.
    pub fn derivative(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.add_term(e2, c * Q::from_integer(e[i].into()));
        }
        out
    }

    /// Evaluates at a rational point.
    pub fn eval(&self, point: &[Q]) -> Q {
        assert_eq!(point.len(), self.nvars);
        let mut acc = Q::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                for _ in 0..k {
                    t *= x;
                }
            }
            acc += t;
        }
        acc
    }

    fn check_compatible(&self, other: &Poly) {
        assert_eq!(self.nvars, other.nvars, "polynomials over different variable sets");
    }
}

/// All exponent vectors in `nvars` variables of total degree `<= max_degree`,
/// ordered by degree, then lexicographically.
pub fn monomials_up_to(nvars: usize, max_degree: u32) -> Vec<Exponents> {
    let mut out = Vec::new();
    for d in 0..=max_degree {
        let mut cur = vec![0; nvars];
        fill_degree(&mut out, &mut cur, 0, d);
    }
    out
}

fn fill_degree(out: &mut Vec<Exponents>, cur: &mut Exponents, pos: usize, remaining: u32) {
    if pos + 1 >= cur.len() {
        if cur.is_empty() {
            if remaining == 0 {
                out.push(cur.clone());
            }
            return;
        }
        cur[pos] = remaining;
        out.push(cur.clone());
        cur[pos] = 0;
        return;
    }
    for k in (0..=remaining).rev() {
        cur[pos] = k;
        fill_degree(out, cur, pos + 1, remaining - k);
    }
    cur[pos] = 0;
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // highest degree first reads more naturally
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let mono = format_exponents(e);
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

pub(crate) fn format_exponents(e: &[u32]) -> String {
    e.iter()
        .enumerate()
        .filter(|(_, &k)| k > 0)
        .map(|(i, &k)| if k == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, k) })
        .collect::<Vec<_>>()
        .join("*")
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        self.check_compatible(rhs);
        for (e, c) in &rhs.terms {
            self.add_term(e.clone(), c.clone());
        }
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        self.check_compatible(rhs);
        for (e, c) in &rhs.terms {
            self.add_term(e.clone(), -c.clone());
        }
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &Poly) -> Poly {
        self.check_compatible(rhs);
        let mut out = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

/// Wire form: a list of `[numerator, denominator, [exponents...]]` triples.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WirePoly(pub Vec<WireTerm>);

#[derive(Clone, Debug)]
pub struct WireTerm {
    pub coefficient: Q,
    pub exponents: Vec<u32>,
}

impl Serialize for WireTerm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeTuple;
        let pair = serde_json::to_value(WireRational(self.coefficient.clone()))
            .map_err(serde::ser::Error::custom)?;
        let mut t = s.serialize_tuple(3)?;
        t.serialize_element(&pair[0])?;
        t.serialize_element(&pair[1])?;
        t.serialize_element(&self.exponents)?;
        t.end()
    }
}

impl<'de> Deserialize<'de> for WireTerm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (num, den, exponents): (serde_json::Value, serde_json::Value, Vec<u32>) =
            Deserialize::deserialize(d)?;
        let c: WireRational = serde_json::from_value(serde_json::Value::Array(vec![num, den]))
            .map_err(serde::de::Error::custom)?;
        Ok(WireTerm { coefficient: c.0, exponents })
    }
}

impl WirePoly {
    pub fn from_poly(p: &Poly) -> Self {
        WirePoly(
            p.terms()
                .map(|(e, c)| WireTerm { coefficient: c.clone(), exponents: e.clone() })
                .collect(),
        )
    }

    pub fn to_poly(&self, nvars: usize) -> std::result::Result<Poly, String> {
        let mut p = Poly::zero(nvars);
        for t in &self.0 {
            if t.exponents.len() != nvars {
                return Err(format!(
                    "exponent vector {:?} has length {}, expected {nvars}",
                    t.exponents,
                    t.exponents.len()
                ));
            }
            p.add_term(t.exponents.clone(), t.coefficient.clone());
        }
        Ok(p)
    }
}
