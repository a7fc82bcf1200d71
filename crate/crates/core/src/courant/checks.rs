use super::{anchor, dorfman_raw, exact_form, generating_set, pairing_raw, test_functions, GenEndomorphism, PolySection};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::{q, Q, WireRational};
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;

/// A concrete failing instance of an identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub identity: String,
    pub inputs: Vec<String>,
    pub residual: String,
}

impl Witness {
    pub fn new(identity: impl Into<String>, inputs: Vec<String>, residual: impl fmt::Display) -> Self {
        Witness { identity: identity.into(), inputs, residual: residual.to_string() }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} fails at ({}): residual {}", self.identity, self.inputs.join(", "), self.residual)
    }
}

type Product<'a> = dyn Fn(&PolySection, &PolySection) -> PolySection + 'a;
type Anchor<'a> = dyn Fn(&PolySection, &Poly) -> Poly + 'a;

/// All products `x ∘ y` for `x, y` in `gens`, row-major.
fn product_table(gens: &[PolySection], prod: &Product) -> Vec<PolySection> {
    let mut out = Vec::with_capacity(gens.len() * gens.len());
    for x in gens {
        for y in gens {
            out.push(prod(x, y));
        }
    }
    out
}

/// Checks, on all generating triples and test monomials,
///
/// - `ρ(X)⟨Y,Z⟩ = ⟨X, Y∘Z + Z∘Y⟩` (polarized symmetric-part axiom),
/// - `ρ(X)⟨Y,Z⟩ = ⟨X∘Y, Z⟩ + ⟨Y, X∘Z⟩` (invariance),
/// - `X∘(fY) = f X∘Y + ρ(X)(f) Y` (anchor rule),
///
/// returning the first witness per failing identity.
pub fn courant_axiom_violations(gens: &[PolySection], fns: &[Poly], prod: &Product, rho: &Anchor) -> Vec<Witness> {
    let g = gens.len();
    let table = product_table(gens, prod);
    let at = |i: usize, j: usize| &table[i * g + j];
    let mut out = Vec::new();

    let mut sym_done = false;
    let mut inv_done = false;
    'outer: for i in 0..g {
        for j in 0..g {
            for k in 0..g {
                let (x, y, z) = (&gens[i], &gens[j], &gens[k]);
                let lhs = rho(x, &pairing_raw(y, z));
                if !sym_done {
                    let rhs = pairing_raw(x, &at(j, k).add(at(k, j)));
                    if lhs != rhs {
                        out.push(Witness::new(
                            "ρ(X)<Y,Z> = <X, Y∘Z + Z∘Y>",
                            vec![x.to_string(), y.to_string(), z.to_string()],
                            &lhs - &rhs,
                        ));
                        sym_done = true;
                    }
                }
                if !inv_done {
                    let rhs = &pairing_raw(at(i, j), z) + &pairing_raw(y, at(i, k));
                    if lhs != rhs {
                        out.push(Witness::new(
                            "ρ(X)<Y,Z> = <X∘Y,Z> + <Y,X∘Z>",
                            vec![x.to_string(), y.to_string(), z.to_string()],
                            &lhs - &rhs,
                        ));
                        inv_done = true;
                    }
                }
                if sym_done && inv_done {
                    break 'outer;
                }
            }
        }
    }

    'anchor: for x in gens {
        for y in gens {
            for f in fns {
                let lhs = prod(x, &y.times(f));
                let rhs = prod(x, y).times(f).add(&y.times(&rho(x, f)));
                if lhs != rhs {
                    out.push(Witness::new(
                        "X∘(fY) = f X∘Y + ρ(X)(f) Y",
                        vec![x.to_string(), format!("f = {f}"), y.to_string()],
                        lhs.sub(&rhs),
                    ));
                    break 'anchor;
                }
            }
        }
    }
    out
}

/// Courant axioms of the Dorfman bracket on the generating set of degree
/// `<= degree_bound`.
pub fn dorfman_axiom_violations(n: usize, degree_bound: u32) -> Vec<Witness> {
    let gens = generating_set(n, degree_bound);
    let fns = test_functions(n, degree_bound);
    courant_axiom_violations(&gens, &fns, &dorfman_raw, &|x, f| anchor(x, f).unwrap())
}

/// First generating triple violating `(X∘Y)∘Z = X∘(Y∘Z) − Y∘(X∘Z)`.
pub fn leibniz_violation(gens: &[PolySection], prod: &Product) -> Option<Witness> {
    let g = gens.len();
    let table = product_table(gens, prod);
    for i in 0..g {
        for j in 0..g {
            let xy = &table[i * g + j];
            for k in 0..g {
                let lhs = prod(xy, &gens[k]);
                let rhs = prod(&gens[i], &table[j * g + k]).sub(&prod(&gens[j], &table[i * g + k]));
                if lhs != rhs {
                    return Some(Witness::new(
                        "(X∘Y)∘Z = X∘(Y∘Z) − Y∘(X∘Z)",
                        vec![gens[i].to_string(), gens[j].to_string(), gens[k].to_string()],
                        lhs.sub(&rhs),
                    ));
                }
            }
        }
    }
    None
}

pub fn dorfman_jacobi_violation(n: usize, degree_bound: u32) -> Option<Witness> {
    leibniz_violation(&generating_set(n, degree_bound), &dorfman_raw)
}

/// `X ∘_N Y = NX∘Y + X∘NY − N(X∘Y)` for the Dorfman bracket.
pub fn contracted_dorfman(tensor: &GenEndomorphism, a: &PolySection, b: &PolySection) -> PolySection {
    let t1 = dorfman_raw(&tensor.apply(a), b);
    let t2 = dorfman_raw(a, &tensor.apply(b));
    let t3 = tensor.apply(&dorfman_raw(a, b));
    t1.add(&t2).sub(&t3)
}

/// `Tor_N(a, b) = Na∘Nb − N(a ∘_N b)`.
pub fn torsion_courant(tensor: &GenEndomorphism, a: &PolySection, b: &PolySection) -> Result<PolySection> {
    if a.n() != tensor.n() || b.n() != tensor.n() {
        return Err(Error::DimensionMismatch { expected: tensor.n(), found: a.n().max(b.n()) });
    }
    let lhs = dorfman_raw(&tensor.apply(a), &tensor.apply(b));
    Ok(lhs.sub(&tensor.apply(&contracted_dorfman(tensor, a, b))))
}

pub fn torsion_violation(tensor: &GenEndomorphism, degree_bound: u32) -> Option<Witness> {
    let gens = generating_set(tensor.n(), degree_bound);
    for a in &gens {
        for b in &gens {
            let t = torsion_courant(tensor, a, b).expect("same dimension");
            if !t.is_zero() {
                return Some(Witness::new("Tor_N(X,Y) = 0", vec![a.to_string(), b.to_string()], t));
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaConditions {
    /// `X∘ΔZ = Δ(X∘Z)` for vector fields `X`.
    pub commutes_with_left_multiplication: bool,
    /// `Δ(Y∘Y) = ΔY∘Y`, checked in polarized form.
    pub square_condition: bool,
    pub witnesses: Vec<Witness>,
}

impl DeltaConditions {
    pub fn as_pair(&self) -> (bool, bool) {
        (self.commutes_with_left_multiplication, self.square_condition)
    }
}

fn is_vector_field(s: &PolySection) -> bool {
    s.form().iter().all(Poly::is_zero)
}

fn left_multiplication_violation<'a>(
    delta: &GenEndomorphism,
    left: impl Iterator<Item = &'a PolySection>,
    gens: &[PolySection],
    images: &[PolySection],
) -> Option<Witness> {
    for x in left {
        for (z, dz) in gens.iter().zip(images) {
            let r = dorfman_raw(x, dz).sub(&delta.apply(&dorfman_raw(x, z)));
            if !r.is_zero() {
                return Some(Witness::new("X∘ΔZ = Δ(X∘Z)", vec![x.to_string(), z.to_string()], r));
            }
        }
    }
    None
}

/// Evaluates both conditions on generating pairs of degree `<= d`.
///
/// The first condition is quantified over vector fields `X` on the left and
/// all generators `Z`; the square condition is checked as
/// `Δ(Y∘Z + Z∘Y) = ΔY∘Z + ΔZ∘Y` over all generating pairs.
pub fn delta_conditions(delta: &GenEndomorphism, degree_bound: u32) -> DeltaConditions {
    let gens = generating_set(delta.n(), degree_bound);
    let images: Vec<PolySection> = gens.iter().map(|s| delta.apply(s)).collect();
    let mut witnesses = Vec::new();
    let left = left_multiplication_violation(delta, gens.iter().filter(|s| is_vector_field(s)), &gens, &images);
    let commutes = left.is_none();
    witnesses.extend(left);
    let mut square = true;
    'pairs: for (i, y) in gens.iter().enumerate() {
        for (j, z) in gens.iter().enumerate().skip(i) {
            let lhs = delta.apply(&dorfman_raw(y, z).add(&dorfman_raw(z, y)));
            let rhs = dorfman_raw(&images[i], z).add(&dorfman_raw(&images[j], y));
            let r = lhs.sub(&rhs);
            if !r.is_zero() {
                square = false;
                witnesses.push(Witness::new("Δ(Y∘Z + Z∘Y) = ΔY∘Z + ΔZ∘Y", vec![y.to_string(), z.to_string()], r));
                break 'pairs;
            }
        }
    }
    DeltaConditions { commutes_with_left_multiplication: commutes, square_condition: square, witnesses }
}

/// `X∘ΔZ = Δ(X∘Z)` for 1-forms `X` on the left. Since `ξ∘Z = −i_Z dξ`, this
/// alone already forces `Δ(∂_j) = λ∂_j`, `Δ(dx^j) = λ′dx^j` to have `λ = λ′`.
pub fn form_left_multiplication_violation(delta: &GenEndomorphism, degree_bound: u32) -> Option<Witness> {
    let gens = generating_set(delta.n(), degree_bound);
    let images: Vec<PolySection> = gens.iter().map(|s| delta.apply(s)).collect();
    left_multiplication_violation(delta, gens.iter().filter(|s| !is_vector_field(s)), &gens, &images)
}

/// Anchor rule of the contracted product,
/// `X ∘_N (fY) = f (X ∘_N Y) + ρ(NX)(f) Y`.
pub fn contracted_anchor_violation(tensor: &GenEndomorphism, degree_bound: u32) -> Option<Witness> {
    let n = tensor.n();
    let gens = generating_set(n, degree_bound);
    let fns = test_functions(n, degree_bound);
    for x in &gens {
        let nx = tensor.apply(x);
        for y in &gens {
            let base = contracted_dorfman(tensor, x, y);
            for f in &fns {
                let lhs = contracted_dorfman(tensor, x, &y.times(f));
                let rhs = base.times(f).add(&y.times(&anchor(&nx, f).unwrap()));
                if lhs != rhs {
                    return Some(Witness::new(
                        "X∘_N(fY) = f X∘_N Y + ρ(NX)(f) Y",
                        vec![x.to_string(), format!("f = {f}"), y.to_string()],
                        lhs.sub(&rhs),
                    ));
                }
            }
        }
    }
    None
}

/// Courant axioms for `(∘_N, ρ∘N)` on the generating set.
pub fn contracted_axiom_violations(tensor: &GenEndomorphism, degree_bound: u32) -> Vec<Witness> {
    let n = tensor.n();
    let gens = generating_set(n, degree_bound);
    let fns = test_functions(n, degree_bound);
    courant_axiom_violations(
        &gens,
        &fns,
        &|a, b| contracted_dorfman(tensor, a, b),
        &|x, f| anchor(&tensor.apply(x), f).unwrap(),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CourantKind {
    Complex,
    Product,
    Tangent,
    ScaledComplex,
    ScaledProduct,
    None,
}

impl fmt::Display for CourantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CourantKind::Complex => "complex",
            CourantKind::Product => "product",
            CourantKind::Tangent => "tangent",
            CourantKind::ScaledComplex => "scaled-complex",
            CourantKind::ScaledProduct => "scaled-product",
            CourantKind::None => "none",
        })
    }
}

impl CourantKind {
    /// Sign class of `(N − λ/2)²`: `-1`, `0` or `1`; `None` for `none`.
    pub fn sign_class(self) -> Option<i8> {
        match self {
            CourantKind::Complex | CourantKind::ScaledComplex => Some(-1),
            CourantKind::Tangent => Some(0),
            CourantKind::Product | CourantKind::ScaledProduct => Some(1),
            CourantKind::None => None,
        }
    }
}

fn opt_rational<S: Serializer>(v: &Option<Q>, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.clone().map(WireRational).serialize(s)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassificationResult {
    /// `λ` with `N + N* = λI`.
    #[serde(serialize_with = "opt_rational")]
    pub lambda: Option<Q>,
    /// `γ` with `N² − λN + γI = 0`.
    #[serde(serialize_with = "opt_rational")]
    pub gamma: Option<Q>,
    /// `c` with `(N − λ/2·I)² = c·I`.
    #[serde(serialize_with = "opt_rational")]
    pub shifted_square: Option<Q>,
    pub kind: CourantKind,
    pub witnesses: Vec<Witness>,
}

/// Classifies `N` as a Courant-Nijenhuis tensor on `TR^n ⊕ T*R^n`:
/// solve `N + N* = λI`, shift to `M = N − λ/2·I`, require `Tor_M = 0` on the
/// generating set and `M² = cI`; then `c = −1, c < 0, 0, c > 0, 1` give
/// complex, scaled-complex, tangent, scaled-product, product.
pub fn classify_courant_tensor(tensor: &GenEndomorphism, degree_bound: u32) -> ClassificationResult {
    let n = tensor.n();
    let mut result = ClassificationResult {
        lambda: None,
        gamma: None,
        shifted_square: None,
        kind: CourantKind::None,
        witnesses: Vec::new(),
    };
    let sum = tensor.add(&tensor.adjoint());
    let Some(lambda) = sum.as_scalar() else {
        result.witnesses.push(Witness::new("N + N* = λI", vec![tensor.to_string()], sum));
        return result;
    };
    result.lambda = Some(lambda.clone());
    let half = &lambda * q(1, 2);
    let shifted = tensor.sub(&GenEndomorphism::scalar(n, half.clone()));
    if let Some(w) = torsion_violation(&shifted, degree_bound) {
        result.witnesses.push(w);
        return result;
    }
    let square = shifted.compose(&shifted);
    let Some(c) = square.as_scalar() else {
        result.witnesses.push(Witness::new("(N − λ/2 I)² = cI", vec![tensor.to_string()], square));
        return result;
    };
    result.gamma = Some(&half * &half - &c);
    result.kind = if c.is_zero() {
        CourantKind::Tangent
    } else if c == -Q::one() {
        CourantKind::Complex
    } else if c.is_one() {
        CourantKind::Product
    } else if c.is_negative() {
        CourantKind::ScaledComplex
    } else {
        CourantKind::ScaledProduct
    };
    result.shifted_square = Some(c);
    result
}

/// For an orthogonal, torsion-free `N`: `X∘N²Y = N²(X∘Y)` and
/// `N²(Y∘Y) = N²Y∘Y` (polarized) on the generating set.
pub fn theorem4_check(tensor: &GenEndomorphism, degree_bound: u32) -> Result<bool> {
    if !tensor.add(&tensor.adjoint()).is_zero() {
        return Err(Error::Precondition("N is not orthogonal (N + N* ≠ 0)".into()));
    }
    if let Some(w) = torsion_violation(tensor, degree_bound) {
        return Err(Error::Precondition(format!("N has nonzero torsion: {w}")));
    }
    let sq = tensor.compose(tensor);
    Ok(delta_conditions(&sq, degree_bound).as_pair() == (true, true))
}

/// Counts of instances checked for each coordinate identity, with the
/// failures found.
#[derive(Clone, Debug, Default)]
pub struct ProofIdentityReport {
    pub instances: BTreeMap<&'static str, usize>,
    pub witnesses: Vec<Witness>,
}

impl ProofIdentityReport {
    pub fn holds(&self) -> bool {
        self.witnesses.is_empty()
    }
}

/// `(x^k∂_j)∘∂_k = −∂_j` and `(x^j∂_k)∘dx^k = dx^j` for all `j, k`, and
/// `(X+ξ)∘(X+ξ) = d i_X ξ` for generating vector fields `X` and 1-forms `ξ`.
pub fn proof_identities(n: usize, degree_bound: u32) -> ProofIdentityReport {
    let mut report = ProofIdentityReport::default();
    let mut record = |name: &'static str, inputs: Vec<String>, residual: PolySection| {
        *report.instances.entry(name).or_default() += 1;
        if !residual.is_zero() {
            report.witnesses.push(Witness::new(name, inputs, residual));
        }
    };
    for j in 0..n {
        for k in 0..n {
            let xk_dj = PolySection::partial(n, j).times(&Poly::var(n, k));
            let lhs = dorfman_raw(&xk_dj, &PolySection::partial(n, k));
            record("(x^k∂_j)∘∂_k = −∂_j", vec![xk_dj.to_string(), format!("∂{}", k + 1)], lhs.add(&PolySection::partial(n, j)));
            let xj_dk = PolySection::partial(n, k).times(&Poly::var(n, j));
            let lhs = dorfman_raw(&xj_dk, &PolySection::dx(n, k));
            record("(x^j∂_k)∘dx^k = dx^j", vec![xj_dk.to_string(), format!("dx{}", k + 1)], lhs.sub(&PolySection::dx(n, j)));
        }
    }
    let gens = generating_set(n, degree_bound);
    let vectors: Vec<&PolySection> = gens.iter().filter(|s| s.form().iter().all(Poly::is_zero)).collect();
    let forms: Vec<&PolySection> = gens.iter().filter(|s| s.vector().iter().all(Poly::is_zero)).collect();
    for x in &vectors {
        for xi in &forms {
            let s = x.add(xi);
            let contraction = pairing_raw(x, xi);
            let residual = dorfman_raw(&s, &s).sub(&exact_form(&contraction));
            record("(X+ξ)∘(X+ξ) = d i_X ξ", vec![s.to_string()], residual);
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::rational::qi;

    fn n_omega() -> GenEndomorphism {
        let omega = Matrix::from_rows(vec![vec![qi(0), qi(1)], vec![qi(-1), qi(0)]]).unwrap();
        GenEndomorphism::from_symplectic(&omega).unwrap()
    }

    #[test]
    fn dorfman_is_a_courant_algebroid() {
        for n in 1..=2 {
            assert!(dorfman_axiom_violations(n, 2).is_empty(), "n = {n}");
            assert!(dorfman_jacobi_violation(n, 1).is_none(), "n = {n}");
        }
    }

    #[test]
    fn skew_part_breaks_invariance_of_a_wrong_pairing() {
        // Replace the product by its skew part: Leibniz rule no longer holds.
        let gens = generating_set(1, 1);
        let skew = |a: &PolySection, b: &PolySection| dorfman_raw(a, b).sub(&dorfman_raw(b, a)).scale(&q(1, 2));
        assert!(leibniz_violation(&gens, &skew).is_some());
    }

    #[test]
    fn delta_condition_examples() {
        let n = 2;
        assert_eq!(delta_conditions(&GenEndomorphism::scalar(n, q(3, 2)), 2).as_pair(), (true, true));
        let split = GenEndomorphism::diag_blocks(n, qi(1), qi(-1));
        let conditions = delta_conditions(&split, 2);
        assert_eq!(conditions.as_pair(), (true, false));
        assert_eq!(conditions.witnesses.len(), 1);
        // x1*dx2 on the left sees λ and λ′ separately
        assert!(form_left_multiplication_violation(&split, 1).is_some());
        assert!(form_left_multiplication_violation(&split, 0).is_none());
        assert!(form_left_multiplication_violation(&GenEndomorphism::scalar(n, qi(2)), 2).is_none());
        // π = ∂₁∧∂₂ alone fails to commute with left multiplication
        let mut pi = GenEndomorphism::zero(n);
        pi.set(0, 3, Poly::one(n));
        pi.set(1, 2, -Poly::one(n));
        assert!(!delta_conditions(&pi, 2).commutes_with_left_multiplication);
    }

    #[test]
    fn torsion_examples() {
        let n = 2;
        let gens = generating_set(n, 2);
        for tensor in [GenEndomorphism::identity(n), GenEndomorphism::diag_blocks(n, qi(1), qi(-1)), n_omega()] {
            for a in &gens {
                for b in &gens {
                    assert!(torsion_courant(&tensor, a, b).unwrap().is_zero(), "{tensor} on {a}, {b}");
                }
            }
        }
        // ∘_N = ∘ for diag(I, −I)
        let p = GenEndomorphism::diag_blocks(n, qi(1), qi(-1));
        for a in &gens {
            for b in &gens {
                assert_eq!(contracted_dorfman(&p, a, b), dorfman_raw(a, b));
            }
        }
    }

    #[test]
    fn classification_examples() {
        let n = 2;
        let c = classify_courant_tensor(&n_omega(), 2);
        assert_eq!(c.kind, CourantKind::Complex);
        assert_eq!(c.lambda, Some(qi(0)));
        assert_eq!(c.gamma, Some(qi(1)));
        let p = classify_courant_tensor(&GenEndomorphism::diag_blocks(n, qi(1), qi(-1)), 2);
        assert_eq!(p.kind, CourantKind::Product);
        assert_eq!(p.gamma, Some(qi(-1)));
        let t = classify_courant_tensor(&GenEndomorphism::zero(n), 2);
        assert_eq!(t.kind, CourantKind::Tangent);
        // 3N_ω + 2I: λ = 4, (N − 2I)² = −9I
        let s = classify_courant_tensor(&n_omega().scale(&qi(3)).add(&GenEndomorphism::scalar(n, qi(2))), 2);
        assert_eq!(s.kind, CourantKind::ScaledComplex);
        assert_eq!(s.lambda, Some(qi(4)));
        assert_eq!(s.shifted_square, Some(qi(-9)));
        assert_eq!(s.gamma, Some(qi(13)));
        // diag(I, 0) + N_ω is paired with λ = 1; a symmetric β is not paired
        let shifted = classify_courant_tensor(&GenEndomorphism::diag_blocks(n, qi(1), qi(0)).add(&n_omega()), 2);
        assert_eq!(shifted.lambda, Some(qi(1)));
        let mut sym = GenEndomorphism::zero(n);
        sym.set(2, 0, Poly::one(n));
        sym.set(3, 1, Poly::one(n));
        let bad = classify_courant_tensor(&sym, 2);
        assert_eq!(bad.kind, CourantKind::None);
        assert_eq!(bad.witnesses.len(), 1);
    }

    #[test]
    fn theorem4_examples() {
        let n = 2;
        assert!(theorem4_check(&n_omega(), 2).unwrap());
        assert!(theorem4_check(&GenEndomorphism::diag_blocks(n, qi(1), qi(-1)), 2).unwrap());
        assert!(theorem4_check(&GenEndomorphism::zero(n), 2).unwrap());
        assert!(matches!(theorem4_check(&GenEndomorphism::identity(n), 2), Err(Error::Precondition(_))));
    }

    #[test]
    fn coordinate_identities() {
        let report = proof_identities(3, 1);
        assert!(report.holds(), "{:?}", report.witnesses);
        assert_eq!(report.instances["(x^k∂_j)∘∂_k = −∂_j"], 9);
        assert_eq!(report.instances["(X+ξ)∘(X+ξ) = d i_X ξ"], 144);
    }

    #[test]
    fn contracted_anchor_rule() {
        let mut b = GenEndomorphism::zero(2);
        b.set(0, 1, Poly::var(2, 0));
        b.set(3, 2, Poly::var(2, 1));
        assert!(contracted_anchor_violation(&b, 1).is_none());
        assert!(contracted_anchor_violation(&n_omega(), 2).is_none());
    }
}
