//! Courant structures as cubic Hamiltonians on a graded symplectic chart.
//!
//! Sections of a bundle with pairing `g` are identified with degree-1
//! functions through `e_a ↦ θ_a = Σ_b g_ab θ^b`, so that
//! `{θ_a, θ_b} = g_ab`. A cubic `Ψ` then induces the product
//! `X∘Y = {{X,Ψ},Y}` and anchor `ρ(X)f = {{X,Ψ},f}`.

use crate::courant::{PolySection, Witness};
use crate::error::{Error, Result};
use crate::leibniz::StructureConstants;
use crate::linalg::Matrix;
use crate::poly::{monomials_up_to, Poly, WirePoly};
use crate::rational::{q, WireRational, Q};
use crate::superalgebra::{GradedContext, MonomialKey, SuperPolynomial};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// Anchor components `ρ^i_a(x)` and the totally antisymmetric
/// `φ_abc(x) = ⟨e_a∘e_b, e_c⟩`, stored on `a < b < c`.
#[derive(Clone, Debug)]
pub struct CubicHamiltonianData {
    ctx: Arc<GradedContext>,
    rho: Vec<Vec<Poly>>,
    phi: BTreeMap<[usize; 3], Poly>,
}

/// Sorts `idx` in place and returns the permutation sign, or `None` on a
/// repeated index.
fn sort_with_sign(idx: &mut [usize; 3]) -> Option<bool> {
    let mut negative = false;
    for i in 0..3 {
        for j in 0..2 - i {
            if idx[j] > idx[j + 1] {
                idx.swap(j, j + 1);
                negative = !negative;
            }
        }
    }
    (idx[0] < idx[1] && idx[1] < idx[2]).then_some(negative)
}

impl CubicHamiltonianData {
    /// `rho` is `m × n`; `phi` entries may use any index order and are
    /// folded onto `a < b < c` with the permutation sign.
    pub fn new(ctx: &Arc<GradedContext>, rho: Vec<Vec<Poly>>, phi: Vec<([usize; 3], Poly)>) -> Result<Self> {
        let (n, m) = (ctx.n(), ctx.m());
        if rho.len() != m {
            return Err(Error::DimensionMismatch { expected: m, found: rho.len() });
        }
        for row in &rho {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.len() });
            }
            if let Some(p) = row.iter().find(|p| p.nvars() != n) {
                return Err(Error::DimensionMismatch { expected: n, found: p.nvars() });
            }
        }
        let mut folded: BTreeMap<[usize; 3], Poly> = BTreeMap::new();
        for (mut idx, p) in phi {
            if idx.iter().any(|&a| a >= m) {
                return Err(Error::Invalid(format!("phi index {idx:?} out of range for m = {m}")));
            }
            if p.nvars() != n {
                return Err(Error::DimensionMismatch { expected: n, found: p.nvars() });
            }
            let Some(negative) = sort_with_sign(&mut idx) else {
                if p.is_zero() {
                    continue;
                }
                return Err(Error::Invalid(format!("phi has a repeated index in {idx:?}")));
            };
            let p = if negative { -p } else { p };
            let entry = folded.entry(idx).or_insert_with(|| Poly::zero(n));
            *entry = &*entry + &p;
        }
        folded.retain(|_, p| !p.is_zero());
        Ok(CubicHamiltonianData { ctx: ctx.clone(), rho, phi: folded })
    }

    pub fn zero(ctx: &Arc<GradedContext>) -> Self {
        let (n, m) = (ctx.n(), ctx.m());
        CubicHamiltonianData { ctx: ctx.clone(), rho: vec![vec![Poly::zero(n); n]; m], phi: BTreeMap::new() }
    }

    /// The data of `TR^n ⊕ T*R^n` in the hyperbolic chart: `ρ` is the
    /// projection onto the vector part, `φ = 0`.
    pub fn canonical(n: usize) -> Self {
        let ctx = GradedContext::hyperbolic(n);
        let mut data = Self::zero(&ctx);
        for i in 0..n {
            data.rho[i][i] = Poly::one(n);
        }
        data
    }

    /// `φ` of a quadratic algebra with totally antisymmetric
    /// `⟨e_a∘e_b, e_c⟩` and constant coefficients.
    pub fn from_structure_constants(ctx: &Arc<GradedContext>, c: &StructureConstants) -> Result<Self> {
        let m = ctx.m();
        if c.dim() != m {
            return Err(Error::DimensionMismatch { expected: m, found: c.dim() });
        }
        let g = ctx.metric();
        let lowered = |a: usize, b: usize, d: usize| -> Q { (0..m).map(|e| c.get(a, b, e) * &g[(e, d)]).sum() };
        let mut phi = Vec::new();
        for a in 0..m {
            for b in 0..m {
                for d in 0..m {
                    let v = lowered(a, b, d);
                    let expect_zero = a == b || b == d || a == d;
                    let skew = lowered(b, a, d) == -v.clone() && lowered(a, d, b) == -v.clone();
                    if (expect_zero && !v.is_zero()) || !skew {
                        return Err(Error::Invalid(format!(
                            "<e{}∘e{}, e{}> = {} is not totally antisymmetric",
                            a + 1,
                            b + 1,
                            d + 1,
                            v
                        )));
                    }
                    if a < b && b < d && !v.is_zero() {
                        phi.push(([a, b, d], Poly::constant(ctx.n(), v)));
                    }
                }
            }
        }
        let n = ctx.n();
        Self::new(ctx, vec![vec![Poly::zero(n); n]; m], phi)
    }

    pub fn context(&self) -> &Arc<GradedContext> {
        &self.ctx
    }

    pub fn rho(&self) -> &[Vec<Poly>] {
        &self.rho
    }

    /// `φ_abc` for any index order.
    pub fn phi(&self, a: usize, b: usize, c: usize) -> Poly {
        let mut idx = [a, b, c];
        match sort_with_sign(&mut idx) {
            None => Poly::zero(self.ctx.n()),
            Some(negative) => {
                let p = self.phi.get(&idx).cloned().unwrap_or_else(|| Poly::zero(self.ctx.n()));
                if negative {
                    -p
                } else {
                    p
                }
            }
        }
    }

    pub fn phi_entries(&self) -> impl Iterator<Item = (&[usize; 3], &Poly)> {
        self.phi.iter()
    }
}

fn odd_bit(a: usize) -> u64 {
    1u64 << a
}

fn base_times(ctx: &Arc<GradedContext>, f: &Poly, p: Vec<u32>, odd: u64, sign: &Q) -> SuperPolynomial {
    let mut out = SuperPolynomial::zero(ctx);
    for (e, c) in f.terms() {
        out.add_term(MonomialKey { x: e.clone(), p: p.clone(), odd }, c * sign);
    }
    out
}

/// `Ψ = Σ θ^a ρ^i_a p_i − (1/6) Σ φ_abc θ^a θ^b θ^c`.
pub fn build_psi(data: &CubicHamiltonianData) -> SuperPolynomial {
    let ctx = &data.ctx;
    let n = ctx.n();
    let one = crate::rational::one();
    let mut psi = SuperPolynomial::zero(ctx);
    for (a, row) in data.rho.iter().enumerate() {
        for (i, r) in row.iter().enumerate() {
            if r.is_zero() {
                continue;
            }
            let mut p = vec![0; n];
            p[i] = 1;
            psi = &psi + &base_times(ctx, r, p, odd_bit(a), &one);
        }
    }
    // the six orderings of a < b < c all give φ_abc θ^aθ^bθ^c
    for (idx, f) in &data.phi {
        let bits = odd_bit(idx[0]) | odd_bit(idx[1]) | odd_bit(idx[2]);
        psi = &psi + &base_times(ctx, f, vec![0; n], bits, &-one.clone());
    }
    psi
}

/// Reads `ρ` and `φ` back off a cubic of the form produced by
/// [`build_psi`].
pub fn data_from_psi(psi: &SuperPolynomial) -> Result<CubicHamiltonianData> {
    require_degree(psi, 3)?;
    let ctx = psi.context().clone();
    let (n, m) = (ctx.n(), ctx.m());
    let mut rho = vec![vec![Poly::zero(n); n]; m];
    let mut phi = Vec::new();
    for (k, c) in psi.terms() {
        let odd = k.odd_factors();
        let momenta: u32 = k.p.iter().sum();
        let coefficient = Poly::monomial(n, k.x.clone(), c.clone());
        match (momenta, odd.as_slice()) {
            (1, &[a]) => {
                let i = k.p.iter().position(|&e| e == 1).expect("one momentum");
                rho[a][i] += &coefficient;
            }
            (0, &[a, b, d]) => phi.push(([a, b, d], -coefficient)),
            _ => return Err(Error::Invalid(format!("term with {momenta} momenta and {} odd factors", odd.len()))),
        }
    }
    CubicHamiltonianData::new(&ctx, rho, phi)
}

/// `Σ_i ξ^i p_i` on the hyperbolic chart of `TR^n ⊕ T*R^n`.
pub fn canonical_psi(n: usize) -> SuperPolynomial {
    build_psi(&CubicHamiltonianData::canonical(n))
}

fn require_degree(f: &SuperPolynomial, d: u32) -> Result<()> {
    if f.is_homogeneous_of(d) {
        Ok(())
    } else {
        Err(Error::DegreeMismatch { expected: d, found: describe_degree(f) })
    }
}

fn describe_degree(f: &SuperPolynomial) -> String {
    let degrees: Vec<String> = f.degree_components().keys().map(u32::to_string).collect();
    format!("components of degree {}", degrees.join(", "))
}

/// `{Ψ, Ψ} = 0`.
pub fn homological_check(psi: &SuperPolynomial) -> Result<bool> {
    require_degree(psi, 3)?;
    Ok(psi.poisson_bracket(psi)?.is_zero())
}

/// `{{X, Ψ}, Y}`.
pub fn derived_bracket(psi: &SuperPolynomial, x: &SuperPolynomial, y: &SuperPolynomial) -> Result<SuperPolynomial> {
    require_degree(psi, 3)?;
    require_degree(x, 1)?;
    require_degree(y, 1)?;
    x.poisson_bracket(psi)?.poisson_bracket(y)
}

/// `{{X, Ψ}, f}`.
pub fn derived_anchor(psi: &SuperPolynomial, x: &SuperPolynomial, f: &SuperPolynomial) -> Result<SuperPolynomial> {
    require_degree(psi, 3)?;
    require_degree(x, 1)?;
    require_degree(f, 0)?;
    x.poisson_bracket(psi)?.poisson_bracket(f)
}

fn raw_derived(psi: &SuperPolynomial, x: &SuperPolynomial, y: &SuperPolynomial) -> SuperPolynomial {
    crate::superalgebra::pb(&crate::superalgebra::pb(x, psi), y)
}

/// `Σ_a c_a θ_a` for coefficients `c_a(x)` in the basis `e_a`.
pub fn lift_coefficients(ctx: &Arc<GradedContext>, coeffs: &[Poly]) -> Result<SuperPolynomial> {
    let m = ctx.m();
    if coeffs.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: coeffs.len() });
    }
    let g = ctx.metric();
    let n = ctx.n();
    let mut out = SuperPolynomial::zero(ctx);
    for (a, c) in coeffs.iter().enumerate() {
        if c.nvars() != n {
            return Err(Error::DimensionMismatch { expected: n, found: c.nvars() });
        }
        for b in 0..m {
            let gab = &g[(a, b)];
            if !gab.is_zero() && !c.is_zero() {
                out = &out + &base_times(ctx, c, vec![0; n], odd_bit(b), gab);
            }
        }
    }
    Ok(out)
}

/// Inverse of [`lift_coefficients`]: `None` unless `f` is linear in the
/// odd coordinates without momenta.
pub fn unlift_coefficients(f: &SuperPolynomial) -> Option<Vec<Poly>> {
    let upper = f.odd_linear_coefficients()?;
    let ctx = f.context();
    let g_inv = ctx.metric_inverse();
    let m = ctx.m();
    Some(
        (0..m)
            .map(|a| {
                let mut c = Poly::zero(ctx.n());
                for (b, fb) in upper.iter().enumerate() {
                    if !g_inv[(a, b)].is_zero() && !fb.is_zero() {
                        c += &fb.scale(&g_inv[(a, b)]);
                    }
                }
                c
            })
            .collect(),
    )
}

fn require_tangent_chart(ctx: &Arc<GradedContext>, n: usize) -> Result<()> {
    if ctx.n() != n || ctx.m() != 2 * n {
        return Err(Error::DimensionMismatch { expected: n, found: ctx.n() });
    }
    Ok(())
}

/// `X^i ∂_i + ξ_i dx^i ↦ X^i ψ_i + ξ_i ξ^i`.
pub fn lift_section(ctx: &Arc<GradedContext>, s: &PolySection) -> Result<SuperPolynomial> {
    require_tangent_chart(ctx, s.n())?;
    lift_coefficients(ctx, &s.components().cloned().collect::<Vec<_>>())
}

pub fn unlift_section(f: &SuperPolynomial) -> Option<PolySection> {
    let n = f.context().n();
    if f.context().m() != 2 * n {
        return None;
    }
    Some(PolySection::from_components(n, unlift_coefficients(f)?))
}

/// Basis lifts `θ^a` times base monomials of degree `<= degree_bound`.
pub fn generating_lifts(ctx: &Arc<GradedContext>, degree_bound: u32) -> Vec<SuperPolynomial> {
    let n = ctx.n();
    let one = crate::rational::one();
    let mut out = Vec::new();
    for e in monomials_up_to(n, degree_bound) {
        for a in 0..ctx.m() {
            out.push(base_times(ctx, &Poly::monomial(n, e.clone(), one.clone()), vec![0; n], odd_bit(a), &one));
        }
    }
    out
}

fn base_test_functions(ctx: &Arc<GradedContext>, degree_bound: u32) -> Vec<SuperPolynomial> {
    let n = ctx.n();
    monomials_up_to(n, degree_bound)
        .into_iter()
        .map(|e| SuperPolynomial::from_base(ctx, &Poly::monomial(n, e, crate::rational::one())))
        .collect()
}

/// The pairing and anchor axioms for the derived bracket of `Ψ`:
/// `ρ(X){Y,Z} = {X, Y∘Z + Z∘Y}`, `ρ(X){Y,Z} = {X∘Y,Z} + {Y,X∘Z}` and
/// `X∘(fY) = f X∘Y + ρ(X)(f) Y`, on generating lifts.
pub fn derived_axiom_violations(psi: &SuperPolynomial, degree_bound: u32) -> Result<Vec<Witness>> {
    require_degree(psi, 3)?;
    let ctx = psi.context();
    let gens = generating_lifts(ctx, degree_bound);
    let fns = base_test_functions(ctx, degree_bound);
    let g = gens.len();
    let lefts: Vec<SuperPolynomial> = gens.iter().map(|x| crate::superalgebra::pb(x, psi)).collect();
    let mut table = Vec::with_capacity(g * g);
    for l in &lefts {
        for y in &gens {
            table.push(crate::superalgebra::pb(l, y));
        }
    }
    let at = |i: usize, j: usize| &table[i * g + j];
    let mut out = Vec::new();
    let (mut sym_done, mut inv_done) = (false, false);
    'outer: for i in 0..g {
        for j in 0..g {
            for k in 0..g {
                let pairing = crate::superalgebra::pb(&gens[j], &gens[k]);
                let lhs = crate::superalgebra::pb(&lefts[i], &pairing);
                let inputs = || vec![gens[i].to_string(), gens[j].to_string(), gens[k].to_string()];
                if !sym_done {
                    let rhs = crate::superalgebra::pb(&gens[i], &(at(j, k) + at(k, j)));
                    if lhs != rhs {
                        out.push(Witness::new("ρ(X){Y,Z} = {X, Y∘Z + Z∘Y}", inputs(), &lhs - &rhs));
                        sym_done = true;
                    }
                }
                if !inv_done {
                    let rhs =
                        &crate::superalgebra::pb(at(i, j), &gens[k]) + &crate::superalgebra::pb(&gens[j], at(i, k));
                    if lhs != rhs {
                        out.push(Witness::new("ρ(X){Y,Z} = {X∘Y,Z} + {Y,X∘Z}", inputs(), &lhs - &rhs));
                        inv_done = true;
                    }
                }
                if sym_done && inv_done {
                    break 'outer;
                }
            }
        }
    }
    'anchor: for (i, x) in gens.iter().enumerate() {
        for (j, y) in gens.iter().enumerate() {
            for f in &fns {
                let lhs = crate::superalgebra::pb(&lefts[i], &(f * y));
                let rhs = &(f * at(i, j)) + &(&crate::superalgebra::pb(&lefts[i], f) * y);
                if lhs != rhs {
                    out.push(Witness::new(
                        "X∘(fY) = f X∘Y + ρ(X)(f) Y",
                        vec![x.to_string(), format!("f = {f}"), y.to_string()],
                        &lhs - &rhs,
                    ));
                    break 'anchor;
                }
            }
        }
    }
    Ok(out)
}

/// First generating triple violating `(X∘Y)∘Z = X∘(Y∘Z) − Y∘(X∘Z)` for
/// the derived bracket.
pub fn derived_jacobi_violation(psi: &SuperPolynomial, degree_bound: u32) -> Result<Option<Witness>> {
    require_degree(psi, 3)?;
    let gens = generating_lifts(psi.context(), degree_bound);
    let g = gens.len();
    let mut table = Vec::with_capacity(g * g);
    for x in &gens {
        for y in &gens {
            table.push(raw_derived(psi, x, y));
        }
    }
    for i in 0..g {
        for j in 0..g {
            for k in 0..g {
                let lhs = raw_derived(psi, &table[i * g + j], &gens[k]);
                let rhs = &raw_derived(psi, &gens[i], &table[j * g + k]) - &raw_derived(psi, &gens[j], &table[i * g + k]);
                if lhs != rhs {
                    return Ok(Some(Witness::new(
                        "(X∘Y)∘Z = X∘(Y∘Z) − Y∘(X∘Z)",
                        vec![gens[i].to_string(), gens[j].to_string(), gens[k].to_string()],
                        &lhs - &rhs,
                    )));
                }
            }
        }
    }
    Ok(None)
}

/// Structure constants of the derived bracket in the basis `e_a`; requires
/// constant products `e_a∘e_b`.
pub fn derived_structure_constants(psi: &SuperPolynomial) -> Result<StructureConstants> {
    require_degree(psi, 3)?;
    let ctx = psi.context().clone();
    let m = ctx.m();
    let n = ctx.n();
    let basis: Vec<SuperPolynomial> = (0..m)
        .map(|a| {
            let mut coeffs = vec![Poly::zero(n); m];
            coeffs[a] = Poly::one(n);
            lift_coefficients(&ctx, &coeffs).expect("shape matches")
        })
        .collect();
    let mut out = StructureConstants::zero(m);
    for a in 0..m {
        for b in 0..m {
            let prod = raw_derived(psi, &basis[a], &basis[b]);
            let coeffs = unlift_coefficients(&prod).ok_or(Error::NonConstantCoefficients)?;
            for (d, c) in coeffs.iter().enumerate() {
                let v = c.as_constant().ok_or(Error::NonConstantCoefficients)?;
                out.set(a, b, d, v);
            }
        }
    }
    Ok(out)
}

/// `{Ψ, {Ψ, F}} = 0`.
pub fn differential_check(psi: &SuperPolynomial, f: &SuperPolynomial) -> Result<bool> {
    require_degree(psi, 3)?;
    Ok(psi.poisson_bracket(&psi.poisson_bracket(f)?)?.is_zero())
}

/// A degree-2 element `½ Σ K_ca θ^c θ^a`, acting on degree-1 functions by
/// `X ↦ {Q, X}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticElement {
    value: SuperPolynomial,
}

impl QuadraticElement {
    /// Accepts degree-2 elements built from pairs of odd coordinates; base
    /// coefficients may depend on `x`.
    pub fn new(value: SuperPolynomial) -> Result<Self> {
        for (k, _) in value.terms() {
            if k.p.iter().any(|&e| e > 0) || k.odd.count_ones() != 2 {
                return Err(Error::DegreeMismatch {
                    expected: 2,
                    found: format!("a term outside θθ: {}", describe_degree(&value)),
                });
            }
        }
        Ok(QuadraticElement { value })
    }

    pub fn zero(ctx: &Arc<GradedContext>) -> Self {
        QuadraticElement { value: SuperPolynomial::zero(ctx) }
    }

    pub fn value(&self) -> &SuperPolynomial {
        &self.value
    }

    pub fn context(&self) -> &Arc<GradedContext> {
        self.value.context()
    }

    /// `{Q, X}`.
    pub fn act(&self, x: &SuperPolynomial) -> Result<SuperPolynomial> {
        self.value.poisson_bracket(x)
    }
}

impl fmt::Display for QuadraticElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.value.fmt(f)
    }
}

/// First `(a, c)` with `(NᵀG + GN)_ac ≠ 0`, for `N(e_a) = Σ_b N[b][a] e_b`.
pub fn orthogonality_violation(n: &Matrix, g: &Matrix) -> Option<(usize, usize, Q)> {
    let s = n.transpose().mul(g).add(&g.mul(n));
    for a in 0..s.rows() {
        for c in 0..s.cols() {
            if !s[(a, c)].is_zero() {
                return Some((a, c, s[(a, c)].clone()));
            }
        }
    }
    None
}

/// `Q = ½ Σ (GN)_ca θ^c θ^a`, so that `{Q, θ_a} = θ(N e_a)`.
pub fn n_to_quadratic(n: &Matrix, ctx: &Arc<GradedContext>) -> Result<QuadraticElement> {
    let m = ctx.m();
    if n.rows() != m || n.cols() != m {
        return Err(Error::DimensionMismatch { expected: m, found: n.rows().max(n.cols()) });
    }
    let g = ctx.metric();
    if let Some((a, c, value)) = orthogonality_violation(n, g) {
        return Err(Error::NotOrthogonal { a, c, value: value.to_string() });
    }
    let k = g.mul(n);
    let half = q(1, 2);
    let mut out = SuperPolynomial::zero(ctx);
    for c in 0..m {
        for a in 0..m {
            if k[(c, a)].is_zero() {
                continue;
            }
            let term = SuperPolynomial::monomial(ctx, &k[(c, a)] * &half, vec![0; ctx.n()], vec![0; ctx.n()], &[c, a])?;
            out = &out + &term;
        }
    }
    QuadraticElement::new(out)
}

/// The matrix of `X ↦ {Q, X}` in the basis `e_a`.
pub fn quadratic_to_n(quad: &QuadraticElement) -> Result<Matrix> {
    if !quad.value.has_constant_coefficients() {
        return Err(Error::NonConstantCoefficients);
    }
    let ctx = quad.context().clone();
    let (n, m) = (ctx.n(), ctx.m());
    let mut out = Matrix::zeros(m, m);
    for a in 0..m {
        let mut coeffs = vec![Poly::zero(n); m];
        coeffs[a] = Poly::one(n);
        let image = quad.act(&lift_coefficients(&ctx, &coeffs)?)?;
        let col = unlift_coefficients(&image).ok_or(Error::NonConstantCoefficients)?;
        for (b, c) in col.iter().enumerate() {
            out[(b, a)] = c.as_constant().ok_or(Error::NonConstantCoefficients)?;
        }
    }
    Ok(out)
}

/// `{Ψ, Q}`, whose derived bracket is the contracted product `∘_N`.
pub fn contracted_generator(psi: &SuperPolynomial, quad: &QuadraticElement) -> Result<SuperPolynomial> {
    require_degree(psi, 3)?;
    psi.poisson_bracket(&quad.value)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    Complex,
    Product,
    Tangent,
    Other,
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GeneratorKind::Complex => "complex",
            GeneratorKind::Product => "product",
            GeneratorKind::Tangent => "tangent",
            GeneratorKind::Other => "other",
        })
    }
}

/// `{{Ψ,Q},Q}`.
pub fn double_bracket(psi: &SuperPolynomial, quad: &QuadraticElement) -> Result<SuperPolynomial> {
    contracted_generator(psi, quad)?.poisson_bracket(&quad.value)
}

/// Compares `{{Ψ,Q},Q}` exactly with `−Ψ`, `Ψ` and `0`.
pub fn double_bracket_classify(psi: &SuperPolynomial, quad: &QuadraticElement) -> Result<GeneratorKind> {
    let dd = double_bracket(psi, quad)?;
    Ok(if dd.is_zero() {
        GeneratorKind::Tangent
    } else if dd == -psi {
        GeneratorKind::Complex
    } else if &dd == psi {
        GeneratorKind::Product
    } else {
        GeneratorKind::Other
    })
}

/// `{Ψ, {{Ψ,Q},Q}} = 0` for homological `Ψ`.
pub fn weak_nijenhuis_cocycle_check(psi: &SuperPolynomial, quad: &QuadraticElement) -> Result<bool> {
    if !homological_check(psi)? {
        return Err(Error::NotHomological);
    }
    let dd = double_bracket(psi, quad)?;
    Ok(psi.poisson_bracket(&dd)?.is_zero())
}

/// The three sides of `X(∘_N)_N Y = 2Tor_N(X,Y) + X∘_{N²}Y` for the derived
/// bracket of `Ψ` and `N = {Q, ·}`, each computed separately.
#[derive(Clone, Debug)]
pub struct TorsionIdentityTerms {
    pub twice_contracted: SuperPolynomial,
    pub torsion: SuperPolynomial,
    pub square_contracted: SuperPolynomial,
}

impl TorsionIdentityTerms {
    pub fn holds(&self) -> bool {
        let two = crate::rational::qi(2);
        self.twice_contracted == &self.torsion.scale(&two) + &self.square_contracted
    }
}

pub fn torsion_identity_terms(
    psi: &SuperPolynomial,
    quad: &QuadraticElement,
    x: &SuperPolynomial,
    y: &SuperPolynomial,
) -> Result<TorsionIdentityTerms> {
    require_degree(psi, 3)?;
    require_degree(x, 1)?;
    require_degree(y, 1)?;
    let prod = |a: &SuperPolynomial, b: &SuperPolynomial| raw_derived(psi, a, b);
    let n = |a: &SuperPolynomial| crate::superalgebra::pb(&quad.value, a);
    let n2 = |a: &SuperPolynomial| n(&n(a));
    let contracted = |a: &SuperPolynomial, b: &SuperPolynomial| &(&prod(&n(a), b) + &prod(a, &n(b))) - &n(&prod(a, b));
    let twice_contracted = &(&contracted(&n(x), y) + &contracted(x, &n(y))) - &n(&contracted(x, y));
    let torsion = &prod(&n(x), &n(y)) - &n(&contracted(x, y));
    let square_contracted = &(&prod(&n2(x), y) + &prod(x, &n2(y))) - &n2(&prod(x, y));
    Ok(TorsionIdentityTerms { twice_contracted, torsion, square_contracted })
}

/// `X(∘_N)_N Y = 2Tor_N(X,Y) + X∘_{N²}Y` for homological `Ψ`.
pub fn torsion_generator_identity(
    psi: &SuperPolynomial,
    quad: &QuadraticElement,
    x: &SuperPolynomial,
    y: &SuperPolynomial,
) -> Result<bool> {
    if !homological_check(psi)? {
        return Err(Error::NotHomological);
    }
    Ok(torsion_identity_terms(psi, quad, x, y)?.holds())
}

/// `{"abc": [a, b, c], "poly": ...}` with 1-based indices.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WirePhiEntry {
    pub abc: [usize; 3],
    pub poly: WirePoly,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireCubic {
    pub n: usize,
    pub m: usize,
    pub g: Vec<Vec<WireRational>>,
    #[serde(default)]
    pub rho: Option<Vec<Vec<WirePoly>>>,
    #[serde(default)]
    pub phi: Vec<WirePhiEntry>,
}

impl WireCubic {
    pub fn from_data(data: &CubicHamiltonianData) -> Self {
        let ctx = data.context();
        WireCubic {
            n: ctx.n(),
            m: ctx.m(),
            g: ctx.metric().to_wire(),
            rho: Some(data.rho.iter().map(|row| row.iter().map(WirePoly::from_poly).collect()).collect()),
            phi: data
                .phi
                .iter()
                .map(|(idx, p)| WirePhiEntry { abc: [idx[0] + 1, idx[1] + 1, idx[2] + 1], poly: WirePoly::from_poly(p) })
                .collect(),
        }
    }

    /// Errors carry a JSON-pointer-style path relative to the document.
    pub fn to_data(&self) -> std::result::Result<CubicHamiltonianData, (String, String)> {
        let g = Matrix::from_wire(&self.g).map_err(|e| ("/g".to_string(), e.to_string()))?;
        if g.rows() != self.m || g.cols() != self.m {
            return Err(("/g".into(), format!("expected {m}x{m}, found {}x{}", g.rows(), g.cols(), m = self.m)));
        }
        let ctx = if self.m == 2 * self.n && g == crate::superalgebra::hyperbolic_metric(self.n) {
            GradedContext::hyperbolic(self.n)
        } else {
            GradedContext::new(self.n, g).map_err(|e| ("/g".to_string(), e.to_string()))?
        };
        let rho = match &self.rho {
            None => vec![vec![Poly::zero(self.n); self.n]; self.m],
            Some(rows) => {
                if rows.len() != self.m {
                    return Err(("/rho".into(), format!("expected {} rows, found {}", self.m, rows.len())));
                }
                let mut out = Vec::new();
                for (a, row) in rows.iter().enumerate() {
                    if row.len() != self.n {
                        return Err((format!("/rho/{a}"), format!("expected {} entries, found {}", self.n, row.len())));
                    }
                    let mut converted = Vec::new();
                    for (i, p) in row.iter().enumerate() {
                        converted.push(p.to_poly(self.n).map_err(|e| (format!("/rho/{a}/{i}"), e))?);
                    }
                    out.push(converted);
                }
                out
            }
        };
        let mut phi = Vec::new();
        for (k, entry) in self.phi.iter().enumerate() {
            if entry.abc.iter().any(|&a| a == 0 || a > self.m) {
                return Err((format!("/phi/{k}/abc"), format!("indices must lie in 1..={}", self.m)));
            }
            let p = entry.poly.to_poly(self.n).map_err(|e| (format!("/phi/{k}/poly"), e))?;
            phi.push(([entry.abc[0] - 1, entry.abc[1] - 1, entry.abc[2] - 1], p));
        }
        CubicHamiltonianData::new(&ctx, rho, phi).map_err(|e| ("/phi".to_string(), e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::courant::{dorfman, generating_set, GenEndomorphism};
    use crate::leibniz::LeibnizAlgebra;
    use crate::rational::qi;

    fn cross_data() -> CubicHamiltonianData {
        let ctx = GradedContext::euclidean(0, 3);
        CubicHamiltonianData::new(&ctx, vec![vec![]; 3], vec![([0, 1, 2], Poly::one(0))]).unwrap()
    }

    #[test]
    fn psi_examples() {
        let psi = canonical_psi(2);
        assert_eq!(psi.to_string(), "xi2*p2 + xi1*p1");
        let cross = build_psi(&cross_data());
        assert_eq!(cross.to_string(), "-xi1*xi2*xi3");
        assert!(build_psi(&CubicHamiltonianData::zero(&GradedContext::euclidean(1, 2))).is_zero());
        // permuted input folds with its sign
        let ctx = GradedContext::euclidean(0, 3);
        let swapped = CubicHamiltonianData::new(&ctx, vec![vec![]; 3], vec![([1, 0, 2], Poly::one(0))]).unwrap();
        assert_eq!(build_psi(&swapped), -&cross);
    }

    #[test]
    fn psi_roundtrip() {
        let ctx = GradedContext::euclidean(2, 4);
        let x = |i| Poly::var(2, i);
        let rho = vec![vec![x(0), Poly::zero(2)], vec![Poly::zero(2), &x(0) * &x(1)], vec![Poly::zero(2); 2], vec![Poly::one(2), x(1)]];
        let data = CubicHamiltonianData::new(&ctx, rho, vec![([2, 0, 3], x(1)), ([0, 1, 2], Poly::constant(2, q(3, 2)))]).unwrap();
        let psi = build_psi(&data);
        let back = data_from_psi(&psi).unwrap();
        assert_eq!(back.rho(), data.rho());
        assert_eq!(back.phi(0, 2, 3), -x(1));
        assert_eq!(build_psi(&back), psi);
    }

    #[test]
    fn homological_examples() {
        for n in 1..=3 {
            assert!(homological_check(&canonical_psi(n)).unwrap());
        }
        assert!(homological_check(&build_psi(&cross_data())).unwrap());
        let ctx = GradedContext::euclidean(1, 2);
        assert!(matches!(
            homological_check(&SuperPolynomial::theta(&ctx, 0)),
            Err(Error::DegreeMismatch { expected: 3, .. })
        ));
    }

    #[test]
    fn derived_bracket_examples() {
        let n = 2;
        let ctx = GradedContext::hyperbolic(n);
        let psi = canonical_psi(n);
        let d1 = PolySection::partial(n, 0);
        let x1dx2 = PolySection::dx(n, 1).times(&Poly::var(n, 0));
        let got = derived_bracket(&psi, &lift_section(&ctx, &d1).unwrap(), &lift_section(&ctx, &x1dx2).unwrap()).unwrap();
        assert_eq!(got, lift_section(&ctx, &PolySection::dx(n, 1)).unwrap());
        let z = derived_bracket(
            &psi,
            &lift_section(&ctx, &PolySection::dx(n, 0)).unwrap(),
            &lift_section(&ctx, &PolySection::partial(n, 1)).unwrap(),
        )
        .unwrap();
        assert!(z.is_zero());
        let f = SuperPolynomial::from_base(&ctx, &(&Poly::var(n, 0) * &Poly::var(n, 1)));
        let a = derived_anchor(&psi, &lift_section(&ctx, &d1).unwrap(), &f).unwrap();
        assert_eq!(a.as_base().unwrap(), Poly::var(n, 1));
        let none = derived_anchor(&psi, &lift_section(&ctx, &PolySection::dx(n, 0)).unwrap(), &f).unwrap();
        assert!(none.is_zero());
    }

    #[test]
    fn dictionary_matches_dorfman_and_pairing() {
        for n in 1..=2 {
            let ctx = GradedContext::hyperbolic(n);
            let psi = canonical_psi(n);
            let gens = generating_set(n, 1);
            for a in &gens {
                let la = lift_section(&ctx, a).unwrap();
                assert_eq!(unlift_section(&la).unwrap(), *a);
                for b in &gens {
                    let lb = lift_section(&ctx, b).unwrap();
                    let expected = lift_section(&ctx, &dorfman(a, b).unwrap()).unwrap();
                    assert_eq!(derived_bracket(&psi, &la, &lb).unwrap(), expected, "{a} ∘ {b}");
                    let pairing = crate::courant::pairing(a, b).unwrap();
                    assert_eq!(la.poisson_bracket(&lb).unwrap().as_base().unwrap(), pairing);
                }
            }
        }
    }

    #[test]
    fn cross_product_roundtrip() {
        let data = cross_data();
        let psi = build_psi(&data);
        let c = derived_structure_constants(&psi).unwrap();
        let cross = LeibnizAlgebra::cross_product();
        assert_eq!(&c, cross.constants());
        let back = CubicHamiltonianData::from_structure_constants(data.context(), &c).unwrap();
        assert_eq!(build_psi(&back), psi);
    }

    fn n_omega_matrix() -> Matrix {
        GenEndomorphism::from_symplectic(&Matrix::from_rows(vec![vec![qi(0), qi(1)], vec![qi(-1), qi(0)]]).unwrap())
            .unwrap()
            .as_constant_matrix()
            .unwrap()
    }

    #[test]
    fn quadratic_roundtrip_and_action() {
        let ctx = GradedContext::hyperbolic(2);
        let split = GenEndomorphism::diag_blocks(2, qi(1), qi(-1)).as_constant_matrix().unwrap();
        for n in [split.clone(), n_omega_matrix(), Matrix::zeros(4, 4)] {
            let quad = n_to_quadratic(&n, &ctx).unwrap();
            assert_eq!(quad_to(&quad), n);
            for a in 0..4 {
                let s = PolySection::basis(2, a);
                let image = quad.act(&lift_section(&ctx, &s).unwrap()).unwrap();
                let expected = GenEndomorphism::from_constant(&n).unwrap().apply(&s);
                assert_eq!(unlift_section(&image).unwrap(), expected);
            }
        }
        // ψ_i ↦ ψ_i, ξ^i ↦ −ξ^i
        let quad = n_to_quadratic(&split, &ctx).unwrap();
        assert_eq!(quad.act(&SuperPolynomial::theta(&ctx, 2)).unwrap(), SuperPolynomial::theta(&ctx, 2));
        assert_eq!(quad.act(&SuperPolynomial::theta(&ctx, 0)).unwrap(), -&SuperPolynomial::theta(&ctx, 0));
        // not orthogonal
        let bad = GenEndomorphism::diag_blocks(2, qi(1), qi(0)).as_constant_matrix().unwrap();
        assert!(matches!(n_to_quadratic(&bad, &ctx), Err(Error::NotOrthogonal { .. })));
    }

    fn quad_to(q: &QuadraticElement) -> Matrix {
        quadratic_to_n(q).unwrap()
    }

    #[test]
    fn quadratic_xi1_xi2() {
        let ctx = GradedContext::euclidean(0, 2);
        let quad = QuadraticElement::new(SuperPolynomial::monomial(&ctx, qi(1), vec![], vec![], &[0, 1]).unwrap()).unwrap();
        let n = quadratic_to_n(&quad).unwrap();
        assert_eq!(n, Matrix::from_rows(vec![vec![qi(0), qi(1)], vec![qi(-1), qi(0)]]).unwrap());
        let ctx1 = GradedContext::euclidean(1, 2);
        let xq = SuperPolynomial::monomial(&ctx1, qi(1), vec![1], vec![0], &[0, 1]).unwrap();
        assert!(matches!(quadratic_to_n(&QuadraticElement::new(xq).unwrap()), Err(Error::NonConstantCoefficients)));
        assert!(QuadraticElement::new(SuperPolynomial::theta(&ctx, 0)).is_err());
    }

    #[test]
    fn generator_classification() {
        let ctx = GradedContext::hyperbolic(2);
        let psi = canonical_psi(2);
        let omega = n_to_quadratic(&n_omega_matrix(), &ctx).unwrap();
        let split = n_to_quadratic(&GenEndomorphism::diag_blocks(2, qi(1), qi(-1)).as_constant_matrix().unwrap(), &ctx)
            .unwrap();
        let zero = QuadraticElement::zero(&ctx);
        assert_eq!(double_bracket_classify(&psi, &omega).unwrap(), GeneratorKind::Complex);
        assert_eq!(double_bracket_classify(&psi, &split).unwrap(), GeneratorKind::Product);
        assert_eq!(double_bracket_classify(&psi, &zero).unwrap(), GeneratorKind::Tangent);
        for quad in [&omega, &split, &zero] {
            assert!(weak_nijenhuis_cocycle_check(&psi, quad).unwrap());
        }
        // ∘_N = ∘ for diag(I, −I)
        assert_eq!(contracted_generator(&psi, &split).unwrap(), psi);
        assert!(contracted_generator(&psi, &zero).unwrap().is_zero());
    }

    #[test]
    fn contracted_generator_reproduces_contracted_dorfman() {
        let n = 2;
        let ctx = GradedContext::hyperbolic(n);
        let psi = canonical_psi(n);
        let tensor = GenEndomorphism::from_symplectic(&Matrix::from_rows(vec![vec![qi(0), qi(2)], vec![qi(-2), qi(0)]]).unwrap())
            .unwrap()
            .add(&{
                let mut b = GenEndomorphism::zero(n);
                b.set(0, 3, Poly::one(n));
                b.set(1, 2, -Poly::one(n));
                b
            });
        let quad = n_to_quadratic(&tensor.as_constant_matrix().unwrap(), &ctx).unwrap();
        let psi_n = contracted_generator(&psi, &quad).unwrap();
        let gens = generating_set(n, 1);
        for a in &gens {
            for b in &gens {
                let expected = crate::courant::contracted_dorfman(&tensor, a, b);
                let got = derived_bracket(&psi_n, &lift_section(&ctx, a).unwrap(), &lift_section(&ctx, b).unwrap()).unwrap();
                assert_eq!(unlift_section(&got).unwrap(), expected, "{a} ∘_N {b}");
            }
        }
    }

    #[test]
    fn torsion_identity_examples() {
        let ctx = GradedContext::hyperbolic(2);
        let psi = canonical_psi(2);
        let omega = n_to_quadratic(&n_omega_matrix(), &ctx).unwrap();
        let zero = QuadraticElement::zero(&ctx);
        for x in generating_lifts(&ctx, 1) {
            for y in generating_lifts(&ctx, 1) {
                let terms = torsion_identity_terms(&psi, &omega, &x, &y).unwrap();
                assert!(terms.holds());
                assert!(terms.torsion.is_zero());
                assert!(torsion_generator_identity(&psi, &zero, &x, &y).unwrap());
            }
        }
    }

    #[test]
    fn wire_roundtrip() {
        let data = CubicHamiltonianData::canonical(2);
        let wire = WireCubic::from_data(&data);
        let json = serde_json::to_string(&wire).unwrap();
        let back: WireCubic = serde_json::from_str(&json).unwrap();
        assert_eq!(build_psi(&back.to_data().unwrap()), build_psi(&data));
        let bad = WireCubic { phi: vec![WirePhiEntry { abc: [1, 1, 2], poly: WirePoly::from_poly(&Poly::one(2)) }], ..wire };
        assert_eq!(bad.to_data().unwrap_err().0, "/phi");
    }
}
