use gcx_core::courant::{
    classify_courant_tensor, contracted_axiom_violations, delta_conditions, generating_set, pairing, GenEndomorphism,
    PolySection,
};
use gcx_core::derived::{
    build_psi, canonical_psi, contracted_generator, derived_axiom_violations, derived_bracket, differential_check,
    homological_check, lift_section, n_to_quadratic, quadratic_to_n, unlift_section, CubicHamiltonianData,
    QuadraticElement,
};
use gcx_core::leibniz::{
    contract, torsion_of, twice_contracted_identity, StructureConstants, TensorEndo,
};
use gcx_core::linalg::{Matrix, RowEchelon};
use gcx_core::random::Sampler;
use gcx_core::rational::{qi, Q};
use gcx_core::superalgebra::{pb, GradedContext, SuperPolynomial};
use gcx_core::Poly;
use num_traits::Zero;
use proptest::prelude::*;
use std::sync::Arc;

fn sign(negative: bool) -> Q {
    if negative {
        qi(-1)
    } else {
        qi(1)
    }
}

/// A random symmetric invertible metric `PᵀDP` with `D = diag(±1)`.
fn random_metric(s: &mut Sampler, m: usize) -> Matrix {
    let p = s.invertible_matrix(m);
    let d = Matrix::from_fn(m, m, |i, j| if i != j { Q::zero() } else if s.chance(0.5) { qi(1) } else { qi(-1) });
    p.transpose().mul(&d).mul(&p)
}

fn random_context(s: &mut Sampler, max_n: usize, max_m: usize) -> Arc<GradedContext> {
    let n = s.index(max_n + 1);
    let m = s.index(max_m + 1);
    match s.index(3) {
        0 => GradedContext::euclidean(n, m),
        1 if m.is_multiple_of(2) => GradedContext::hyperbolic(m / 2),
        _ => GradedContext::new(n, random_metric(s, m)).unwrap(),
    }
}

fn random_element(s: &mut Sampler, ctx: &Arc<GradedContext>) -> (SuperPolynomial, u32) {
    loop {
        let d = s.index(5) as u32;
        let f = s.homogeneous(ctx, d, 3);
        if !f.is_zero() {
            return (f, d);
        }
    }
}

fn odd(d: u32) -> bool {
    d % 2 == 1
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn product_is_associative_and_supercommutative(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let ctx = random_context(&mut s, 2, 4);
        let (f, df) = random_element(&mut s, &ctx);
        let (g, dg) = random_element(&mut s, &ctx);
        let (h, _) = random_element(&mut s, &ctx);
        prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
        prop_assert_eq!(&f * &g, (&g * &f).scale(&sign(odd(df) && odd(dg))));
    }

    #[test]
    fn bracket_is_graded_skew_and_lowers_degree_by_two(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let ctx = random_context(&mut s, 2, 4);
        let (f, df) = random_element(&mut s, &ctx);
        let (g, dg) = random_element(&mut s, &ctx);
        let fg = pb(&f, &g);
        prop_assert_eq!(&fg, &pb(&g, &f).scale(&-sign(odd(df) && odd(dg))));
        if df + dg >= 2 {
            prop_assert!(fg.is_homogeneous_of(df + dg - 2));
        } else {
            prop_assert!(fg.is_zero());
        }
    }

    #[test]
    fn bracket_is_a_graded_derivation(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let ctx = random_context(&mut s, 2, 4);
        let (f, df) = random_element(&mut s, &ctx);
        let (g, dg) = random_element(&mut s, &ctx);
        let (h, _) = random_element(&mut s, &ctx);
        let lhs = pb(&f, &(&g * &h));
        let rhs = &(&pb(&f, &g) * &h) + &(&g * &pb(&f, &h)).scale(&sign(odd(df) && odd(dg)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bracket_satisfies_graded_jacobi(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let ctx = random_context(&mut s, 2, 4);
        let (f, df) = random_element(&mut s, &ctx);
        let (g, dg) = random_element(&mut s, &ctx);
        let (h, _) = random_element(&mut s, &ctx);
        let lhs = pb(&f, &pb(&g, &h));
        let rhs = &pb(&pb(&f, &g), &h) + &pb(&g, &pb(&f, &h)).scale(&sign(odd(df) && odd(dg)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn odd_coordinates_pair_through_the_inverse_metric(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let m = 1 + s.index(4);
        let g = random_metric(&mut s, m);
        let ctx = GradedContext::new(1, g.clone()).unwrap();
        let g_inv = g.inverse().unwrap();
        for a in 0..m {
            for b in 0..m {
                let bracket = pb(&SuperPolynomial::theta(&ctx, a), &SuperPolynomial::theta(&ctx, b));
                prop_assert_eq!(bracket, SuperPolynomial::constant(&ctx, g_inv[(a, b)].clone()));
            }
        }
    }

    #[test]
    fn nullspace_vectors_are_in_the_kernel(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let (rows, cols) = (1 + s.index(5), 1 + s.index(6));
        let m = s.matrix(rows, cols, 0.5);
        let mut e = RowEchelon::new(cols);
        for i in 0..rows {
            e.insert_dense(m.row(i));
        }
        let kernel = e.nullspace();
        prop_assert_eq!(kernel.len() + m.rank(), cols);
        for v in kernel {
            prop_assert!(m.apply(&v).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn torsion_is_shift_invariant_and_twice_contracted_identity_holds(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let dim = 2 + s.index(2);
        let c = StructureConstants::from_products(dim, |_, _| (0..dim).map(|_| s.sparse_rational(0.4)).collect());
        let n = TensorEndo::new(s.matrix(dim, dim, 0.6)).unwrap();
        let shift = s.rational();
        let shifted = TensorEndo::new(n.matrix().add(&Matrix::scalar(dim, shift))).unwrap();
        prop_assert_eq!(torsion_of(&c, &n), torsion_of(&c, &shifted));
        prop_assert!(twice_contracted_identity(&c, &n));
        prop_assert_eq!(contract(&c, &TensorEndo::identity(dim)), c);
    }
}

fn random_poly_endomorphism(s: &mut Sampler, n: usize) -> GenEndomorphism {
    let mut e = GenEndomorphism::zero(n);
    for i in 0..2 * n {
        for j in 0..2 * n {
            e.set(i, j, s.poly(n, 1, 0.3));
        }
    }
    e
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn adjoint_is_the_pairing_transpose(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let n = 1 + s.index(2);
        let a = random_poly_endomorphism(&mut s, n);
        let b = random_poly_endomorphism(&mut s, n);
        prop_assert_eq!(a.adjoint().adjoint(), a.clone());
        prop_assert_eq!(a.compose(&b).adjoint(), b.adjoint().compose(&a.adjoint()));
        let gens = generating_set(n, 1);
        for x in &gens {
            for y in &gens {
                prop_assert_eq!(pairing(&a.apply(x), y).unwrap(), pairing(x, &a.adjoint().apply(y)).unwrap());
            }
        }
    }

    #[test]
    fn classification_is_consistent_under_shift_and_scale(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let n = 2;
        let omega = Matrix::from_rows(vec![vec![qi(0), qi(1)], vec![qi(-1), qi(0)]]).unwrap();
        let base = match s.index(3) {
            0 => GenEndomorphism::from_symplectic(&omega).unwrap(),
            1 => GenEndomorphism::diag_blocks(n, qi(1), qi(-1)),
            _ => GenEndomorphism::zero(n),
        };
        let c = s.nonzero_rational();
        let r = s.rational();
        let moved = base.scale(&c).add(&GenEndomorphism::scalar(n, r.clone()));
        let before = classify_courant_tensor(&base, 1);
        let after = classify_courant_tensor(&moved, 1);
        prop_assert_eq!(before.kind.sign_class(), after.kind.sign_class());
        let lambda = before.lambda.clone().unwrap();
        prop_assert_eq!(after.lambda.unwrap(), &c * &lambda + &r * qi(2));
        prop_assert_eq!(after.shifted_square.unwrap(), &c * &c * before.shifted_square.unwrap());
    }

    #[test]
    fn paired_tensors_give_compatible_contracted_brackets(seed in any::<u64>()) {
        // N + N* = λI satisfies both Δ-conditions, so (∘_N, ρN) keeps the axioms
        let mut s = Sampler::new(seed);
        let n = 1 + s.index(2);
        let a = random_poly_endomorphism(&mut s, n);
        let lambda = s.rational();
        let half = &lambda * gcx_core::rational::q(1, 2);
        let paired = a.sub(&a.adjoint()).scale(&gcx_core::rational::q(1, 2)).add(&GenEndomorphism::scalar(n, half));
        let delta = paired.add(&paired.adjoint());
        prop_assert_eq!(delta.as_scalar(), Some(lambda));
        prop_assert_eq!(delta_conditions(&delta, 1).as_pair(), (true, true));
        prop_assert!(contracted_axiom_violations(&paired, 1).is_empty());
    }

    #[test]
    fn lifted_sections_pair_and_multiply_like_sections(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let n = 1 + s.index(2);
        let ctx = GradedContext::hyperbolic(n);
        let psi = canonical_psi(n);
        let random_section = |s: &mut Sampler| {
            PolySection::new((0..n).map(|_| s.poly(n, 2, 0.3)).collect(), (0..n).map(|_| s.poly(n, 2, 0.3)).collect()).unwrap()
        };
        let a = random_section(&mut s);
        let b = random_section(&mut s);
        let (la, lb) = (lift_section(&ctx, &a).unwrap(), lift_section(&ctx, &b).unwrap());
        prop_assert_eq!(unlift_section(&la).unwrap(), a.clone());
        prop_assert_eq!(pb(&la, &lb).as_base().unwrap(), pairing(&a, &b).unwrap());
        let expected = lift_section(&ctx, &gcx_core::courant::dorfman(&a, &b).unwrap()).unwrap();
        prop_assert_eq!(derived_bracket(&psi, &la, &lb).unwrap(), expected);
    }

    #[test]
    fn cubic_hamiltonians_are_always_compatible(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let (n, m) = (1, 3);
        let ctx = GradedContext::new(n, random_metric(&mut s, m)).unwrap();
        let data = random_cubic(&mut s, &ctx);
        let psi = build_psi(&data);
        prop_assert!(derived_axiom_violations(&psi, 1).unwrap().is_empty());
    }

    #[test]
    fn homological_cubics_square_to_zero(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let n = 1 + s.index(2);
        let psi = canonical_psi(n);
        let ctx = psi.context().clone();
        prop_assert!(homological_check(&psi).unwrap());
        let (f, _) = random_element(&mut s, &ctx);
        prop_assert!(differential_check(&psi, &f).unwrap());
    }

    #[test]
    fn quadratic_elements_generate_contracted_brackets(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let m = 3 + s.index(2);
        let g = random_metric(&mut s, m);
        let ctx = GradedContext::new(0, g.clone()).unwrap();
        let n = s.orthogonal_tensor(&g, 0.6);
        let quad = n_to_quadratic(&n, &ctx).unwrap();
        prop_assert_eq!(quadratic_to_n(&quad).unwrap(), n.clone());
        let data = random_cubic(&mut s, &ctx);
        let psi = build_psi(&data);
        let psi_n = contracted_generator(&psi, &quad).unwrap();
        let basis: Vec<SuperPolynomial> = (0..m).map(|a| SuperPolynomial::theta(&ctx, a)).collect();
        let act = |x: &SuperPolynomial| quad.act(x).unwrap();
        for x in &basis {
            for y in &basis {
                let prod = |a: &SuperPolynomial, b: &SuperPolynomial| derived_bracket(&psi, a, b).unwrap();
                let expected = &(&prod(&act(x), y) + &prod(x, &act(y))) - &act(&prod(x, y));
                prop_assert_eq!(derived_bracket(&psi_n, x, y).unwrap(), expected);
            }
        }
        let _ = QuadraticElement::zero(&ctx);
    }

    #[test]
    fn cocycle_torsion_makes_the_contracted_product_leibniz(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        for (_, algebra) in gcx_core::random::random_leibniz_catalog(&mut s) {
            let dim = algebra.dim();
            let n = TensorEndo::new(s.matrix(dim, dim, 0.4)).unwrap();
            let report = gcx_core::leibniz::classify_tensor(&algebra, &n).unwrap();
            if report.cocycle {
                prop_assert!(contract(algebra.constants(), &n).satisfies_jacobi());
            }
        }
    }
}

fn random_cubic(s: &mut Sampler, ctx: &Arc<GradedContext>) -> CubicHamiltonianData {
    let (n, m) = (ctx.n(), ctx.m());
    let rho = (0..m).map(|_| (0..n).map(|_| s.poly(n, 1, 0.4)).collect()).collect();
    let mut phi = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            for c in b + 1..m {
                phi.push(([a, b, c], s.poly(n, 1, 0.5)));
            }
        }
    }
    CubicHamiltonianData::new(ctx, rho, phi).unwrap()
}

#[test]
fn zero_poly_section_lifts_to_zero() {
    let ctx = GradedContext::hyperbolic(1);
    assert!(lift_section(&ctx, &PolySection::zero(1)).unwrap().is_zero());
    assert!(Poly::zero(1).is_zero());
}
