//! Seeded generation of small random instances.
//!
//! Rationals are drawn with numerators in `-5..=5` and denominators in
//! `1..=5`; every sampler is driven by a `ChaCha8Rng` so a seed fully
//! determines the instance.

use crate::leibniz::{LeibnizAlgebra, StructureConstants};
use crate::linalg::Matrix;
use crate::poly::{monomials_up_to, Poly};
use crate::rational::Q;
use crate::superalgebra::{GradedContext, MonomialKey, SuperPolynomial};
use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

pub const MAX_ENTRY: i64 = 5;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    pub fn index(&mut self, bound: usize) -> usize {
        self.rng.gen_range(0..bound)
    }

    pub fn rational(&mut self) -> Q {
        let num = self.rng.gen_range(-MAX_ENTRY..=MAX_ENTRY);
        let den = self.rng.gen_range(1..=MAX_ENTRY);
        Q::new(BigInt::from(num), BigInt::from(den))
    }

    pub fn nonzero_rational(&mut self) -> Q {
        loop {
            let r = self.rational();
            if !r.is_zero() {
                return r;
            }
        }
    }

    /// Entry that is zero with probability `1 - density`.
    pub fn sparse_rational(&mut self, density: f64) -> Q {
        if self.chance(density) {
            self.nonzero_rational()
        } else {
            Q::zero()
        }
    }

    pub fn matrix(&mut self, rows: usize, cols: usize, density: f64) -> Matrix {
        Matrix::from_fn(rows, cols, |_, _| self.sparse_rational(density))
    }

    pub fn invertible_matrix(&mut self, n: usize) -> Matrix {
        loop {
            let m = self.matrix(n, n, 0.7);
            if m.inverse().is_ok() {
                return m;
            }
        }
    }

    /// Random `N` with `NᵀG + GN = 0`, built as `G⁻¹K` with `K` skew.
    pub fn orthogonal_tensor(&mut self, g: &Matrix, density: f64) -> Matrix {
        let m = g.rows();
        let mut k = Matrix::zeros(m, m);
        for i in 0..m {
            for j in (i + 1)..m {
                let v = self.sparse_rational(density);
                k[(i, j)] = v.clone();
                k[(j, i)] = -v;
            }
        }
        g.inverse().expect("metric is invertible").mul(&k)
    }

    pub fn poly(&mut self, nvars: usize, max_degree: u32, density: f64) -> Poly {
        let mut p = Poly::zero(nvars);
        for e in monomials_up_to(nvars, max_degree) {
            let c = self.sparse_rational(density);
            p += &Poly::monomial(nvars, e, c);
        }
        p
    }

    /// Random homogeneous element of the given degree with at most
    /// `max_terms` terms and base exponents `<= 2`.
    pub fn homogeneous(&mut self, ctx: &Arc<GradedContext>, degree: u32, max_terms: usize) -> SuperPolynomial {
        let (n, m) = (ctx.n(), ctx.m());
        let mut f = SuperPolynomial::zero(ctx);
        let terms = self.rng.gen_range(1..=max_terms.max(1));
        for _ in 0..terms {
            // split the degree between momenta (weight 2) and odd factors
            let max_p = if n == 0 { 0 } else { degree / 2 };
            let min_p = (degree as usize).saturating_sub(m).div_ceil(2) as u32;
            if min_p > max_p {
                continue;
            }
            let p_total = self.rng.gen_range(min_p..=max_p);
            let odd_count = (degree - 2 * p_total) as usize;
            let mut p = vec![0u32; n];
            for _ in 0..p_total {
                p[self.rng.gen_range(0..n)] += 1;
            }
            let mut odd = 0u64;
            while (odd.count_ones() as usize) < odd_count {
                odd |= 1u64 << self.rng.gen_range(0..m);
            }
            let x = (0..n).map(|_| self.rng.gen_range(0..=2)).collect();
            let c = self.nonzero_rational();
            let mut term = SuperPolynomial::zero(ctx);
            term.add_term(MonomialKey { x, p, odd }, c);
            f = &f + &term;
        }
        f
    }
}

/// A Leibniz algebra isomorphic to `base`, written in the random basis
/// given by the columns of an invertible `P`: `c' = P⁻¹ ∘ (P·, P·)`.
pub fn change_basis(base: &StructureConstants, p: &Matrix) -> StructureConstants {
    let dim = base.dim();
    let p_inv = p.inverse().expect("change of basis must be invertible");
    let mut out = StructureConstants::zero(dim);
    for a in 0..dim {
        for b in 0..dim {
            let pa = p.column(a);
            let pb = p.column(b);
            let prod = base.product(&pa, &pb);
            let coords = p_inv.apply(&prod);
            for (d, v) in coords.into_iter().enumerate() {
                out.set(a, b, d, v);
            }
        }
    }
    out
}

/// Two Leibniz algebras in random bases: `sl(2)` (dim 3) and the
/// hemisemidirect product of the 2-dimensional non-abelian Lie algebra with
/// its adjoint module (dim 4, not skew-symmetric).
pub fn random_leibniz_catalog(sampler: &mut Sampler) -> Vec<(String, LeibnizAlgebra)> {
    let sl2 = change_basis(&sl2(), &sampler.invertible_matrix(3));
    let hemi = change_basis(&hemisemidirect_aff(), &sampler.invertible_matrix(4));
    vec![
        ("random-sl2".to_string(), LeibnizAlgebra::new(sl2)),
        ("random-hemisemidirect".to_string(), LeibnizAlgebra::new(hemi)),
    ]
}

/// `[h, e] = 2e, [h, f] = -2f, [e, f] = h` in the basis `(h, e, f)`.
pub fn sl2() -> StructureConstants {
    let mut c = StructureConstants::zero(3);
    let two = Q::from_integer(2.into());
    c.set(0, 1, 1, two.clone());
    c.set(1, 0, 1, -two.clone());
    c.set(0, 2, 2, -two.clone());
    c.set(2, 0, 2, two);
    c.set(1, 2, 0, Q::from_integer(1.into()));
    c.set(2, 1, 0, Q::from_integer((-1).into()));
    c
}

/// `g = span(u, v)` with `[u, v] = v`, `V = g` as adjoint module, on
/// `g ⊕ V`: `(x + a) ∘ (y + b) = [x, y] + x·b`.
pub fn hemisemidirect_aff() -> StructureConstants {
    let mut c = StructureConstants::zero(4);
    let one = Q::from_integer(1.into());
    // basis 0 = u, 1 = v, 2 = u', 3 = v'
    c.set(0, 1, 1, one.clone());
    c.set(1, 0, 1, -one.clone());
    c.set(0, 3, 3, one.clone());
    c.set(1, 2, 3, -one);
    c
}
