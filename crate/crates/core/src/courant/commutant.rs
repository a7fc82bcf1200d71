//! Tensors commuting with the Dorfman product, as an exact linear system.
//!
//! Unknowns are the coefficients of every entry of a `2n × 2n` polynomial
//! matrix `Δ` on the monomials of degree `<= coeff_degree`. Each condition is
//! linear in `Δ`, so its residual on one unknown at a time gives one column
//! of the system; rows are indexed by (generating pair, component,
//! monomial).

use super::{dorfman_raw, generating_set, GenEndomorphism, PolySection};
use crate::linalg::{RowEchelon, SparseRow};
use crate::poly::{monomials_up_to, Exponents, Poly};
use crate::rational::Q;
use num_traits::Zero;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommutantStage {
    /// `X∘ΔZ = Δ(X∘Z)` for vector fields `X` and all generators `Z`.
    LeftMultiplication,
    /// The above plus `Δ(Y∘Z + Z∘Y) = ΔY∘Z + ΔZ∘Y` on all generating pairs.
    WithSquare,
    /// `X∘ΔZ = Δ(X∘Z)` with `X` ranging over every generator, forms included.
    AllLeftFactors,
}

impl fmt::Display for CommutantStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CommutantStage::LeftMultiplication => "left-multiplication",
            CommutantStage::WithSquare => "with-square",
            CommutantStage::AllLeftFactors => "all-left-factors",
        })
    }
}

#[derive(Clone, Debug)]
pub struct CommutantSolution {
    pub stage: CommutantStage,
    pub unknowns: usize,
    pub equations: usize,
    pub rank: usize,
    pub basis: Vec<GenEndomorphism>,
}

impl CommutantSolution {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

struct Unknown {
    row: usize,
    col: usize,
    monomial: Poly,
}

impl Unknown {
    fn apply(&self, s: &PolySection) -> PolySection {
        let n = s.n();
        let mut comps = vec![Poly::zero(n); 2 * n];
        let src: Vec<&Poly> = s.components().collect();
        comps[self.row] = src[self.col] * &self.monomial;
        PolySection::from_components(n, comps)
    }
}

type RowKey = (usize, usize, Exponents);

#[derive(Default)]
struct System {
    rows: BTreeMap<RowKey, SparseRow>,
    next_group: usize,
}

impl System {
    fn record(&mut self, group: usize, unknown: usize, residual: &PolySection) {
        for (k, comp) in residual.components().enumerate() {
            for (e, c) in comp.terms() {
                if c.is_zero() {
                    continue;
                }
                self.rows.entry((group, k, e.clone())).or_default().insert(unknown, c.clone());
            }
        }
    }

    fn group(&mut self) -> usize {
        self.next_group += 1;
        self.next_group - 1
    }
}

/// Solves for all `Δ` with entries of degree `<= coeff_degree` satisfying
/// the stage's conditions on generators of degree `<= generating_degree`.
pub fn commutant_solve(n: usize, coeff_degree: u32, generating_degree: u32, stage: CommutantStage) -> CommutantSolution {
    let monomials = monomials_up_to(n, coeff_degree);
    let mut unknowns = Vec::new();
    for row in 0..2 * n {
        for col in 0..2 * n {
            for e in &monomials {
                unknowns.push(Unknown { row, col, monomial: Poly::monomial(n, e.clone(), crate::rational::one()) });
            }
        }
    }
    let gens = generating_set(n, generating_degree);
    let mut system = System::default();

    let left: Vec<&PolySection> = match stage {
        CommutantStage::AllLeftFactors => gens.iter().collect(),
        _ => gens.iter().filter(|s| s.form().iter().all(Poly::is_zero)).collect(),
    };
    for x in &left {
        for z in &gens {
            let group = system.group();
            let xz = dorfman_raw(x, z);
            for (u, unk) in unknowns.iter().enumerate() {
                let r = dorfman_raw(x, &unk.apply(z)).sub(&unk.apply(&xz));
                system.record(group, u, &r);
            }
        }
    }
    if stage == CommutantStage::WithSquare {
        for (i, y) in gens.iter().enumerate() {
            for z in &gens[i..] {
                let group = system.group();
                let sym = dorfman_raw(y, z).add(&dorfman_raw(z, y));
                for (u, unk) in unknowns.iter().enumerate() {
                    let r = unk.apply(&sym).sub(&dorfman_raw(&unk.apply(y), z)).sub(&dorfman_raw(&unk.apply(z), y));
                    system.record(group, u, &r);
                }
            }
        }
    }

    let mut echelon = RowEchelon::new(unknowns.len());
    let equations = system.rows.len();
    for (_, row) in system.rows {
        echelon.insert(row);
    }
    let basis = echelon
        .nullspace()
        .into_iter()
        .map(|v| {
            let mut delta = GenEndomorphism::zero(n);
            for (c, unk) in v.iter().zip(&unknowns) {
                if c.is_zero() {
                    continue;
                }
                let entry = delta.get(unk.row, unk.col) + &unk.monomial.scale(c);
                delta.set(unk.row, unk.col, entry);
            }
            delta
        })
        .collect();
    CommutantSolution { stage, unknowns: unknowns.len(), equations, rank: echelon.rank(), basis }
}

/// Whether `delta` lies in the span of `basis` (entries compared exactly).
pub fn in_span(basis: &[GenEndomorphism], delta: &GenEndomorphism) -> bool {
    let flatten = |d: &GenEndomorphism| -> BTreeMap<(usize, usize, Exponents), Q> {
        let m = 2 * d.n();
        let mut out = BTreeMap::new();
        for i in 0..m {
            for j in 0..m {
                for (e, c) in d.get(i, j).terms() {
                    out.insert((i, j, e.clone()), c.clone());
                }
            }
        }
        out
    };
    let mut keys = BTreeMap::new();
    let flat: Vec<_> = basis.iter().map(flatten).collect();
    let target = flatten(delta);
    for k in flat.iter().flat_map(|f| f.keys()).chain(target.keys()) {
        let next = keys.len();
        keys.entry(k.clone()).or_insert(next);
    }
    let to_row = |f: &BTreeMap<(usize, usize, Exponents), Q>| -> SparseRow {
        f.iter().map(|(k, v)| (keys[k], v.clone())).collect()
    };
    let mut echelon = RowEchelon::new(keys.len());
    for f in &flat {
        echelon.insert(to_row(f));
    }
    !echelon.insert(to_row(&target))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qi;

    #[test]
    fn one_dimensional_stages() {
        let s1 = commutant_solve(1, 1, 2, CommutantStage::LeftMultiplication);
        assert_eq!(s1.unknowns, 8);
        assert_eq!(s1.dimension(), 2);
        assert!(in_span(&s1.basis, &GenEndomorphism::diag_blocks(1, qi(1), qi(0))));
        assert!(in_span(&s1.basis, &GenEndomorphism::diag_blocks(1, qi(0), qi(1))));
        let s2 = commutant_solve(1, 1, 2, CommutantStage::WithSquare);
        assert_eq!(s2.dimension(), 1);
        assert!(in_span(&s2.basis, &GenEndomorphism::identity(1)));
        assert!(!in_span(&s2.basis, &GenEndomorphism::diag_blocks(1, qi(1), qi(0))));
        // n = 1 has no non-closed 1-forms
        assert_eq!(commutant_solve(1, 1, 2, CommutantStage::AllLeftFactors).dimension(), 2);
    }

    #[test]
    fn forms_on_the_left_already_force_a_scalar() {
        let s = commutant_solve(2, 1, 2, CommutantStage::AllLeftFactors);
        assert_eq!(s.dimension(), 1);
        assert!(in_span(&s.basis, &GenEndomorphism::identity(2)));
    }
}
