"""Smoke test for the gcx extension module.

Build and install with `pip install --no-build-isolation ./crates/py`,
then run `python python/smoke_test.py`.
"""

import json
from fractions import Fraction

import gcx


def main():
    ctx = gcx.GradedContext.hyperbolic(1)
    xi, psi1, x, p = ctx.theta(0), ctx.theta(1), ctx.x(0), ctx.p(0)
    assert p.bracket(x) == ctx.constant(1)
    assert xi.bracket(psi1) == ctx.constant(1)
    assert xi.bracket(xi).is_zero()
    assert (xi * psi1) == -(psi1 * xi)

    psi = gcx.canonical_psi(2)
    assert gcx.homological_check(psi)
    h = gcx.GradedContext.hyperbolic(2)
    # ∂_1 ∘ (x^1 dx^2) = dx^2
    d1 = h.theta(2)
    form = h.x(0) * h.theta(1)
    assert gcx.derived_bracket(psi, d1, form) == h.theta(1)

    cross = gcx.LeibnizAlgebra.cross_product()
    assert cross.jacobi_check()
    ident = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert cross.classify_tensor(ident)["classification"] == "nijenhuis"
    assert gcx.homological_check(cross.psi(ident))

    # N_ω for ω = dx^1 ∧ dx^2, in the basis ∂_1, ∂_2, dx^1, dx^2
    n_omega = [[0, 0, 0, 1], [0, 0, -1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]]
    result = gcx.classify_courant_tensor(n_omega)
    assert result["kind"] == "complex", result
    assert result["lambda"] == Fraction(0)
    assert gcx.classify_courant_tensor([[Fraction(1, 2), 0], [0, "1/2"]])["kind"] == "tangent"

    assert gcx.commutant_dimension(1, 1, "left-multiplication") == 2
    assert gcx.commutant_dimension(1, 1, "with-square") == 1

    report, code = gcx.run("check-leibniz", open_fixture("cross_product.json"), seed=7)
    assert code == 0, report
    assert [c["verdict"] for c in json.loads(report)["checks"]] == ["pass", "pass"]
    print("smoke test passed")


def open_fixture(name):
    import pathlib

    root = pathlib.Path(__file__).resolve().parent.parent
    return (root / "crates" / "cli" / "tests" / "fixtures" / name).read_text()


if __name__ == "__main__":
    main()
