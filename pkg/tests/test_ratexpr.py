import json

import pytest

from invforge.errors import DegreeBoundOverflow, ZeroDenominator
from invforge.gf import make_field
from invforge.invariants import dickson_c, dickson_d, steinberg_build
from invforge.mpoly import SparsePoly, VarGrid, determinant, evaluate, exact_div
from invforge.ratexpr import (
    RatExpr,
    extension_for,
    rat_arith,
    rat_equal,
    rat_equal_exact,
    rat_equal_probabilistic,
    rat_make,
)

F2 = make_field(2)
F3 = make_field(3)
G12 = VarGrid(1, 2)


def x(spec, grid, i, j, power=1):
    return SparsePoly.var(spec, grid, i, j, power)


def test_rat_make_examples():
    f = x(F2, G12, 1, 1) + 1
    assert rat_equal_exact(rat_make(f, SparsePoly.one(F2, G12)), f)
    assert rat_make(SparsePoly.zero(F2, G12), f).is_zero()
    d21, d22 = dickson_d(2, 1, 1, G12, F2), dickson_d(2, 2, 1, G12, F2)
    assert rat_equal_exact(rat_make(d21, d22), exact_div(d21, d22))
    with pytest.raises(ZeroDenominator):
        rat_make(f, SparsePoly.zero(F2, G12))


def test_rat_arith_examples():
    f, g = x(F3, G12, 1, 1) + 2, x(F3, G12, 1, 2) ** 2 + 1
    a = RatExpr(f, g)
    assert rat_equal_exact(rat_arith("mul", a, RatExpr(SparsePoly.one(F3, G12))), a)
    assert rat_equal_exact(RatExpr(f, g) * RatExpr(g, f), SparsePoly.one(F3, G12))
    assert rat_equal_exact(a - a, SparsePoly.zero(F3, G12))
    assert rat_equal_exact(a**-1, RatExpr(g, f))


def test_pow_q_matches_frobenius_pointwise():
    fam = steinberg_build(2, 2, F3)
    g = fam.generators[(1, 1)]
    powered = rat_arith("pow", g, 3)
    frob = g.frobenius(1)
    assert rat_equal_exact(powered, frob)
    big = make_field(3, 4)
    for pt in ([1, 2, 3, 4], [5, 7, 11, 13], [20, 30, 40, 50]):
        den = evaluate(frob.den, pt, big)
        if den:
            lhs = big.mul(evaluate(powered.num, pt, big), evaluate(frob.den, pt, big))
            rhs = big.mul(evaluate(frob.num, pt, big), evaluate(powered.den, pt, big))
            assert lhs == rhs


def test_rat_equal_exact_examples():
    f, g, h = x(F3, G12, 1, 1), x(F3, G12, 1, 2), x(F3, G12, 1, 1) + x(F3, G12, 1, 2)
    assert rat_equal_exact(RatExpr(f, g), RatExpr(h * f, h * g))
    assert not rat_equal_exact(RatExpr(f, g), RatExpr(g, f))
    d21, d22 = dickson_d(2, 1, 1, G12, F2), dickson_d(2, 2, 1, G12, F2)
    assert rat_equal_exact(RatExpr(d21, d22), dickson_c(2, 1, 1, G12, F2))


def test_probabilistic_examples():
    f = RatExpr(x(F3, G12, 1, 1) ** 2 + 1, x(F3, G12, 1, 2) + 1)
    v = rat_equal_probabilistic(f, f, trials=20, seed=7)
    assert v.equal is True and v.trials == 20
    w = rat_equal_probabilistic(f, f + x(F3, G12, 1, 1), trials=20, seed=7)
    assert w.equal is False and "x[1,1]" in w.witness
    out = json.loads(w.to_json())
    assert out["verdict"] == "unequal" and out["method"] == "prob"


def test_probabilistic_lemma27_agrees_with_exact():
    fam = steinberg_build(3, 3, F2)
    lhs = fam.ell0 ** (2 - 1 + 3)
    rhs = determinant(fam.ell_matrix(1))
    v = rat_equal_probabilistic(lhs, rhs, trials=20, seed=3)
    assert v.equal is True


def test_probabilistic_is_replayable():
    f = RatExpr(x(F3, G12, 1, 1), x(F3, G12, 1, 2) + 1)
    g = RatExpr(x(F3, G12, 1, 1) + 1, x(F3, G12, 1, 2) + 1)
    a = rat_equal_probabilistic(f, g, trials=5, seed=11)
    b = rat_equal_probabilistic(f, g, trials=5, seed=11)
    assert a.to_json() == b.to_json()


def test_extension_choice_and_overflow():
    assert extension_for(F2, 10).q == 64
    assert extension_for(F3, 2).q == 9
    with pytest.raises(DegreeBoundOverflow):
        extension_for(F2, 1 << 20)


def test_auto_mode_uses_exact_when_small():
    f = RatExpr(x(F3, G12, 1, 1), x(F3, G12, 1, 2))
    assert rat_equal(f, f).method == "exact"
    assert rat_equal(f, f, term_cap=0).method == "prob"


def test_derivative_quotient_rule():
    a, b = x(F3, G12, 1, 1), x(F3, G12, 1, 2)
    d = RatExpr(a, b).derivative(1, 2)
    assert rat_equal_exact(d, RatExpr(-a, b * b))
