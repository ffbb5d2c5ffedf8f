import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from invforge.errors import (
    BadExponentArity,
    DivisionByZero,
    MissingAssignment,
    NotDivisible,
    NotSquare,
    SpecMismatch,
)
from invforge.gf import make_field
from invforge.mpoly import (
    PolyMatrix,
    SparsePoly,
    VarGrid,
    bareiss_det,
    cofactor_det,
    derivative,
    determinant,
    evaluate,
    exact_div,
    frobenius_power_poly,
    parse_poly,
    poly_arith,
    poly_build,
    substitute,
    to_canonical_string,
)

from oracles import det_cols, dickson_d_oracle, frob_col, to_terms

F2 = make_field(2)
F3 = make_field(3)
F4 = make_field(2, 2)
G12 = VarGrid(1, 2)

# frozen from the Leibniz oracle in oracles.py
D22_F2 = "x[1,1]^2*x[1,2] + x[1,1]*x[1,2]^2"
C21_F2 = "x[1,1]^2 + x[1,1]*x[1,2] + x[1,2]^2"


def x(spec, grid, i, j, power=1):
    return SparsePoly.var(spec, grid, i, j, power)


def from_oracle(spec, grid, d):
    return poly_build(spec, grid, to_terms(d))


def dickson(spec, n, i):
    grid = VarGrid(1, n)
    cols = [[x(spec, grid, 1, j, spec.q**t) for j in range(1, n + 1)]
            for t in range(n + 1) if t != i]
    return determinant(PolyMatrix.from_columns(cols))


def test_grid_indexing():
    g = VarGrid(3, 2)
    assert g.index(2, 1) == 2
    assert g.var_name(5) == (3, 2)
    assert g.unpack(g.pack([1, 0, 2, 0, 0, 7])) == [1, 0, 2, 0, 0, 7]


def test_poly_build_examples():
    assert not poly_build(F2, G12, [])
    assert not poly_build(F2, G12, [(1, [1, 0]), (1, [1, 0])])
    f = poly_build(F3, G12, [(2, [2, 0]), (1, [0, 1])])
    assert len(f) == 2 and f.degree() == 2
    with pytest.raises(BadExponentArity):
        poly_build(F3, G12, [(1, [1, 0, 0])])


def test_poly_arith_examples():
    a, b = x(F2, G12, 1, 1), x(F2, G12, 1, 2)
    f = a + b
    assert f * 1 == f
    assert poly_arith("mul", f, f) == a**2 + b**2
    g = VarGrid(2, 1)
    y1, y2 = x(F3, g, 1, 1), x(F3, g, 2, 1)
    assert (y1 + y2) * (y1 + 2 * y2) == y1**2 + 2 * y2**2
    with pytest.raises(SpecMismatch):
        poly_arith("add", a, x(F3, G12, 1, 1))


def test_frobenius_poly():
    a, b = x(F2, G12, 1, 1), x(F2, G12, 1, 2)
    f = a + b
    assert frobenius_power_poly(f, 0) == f
    assert frobenius_power_poly(f, 1) == a**2 + b**2


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 2), st.integers(0, 3), st.integers(0, 3)),
                min_size=1, max_size=6))
def test_frobenius_matches_repeated_product(terms):
    f = poly_build(F3, G12, [(c, [e1, e2]) for c, e1, e2 in terms])
    assert frobenius_power_poly(f, 1) == f * f * f


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(["1", "t", "1+t"]), st.integers(0, 2),
                          st.integers(0, 2)), min_size=1, max_size=4),
       st.integers(0, 9))
def test_pow_matches_repeated_product_f4(terms, k):
    f = poly_build(F4, G12, [(F4.element(c), [e1, e2]) for c, e1, e2 in terms])
    want = SparsePoly.one(F4, G12)
    for _ in range(k):
        want = want * f
    assert f**k == want


def test_determinant_matches_leibniz_oracle():
    assert str(dickson(F2, 2, 2)) == D22_F2
    assert dickson(F2, 2, 2) == from_oracle(F2, G12, dickson_d_oracle(2, 2, 2, 2))
    for q, n in [(2, 3), (3, 2), (3, 3)]:
        spec = make_field(q)
        for i in range(n + 1):
            want = from_oracle(spec, VarGrid(1, n), dickson_d_oracle(n, i, q, q))
            assert dickson(spec, n, i) == want


def test_determinant_examples():
    one, zero = SparsePoly.one(F3, G12), SparsePoly.zero(F3, G12)
    assert determinant(PolyMatrix([[one, zero], [zero, one]])) == 1
    col = [x(F3, G12, 1, 1), x(F3, G12, 1, 2)]
    assert not determinant(PolyMatrix.from_columns([col, col]))
    with pytest.raises(NotSquare):
        determinant([[one, zero]])


def test_bareiss_agrees_with_cofactor():
    g = VarGrid(5, 5)
    rows = [[x(F3, g, i, j) + x(F3, g, j, i) ** 2 for j in range(1, 6)] for i in range(1, 6)]
    zero, one = SparsePoly.zero(F3, g), SparsePoly.one(F3, g)
    assert bareiss_det(rows) == cofactor_det(rows, zero, one)


def test_exact_div_examples():
    d21, d22 = dickson(F2, 2, 1), dickson(F2, 2, 2)
    assert exact_div(d22, d22) == 1
    assert str(exact_div(d21, d22)) == C21_F2
    with pytest.raises(NotDivisible):
        exact_div(x(F2, G12, 1, 1), x(F2, G12, 1, 2))
    with pytest.raises(DivisionByZero):
        exact_div(d22, SparsePoly.zero(F2, G12))


@pytest.mark.parametrize("q,n", [(2, 2), (2, 3), (3, 2), (3, 3)])
def test_dickson_divisibility(q, n):
    spec = make_field(q)
    dnn = dickson(spec, n, n)
    for s in range(n):
        c = exact_div(dickson(spec, n, s), dnn)
        assert c * dnn == dickson(spec, n, s)


def test_substitute_examples():
    a, b = x(F2, G12, 1, 1), x(F2, G12, 1, 2)
    f = a * b + 1
    assert substitute(f, {(1, 1): a, (1, 2): b}) == f
    assert substitute(f, {(1, 1): 1, (1, 2): 1}).code == 0
    with pytest.raises(MissingAssignment):
        substitute(f, {(1, 1): 1})


def test_substitute_specialisation():
    q = 2
    g = VarGrid(3, 3)
    cols = [[x(F2, g, c, j) for j in range(1, 4)] for c in (1, 2, 3)]
    lhs = determinant(PolyMatrix.from_columns(cols))
    images = {(i, j): x(F2, g, i, j) for i in (1, 2) for j in range(1, 4)}
    images.update({(3, j): x(F2, g, 2, j, q) for j in range(1, 4)})
    got = substitute(lhs, images)
    want = from_oracle(F2, g, det_cols([frob_col(1, 1, 3, 9), frob_col(2, 1, 3, 9),
                                        frob_col(2, q, 3, 9)], 2, 9))
    assert got == want and got


def test_canonical_strings():
    assert to_canonical_string(SparsePoly.zero(F2, G12)) == "0"
    assert to_canonical_string(SparsePoly.one(F2, G12)) == "1"
    f = poly_build(F4, G12, [(F4.element("1+t"), [1, 0]), (F4.element("t"), [0, 0])])
    assert str(f) == "(1+t)*x[1,1] + t"


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 2), st.integers(0, 4), st.integers(0, 4)),
                max_size=6))
def test_parse_roundtrip(terms):
    f = poly_build(F3, G12, [(c, [e1, e2]) for c, e1, e2 in terms])
    assert parse_poly(str(f), F3, G12) == f


def test_parse_roundtrip_extension():
    f = poly_build(F4, G12, [(F4.element("1+t"), [2, 1]), (F4.element("t"), [0, 3]),
                             (1, [0, 0])])
    assert parse_poly(str(f), F4, G12) == f


def test_derivative_kills_p_multiples():
    a, b = x(F3, G12, 1, 1), x(F3, G12, 1, 2)
    assert not derivative(a**3, 1, 1)
    assert derivative(a**2 * b, 1, 1) == 2 * a * b


def test_evaluate_in_extension():
    big = make_field(2, 4)
    a, b = x(F2, G12, 1, 1), x(F2, G12, 1, 2)
    f = a**2 + a * b + 1
    for u in range(0, 16, 5):
        for v in range(0, 16, 3):
            want = big.add(big.add(big.mul(u, u), big.mul(u, v)), 1)
            assert evaluate(f, [u, v], big) == want
