import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from invforge.errors import CapExceeded, DegreeOutOfRange, DivisionByZero, NotPrime, SpecMismatch
from invforge.gf import (
    arith,
    conjugate,
    embedding,
    enumerate_elements,
    format_matrix,
    frobenius_power,
    invert,
    make_field,
    mat_det,
    mat_inv,
    mat_mul,
    mat_rank,
    parse_matrix,
)

from oracles import gf_mul_digits

F2 = make_field(2)
F3 = make_field(3)
F4 = make_field(2, 2)
F9 = make_field(3, 2)


def el(spec, text):
    return spec.element(text)


def test_prime_fields():
    assert F2.q == 2 and F2.is_prime_field
    assert F3.q == 3
    assert repr(F3) == "FieldSpec(F_3)"


def test_smallest_modulus():
    # the only irreducible monic quadratic over F_2
    assert F4.modulus == (1, 1, 1)
    assert F9.modulus == (1, 0, 1)
    assert repr(F4) == "FieldSpec(F_2^2, modulus=t^2+t+1)"


def test_modulus_is_lexicographically_first():
    # oracle: every monic quadratic over F_3 without a root, in lex order
    quads = []
    for a0, a1 in itertools.product(range(3), repeat=2):
        if all((a0 + a1 * x + x * x) % 3 for x in range(3)):
            quads.append((a0, a1, 1))
    assert quads == [(1, 0, 1), (2, 1, 1), (2, 2, 1)]
    assert F9.modulus == quads[0]


def test_make_field_errors():
    with pytest.raises(NotPrime):
        make_field(4)
    with pytest.raises(DegreeOutOfRange):
        make_field(2, 0)
    with pytest.raises(CapExceeded):
        make_field(2, 40)


def test_arith_examples():
    assert arith("add", el(F3, "2"), el(F3, "2")) == el(F3, "1")
    assert arith("mul", el(F4, "t"), el(F4, "t")) == el(F4, "1+t")
    for a in enumerate_elements(F9):
        assert arith("mul", a, el(F9, "1")) == a
    with pytest.raises(SpecMismatch):
        arith("add", el(F3, "1"), el(F9, "1"))


def test_invert_examples():
    assert invert(el(F3, "2")) == el(F3, "2")
    assert invert(el(F4, "t")) == el(F4, "1+t")
    assert invert(el(F2, "1")) == el(F2, "1")
    with pytest.raises(DivisionByZero):
        invert(el(F3, "0"))


def test_frobenius_examples():
    assert frobenius_power(el(F4, "t"), 1, "p") == el(F4, "1+t")
    for a in enumerate_elements(F9):
        assert frobenius_power(a, 1, "q") == a
        assert conjugate(conjugate(a)) == a
        assert conjugate(a) == a**3


def test_enumerate_elements():
    assert [a.code for a in enumerate_elements(F2)] == [0, 1]
    assert [a.code for a in enumerate_elements(F3)] == [0, 1, 2]
    four = enumerate_elements(F4)
    assert len(four) == 4 and len(set(four)) == 4
    assert [str(a) for a in four] == ["0", "t", "1", "1+t"]


@pytest.mark.parametrize("spec", [F4, F9, make_field(2, 3), make_field(5, 2)])
def test_mul_matches_schoolbook_oracle(spec):
    for a in range(spec.q):
        for b in range(spec.q):
            want = gf_mul_digits(list(spec.digits(a)), list(spec.digits(b)), spec.modulus, spec.p)
            assert spec.digits(spec.mul(a, b)) == tuple(want)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 80), st.integers(0, 80), st.integers(0, 80))
def test_field_axioms_f81(a, b, c):
    f = make_field(3, 4)
    assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))
    assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
    if a:
        assert f.mul(a, f.inv(a)) == 1
    assert f.pow(a, f.q) == a


def test_parse_format_roundtrip():
    for spec in (F3, F4, F9):
        for code in spec.codes():
            assert spec.parse(spec.format(code)) == code


def test_embedding_is_homomorphism():
    big = make_field(3, 4)
    emb = embedding(F9, big)
    for a in range(9):
        for b in range(9):
            assert emb[F9.mul(a, b)] == big.mul(emb[a], emb[b])
            assert emb[F9.add(a, b)] == big.add(emb[a], emb[b])


def test_matrix_helpers():
    a = parse_matrix(F3, "1,2;0,1")
    assert format_matrix(F3, a) == "1,2;0,1"
    assert mat_det(F3, a) == 1
    assert mat_mul(F3, a, mat_inv(F3, a)) == ((1, 0), (0, 1))
    assert mat_rank(F3, [[1, 2], [2, 1]]) == 1
