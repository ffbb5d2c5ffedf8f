import pytest

from invforge.errors import (
    CapExceeded,
    EvenCharForbidden,
    FormInvalid,
    NotInGroup,
    OddSizeAlternate,
    SizeMismatch,
)
from invforge.gf import make_field, mat_det, mat_mul, transpose
from invforge.groups import (
    GroupElement,
    act,
    act_product,
    enumerate_group,
    form_fixing_matrix,
    generator_set,
    gl_order,
    is_member,
    parse_form,
    random_element,
    sample_elements,
    sl_order,
    standard_form,
)
from invforge.invariants import steinberg_build
from invforge.mpoly import SparsePoly, VarGrid, poly_build
from invforge.ratexpr import RatExpr, rat_equal_exact

from oracles import act_dpoly, brute_group, to_terms

F2 = make_field(2)
F3 = make_field(3)
F9 = make_field(3, 2)


def test_standard_forms():
    assert standard_form("alternate", 2, F3).entries == ((0, 1), (2, 0))
    assert standard_form("symmetric", 2, F3).entries == ((1, 0), (0, 1))
    with pytest.raises(OddSizeAlternate):
        standard_form("alternate", 3, F3)
    with pytest.raises(EvenCharForbidden):
        standard_form("symmetric", 2, F2)


def test_form_validation():
    with pytest.raises(FormInvalid):
        parse_form("symmetric", "1,1;0,1", F3)
    with pytest.raises(FormInvalid):
        parse_form("symmetric", "1,1;1,1", F3)


def test_membership_examples():
    for g in ("GL", "SL", "Sp", "O"):
        assert is_member(((1, 0), (0, 1)), g, F3)
    assert is_member(((1, 1), (0, 1)), "SL", F2)
    assert not is_member(((0, 1), (1, 0)), "Sp", F3)
    with pytest.raises(NotInGroup):
        GroupElement(((0, 1), (1, 0)), "Sp", F3)
    with pytest.raises(SizeMismatch):
        is_member(((1, 0), (0, 1)), "O", F3, standard_form("symmetric", 3, F3))


def test_orders_match_formula_and_brute_force():
    assert len(enumerate_group("GL", 2, F2)) == 6 == gl_order(2, 2)
    assert len(enumerate_group("SL", 2, F3)) == 24 == sl_order(2, 3)
    assert len(enumerate_group("GL", 2, F3)) == 48
    assert len(enumerate_group("O", 2, F3)) == len(brute_group(2, 3, ((1, 0), (0, 1)))) == 8
    sp = {g.matrix for g in enumerate_group("Sp", 2, F3)}
    sl = {g.matrix for g in enumerate_group("SL", 2, F3)}
    assert sp == sl and len(sp) == 24
    assert len(enumerate_group("Sp", 4, F2)) == 720
    assert len(enumerate_group("U", 2, F9)) == 96


def test_nonstandard_symmetric_form():
    a = parse_form("symmetric", "1,0;0,2", F3)
    got = {g.matrix for g in enumerate_group("O", 2, F3, a)}
    assert got == set(brute_group(2, 3, a.entries))


def test_enumeration_cap():
    with pytest.raises(CapExceeded):
        enumerate_group("GL", 3, F3, cap=1000)


def test_random_element_examples():
    gl = {g.matrix for g in enumerate_group("GL", 2, F2)}
    for seed in range(10):
        assert random_element("GL", 2, F2, seed=seed).matrix in gl
        assert random_element("SL", 3, F3, seed=seed).det() == 1
        t = random_element("O", 2, F3, seed=seed).matrix
        assert mat_mul(F3, t, transpose(t)) == ((1, 0), (0, 1))


def test_random_element_replayable():
    a = sample_elements("Sp", 4, F3, 5, seed=9)
    b = sample_elements("Sp", 4, F3, 5, seed=9)
    assert a == b


def test_generator_words_stay_in_group():
    for group, spec in (("Sp", F3), ("O", F3)):
        form = standard_form("alternate" if group == "Sp" else "symmetric", 4, spec)
        gens = generator_set(group, form)
        assert gens
        g = random_element(group, 4, spec, form, seed=1, budget=0)
        assert is_member(g.matrix, group, spec, form)


def test_action_identity_and_composition():
    g = VarGrid(2, 2)
    f = SparsePoly.var(F3, g, 1, 1) ** 2 * SparsePoly.var(F3, g, 2, 2) + SparsePoly.var(F3, g, 1, 2)
    one = ((1, 0), (0, 1))
    assert act(one, f) == f
    els = enumerate_group("GL", 2, F3)[:12]
    for s in els[:4]:
        for t in els[4:8]:
            assert act(s, act(t, f)) == act(t * s, f)


def test_action_matches_oracle():
    g = VarGrid(2, 2)
    f = SparsePoly.var(F3, g, 1, 1) ** 2 * SparsePoly.var(F3, g, 2, 2) + SparsePoly.var(F3, g, 1, 2)
    d = {(2, 0, 0, 1): 1, (0, 1, 0, 0): 1}
    for s in enumerate_group("GL", 2, F3)[::7]:
        want = act_dpoly(s.matrix, d, 2, 2, 3)
        assert act(s, f) == poly_build(F3, g, to_terms(want))


def test_scalar_fixes_x_power():
    g = VarGrid(1, 1)
    f = SparsePoly.var(F3, g, 1, 1) ** 2
    for a in (1, 2):
        assert act(((a,),), f) == f


def test_ell0_is_det_invariant():
    fam = steinberg_build(2, 2, F2)
    for s in sample_elements("GL", 2, F2, 10, seed=4):
        assert act(s, fam.ell0) == fam.ell0.scale(s.det())


def test_act_product_and_ratexpr():
    fam = steinberg_build(2, 2, F3)
    gen = fam.generators[(1, 2)]
    s = random_element("GL", 2, F3, seed=5)
    assert rat_equal_exact(act_product([s, s], gen), act(s, gen))
    assert isinstance(act(s, gen), RatExpr)


def test_form_symbols_need_transpose():
    # A = [[0,1],[1,1]] over F_3: O(A) is not closed under transpose, so only
    # the transpose substitution fixes X^t A X
    a = parse_form("symmetric", "0,1;1,1", F3)
    g = VarGrid(1, 2)
    x1, x2 = SparsePoly.var(F3, g, 1, 1), SparsePoly.var(F3, g, 1, 2)
    p = 2 * x1 * x2 + x2 * x2
    group = enumerate_group("O", 2, F3, a)
    assert len(group) == 4
    assert all(act(form_fixing_matrix(t), p) == p for t in group)
    assert not all(act(t, p) == p for t in group)
    assert not all(is_member(transpose(t.matrix), "O", F3, a) for t in group)
    assert all(mat_det(F3, t.matrix) in (1, 2) for t in group)
