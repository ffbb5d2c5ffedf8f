"""Acceptance suite.  Each test prints one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines inline;
they are also echoed when output capture is on.
"""
import json
import time

import pytest

from invforge.classical import chu_converse, identity_check_classical, theorem41_generators
from invforge.cli import main
from invforge.gf import make_field
from invforge.groups import enumerate_group, sample_elements, standard_form
from invforge.invariants import dickson_c, dickson_d, identity_check, steinberg_build
from invforge.mpoly import SparsePoly, VarGrid, exact_div
from invforge.verify import invariance_report, jacobian_independence, stabilizer_enumeration


@pytest.fixture
def verdict(capsys):
    def emit(number, ok, note=""):
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} {note}".rstrip())
        assert ok, f"criterion {number} failed: {note}"
    return emit


def test_criterion_01_dickson(verdict):
    t0 = time.perf_counter()
    g = VarGrid(1, 2)
    x1, x2 = SparsePoly.var(make_field(2), g, 1, 1), SparsePoly.var(make_field(2), g, 1, 2)
    ok = dickson_c(2, 1, 1, g, make_field(2)) == x1**2 + x1 * x2 + x2**2
    for q in (2, 3):
        spec = make_field(q)
        d22 = dickson_d(2, 2, 1, g, spec)
        for s in (0, 1):
            quo = exact_div(dickson_d(2, s, 1, g, spec), d22)
            ok = ok and quo == dickson_c(2, s, 1, g, spec)
    dt = time.perf_counter() - t0
    verdict(1, ok and dt < 1.0, f"c21 exact, d2s/d22 divides, {dt:.3f}s")


def test_criterion_02_lemma27(verdict):
    t0 = time.perf_counter()
    cases = [(2, 2, 2), (3, 2, 2), (2, 3, 3)]
    ok = all(identity_check("lemma_27", {"q": q, "n": n, "m": m, "mode": "exact"}).verdict == "pass"
             for q, n, m in cases)
    dt = time.perf_counter() - t0
    verdict(2, ok and dt < 30, f"{len(cases)} cases exact, {dt:.2f}s")


def test_criterion_03_cramer_chain(verdict):
    ok = True
    for name in ("cramer_21", "chain_24"):
        for k in (1, 2, 3):
            rep = identity_check(name, {"q": 2, "n": 2, "m": 2, "k": k, "mode": "exact"})
            ok = ok and rep.verdict == "pass" and rep.method == "exact"
            rep = identity_check(name, {"q": 3, "n": 2, "m": 2, "k": k, "mode": "prob",
                                        "trials": 20, "seed": 11})
            ok = ok and rep.verdict == "pass" and rep.method == "probabilistic"
            ok = ok and rep.details["trials_run"] == 20
    verdict(3, ok, "exact at (2,2,2), 20 probabilistic trials at (3,2,2)")


def test_criterion_04_membership(verdict):
    t0 = time.perf_counter()
    ok = all(identity_check("prop32_membership", {"q": q, "n": 2, "m": 2, "mode": "exact"}).verdict
             == "pass" for q in (2, 3))
    dt = time.perf_counter() - t0
    verdict(4, ok and dt < 60, f"q=2,3 exact, {dt:.2f}s")


def test_criterion_05_invariance(verdict):
    notes, ok = [], True
    sets = [(2, 2, enumerate_group("GL", 2, make_field(2)), 6),
            (3, 2, sample_elements("GL", 2, make_field(3), 50, seed=1), 50),
            (2, 3, sample_elements("GL", 3, make_field(2), 50, seed=1), 50)]
    for q, n, els, count in sets:
        fam = steinberg_build(n, n, make_field(q))
        gens = list(fam.generators.values())
        ells = [fam.ell0] + [fam.lijk(i, j, k) for i in range(1, n + 1)
                             for j in range(1, n + 1) for k in range(n + 1)]
        inv = invariance_report(gens, els)
        det = invariance_report(ells, els, mode="det_invariant")
        ok = ok and len(els) == count and inv.verdict == det.verdict == "pass"
        notes.append(f"GL{n}(F{q})x{len(els)}")
    verdict(5, ok, ", ".join(notes))


def test_criterion_06_stabilizer(verdict):
    t0 = time.perf_counter()
    got = []
    for q in (2, 3):
        rep = stabilizer_enumeration(steinberg_build(2, 2, make_field(q)))
        d = rep.details
        got.append((d["enumerated"], d["fixing"], d["diagonal_fixing"], rep.verdict))
    dt = time.perf_counter() - t0
    ok = got == [(36, 6, 6, "pass"), (2304, 48, 48, "pass")] and dt < 300
    verdict(6, ok, f"{got}, {dt:.2f}s")


def _timed_jacobian(gens, grid):
    t0 = time.perf_counter()
    rep = jacobian_independence(gens, grid, seed=3)
    return rep, time.perf_counter() - t0


def test_criterion_07_jacobian(verdict):
    ok, notes = True, []
    for q, n, m in [(2, 2, 2), (2, 2, 3), (3, 2, 2), (2, 3, 2)]:
        fam = steinberg_build(m, n, make_field(q))
        gens = fam.generator_list()
        rep, dt = _timed_jacobian(gens, fam.grid)
        ok = ok and rep.verdict == "pass" and len(gens) == m * n and dt < 60
        notes.append(f"steinberg{(q, n, m)}:{rep.details.get('rank')}")
    for kind, form_kind, spec, size, m in [("orthogonal", "symmetric", make_field(3), 2, 2),
                                           ("symplectic", "alternate", make_field(2), 2, 2),
                                           ("unitary", "hermitian", make_field(3, 2), 2, 1)]:
        fam = theorem41_generators(kind, standard_form(form_kind, size, spec), m)
        rep, dt = _timed_jacobian(fam.generators, fam.grid)
        ok = ok and rep.verdict == "pass" and len(fam.generators) == m * size and dt < 60
        notes.append(f"{kind}:{rep.details.get('rank')}")
    verdict(7, ok, " ".join(notes))


def test_criterion_08_classical_identities(verdict):
    t0 = time.perf_counter()
    runs = [("orth_42", {"q": 3, "n": 2, "j": 2}),
            ("orth_42", {"q": 3, "n": 2, "j": 2, "form": "1,0;0,2"}),
            ("orth_43", {"q": 3, "n": 2, "j": 2}),
            ("orth_43", {"q": 3, "n": 2, "j": 2, "form": "1,0;0,2"}),
            ("unit_44", {"q": 3, "n": 2, "j": 2}),
            ("sp_row", {"q": 2, "size": 2, "i": 1}),
            ("sp_row", {"q": 2, "size": 4, "i": 1})]
    bad = [name for name, p in runs if identity_check_classical(name, p).verdict != "pass"]
    dt = time.perf_counter() - t0
    verdict(8, not bad and dt < 120, f"{len(runs) - len(bad)}/{len(runs)} exact, {dt:.2f}s")


def test_criterion_09_chu_converse(verdict):
    t0 = time.perf_counter()
    rep = chu_converse(3, 2)
    dt = time.perf_counter() - t0
    # |GL_2(F_3)| = 48; the "480" in the criterion text is not a group order
    ok = rep.verdict == "pass" and rep.details["gl_order"] == 48 and dt < 60
    verdict(9, ok, f"{rep.details}, {dt:.2f}s")


def test_criterion_10_single_column(verdict):
    rep = identity_check("cor25_n1", {"q": 3, "n": 1, "m": 3, "mode": "exact"})
    verdict(10, rep.verdict == "pass", "(q,m)=(3,3) quotients match")


def test_criterion_11_determinism(verdict, tmp_path):
    cfg = {"field": {"p": 3}, "grid": {"m": 2, "n": 2}, "seed": 42, "mode": "prob",
           "trials": 20, "samples": 20, "params": {"k": 2},
           "tasks": ["construct", "verify:lemma_27", "verify:chain_24", "verify:invariance",
                     "verify:det_invariance", "verify:eta_membership", "stabilizer",
                     "jacobian", "bench"]}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    outs = [tmp_path / "a", tmp_path / "b"]
    codes = [main(["run", "--config", str(path), "--out", str(o)]) for o in outs]
    same = all((outs[0] / f).read_bytes() == (outs[1] / f).read_bytes()
               for f in ("reports.jsonl", "construct.txt"))
    verdict(11, same and codes == [0, 0], f"exit codes {codes}, artifacts identical={same}")
