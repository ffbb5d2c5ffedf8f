"""Invariance reports, Jacobian independence and stabilizer enumeration."""

from __future__ import annotations

import itertools
import time
from typing import Sequence

from .errors import BranchUnsupported, CapExceeded, SizeMismatch
from .gf import FieldSpec, mat_rank
from .groups import GroupElement, act, act_product, enumerate_group, form_fixing_matrix, gl_order
from .groups import sample_elements
from .invariants import SteinbergFamily, det_of_columns
from .mpoly import SparsePoly, derivative, evaluate
from .ratexpr import PointSampler, RatExpr, format_point, min_extension, rat_equal, rat_equal_exact
from .report import VerdictReport
from .rng import derive

STABILIZER_CAP = 10**6
JACOBIAN_FIELD_MIN = 1 << 8


class ProductGroupElement:
    """(sigma_1, ..., sigma_m) acting with sigma_i on copy i."""

    __slots__ = ("components",)

    def __init__(self, components: Sequence[GroupElement]):
        comps = tuple(components)
        if not comps:
            raise SizeMismatch("a product element needs at least one component")
        first = comps[0]
        for c in comps[1:]:
            if c.size != first.size or c.spec != first.spec:
                raise SizeMismatch("components differ in size or field")
        self.components = comps

    @property
    def spec(self) -> FieldSpec:
        return self.components[0].spec

    def is_diagonal(self) -> bool:
        first = self.components[0].matrix
        return all(c.matrix == first for c in self.components)

    def det(self) -> int:
        d = 1
        for c in self.components:
            d = self.spec.mul(d, c.det())
        return d

    def act(self, f):
        return act_product(self.components, f)

    def __eq__(self, other) -> bool:
        return isinstance(other, ProductGroupElement) and self.components == other.components

    def __hash__(self) -> int:
        return hash(self.components)

    def __str__(self) -> str:
        return " | ".join(str(c) for c in self.components)


def _apply(sigma, f, transpose: bool):
    if isinstance(sigma, ProductGroupElement):
        return sigma.act(f)
    return act(form_fixing_matrix(sigma) if transpose else sigma, f)


def _same(a, b) -> bool:
    if isinstance(a, RatExpr) or isinstance(b, RatExpr):
        return rat_equal_exact(a, b)
    return a == b


def _scaled(f, c: int):
    if isinstance(f, RatExpr):
        return RatExpr(f.num.scale(c), f.den)
    return f.scale(c)


def invariance_report(generators: Sequence, elements: Sequence, mode: str = "invariant",
                      transpose: bool = False, claim: str = "invariance",
                      params: dict | None = None, labels: Sequence[str] | None = None,
                      method: str = "enumeration", seed: int | None = None) -> VerdictReport:
    """Check act(sigma, f) = f (or det(sigma)*f) for every generator and element.

    ``transpose`` acts by sigma^t, the substitution fixing form symbols.
    """
    if mode not in ("invariant", "det_invariant"):
        raise ValueError(f"unknown mode {mode!r}")
    t0 = time.perf_counter()
    labels = list(labels) if labels is not None else [f"g{k}" for k in range(len(generators))]
    witness = None
    checked = 0
    for sigma in elements:
        det = sigma.det() if mode == "det_invariant" else 1
        for label, f in zip(labels, generators):
            moved = _apply(sigma, f, transpose)
            target = f if det == 1 else _scaled(f, det)
            checked += 1
            if not _same(moved, target):
                witness = {"element": str(sigma), "generator": label}
                break
        if witness:
            break
    params = dict(params or {})
    params.update({"mode": mode, "elements": len(elements), "generators": len(labels)})
    return VerdictReport(claim, params, method, "fail" if witness else "pass", seed=seed,
                         witness=witness, details={"checks": checked},
                         elapsed=time.perf_counter() - t0)


# ----------------------------------------------------------------------
# Jacobian criterion
# ----------------------------------------------------------------------

def _as_rat(g) -> RatExpr:
    return g if isinstance(g, RatExpr) else RatExpr(g)


def jacobian_independence(generators: Sequence, grid=None, seed: int = 0, retries: int = 8,
                          claim: str = "jacobian", params: dict | None = None) -> VerdictReport:
    """Full rank of d(g)/dx at one random extension-field point proves the
    generators algebraically independent.  Rank deficiency at every sampled
    point is reported as inconclusive."""
    t0 = time.perf_counter()
    gens = [_as_rat(g) for g in generators]
    grid = grid or gens[0].grid
    spec = gens[0].spec
    nv = grid.nvars
    if len(gens) > nv:
        raise SizeMismatch(f"{len(gens)} generators but only {nv} variables")
    degree = max(g.degree_bound() for g in gens)
    big = min_extension(spec, max(JACOBIAN_FIELD_MIN, 4 * degree + 1))
    variables = [grid.var_name(v) for v in range(nv)]
    parts = []
    for g in gens:
        dn = [derivative(g.num, i, j) for i, j in variables]
        dd = [derivative(g.den, i, j) for i, j in variables]
        parts.append((g.num, g.den, dn, dd))
    sampler = PointSampler(spec, big, [g.den for g in gens])
    emb = sampler.embed
    ranks = []
    params = dict(params or {})
    params.update({"generators": len(gens), "variables": nv})
    for t in range(retries):
        pt = sampler.draw(derive(seed, t), nv)
        if pt is None:
            continue
        rows = []
        for num, den, dn, dd in parts:
            n0 = evaluate(num, pt, big, emb)
            d0 = evaluate(den, pt, big, emb)
            dinv2 = big.inv(big.mul(d0, d0))
            row = []
            for a, b in zip(dn, dd):
                da = evaluate(a, pt, big, emb) if a else 0
                db = evaluate(b, pt, big, emb) if b else 0
                row.append(big.mul(big.sub(big.mul(da, d0), big.mul(n0, db)), dinv2))
            rows.append(row)
        r = mat_rank(big, rows)
        ranks.append(r)
        if r == len(gens):
            details = {"rank": r, "ranks": ranks, "field": repr(big),
                       "point": format_point(grid, big, pt)}
            return VerdictReport(claim, params, "probabilistic", "pass", seed=seed,
                                 details=details, elapsed=time.perf_counter() - t0)
    return VerdictReport(claim, params, "probabilistic", "inconclusive", seed=seed,
                         details={"ranks": ranks, "field": repr(big)},
                         elapsed=time.perf_counter() - t0)


# ----------------------------------------------------------------------
# Galois stabilizer
# ----------------------------------------------------------------------

def _fixes(sigma: ProductGroupElement, fam: SteinbergFamily, gens) -> bool:
    l0 = sigma.act(fam.ell0)
    for (i, j), g in gens:
        moved = RatExpr(sigma.act(g.num), l0)
        if not rat_equal(moved, g, mode="auto", trials=30, seed=0).equal:
            return False
    return True


def stabilizer_enumeration(fam: SteinbergFamily, cap: int = STABILIZER_CAP) -> VerdictReport:
    """Elements of GL_n^n fixing every l_ij/l_0 must be exactly the diagonal."""
    t0 = time.perf_counter()
    if fam.m != fam.n:
        raise BranchUnsupported("stabilizer enumeration needs m = n")
    n, spec = fam.n, fam.spec
    total = gl_order(n, spec.q) ** n
    if total > cap:
        raise CapExceeded(f"|GL_{n}(F_{spec.q})|^{n} = {total} exceeds cap {cap}")
    gl = enumerate_group("GL", n, spec, cap=cap)
    gens = sorted(fam.generators.items())
    fixing = 0
    diagonal_fixing = 0
    extra = []
    missed = []
    for comps in itertools.product(gl, repeat=n):
        sigma = ProductGroupElement(comps)
        diag = sigma.is_diagonal()
        fixed = _fixes(sigma, fam, gens)
        fixing += fixed
        if fixed and diag:
            diagonal_fixing += 1
        elif fixed:
            extra.append(str(sigma))
        elif diag:
            missed.append(str(sigma))
    ok = not extra and not missed and diagonal_fixing == len(gl)
    witness = None
    if extra:
        witness = {"non_diagonal_fixer": extra[0]}
    elif missed:
        witness = {"diagonal_not_fixing": missed[0]}
    details = {"enumerated": total, "fixing": fixing, "diagonal": len(gl),
               "diagonal_fixing": diagonal_fixing}
    return VerdictReport("stabilizer", {"q": spec.q, "n": n, "m": fam.m}, "enumeration",
                         "pass" if ok else "fail", witness=witness, details=details,
                         elapsed=time.perf_counter() - t0)


def eta_polynomial(fam: SteinbergFamily, s: int) -> SparsePoly:
    """det(X_1, X_s, X_1^q, ..., X_1^(q^(n-2)))."""
    refs = [(1, 0), (s, 0)] + [(1, t) for t in range(1, fam.n - 1)]
    return det_of_columns([fam.column(r) for r in refs])


def eta_cofactor(fam: SteinbergFamily, s: int) -> RatExpr:
    """f_s with eta_s = l_0 * f_s, built from the Cramer coefficients
    X_1^(q^k) = sum_j (l_1j^(k) / l_0) X_j."""
    from .mpoly import cofactor_det

    n = fam.n
    zero = RatExpr(SparsePoly.zero(fam.spec, fam.grid))
    one = RatExpr(SparsePoly.one(fam.spec, fam.grid))
    cols = [[one if r == 0 else zero for r in range(n)],
            [one if r == s - 1 else zero for r in range(n)]]
    for k in range(1, n - 1):
        cols.append([RatExpr(fam.lijk(1, j, k), fam.ell0) for j in range(1, n + 1)])
    rows = [[cols[c][r] for c in range(n)] for r in range(n)]
    return cofactor_det(rows, zero, one)


def eta_membership_check(fam: SteinbergFamily, s: int, seed: int = 0, samples: int = 50,
                         enum_cap: int = 10_000, corrupt: bool = False) -> VerdictReport:
    """(eta_s / l_0)^(q-1) must be fixed by the diagonal GL action."""
    t0 = time.perf_counter()
    if fam.m != fam.n:
        raise BranchUnsupported("eta membership needs m = n")
    n, spec = fam.n, fam.spec
    if not 2 <= s <= n:
        raise ValueError(f"s={s} outside 2..{n}")
    eta = eta_polynomial(fam, s)
    if corrupt:
        lead, c = eta.leading()
        terms = dict(eta.terms)
        terms[lead] = spec.neg(c)
        eta = SparsePoly(spec, fam.grid, terms)
    q = spec.q
    ratio = RatExpr(eta ** (q - 1), fam.ell0 ** (q - 1))
    if gl_order(n, q) <= enum_cap:
        elements = enumerate_group("GL", n, spec, cap=enum_cap)
        method = "enumeration"
    else:
        elements = sample_elements("GL", n, spec, samples, seed=seed)
        method = "exact"
    report = invariance_report([ratio], elements, claim="eta_membership",
                               params={"q": q, "n": n, "s": s, "corrupt": corrupt},
                               labels=[f"eta_{s}"], method=method,
                               seed=None if method == "enumeration" else seed)
    factor = eta_cofactor(fam, s)
    report.details["factorization_holds"] = rat_equal_exact(RatExpr(eta), RatExpr(fam.ell0) * factor)
    const = factor.constant_value()
    report.details["f_s"] = str(const) if const is not None else "non-constant"
    report.elapsed = time.perf_counter() - t0
    return report
