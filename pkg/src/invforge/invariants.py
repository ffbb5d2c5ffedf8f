"""Dickson invariants, Steinberg generators l_ij / l_0 and their identities.

Columns are referenced as (copy, t), meaning the vector X_copy^(q^t) with
entries x[copy, j]^(q^t).  Every determinant below has such columns.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import (
    BadRemovedIndex,
    BranchUnsupported,
    BudgetExceeded,
    GridMismatch,
    IndexOutOfRange,
    NotDivisible,
    ZeroCofactor,
)
from .evalctx import ExactContext, run_identity
from .gf import FieldSpec, is_prime, make_field
from .mpoly import PolyMatrix, SparsePoly, VarGrid, determinant, exact_div, substitute
from .ratexpr import RatExpr, rat_equal_exact
from .report import VerdictReport

DEGREE_BUDGET = 1 << 20


def field_for_q(q: int) -> FieldSpec:
    """F_q for a prime power q."""
    for p in range(2, q + 1):
        if q % p == 0:
            e, r = 0, q
            while r % p == 0:
                r //= p
                e += 1
            if r != 1 or not is_prime(p):
                raise ValueError(f"{q} is not a prime power")
            return make_field(p, e)
    raise ValueError(f"{q} is not a prime power")


def frob_column(spec: FieldSpec, grid: VarGrid, copy: int, t: int, size: int | None = None):
    """X_copy^(q^t) as a list of SparsePoly."""
    size = grid.n if size is None else size
    if not 1 <= copy <= grid.m:
        raise IndexOutOfRange(f"copy {copy} outside 1..{grid.m}")
    power = spec.q**t
    return [SparsePoly(spec, grid, {grid.units[grid.index(copy, j)] * power: 1})
            for j in range(1, size + 1)]


def det_of_columns(cols) -> SparsePoly:
    return determinant(PolyMatrix.from_columns(cols))


# ----------------------------------------------------------------------
# Dickson
# ----------------------------------------------------------------------

def dickson_matrix(n: int, i: int, copy: int, grid: VarGrid, spec: FieldSpec) -> PolyMatrix:
    if not 0 <= i <= n:
        raise IndexOutOfRange(f"i={i} outside 0..{n}")
    if n > grid.n:
        raise IndexOutOfRange(f"n={n} exceeds grid width {grid.n}")
    cols = [frob_column(spec, grid, copy, t, n) for t in range(n + 1) if t != i]
    return PolyMatrix.from_columns(cols)


def dickson_d(n: int, i: int, copy: int, grid: VarGrid, spec: FieldSpec) -> SparsePoly:
    """d_{n,i} on the variables of one copy."""
    return determinant(dickson_matrix(n, i, copy, grid, spec))


def dickson_c(n: int, s: int, copy: int, grid: VarGrid, spec: FieldSpec) -> SparsePoly:
    """c_{n,s} = d_{n,s} / d_{n,n}; the division is exact."""
    if not 0 <= s <= n - 1:
        raise IndexOutOfRange(f"s={s} outside 0..{n - 1}")
    return exact_div(dickson_d(n, s, copy, grid, spec), dickson_d(n, n, copy, grid, spec))


# ----------------------------------------------------------------------
# Steinberg families
# ----------------------------------------------------------------------

@dataclass
class SteinbergFamily:
    m: int
    n: int
    spec: FieldSpec
    grid: VarGrid
    branch: str
    L_cols: list
    L0_cols: list
    ell0: SparsePoly
    generators: dict
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def q(self) -> int:
        return self.spec.q

    @property
    def L(self) -> PolyMatrix:
        return PolyMatrix.from_columns([self.column(c) for c in self.L_cols])

    @property
    def L0(self) -> PolyMatrix:
        return PolyMatrix.from_columns([self.column(c) for c in self.L0_cols])

    def column(self, ref):
        copy, t = ref
        return frob_column(self.spec, self.grid, copy, t)

    def row_range(self) -> range:
        """Valid i for l_ij^(k): copies 1..m, or L0 columns 1..n when m < n."""
        return range(1, (self.m if self.branch == "m_ge_n" else self.n) + 1)

    def replacement(self, i: int, k: int):
        if self.branch == "m_ge_n":
            return (i, k) if i <= self.n else (i, 0)
        copy, t = self.L0_cols[i - 1]
        return (copy, t + k)

    def lijk(self, i: int, j: int, k: int = 1) -> SparsePoly:
        if i not in self.row_range() or not 1 <= j <= self.n or k < 0:
            raise IndexOutOfRange(f"(i,j,k)=({i},{j},{k}) out of range")
        if self.branch == "m_ge_n" and i > self.n:
            k = 1
        key = (i, j, k)
        hit = self._cache.get(key)
        if hit is None:
            cols = list(self.L0_cols)
            cols[j - 1] = self.replacement(i, k)
            hit = det_of_columns([self.column(c) for c in cols])
            self._cache[key] = hit
        return hit

    def ell_matrix(self, k: int = 1):
        """rows i = 1..n, columns j = 1..n of l_ij^(k)."""
        return [[self.lijk(i, j, k) for j in range(1, self.n + 1)] for i in range(1, self.n + 1)]

    def generator_list(self) -> list[RatExpr]:
        return [self.generators[key] for key in sorted(self.generators)]


@lru_cache(maxsize=64)
def steinberg_build(m: int, n: int, spec: FieldSpec) -> SteinbergFamily:
    if m < 1 or n < 1:
        raise ValueError("m, n >= 1 required")
    grid = VarGrid(m, n)
    if m >= n:
        branch = "m_ge_n"
        L_cols = [(i, 0) for i in range(1, m + 1)]
        L0_cols = [(i, 0) for i in range(1, n + 1)]
    else:
        branch = "m_lt_n"
        L_cols = [(i, 0) for i in range(1, m + 1)] + [(m, t) for t in range(1, n - m + 1)]
        L0_cols = ([(i, 0) for i in range(1, m)] + [(m, n - m)]
                   + [(m, t) for t in range(0, n - m)])
    fam = SteinbergFamily(m, n, spec, grid, branch, L_cols, L0_cols, None, {})
    fam.ell0 = det_of_columns([fam.column(c) for c in L0_cols])
    if not fam.ell0:
        raise AssertionError("l_0 vanished")
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            fam.generators[(i, j)] = RatExpr(fam.lijk(i, j, 1), fam.ell0)
    return fam


def steinberg_lijk(fam: SteinbergFamily, i: int, j: int, k: int) -> SparsePoly:
    return fam.lijk(i, j, k)


def constant_generators(fam: SteinbergFamily) -> dict:
    """For m < n: value of l_ij/l_0 for m < i <= n (None if not constant)."""
    out = {}
    if fam.branch != "m_lt_n":
        return out
    for i in range(fam.m + 1, fam.n + 1):
        for j in range(1, fam.n + 1):
            val = RatExpr(fam.lijk(i, j, 1), fam.ell0).constant_value()
            out[(i, j)] = None if val is None else str(val)
    return out


def polynomiality(fam: SteinbergFamily) -> dict:
    """Whether each generator l_ij/l_0 is a polynomial (data only)."""
    out = {}
    for (i, j), g in sorted(fam.generators.items()):
        try:
            exact_div(g.num, g.den)
            out[f"{i},{j}"] = True
        except NotDivisible:
            out[f"{i},{j}"] = False
    return out


# ----------------------------------------------------------------------
# auxiliary sets
# ----------------------------------------------------------------------

def localizer_r(q: int, n: int) -> int:
    """Minimal positive r with r(q-1) >= n."""
    r = 1
    while r * (q - 1) < n:
        r += 1
    return r


@dataclass
class AuxSets:
    r: int
    exponent: int
    removed: tuple
    B: dict
    Bprime: dict
    D: dict
    Dprime: dict
    ell_localizer: SparsePoly | None


def localizer(fam: SteinbergFamily) -> SparsePoly:
    """l = l_0^(r(q-1)-n) * prod_i d_nn^(i), over copies 1..n."""
    if fam.m < fam.n:
        raise BranchUnsupported("the localizer needs n copies")
    r = localizer_r(fam.q, fam.n)
    out = fam.ell0 ** (r * (fam.q - 1) - fam.n)
    for i in range(1, fam.n + 1):
        out = out * dickson_d(fam.n, fam.n, i, fam.grid, fam.spec)
    return out


def aux_sets(fam: SteinbergFamily, removed=(1, 1)) -> AuxSets:
    i0, j0 = removed
    if not (1 <= i0 <= min(fam.m, fam.n) and 1 <= j0 <= fam.n):
        raise BadRemovedIndex(f"removed index {removed} needs i <= min(m,n) and j <= n")
    q, n = fam.q, fam.n
    r = localizer_r(q, n)
    scale = fam.ell0 ** (q - 2)
    D = {key: g.num for key, g in sorted(fam.generators.items())}
    B = {key: scale * v for key, v in D.items()}
    Dprime = {k: v for k, v in D.items() if k != (i0, j0)}
    Bprime = {k: v for k, v in B.items() if k != (i0, j0)}
    ell = localizer(fam) if fam.m >= n else None
    if ell is not None and not ell:
        raise AssertionError("localizer vanished")
    return AuxSets(r, r * (q - 1) - n, (i0, j0), B, Bprime, D, Dprime, ell)


# ----------------------------------------------------------------------
# pi specialization
# ----------------------------------------------------------------------

def pi_specialize(f: SparsePoly, m: int, n: int) -> SparsePoly:
    """Fix X_1..X_{m-1}, send X_m to X_m^(q^(n-m)) and X_{m+k} to X_m^(q^(k-1))."""
    if f.grid != VarGrid(n, n):
        raise GridMismatch(f"pi expects grid (n, n) = ({n}, {n}), got {f.grid!r}")
    if not 1 <= m < n:
        raise ValueError("pi needs 1 <= m < n")
    spec = f.spec
    target = VarGrid(m, n)
    images = {}
    for c in range(1, n + 1):
        if c < m:
            copy, t = c, 0
        elif c == m:
            copy, t = m, n - m
        else:
            copy, t = m, c - m - 1
        col = frob_column(spec, target, copy, t)
        for j in range(1, n + 1):
            images[(c, j)] = col[j - 1]
    return substitute(f, images, target)


# ----------------------------------------------------------------------
# identity suite
# ----------------------------------------------------------------------

IDENTITY_CLAIMS = (
    "cramer_21", "chain_24", "lemma_27", "prop32_membership", "cor25_n1",
    "thm33_rearrangement", "cor34_rearrangement", "pi_specialization",
)


def _need_m_ge_n(fam):
    if fam.m < fam.n:
        raise BranchUnsupported("this identity is stated for m >= n")


def _check_budget(q: int, top: int):
    if q**top > DEGREE_BUDGET:
        raise BudgetExceeded(f"q^{top} = {q**top} exceeds the degree budget {DEGREE_BUDGET}")


def _cramer_body(fam: SteinbergFamily, k: int):
    n, grid, spec = fam.n, fam.grid, fam.spec
    L0 = fam.L0
    dick = {(i, s): dickson_d(n, s, i, grid, spec) for i in range(1, n + 1) for s in range(n + 1)}

    def body(ctx):
        out = []
        e0 = ctx.lift(fam.ell0)
        for i in range(1, n + 1):
            target = frob_column(spec, grid, i, k)
            for r in range(n):
                lhs = ctx.zero
                for j in range(n):
                    lhs = ctx.add(lhs, ctx.mul(ctx.lift(L0[r, j]), ctx.lift(fam.lijk(i, j + 1, k))))
                out.append((f"cramer i={i} row={r + 1} k={k}", lhs,
                            ctx.mul(e0, ctx.lift(target[r]))))
        for i in range(1, n + 1):
            for s in range(n + 1):
                rows = [[ctx.lift(fam.lijk(i, j, kk)) for kk in range(n + 1) if kk != s]
                        for j in range(1, n + 1)]
                out.append((f"eq21 i={i} s={s}", ctx.det(rows),
                            ctx.mul(ctx.pow(e0, n - 1), ctx.lift(dick[(i, s)]))))
        return out

    q = fam.q
    bound = max(n + q**k, n * (n - 1) + sum(q**t for t in range(n + 1)))
    return body, bound


def _chain_body(fam: SteinbergFamily, k: int):
    n = fam.n

    def body(ctx):
        e0 = ctx.lift(fam.ell0)
        base = [[ctx.div(ctx.lift(fam.lijk(i, j, 1)), e0) for i in range(1, n + 1)]
                for j in range(1, n + 1)]
        prod = base
        for t in range(1, k):
            twisted = [[ctx.frob(x, t) for x in row] for row in base]
            prod = [[_dot(ctx, prod[r], [twisted[c2][c] for c2 in range(n)])
                     for c in range(n)] for r in range(n)]
        out = []
        for j in range(n):
            for i in range(n):
                lhs = ctx.div(ctx.lift(fam.lijk(i + 1, j + 1, k)), e0)
                out.append((f"chain k={k} entry=({j + 1},{i + 1})", lhs, prod[j][i]))
        return out

    q = fam.q
    S = sum(q**t for t in range(k))
    bound = max(n - 1 + q**k + S * n, S * (n - 1 + q) + n)
    return body, bound


def _dot(ctx, row, col):
    acc = ctx.zero
    for a, b in zip(row, col):
        acc = ctx.add(acc, ctx.mul(a, b))
    return acc


def _lemma27_body(fam: SteinbergFamily):
    n, q = fam.n, fam.q

    def body(ctx):
        rows = [[ctx.lift(x) for x in row] for row in fam.ell_matrix(1)]
        return [("lemma27", ctx.pow(ctx.lift(fam.ell0), q - 1 + n), ctx.det(rows))]

    return body, n * (q - 1 + n)


def _prop32_parts(fam: SteinbergFamily):
    n, q, grid, spec = fam.n, fam.q, fam.grid, fam.spec
    r = localizer_r(q, n)
    e = r * (q - 1) - n
    dnn = [dickson_d(n, n, i, grid, spec) for i in range(1, n + 1)]
    dns = {(i, s): dickson_d(n, s, i, grid, spec) for i in range(1, n + 1) for s in range(n)}
    cns = {key: exact_div(v, dnn[key[0] - 1]) for key, v in dns.items()}
    return r, e, dnn, dns, cns


def _prop32_body(fam: SteinbergFamily):
    n, q = fam.n, fam.q
    r, e, dnn, dns, cns = _prop32_parts(fam)

    def body(ctx):
        e0 = ctx.lift(fam.ell0)
        dl = [ctx.lift(d) for d in dnn]
        prod_all = ctx.one
        for d in dl:
            prod_all = ctx.mul(prod_all, d)
        ell = ctx.mul(ctx.pow(e0, e), prod_all)
        out = []
        for (i, s), c in sorted(cns.items()):
            others = ctx.one
            for j in range(n):
                if j != i - 1:
                    others = ctx.mul(others, dl[j])
            rhs = ctx.mul(ctx.mul(ctx.pow(e0, e), ctx.lift(dns[(i, s)])), others)
            out.append((f"c_ns*l i={i} s={s}", ctx.mul(ctx.lift(c), ell), rhs))
        out.append(("eq31", ctx.mul(ell, ctx.pow(e0, n)),
                    ctx.mul(ctx.pow(e0, r * (q - 1)), prod_all)))
        return out

    deg_d = sum(q**t for t in range(n))
    bound = (r * (q - 1)) * n + n * deg_d + sum(q**t for t in range(n + 1))
    return body, bound, r, e


def _prop32_gap(fam: SteinbergFamily, e: int) -> dict:
    """The l_ij/l_0 rewrite uses exponent e - 1; record when it is negative
    and whether l_0 divides l_ij * prod d_nn in that case."""
    info = {"rewrite_exponent": e - 1}
    if e - 1 >= 0:
        info["rewrite_polynomial"] = True
        return info
    prod = SparsePoly.one(fam.spec, fam.grid)
    for i in range(1, fam.n + 1):
        prod = prod * dickson_d(fam.n, fam.n, i, fam.grid, fam.spec)
    divisible = {}
    for (i, j), g in sorted(fam.generators.items()):
        if i > fam.n:
            continue
        try:
            exact_div(g.num * prod, fam.ell0)
            divisible[f"{i},{j}"] = True
        except NotDivisible:
            divisible[f"{i},{j}"] = False
    info["rewrite_polynomial"] = all(divisible.values())
    info["l0_divides_lij_prod_dnn"] = divisible
    return info


def _cor25_body(fam: SteinbergFamily):
    m, q, spec, grid = fam.m, fam.q, fam.spec, fam.grid

    def body(ctx):
        x11 = SparsePoly.var(spec, grid, 1, 1)
        out = []
        for i in range(1, m + 1):
            if i == 1:
                expected = RatExpr(x11 ** (q - 1))
                label = "x[1,1]^(q-1)"
            else:
                expected = RatExpr(SparsePoly.var(spec, grid, i, 1), x11)
                label = f"x[{i},1]/x[1,1]"
            out.append((f"gen ({i},1) vs {label}", fam.generators[(i, 1)], expected))
        return out

    return body


def _rearrangement(fam: SteinbergFamily, removed, use_b: bool):
    """Solve the Laplace expansion of det(l_ij) = l_0^(q-1+n) along the
    removed row for the removed entry, using only the kept generators."""
    n, q = fam.n, fam.q
    i0, j0 = removed
    aux = aux_sets(fam, removed)
    ctx = ExactContext(fam.spec, fam.grid)
    e0 = fam.ell0 ** (q - 1)
    if use_b:
        kept = {key: RatExpr(v, e0) for key, v in aux.Bprime.items() if key[0] <= n}
        total = RatExpr(e0)
        target = RatExpr(aux.B[(i0, j0)])
    else:
        kept = {key: RatExpr(v) for key, v in aux.Dprime.items() if key[0] <= n}
        total = RatExpr(fam.ell0 ** (q - 1 + n))
        target = RatExpr(aux.D[(i0, j0)])

    def cofactor(j):
        rows = [[kept[(i, jj)] for jj in range(1, n + 1) if jj != j]
                for i in range(1, n + 1) if i != i0]
        minor = ctx.det(rows) if rows else RatExpr(ctx.one)
        return minor if (i0 + j) % 2 == 0 else -minor

    pivot = cofactor(j0)
    if not pivot:
        raise ZeroCofactor(f"cofactor of {removed} vanishes")
    acc = total
    for j in range(1, n + 1):
        if j != j0:
            acc = acc - kept[(i0, j)] * cofactor(j)
    rebuilt = acc / pivot
    if use_b:
        rebuilt = rebuilt * RatExpr(e0)
    return target, rebuilt


def _pi_check(m: int, n: int, spec: FieldSpec) -> tuple[str, dict]:
    big = steinberg_build(n, n, spec)
    small = steinberg_build(m, n, spec)
    details = {}
    ok = True
    p0 = pi_specialize(big.ell0, m, n)
    if p0 == small.ell0:
        details["pi_l0"] = "equal"
    elif p0 == -small.ell0:
        details["pi_l0"] = "equal up to sign -1"
    else:
        details["pi_l0"] = "differs"
        ok = False
    details["pi_l0_nonzero"] = bool(p0)
    ok = ok and bool(p0)
    mism = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if pi_specialize(big.lijk(i, j, 1), m, n) != small.lijk(i, j, 1):
                mism.append(f"{i},{j}")
    details["pi_lij_mismatches"] = mism
    ok = ok and not mism
    if n >= 2:
        p_ell = pi_specialize(localizer(big), m, n)
        details["pi_localizer_nonzero"] = bool(p_ell)
        ok = ok and bool(p_ell)
    consts = constant_generators(small)
    details["constant_generators"] = {f"{i},{j}": v for (i, j), v in consts.items()}
    ok = ok and all(v is not None for v in consts.values())
    return ("pass" if ok else "fail"), details


def identity_check(name: str, params: dict) -> VerdictReport:
    """Run one named identity.  params: q, n, m and optionally k, mode
    (exact | prob), trials, seed, removed."""
    t0 = time.perf_counter()
    q = int(params["q"])
    n = int(params.get("n", 1))
    m = int(params.get("m", n))
    k = int(params.get("k", 1))
    mode = params.get("mode", "exact")
    if mode == "auto":
        mode = "exact"
    trials = int(params.get("trials", 20))
    seed = int(params.get("seed", 0))
    spec = field_for_q(q)
    norm = {"q": q, "n": n, "m": m}
    method = "exact" if mode == "exact" else "probabilistic"
    witness = None

    if name == "pi_specialization":
        _check_budget(q, n)
        verdict, details = _pi_check(m, n, spec)
        method = "exact"
    else:
        fam = steinberg_build(m, n, spec)
        guards = [fam.ell0]
        if name == "cramer_21":
            _need_m_ge_n(fam)
            _check_budget(q, max(n, k))
            norm["k"] = k
            body, bound = _cramer_body(fam, k)
            verdict, details, witness = run_identity(spec, fam.grid, body, bound, mode,
                                                     trials, seed, guards)
        elif name == "chain_24":
            _need_m_ge_n(fam)
            _check_budget(q, k)
            norm["k"] = k
            body, bound = _chain_body(fam, k)
            verdict, details, witness = run_identity(spec, fam.grid, body, bound, mode,
                                                     trials, seed, guards)
        elif name == "lemma_27":
            body, bound = _lemma27_body(fam)
            verdict, details, witness = run_identity(spec, fam.grid, body, bound, mode,
                                                     trials, seed, guards)
        elif name == "prop32_membership":
            _need_m_ge_n(fam)
            if n < 2:
                raise BranchUnsupported("the localizer statement needs n >= 2")
            body, bound, r, e = _prop32_body(fam)
            verdict, details, witness = run_identity(spec, fam.grid, body, bound, mode,
                                                     trials, seed, guards)
            details["r"] = r
            details["l0_exponent"] = e
            details["rewrite"] = _prop32_gap(fam, e)
        elif name == "cor25_n1":
            if n != 1:
                raise BranchUnsupported("cor25_n1 needs n = 1")
            verdict, details, witness = run_identity(spec, fam.grid, _cor25_body(fam), 1,
                                                     "exact")
            method = "exact"
            details["normalization"] = "generator (i,1) is matched with list entry i"
        elif name in ("thm33_rearrangement", "cor34_rearrangement"):
            removed = tuple(params.get("removed", (1, 1)))
            norm["removed"] = list(removed)
            method = "exact"
            try:
                target, rebuilt = _rearrangement(fam, removed, name.startswith("thm33"))
                ok = rat_equal_exact(target, rebuilt)
                verdict = "pass" if ok else "fail"
                details = {"removed": list(removed)}
                witness = None if ok else {"removed": list(removed)}
            except ZeroCofactor as exc:
                verdict, details = "fail", {"error": "ZeroCofactor", "message": str(exc)}
                witness = {"removed": list(removed)}
        else:
            raise ValueError(f"unknown claim {name!r}")
    if method != "exact":
        norm["trials"] = trials
    return VerdictReport(name, norm, method, verdict, seed=seed if method != "exact" else None,
                         witness=witness, details=details, elapsed=time.perf_counter() - t0)
