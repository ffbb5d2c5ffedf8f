"""GL/SL/Sp/U/O over small fields and their action on m copies of W.

Matrices are tuples of tuples of field codes.  The action on polynomials
is substitution of column vectors: x[i,j] -> sum_k s[j][k] * x[i,k],
i.e. X_i -> s.X_i for every copy i.  With this convention
act(s, act(t, f)) == act(t*s, f).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import (
    BudgetExceeded,
    CapExceeded,
    EvenCharForbidden,
    FormInvalid,
    NotInGroup,
    OddSizeAlternate,
    SizeMismatch,
)
from .gf import (
    FieldSpec,
    Matrix,
    format_matrix,
    identity,
    mat,
    mat_det,
    mat_inv,
    mat_map,
    mat_mul,
    parse_matrix,
    transpose,
)
from .mpoly import SparsePoly, VarGrid, _substitute_polys
from .ratexpr import RatExpr
from .rng import SplitMix64

ENUM_CAP = 10**6
SAMPLE_BUDGET = 10**7
GROUP_KINDS = ("GL", "SL", "Sp", "U", "O")
FORM_FOR_GROUP = {"Sp": "alternate", "U": "hermitian", "O": "symmetric"}


# ----------------------------------------------------------------------
# forms
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class FormMatrix:
    kind: str
    entries: Matrix
    spec: FieldSpec

    def __post_init__(self):
        object.__setattr__(self, "entries", mat(self.entries))
        validate_form(self)

    @property
    def size(self) -> int:
        return len(self.entries)

    def __str__(self) -> str:
        return format_matrix(self.spec, self.entries)


def validate_form(form: FormMatrix) -> None:
    spec, k = form.spec, form.entries
    n = len(k)
    if any(len(r) != n for r in k):
        raise FormInvalid("form matrix must be square")
    if form.kind not in ("alternate", "hermitian", "symmetric"):
        raise FormInvalid(f"unknown form kind {form.kind!r}")
    if form.kind in ("hermitian", "symmetric") and spec.p == 2:
        raise EvenCharForbidden(f"{form.kind} forms need odd characteristic")
    if mat_det(spec, k) == 0:
        raise FormInvalid("form matrix is singular")
    for i in range(n):
        for j in range(n):
            if form.kind == "alternate":
                if k[i][j] != spec.neg(k[j][i]) or (i == j and k[i][i]):
                    raise FormInvalid("alternate form needs k_ij = -k_ji and k_ii = 0")
            elif form.kind == "symmetric":
                if k[i][j] != k[j][i]:
                    raise FormInvalid("symmetric form needs k_ij = k_ji")
            else:
                if spec.e % 2:
                    raise FormInvalid("hermitian forms live over F_{q^2}")
                if k[i][j] != spec.conj(k[j][i]):
                    raise FormInvalid("hermitian form needs conj(h_ji) = h_ij")
    if form.kind == "alternate" and n % 2:
        raise OddSizeAlternate(f"alternate form of odd size {n}")


def standard_form(kind: str, size: int, spec: FieldSpec) -> FormMatrix:
    """alternate: [[0, I], [-I, 0]]; hermitian and symmetric: identity."""
    if kind == "alternate":
        if size % 2:
            raise OddSizeAlternate(f"alternate form of odd size {size}")
        h = size // 2
        minus_one = spec.neg(1)
        rows = [[0] * size for _ in range(size)]
        for i in range(h):
            rows[i][h + i] = 1
            rows[h + i][i] = minus_one
        return FormMatrix(kind, rows, spec)
    if kind in ("hermitian", "symmetric"):
        if spec.p == 2:
            raise EvenCharForbidden(f"{kind} forms need odd characteristic")
        return FormMatrix(kind, identity(size), spec)
    raise FormInvalid(f"unknown form kind {kind!r}")


def parse_form(kind: str, text: str, spec: FieldSpec) -> FormMatrix:
    return FormMatrix(kind, parse_matrix(spec, text), spec)


# ----------------------------------------------------------------------
# membership
# ----------------------------------------------------------------------

def conj_matrix(spec: FieldSpec, a: Matrix) -> Matrix:
    return mat_map(spec.conj, a)


def _default_form(group: str, size: int, spec: FieldSpec, form: FormMatrix | None):
    if group not in FORM_FOR_GROUP:
        return None
    if form is None:
        return standard_form(FORM_FOR_GROUP[group], size, spec)
    if form.kind != FORM_FOR_GROUP[group]:
        raise FormInvalid(f"{group} needs a {FORM_FOR_GROUP[group]} form, got {form.kind}")
    if form.size != size:
        raise SizeMismatch(f"form has size {form.size}, matrix has size {size}")
    return form


def is_member(t: Sequence[Sequence[int]], group: str, spec: FieldSpec,
              form: FormMatrix | None = None) -> bool:
    t = mat(t)
    n = len(t)
    if any(len(r) != n for r in t):
        raise SizeMismatch("matrix is not square")
    if group not in GROUP_KINDS:
        raise ValueError(f"unknown group {group!r}")
    form = _default_form(group, n, spec, form)
    d = mat_det(spec, t)
    if d == 0:
        return False
    if group == "GL":
        return True
    if group == "SL":
        return d == 1
    k = form.entries
    if group == "U":
        return mat_mul(spec, mat_mul(spec, t, k), transpose(conj_matrix(spec, t))) == k
    return mat_mul(spec, mat_mul(spec, t, k), transpose(t)) == k


class GroupElement:
    """Invertible matrix tagged with its group; membership checked on
    construction unless ``check`` is False."""

    __slots__ = ("matrix", "group", "spec", "form")

    def __init__(self, matrix, group: str, spec: FieldSpec, form: FormMatrix | None = None,
                 check: bool = True):
        self.matrix = mat(matrix)
        self.group = group
        self.spec = spec
        self.form = _default_form(group, len(self.matrix), spec, form)
        if check and not is_member(self.matrix, group, spec, self.form):
            raise NotInGroup(f"{format_matrix(spec, self.matrix)} is not in {group}")

    @property
    def size(self) -> int:
        return len(self.matrix)

    def det(self) -> int:
        return mat_det(self.spec, self.matrix)

    def __mul__(self, other: GroupElement) -> GroupElement:
        return GroupElement(mat_mul(self.spec, self.matrix, other.matrix), self.group,
                            self.spec, self.form, check=False)

    def inverse(self) -> GroupElement:
        return GroupElement(mat_inv(self.spec, self.matrix), self.group, self.spec,
                            self.form, check=False)

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupElement) and self.matrix == other.matrix \
            and self.spec == other.spec

    def __hash__(self) -> int:
        return hash(self.matrix)

    def __str__(self) -> str:
        return format_matrix(self.spec, self.matrix)

    def __repr__(self) -> str:
        return f"GroupElement({self.group}, {self})"


# ----------------------------------------------------------------------
# orders and enumeration
# ----------------------------------------------------------------------

def gl_order(n: int, q: int) -> int:
    out = 1
    for i in range(n):
        out *= q**n - q**i
    return out


def sl_order(n: int, q: int) -> int:
    return gl_order(n, q) // (q - 1)


def _span(spec: FieldSpec, rows: list[tuple[int, ...]], n: int) -> set:
    vecs = {tuple([0] * n)}
    for r in rows:
        new = set()
        for v in vecs:
            for c in spec.codes():
                new.add(tuple(spec.add(a, spec.mul(c, b)) for a, b in zip(v, r)))
        vecs = new
    return vecs


def iter_gl(n: int, spec: FieldSpec) -> Iterator[Matrix]:
    """All invertible n x n matrices, rows chosen outside the span of the
    previous rows; order follows the element enumeration order."""
    vectors = list(itertools.product(spec.codes(), repeat=n))

    def rec(prefix: list):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        span = _span(spec, prefix, n)
        for v in vectors:
            if v not in span:
                prefix.append(v)
                yield from rec(prefix)
                prefix.pop()

    yield from rec([])


def enumerate_group(group: str, size: int, spec: FieldSpec, form: FormMatrix | None = None,
                    cap: int = ENUM_CAP) -> list[GroupElement]:
    """Every element once.  SL/Sp/U/O are found by filtering GL, so the
    cap applies to |GL_size|."""
    work = gl_order(size, spec.q)
    if work > cap:
        raise CapExceeded(f"|GL_{size}(F_{spec.q})| = {work} exceeds cap {cap}")
    form = _default_form(group, size, spec, form)
    out = []
    for m in iter_gl(size, spec):
        if group == "GL" or is_member(m, group, spec, form):
            out.append(GroupElement(m, group, spec, form, check=False))
    if group == "GL":
        assert len(out) == gl_order(size, spec.q)
    elif group == "SL":
        assert len(out) == sl_order(size, spec.q)
    return out


def chunked(elements: Sequence, size: int) -> Iterator[Sequence]:
    for start in range(0, len(elements), size):
        yield elements[start:start + size]


# ----------------------------------------------------------------------
# sampling
# ----------------------------------------------------------------------

def _random_matrix(rng: SplitMix64, n: int, q: int) -> Matrix:
    return tuple(tuple(rng.below(q) for _ in range(n)) for _ in range(n))


def _random_gl(rng: SplitMix64, n: int, spec: FieldSpec) -> Matrix:
    while True:
        m = _random_matrix(rng, n, spec.q)
        if mat_det(spec, m):
            return m


def generator_set(group: str, form: FormMatrix) -> list[Matrix]:
    """Transvections for Sp, reflections for O; validated by is_member."""
    spec, k, n = form.spec, form.entries, form.size
    cands = []
    basis = [tuple(1 if i == a else 0 for i in range(n)) for a in range(n)]
    vecs = basis + [tuple(1 if i in (a, b) else 0 for i in range(n))
                    for a in range(n) for b in range(a + 1, n)]
    kt = transpose(k)
    for v in vecs:
        # B(x, v) = x^t K v; the column map is S = I + c * v v^t K^t and T = S^t
        vvk = mat_mul(spec, tuple((x,) for x in v), mat_mul(spec, (v,), kt))
        if group == "Sp":
            coeff = 1
        elif group == "O":
            bvv = mat_mul(spec, mat_mul(spec, (v,), k), tuple((x,) for x in v))[0][0]
            if not bvv:
                continue
            coeff = spec.neg(spec.mul(spec.scalar(2), spec.inv(bvv)))
        else:
            return []
        s = tuple(tuple(spec.add(1 if i == j else 0, spec.mul(coeff, vvk[i][j]))
                        for j in range(n)) for i in range(n))
        cands.append(transpose(s))
    return [g for g in cands if is_member(g, group, spec, form)]


def random_element(group: str, size: int, spec: FieldSpec, form: FormMatrix | None = None,
                   seed: int = 0, budget: int = SAMPLE_BUDGET, word_length: int = 32,
                   max_attempts: int = 100_000) -> GroupElement:
    rng = SplitMix64(seed)
    form = _default_form(group, size, spec, form)
    if group == "GL":
        return GroupElement(_random_gl(rng, size, spec), group, spec, check=False)
    if group == "SL":
        m = [list(r) for r in _random_gl(rng, size, spec)]
        dinv = spec.inv(mat_det(spec, m))
        m[0] = [spec.mul(dinv, x) for x in m[0]]
        return GroupElement(m, group, spec)
    if gl_order(size, spec.q) <= budget:
        for _ in range(max_attempts):
            m = _random_gl(rng, size, spec)
            if is_member(m, group, spec, form):
                return GroupElement(m, group, spec, form, check=False)
    gens = generator_set(group, form)
    if not gens:
        raise BudgetExceeded(f"no sample found for {group} and no generator set available")
    acc = identity(size)
    for _ in range(word_length):
        acc = mat_mul(spec, acc, rng.choice(gens))
    return GroupElement(acc, group, spec, form)


def sample_elements(group: str, size: int, spec: FieldSpec, count: int, seed: int = 0,
                    form: FormMatrix | None = None) -> list[GroupElement]:
    """``count`` samples; sample t uses seed + t."""
    return [random_element(group, size, spec, form, seed=seed + t) for t in range(count)]


# ----------------------------------------------------------------------
# action
# ----------------------------------------------------------------------

def substitution_images(s: Matrix, grid: VarGrid, spec: FieldSpec) -> list[SparsePoly]:
    n = grid.n
    images = []
    for i in range(1, grid.m + 1):
        for j in range(n):
            terms = {}
            for k in range(n):
                c = s[j][k]
                if c:
                    terms[grid.units[grid.index(i, k + 1)]] = c
            images.append(SparsePoly(spec, grid, terms))
    return images


def _matrix_of(sigma) -> Matrix:
    return sigma.matrix if isinstance(sigma, GroupElement) else mat(sigma)


def act(sigma, f):
    """X_i -> sigma.X_i for every copy; works on SparsePoly and RatExpr."""
    s = _matrix_of(sigma)
    if isinstance(f, RatExpr):
        return RatExpr(act(s, f.num), act(s, f.den))
    if len(s) != f.grid.n:
        raise SizeMismatch(f"{len(s)}x{len(s)} matrix on a grid with n={f.grid.n}")
    if not f.terms or s == identity(len(s)):
        return f
    return _substitute_polys(f, substitution_images(s, f.grid, f.spec), f.grid)


def act_product(sigmas: Sequence, f):
    """Block-diagonal action: copy i is moved by sigmas[i-1]."""
    if isinstance(f, RatExpr):
        return RatExpr(act_product(sigmas, f.num), act_product(sigmas, f.den))
    grid, spec = f.grid, f.spec
    if len(sigmas) != grid.m:
        raise SizeMismatch(f"{len(sigmas)} components for m={grid.m} copies")
    images = []
    for i, sigma in enumerate(sigmas, start=1):
        s = _matrix_of(sigma)
        if len(s) != grid.n:
            raise SizeMismatch("component size differs from grid n")
        images.extend(substitution_images(s, grid, spec)[(i - 1) * grid.n:i * grid.n])
    return _substitute_polys(f, images, grid)


def form_fixing_matrix(t) -> Matrix:
    """The substitution matrix that fixes form-built symbols for T in a
    group defined by T.F.(T^t) = F: the transpose of T."""
    return transpose(_matrix_of(t))
