"""Sparse multivariate polynomials over a FieldSpec in grid variables x[i,j].

A monomial is an exponent vector packed into one Python int: variable
number v = (i-1)*n + (j-1) owns bits [64v, 64v+64).  Multiplying
monomials is integer addition; the top bit of every field is a guard
that flags overflow (exponents must stay below 2^63) and makes
divisibility a single subtraction.

Term order is graded reverse lexicographic with x[1,1] > x[1,2] > ... >
x[m,n]; canonical iteration is descending in that order.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from .errors import (
    BadExponentArity,
    DivisionByZero,
    GridMismatch,
    MissingAssignment,
    NotDivisible,
    NotSquare,
    ParseError,
    SpecMismatch,
)
from .gf import FieldElement, FieldSpec

EXP_BITS = 64
_FIELD_MASK = (1 << EXP_BITS) - 1
_EXP_LIMIT = 1 << (EXP_BITS - 1)


class VarGrid:
    """Variables x[i,j], 1 <= i <= m (copy), 1 <= j <= n (coordinate)."""

    __slots__ = ("m", "n", "nvars", "guard", "units")

    def __init__(self, m: int, n: int):
        if m < 1 or n < 1:
            raise ValueError(f"grid needs m, n >= 1, got ({m}, {n})")
        self.m = m
        self.n = n
        self.nvars = m * n
        self.units = tuple(1 << (EXP_BITS * v) for v in range(self.nvars))
        self.guard = sum(u << (EXP_BITS - 1) for u in self.units)

    def __eq__(self, other) -> bool:
        return isinstance(other, VarGrid) and self.m == other.m and self.n == other.n

    def __hash__(self) -> int:
        return hash((self.m, self.n))

    def __repr__(self) -> str:
        return f"VarGrid(m={self.m}, n={self.n})"

    def index(self, i: int, j: int) -> int:
        if not (1 <= i <= self.m and 1 <= j <= self.n):
            raise IndexError(f"x[{i},{j}] is outside {self!r}")
        return (i - 1) * self.n + (j - 1)

    def var_name(self, v: int) -> tuple[int, int]:
        return divmod(v, self.n)[0] + 1, v % self.n + 1

    def pack(self, exps: Sequence[int]) -> int:
        if len(exps) != self.nvars:
            raise BadExponentArity(f"expected {self.nvars} exponents, got {len(exps)}")
        mono = 0
        for v, e in enumerate(exps):
            if e < 0 or e >= _EXP_LIMIT:
                raise BadExponentArity(f"exponent {e} out of range")
            mono |= e << (EXP_BITS * v)
        return mono

    def unpack(self, mono: int) -> list[int]:
        return [(mono >> (EXP_BITS * v)) & _FIELD_MASK for v in range(self.nvars)]

    def grevlex_key(self, mono: int) -> tuple:
        exps = self.unpack(mono)
        return (sum(exps), tuple(-e for e in reversed(exps)))


def _mono_degree(grid: VarGrid, mono: int) -> int:
    return sum(grid.unpack(mono))


def _check_overflow(grid: VarGrid, terms: Iterable[int]) -> None:
    guard = grid.guard
    for m in terms:
        if m & guard:
            raise OverflowError("monomial exponent exceeds 2^63 - 1")


class SparsePoly:
    """Immutable polynomial: ``terms`` maps packed monomials to nonzero
    coefficient codes.  Treat instances as values; never mutate terms."""

    __slots__ = ("spec", "grid", "terms", "_sorted", "_hash")

    def __init__(self, spec: FieldSpec, grid: VarGrid, terms: dict[int, int]):
        self.spec = spec
        self.grid = grid
        self.terms = terms
        self._sorted = None
        self._hash = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, spec: FieldSpec, grid: VarGrid) -> SparsePoly:
        return cls(spec, grid, {})

    @classmethod
    def constant(cls, spec: FieldSpec, grid: VarGrid, c=1) -> SparsePoly:
        code = spec.code(c)
        return cls(spec, grid, {0: code} if code else {})

    @classmethod
    def one(cls, spec: FieldSpec, grid: VarGrid) -> SparsePoly:
        return cls(spec, grid, {0: 1})

    @classmethod
    def var(cls, spec: FieldSpec, grid: VarGrid, i: int, j: int, power: int = 1) -> SparsePoly:
        return cls(spec, grid, {grid.units[grid.index(i, j)] * power: 1})

    # -- basic queries ----------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and 0 in self.terms)

    def constant_code(self) -> int:
        return self.terms.get(0, 0)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(_mono_degree(self.grid, m) for m in self.terms)

    def variables(self) -> set[int]:
        seen = 0
        for m in self.terms:
            seen |= m
        return {v for v in range(self.grid.nvars) if (seen >> (EXP_BITS * v)) & _FIELD_MASK}

    def sorted_terms(self) -> list[tuple[int, int]]:
        """(monomial, code) pairs in descending grevlex order."""
        if self._sorted is None:
            key = self.grid.grevlex_key
            self._sorted = sorted(self.terms.items(), key=lambda kv: key(kv[0]), reverse=True)
        return self._sorted

    def leading(self) -> tuple[int, int]:
        key = self.grid.grevlex_key
        m = max(self.terms, key=key)
        return m, self.terms[m]

    def exponent_terms(self) -> list[tuple[FieldElement, tuple[int, ...]]]:
        return [
            (FieldElement(self.spec, c), tuple(self.grid.unpack(m))) for m, c in self.sorted_terms()
        ]

    def __eq__(self, other) -> bool:
        if isinstance(other, SparsePoly):
            return self.spec == other.spec and self.grid == other.grid and self.terms == other.terms
        if isinstance(other, (int, FieldElement)):
            return self.is_constant() and self.constant_code() == self.spec.code(other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.spec.q, self.grid.m, self.grid.n, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"SparsePoly({to_canonical_string(self)})"

    def __str__(self) -> str:
        return to_canonical_string(self)

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> SparsePoly:
        if isinstance(other, SparsePoly):
            if other.spec != self.spec:
                raise SpecMismatch(f"{other.spec!r} != {self.spec!r}")
            if other.grid != self.grid:
                raise GridMismatch(f"{other.grid!r} != {self.grid!r}")
            return other
        if isinstance(other, (int, FieldElement)):
            return SparsePoly.constant(self.spec, self.grid, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return SparsePoly(self.spec, self.grid, _add_terms(self.spec, self.terms, other.terms, False))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return SparsePoly(self.spec, self.grid, _add_terms(self.spec, self.terms, other.terms, True))

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __neg__(self):
        neg = self.spec.neg
        return SparsePoly(self.spec, self.grid, {m: neg(c) for m, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, FieldElement)):
            return self.scale(self.spec.code(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return SparsePoly(self.spec, self.grid, _mul_terms(self.spec, self.grid, self.terms, other.terms))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        return poly_pow(self, k)

    def scale(self, code: int) -> SparsePoly:
        if code == 0:
            return SparsePoly(self.spec, self.grid, {})
        if code == 1:
            return self
        mul = self.spec.mul
        return SparsePoly(self.spec, self.grid, {m: mul(c, code) for m, c in self.terms.items()})


# ----------------------------------------------------------------------
# term-map kernels
# ----------------------------------------------------------------------

def _add_terms(spec: FieldSpec, a: dict, b: dict, subtract: bool) -> dict:
    out = dict(a)
    if spec.e == 1:
        p = spec.p
        for m, c in b.items():
            v = (out.get(m, 0) + (-c if subtract else c)) % p
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return out
    add, neg = spec.add, spec.neg
    for m, c in b.items():
        v = add(out.get(m, 0), neg(c) if subtract else c)
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def _mul_terms(spec: FieldSpec, grid: VarGrid, a: dict, b: dict) -> dict:
    if len(a) < len(b):
        a, b = b, a
    out: dict[int, int] = {}
    if not a or not b:
        return out
    if spec.e == 1 and spec.p == 2:
        for mb in b:
            for ma in a:
                m = ma + mb
                if m in out:
                    del out[m]
                else:
                    out[m] = 1
    elif spec.e == 1:
        p = spec.p
        get = out.get
        for mb, cb in b.items():
            for ma, ca in a.items():
                m = ma + mb
                out[m] = get(m, 0) + ca * cb
        out = {m: c % p for m, c in out.items() if c % p}
    else:
        add, mul = spec.add, spec.mul
        get = out.get
        for mb, cb in b.items():
            for ma, ca in a.items():
                m = ma + mb
                out[m] = add(get(m, 0), mul(ca, cb))
        out = {m: c for m, c in out.items() if c}
    _check_overflow(grid, out)
    return out


# ----------------------------------------------------------------------
# public operations
# ----------------------------------------------------------------------

def poly_build(spec: FieldSpec, grid: VarGrid, terms: Iterable[tuple[object, Sequence[int]]]) -> SparsePoly:
    """Merge (coefficient, exponent-vector) pairs into a canonical poly."""
    out: dict[int, int] = {}
    for coeff, exps in terms:
        code = spec.code(coeff)
        m = grid.pack(exps)
        v = spec.add(out.get(m, 0), code)
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return SparsePoly(spec, grid, out)


def poly_arith(op: str, f: SparsePoly, g: SparsePoly) -> SparsePoly:
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    raise ValueError(f"unknown op {op!r}")


def raise_variables(f: SparsePoly, e: int) -> SparsePoly:
    """Substitute x -> x^e for every variable; coefficients untouched."""
    if e == 1 or not f.terms:
        return f
    if e == 0:
        total = 0
        for c in f.terms.values():
            total = f.spec.add(total, c)
        return SparsePoly.constant(f.spec, f.grid, FieldElement(f.spec, total))
    if f.degree() * e >= _EXP_LIMIT:
        raise OverflowError("monomial exponent exceeds 2^63 - 1")
    return SparsePoly(f.spec, f.grid, {m * e: c for m, c in f.terms.items()})


def _frobenius_p(f: SparsePoly, k: int = 1) -> SparsePoly:
    """f^(p^k): coefficients c -> c^(p^k), exponents times p^k."""
    if k == 0:
        return f
    e = f.spec.p**k
    if f.degree() * e >= _EXP_LIMIT:
        raise OverflowError("monomial exponent exceeds 2^63 - 1")
    frob = f.spec.frob
    return SparsePoly(f.spec, f.grid, {m * e: frob(c, k) for m, c in f.terms.items()})


def frobenius_power_poly(f: SparsePoly, k: int) -> SparsePoly:
    """f^(q^k) with q the order of f's field."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return _frobenius_p(f, f.spec.e * k)


def poly_pow(f: SparsePoly, k: int) -> SparsePoly:
    """f^k using the base-p digits of k: f^(d*p^s) = (f^(p^s))^d and
    f^(p^s) is a term-wise map in characteristic p."""
    if k < 0:
        raise ValueError("negative exponent")
    if k == 0:
        return SparsePoly.one(f.spec, f.grid)
    if not f.terms:
        return f
    if len(f.terms) == 1:
        (m, c), = f.terms.items()
        if _mono_degree(f.grid, m) * k >= _EXP_LIMIT:
            raise OverflowError("monomial exponent exceeds 2^63 - 1")
        return SparsePoly(f.spec, f.grid, {m * k: f.spec.pow(c, k)})
    p = f.spec.p
    result = None
    base = f
    while k:
        k, digit = divmod(k, p)
        if digit:
            piece = base
            for _ in range(digit - 1):
                piece = piece * base
            result = piece if result is None else result * piece
        if k:
            base = _frobenius_p(base, 1)
    return result


def exact_div(f: SparsePoly, g: SparsePoly) -> SparsePoly:
    """h with f = g*h, by single-divisor reduction in grevlex order.

    When g divides f every leading term of the running remainder is
    divisible by LT(g), so the first non-divisible leading term proves
    that g does not divide f.
    """
    import heapq

    g = f._coerce(g)
    if not g.terms:
        raise DivisionByZero("division by the zero polynomial")
    spec, grid = f.spec, f.grid
    if g.is_constant():
        return f.scale(spec.inv(g.constant_code()))
    key = grid.grevlex_key
    lm_g, lc_g = g.leading()
    inv_lc = spec.inv(lc_g)
    guard = grid.guard
    rest = [(m, c) for m, c in g.terms.items() if m != lm_g]
    rem = dict(f.terms)
    heap = [(_neg_key(key(m)), m) for m in rem]
    heapq.heapify(heap)
    quot: dict[int, int] = {}
    mul, sub = spec.mul, spec.sub
    while rem:
        _, m = heapq.heappop(heap)
        c = rem.get(m)
        if c is None:
            continue
        diff = (m | guard) - lm_g
        if diff & guard != guard:
            raise NotDivisible("leading term of remainder is not divisible by LT(divisor)")
        t = diff ^ guard
        ct = mul(c, inv_lc)
        quot[t] = ct
        del rem[m]
        for mg, cg in rest:
            mm = t + mg
            old = rem.get(mm)
            v = sub(old or 0, mul(ct, cg))
            if v:
                rem[mm] = v
                if old is None:
                    heapq.heappush(heap, (_neg_key(key(mm)), mm))
            elif old is not None:
                del rem[mm]
    return SparsePoly(spec, grid, quot)


def _neg_key(k: tuple) -> tuple:
    deg, rest = k
    return (-deg, tuple(-x for x in rest))


def derivative(f: SparsePoly, i: int, j: int) -> SparsePoly:
    """Formal partial derivative d/dx[i,j]; p | exponent kills a term."""
    grid = f.grid
    v = grid.index(i, j)
    unit = grid.units[v]
    shift = EXP_BITS * v
    out = {}
    spec = f.spec
    for m, c in f.terms.items():
        e = (m >> shift) & _FIELD_MASK
        if e % spec.p:
            out[m - unit] = spec.mul(c, spec.scalar(e))
    return SparsePoly(spec, grid, out)


# ----------------------------------------------------------------------
# substitution and evaluation
# ----------------------------------------------------------------------

def _assignment_list(f: SparsePoly, assignment) -> list:
    grid = f.grid
    images = [None] * grid.nvars
    if isinstance(assignment, Mapping):
        for (i, j), val in assignment.items():
            images[grid.index(i, j)] = val
    else:
        seq = list(assignment)
        if len(seq) != grid.nvars:
            raise BadExponentArity(f"expected {grid.nvars} images, got {len(seq)}")
        images = seq
    return images


def substitute(f: SparsePoly, assignment, target_grid: VarGrid | None = None):
    """Ring homomorphism x[i,j] -> assignment[(i,j)].

    ``assignment`` is a mapping (i, j) -> SparsePoly | FieldElement | int,
    or a sequence indexed by variable number.  If every image is a scalar
    the result is a FieldElement, otherwise a SparsePoly.
    """
    images = _assignment_list(f, assignment)
    used = f.variables()
    for v in used:
        if images[v] is None:
            i, j = f.grid.var_name(v)
            raise MissingAssignment(f"no image for x[{i},{j}]")
    polys = [img for img in images if isinstance(img, SparsePoly)]
    spec = f.spec
    if not polys and target_grid is None:
        codes = [spec.code(img) if img is not None else 0 for img in images]
        return FieldElement(spec, evaluate(f, codes))
    grid = target_grid or polys[0].grid
    conv = []
    for img in images:
        if img is None:
            conv.append(None)
        elif isinstance(img, SparsePoly):
            if img.spec != spec:
                raise SpecMismatch(f"{img.spec!r} != {spec!r}")
            if img.grid != grid:
                raise GridMismatch("images live on different grids")
            conv.append(img)
        else:
            conv.append(SparsePoly.constant(spec, grid, img))
    return _substitute_polys(f, conv, grid)


def _substitute_polys(f: SparsePoly, images: list, grid: VarGrid) -> SparsePoly:
    spec = f.spec
    cache: dict[tuple[int, int], SparsePoly] = {}
    nv = f.grid.nvars
    acc: dict[int, int] = {}
    for mono, c in f.terms.items():
        term = {0: c}
        for v in range(nv):
            e = (mono >> (EXP_BITS * v)) & _FIELD_MASK
            if not e:
                continue
            pw = cache.get((v, e))
            if pw is None:
                pw = poly_pow(images[v], e)
                cache[(v, e)] = pw
            term = _mul_terms(spec, grid, term, pw.terms)
            if not term:
                break
        if term:
            acc = _add_terms(spec, acc, term, False) if acc else term
    return SparsePoly(spec, grid, acc)


def evaluate(f: SparsePoly, values: Sequence[int], field: FieldSpec | None = None,
             embed: Sequence[int] | None = None) -> int:
    """Value of f at a point given by codes in ``field`` (default f.spec).

    ``embed`` maps f's coefficient codes into ``field``.
    """
    field = field or f.spec
    nv = f.grid.nvars
    add, mul, pw = field.add, field.mul, field.pow
    total = 0
    for mono, c in f.terms.items():
        cv = embed[c] if embed is not None else c
        for v in range(nv):
            e = (mono >> (EXP_BITS * v)) & _FIELD_MASK
            if e:
                x = values[v]
                if x == 0:
                    cv = 0
                    break
                cv = mul(cv, pw(x, e))
        if cv:
            total = add(total, cv)
    return total


# ----------------------------------------------------------------------
# matrices and determinants
# ----------------------------------------------------------------------

class PolyMatrix:
    """Rectangular matrix of SparsePoly sharing one spec and grid."""

    __slots__ = ("rows", "nrows", "ncols", "spec", "grid")

    def __init__(self, rows: Sequence[Sequence[SparsePoly]]):
        rows = tuple(tuple(r) for r in rows)
        if not rows or not rows[0]:
            raise ValueError("empty matrix")
        ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged matrix")
        spec, grid = rows[0][0].spec, rows[0][0].grid
        for r in rows:
            for x in r:
                if x.spec != spec:
                    raise SpecMismatch("entries over different fields")
                if x.grid != grid:
                    raise GridMismatch("entries on different grids")
        self.rows = rows
        self.nrows = len(rows)
        self.ncols = ncols
        self.spec = spec
        self.grid = grid

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence[SparsePoly]]) -> PolyMatrix:
        return cls(list(zip(*cols)))

    def __getitem__(self, rc):
        r, c = rc
        return self.rows[r][c]

    def column(self, c: int) -> tuple[SparsePoly, ...]:
        return tuple(r[c] for r in self.rows)

    def transpose(self) -> PolyMatrix:
        return PolyMatrix(list(zip(*self.rows)))

    def __matmul__(self, other: PolyMatrix) -> PolyMatrix:
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        zero = SparsePoly.zero(self.spec, self.grid)
        out = []
        for r in self.rows:
            row = []
            for c in range(other.ncols):
                acc = zero
                for k in range(self.ncols):
                    if r[k] and other.rows[k][c]:
                        acc = acc + r[k] * other.rows[k][c]
                row.append(acc)
            out.append(row)
        return PolyMatrix(out)

    def map(self, fn) -> PolyMatrix:
        return PolyMatrix([[fn(x) for x in r] for r in self.rows])

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyMatrix) and self.rows == other.rows

    def __repr__(self) -> str:
        return f"PolyMatrix({self.nrows}x{self.ncols})"


def cofactor_det(rows: Sequence[Sequence], zero, one):
    """Laplace expansion down the rows, memoized on the column set.

    Works for any entries supporting +, -, * and truthiness (zero test).
    """
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise NotSquare(f"{n}x{len(rows[0]) if rows else 0} matrix")
    if n == 0:
        return one
    memo: dict[int, object] = {}

    def minor(mask: int):
        r = n - bin(mask).count("1")
        if r == n:
            return one
        hit = memo.get(mask)
        if hit is not None:
            return hit
        total = zero
        pos = 0
        for c in range(n):
            if not mask >> c & 1:
                continue
            a = rows[r][c]
            if a:
                sub = minor(mask & ~(1 << c))
                if sub:
                    term = a * sub
                    total = total + term if pos % 2 == 0 else total - term
            pos += 1
        memo[mask] = total
        return total

    return minor((1 << n) - 1)


def bareiss_det(rows: Sequence[Sequence[SparsePoly]]) -> SparsePoly:
    """Fraction-free elimination; every division is exact by theory."""
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise NotSquare(f"{n}x{len(rows[0]) if rows else 0} matrix")
    a = [list(r) for r in rows]
    spec, grid = a[0][0].spec, a[0][0].grid
    negate = False
    prev = SparsePoly.one(spec, grid)
    for k in range(n - 1):
        if not a[k][k]:
            piv = next((r for r in range(k + 1, n) if a[r][k]), None)
            if piv is None:
                return SparsePoly.zero(spec, grid)
            a[k], a[piv] = a[piv], a[k]
            negate = not negate
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            for j in range(k + 1, n):
                num = a[i][j] * akk - aik * a[k][j]
                if prev.is_constant():
                    a[i][j] = num.scale(spec.inv(prev.constant_code()))
                else:
                    try:
                        a[i][j] = exact_div(num, prev)
                    except NotDivisible as exc:  # pragma: no cover - theory says unreachable
                        raise AssertionError("inexact Bareiss step") from exc
            a[i][k] = SparsePoly.zero(spec, grid)
        prev = akk
    det = a[n - 1][n - 1]
    return -det if negate else det


def determinant(m, strategy: str = "auto") -> SparsePoly:
    """Exact determinant: cofactor expansion up to 4x4, Bareiss above."""
    rows = m.rows if isinstance(m, PolyMatrix) else tuple(tuple(r) for r in m)
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise NotSquare(f"{n}x{len(rows[0]) if rows else 0} matrix")
    if strategy == "auto":
        strategy = "cofactor" if n <= 4 else "bareiss"
    spec, grid = rows[0][0].spec, rows[0][0].grid
    if strategy == "cofactor":
        return cofactor_det(rows, SparsePoly.zero(spec, grid), SparsePoly.one(spec, grid))
    if strategy == "bareiss":
        return bareiss_det(rows)
    raise ValueError(f"unknown strategy {strategy!r}")


# ----------------------------------------------------------------------
# canonical text
# ----------------------------------------------------------------------

def _format_coeff(spec: FieldSpec, c: int, constant: bool) -> str:
    text = spec.format(c)
    if not constant and "+" in text:
        return f"({text})"
    return text


def to_canonical_string(f: SparsePoly) -> str:
    if not f.terms:
        return "0"
    grid = f.grid
    out = []
    for mono, c in f.sorted_terms():
        exps = grid.unpack(mono)
        factors = []
        for v, e in enumerate(exps):
            if e:
                i, j = grid.var_name(v)
                factors.append(f"x[{i},{j}]" if e == 1 else f"x[{i},{j}]^{e}")
        if not factors:
            out.append(_format_coeff(f.spec, c, True))
        elif c == 1:
            out.append("*".join(factors))
        else:
            out.append(_format_coeff(f.spec, c, False) + "*" + "*".join(factors))
    return " + ".join(out)


def parse_poly(text: str, spec: FieldSpec, grid: VarGrid) -> SparsePoly:
    """Inverse of :func:`to_canonical_string` (order of terms is free)."""
    text = text.strip()
    if text == "0":
        return SparsePoly.zero(spec, grid)
    acc: dict[int, int] = {}
    for term in text.split(" + "):
        coeff_parts, exps = [], [0] * grid.nvars
        depth = 0
        pieces, cur = [], ""
        for ch in term:
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            if ch == "*" and depth == 0:
                pieces.append(cur)
                cur = ""
            else:
                cur += ch
        pieces.append(cur)
        for piece in pieces:
            piece = piece.strip()
            if piece.startswith("x["):
                body, _, power = piece.partition("^")
                try:
                    i, j = (int(s) for s in body[2:-1].split(","))
                    e = int(power) if power else 1
                except ValueError:
                    raise ParseError(f"bad variable factor {piece!r}") from None
                try:
                    exps[grid.index(i, j)] += e
                except IndexError as exc:
                    raise ParseError(str(exc)) from None
            else:
                coeff_parts.append(piece)
        code = spec.parse("*".join(coeff_parts)) if coeff_parts else 1
        m = grid.pack(exps)
        v = spec.add(acc.get(m, 0), code)
        if v:
            acc[m] = v
        else:
            acc.pop(m, None)
    return SparsePoly(spec, grid, acc)
