"""Exact arithmetic in small finite fields F_{p^e}.

Elements are coefficient vectors (a_0, ..., a_{e-1}) in the polynomial
basis 1, t, ..., t^{e-1} modulo a fixed monic irreducible.  Internally a
vector is packed into the integer ``a_0 + a_1*p + ... + a_{e-1}*p^{e-1}``;
that integer ("code") is what the polynomial layer stores as a
coefficient.  :class:`FieldElement` wraps a code together with its
:class:`FieldSpec` for user-facing code.

Multiplication in extension fields goes through discrete log/antilog
tables that are built lazily from the coefficient representation; they
are a cache, the representation itself never changes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterator, Sequence

from .errors import (
    CapExceeded,
    DegreeOutOfRange,
    DivisionByZero,
    NotPrime,
    ParseError,
    SpecMismatch,
)

FIELD_CAP = 1 << 16


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


# ----------------------------------------------------------------------
# polynomials over F_p as coefficient lists, low degree first
# ----------------------------------------------------------------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _polymod(a: Sequence[int], mod: Sequence[int], p: int) -> list[int]:
    a = list(a)
    dm = len(mod) - 1
    inv_lead = pow(mod[-1], p - 2, p)
    _trim(a)
    while len(a) - 1 >= dm and a:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for k, mk in enumerate(mod):
            a[shift + k] = (a[shift + k] - c * mk) % p
        _trim(a)
    return a


def _is_irreducible(mod: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    e = len(mod) - 1
    if e == 1:
        return True
    for d in range(1, e // 2 + 1):
        for low in product(range(p), repeat=d):
            if not _polymod(mod, list(low) + [1], p):
                return False
    return True


@lru_cache(maxsize=None)
def smallest_irreducible(p: int, e: int) -> tuple[int, ...]:
    """Monic irreducible of degree e, lexicographically smallest with
    coefficients compared low degree first."""
    for low in product(range(p), repeat=e):
        mod = list(low) + [1]
        if e > 1 and mod[0] == 0:
            continue
        if _is_irreducible(mod, p):
            return tuple(mod)
    raise AssertionError(f"no irreducible polynomial of degree {e} over F_{p}")


class FieldSpec:
    """The field F_{p^e} with a fixed defining modulus.

    Instances are immutable and cached per (p, e) by :func:`make_field`.
    """

    __slots__ = ("p", "e", "modulus", "q", "_log", "_exp", "_add", "_digits")

    def __init__(self, p: int, e: int, modulus: tuple[int, ...]):
        self.p = p
        self.e = e
        self.modulus = modulus
        self.q = p**e
        self._log: list[int] | None = None
        self._exp: list[int] | None = None
        self._add: list[list[int]] | None = None
        self._digits: list[tuple[int, ...]] | None = None

    def __repr__(self) -> str:
        if self.e == 1:
            return f"FieldSpec(F_{self.p})"
        return f"FieldSpec(F_{self.p}^{self.e}, modulus={format_modulus(self.modulus)})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FieldSpec)
            and self.p == other.p
            and self.e == other.e
            and self.modulus == other.modulus
        )

    def __hash__(self) -> int:
        return hash((self.p, self.e, self.modulus))

    def __reduce__(self):
        return (make_field, (self.p, self.e))

    @property
    def is_prime_field(self) -> bool:
        return self.e == 1

    # -- codes <-> coefficient vectors --------------------------------
    def digits(self, a: int) -> tuple[int, ...]:
        if self.e == 1:
            return (a,)
        if self._digits is None:
            table = []
            for code in range(self.q):
                v, out = code, []
                for _ in range(self.e):
                    v, r = divmod(v, self.p)
                    out.append(r)
                table.append(tuple(out))
            self._digits = table
        return self._digits[a]

    def from_digits(self, coeffs: Sequence[int]) -> int:
        if len(coeffs) > self.e:
            coeffs = _polymod(coeffs, self.modulus, self.p)
        v = 0
        for c in reversed(list(coeffs)):
            v = v * self.p + (c % self.p)
        return v

    # -- arithmetic on codes ------------------------------------------
    def add(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        if self._add is not None:
            return self._add[a][b]
        if self.q <= 256:
            self._build_add()
            return self._add[a][b]
        da, db = self.digits(a), self.digits(b)
        p = self.p
        v = 0
        for x, y in zip(reversed(da), reversed(db)):
            v = v * p + (x + y) % p
        return v

    def _build_add(self) -> None:
        table = []
        p, e = self.p, self.e
        for a in range(self.q):
            da = self.digits(a)
            row = []
            for b in range(self.q):
                db = self.digits(b)
                v = 0
                for k in range(e - 1, -1, -1):
                    v = v * p + (da[k] + db[k]) % p
                row.append(v)
            table.append(row)
        self._add = table

    def neg(self, a: int) -> int:
        if self.e == 1:
            return -a % self.p
        if self.p == 2:
            return a
        p = self.p
        v = 0
        for x in reversed(self.digits(a)):
            v = v * p + (-x) % p
        return v

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def _mul_slow(self, a: int, b: int) -> int:
        if self.p == 2:
            # carry-less product of bit vectors, then reduce
            prod = 0
            while b:
                if b & 1:
                    prod ^= a
                a <<= 1
                b >>= 1
            modbits = sum(1 << k for k, c in enumerate(self.modulus) if c)
            for k in range(prod.bit_length() - 1, self.e - 1, -1):
                if prod >> k & 1:
                    prod ^= modbits << (k - self.e)
            return prod
        da, db = self.digits(a), self.digits(b)
        prod = [0] * (2 * self.e - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] += x * y
        return self.from_digits(_polymod(prod, self.modulus, self.p))

    def _times_t(self, a: int) -> int:
        """a * t, by shifting the coefficient vector and reducing."""
        d = list(self.digits(a))
        top = d[-1]
        d = [0] + d[:-1]
        if top:
            d = [(x - top * m) % self.p for x, m in zip(d, self.modulus)]
        return self.from_digits(d)

    def _pow_slow(self, a: int, k: int) -> int:
        r = 1
        while k:
            if k & 1:
                r = self._mul_slow(r, a)
            a = self._mul_slow(a, a)
            k >>= 1
        return r

    def _build_log(self) -> None:
        q = self.q
        order = q - 1
        primes, n, d = [], order, 2
        while d * d <= n:
            if n % d == 0:
                primes.append(d)
                while n % d == 0:
                    n //= d
            d += 1
        if n > 1:
            primes.append(n)
        t = self.p  # code of the basis element t
        for g in [t] + [c for c in range(2, q) if c != t]:
            if all(self._pow_slow(g, order // r) != 1 for r in primes):
                break
        else:
            raise AssertionError("multiplicative group is not cyclic")
        step = self._times_t if g == t and self.p != 2 else (lambda x: self._mul_slow(x, g))
        exp = [1] * order
        x = 1
        for k in range(1, order):
            x = step(x)
            exp[k] = x
        log = [0] * q
        for k, v in enumerate(exp):
            log[v] = k
        self._exp = exp + exp
        self._log = log

    def mul(self, a: int, b: int) -> int:
        if self.e == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        if self._log is None:
            self._build_log()
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("zero has no inverse")
        if self.e == 1:
            return pow(a, self.p - 2, self.p)
        if self._log is None:
            self._build_log()
        return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]

    def pow(self, a: int, k: int) -> int:
        if k == 0:
            return 1
        if a == 0:
            return 0
        if self.e == 1:
            return pow(a, k % (self.p - 1) or (self.p - 1), self.p) if k > 0 else pow(self.inv(a), -k, self.p)
        if self._log is None:
            self._build_log()
        return self._exp[(self._log[a] * k) % (self.q - 1)]

    def frob(self, a: int, k: int = 1) -> int:
        """a^(p^k)."""
        if self.e == 1 or a == 0:
            return a
        return self.pow(a, self.p ** (k % self.e))

    def conj(self, a: int) -> int:
        """a -> a^r where r^2 = q; the involution of F_{r^2} over F_r."""
        if self.e % 2:
            raise SpecMismatch(f"{self!r} is not a quadratic extension")
        return self.frob(a, self.e // 2)

    def scalar(self, c: int) -> int:
        """Code of the prime-field element c mod p."""
        return c % self.p

    # -- conversion -----------------------------------------------------
    def element(self, value) -> FieldElement:
        if isinstance(value, FieldElement):
            if value.spec != self:
                raise SpecMismatch(f"{value!r} is not in {self!r}")
            return value
        if isinstance(value, str):
            return FieldElement(self, self.parse(value))
        return FieldElement(self, self.scalar(int(value)))

    def code(self, value) -> int:
        """Code of an int (prime-subfield scalar), FieldElement or text."""
        if isinstance(value, FieldElement):
            if value.spec != self:
                raise SpecMismatch(f"{value!r} is not in {self!r}")
            return value.code
        if isinstance(value, str):
            return self.parse(value)
        return self.scalar(int(value))

    def format(self, a: int) -> str:
        if self.e == 1:
            return str(a)
        parts = []
        for k, c in enumerate(self.digits(a)):
            if c == 0:
                continue
            if k == 0:
                parts.append(str(c))
            else:
                mono = "t" if k == 1 else f"t^{k}"
                parts.append(mono if c == 1 else f"{c}*{mono}")
        return "+".join(parts) if parts else "0"

    def parse(self, text: str) -> int:
        text = text.strip()
        if text.startswith("(") and text.endswith(")"):
            text = text[1:-1]
        if self.e == 1:
            try:
                v = int(text)
            except ValueError:
                raise ParseError(f"bad prime-field element {text!r}") from None
            if not 0 <= v < self.p:
                raise ParseError(f"{v} is not in 0..{self.p - 1}")
            return v
        coeffs = [0] * self.e
        for part in text.split("+"):
            part = part.strip()
            if not part:
                raise ParseError(f"bad element {text!r}")
            if "t" not in part:
                deg, c = 0, part
            else:
                c, _, mono = part.rpartition("*") if "*" in part else ("1", "", part)
                if mono == "t":
                    deg = 1
                elif mono.startswith("t^"):
                    deg = int(mono[2:])
                else:
                    raise ParseError(f"bad monomial {mono!r} in {text!r}")
            try:
                cv = int(c)
            except ValueError:
                raise ParseError(f"bad coefficient in {text!r}") from None
            if not 0 <= deg < self.e or not 0 <= cv < self.p:
                raise ParseError(f"term {part!r} out of range")
            coeffs[deg] = (coeffs[deg] + cv) % self.p
        return self.from_digits(coeffs)

    def codes(self) -> list[int]:
        """Codes of all elements in coefficient-vector lexicographic order
        (a_0 compared first)."""
        if self.e == 1:
            return list(range(self.p))
        return [self.from_digits(v) for v in product(range(self.p), repeat=self.e)]


def format_modulus(mod: Sequence[int]) -> str:
    parts = []
    for k in range(len(mod) - 1, -1, -1):
        c = mod[k]
        if c == 0:
            continue
        mono = "" if k == 0 else ("t" if k == 1 else f"t^{k}")
        if not mono:
            parts.append(str(c))
        else:
            parts.append(mono if c == 1 else f"{c}*{mono}")
    return "+".join(parts)


@lru_cache(maxsize=None)
def _make_field(p: int, e: int) -> FieldSpec:
    return FieldSpec(p, e, smallest_irreducible(p, e))


def make_field(p: int, e: int = 1, cap: int = FIELD_CAP) -> FieldSpec:
    """Build F_{p^e}; the same (p, e) always yields the same spec."""
    if not isinstance(p, int) or not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if not isinstance(e, int) or e < 1:
        raise DegreeOutOfRange(f"extension degree must be >= 1, got {e}")
    if p**e > cap:
        raise CapExceeded(f"p^e = {p}^{e} exceeds the field cap {cap}")
    return _make_field(p, e)


@dataclass(frozen=True, slots=True)
class FieldElement:
    spec: FieldSpec
    code: int

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.spec.digits(self.code)

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.spec != self.spec:
                raise SpecMismatch(f"{other.spec!r} != {self.spec!r}")
            return other.code
        if isinstance(other, int):
            return self.spec.scalar(other)
        return NotImplemented

    def __add__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.spec, self.spec.add(self.code, b))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.spec, self.spec.sub(self.code, b))

    def __rsub__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.spec, self.spec.sub(b, self.code))

    def __neg__(self):
        return FieldElement(self.spec, self.spec.neg(self.code))

    def __mul__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.spec, self.spec.mul(self.code, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.spec, self.spec.mul(self.code, self.spec.inv(b)))

    def __pow__(self, k: int):
        return FieldElement(self.spec, self.spec.pow(self.code, k))

    def __bool__(self) -> bool:
        return self.code != 0

    def __eq__(self, other) -> bool:
        if isinstance(other, FieldElement):
            return self.spec == other.spec and self.code == other.code
        if isinstance(other, int):
            return self.code == self.spec.scalar(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.spec.q, self.code))

    def __str__(self) -> str:
        return self.spec.format(self.code)

    def __repr__(self) -> str:
        return f"FieldElement({self.spec.format(self.code)} in F_{self.spec.q})"


def _same(a: FieldElement, b: FieldElement) -> None:
    if a.spec != b.spec:
        raise SpecMismatch(f"{a.spec!r} != {b.spec!r}")


def arith(op: str, a: FieldElement, b: FieldElement) -> FieldElement:
    _same(a, b)
    spec = a.spec
    if op == "add":
        return FieldElement(spec, spec.add(a.code, b.code))
    if op == "sub":
        return FieldElement(spec, spec.sub(a.code, b.code))
    if op == "mul":
        return FieldElement(spec, spec.mul(a.code, b.code))
    raise ValueError(f"unknown op {op!r}")


def invert(a: FieldElement) -> FieldElement:
    return FieldElement(a.spec, a.spec.inv(a.code))


def frobenius_power(a: FieldElement, k: int, base: str = "p") -> FieldElement:
    """a^(p^k) for base "p", a^(q^k) for base "q" (q the field order)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    spec = a.spec
    if base == "p":
        return FieldElement(spec, spec.frob(a.code, k))
    if base == "q":
        return a  # x^q = x on F_q
    raise ValueError(f"base must be 'p' or 'q', got {base!r}")


def conjugate(a: FieldElement) -> FieldElement:
    return FieldElement(a.spec, a.spec.conj(a.code))


def enumerate_elements(spec: FieldSpec) -> list[FieldElement]:
    return [FieldElement(spec, c) for c in spec.codes()]


def iter_nonzero(spec: FieldSpec) -> Iterator[int]:
    return (c for c in spec.codes() if c)


@lru_cache(maxsize=None)
def embedding(small: FieldSpec, big: FieldSpec) -> tuple[int, ...]:
    """Code map F_small -> F_big sending t to the smallest root of the
    small modulus.  Requires the same characteristic and small.e | big.e."""
    if small.p != big.p or big.e % small.e:
        raise SpecMismatch(f"{small!r} does not embed in {big!r}")
    if small.e == 1:
        return tuple(range(small.p))
    mod = small.modulus
    root = None
    for cand in big.codes():
        acc = 0
        for c in reversed(mod):
            acc = big.add(big.mul(acc, cand), big.scalar(c))
        if acc == 0:
            root = cand
            break
    assert root is not None
    powers = [1]
    for _ in range(small.e - 1):
        powers.append(big.mul(powers[-1], root))
    table = []
    for code in range(small.q):
        acc = 0
        for c, w in zip(small.digits(code), powers):
            if c:
                acc = big.add(acc, big.mul(big.scalar(c), w))
        table.append(acc)
    return tuple(table)


# ----------------------------------------------------------------------
# dense matrices of codes
# ----------------------------------------------------------------------

Matrix = tuple[tuple[int, ...], ...]


def mat(rows) -> Matrix:
    return tuple(tuple(r) for r in rows)


def identity(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a)) if a else ()


def mat_mul(spec: FieldSpec, a: Matrix, b: Matrix) -> Matrix:
    add, mul = spec.add, spec.mul
    bt = transpose(b)
    out = []
    for row in a:
        new = []
        for col in bt:
            acc = 0
            for x, y in zip(row, col):
                if x and y:
                    acc = add(acc, mul(x, y))
            new.append(acc)
        out.append(tuple(new))
    return tuple(out)


def mat_map(fn, a: Matrix) -> Matrix:
    return tuple(tuple(fn(x) for x in row) for row in a)


def _echelon(spec: FieldSpec, a) -> tuple[list[list[int]], int, int]:
    """Row-reduce a copy; returns (rows, rank, det-sign-and-pivots product)."""
    rows = [list(r) for r in a]
    nr = len(rows)
    nc = len(rows[0]) if rows else 0
    rank, det = 0, 1
    for col in range(nc):
        piv = next((r for r in range(rank, nr) if rows[r][col]), None)
        if piv is None:
            det = 0
            continue
        if piv != rank:
            rows[rank], rows[piv] = rows[piv], rows[rank]
            det = spec.neg(det)
        pv = rows[rank][col]
        det = spec.mul(det, pv)
        inv = spec.inv(pv)
        prow = rows[rank]
        for r in range(rank + 1, nr):
            f = rows[r][col]
            if f:
                f = spec.mul(f, inv)
                rows[r] = [spec.sub(x, spec.mul(f, y)) for x, y in zip(rows[r], prow)]
        rank += 1
    return rows, rank, det


def mat_det(spec: FieldSpec, a: Matrix) -> int:
    if len(a) != (len(a[0]) if a else 0):
        raise ValueError("determinant of a non-square matrix")
    _, rank, det = _echelon(spec, a)
    return det if rank == len(a) else 0


def mat_rank(spec: FieldSpec, a) -> int:
    if not a:
        return 0
    return _echelon(spec, a)[1]


def mat_inv(spec: FieldSpec, a: Matrix) -> Matrix:
    n = len(a)
    aug = [list(a[i]) + [1 if i == j else 0 for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            raise DivisionByZero("singular matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = spec.inv(aug[col][col])
        aug[col] = [spec.mul(inv, x) for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [spec.sub(x, spec.mul(f, y)) for x, y in zip(aug[r], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)


def format_matrix(spec: FieldSpec, a: Matrix) -> str:
    """Rows separated by ';', entries by ','."""
    return ";".join(",".join(spec.format(x) for x in row) for row in a)


def parse_matrix(spec: FieldSpec, text: str) -> Matrix:
    rows = []
    for row in text.strip().split(";"):
        rows.append(tuple(spec.parse(x) for x in row.split(",")))
    if len({len(r) for r in rows}) != 1:
        raise ParseError(f"ragged matrix {text!r}")
    return tuple(rows)
