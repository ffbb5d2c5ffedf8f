"""Rational expressions num/den over SparsePoly.

Nothing is ever reduced by a GCD.  Equality is semantic: exact
cross-multiplication, or random evaluation in an extension field large
enough for the Schwartz-Zippel bound.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from dataclasses import field as dc_field

from .errors import DegreeBoundOverflow, SpecMismatch, ZeroDenominator
from .gf import FIELD_CAP, FieldElement, FieldSpec, embedding, make_field
from .mpoly import SparsePoly, derivative, evaluate, frobenius_power_poly, poly_pow
from .rng import SplitMix64, derive

TERM_CAP = 10**6
DEFAULT_TRIALS = 20


class RatExpr:
    __slots__ = ("num", "den")

    def __init__(self, num: SparsePoly, den: SparsePoly | None = None):
        if den is None:
            den = SparsePoly.one(num.spec, num.grid)
        if not den:
            raise ZeroDenominator("denominator is the zero polynomial")
        if num.spec != den.spec or num.grid != den.grid:
            raise SpecMismatch("numerator and denominator disagree on spec/grid")
        self.num = num
        self.den = den

    @property
    def spec(self) -> FieldSpec:
        return self.num.spec

    @property
    def grid(self):
        return self.num.grid

    def __repr__(self) -> str:
        return f"RatExpr(({self.num}) / ({self.den}))"

    def __str__(self) -> str:
        if self.den == 1:
            return str(self.num)
        return f"({self.num}) / ({self.den})"

    def is_zero(self) -> bool:
        return not self.num

    def _coerce(self, other) -> RatExpr:
        if isinstance(other, RatExpr):
            if other.spec != self.spec or other.grid != self.grid:
                raise SpecMismatch("operands disagree on spec/grid")
            return other
        if isinstance(other, SparsePoly):
            return RatExpr(self.num._coerce(other))
        if isinstance(other, (int, FieldElement)):
            return RatExpr(SparsePoly.constant(self.spec, self.grid, other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        # same denominator keeps chain products on one shared denominator
        if self.den == other.den:
            return RatExpr(self.num + other.num, self.den)
        return RatExpr(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatExpr(-self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.num or not other.num:
            return RatExpr(SparsePoly.zero(self.spec, self.grid))
        return RatExpr(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.num:
            raise ZeroDenominator("division by a zero expression")
        return RatExpr(self.num * other.den, self.den * other.num)

    def __pow__(self, k: int):
        if k < 0:
            if not self.num:
                raise ZeroDenominator("negative power of zero")
            return RatExpr(self.den, self.num) ** (-k)
        return RatExpr(poly_pow(self.num, k), poly_pow(self.den, k))

    def __bool__(self) -> bool:
        return bool(self.num)

    def frobenius(self, k: int = 1) -> RatExpr:
        """(num/den)^(q^k), computed term-wise."""
        return RatExpr(frobenius_power_poly(self.num, k), frobenius_power_poly(self.den, k))

    def derivative(self, i: int, j: int) -> RatExpr:
        dn = derivative(self.num, i, j)
        dd = derivative(self.den, i, j)
        if not dd:
            return RatExpr(dn, self.den)
        return RatExpr(dn * self.den - self.num * dd, self.den * self.den)

    def degree_bound(self) -> int:
        return max(self.num.degree(), self.den.degree(), 0)

    def constant_value(self) -> FieldElement | None:
        """The constant c with num = c*den, if there is one."""
        if not self.num:
            return FieldElement(self.spec, 0)
        lm_n, lc_n = self.num.leading()
        lm_d, lc_d = self.den.leading()
        if lm_n != lm_d or len(self.num) != len(self.den):
            return None
        c = self.spec.mul(lc_n, self.spec.inv(lc_d))
        if self.den.scale(c) == self.num:
            return FieldElement(self.spec, c)
        return None


def rat_make(num: SparsePoly, den: SparsePoly | None = None) -> RatExpr:
    return RatExpr(num, den)


def rat_arith(op: str, a: RatExpr, b) -> RatExpr:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "pow":
        if not isinstance(b, int) or b < 0:
            raise ValueError("pow needs a nonnegative int exponent")
        return a**b
    raise ValueError(f"unknown op {op!r}")


def _as_rat(x) -> RatExpr:
    return x if isinstance(x, RatExpr) else RatExpr(x)


def rat_equal_exact(a, b) -> bool:
    a, b = _as_rat(a), _as_rat(b)
    if a.spec != b.spec or a.grid != b.grid:
        raise SpecMismatch("operands disagree on spec/grid")
    if a.den == b.den:
        return a.num == b.num
    return a.num * b.den == b.num * a.den


def cross_term_estimate(a, b) -> int:
    a, b = _as_rat(a), _as_rat(b)
    return len(a.num) * len(b.den) + len(b.num) * len(a.den)


# ----------------------------------------------------------------------
# probabilistic equality
# ----------------------------------------------------------------------

@dataclass
class EqualityVerdict:
    equal: bool | None
    method: str  # "exact" | "prob"
    trials: int = 0
    seed: int | None = None
    witness: dict | None = None
    field: str | None = None
    skipped: int = 0
    extra: dict = dc_field(default_factory=dict)

    def to_dict(self, claim: str = "rat_equal") -> dict:
        out = {
            "claim": claim,
            "method": self.method,
            "trials": self.trials,
            "seed": self.seed,
            "verdict": {True: "equal", False: "unequal", None: "inconclusive"}[self.equal],
        }
        if self.witness is not None:
            out["witness"] = self.witness
        return out

    def to_json(self, claim: str = "rat_equal") -> str:
        return json.dumps(self.to_dict(claim), sort_keys=True)


def extension_for(spec: FieldSpec, degree: int, cap: int = FIELD_CAP) -> FieldSpec:
    """Smallest F_{q^s} with q^s > 4*degree."""
    need = 4 * max(degree, 1)
    s = 1
    while spec.q**s <= need:
        s += 1
    if spec.q**s > cap:
        raise DegreeBoundOverflow(
            f"degree bound {degree} needs a field above the cap {cap} over {spec!r}"
        )
    return make_field(spec.p, spec.e * s, cap=cap)


def min_extension(spec: FieldSpec, min_size: int, cap: int = FIELD_CAP) -> FieldSpec:
    s = 1
    while spec.q**s < min_size:
        s += 1
    if spec.q**s > cap:
        raise DegreeBoundOverflow(f"no extension of {spec!r} of size {min_size} under the cap")
    return make_field(spec.p, spec.e * s, cap=cap)


class PointSampler:
    """Random points of F_{q^s}^nvars for one trial, avoiding the zeros of
    a list of guard polynomials."""

    def __init__(self, spec: FieldSpec, big: FieldSpec, guards, attempts: int = 64):
        self.spec = spec
        self.big = big
        self.embed = embedding(spec, big)
        self.guards = list(guards)
        self.attempts = attempts

    def draw(self, seed: int, nvars: int) -> list[int] | None:
        rng = SplitMix64(seed)
        q = self.big.q
        for _ in range(self.attempts):
            pt = [rng.below(q) for _ in range(nvars)]
            if all(evaluate(g, pt, self.big, self.embed) for g in self.guards):
                return pt
        return None

    def value(self, f: SparsePoly, pt) -> int:
        return evaluate(f, pt, self.big, self.embed)


def format_point(grid, big: FieldSpec, pt) -> dict:
    out = {}
    for v, c in enumerate(pt):
        i, j = grid.var_name(v)
        out[f"x[{i},{j}]"] = big.format(c)
    return out


def rat_equal_probabilistic(a, b, trials: int = DEFAULT_TRIALS, seed: int = 0,
                            cap: int = FIELD_CAP) -> EqualityVerdict:
    """Schwartz-Zippel test of num_a*den_b = num_b*den_a.

    Each trial draws from its own generator seeded with seed XOR trial.
    Points where a denominator vanishes are redrawn, never evaluated.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    a, b = _as_rat(a), _as_rat(b)
    if a.spec != b.spec or a.grid != b.grid:
        raise SpecMismatch("operands disagree on spec/grid")
    bound = max(a.num.degree() + b.den.degree(), b.num.degree() + a.den.degree(),
                a.den.degree() + b.den.degree(), 1)
    big = extension_for(a.spec, bound, cap)
    sampler = PointSampler(a.spec, big, [a.den, b.den])
    nv = a.grid.nvars
    skipped = 0
    done = 0
    for t in range(trials):
        pt = sampler.draw(derive(seed, t), nv)
        if pt is None:
            skipped += 1
            continue
        done += 1
        mul = big.mul
        lhs = mul(sampler.value(a.num, pt), sampler.value(b.den, pt))
        rhs = mul(sampler.value(b.num, pt), sampler.value(a.den, pt))
        if lhs != rhs:
            return EqualityVerdict(False, "prob", t + 1, seed, format_point(a.grid, big, pt),
                                   repr(big), skipped)
    return EqualityVerdict(True if done else None, "prob", trials, seed, None, repr(big), skipped)


def rat_equal(a, b, mode: str = "auto", trials: int = DEFAULT_TRIALS, seed: int = 0,
              term_cap: int = TERM_CAP) -> EqualityVerdict:
    """Exact when the cross products are small enough, else probabilistic."""
    if mode == "auto":
        mode = "exact" if cross_term_estimate(a, b) <= term_cap else "prob"
    if mode == "exact":
        return EqualityVerdict(rat_equal_exact(a, b), "exact")
    if mode == "prob":
        return rat_equal_probabilistic(a, b, trials, seed)
    raise ValueError(f"unknown mode {mode!r}")
