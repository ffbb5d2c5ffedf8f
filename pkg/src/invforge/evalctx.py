"""Two interchangeable backends for checking an identity.

An identity is written once as a function of a context ``ctx``.
``ExactContext`` works on SparsePoly / RatExpr values, so the check is a
proof.  ``PointContext`` maps every polynomial to its value at one random
point of an extension field, so the check is one Schwartz-Zippel trial.
"""

from __future__ import annotations

from .gf import FieldSpec, mat_det
from .mpoly import SparsePoly, cofactor_det, determinant
from .ratexpr import PointSampler, RatExpr, extension_for, format_point, rat_equal_exact
from .rng import derive


class ExactContext:
    exact = True

    def __init__(self, spec: FieldSpec, grid):
        self.spec = spec
        self.grid = grid
        self.zero = SparsePoly.zero(spec, grid)
        self.one = SparsePoly.one(spec, grid)

    def lift(self, f):
        return f

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def pow(self, a, k: int):
        return a**k

    def const(self, c):
        return SparsePoly.constant(self.spec, self.grid, c)

    def frob(self, a, k: int):
        """a^(q^k) for q = |spec|."""
        if isinstance(a, RatExpr):
            return a.frobenius(k)
        return a ** (self.spec.q**k)

    def inv(self, a):
        return RatExpr(a.den, a.num) if isinstance(a, RatExpr) else RatExpr(self.one, a)

    def div(self, a, b):
        if not isinstance(a, RatExpr):
            a = RatExpr(a)
        if not isinstance(b, RatExpr):
            b = RatExpr(b)
        return a / b

    def det(self, rows):
        rows = [list(r) for r in rows]
        if any(isinstance(x, RatExpr) for r in rows for x in r):
            rows = [[x if isinstance(x, RatExpr) else RatExpr(x) for x in r] for r in rows]
            zero, one = RatExpr(self.zero), RatExpr(self.one)
            return cofactor_det(rows, zero, one)
        return determinant(rows)

    def eq(self, a, b) -> bool:
        if isinstance(a, RatExpr) or isinstance(b, RatExpr):
            return rat_equal_exact(a, b)
        return a == b


class PointContext:
    exact = False

    def __init__(self, spec: FieldSpec, grid, big: FieldSpec, point, sampler: PointSampler):
        self.spec = spec
        self.grid = grid
        self.big = big
        self.point = point
        self.sampler = sampler
        self.zero = 0
        self.one = 1
        self._cache: dict[int, tuple] = {}
        self.add = big.add
        self.sub = big.sub
        self.mul = big.mul
        self.pow = big.pow

    def lift(self, f):
        key = id(f)
        hit = self._cache.get(key)
        if hit is None:
            hit = (self.sampler.value(f, self.point), f)
            self._cache[key] = hit
        return hit[0]

    def const(self, c):
        return self.sampler.embed[self.spec.code(c)]

    def frob(self, a, k: int):
        return self.big.pow(a, self.spec.q**k)

    def inv(self, a):
        return self.big.inv(a)

    def div(self, a, b):
        return self.big.mul(a, self.big.inv(b))

    def det(self, rows):
        return mat_det(self.big, [list(r) for r in rows])

    def eq(self, a, b) -> bool:
        return a == b


def run_identity(spec: FieldSpec, grid, body, degree_bound: int, mode: str = "exact",
                 trials: int = 20, seed: int = 0, guards=()):
    """Run ``body(ctx) -> list[(label, lhs, rhs)]`` exactly or at ``trials``
    random points avoiding the zeros of ``guards``.

    Returns (verdict, details, witness) where verdict is pass/fail/inconclusive.
    """
    if mode == "exact":
        ctx = ExactContext(spec, grid)
        results = body(ctx)
        bad = [label for label, lhs, rhs in results if not ctx.eq(lhs, rhs)]
        details = {"checked": len(results), "failed": bad}
        return ("fail" if bad else "pass"), details, ({"failed": bad[0]} if bad else None)
    big = extension_for(spec, degree_bound)
    sampler = PointSampler(spec, big, guards)
    done = 0
    checked = 0
    for t in range(trials):
        pt = sampler.draw(derive(seed, t), grid.nvars)
        if pt is None:
            continue
        done += 1
        ctx = PointContext(spec, grid, big, pt, sampler)
        results = body(ctx)
        checked += len(results)
        for label, lhs, rhs in results:
            if lhs != rhs:
                witness = {"trial": t, "identity": label,
                           "point": format_point(grid, big, pt), "field": repr(big)}
                return "fail", {"trials_run": done, "field": repr(big),
                                "degree_bound": degree_bound}, witness
    details = {"trials_run": done, "checked": checked, "field": repr(big),
               "degree_bound": degree_bound,
               "per_trial_bound": f"{degree_bound}/{big.q}"}
    return ("pass" if done else "inconclusive"), details, None
