"""Independent brute-force oracles.

Nothing here imports the package's polynomial or field arithmetic.
Polynomials are dicts {exponent tuple: coefficient mod p} over prime fields.
"""

import itertools


def dpoly_add(a, b, p):
    out = dict(a)
    for e, c in b.items():
        out[e] = (out.get(e, 0) + c) % p
        if not out[e]:
            del out[e]
    return out


def dpoly_mul(a, b, p):
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = (out.get(e, 0) + ca * cb) % p
    return {e: c for e, c in out.items() if c}


def dpoly_scale(a, c, p):
    return {e: (v * c) % p for e, v in a.items() if (v * c) % p}


def dpoly_pow(a, k, p, nvars):
    out = {(0,) * nvars: 1}
    for _ in range(k):
        out = dpoly_mul(out, a, p)
    return out


def monomial(nvars, var, power=1):
    e = [0] * nvars
    e[var] = power
    return {tuple(e): 1}


def perm_sign(perm):
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def leibniz_det(rows, p, nvars):
    """Sum over permutations; rows[r][c] are dict polys."""
    n = len(rows)
    total = {}
    for perm in itertools.permutations(range(n)):
        term = {(0,) * nvars: 1}
        for r in range(n):
            term = dpoly_mul(term, rows[r][perm[r]], p)
            if not term:
                break
        if term:
            total = dpoly_add(total, dpoly_scale(term, perm_sign(perm) % p, p), p)
    return total


def var_index(i, j, n):
    return (i - 1) * n + (j - 1)


def frob_col(copy, power, n, nvars):
    """Column X_copy^power as dict polys."""
    return [monomial(nvars, var_index(copy, j, n), power) for j in range(1, n + 1)]


def det_cols(cols, p, nvars):
    n = len(cols)
    rows = [[cols[c][r] for c in range(n)] for r in range(n)]
    return leibniz_det(rows, p, nvars)


def dickson_d_oracle(n, i, q, p):
    cols = [frob_col(1, q**t, n, n) for t in range(n + 1) if t != i]
    return det_cols(cols, p, n)


def to_terms(d):
    """[(coeff, exponents)] for poly_build."""
    return [(c, list(e)) for e, c in sorted(d.items())]


# ----------------------------------------------------------------------
# field and matrix groups over F_p
# ----------------------------------------------------------------------

def gf_mul_digits(a, b, mod, p):
    """Schoolbook product of digit lists modulo a monic modulus (low first)."""
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] = (prod[i + j] + x * y) % p
    e = len(mod) - 1
    for d in range(len(prod) - 1, e - 1, -1):
        c = prod[d]
        if c:
            for k in range(e + 1):
                prod[d - e + k] = (prod[d - e + k] - c * mod[k]) % p
    out = prod[:e] + [0] * max(0, e - len(prod))
    return out[:e]


def mat_mul_p(a, b, p):
    n = len(a)
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(n)) % p for j in range(n))
                 for i in range(n))


def det2(a, p):
    return (a[0][0] * a[1][1] - a[0][1] * a[1][0]) % p


def transpose_p(a):
    return tuple(zip(*a))


def all_matrices(n, p):
    for flat in itertools.product(range(p), repeat=n * n):
        yield tuple(tuple(flat[r * n:(r + 1) * n]) for r in range(n))


def det_p(a, p):
    n = len(a)
    total = 0
    for perm in itertools.permutations(range(n)):
        term = perm_sign(perm)
        for r in range(n):
            term *= a[r][perm[r]]
        total += term
    return total % p


def brute_group(n, p, form=None):
    """All invertible matrices, optionally those with T F T^t = F."""
    out = []
    for a in all_matrices(n, p):
        if not det_p(a, p):
            continue
        if form is not None and mat_mul_p(mat_mul_p(a, form, p), transpose_p(a), p) != form:
            continue
        out.append(a)
    return out


def act_dpoly(s, f, m, n, p):
    """x_{i,j} -> sum_k s[j][k] x_{i,k} on a dict poly."""
    nvars = m * n
    images = []
    for i in range(1, m + 1):
        for j in range(n):
            img = {}
            for k in range(n):
                if s[j][k] % p:
                    img = dpoly_add(img, dpoly_scale(monomial(nvars, var_index(i, k + 1, n)),
                                                     s[j][k], p), p)
            images.append(img)
    out = {}
    for e, c in f.items():
        term = {(0,) * nvars: c}
        for v, k in enumerate(e):
            if k:
                term = dpoly_mul(term, dpoly_pow(images[v], k, p, nvars), p)
        out = dpoly_add(out, term, p)
    return out
