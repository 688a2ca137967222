"""Random pairs (phi, eta) whose pullback splits over Q.

phi is a Moebius-twisted seed map with rational critical points; eta is a
product of powers of (t - Q) over target points Q whose phi-fibre is rational.
"""

import random
from fractions import Fraction

from meroforms.arith import Poly, RatFunc, split_linear_factors
from meroforms.divisor import ExplicitForm, pullback_form
from meroforms.errors import SplitFieldRequired

X = RatFunc.x()
SEEDS = [
    X**2,
    X**3,
    X**4,
    4 * X * (1 - X),
    (X + 1) ** 2 / (4 * X),
    X**2 * (3 - 2 * X),
    X**3 - 3 * X,
    (X**2) ** 2 - 2 * X**2,  # x^2 composed with x^2 - 2x
    (4 * X * (1 - X)).compose(4 * X * (1 - X)),
    (X**2 + 1) / X,
]
GRID = sorted({Fraction(p, q) for p in range(-6, 7) for q in (1, 2, 3)})


def _splits(p: Poly) -> bool:
    if p.degree <= 1:
        return True
    try:
        split_linear_factors(p)
        return True
    except SplitFieldRequired:
        return False


def _mobius(rng):
    while True:
        a, b, c, d = (Fraction(rng.randint(-3, 3)) for _ in range(4))
        if a * d - b * c != 0:
            return (a * X + b) / (c * X + d)


def good_values(phi):
    """Target points (Fractions, or None for infinity) with rational fibres."""
    out = []
    if _splits(phi.den):
        out.append(None)
    for a in GRID:
        if phi.den(a) == 0:
            continue
        q = phi(a)
        if q not in out and _splits(phi.num - phi.den * q):
            out.append(q)
    return out


_GOOD = {}


def _image(m, v):
    """Moebius image of a Fraction or None (infinity)."""
    if v is None:
        w = m.value_at_infinity()
    else:
        w = None if m.den(v) == 0 else m(v)
    return w


def random_pair(rng, max_tries=200):
    for _ in range(max_tries):
        i = rng.randrange(len(SEEDS))
        if i not in _GOOD:
            _GOOD[i] = good_values(SEEDS[i])
        phi, vals = SEEDS[i], _GOOD[i]
        if rng.random() < 0.7:
            phi = phi.compose(_mobius(rng))
        if rng.random() < 0.7:
            m = _mobius(rng)
            phi = m.compose(phi)
            vals = [_image(m, v) for v in vals]
        finite = [v for v in vals if v is not None]
        if len(finite) < 2:
            continue
        k = rng.randint(1, min(4, len(finite)))
        pts = rng.sample(finite, k)
        exps = [rng.choice([-3, -2, -1, -1, 1, 1, 2, 3]) for _ in pts]
        if None not in vals:
            # keep infinity out of the support of eta
            exps[-1] = -2 - sum(exps[:-1])
            if exps[-1] == 0:
                continue
        f = RatFunc.from_factors(Fraction(rng.choice([1, 2, -1, 3])), list(zip(pts, exps)))
        eta = ExplicitForm(f)
        omega = pullback_form(phi, eta)
        try:
            omega.divisor()
            omega.residues()
        except SplitFieldRequired:
            continue
        return phi, eta, omega
    raise RuntimeError("no splitting sample found")


def samples(n, seed=0):
    rng = random.Random(seed)
    return [random_pair(rng) for _ in range(n)]
