"""Official and ghost series on every shelf.

Shelf j for modulus parameter k holds the official series B_r with
r = (k-1)j + i, 1 <= i <= k, and the ghost series for 2 <= i <= k.  The last
official on shelf j is the first official on shelf j+1 (same r).

Two independent routes produce the same numbers:

* :func:`build_by_recursion` starts from the product sides and climbs shelf
  by shelf, dividing by pure powers of q in strict mode, so any failure of
  divisibility surfaces as a :class:`~qshelf.errors.RecursionFailed`.
* :func:`closed_form_official` / :func:`closed_form_ghost` evaluate the
  alternating theta-type sums directly.
"""
from dataclasses import dataclass, field
from functools import lru_cache

from . import faults
from .errors import Falsified, NotDivisible, OrderTooLow, RecursionFailed
from .series import Series, div_qpow, first_mismatch, product_side, theta_terms_needed

STRENGTHS = ("weak", "standard", "strong")


@dataclass(frozen=True)
class ShelfIndex:
    k: int
    j: int
    i: int

    def __post_init__(self):
        if self.k < 2 or self.j < 0 or not 1 <= self.i <= self.k:
            raise ValueError(f"invalid shelf index {self}")

    @property
    def r(self):
        return (self.k - 1) * self.j + self.i

    @classmethod
    def from_r(cls, k, r):
        """Canonical index for B_r: 1 <= i <= k-1 (B_1 included)."""
        j, i = divmod(r - 1, k - 1)
        return cls(k, j, i + 1)


@dataclass
class ShelfTable:
    k: int
    order: int
    officials: dict = field(default_factory=dict)
    ghosts: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    @property
    def j_max(self):
        return (max(self.officials) - 1) // (self.k - 1) - 1 if self.k > 1 else 0

    def official(self, j, i):
        return self.officials[(self.k - 1) * j + i]

    def ghost(self, j, i):
        if not 2 <= i <= self.k:
            raise ValueError("ghosts exist for 2 <= i <= k")
        return self.ghosts[(self.k - 1) * j + i]

    def to_json(self):
        return {
            "k": self.k,
            "order": self.order,
            "officials": {str(r): s.to_json() for r, s in sorted(self.officials.items())},
            "ghosts": {str(r): s.to_json() for r, s in sorted(self.ghosts.items())},
        }


@dataclass(frozen=True)
class EHReport:
    k: int
    j: int
    i: int
    kind: str
    strength: str
    f: int
    leading: int
    required: int
    passed: bool

    def csv_row(self):
        return [self.k, self.j, self.i, self.kind, self.strength, self.f, int(self.passed)]


EH_CSV_HEADER = ["k", "j", "i", "kind", "strength", "f", "pass"]


# ---------------------------------------------------------------------------
# recursion route


def working_order(k, j_max, order):
    """Precision to start from so shelf j_max is still exact to ``order``.

    Climbing from shelf j to j+1 divides by at most q^((j+1)(k-1)).
    """
    return order + (k - 1) * j_max * (j_max + 1) // 2


def _strict(series, m, where):
    try:
        return div_qpow(series, m, strict=True)
    except NotDivisible as exc:
        cert = dict(exc.certificate)
        cert["check"] = "shelf recursion divisibility"
        cert["indices"] = where
        cert["divisor_power"] = m
        raise RecursionFailed(cert) from exc


def _agree(left, right, where, what):
    bad = first_mismatch(left, right)
    if bad is not None:
        e, a, b = bad
        raise RecursionFailed({
            "check": what, "indices": where, "exponent": e,
            "expected": str(b), "actual": str(a),
        })


def _shelf_ghosts(k, j, B, G):
    base = (k - 1) * j
    for i in range(2, k):
        G[base + i] = (B[base + i - 1] + B[base + i + 1].shift(j + 1)).div_binomial(1, j + 1)
    G[base + k] = B[base + k - 1].div_binomial(1, j + 1)


def build_by_recursion(k, j_max, order):
    """Shelves 0..j_max from the product sides via the ghost recursions.

    Raises :class:`RecursionFailed` with a certificate if any strict q-power
    division leaves a remainder, or if the two expressions for a new
    official series disagree.
    """
    if k < 2 or j_max < 0 or order < 0:
        raise ValueError("need k >= 2, j_max >= 0, order >= 0")
    work = working_order(k, j_max, order)
    B = {i: product_side(k, i, work) for i in range(1, k + 1)}
    G = {}
    prov = {("official", i): "product-side" for i in range(1, k + 1)}
    for j in range(j_max + 1):
        base = (k - 1) * j
        _shelf_ghosts(k, j, B, G)
        for i in range(2, k + 1):
            prov[("ghost", base + i)] = "recursion"
        if j == j_max:
            break
        nxt = (k - 1) * (j + 1)
        where = {"k": k, "j": j + 1, "i": 2, "r": nxt + 2}
        new = _strict(B[base + k - 1] - G[base + k], j + 1, where)
        _agree(new, G[base + k], where, "edge ghost equality")
        B[nxt + 2] = new
        for i in range(3, k + 1):
            where = {"k": k, "j": j + 1, "i": i, "r": nxt + i}
            left = _strict(B[base + k - i + 1] - G[base + k - i + 2], (j + 1) * (i - 1), where)
            right = _strict(G[base + k - i + 2] - B[base + k - i + 3], (j + 1) * (i - 2), where)
            _agree(left, right, where, "recursion left/right equality")
            B[nxt + i] = left
        for i in range(2, k + 1):
            prov[("official", nxt + i)] = "recursion"

    table = ShelfTable(k=k, order=order, provenance=prov)
    for kind, src, dst in (("official", B, table.officials), ("ghost", G, table.ghosts)):
        for r, s in sorted(src.items()):
            if s.order < order:
                raise OrderTooLow(f"{kind} r={r} only exact to q^{s.order}")
            s = s.truncate(order)
            if prov[(kind, r)] == "recursion":
                s = faults.tap("recursion", s)
            dst[r] = s
    return table


# ---------------------------------------------------------------------------
# closed forms


def _divide_denominator(num, j_plus, order):
    for m in range(1, j_plus + 1):
        num = num.div_binomial(1, m)
    for m in range(1, order + 1):
        num = num.div_binomial(-1, m)
    return num


@lru_cache(maxsize=2048)
def _official(k, j, i, order):
    total = Series.zero(order)
    for n in range(theta_terms_needed(k, order)):
        e = k * n * n + ((k - 1) * j + i - 1) * n
        if e > order:
            break
        t = Series.monomial(e, order, -1 if n % 2 else 1)
        t = t.mul_binomial(-1, (2 * n + j + 1) * (k - i + 1))
        for m in range(1, j + 1):
            t = t.mul_binomial(-1, 2 * (n + m))
        total = total + t
    return _divide_denominator(total, j, order)


@lru_cache(maxsize=2048)
def _ghost(k, j, i, order):
    total = Series.zero(order)
    for n in range(theta_terms_needed(k, order)):
        e = k * n * n + ((k - 1) * j + i - 2) * n
        if e > order:
            break
        t = Series.monomial(e, order, -1 if n % 2 else 1)
        for m in range(1, j + 1):
            t = t.mul_binomial(-1, 2 * (n + m))
        t = t.mul_binomial(1, 2 * n + j + 1)
        t = t.mul_binomial(-1, (2 * n + j + 1) * (k - i + 1))
        total = total + t
    return _divide_denominator(total, j + 1, order)


def closed_form_official(k, j, i, order):
    """B_{(k-1)j+i} from its alternating-sum closed form."""
    if k < 2 or j < 0 or not 1 <= i <= k:
        raise ValueError(f"invalid (k, j, i) = ({k}, {j}, {i})")
    return faults.tap("closed_form_official", _official(k, j, i, order))


def closed_form_ghost(k, j, i, order):
    """Ghost series for 2 <= i <= k from its alternating-sum closed form."""
    if k < 2 or j < 0 or not 2 <= i <= k:
        raise ValueError(f"invalid ghost (k, j, i) = ({k}, {j}, {i})")
    return faults.tap("closed_form_ghost", _ghost(k, j, i, order))


def build_by_closed_form(k, j_max, order):
    table = ShelfTable(k=k, order=order)
    for j in range(j_max + 1):
        base = (k - 1) * j
        for i in range(1, k + 1):
            if base + i not in table.officials:
                table.officials[base + i] = closed_form_official(k, j, i, order)
                table.provenance[("official", base + i)] = "closed-form"
        for i in range(2, k + 1):
            table.ghosts[base + i] = closed_form_ghost(k, j, i, order)
            table.provenance[("ghost", base + i)] = "closed-form"
    return table


# ---------------------------------------------------------------------------
# checks


def edge_match_mismatch(k, j, order):
    """First disagreement between the two closed forms for B_{(k-1)j+1}, or None."""
    if j < 1:
        raise ValueError("edge matching needs j >= 1")
    return first_mismatch(closed_form_official(k, j - 1, k, order), closed_form_official(k, j, 1, order))


def edge_match_check(k, j, order):
    return edge_match_mismatch(k, j, order) is None


def eh_check(table, j, i, strength="standard", ghost=False):
    """Test how far B - 1 (or the ghost minus 1) is divisible by q."""
    if strength not in STRENGTHS:
        raise ValueError(f"strength must be one of {STRENGTHS}")
    if table.order < j + 2:
        raise OrderTooLow(f"table order {table.order} < {j + 2}")
    k = table.k
    s = table.ghost(j, i) if ghost else table.official(j, i)
    rest = s - 1
    f = rest.valuation if not rest.is_zero() else rest.order + 1
    leading = rest[f] if f <= rest.order else 0
    required = j + 1 if i <= k - 1 else j + 2
    if strength == "weak":
        passed = f >= 1
    elif strength == "standard":
        passed = f >= required
    else:
        passed = f >= required and s[required] == 1
    return EHReport(k=k, j=j, i=i, kind="ghost" if ghost else "official", strength=strength,
                    f=f, leading=leading, required=required, passed=passed)


def ghost_extension_b1(table):
    """The first ghost, defined as B_2."""
    return table.officials[2]


def ghost_decomposition_mismatch(k, J, i, order):
    """Check a ghost against its split into two officials; None when they agree."""
    if J < 0 or not 2 <= i <= k:
        raise ValueError("need J >= 0 and 2 <= i <= k")
    ghost = closed_form_ghost(k, J, i, order)
    if i == k:
        rhs = closed_form_official(k, J + 1, 2, order)
    else:
        rhs = (closed_form_official(k, J + 1, k - i + 2, order).shift((J + 1) * (k - i))
               + closed_form_official(k, J, i + 1, order))
    return first_mismatch(ghost, rhs)


def ghost_decomposition_check(k, J, i, order):
    return ghost_decomposition_mismatch(k, J, i, order) is None


def mismatch_certificate(check, indices, bad):
    e, actual, expected = bad
    return {"check": check, "indices": indices, "exponent": e,
            "expected": str(expected), "actual": str(actual)}


def require_equal(check, indices, actual, expected, upto=None):
    bad = first_mismatch(actual, expected, upto)
    if bad is not None:
        raise Falsified(mismatch_certificate(check, indices, bad))
