"""Two-variable (x, q) series and their specialisations x -> q^j.

A :class:`BivariateSeries` stores the coefficient of x^a q^b for
0 <= a <= b <= N.  Every expression built here pairs each power of x with at
least as many powers of q, so truncating in q alone is exact after any
substitution x = q^j with j >= 0.  Insertion outside that region raises.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import faults
from .series import Series


def _grid(order):
    c = np.zeros((order + 1, order + 1), dtype=object)
    c[:] = 0
    return c


class BivariateSeries:
    __slots__ = ("order", "_c")

    def __init__(self, grid, order):
        grid = np.asarray(grid, dtype=object)
        if grid.shape != (order + 1, order + 1):
            raise ValueError(f"grid must be {(order + 1, order + 1)}, got {grid.shape}")
        below = np.tril(np.ones_like(grid, dtype=bool), -1)
        if np.any(grid[below] != 0):
            a, b = np.argwhere(below & (grid != 0))[0]
            raise ValueError(f"term x^{a} q^{b} violates the support bound a <= b")
        grid = grid.copy()
        grid.setflags(write=False)
        self.order = order
        self._c = grid

    @classmethod
    def zero(cls, order):
        return cls(_grid(order), order)

    @classmethod
    def monomial(cls, a, b, order, coeff=1):
        c = _grid(order)
        if b <= order:
            c[a, b] = coeff
        return cls(c, order)

    @classmethod
    def one(cls, order):
        return cls.monomial(0, 0, order)

    @property
    def grid(self):
        return self._c

    def __getitem__(self, ab):
        a, b = ab
        if b > self.order:
            raise IndexError(f"q^{b} beyond order {self.order}")
        if a < 0 or b < 0 or a > b:
            return 0
        return int(self._c[a, b])

    def terms(self):
        """Nonzero (a, b, c) sorted by (b, a)."""
        idx = np.argwhere(self._c != 0)
        out = [(int(a), int(b), int(self._c[a, b])) for a, b in idx]
        return sorted(out, key=lambda t: (t[1], t[0]))

    def is_zero(self):
        return not np.any(self._c != 0)

    # -- arithmetic ----------------------------------------------------------

    def _same(self, other):
        if other.order != self.order:
            raise ValueError("orders differ")

    def __add__(self, other):
        self._same(other)
        return BivariateSeries(self._c + other._c, self.order)

    def __sub__(self, other):
        self._same(other)
        return BivariateSeries(self._c - other._c, self.order)

    def __neg__(self):
        return BivariateSeries(-self._c, self.order)

    def scale(self, c):
        return BivariateSeries(self._c * c, self.order)

    def shift(self, da, db):
        """Multiply by x^da q^db."""
        if da < 0 or db < da:
            raise ValueError("shift must keep a <= b")
        N = self.order
        c = _grid(N)
        if db <= N:
            c[da:, db:] = self._c[:N + 1 - da, :N + 1 - db]
        return BivariateSeries(c, N)

    def mul_binomial(self, sign, da, db):
        """Multiply by (1 + sign x^da q^db)."""
        t = self.shift(da, db)
        return self + t if sign > 0 else self - t

    def div_binomial(self, sign, da, db):
        """Divide by (1 + sign x^da q^db), db >= 1."""
        if db < 1:
            raise ValueError("q-exponent of the divisor must be positive")
        N = self.order
        c = self._c.copy()
        for b in range(db, N + 1):
            if da:
                c[da:, b] -= sign * c[:N + 1 - da, b - db]
            else:
                c[:, b] -= sign * c[:, b - db]
        return BivariateSeries(c, N)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        self._same(other)
        N = self.order
        c = _grid(N)
        for a, b, v in other.terms():
            c[a:, b:] += v * self._c[:N + 1 - a, :N + 1 - b]
        return BivariateSeries(c, N)

    __rmul__ = __mul__

    def inverse(self):
        """Multiplicative inverse by induction on the q-degree.

        The q^0 column must be exactly the constant 1.
        """
        N = self.order
        c = self._c
        if c[0, 0] != 1 or np.any(c[1:, 0] != 0):
            raise ValueError("only series with constant q^0 column 1 are inverted")
        u = _grid(N)
        u[0, 0] = 1
        for b in range(1, N + 1):
            acc = np.zeros(N + 1, dtype=object)
            acc[:] = 0
            for t in range(1, b + 1):
                col = c[:, t]
                if not np.any(col != 0):
                    continue
                acc += np.convolve(col, u[:, b - t])[:N + 1]
            u[:, b] = -acc
        return BivariateSeries(u, N)

    def substitute_xq(self):
        """x -> x q, i.e. x^a q^b -> x^a q^(a+b), truncated to the same order."""
        N = self.order
        c = _grid(N)
        for a, b, v in self.terms():
            if a + b <= N:
                c[a, a + b] = v
        return BivariateSeries(c, N)

    def perturbed(self, exponent, delta=1):
        """Copy with the x^0 q^exponent coefficient shifted (fault injection)."""
        if not 0 <= exponent <= self.order:
            return self
        c = self._c.copy()
        c[0, exponent] += delta
        return BivariateSeries(c, self.order)

    def __eq__(self, other):
        if not isinstance(other, BivariateSeries):
            return NotImplemented
        return first_mismatch(self, other) is None

    __hash__ = None

    def to_json(self):
        return [{"a": a, "b": b, "c": str(v)} for a, b, v in self.terms()]

    @classmethod
    def from_json(cls, obj, order):
        c = _grid(order)
        for t in obj:
            c[int(t["a"]), int(t["b"])] = int(t["c"])
        return cls(c, order)

    def __repr__(self):
        return f"BivariateSeries(order={self.order}, terms={len(self.terms())})"


def first_mismatch(s, t):
    """First (a, b, s_coeff, t_coeff) in (b, a) order where s and t differ."""
    s._same(t)
    diff = np.argwhere(s.grid != t.grid)
    if not diff.shape[0]:
        return None
    a, b = min(((int(a), int(b)) for a, b in diff), key=lambda p: (p[1], p[0]))
    return a, b, int(s.grid[a, b]), int(t.grid[a, b])


def specialize(s, j, order=None):
    """x -> q^j; exact to min(order, s.order) for j >= 0."""
    if j < 0:
        raise ValueError("j must be nonnegative")
    N = s.order if order is None else min(order, s.order)
    out = np.zeros(N + 1, dtype=object)
    out[:] = 0
    for a, b, v in s.terms():
        e = a * j + b
        if e <= N:
            out[e] += v
    return Series(out, 0, N)


# ---------------------------------------------------------------------------
# the two families


def _pochhammer_x(order, start, count, sign):
    """prod_{s=start}^{start+count-1} (1 + sign x q^s)."""
    p = BivariateSeries.one(order)
    for s in range(start, start + count):
        p = p.mul_binomial(sign, 1, s)
    return p


def _q_denominator(s, n):
    """Divide by (-q)_n (q)_n."""
    for m in range(1, n + 1):
        s = s.div_binomial(1, 0, m)
        s = s.div_binomial(-1, 0, m)
    return s


def _summands(k, N):
    n = 0
    while k * n * n <= N:
        yield n
        n += 1


@lru_cache(maxsize=256)
def _jtilde(k, i, N):
    total = BivariateSeries.zero(N)
    for n in _summands(k, N):
        e = k * n * n + (k - i) * n
        if e > N:
            break
        t = BivariateSeries.monomial((k - 1) * n, e, N, -1 if n % 2 else 1)
        t = t.mul_binomial(-1, i, (2 * n + 1) * i)
        t = t * _pochhammer_x(N, 1, n, 1)
        t = _q_denominator(t, n)
        tail = _pochhammer_x(N, n + 1, max(0, N - n), -1)
        t = t * tail.inverse()
        total = total + t
    return total


def jtilde(k, i, order):
    """The official (x, q)-series, summed directly."""
    if k < 2 or not 1 <= i <= k:
        raise ValueError(f"need k >= 2 and 1 <= i <= k, got ({k}, {i})")
    return faults.tap("jtilde", _jtilde(k, i, order))


def jtildetilde(k, i, order):
    """The ghost (x, q)-series from its single-sum form."""
    if k < 2 or not 1 <= i <= k - 1:
        raise ValueError(f"need k >= 2 and 1 <= i <= k-1, got ({k}, {i})")
    return faults.tap("jtildetilde", _jtildetilde(k, i, order))


@lru_cache(maxsize=256)
def _jtildetilde(k, i, N):
    total = BivariateSeries.zero(N)
    for n in _summands(k, N):
        e = k * n * n + (k - i - 1) * n
        if e > N:
            break
        t = BivariateSeries.monomial((k - 1) * n, e, N, -1 if n % 2 else 1)
        t = t.mul_binomial(-1, i, (2 * n + 1) * i)
        t = t * _pochhammer_x(N, 1, n, 1)
        t = t.mul_binomial(1, 1, 2 * n + 1)
        t = _q_denominator(t, n)
        for m in range(n + 1, N + 1):
            t = t.div_binomial(-1, 1, m)
        t = t.div_binomial(1, 1, 1)
        total = total + t
    return total


# ---------------------------------------------------------------------------
# the H-form and its substitution


@dataclass(frozen=True)
class FactoredTerm:
    """coeff * x^a q^b * prod(num) / prod(den) / prod_{m >= tail} (1 - x q^m).

    Factors are triples (sign, da, db) standing for 1 + sign x^da q^db.
    """

    coeff: int
    a: int
    b: int
    num: tuple
    den: tuple
    tail: int

    def substitute_xq(self):
        bump = lambda fs: tuple((s, da, db + da) for s, da, db in fs)
        return FactoredTerm(self.coeff, self.a, self.b + self.a, bump(self.num), bump(self.den), self.tail + 1)

    def evaluate(self, order):
        if self.tail < 1 or any(db < max(da, 1) for _, da, db in self.den) or any(db < da for _, da, db in self.num):
            raise ValueError("term has x without q; substitute x -> xq first")
        t = BivariateSeries.monomial(self.a, self.b, order, self.coeff)
        for s, da, db in self.num:
            t = t.mul_binomial(s, da, db)
        for s, da, db in self.den:
            t = t.div_binomial(s, da, db)
        for m in range(self.tail, order + 1):
            t = t.div_binomial(-1, 1, m)
        return t


def htilde_terms(k, i, order):
    """Summands of the H-form; they contain bare x and cannot be evaluated as is."""
    out = []
    n = 0
    while k * n * n <= order + (i - 1) * n:
        num = ((-1, i, 2 * n * i),) + tuple((1, 1, s) for s in range(n))
        den = tuple((1, 0, m) for m in range(1, n + 1)) + tuple((-1, 0, m) for m in range(1, n + 1))
        out.append(FactoredTerm(-1 if n % 2 else 1, (k - 1) * n, k * n * n + n - i * n, num, den, n))
        n += 1
    return out


def jtilde_via_h(k, i, order):
    """The official (x, q)-series as the H-form with x replaced by x q."""
    total = BivariateSeries.zero(order)
    for term in htilde_terms(k, i, order):
        t = term.substitute_xq()
        if t.b > order:
            continue
        total = total + t.evaluate(order)
    return total


# ---------------------------------------------------------------------------
# identities


def construction_rhs(k, i, order):
    """jtilde(k, i+1) + x q jtilde(k, i-1), or jtilde(k, 2) when i = 1."""
    rhs = jtilde(k, i + 1, order)
    if i >= 2:
        rhs = rhs + jtilde(k, i - 1, order).shift(1, 1)
    return rhs


def construction_lhs(k, i, order):
    return jtildetilde(k, i, order).mul_binomial(1, 1, 1)


def factorization_sides(n, i, order):
    """Both sides of the termwise factorisation used to merge the ghost sums."""
    one = BivariateSeries.one(order)
    left = one.mul_binomial(-1, i + 1, (2 * n + 1) * (i + 1))
    left = left + one.mul_binomial(-1, i - 1, (2 * n + 1) * (i - 1)).shift(1, 2 * n + 1)
    right = one.mul_binomial(-1, i, (2 * n + 1) * i).mul_binomial(1, 1, 2 * n + 1)
    return left, right


def gap_filling_sides(n, j, order):
    """Three expressions for (-q^(j+1))_n / ((-q)_n (q)_n (q^(n+j+1))_inf).

    The first specialises the bivariate factor at x = q^j; the other two are
    the filled and the cancelled univariate forms.
    """
    biv = _pochhammer_x(order, 1, n, 1)
    biv = _q_denominator(biv, n)
    for m in range(n + 1, order + 1):
        biv = biv.div_binomial(-1, 1, m)
    first = specialize(biv, j, order)

    filled = Series.one(order)
    for m in range(j + 1, j + n + 1):
        filled = filled.mul_binomial(1, m)
    for m in range(n + 1, n + j + 1):
        filled = filled.mul_binomial(-1, m)
    for m in range(1, n + 1):
        filled = filled.div_binomial(1, m)
    for m in range(1, order + 1):
        filled = filled.div_binomial(-1, m)

    cancelled = Series.one(order)
    for m in range(n + 1, n + j + 1):
        cancelled = cancelled.mul_binomial(-1, 2 * m)
    for m in range(1, j + 1):
        cancelled = cancelled.div_binomial(1, m)
    for m in range(1, order + 1):
        cancelled = cancelled.div_binomial(-1, m)
    return first, filled, cancelled
