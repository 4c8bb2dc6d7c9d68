"""Exact truncated power series in one variable q, and the q-products.

A :class:`Series` is known exactly for every exponent up to ``order`` and is
unknown beyond it.  Coefficients are integers of unbounded size: small values
live in an int64 array and go through the compiled kernels, large ones fall
back to a numpy object array of Python ints.  Every arithmetic result records
the order to which it is still exact, so mixing precisions never reports a
garbage coefficient.
"""
import numpy as np

from . import _kernels, faults
from .errors import NotAUnit, NotDivisible, OrderTooLow

__all__ = [
    "Series", "add", "mul", "div_unit", "div_qpow", "first_mismatch",
    "pochhammer", "euler_infty", "product_side", "theta_quotient",
    "theta_terms_needed",
]

_LIMIT = _kernels.SAFE_LIMIT


def _maxabs(arr):
    if arr.shape[0] == 0:
        return 0
    if arr.dtype == object:
        return max(abs(int(x)) for x in arr)
    return int(np.abs(arr).max())


def _pack(arr):
    """Choose the narrowest exact storage for a coefficient array."""
    arr = np.asarray(arr)
    if arr.dtype == object:
        if _maxabs(arr) < _LIMIT:
            return arr.astype(np.int64)
        return arr
    if arr.dtype.kind in "iub":
        return arr.astype(np.int64, copy=False)
    raise TypeError(f"coefficients must be integers, got dtype {arr.dtype}")


def _as_object(arr):
    if arr.dtype == object:
        return arr
    return np.array([int(x) for x in arr], dtype=object)


def _common(a, b):
    if a.dtype == object or b.dtype == object:
        return _as_object(a), _as_object(b)
    return a, b


class Series:
    """Truncated Laurent series ``sum c_t q^(valuation + t)`` exact to ``order``.

    Instances are immutable.  The valuation is always normalised: the first
    stored coefficient is nonzero, and the zero series has no stored
    coefficients and ``valuation == order + 1``.
    """

    __slots__ = ("valuation", "order", "_c")

    def __init__(self, coeffs=(), valuation=0, order=None):
        arr = np.asarray(coeffs, dtype=object if isinstance(coeffs, (list, tuple)) else None)
        if arr.ndim != 1:
            arr = arr.reshape(-1)
        if order is None:
            order = valuation + arr.shape[0] - 1
        order = int(order)
        valuation = int(valuation)
        keep = max(0, min(arr.shape[0], order - valuation + 1))
        arr = arr[:keep]
        nz = np.flatnonzero(arr != 0) if arr.shape[0] else np.zeros(0, dtype=np.int64)
        if nz.shape[0] == 0:
            arr = np.zeros(0, dtype=np.int64)
            valuation = order + 1
        else:
            lo = int(nz[0])
            stored = order - valuation - lo + 1
            trimmed = np.zeros(stored, dtype=arr.dtype if arr.dtype == object else np.int64)
            tail = arr[lo:]
            trimmed[:tail.shape[0]] = tail
            if arr.dtype == object:
                trimmed[tail.shape[0]:] = 0
            arr = trimmed
            valuation += lo
        arr = _pack(arr)
        arr.setflags(write=False)
        self.valuation = valuation
        self.order = order
        self._c = arr

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, order):
        return cls((), valuation=order + 1, order=order)

    @classmethod
    def one(cls, order):
        return cls.monomial(0, order)

    @classmethod
    def monomial(cls, exponent, order, coeff=1):
        return cls([coeff], valuation=exponent, order=order)

    @classmethod
    def from_dict(cls, terms, order):
        """Build from ``{exponent: coefficient}``; exponents above order are dropped."""
        terms = {int(e): int(c) for e, c in terms.items() if c and e <= order}
        if not terms:
            return cls.zero(order)
        lo = min(terms)
        arr = np.zeros(order - lo + 1, dtype=object)
        arr[:] = 0
        for e, c in terms.items():
            arr[e - lo] += c
        return cls(arr, valuation=lo, order=order)

    # -- access ------------------------------------------------------------

    @property
    def coeffs(self):
        """Stored coefficients, index t holding the coefficient of q^(valuation+t)."""
        return self._c

    def is_zero(self):
        return self._c.shape[0] == 0

    def __getitem__(self, exponent):
        if exponent > self.order:
            raise OrderTooLow(f"coefficient of q^{exponent} requested from a series exact to q^{self.order}")
        t = exponent - self.valuation
        if t < 0 or t >= self._c.shape[0]:
            return 0
        return int(self._c[t])

    def coefficients(self, upto=None):
        """Python-int list of the coefficients of q^0 .. q^upto."""
        upto = self.order if upto is None else upto
        if upto > self.order:
            raise OrderTooLow(f"need order {upto}, have {self.order}")
        if self.valuation < 0 and not self.is_zero():
            raise ValueError("series has negative powers of q")
        return [int(x) for x in self.dense(0, upto)]

    def dense(self, lo, hi):
        """Coefficients of q^lo .. q^hi as an array (zeros outside the support)."""
        n = hi - lo + 1
        if n <= 0:
            return np.zeros(0, dtype=np.int64)
        out = np.zeros(n, dtype=self._c.dtype)
        if self._c.dtype == object:
            out[:] = 0
        src_lo = max(lo, self.valuation)
        src_hi = min(hi, self.valuation + self._c.shape[0] - 1)
        if src_lo <= src_hi:
            out[src_lo - lo:src_hi - lo + 1] = self._c[src_lo - self.valuation:src_hi - self.valuation + 1]
        return out

    # -- structural operations ----------------------------------------------

    def truncate(self, order):
        if order >= self.order:
            return self
        return Series(self._c, self.valuation, order)

    def shift(self, m):
        """Multiply by q^m (m may be negative)."""
        return Series(self._c, self.valuation + m, self.order + m)

    def perturbed(self, exponent, delta=1):
        """Copy with the coefficient of q^exponent moved by ``delta``."""
        if exponent > self.order:
            return self
        lo = min(self.valuation, exponent)
        arr = _as_object(self.dense(lo, self.order))
        arr[exponent - lo] += delta
        return Series(arr, lo, self.order)

    # -- arithmetic ----------------------------------------------------------

    def __neg__(self):
        arr = self._c
        return Series(-arr if arr.dtype != object else np.array([-x for x in arr], dtype=object),
                      self.valuation, self.order)

    def _combine(self, other, sign):
        if isinstance(other, int):
            other = Series.monomial(0, self.order, other)
        order = min(self.order, other.order)
        lo = min(self.valuation, other.valuation)
        if lo > order:
            return Series.zero(order)
        a, b = _common(self.dense(lo, order), other.dense(lo, order))
        return Series(a + b if sign > 0 else a - b, lo, order)

    def __add__(self, other):
        return self._combine(other, 1)

    def __radd__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __rsub__(self, other):
        return (-self)._combine(other, 1)

    def __mul__(self, other):
        if isinstance(other, int):
            arr = _as_object(self._c) * other if self._c.shape[0] else self._c
            return Series(arr, self.valuation, self.order)
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return div_unit(self, other)

    def mul_binomial(self, sign, m):
        """Multiply by (1 + sign*q^m), m >= 1."""
        if m < 1:
            raise ValueError("binomial exponent must be positive")
        a = self._c
        if a.shape[0] == 0:
            return self
        if m >= a.shape[0]:
            return self
        out = a.copy()
        if sign > 0:
            out[m:] += a[:-m]
        else:
            out[m:] -= a[:-m]
        return Series(out, self.valuation, self.order)

    def div_binomial(self, sign, m):
        """Divide by (1 + sign*q^m), m >= 1."""
        if m < 1:
            raise ValueError("binomial exponent must be positive")
        a = self._c
        n = a.shape[0]
        if n == 0:
            return self
        if a.dtype != object and _maxabs(a) * n >= _LIMIT:
            a = _as_object(a)
        rows = -(-n // m)
        block = np.zeros(rows * m, dtype=a.dtype)
        if a.dtype == object:
            block[:] = 0
        block[:n] = a
        block = block.reshape(rows, m)
        if sign < 0:
            out = np.cumsum(block, axis=0)
        else:
            alt = np.where(np.arange(rows) % 2 == 0, 1, -1).reshape(rows, 1)
            if a.dtype == object:
                alt = alt.astype(object)
            out = np.cumsum(block * alt, axis=0) * alt
        return Series(out.reshape(-1)[:n], self.valuation, self.order)

    def __eq__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return first_mismatch(self, other) is None

    __hash__ = None

    # -- presentation --------------------------------------------------------

    def to_json(self):
        return {
            "valuation": self.valuation,
            "order": self.order,
            "coeffs": [str(int(x)) for x in self._c],
        }

    @classmethod
    def from_json(cls, obj):
        return cls([int(x) for x in obj["coeffs"]], obj["valuation"], obj["order"])

    def __str__(self):
        terms = []
        for t, c in enumerate(self._c):
            c = int(c)
            if not c:
                continue
            e = self.valuation + t
            mono = "" if e == 0 else ("q" if e == 1 else f"q^{e}")
            if not mono:
                body = str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}*{mono}"
            terms.append(("- " if c < 0 else "+ ") + body)
        big_o = f"O(q^{self.order + 1})"
        if not terms:
            return big_o
        text = " ".join(terms)
        text = text[2:] if text.startswith("+ ") else "-" + text[2:]
        return f"{text} + {big_o}"

    def __repr__(self):
        return f"Series({self})"


# ---------------------------------------------------------------------------
# free-function forms of the ring operations


def add(a, b):
    return a + b


def mul(a, b):
    """Cauchy product, exact to min(a.order + b.valuation, b.order + a.valuation)."""
    order = min(a.order + b.valuation, b.order + a.valuation)
    val = a.valuation + b.valuation
    length = order - val + 1
    if a.is_zero() or b.is_zero() or length <= 0:
        return Series.zero(order)
    x, y = a._c, b._c
    if x.dtype != object and y.dtype != object:
        terms = min(x.shape[0], y.shape[0], length)
        if _maxabs(x) * _maxabs(y) * terms < _LIMIT:
            return Series(_kernels.convolve_trunc(x, y, length), val, order)
    x, y = _as_object(x[:length]), _as_object(y[:length])
    full = np.convolve(x, y)[:length]
    return Series(full, val, order)


def div_unit(a, b):
    """The series c with b*c = a, for b whose leading coefficient is +-1."""
    if b.is_zero():
        raise NotAUnit(0)
    lead = int(b._c[0])
    if lead not in (1, -1):
        raise NotAUnit(lead)
    rel_b = b.order - b.valuation
    val = a.valuation - b.valuation
    order = min(a.order - b.valuation, val + rel_b)
    length = order - val + 1
    if a.is_zero() or length <= 0:
        return Series.zero(order)
    x, y = a._c, b._c
    if x.dtype != object and y.dtype != object:
        ok, out = _kernels.unit_divide(x, y[:length], length)
        if ok:
            return Series(out, val, order)
    x = _as_object(a.dense(a.valuation, a.valuation + length - 1))
    y = _as_object(b.dense(b.valuation, b.valuation + length - 1))
    out = np.zeros(length, dtype=object)
    out[:] = 0
    for t in range(length):
        acc = x[t]
        for s in range(1, t + 1):
            if y[s]:
                acc -= y[s] * out[t - s]
        out[t] = acc * lead
    return Series(out, val, order)


def div_qpow(a, m, strict=True):
    """Divide by q^m.

    In strict mode the coefficients of q^0 .. q^(m-1) (and any negative
    powers) must vanish, otherwise :class:`NotDivisible` names the first
    offender.  With ``strict=False`` the valuation simply drops by m.
    """
    if m < 0:
        raise ValueError("m must be nonnegative")
    if strict and not a.is_zero() and a.valuation < m:
        raise NotDivisible(a.valuation, int(a._c[0]))
    return a.shift(-m)


def first_mismatch(a, b, upto=None):
    """First exponent where a and b differ, as (exponent, a_coeff, b_coeff), or None.

    Compares through ``upto`` (default: the smaller order); asking for more
    than both series know raises :class:`OrderTooLow`.
    """
    top = min(a.order, b.order)
    if upto is None:
        upto = top
    elif upto > top:
        raise OrderTooLow(f"cannot compare to q^{upto}: orders are {a.order} and {b.order}")
    lo = min(a.valuation, b.valuation)
    if lo > upto:
        return None
    x, y = _common(a.dense(lo, upto), b.dense(lo, upto))
    diff = np.flatnonzero(x != y)
    if diff.shape[0] == 0:
        return None
    t = int(diff[0])
    return lo + t, int(x[t]), int(y[t])


# ---------------------------------------------------------------------------
# q-products


def pochhammer(base_exponent, sign, n, order):
    """(a)_n = prod_{s<n} (1 - a q^s) with a = sign * q^base_exponent."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if base_exponent < 0:
        raise ValueError("base exponent must be nonnegative")
    out = Series.one(order)
    for s in range(n):
        e = base_exponent + s
        if e == 0:
            out = out * (1 - sign)
        elif e <= order:
            out = out.mul_binomial(-sign, e)
    return out


def euler_infty(order):
    """(q)_oo truncated at ``order``."""
    return faults.tap("euler_infty", pochhammer(1, 1, max(order, 0), order))


def _divide_by_euler(s, order):
    for m in range(1, order + 1):
        s = s.div_binomial(-1, m)
    return s


def product_side(k, i, order):
    """Andrews-Bressoud product for modulus 2k, position i, over (q)_oo."""
    _check_ki(k, i)
    num = Series.one(order)
    m = 1
    while 2 * k * m - k - abs(i - 1) <= order:
        for e in (2 * k * m, 2 * k * m - k + i - 1, 2 * k * m - k - i + 1):
            if e <= order:
                num = num.mul_binomial(-1, e)
        m += 1
    return faults.tap("product_side", _divide_by_euler(num, order))


def theta_terms_needed(k, order):
    """Number of n-terms in a theta-type sum: n runs while k*n^2 <= order."""
    n = 0
    while k * n * n <= order:
        n += 1
    return n


def theta_quotient(k, i, order):
    """sum_n (-1)^n q^(kn^2 + n(i-1)) (1 - q^((k-i+1)(2n+1))) / (q)_oo."""
    _check_ki(k, i)
    terms = {}
    for n in range(theta_terms_needed(k, order)):
        e = k * n * n + n * (i - 1)
        sg = -1 if n % 2 else 1
        terms[e] = terms.get(e, 0) + sg
        e2 = e + (k - i + 1) * (2 * n + 1)
        terms[e2] = terms.get(e2, 0) - sg
    num = Series.from_dict(terms, order)
    return faults.tap("theta_quotient", div_unit(num, pochhammer(1, 1, order, order)))


def _check_ki(k, i):
    if k < 2 or not 1 <= i <= k:
        raise ValueError(f"need k >= 2 and 1 <= i <= k, got k={k}, i={i}")
