"""Matrix form of the shelf recursions.

Rows of ``h(J, j)`` express each series on shelf J as a polynomial
combination of the k series on shelf j.  Moving one shelf up multiplies on
the right by the transfer matrix ``A(j+1)``; its inverse ``B(j)`` carries
shelf j-1 to shelf j and needs negative powers of q.

Entries of the transfer matrices are generated from the scalar recursions
rather than copied from a picture:

    B[(k-1)j + k]     = B[(k-1)(j+1) + 1]
    B[(k-1)j + k - 1] = (1 + q^(j+1)) B[(k-1)(j+1) + 2]
    B[(k-1)j + i]     = q^((j+1)(k-i-1)) (1 + q^(j+1)) B[(k-1)(j+1) + k-i+1]
                        + B[(k-1)j + i + 2],          1 <= i <= k-2
"""
from dataclasses import dataclass

from . import faults
from .errors import Falsified, NoStabilization
from .partitions import h_vanishes
from .series import Series, first_mismatch

KINDS = ("A", "B", "Btilde")


def _zero_grid(rows, cols, order):
    return [[Series.zero(order) for _ in range(cols)] for _ in range(rows)]


def _freeze(grid):
    return tuple(tuple(row) for row in grid)


@dataclass(frozen=True)
class HMatrix:
    k: int
    J: int
    j: int
    order: int
    entries: tuple

    def entry(self, i, l):
        """h-polynomial for row i, column l (both 1-based)."""
        return self.entries[i - 1][l - 1]

    def to_json(self):
        return {
            "k": self.k, "J": self.J, "j": self.j, "kind": "h", "order": self.order,
            "entries": [[s.to_json() for s in row] for row in self.entries],
        }


@dataclass(frozen=True)
class TransferMatrix:
    k: int
    j: int
    kind: str
    order: int
    entries: tuple

    def entry(self, i, l):
        return self.entries[i - 1][l - 1]

    def to_json(self):
        return {
            "k": self.k, "J": None, "j": self.j, "kind": self.kind, "order": self.order,
            "entries": [[s.to_json() for s in row] for row in self.entries],
        }


def matmul(a, b):
    """Product of two grids of series."""
    n, m, p = len(a), len(b), len(b[0])
    if len(a[0]) != m:
        raise ValueError("shape mismatch")
    out = []
    for i in range(n):
        row = []
        for l in range(p):
            acc = None
            for t in range(m):
                x, y = a[i][t], b[t][l]
                if x.is_zero() or y.is_zero():
                    continue
                term = x * y
                acc = term if acc is None else acc + term
            if acc is None:
                order = min(min(a[i][t].order + b[t][l].valuation, b[t][l].order + a[i][t].valuation)
                            for t in range(m))
                acc = Series.zero(order)
            row.append(acc)
        out.append(row)
    return out


def apply(matrix, vector):
    """Matrix (grid or TransferMatrix/HMatrix) times a list of series."""
    grid = matrix.entries if hasattr(matrix, "entries") else matrix
    return [r[0] for r in matmul(grid, [[v] for v in vector])]


# ---------------------------------------------------------------------------
# transfer matrices


def _a_rows(k, j, order):
    one = Series.one(order)
    rows = [None] * (k + 1)
    rows[k] = {1: one}
    if k >= 2:
        rows[k - 1] = {2: one.mul_binomial(1, j)}
    for i in range(k - 2, 0, -1):
        r = dict(rows[i + 2])
        coef = one.mul_binomial(1, j).shift(j * (k - i - 1)).truncate(order)
        col = k - i + 1
        r[col] = r[col] + coef if col in r else coef
        rows[i] = r
    return rows


def build_transfer(k, j, kind, order):
    """One of the literal matrices A(j), B(j) (Laurent) or Btilde(j)."""
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    if kind in ("A", "B") and j < 1:
        raise ValueError("A and B need j >= 1")
    if kind == "Btilde" and j < 0:
        raise ValueError("Btilde needs j >= 0")
    if kind == "A":
        grid = _zero_grid(k, k, order)
        for i, row in enumerate(_a_rows(k, j, order)[1:], start=1):
            for l, s in row.items():
                grid[i - 1][l - 1] = s
    elif kind == "B":
        grid = _zero_grid(k, k, order)
        inv = Series.one(order + (k - 2) * j).div_binomial(1, j)
        grid[0][k - 1] = Series.one(order)
        if k >= 2:
            grid[1][k - 2] = inv.truncate(order)
        for i in range(3, k + 1):
            s = inv.shift(-j * (i - 2)).truncate(order)
            grid[i - 1][k - i] = s
            grid[i - 1][k - i + 2] = -s
    else:
        grid = _zero_grid(k - 1, k, order)
        inv = Series.one(order).div_binomial(1, j + 1)
        for m in range(1, k):
            grid[m - 1][m - 1] = inv
            if m + 2 <= k:
                grid[m - 1][m + 1] = inv.shift(j + 1).truncate(order)
    grid = [[faults.tap("transfer", s) for s in row] for row in grid]
    return TransferMatrix(k=k, j=j, kind=kind, order=order, entries=_freeze(grid))


# ---------------------------------------------------------------------------
# h-polynomials


def identity(k, J, order):
    grid = _zero_grid(k, k, order)
    for i in range(k):
        grid[i][i] = Series.one(order)
    return HMatrix(k=k, J=J, j=J, order=order, entries=_freeze(grid))


def h_step(h):
    """Advance h(J, j) to h(J, j+1) with the column recursions.

    Column l collects the entries whose index has the parity of k-l+1, up to
    k-l+1; for l >= 2 the sum is then multiplied by (1 + q^(j+1)) q^((l-2)(j+1)).
    """
    k, N, e = h.k, h.order, h.j + 1
    grid = []
    for i in range(1, k + 1):
        row = h.entries[i - 1]
        partial = {}
        acc = {0: Series.zero(N), 1: Series.zero(N)}
        for t in range(1, k + 1):
            acc[t % 2] = acc[t % 2] + row[t - 1]
            partial[t] = acc[t % 2]
        new = []
        for l in range(1, k + 1):
            s = partial[k - l + 1]
            if l >= 2:
                s = s.mul_binomial(1, e).shift((l - 2) * e).truncate(N)
            new.append(faults.tap("h_step", s))
        grid.append(new)
    return HMatrix(k=k, J=h.J, j=h.j + 1, order=N, entries=_freeze(grid))


def h_build(k, J, j, order):
    """h(J, j) = A(J+1) A(J+2) ... A(j); the identity when j = J."""
    if j < J:
        raise ValueError("need j >= J")
    grid = [list(row) for row in identity(k, J, order).entries]
    for s in range(J + 1, j + 1):
        grid = matmul(grid, build_transfer(k, s, "A", order).entries)
        grid = [[x.truncate(order) for x in row] for row in grid]
    grid = [[faults.tap("h_build", x) for x in row] for row in grid]
    return HMatrix(k=k, J=J, j=j, order=order, entries=_freeze(grid))


def tracked_column(k, J, j, i):
    """Column whose entry converges to the shelf-J series (1 or 2)."""
    idx = i if k % 2 else j - J + i
    return 1 if idx % 2 else 2


def parity_violations(h):
    """(i, l) pairs that should vanish by parity but do not."""
    return [(i, l) for i in range(1, h.k + 1) for l in range(1, h.k + 1)
            if h_vanishes(h.k, h.J, h.j, l, i) and not h.entry(i, l).is_zero()]


def negative_coefficients(h):
    out = []
    for i in range(1, h.k + 1):
        for l in range(1, h.k + 1):
            s = h.entry(i, l)
            if len(s.coeffs) and min(int(x) for x in s.coeffs) < 0:
                out.append((i, l))
    return out


def h_limit(k, J, i, order, return_steps=False):
    """Stabilised limit of the tracked column of row i.

    Iterates :func:`h_step` until the tracked entry has not changed for two
    consecutive steps and j >= J + order + 2.  Along the way it checks that
    the other low column is identically zero and that the coefficient of q^t
    no longer moves once j >= J + t + 2.
    """
    cap = J + 4 * order + 16
    h = identity(k, J, order)
    history = []
    while True:
        col = tracked_column(k, J, h.j, i)
        other = 3 - col
        if k >= 2 and not h.entry(i, other).is_zero():
            raise Falsified({"check": "h limit off-parity column", "indices": {"k": k, "J": J, "i": i, "j": h.j, "l": other},
                             "exponent": h.entry(i, other).valuation,
                             "expected": "0", "actual": str(h.entry(i, other)[h.entry(i, other).valuation])})
        cur = h.entry(i, col)
        if history:
            settled = min(order, h.j - 1 - J - 2)
            if settled >= 0:
                bad = first_mismatch(cur, history[-1], settled)
                if bad is not None:
                    raise Falsified({"check": "h limit stabilisation", "indices": {"k": k, "J": J, "i": i, "j": h.j},
                                     "exponent": bad[0], "expected": str(bad[2]), "actual": str(bad[1])})
        history.append(cur)
        if (h.j >= J + order + 2 and len(history) >= 3
                and history[-1] == history[-2] and history[-2] == history[-3]):
            result = faults.tap("h_limit", cur)
            return (result, h.j) if return_steps else result
        if h.j >= cap:
            raise NoStabilization(f"no stabilisation by j={h.j} for k={k}, J={J}, i={i}")
        h = h_step(h)


def reconstruct(h, shelf_vector):
    """sum_l h(i, l) B[(k-1)j + l] for every row i."""
    return apply(h.entries, shelf_vector)


def initial_row(k, J, i, order):
    """Row i of h(J, J+1) written out directly.

    When k - i is even the row is [1, 0, q^e + q^2e, 0, q^3e + q^4e, ...];
    otherwise it is [0, 1 + q^e, 0, q^2e + q^3e, ...], with e = J + 1 and
    nothing beyond column k - i + 1.
    """
    e = J + 1
    row = []
    for l in range(1, k + 1):
        if l > k - i + 1 or (k - i + 1 - l) % 2:
            row.append(Series.zero(order))
        elif l == 1:
            row.append(Series.one(order))
        else:
            row.append(Series.from_dict({(l - 2) * e: 1, (l - 1) * e: 1}, order))
    return row
