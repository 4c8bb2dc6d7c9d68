"""Verification suites.

A suite is a list of independent cells.  Each cell runs one comparison and
returns ``None`` or a certificate dict naming the first bad exponent, the
two coefficients and the indices involved.  Cells never share mutable state,
so :func:`run` may fan them out over threads; results keep cell order.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import hmatrix, partitions, shelves, xq
from .errors import Falsified, NoStabilization
from .series import Series, euler_infty, first_mismatch, product_side, theta_quotient


@dataclass(frozen=True)
class Config:
    ks: tuple = (2, 3, 4)
    order: int = 60
    n_max: int = 30
    j_max: int = 8
    J_max: int = 2
    strength: str = "standard"
    span: int = 4


@dataclass(frozen=True)
class Cell:
    suite: str
    indices: dict
    run: callable = field(compare=False, repr=False)


@dataclass
class Outcome:
    suite: str
    indices: dict
    certificate: dict = None
    detail: dict = None

    @property
    def passed(self):
        return self.certificate is None

    def to_json(self):
        out = {"suite": self.suite, "indices": self.indices, "pass": self.passed}
        if self.detail:
            out.update(self.detail)
        if self.certificate is not None:
            out["certificate"] = self.certificate
        return out


@dataclass
class Report:
    suite: str
    outcomes: list

    @property
    def passed(self):
        return all(o.passed for o in self.outcomes)

    @property
    def first_failure(self):
        for o in self.outcomes:
            if not o.passed:
                return o.certificate
        return None

    def to_json(self):
        return {
            "suite": self.suite,
            "pass": self.passed,
            "cells": len(self.outcomes),
            "failed": sum(not o.passed for o in self.outcomes),
            "first_failure": self.first_failure,
            "results": [o.to_json() for o in self.outcomes],
        }


def compare(check, indices, actual, expected, upto=None):
    """Certificate for the first disagreement of two series, or None."""
    bad = first_mismatch(actual, expected, upto)
    if bad is None:
        return None
    e, a, b = bad
    return {"check": check, "indices": dict(indices), "exponent": e, "expected": str(b), "actual": str(a)}


def _first(*certs):
    for c in certs:
        if c is not None:
            return c
    return None


def _counts(arr):
    return partitions.as_series(arr)


# ---------------------------------------------------------------------------
# cells


def _andrews_bressoud(cfg):
    for k in cfg.ks:
        for i in range(1, k + 1):
            idx = {"k": k, "i": i}
            yield idx, lambda k=k, i=i, idx=idx: compare(
                "product side vs official count", idx,
                _counts(partitions.official_counts(k, i, cfg.n_max)), product_side(k, i, cfg.n_max))


def _shelf_j(cfg):
    for k in cfg.ks:
        for J in range(cfg.J_max + 1):
            for i in range(1, k + 1):
                idx = {"k": k, "J": J, "i": i, "r": (k - 1) * J + i}
                yield idx, lambda k=k, J=J, i=i, idx=idx: compare(
                    "closed-form official vs official count", idx,
                    _counts(partitions.official_counts(k, idx["r"], cfg.n_max)),
                    shelves.closed_form_official(k, J, i, cfg.n_max))


def _ghosts(cfg):
    for k in cfg.ks:
        idx = {"k": k, "r": 1}
        yield idx, lambda k=k, idx=idx: compare(
            "first ghost vs B_2", idx,
            _counts(partitions.ghost_counts(k, 1, cfg.n_max)), shelves.closed_form_official(k, 0, 2, cfg.n_max))
        for J in range(cfg.J_max + 1):
            for i in range(2, k + 1):
                idx = {"k": k, "J": J, "i": i, "r": (k - 1) * J + i}
                yield idx, lambda k=k, J=J, i=i, idx=idx: compare(
                    "closed-form ghost vs ghost count", idx,
                    _counts(partitions.ghost_counts(k, idx["r"], cfg.n_max)),
                    shelves.closed_form_ghost(k, J, i, cfg.n_max))


def _recursion(cfg):
    for k in cfg.ks:
        def cell(k=k):
            rec = shelves.build_by_recursion(k, cfg.j_max, cfg.order)
            for j in range(cfg.j_max + 1):
                for i in range(1, k + 1):
                    idx = {"k": k, "j": j, "i": i, "kind": "official"}
                    c = compare("recursion vs closed form", idx, rec.official(j, i),
                                shelves.closed_form_official(k, j, i, cfg.order))
                    if c:
                        return c
                for i in range(2, k + 1):
                    idx = {"k": k, "j": j, "i": i, "kind": "ghost"}
                    c = compare("recursion vs closed form", idx, rec.ghost(j, i),
                                shelves.closed_form_ghost(k, j, i, cfg.order))
                    if c:
                        return c
            return None
        yield {"k": k, "j_max": cfg.j_max}, cell


def _edge_match(cfg):
    for k in cfg.ks:
        for j in range(1, cfg.j_max + 1):
            idx = {"k": k, "j": j}
            yield idx, lambda k=k, j=j, idx=idx: compare(
                "edge matching", idx, shelves.closed_form_official(k, j - 1, k, cfg.order),
                shelves.closed_form_official(k, j, 1, cfg.order))


def eh_certificate(rep):
    if rep.passed:
        return None
    idx = {"k": rep.k, "j": rep.j, "i": rep.i, "kind": rep.kind}
    check = f"empirical hypothesis ({rep.strength})"
    if rep.f < 1:
        return {"check": check, "indices": idx, "exponent": 0, "expected": "1", "actual": str(1 + rep.leading)}
    if rep.f < rep.required:
        return {"check": check, "indices": idx, "exponent": rep.f, "expected": "0", "actual": str(rep.leading)}
    actual = rep.leading if rep.f == rep.required else 0
    return {"check": check, "indices": idx, "exponent": rep.required, "expected": "1", "actual": str(actual)}


def eh_order(j):
    return 2 * (j + 2)


def _eh(cfg):
    for k in cfg.ks:
        for j in range(cfg.j_max + 1):
            for kind in ("official", "ghost"):
                for i in range(1 if kind == "official" else 2, k + 1):
                    idx = {"k": k, "j": j, "i": i, "kind": kind}

                    def cell(k=k, j=j, i=i, kind=kind):
                        N = eh_order(j)
                        table = shelves.ShelfTable(k=k, order=N)
                        if kind == "official":
                            table.officials[(k - 1) * j + i] = shelves.closed_form_official(k, j, i, N)
                        else:
                            table.ghosts[(k - 1) * j + i] = shelves.closed_form_ghost(k, j, i, N)
                        rep = shelves.eh_check(table, j, i, cfg.strength, ghost=kind == "ghost")
                        return eh_certificate(rep), rep
                    yield idx, cell


def _matrix(cfg):
    N = cfg.order
    for k in cfg.ks:
        for j in range(1, cfg.j_max + 1):
            idx = {"k": k, "j": j}

            def cell(k=k, j=j, idx=idx):
                A = hmatrix.build_transfer(k, j, "A", N)
                vj = [shelves.closed_form_official(k, j, l, N) for l in range(1, k + 1)]
                down = hmatrix.apply(A, vj)
                for i in range(1, k + 1):
                    c = compare("A times shelf vector", dict(idx, i=i), down[i - 1],
                                shelves.closed_form_official(k, j - 1, i, N))
                    if c:
                        return c
                Bt = hmatrix.build_transfer(k, j, "Btilde", N)
                ghosts = hmatrix.apply(Bt, vj)
                for m in range(1, k):
                    c = compare("Btilde times shelf vector", dict(idx, i=m + 1), ghosts[m - 1],
                                shelves.closed_form_ghost(k, j, m + 1, N))
                    if c:
                        return c
                wide = hmatrix.build_transfer(k, j, "A", N + (k - 2) * j)
                B = hmatrix.build_transfer(k, j, "B", N)
                prod = hmatrix.matmul(wide.entries, B.entries)
                for a in range(k):
                    for b in range(k):
                        want = Series.one(N) if a == b else Series.zero(N)
                        c = compare("A B = I", dict(idx, row=a + 1, col=b + 1), prod[a][b], want, N)
                        if c:
                            return c
                for J in range(j):
                    stepped = hmatrix.h_step(hmatrix.h_build(k, J, j - 1, N))
                    built = hmatrix.h_build(k, J, j, N)
                    for a in range(k):
                        for b in range(k):
                            c = compare("h_step vs A product", dict(idx, J=J, i=a + 1, l=b + 1),
                                        stepped.entries[a][b], built.entries[a][b])
                            if c:
                                return c
                    bad = hmatrix.parity_violations(built)
                    if bad:
                        a, b = bad[0]
                        s = built.entry(a, b)
                        return {"check": "parity vanishing", "indices": dict(idx, J=J, i=a, l=b),
                                "exponent": s.valuation, "expected": "0", "actual": str(s[s.valuation])}
                    neg = hmatrix.negative_coefficients(built)
                    if neg:
                        a, b = neg[0]
                        s = built.entry(a, b)
                        e = next(s.valuation + t for t, x in enumerate(s.coeffs) if x < 0)
                        return {"check": "nonnegative h coefficients", "indices": dict(idx, J=J, i=a, l=b),
                                "exponent": e, "expected": ">= 0", "actual": str(s[e])}
                start = hmatrix.h_build(k, j, j, N)
                for a in range(k):
                    for b in range(k):
                        want = Series.one(N) if a == b else Series.zero(N)
                        c = compare("identity at J", dict(idx, J=j, i=a + 1, l=b + 1), start.entries[a][b], want)
                        if c:
                            return c
                return None
            yield idx, cell


def _h_limit(cfg):
    for k in cfg.ks:
        for J in range(cfg.J_max + 1):
            for i in range(1, k + 1):
                idx = {"k": k, "J": J, "i": i}

                def cell(k=k, J=J, i=i, idx=idx):
                    try:
                        lim, steps = hmatrix.h_limit(k, J, i, cfg.order, return_steps=True)
                    except NoStabilization as exc:
                        return {"check": "h limit stabilisation", "indices": idx, "exponent": None,
                                "expected": "stabilised", "actual": str(exc)}
                    c = compare("h limit vs closed form", idx, lim, shelves.closed_form_official(k, J, i, cfg.order))
                    return c, {"steps": steps}
                yield idx, cell


def _hcomb(cfg):
    N = cfg.n_max
    for k in cfg.ks:
        for J in range(cfg.J_max + 1):
            idx = {"k": k, "J": J, "j": J + 1, "case": "initial rows"}

            def init(k=k, J=J, idx=idx):
                stepped = hmatrix.h_step(hmatrix.identity(k, J, N))
                for i in range(1, k + 1):
                    row = hmatrix.initial_row(k, J, i, N)
                    for l in range(1, k + 1):
                        c = compare("initial h row", dict(idx, i=i, l=l), stepped.entry(i, l), row[l - 1])
                        if c:
                            return c
                return None
            yield idx, init
            for j in range(J + 1, J + cfg.span + 1):
                idx = {"k": k, "J": J, "j": j}

                def cell(k=k, J=J, j=j, idx=idx):
                    h = hmatrix.h_build(k, J, j, N)
                    for i in range(1, k + 1):
                        for l in range(1, k + 1):
                            c = compare("h entry vs h count", dict(idx, i=i, l=l),
                                        _counts(partitions.h_counts(k, J, j, l, i, N)), h.entry(i, l))
                            if c:
                                return c
                    return None
                yield idx, cell


def _pentagonal(order):
    terms = {}
    g = 0
    while g * (3 * g - 1) // 2 <= order:
        for e in {g * (3 * g - 1) // 2, g * (3 * g + 1) // 2}:
            terms[e] = terms.get(e, 0) + (-1) ** g
        g += 1
    return Series.from_dict(terms, order)


def _jacobi(cfg):
    yield {"check": "euler"}, lambda: compare("euler product vs pentagonal sum", {"order": cfg.order},
                                              euler_infty(cfg.order), _pentagonal(cfg.order))
    for k in cfg.ks:
        for i in range(1, k + 1):
            idx = {"k": k, "i": i}
            yield idx, lambda k=k, i=i, idx=idx: compare(
                "product side vs theta quotient", idx, theta_quotient(k, i, cfg.order), product_side(k, i, cfg.order))


def _dictionary(cfg):
    N = cfg.order
    for k in cfg.ks:
        for i in range(1, k + 1):
            idx = {"k": k, "i": i}

            def base(k=k, i=i, idx=idx):
                direct = xq.jtilde(k, i, N)
                bad = xq.first_mismatch(direct, xq.jtilde_via_h(k, i, N))
                if bad:
                    a, b, x, y = bad
                    return {"check": "direct sum vs substituted H-form", "indices": dict(idx, a=a),
                            "exponent": b, "expected": str(y), "actual": str(x)}
                return compare("x = 1 specialisation vs product side", dict(idx, j=0),
                               xq.specialize(xq.jtilde(k, k - i + 1, N), 0), product_side(k, i, N))
            yield dict(idx, check="base"), base
        for i in range(1, k):
            idx = {"k": k, "i": i, "check": "construction"}

            def construction(k=k, i=i, idx=idx):
                bad = xq.first_mismatch(xq.construction_lhs(k, i, N), xq.construction_rhs(k, i, N))
                if bad:
                    a, b, x, y = bad
                    return {"check": "ghost construction identity", "indices": dict(idx, a=a),
                            "exponent": b, "expected": str(y), "actual": str(x)}
                return None
            yield idx, construction
        for j in range(cfg.j_max + 1):
            idx = {"k": k, "j": j}

            def cell(k=k, j=j, idx=idx):
                for i in range(1, k + 1):
                    c = compare("official dictionary", dict(idx, i=i),
                                xq.specialize(xq.jtilde(k, k - i + 1, N), j), shelves.closed_form_official(k, j, i, N))
                    if c:
                        return c
                for i in range(2, k + 1):
                    c = compare("ghost dictionary", dict(idx, i=i),
                                xq.specialize(xq.jtildetilde(k, k - i + 1, N), j), shelves.closed_form_ghost(k, j, i, N))
                    if c:
                        return c
                return None
            yield idx, cell
    small = min(N, 40)
    for n in range(4):
        for j in range(min(cfg.j_max, 5) + 1):
            idx = {"n": n, "j": j, "check": "gap filling"}

            def gap(n=n, j=j, idx=idx):
                first, filled, cancelled = xq.gap_filling_sides(n, j, small)
                return _first(compare("gap filling (filled form)", idx, filled, first),
                              compare("gap filling (cancelled form)", idx, cancelled, first))
            yield idx, gap
    for n in range(3):
        for i in range(1, max(cfg.ks)):
            idx = {"n": n, "i": i, "check": "factorisation"}

            def fact(n=n, i=i, idx=idx):
                left, right = xq.factorization_sides(n, i, (2 * n + 1) * (i + 1) + 2)
                bad = xq.first_mismatch(left, right)
                if bad:
                    a, b, x, y = bad
                    return {"check": "factorisation", "indices": dict(idx, a=a), "exponent": b,
                            "expected": str(y), "actual": str(x)}
                return None
            yield idx, fact


def _ghost_decomposition(cfg):
    for k in cfg.ks:
        for J in range(cfg.J_max + 1):
            for i in range(2, k + 1):
                idx = {"k": k, "J": J, "i": i}

                def cell(k=k, J=J, i=i, idx=idx):
                    bad = shelves.ghost_decomposition_mismatch(k, J, i, cfg.order)
                    return shelves.mismatch_certificate("ghost decomposition", idx, bad) if bad else None
                yield idx, cell
                if i == k:
                    cidx = dict(idx, check="count")

                    def count(k=k, J=J, cidx=cidx):
                        return compare("ghost decomposition count", cidx,
                                       _counts(partitions.ghost_counts(k, (k - 1) * J + k, cfg.n_max)),
                                       _counts(partitions.official_counts(k, (k - 1) * (J + 1) + 2, cfg.n_max)))
                    yield cidx, count


SUITES = {
    "andrews-bressoud": _andrews_bressoud,
    "shelf-j": _shelf_j,
    "ghosts": _ghosts,
    "recursion": _recursion,
    "edge-match": _edge_match,
    "eh": _eh,
    "matrix": _matrix,
    "h-limit": _h_limit,
    "hcomb": _hcomb,
    "jacobi": _jacobi,
    "dictionary": _dictionary,
    "ghost-decomposition": _ghost_decomposition,
}


def cells(suite, cfg):
    if suite == "all":
        return [c for name in SUITES for c in cells(name, cfg)]
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    return [Cell(suite, idx, fn) for idx, fn in SUITES[suite](cfg)]


def _execute(cell):
    try:
        out = cell.run()
    except Falsified as exc:
        out = exc.certificate
    detail = None
    if isinstance(out, tuple):
        out, detail = out
        if isinstance(detail, shelves.EHReport):
            detail = {"f": detail.f, "required": detail.required, "strength": detail.strength}
    if out is not None:
        out = dict(out, suite=cell.suite)
    return Outcome(cell.suite, cell.indices, out, detail)


def run(suite, cfg=Config(), jobs=1):
    todo = cells(suite, cfg)
    if jobs <= 1:
        outcomes = [_execute(c) for c in todo]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_execute, todo))
    return Report(suite, outcomes)


def eh_reports(cfg):
    """EHReport objects in cell order (for CSV output)."""
    out = []
    for c in cells("eh", cfg):
        _, rep = c.run()
        out.append(rep)
    return out
