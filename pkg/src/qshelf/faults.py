"""Fault injection for negative-control runs.

Every public pipeline passes its result through :func:`tap` under a fixed
name.  Normally that is a no-op.  A test harness (or ``--inject-fault`` on the
command line) may register a perturbation; the named pipeline then returns its
output with one coefficient shifted, and the verifiers downstream must report
the damage.
"""
import threading
from contextlib import contextmanager

PIPELINES = (
    "product_side",
    "theta_quotient",
    "euler_infty",
    "closed_form_official",
    "closed_form_ghost",
    "recursion",
    "transfer",
    "h_step",
    "h_build",
    "h_limit",
    "count_official",
    "count_ghost",
    "count_h",
    "jtilde",
    "jtildetilde",
)

_lock = threading.Lock()
_active = {}


def parse(text):
    """Parse ``NAME:EXPONENT[:DELTA]``."""
    fields = text.split(":")
    if len(fields) not in (2, 3) or fields[0] not in PIPELINES:
        raise ValueError(f"bad fault {text!r}; expected NAME:EXPONENT[:DELTA] with NAME in {PIPELINES}")
    delta = int(fields[2]) if len(fields) == 3 else 1
    if delta == 0:
        raise ValueError("fault delta must be nonzero")
    return fields[0], int(fields[1]), delta


def install(name, exponent, delta=1):
    with _lock:
        _active[name] = (exponent, delta)


def clear(name=None):
    with _lock:
        if name is None:
            _active.clear()
        else:
            _active.pop(name, None)


@contextmanager
def injected(name, exponent, delta=1):
    install(name, exponent, delta)
    try:
        yield
    finally:
        clear(name)


def active(name):
    return _active.get(name)


def tap(name, value):
    """Return ``value`` unchanged unless a fault is registered for ``name``.

    Handles series (anything with ``perturbed``) and numpy count arrays.
    """
    fault = _active.get(name)
    if fault is None:
        return value
    exponent, delta = fault
    if hasattr(value, "perturbed"):
        return value.perturbed(exponent, delta)
    out = value.copy()
    if 0 <= exponent < len(out):
        out[exponent] += delta
    return out
