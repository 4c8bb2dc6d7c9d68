"""Exception types.

Two families: misuse errors (``NotAUnit``, ``OrderTooLow``, ``NoStabilization``)
signal a bug in the caller, while ``Falsified`` and its subclasses carry a
machine-readable counterexample certificate meaning an identity failed at the
current truncation.
"""


class QShelfError(Exception):
    pass


class NotAUnit(QShelfError):
    def __init__(self, leading):
        super().__init__(f"divisor leading coefficient {leading} is not +-1")
        self.leading = leading


class OrderTooLow(QShelfError):
    pass


class NoStabilization(QShelfError):
    pass


class Falsified(QShelfError):
    """An identity failed; ``certificate`` is a JSON-ready dict."""

    def __init__(self, certificate):
        self.certificate = dict(certificate)
        super().__init__(self._describe())

    def _describe(self):
        c = self.certificate
        parts = [c.get("check", "check")]
        if "indices" in c:
            parts.append(", ".join(f"{key}={val}" for key, val in c["indices"].items()))
        if "exponent" in c:
            parts.append(f"first bad exponent {c['exponent']}")
        if "expected" in c:
            parts.append(f"expected {c['expected']} got {c.get('actual')}")
        return ": ".join(parts)


class NotDivisible(Falsified):
    """Strict division by q^m found a nonzero coefficient below q^m."""

    def __init__(self, exponent, coefficient):
        self.exponent = exponent
        self.coefficient = coefficient
        super().__init__({
            "check": "q-power division",
            "exponent": exponent,
            "expected": "0",
            "actual": str(coefficient),
        })


class RecursionFailed(Falsified):
    pass
