"""Scalar backends: hardware binary64 and MPFR-based big floats.

Every kernel and verifier in this package is written against the small
context interface defined here, so the same code runs in hardware
precision and in configurable-precision arithmetic.  A big-float context
with ``d`` requested decimal digits uses a binary mantissa of
``ceil(d*log2(10)) + 32`` bits, round-to-nearest, which guarantees a
relative error of at most ``10**(1-d)`` per operation with guard bits to
spare.

Angles: ``atan2_half(y, x)`` returns ``arctan(y/x)/2`` folded into
``[-pi/4, pi/4]`` (``atan2(y, x)/2`` for ``x > 0``, ``atan2(-y, -x)/2``
for ``x < 0``), with ``0`` when ``y == 0`` and ``+/- pi/4`` when
``x == 0``.  Plain ``atan2/2`` would leave the quarter-circle for
negative ``x``; the folded form is the rotation-angle convention used
throughout.
"""

from __future__ import annotations

import math
from contextlib import nullcontext
from dataclasses import dataclass

import gmpy2

_LOG2_10 = math.log2(10.0)

# effective decimal digits of IEEE binary64, used in slack formulas 10^(k-d)
HW_DECIMAL_DIGITS = 16


@dataclass(frozen=True)
class Precision:
    """Numeric precision selector: kind 'hw' or 'big' (with decimal digits)."""

    kind: str
    decimal_digits: int | None = None

    def __post_init__(self):
        if self.kind not in ("hw", "big"):
            raise ValueError(f"unknown precision kind {self.kind!r}")
        if self.kind == "big":
            d = self.decimal_digits
            if not isinstance(d, int) or d < 30:
                raise ValueError("big-float precision needs decimal_digits >= 30")
        elif self.decimal_digits is not None:
            raise ValueError("hardware precision takes no digit count")

    @staticmethod
    def hardware() -> "Precision":
        return Precision("hw")

    @staticmethod
    def big(decimal_digits: int) -> "Precision":
        return Precision("big", decimal_digits)

    @staticmethod
    def parse(text: str) -> "Precision":
        """Parse a CLI-style precision flag: 'hw' or 'big:<digits>'."""
        if text == "hw":
            return Precision.hardware()
        if text.startswith("big:"):
            try:
                return Precision.big(int(text[4:]))
            except ValueError as exc:
                raise ValueError(f"bad precision flag {text!r}") from exc
        raise ValueError(f"bad precision flag {text!r} (expected hw|big:<digits>)")

    def spec(self) -> str:
        return "hw" if self.kind == "hw" else f"big:{self.decimal_digits}"


class HardwareContext:
    """IEEE binary64 backend over plain Python floats."""

    precision = Precision.hardware()
    decimal_digits = HW_DECIMAL_DIGITS

    def active(self):
        return nullcontext()

    def convert(self, x):
        return float(x)

    def zero(self):
        return 0.0

    def one(self):
        return 1.0

    def pi(self):
        return math.pi

    def sqrt_half(self):
        return math.sqrt(0.5)

    def sqrt(self, x):
        if x < 0:
            raise ValueError(f"sqrt of negative value {x!r}")
        return math.sqrt(x)

    def atan2_half(self, y, x):
        if y == 0.0:
            return 0.0
        if x == 0.0:
            return math.pi / 4 if y > 0 else -math.pi / 4
        if x > 0:
            return 0.5 * math.atan2(y, x)
        return 0.5 * math.atan2(-y, -x)

    def sin(self, x):
        return math.sin(x)

    def cos(self, x):
        return math.cos(x)

    def tan(self, x):
        return math.tan(x)

    def tol(self, k: int) -> float:
        """Slack 10**(k - d) for checks documented as c*10^(k-d)."""
        return 10.0 ** (k - self.decimal_digits)

    def from_decimal(self, text: str):
        return float(text)

    def to_decimal(self, x) -> str:
        return repr(float(x))


class BigContext:
    """MPFR backend at ceil(d*log2(10)) + 32 bits, round-to-nearest."""

    def __init__(self, decimal_digits: int):
        self.precision = Precision.big(decimal_digits)
        self.decimal_digits = decimal_digits
        self.mantissa_bits = math.ceil(decimal_digits * _LOG2_10) + 32
        self._gctx = gmpy2.context(precision=self.mantissa_bits)
        # digits that make decimal serialization round-trip exactly
        self._io_digits = math.floor(self.mantissa_bits * math.log10(2.0)) + 3

    def active(self):
        # fresh copy per with-block; gmpy2 contexts are thread-local on entry
        return gmpy2.context(self._gctx)

    def convert(self, x):
        with self.active():
            return gmpy2.mpfr(x)

    def zero(self):
        return gmpy2.mpfr(0)

    def one(self):
        with self.active():
            return gmpy2.mpfr(1)

    def pi(self):
        with self.active():
            return gmpy2.const_pi()

    def sqrt_half(self):
        with self.active():
            return gmpy2.sqrt(gmpy2.mpfr(2)) / 2

    def sqrt(self, x):
        if x < 0:
            raise ValueError(f"sqrt of negative value {x!r}")
        with self.active():
            return gmpy2.sqrt(x)

    def atan2_half(self, y, x):
        with self.active():
            if y == 0:
                return gmpy2.mpfr(0)
            if x == 0:
                q = gmpy2.const_pi() / 4
                return q if y > 0 else -q
            if x > 0:
                return gmpy2.atan2(y, x) / 2
            return gmpy2.atan2(-y, -x) / 2

    def sin(self, x):
        with self.active():
            return gmpy2.sin(x)

    def cos(self, x):
        with self.active():
            return gmpy2.cos(x)

    def tan(self, x):
        with self.active():
            return gmpy2.tan(x)

    def tol(self, k: int):
        with self.active():
            return gmpy2.mpfr(f"1e{k - self.decimal_digits}")

    def from_decimal(self, text: str):
        with self.active():
            return gmpy2.mpfr(text)

    def to_decimal(self, x) -> str:
        if not isinstance(x, gmpy2.mpfr):
            x = self.convert(x)
        if gmpy2.is_zero(x):
            return "-0" if gmpy2.is_signed(x) else "0"
        sign = "-" if x < 0 else ""
        digs, exp, _ = abs(x).digits(10, self._io_digits)
        return f"{sign}{digs[0]}.{digs[1:]}e{exp - 1}"


def context(precision: Precision):
    """Build the scalar context for a precision selector."""
    if precision.kind == "hw":
        return HardwareContext()
    return BigContext(precision.decimal_digits)


def format_truncated(x, digits: int = 50) -> str:
    """Render a big-float with its mantissa truncated (not rounded) to
    ``digits`` figures, in the layout used by the experiment tables:
    values in [1, 10) as ``d.<digits>``, values in [0.1, 1) as
    ``0.<digits>``, anything else as ``0.<digits>e<exp>``.
    """
    if x == 0:
        return "0"
    sign = "-" if x < 0 else ""
    digs, exp, _ = abs(x).digits(10, digits + 25)
    if exp == 1:
        return f"{sign}{digs[0]}.{digs[1:digits + 1]}"
    if exp == 0:
        return f"{sign}0.{digs[:digits]}"
    return f"{sign}0.{digs[:digits]}e{exp}"
