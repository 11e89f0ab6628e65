"""Exact rational scalars plus a log-domain representation for huge ratios.

Every indicator value below the size threshold is an ordinary
``fractions.Fraction`` (aliased ``ExactScalar``).  Sweeps at large n
switch to ``LogScalar``, which stores a sign and the natural log of the
magnitude so that quantities like E[X_1000^999] (thousands of digits)
stay representable.
"""

from __future__ import annotations

import math
from fractions import Fraction

# Fraction already guarantees everything we need from an exact scalar:
# construction normalizes to lowest terms with a positive denominator,
# arithmetic is exact and division by zero raises.
ExactScalar = Fraction

_LN10 = math.log(10.0)


def exact_to_float(x):
    """Nearest double for an int or Fraction.

    Values beyond the double range collapse to +/-inf instead of raising.
    """
    try:
        return float(x)
    except OverflowError:
        return math.inf if x > 0 else -math.inf


def exact_to_float_flagged(x):
    """Like exact_to_float but also reports whether overflow happened."""
    f = exact_to_float(x)
    return f, math.isinf(f)


def _log_abs(x):
    # math.log handles arbitrarily large ints directly.  Fractions do not
    # support math.log once they exceed the double range, so split them.
    if isinstance(x, Fraction):
        return math.log(abs(x.numerator)) - math.log(x.denominator)
    return math.log(abs(x))


class LogScalar:
    """A real number held as (sign, ln|value|).

    Multiplication and division are exact in log space.  Addition of
    same-sign operands uses log-sum-exp, which costs about one ulp of
    relative error per operation, far below the 2^-40 budget.  Instances
    are immutable; share them freely between threads.
    """

    __slots__ = ("sign", "logmag")

    def __init__(self, sign, logmag):
        if sign not in (-1, 0, 1):
            raise ValueError("sign must be -1, 0 or +1")
        if sign == 0 or logmag == -math.inf:
            sign, logmag = 0, -math.inf
        self.sign = sign
        self.logmag = float(logmag)

    @classmethod
    def zero(cls):
        return cls(0, -math.inf)

    @classmethod
    def one(cls):
        return cls(1, 0.0)

    @classmethod
    def from_exact(cls, x):
        """Build from an int or Fraction of any size."""
        if x == 0:
            return cls.zero()
        return cls(1 if x > 0 else -1, _log_abs(x))

    @classmethod
    def from_float(cls, x):
        if x == 0.0:
            return cls.zero()
        return cls(1 if x > 0 else -1, math.log(abs(x)))

    def to_float(self):
        if self.sign == 0:
            return 0.0
        try:
            return self.sign * math.exp(self.logmag)
        except OverflowError:
            return self.sign * math.inf

    def log10(self):
        """log10 of the value; requires a positive value."""
        if self.sign <= 0:
            raise ValueError("log10 of a non-positive LogScalar")
        return self.logmag / _LN10

    def __bool__(self):
        return self.sign != 0

    def __neg__(self):
        return LogScalar(-self.sign, self.logmag)

    def __abs__(self):
        return LogScalar(abs(self.sign), self.logmag)

    def __mul__(self, other):
        other = _coerce(other)
        if self.sign == 0 or other.sign == 0:
            return LogScalar.zero()
        return LogScalar(self.sign * other.sign, self.logmag + other.logmag)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other.sign == 0:
            raise ZeroDivisionError("LogScalar division by zero")
        if self.sign == 0:
            return LogScalar.zero()
        return LogScalar(self.sign * other.sign, self.logmag - other.logmag)

    def __add__(self, other):
        other = _coerce(other)
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        hi, lo = (self, other) if self.logmag >= other.logmag else (other, self)
        if self.sign == other.sign:
            return LogScalar(self.sign,
                             hi.logmag + math.log1p(math.exp(lo.logmag - hi.logmag)))
        if hi.logmag == lo.logmag:
            return LogScalar.zero()
        # Opposite signs: the larger magnitude wins.  log1p keeps this
        # accurate unless the two magnitudes nearly cancel.
        return LogScalar(hi.sign,
                         hi.logmag + math.log1p(-math.exp(lo.logmag - hi.logmag)))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __pow__(self, k):
        if not isinstance(k, int):
            raise TypeError("only integer powers are supported")
        if self.sign == 0:
            if k <= 0:
                raise ZeroDivisionError("0 ** nonpositive power")
            return LogScalar.zero()
        sign = self.sign if k % 2 else abs(self.sign)
        return LogScalar(sign, self.logmag * k)

    def _cmp(self, other):
        other = _coerce(other)
        if self.sign != other.sign:
            return -1 if self.sign < other.sign else 1
        if self.sign == 0:
            return 0
        if self.logmag == other.logmag:
            return 0
        bigger_mag = 1 if self.logmag > other.logmag else -1
        return bigger_mag * self.sign

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        if not isinstance(other, (LogScalar, int, float, Fraction)):
            return NotImplemented
        return self._cmp(other) == 0

    def __hash__(self):
        return hash((self.sign, self.logmag))

    def __repr__(self):
        if self.sign == 0:
            return "LogScalar(0)"
        return "LogScalar(sign=%+d, logmag=%r)" % (self.sign, self.logmag)


def _coerce(x):
    if isinstance(x, LogScalar):
        return x
    if isinstance(x, (int, Fraction)):
        return LogScalar.from_exact(x)
    if isinstance(x, float):
        return LogScalar.from_float(x)
    raise TypeError("cannot mix LogScalar with %r" % type(x).__name__)


def log_ratio(num, den):
    """log10(num/den) as a double.

    Accepts LogScalar, int or Fraction operands.  The denominator must be
    nonzero and the ratio positive.
    """
    num = _coerce(num)
    den = _coerce(den)
    if den.sign == 0:
        raise ZeroDivisionError("log_ratio with zero denominator")
    if num.sign * den.sign <= 0:
        raise ValueError("log_ratio of a non-positive ratio")
    return (num.logmag - den.logmag) / _LN10


class RootExpr:
    """An exact quantity of the form ratio * sqrt(radicand).

    Centroid distances and angle cosines are generally irrational but
    always land in this shape, so they can be stored, compared and
    squared without ever rounding.  The radicand must be nonnegative.
    """

    __slots__ = ("ratio", "radicand")

    def __init__(self, ratio, radicand=Fraction(1)):
        ratio = Fraction(ratio)
        radicand = Fraction(radicand)
        if radicand < 0:
            raise ValueError("radicand must be nonnegative")
        self.ratio = ratio
        self.radicand = radicand

    @classmethod
    def sqrt(cls, x):
        """The square root of a nonnegative rational, kept exact."""
        return cls(Fraction(1), x)

    def squared(self):
        return self.ratio * self.ratio * self.radicand

    @property
    def sign(self):
        if self.ratio == 0 or self.radicand == 0:
            return 0
        return 1 if self.ratio > 0 else -1

    def __float__(self):
        return exact_to_float(self.ratio) * math.sqrt(exact_to_float(self.radicand))

    def __iter__(self):
        # allow "ratio, radicand = expr"
        return iter((self.ratio, self.radicand))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RootExpr(other)
        if not isinstance(other, RootExpr):
            return NotImplemented
        return self.sign == other.sign and self.squared() == other.squared()

    def __hash__(self):
        return hash((self.sign, self.squared()))

    def __lt__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RootExpr(other)
        if self.sign != other.sign:
            return self.sign < other.sign
        if self.sign >= 0:
            return self.squared() < other.squared()
        return self.squared() > other.squared()

    def __le__(self, other):
        return self == other or self < other

    def __repr__(self):
        if self.radicand == 1:
            return "RootExpr(%s)" % self.ratio
        return "RootExpr(%s, sqrt %s)" % (self.ratio, self.radicand)

    def __str__(self):
        if self.radicand == 1:
            return str(self.ratio)
        if self.ratio == 1:
            return "sqrt(%s)" % self.radicand
        return "%s*sqrt(%s)" % (self.ratio, self.radicand)
