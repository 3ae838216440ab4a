"""Extended complex plane, sectors and Moebius maps.

Points of C u {inf} are kept in homogeneous form ``(num, den)`` so that poles
are represented rather than trapped.  Rescaling of homogeneous coordinates is
always done by powers of two, which is exact in binary floating point.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Union

from .errors import DomainError, InvalidElementError

DEFAULT_EQ_TOL = 1e-12
DEFAULT_ARG_TOL = 1e-12

Number = Union[int, float, complex]


def _pow2_exponent(m: float) -> int:
    """Exponent k with m / 2**k in [1/2, 1)."""
    return math.frexp(m)[1]


def _scale(z: complex, k: int) -> complex:
    return complex(math.ldexp(z.real, -k), math.ldexp(z.imag, -k))


@dataclass(frozen=True)
class ExtendedComplex:
    """A point of the Riemann sphere as a homogeneous pair ``num/den``."""

    num: complex
    den: complex

    def __post_init__(self) -> None:
        object.__setattr__(self, "num", complex(self.num))
        object.__setattr__(self, "den", complex(self.den))
        if self.num == 0 and self.den == 0:
            raise DomainError("(0, 0) is not a point of the extended plane")
        if not (cmath.isfinite(self.num) and cmath.isfinite(self.den)):
            raise DomainError("homogeneous coordinates must be finite")

    @classmethod
    def of(cls, z: Union["ExtendedComplex", Number]) -> "ExtendedComplex":
        """Coerce a number (``inf`` allowed) or an existing point."""
        if isinstance(z, ExtendedComplex):
            return z
        z = complex(z)
        if cmath.isinf(z):
            return INF
        if cmath.isnan(z):
            raise DomainError("NaN is not a point of the extended plane")
        return cls(z, 1.0)

    @property
    def is_infinite(self) -> bool:
        return self.den == 0

    @property
    def is_zero(self) -> bool:
        return self.num == 0

    def value(self) -> complex:
        """Affine value; ``complex('inf')`` for the point at infinity."""
        if self.den == 0:
            return complex(math.inf, 0.0)
        return self.num / self.den

    def normalized(self) -> "ExtendedComplex":
        """Same point, coordinates rescaled so the larger modulus is in [1/2, 2]."""
        m = max(abs(self.num), abs(self.den))
        if 0.5 <= m <= 2.0:
            return self
        k = _pow2_exponent(m)
        return ExtendedComplex(_scale(self.num, k), _scale(self.den, k))

    def __repr__(self) -> str:
        if self.is_infinite:
            return "ExtendedComplex(inf)"
        return f"ExtendedComplex({self.value()!r})"


INF = ExtendedComplex(1.0, 0.0)
ZERO = ExtendedComplex(0.0, 1.0)


def excomplex_eq(x: ExtendedComplex, y: ExtendedComplex, tol: float = DEFAULT_EQ_TOL) -> bool:
    """Cross-multiplied projective equality.

    Both points are first normalized (exact power-of-two rescaling), so the
    absolute floor of 1 in the comparison acts on coordinates of unit size.
    """
    x = ExtendedComplex.of(x).normalized()
    y = ExtendedComplex.of(y).normalized()
    lhs = x.num * y.den
    rhs = y.num * x.den
    return abs(lhs - rhs) <= tol * max(abs(lhs), abs(rhs), 1.0)


@dataclass(frozen=True)
class Sector:
    """Closed sector ``{z : |Arg z| <= half_angle}`` with 0 admitted as a member."""

    half_angle: float
    arg_tol: float = DEFAULT_ARG_TOL

    def __post_init__(self) -> None:
        if not (0.0 <= self.half_angle < math.pi / 2):
            raise DomainError(f"sector half-angle must lie in [0, pi/2), got {self.half_angle!r}")
        if self.arg_tol < 0:
            raise DomainError("arg_tol must be non-negative")

    def __contains__(self, z: object) -> bool:
        return sector_contains(z, self)  # type: ignore[arg-type]


def sector_contains(z: Union[ExtendedComplex, Number], s: Sector) -> bool:
    if isinstance(z, ExtendedComplex):
        if z.is_infinite:
            return False
        z = z.value()
    z = complex(z)
    if not cmath.isfinite(z):
        return False
    if z == 0:
        return True
    return abs(cmath.phase(z)) <= s.half_angle + s.arg_tol


@dataclass(frozen=True)
class MoebiusMap:
    """The map ``w -> (a w + b) / (c w + d)`` on the extended plane."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self) -> None:
        for name in "abcd":
            v = complex(getattr(self, name))
            if not cmath.isfinite(v):
                raise DomainError("Moebius map entries must be finite")
            object.__setattr__(self, name, v)
        if self.a * self.d - self.b * self.c == 0:
            raise DomainError("singular Moebius map (ad - bc = 0)")

    @classmethod
    def _trusted(cls, a: complex, b: complex, c: complex, d: complex) -> "MoebiusMap":
        # Products of nonsingular maps are nonsingular; after long chains the
        # floating-point determinant can still round to 0, so skip the check.
        m = object.__new__(cls)
        for name, v in zip("abcd", (a, b, c, d)):
            object.__setattr__(m, name, complex(v))
        return m

    @classmethod
    def identity(cls) -> "MoebiusMap":
        return cls(1, 0, 0, 1)

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    def renormalized(self) -> "MoebiusMap":
        m = max(abs(self.a), abs(self.b), abs(self.c), abs(self.d))
        if 0.5 <= m <= 2.0:
            return self
        k = _pow2_exponent(m)
        return MoebiusMap._trusted(_scale(self.a, k), _scale(self.b, k), _scale(self.c, k), _scale(self.d, k))

    def __matmul__(self, other: "MoebiusMap") -> "MoebiusMap":
        return mobius_compose(self, other)

    def __call__(self, w: Union[ExtendedComplex, Number]) -> ExtendedComplex:
        return mobius_apply(self, w)


def s_map(b: Number) -> MoebiusMap:
    """The elementary step ``w -> 1 / (b + w)``."""
    b = complex(b)
    if b == 0:
        raise InvalidElementError("continued fraction elements must be nonzero")
    return MoebiusMap(0, 1, 1, b)


def mobius_compose(m1: MoebiusMap, m2: MoebiusMap) -> MoebiusMap:
    """Matrix product ``m1 @ m2``, i.e. the map ``w -> m1(m2(w))``."""
    return MoebiusMap._trusted(
        m1.a * m2.a + m1.b * m2.c,
        m1.a * m2.b + m1.b * m2.d,
        m1.c * m2.a + m1.d * m2.c,
        m1.c * m2.b + m1.d * m2.d,
    ).renormalized()


def mobius_apply(m: MoebiusMap, w: Union[ExtendedComplex, Number]) -> ExtendedComplex:
    w = ExtendedComplex.of(w).normalized()
    return ExtendedComplex(m.a * w.num + m.b * w.den, m.c * w.num + m.d * w.den).normalized()
