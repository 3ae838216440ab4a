"""Convergents, tails and reverse sequences of ``K(1/b_n)``.

Element indices are 1-based throughout, as in the usual notation
``1/(b_1 + 1/(b_2 + ...))``.  The Wallis-Euler numerators and denominators
are carried with a shared power-of-two scale so long chains neither overflow
nor underflow; every ratio built from them is unaffected by the rescaling.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Sequence, Union

from .errors import DomainError, InvalidElementError
from .projective import ExtendedComplex, Number, Sector, s_map, sector_contains

RESCALE_LOW = 1e-8
RESCALE_HIGH = 1e8


@dataclass(frozen=True)
class ElementSequence:
    """A finite, materialized run of nonzero elements ``b_1 .. b_count``.

    ``even_ratio_sup`` and ``odd_ratio_sup`` hold closed-form values of
    ``sup_n |b_2n / b_2n-1|`` and ``sup_n |b_2n-1 / b_2n|`` over the whole
    (possibly infinite) family when the generator knows them; ``summable``
    records whether ``sum |b_n|`` is finite for the infinite family.
    """

    elements: tuple
    kind: str = "list"
    sector: Optional[Sector] = None
    even_ratio_sup: Optional[float] = None
    odd_ratio_sup: Optional[float] = None
    summable: Optional[bool] = None
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        elems = tuple(complex(b) for b in self.elements)
        if not elems:
            raise DomainError("an element sequence needs at least one element")
        for i, b in enumerate(elems, start=1):
            if b == 0:
                raise InvalidElementError(f"element b_{i} is zero")
            if not cmath.isfinite(b):
                raise InvalidElementError(f"element b_{i} is not finite")
            if self.sector is not None and not sector_contains(b, self.sector):
                raise DomainError(
                    f"element b_{i} = {b!r} lies outside the declared sector "
                    f"(half-angle {self.sector.half_angle!r})"
                )
        object.__setattr__(self, "elements", elems)

    @classmethod
    def from_list(cls, elements: Sequence[Number], sector: Optional[Sector] = None) -> "ElementSequence":
        return cls(tuple(elements), "list", sector)

    @classmethod
    def geometric(cls, b0: Number, ratio: Number, count: int, sector: Optional[Sector] = None) -> "ElementSequence":
        """``b_n = b0 * ratio**n`` for n = 1..count."""
        b0, ratio = complex(b0), complex(ratio)
        _check_count(count)
        if ratio == 0:
            raise InvalidElementError("geometric ratio must be nonzero")
        r = abs(ratio)
        return cls(
            tuple(b0 * ratio**n for n in range(1, count + 1)),
            "geometric",
            sector,
            even_ratio_sup=r,
            odd_ratio_sup=1.0 / r,
            summable=r < 1,
            params={"b0": b0, "ratio": ratio, "count": count},
        )

    @classmethod
    def constant(cls, b: Number, count: int, sector: Optional[Sector] = None) -> "ElementSequence":
        b = complex(b)
        _check_count(count)
        return cls(
            (b,) * count,
            "constant",
            sector,
            even_ratio_sup=1.0,
            odd_ratio_sup=1.0,
            summable=False,
            params={"b": b, "count": count},
        )

    @classmethod
    def from_callback(
        cls, fn: Callable[[int], Number], count: int, sector: Optional[Sector] = None, **meta
    ) -> "ElementSequence":
        _check_count(count)
        return cls(tuple(fn(n) for n in range(1, count + 1)), "custom", sector, **meta)

    @property
    def count(self) -> int:
        return len(self.elements)

    def b(self, n: int) -> complex:
        """The element ``b_n`` (1-based)."""
        if not 1 <= n <= self.count:
            raise DomainError(f"element index {n} outside 1..{self.count}")
        return self.elements[n - 1]

    def scaled(self, w: Number) -> "ElementSequence":
        """The sequence ``w * b_n`` (same kind of family, no closed-form metadata)."""
        w = complex(w)
        if w == 0:
            raise InvalidElementError("scale factor must be nonzero")
        return ElementSequence(
            tuple(w * b for b in self.elements),
            self.kind,
            even_ratio_sup=self.even_ratio_sup,
            odd_ratio_sup=self.odd_ratio_sup,
            summable=self.summable,
        )

    def __len__(self) -> int:
        return self.count

    def __iter__(self) -> Iterator[complex]:
        return iter(self.elements)


def _check_count(count: int) -> None:
    if not isinstance(count, int) or count < 1:
        raise DomainError(f"count must be a positive integer, got {count!r}")


@dataclass(frozen=True)
class ConvergentState:
    """Rolling Wallis-Euler state at index ``n``.

    The stored values are the true ``A_n, A_{n-1}, B_n, B_{n-1}`` divided by
    ``scale = 2**scale_exp``.
    """

    a_cur: complex
    a_prev: complex
    b_cur: complex
    b_prev: complex
    n: int = 0
    scale_exp: int = 0

    @classmethod
    def start(cls) -> "ConvergentState":
        """Index 0: ``A_0 = 0, A_-1 = 1, B_0 = 1, B_-1 = 0``."""
        return cls(0j, 1 + 0j, 1 + 0j, 0j, 0, 0)

    @classmethod
    def initial(cls, b1: Number) -> "ConvergentState":
        return wallis_euler_step(cls.start(), b1)

    @property
    def scale(self) -> float:
        try:
            return math.ldexp(1.0, self.scale_exp)
        except OverflowError:
            return math.inf

    def determinant(self) -> complex:
        """``A_n B_{n-1} - A_{n-1} B_n`` on the stored (rescaled) values."""
        return self.a_cur * self.b_prev - self.a_prev * self.b_cur

    def expected_determinant(self) -> float:
        """``(-1)**(n-1) / scale**2``; may underflow to 0 for huge scales."""
        sign = 1.0 if (self.n - 1) % 2 == 0 else -1.0
        return math.ldexp(sign, -2 * self.scale_exp)

    def condition(self) -> float:
        """Condition number of the matrix ``[[A_n, A_{n-1}], [B_n, B_{n-1}]]`` (1-norm).

        Round trips such as ``f_n(t_n(w))`` lose about ``condition() * eps``
        relative accuracy in binary64, whatever the evaluation order.
        """
        det = abs(self.expected_determinant())
        if det == 0:
            return math.inf
        return (abs(self.a_cur) + abs(self.b_cur)) * (abs(self.a_prev) + abs(self.b_prev)) / det

    def convergent(self) -> ExtendedComplex:
        return ExtendedComplex(self.a_cur, self.b_cur).normalized()

    def at(self, w: Union[ExtendedComplex, Number]) -> ExtendedComplex:
        """``f_n(w) = (A_n + w A_{n-1}) / (B_n + w B_{n-1})``."""
        w = ExtendedComplex.of(w).normalized()
        return ExtendedComplex(
            self.a_cur * w.den + w.num * self.a_prev,
            self.b_cur * w.den + w.num * self.b_prev,
        ).normalized()

    def tail(self, w: Union[ExtendedComplex, Number]) -> ExtendedComplex:
        """``t_n(w) = (A_n - w B_n) / (-A_{n-1} + w B_{n-1})``."""
        w = ExtendedComplex.of(w).normalized()
        return ExtendedComplex(
            self.a_cur * w.den - w.num * self.b_cur,
            -self.a_prev * w.den + w.num * self.b_prev,
        ).normalized()

    def reverse(self, w: Union[ExtendedComplex, Number]) -> ExtendedComplex:
        """``r_{n+1}(w) = (B_{n-1} + w A_{n-1}) / (B_n + w A_n)``."""
        w = ExtendedComplex.of(w).normalized()
        return ExtendedComplex(
            self.b_prev * w.den + w.num * self.a_prev,
            self.b_cur * w.den + w.num * self.a_cur,
        ).normalized()


def wallis_euler_step(state: ConvergentState, b: Number) -> ConvergentState:
    b = complex(b)
    if b == 0:
        raise InvalidElementError("continued fraction elements must be nonzero")
    a_new = b * state.a_cur + state.a_prev
    b_new = b * state.b_cur + state.b_prev
    a_prev, b_prev = state.a_cur, state.b_cur
    exp = state.scale_exp
    m = max(abs(a_new), abs(a_prev), abs(b_new), abs(b_prev))
    if m > RESCALE_HIGH or m < RESCALE_LOW:
        k = math.frexp(m)[1]
        a_new, a_prev = _ldexp_c(a_new, -k), _ldexp_c(a_prev, -k)
        b_new, b_prev = _ldexp_c(b_new, -k), _ldexp_c(b_prev, -k)
        exp += k
    return ConvergentState(a_new, a_prev, b_new, b_prev, state.n + 1, exp)


def _ldexp_c(z: complex, k: int) -> complex:
    return complex(math.ldexp(z.real, k), math.ldexp(z.imag, k))


def iter_states(seq: ElementSequence, upto: Optional[int] = None) -> Iterator[ConvergentState]:
    """Yield the Wallis-Euler states for n = 1 .. upto (default: all elements)."""
    upto = seq.count if upto is None else upto
    _check_index(seq, upto)
    state = ConvergentState.start()
    for b in seq.elements[:upto]:
        state = wallis_euler_step(state, b)
        yield state


def state_at(seq: ElementSequence, n: int) -> ConvergentState:
    _check_index(seq, n)
    state = ConvergentState.start()
    for b in seq.elements[:n]:
        state = wallis_euler_step(state, b)
    return state


def _check_index(seq: ElementSequence, n: int) -> None:
    if not isinstance(n, int) or not 0 <= n <= seq.count:
        raise DomainError(f"index {n!r} outside 0..{seq.count}")


def convergent(seq: ElementSequence, n: int) -> ExtendedComplex:
    """``f_n = A_n / B_n``."""
    if n < 1:
        raise DomainError("convergents are indexed from 1")
    return state_at(seq, n).convergent()


def convergent_at(seq: ElementSequence, n: int, w: Union[ExtendedComplex, Number]) -> ExtendedComplex:
    """``f_n(w) = s_1 o ... o s_n (w)`` in closed form."""
    return state_at(seq, n).at(w)


def tail_closed_form(seq: ElementSequence, n: int, w: Union[ExtendedComplex, Number]) -> ExtendedComplex:
    """``t_n(w)``, the inverse of ``f_n`` evaluated at ``w``."""
    return state_at(seq, n).tail(w)


def tail_values(seq: ElementSequence, n: int, w: Union[ExtendedComplex, Number]) -> list:
    """``[t_0, t_1, ..., t_n]`` forward from ``t_0 = w`` via ``t_k = 1/t_{k-1} - b_k``."""
    _check_index(seq, n)
    t = ExtendedComplex.of(w).normalized()
    out = [t]
    for b in seq.elements[:n]:
        t = ExtendedComplex(t.den - b * t.num, t.num).normalized()
        out.append(t)
    return out


def tail_sequence(seq: ElementSequence, N: int, seed: Union[ExtendedComplex, Number]) -> list:
    """``[t_N, t_{N-1}, ..., t_0]`` by ``t_{n-1} = 1/(b_n + t_n)`` from ``t_N = seed``."""
    _check_index(seq, N)
    t = ExtendedComplex.of(seed)
    out = [t]
    for n in range(N, 0, -1):
        t = s_map(seq.elements[n - 1])(t)
        out.append(t)
    return out


def reverse_values(seq: ElementSequence, n: int, seed: Union[ExtendedComplex, Number]) -> list:
    """``[r_1, r_2, ..., r_{n+1}]`` by ``r_{k+1} = 1/(b_k + r_k)`` from ``r_1 = seed``."""
    _check_index(seq, n)
    r = ExtendedComplex.of(seed)
    out = [r]
    for b in seq.elements[:n]:
        r = s_map(b)(r)
        out.append(r)
    return out


def reverse_sequence(seq: ElementSequence, n: int, seed: Union[ExtendedComplex, Number]) -> ExtendedComplex:
    """``r_{n+1}(seed)``."""
    return reverse_values(seq, n, seed)[-1]


def reverse_closed_form(seq: ElementSequence, n: int, w: Union[ExtendedComplex, Number]) -> ExtendedComplex:
    return state_at(seq, n).reverse(w)


@dataclass(frozen=True)
class EvenOddLimits:
    a_even: complex
    a_odd: complex
    b_even: complex
    b_odd: complex
    f_even: complex
    f_odd: complex
    iterations_used: int
    converged: bool
    scale_exp: int = 0

    @property
    def scale(self) -> float:
        try:
            return math.ldexp(1.0, self.scale_exp)
        except OverflowError:
            return math.inf

    def determinant(self) -> complex:
        """``A_odd B_even - A_even B_odd`` on the stored values; equals ``1/scale**2``."""
        return self.a_odd * self.b_even - self.a_even * self.b_odd


def _ratio(a: complex, b: complex) -> complex:
    return ExtendedComplex(a, b).value() if (a, b) != (0, 0) else complex(math.nan, math.nan)


def _small_change(old: complex, new: complex, tol: float) -> bool:
    if cmath.isinf(old) or cmath.isinf(new):
        return cmath.isinf(old) and cmath.isinf(new)
    return abs(new - old) <= tol * max(1.0, abs(new))


def even_odd_limits(seq: ElementSequence, tol: float = 1e-12, max_terms: Optional[int] = None) -> EvenOddLimits:
    """Iterate Wallis-Euler until the even and odd subsequences settle.

    Each step ``n`` is compared with step ``n - 2`` (same parity).  A step is
    "settled" when both rescaled ``A_n`` and ``B_n`` moved by less than
    ``tol`` (the Stern-Stolz regime), or when ``f_n`` did (the convergent
    regime, where ``A_n`` and ``B_n`` themselves grow without bound).
    Convergence is declared after three settled steps of each parity in a row.
    """
    max_terms = seq.count if max_terms is None else min(max_terms, seq.count)
    if max_terms < 1:
        raise DomainError("max_terms must be at least 1")
    history: list = []
    ab_streak = f_streak = 0
    state = ConvergentState.start()
    converged = False
    for b in seq.elements[:max_terms]:
        state = wallis_euler_step(state, b)
        f = _ratio(state.a_cur, state.b_cur)
        history.append((state.a_cur, state.b_cur, state.scale_exp, f))
        if len(history) >= 3:
            a0, b0, e0, f0 = history[-3]
            shift = e0 - state.scale_exp
            a_old, b_old = _ldexp_c(a0, shift), _ldexp_c(b0, shift)
            ab_ok = _small_change(a_old, state.a_cur, tol) and _small_change(b_old, state.b_cur, tol)
            f_ok = _small_change(f0, f, tol)
            ab_streak = ab_streak + 1 if ab_ok else 0
            f_streak = f_streak + 1 if f_ok else 0
            if ab_streak >= 6 or f_streak >= 6:
                converged = True
                break
        del history[:-3]
    if state.n % 2 == 0:
        a_even, b_even, a_odd, b_odd = state.a_cur, state.b_cur, state.a_prev, state.b_prev
    else:
        a_even, b_even, a_odd, b_odd = state.a_prev, state.b_prev, state.a_cur, state.b_cur
    return EvenOddLimits(
        a_even,
        a_odd,
        b_even,
        b_odd,
        _ratio(a_even, b_even),
        _ratio(a_odd, b_odd),
        state.n,
        converged,
        state.scale_exp,
    )


def km5_bound(seq: ElementSequence, w: float, n: int, numerator: str = "even") -> tuple:
    """Both sides of the positivity bound for ``K(1/(w b_k))`` at depth ``2n``.

    ``lhs`` is the even convergent ``f_2n`` of the scaled fraction.  ``rhs`` is
    ``sum_i w b_{2i} / (1 + w^2 b_{2i-1} b_{2i})``; passing ``numerator="odd"``
    uses ``b_{2i-1}`` in the numerator instead, a reading that does not bound
    ``lhs`` in general (e.g. ``b = [2, 3]``).
    """
    if numerator not in ("even", "odd"):
        raise ValueError("numerator must be 'even' or 'odd'")
    if n < 1 or 2 * n > seq.count:
        raise DomainError(f"need 1 <= n and 2n <= {seq.count}, got n={n!r}")
    w = float(w)
    if not w > 0:
        raise DomainError("w must be strictly positive")
    elems = seq.elements[: 2 * n]
    for i, b in enumerate(elems, start=1):
        if b.imag != 0 or not b.real > 0:
            raise DomainError(f"element b_{i} = {b!r} is not strictly positive")
    bs = [b.real for b in elems]
    lhs = convergent(ElementSequence.from_list([w * b for b in bs]), 2 * n).value().real
    rhs = 0.0
    for i in range(n):
        odd, even = bs[2 * i], bs[2 * i + 1]
        top = even if numerator == "even" else odd
        rhs += w * top / (1.0 + w * w * odd * even)
    return lhs, rhs


def _rel_residual(lhs: complex, rhs: complex, target: complex) -> float:
    """``|lhs - rhs - target|`` relative to the largest of the three magnitudes."""
    denom = max(abs(lhs), abs(rhs), abs(target))
    return abs(lhs - rhs - target) / denom if denom else 0.0


def determinant_residuals(seq: ElementSequence) -> Iterator[tuple]:
    """Yield ``(n, first, second)`` relative residuals of both determinant relations.

    ``first`` checks ``A_n B_{n-1} - A_{n-1} B_n = (-1)**(n-1) / scale**2``;
    ``second`` checks ``A_n B_{n-2} - A_{n-2} B_n = (-1)**n b_n / scale**2`` and
    is ``None`` for n = 1.  Residuals are taken relative to the magnitude of the
    cross products, since the difference of two large products cannot be
    resolved more finely in floating point.
    """
    older: Optional[ConvergentState] = None
    for state in iter_states(seq):
        first = _rel_residual(state.a_cur * state.b_prev, state.a_prev * state.b_cur, state.expected_determinant())
        second = None
        if older is not None:
            shift = older.scale_exp - state.scale_exp
            a2, b2 = _ldexp_c(older.a_prev, shift), _ldexp_c(older.b_prev, shift)
            sign = 1.0 if state.n % 2 == 0 else -1.0
            target = _ldexp_c(sign * seq.elements[state.n - 1], -2 * state.scale_exp)
            second = _rel_residual(state.a_cur * b2, a2 * state.b_cur, target)
        older = state
        yield state.n, first, second
