"""Disk value regions for two-step continued fractions.

Two families of regions are handled:

* origin-centred disks ``|z| <= C`` for elements in a sector of half-angle
  below pi/4, with ``C**2 >= sup|p_k/q_k| / cos(2 theta)``;
* disks ``|z - C| <= C`` through the origin for elements with positive real
  part, with ``C**2 >= sup 1 / (4 Re(q_k) Re(1/p_k))``.

Here ``q_k`` and ``p_k`` are the odd and even member of the k-th pair in
``1/(q_1 + 1/(p_1 + ... + 1/(q_n + 1/(p_n + z))))``.  Certificates check the
resulting statements for convergents, odd reverse values and even tails of a
concrete finite sequence.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Union

from . import engine
from .engine import ElementSequence
from .errors import DomainError, InvalidCertificateRequest, SectorTooWideError
from .projective import ExtendedComplex, Number, Sector, sector_contains

DEFAULT_SLACK = 1e-9
LEMMA_SLACK = 1e-10
QUARTER_PI = math.pi / 4


@dataclass(frozen=True)
class OriginDisk:
    radius: float

    def __post_init__(self) -> None:
        if not self.radius > 0 or not math.isfinite(self.radius):
            raise DomainError("disk radius must be a positive finite number")

    kind = "origin"

    @property
    def center(self) -> float:
        return 0.0

    def excess(self, z: Union[ExtendedComplex, Number]) -> float:
        """Relative overshoot ``|z|/C - 1`` (<= 0 inside); ``inf`` at infinity."""
        z = ExtendedComplex.of(z)
        if z.is_infinite:
            return math.inf
        return abs(z.value()) / self.radius - 1.0

    def contains(self, z: Union[ExtendedComplex, Number], slack: float = DEFAULT_SLACK) -> bool:
        return self.excess(z) <= slack


@dataclass(frozen=True)
class ShiftedDisk:
    """The disk ``|z - C| <= C``, tangent to the imaginary axis at 0."""

    radius: float

    def __post_init__(self) -> None:
        if not self.radius > 0 or not math.isfinite(self.radius):
            raise DomainError("disk radius must be a positive finite number")

    kind = "shifted"

    @property
    def center(self) -> float:
        return self.radius

    def excess(self, z: Union[ExtendedComplex, Number]) -> float:
        z = ExtendedComplex.of(z)
        if z.is_infinite:
            return math.inf
        return abs(z.value() - self.radius) / self.radius - 1.0

    def contains(self, z: Union[ExtendedComplex, Number], slack: float = DEFAULT_SLACK) -> bool:
        return self.excess(z) <= slack


Disk = Union[OriginDisk, ShiftedDisk]


def _check_theta_origin(theta: float) -> None:
    if not theta >= 0:
        raise DomainError(f"sector half-angle must be non-negative, got {theta!r}")
    if theta >= QUARTER_PI:
        raise SectorTooWideError(
            f"origin-disk estimates need half-angle < pi/4, got {theta!r}; at pi/4 they fail "
            "(p = q = t e^{i pi/4}, z = t^(-1/3) e^{i pi/4}; see the counterexample command)"
        )


def _pairs(ps: Sequence[Number], qs: Sequence[Number]) -> list:
    ps, qs = [complex(p) for p in ps], [complex(q) for q in qs]
    if not ps or len(ps) != len(qs):
        raise DomainError("ps and qs must be non-empty and of equal length")
    for v in ps + qs:
        if v == 0 or not cmath.isfinite(v):
            raise DomainError("pair elements must be nonzero and finite")
    return list(zip(ps, qs))


def origin_sup(ps: Sequence[Number], qs: Sequence[Number]) -> float:
    """``max_k |p_k / q_k|``."""
    return max(abs(p / q) for p, q in _pairs(ps, qs))


def shifted_sup(ps: Sequence[Number], qs: Sequence[Number]) -> float:
    """``max_k 1 / (Re(q_k) Re(1/p_k))``; requires positive real parts."""
    pairs = _pairs(ps, qs)
    for p, q in pairs:
        if not (p.real > 0 and q.real > 0):
            raise DomainError(f"elements need positive real part, got p={p!r}, q={q!r}")
    return max(1.0 / (q.real * (1 / p).real) for p, q in pairs)


def origin_disk_constant(ps: Sequence[Number], qs: Sequence[Number], theta: float) -> float:
    """Smallest radius ``sqrt(max|p/q| / cos 2theta)`` of an invariant origin disk."""
    _check_theta_origin(theta)
    sector = Sector(theta)
    for v in list(ps) + list(qs):
        if not sector_contains(v, sector):
            raise DomainError(f"element {v!r} lies outside the sector of half-angle {theta!r}")
    return math.sqrt(origin_sup(ps, qs) / math.cos(2 * theta))


def shifted_disk_constant(ps: Sequence[Number], qs: Sequence[Number]) -> float:
    """Smallest radius ``sqrt(max 1/(Re q Re(1/p)) / 4)`` of an invariant shifted disk."""
    return math.sqrt(0.25 * shifted_sup(ps, qs))


def convergent_pairs(seq: ElementSequence, npairs: Optional[int] = None) -> tuple:
    """``(ps, qs)`` with ``q_k = b_{2k-1}``, ``p_k = b_{2k}``."""
    npairs = seq.count // 2 if npairs is None else npairs
    if npairs < 1 or 2 * npairs > seq.count:
        raise DomainError(f"need at least one complete pair, got {npairs!r} of {seq.count // 2}")
    b = seq.elements
    return [b[2 * k + 1] for k in range(npairs)], [b[2 * k] for k in range(npairs)]


def reverse_pairs(seq: ElementSequence, npairs: Optional[int] = None) -> tuple:
    """``(ps, qs)`` with ``q_k = b_{2k}``, ``p_k = b_{2k-1}``, the pairing seen by reverse values."""
    ps, qs = convergent_pairs(seq, npairs)
    return qs, ps


@dataclass(frozen=True)
class RegionCertificate:
    theorem: str
    target: str
    C: float
    sup_quantity: float
    passed: bool
    worst_index: int
    worst_value: complex
    worst_excess: float
    slack_used: float
    checked: int
    theta: Optional[float] = None
    sector_violations: int = 0
    seed: Optional[int] = None


def _disk_constant(theorem: str, ps: list, qs: list, theta: Optional[float]) -> tuple:
    if theorem == "origin":
        sup = origin_sup(ps, qs)
        return sup, math.sqrt(sup / math.cos(2 * theta))
    sup = shifted_sup(ps, qs)
    return sup, math.sqrt(0.25 * sup)


def _validate_request(
    seq: ElementSequence,
    seed: ExtendedComplex,
    disk: Disk,
    theta: Optional[float],
    ps: list,
    qs: list,
    slack: float,
    seed_name: str,
) -> tuple:
    if isinstance(disk, OriginDisk):
        if theta is None:
            raise InvalidCertificateRequest("the origin-disk path needs a sector half-angle")
        _check_theta_origin(theta)
        theorem = "origin"
    elif isinstance(disk, ShiftedDisk):
        theorem = "shifted"
        if theta is not None and not 0 <= theta < math.pi / 2:
            raise InvalidCertificateRequest(f"sector half-angle must lie in [0, pi/2), got {theta!r}")
        for i, b in enumerate(seq.elements, start=1):
            if not b.real > 0:
                raise InvalidCertificateRequest(f"b_{i} = {b!r} does not have positive real part")
    else:
        raise TypeError(f"unsupported disk {disk!r}")
    sector = Sector(theta, arg_tol=slack) if theta is not None else None
    if sector is not None:
        for i, b in enumerate(seq.elements, start=1):
            if not sector_contains(b, sector):
                raise InvalidCertificateRequest(f"b_{i} = {b!r} lies outside the sector")
        if not sector_contains(seed, sector):
            raise InvalidCertificateRequest(f"{seed_name} {seed!r} lies outside the sector")
    if not disk.contains(seed, slack):
        raise InvalidCertificateRequest(f"{seed_name} {seed!r} lies outside the disk of radius {disk.radius!r}")
    sup, c_min = _disk_constant(theorem, ps, qs, theta)
    if disk.radius * (1 + 1e-12) < c_min:
        raise InvalidCertificateRequest(
            f"radius {disk.radius!r} is below the admissible constant {c_min!r} for this sequence"
        )
    return theorem, sector, sup


def _judge(
    theorem: str,
    target: str,
    disk: Disk,
    sector: Optional[Sector],
    theta: Optional[float],
    sup: float,
    slack: float,
    values: list,
) -> RegionCertificate:
    worst_index, worst_value, worst_excess = values[0][0], values[0][1], -math.inf
    disk_bad = sector_bad = 0
    for idx, v in values:
        e = disk.excess(v)
        if e > worst_excess:
            worst_index, worst_value, worst_excess = idx, v.value(), e
        if e > slack:
            disk_bad += 1
        if sector is not None and not sector_contains(v, sector):
            sector_bad += 1
    return RegionCertificate(
        theorem=theorem,
        target=target,
        C=disk.radius,
        sup_quantity=sup,
        passed=disk_bad == 0 and sector_bad == 0,
        worst_index=worst_index,
        worst_value=worst_value,
        worst_excess=worst_excess,
        slack_used=slack,
        checked=len(values),
        theta=theta,
        sector_violations=sector_bad,
    )


def certify_even_convergents(
    seq: ElementSequence,
    w: Union[ExtendedComplex, Number],
    disk: Disk,
    theta: Optional[float] = None,
    slack: float = DEFAULT_SLACK,
) -> RegionCertificate:
    """Check ``f_2n(w)`` against ``disk`` for every even index up to ``seq.count``."""
    w = ExtendedComplex.of(w)
    ps, qs = convergent_pairs(seq)
    theorem, sector, sup = _validate_request(seq, w, disk, theta, ps, qs, slack, "seed w")
    values = [(st.n, st.at(w)) for st in engine.iter_states(seq, 2 * len(ps)) if st.n % 2 == 0]
    return _judge(theorem, "even-convergents", disk, sector, theta, sup, slack, values)


def certify_odd_reverse(
    seq: ElementSequence,
    w: Union[ExtendedComplex, Number],
    disk: Disk,
    theta: Optional[float] = None,
    slack: float = DEFAULT_SLACK,
) -> RegionCertificate:
    """Check ``r_{2n+1}(w)`` against ``disk`` for every ``2n <= seq.count``."""
    w = ExtendedComplex.of(w)
    ps, qs = reverse_pairs(seq)
    theorem, sector, sup = _validate_request(seq, w, disk, theta, ps, qs, slack, "seed w")
    rs = engine.reverse_values(seq, 2 * len(ps), w)
    values = [(k, rs[k - 1]) for k in range(3, len(rs) + 1, 2)]
    return _judge(theorem, "odd-reverse", disk, sector, theta, sup, slack, values)


def certify_even_tails(
    seq: ElementSequence,
    N: int,
    seed: Union[ExtendedComplex, Number],
    disk: Disk,
    theta: Optional[float] = None,
    slack: float = DEFAULT_SLACK,
) -> RegionCertificate:
    """Seed ``t_2N`` and check every ``t_2n``, ``n < N``, obtained backwards."""
    seed = ExtendedComplex.of(seed)
    if not isinstance(N, int) or N < 1 or 2 * N > seq.count:
        raise InvalidCertificateRequest(f"need 1 <= N and 2N <= {seq.count}, got N={N!r}")
    ps, qs = convergent_pairs(seq, N)
    theorem, sector, sup = _validate_request(seq, seed, disk, theta, ps, qs, slack, "seed t_2N")
    tails = engine.tail_sequence(seq, 2 * N, seed)
    values = [(2 * N - j, t) for j, t in enumerate(tails) if j > 0 and (2 * N - j) % 2 == 0]
    return _judge(theorem, "even-tails", disk, sector, theta, sup, slack, values)


class LemmaBound(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


class LemmaStep(NamedTuple):
    value: float
    holds: bool


def _check_lemma_inputs(p: complex, q: complex, z: complex, theta: float) -> None:
    _check_theta_origin(theta)
    sector = Sector(theta)
    if p == 0 or q == 0:
        raise DomainError("p and q must be nonzero")
    for name, v in (("p", p), ("q", q), ("z", z)):
        if not sector_contains(v, sector):
            raise DomainError(f"{name} = {v!r} lies outside the sector of half-angle {theta!r}")


def two_step(p: Number, q: Number, z: Number) -> complex:
    """``1 / (q + 1/(p + z))``."""
    return 1 / (q + 1 / (p + z))


def lemma_two_step_lower_bound(
    p: Number, q: Number, z: Number, theta: float, C: float, slack: float = LEMMA_SLACK
) -> LemmaBound:
    """Compare ``1/|q + 1/(p+z)|`` with ``1/| |q| e^{i theta} + e^{-i theta}/(|p| + C) |``."""
    p, q, z = complex(p), complex(q), complex(z)
    _check_lemma_inputs(p, q, z, theta)
    if not C > 0 or abs(z) > C * (1 + 1e-12):
        raise DomainError(f"need |z| <= C with C > 0, got |z|={abs(z)!r}, C={C!r}")
    lhs = abs(two_step(p, q, z))
    rhs = 1 / abs(abs(q) * cmath.exp(1j * theta) + cmath.exp(-1j * theta) / (abs(p) + C))
    return LemmaBound(lhs, rhs, lhs <= rhs * (1 + slack))


def lemma_origin_disk_step(
    p: Number, q: Number, z: Number, theta: float, C: float, slack: float = LEMMA_SLACK
) -> LemmaStep:
    """``|1/(q + 1/(p+z))|`` against ``C`` when ``C**2 >= |p| / (|q| cos 2theta)``."""
    p, q, z = complex(p), complex(q), complex(z)
    _check_lemma_inputs(p, q, z, theta)
    if abs(z) > C * (1 + 1e-12):
        raise DomainError(f"need |z| <= C, got |z|={abs(z)!r}, C={C!r}")
    if not C > 0 or C * C * (1 + 1e-12) < abs(p) / (abs(q) * math.cos(2 * theta)):
        raise InvalidCertificateRequest(f"C={C!r} is below sqrt(|p| / (|q| cos 2theta))")
    value = abs(two_step(p, q, z))
    return LemmaStep(value, value <= C * (1 + slack))


class Equivalence(NamedTuple):
    in_disk: bool
    in_halfplane: bool
    degenerate: bool


def halfplane_disk_equivalence(w: Number, K: float) -> Equivalence:
    """``|w - K| <= K`` versus ``Re(1/w) >= 1/(2K)``; ``w = 0`` is flagged degenerate."""
    w = complex(w)
    if not K > 0:
        raise DomainError("K must be positive")
    if w == 0:
        return Equivalence(True, True, True)
    return Equivalence(abs(w - K) <= K, (1 / w).real >= 1 / (2 * K), False)


@dataclass(frozen=True)
class CounterexampleRow:
    t: float
    lhs_squared: float
    closed_form: float
    threshold: float
    violates: bool

    @property
    def reciprocal(self) -> float:
        """``1/|q + 1/(p+z)|``, to be compared with ``|z| = t**(-1/3)``."""
        return 1 / math.sqrt(self.lhs_squared)


def counterexample_eval(t: float) -> CounterexampleRow:
    """Evaluate the pi/4 example ``p = q = t e^{i pi/4}``, ``z = t**(-1/3) e^{i pi/4}``.

    ``lhs_squared`` is ``|q + 1/(p+z)|**2`` by complex arithmetic; the closed
    form ``t**2 + t**(2/3) / (t**(4/3) + 1)**2`` is returned alongside.  The
    origin-disk step fails whenever ``lhs_squared < t**(2/3) = 1/|z|**2``.
    """
    t = float(t)
    if not 0 < t <= 0.5:
        raise DomainError(f"t must lie in (0, 1/2], got {t!r}")
    rot = cmath.exp(1j * QUARTER_PI)
    p = q = t * rot
    z = t ** (-1 / 3) * rot
    lhs_sq = abs(q + 1 / (p + z)) ** 2
    closed = t**2 + t ** (2 / 3) / (t ** (4 / 3) + 1) ** 2
    threshold = t ** (2 / 3)
    return CounterexampleRow(t, lhs_sq, closed, threshold, lhs_sq < threshold)
