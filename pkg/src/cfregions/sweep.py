"""Randomized, seed-reproducible checks of the two disk theorems.

Sample ``i`` draws from its own generator ``default_rng([seed, i])``, so a run
can be split across workers or reordered without changing any sample.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, SectorTooWideError
from .regions import DEFAULT_SLACK, QUARTER_PI, two_step

DEFAULT_SEED = 42
MAX_PAIRS = 10
THETA_MARGIN = 0.01


@dataclass(frozen=True)
class Instance:
    theta: float
    ps: tuple
    qs: tuple
    z: complex
    C: float


@dataclass(frozen=True)
class SweepResult:
    theorem: str
    samples: int
    seed: int
    theta_max: float
    slack: float
    violations: int
    sector_violations: int
    worst_margin: float
    worst_sample: Optional[int]


def default_theta_max(theorem: str) -> float:
    return (QUARTER_PI if theorem == "origin" else math.pi / 2) - THETA_MARGIN


def _element(rng: np.random.Generator, theta: float) -> complex:
    rho = 10.0 ** rng.uniform(-2.0, 2.0)
    return cmath.rect(rho, rng.uniform(-theta, theta))


def sample_instance(theorem: str, rng: np.random.Generator, theta_max: float) -> Instance:
    """Draw one admissible instance with the minimal admissible constant ``C``."""
    theta = rng.uniform(0.0, theta_max)
    n = int(rng.integers(1, MAX_PAIRS + 1))
    qs = tuple(_element(rng, theta) for _ in range(n))
    ps = tuple(_element(rng, theta) for _ in range(n))
    if theorem == "origin":
        C = math.sqrt(max(abs(p / q) for p, q in zip(ps, qs)) / math.cos(2 * theta))
        z = cmath.rect(C * math.sqrt(rng.uniform()), rng.uniform(-theta, theta))
    else:
        C = math.sqrt(0.25 * max(1 / (q.real * (1 / p).real) for p, q in zip(ps, qs)))
        z = C + cmath.rect(C * math.sqrt(rng.uniform()), rng.uniform(-math.pi, math.pi))
    return Instance(theta, ps, qs, z, C)


def evaluate(inst: Instance) -> complex:
    """``1/(q_1 + 1/(p_1 + ... + 1/(q_n + 1/(p_n + z))))``, innermost pair first."""
    w = inst.z
    for p, q in zip(reversed(inst.ps), reversed(inst.qs)):
        w = two_step(p, q, w)
    return w


def margin(theorem: str, inst: Instance, value: complex) -> float:
    """Relative overshoot of ``value`` past the disk boundary (<= 0 inside)."""
    if theorem == "origin":
        return abs(value) / inst.C - 1.0
    return abs(value - inst.C) / inst.C - 1.0


def run_sweep(
    theorem: str,
    samples: int,
    seed: int = DEFAULT_SEED,
    theta_max: Optional[float] = None,
    slack: float = DEFAULT_SLACK,
    radius_factor: float = 1.0,
) -> SweepResult:
    """Count disk (and, for the origin theorem, sector) violations over random instances.

    ``radius_factor > 1`` enlarges every admissible ``C`` before the seed is
    drawn, which exercises monotonicity of the region in the radius.
    """
    if theorem not in ("origin", "shifted"):
        raise DomainError(f"unknown theorem {theorem!r}")
    if samples < 1:
        raise DomainError("samples must be at least 1")
    limit = QUARTER_PI if theorem == "origin" else math.pi / 2
    theta_max = default_theta_max(theorem) if theta_max is None else theta_max
    if not 0 <= theta_max < limit:
        if theorem == "origin" and theta_max >= QUARTER_PI:
            raise SectorTooWideError(f"origin sweeps need theta_max < pi/4, got {theta_max!r}")
        raise DomainError(f"theta_max must lie in [0, {limit!r}), got {theta_max!r}")
    if radius_factor < 1:
        raise DomainError("radius_factor must be >= 1")

    violations = sector_bad = 0
    worst, worst_i = -math.inf, None
    for i in range(samples):
        rng = np.random.default_rng([seed, i])
        inst = sample_instance(theorem, rng, theta_max)
        if radius_factor != 1.0:
            inst = _enlarge(theorem, inst, radius_factor, rng)
        value = evaluate(inst)
        m = margin(theorem, inst, value)
        if m > worst:
            worst, worst_i = m, i
        if m > slack:
            violations += 1
        if theorem == "origin" and value != 0 and abs(cmath.phase(value)) > inst.theta + slack:
            sector_bad += 1
    return SweepResult(theorem, samples, seed, theta_max, slack, violations, sector_bad, worst, worst_i)


def _enlarge(theorem: str, inst: Instance, factor: float, rng: np.random.Generator) -> Instance:
    C = inst.C * factor
    if theorem == "origin":
        z = cmath.rect(C * math.sqrt(rng.uniform()), rng.uniform(-inst.theta, inst.theta))
    else:
        z = C + cmath.rect(C * math.sqrt(rng.uniform()), rng.uniform(-math.pi, math.pi))
    return Instance(inst.theta, inst.ps, inst.qs, z, C)
