"""Collision statistics of uniformly random maximal cyclic submodules.

Two independent uniform maximal cyclic submodules at level n coincide with
probability 1/((p+1)p^(n-1)) (one over the census), so they intersect
nontrivially below the top with probability at least 1 - 1/((p+1)p^(n-1)),
a bound increasing in n. The exact values are kept as Fractions end to end;
floats appear only in summaries. Sampling draws one uniform canonical index
per submodule, which makes every submodule exactly equally likely, puts the
kind-'A' branch at probability p/(p+1), and vectorizes for uniformity tests.

Randomness is reproducible and order-independent: every trial derives its
own generator pair from (seed, trial, coordinate) spawn keys, so results do
not depend on how trials are chunked across threads.
"""

from __future__ import annotations

import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import sqrt

import numpy as np

from .errors import ResourceBoundError
from .series import check_level, check_prime
from .submodules import (
    CyclicSubmodule,
    SubmoduleTower,
    count_maximal,
    enumerate_maximal,
    intersect,
    lifts,
    project,
    sum_and_quotient,
)

MAX_CENSUS_PAIRS = 4_000_000


@dataclass(frozen=True)
class RngSpec:
    """A 64-bit root seed; named streams derive from integer spawn keys."""

    seed: int

    def __post_init__(self):
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an integer in [0, 2^64), got {self.seed!r}")

    def stream(self, *path: int) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=tuple(path))
        return np.random.default_rng(ss)


@dataclass(frozen=True)
class PairSample:
    """Two independently sampled maximal submodules at a common (p, level)."""

    n1: CyclicSubmodule
    n2: CyclicSubmodule

    def __post_init__(self):
        if self.n1.p != self.n2.p or self.n1.level != self.n2.level:
            raise ValueError("pair must share p and level")


@dataclass(frozen=True)
class ProbabilityModel:
    """The uniform model on ordered pairs of maximal cyclic submodules."""

    p: int
    level: int
    total_pairs: int
    collision_pairs: int
    collision_probability: Fraction

    @classmethod
    def for_level(cls, p: int, n: int) -> "ProbabilityModel":
        count = count_maximal(p, n)
        return cls(p, n, count * count, count, Fraction(count, count * count))


def collision_probability_exact(p: int, n: int) -> Fraction:
    """Probability that two uniform maximal submodules coincide."""
    check_prime(p)
    check_level(n)
    return Fraction(1, (p + 1) * p ** (n - 1))


def intersection_bound(p: int, n: int) -> Fraction:
    """Lower bound for a nontrivial intersection below the top level."""
    return 1 - collision_probability_exact(p, n)


def collision_probability_census(p: int, n: int) -> Fraction:
    """Collision probability recomputed by full double enumeration."""
    total = count_maximal(p, n)
    if total * total > MAX_CENSUS_PAIRS:
        raise ResourceBoundError(
            f"{total * total} ordered pairs at (p={p}, n={n}) exceed the "
            f"census bound {MAX_CENSUS_PAIRS}"
        )
    forms = list(enumerate_maximal(p, n))
    hits = 0
    pairs = 0
    for a in forms:
        for b in forms:
            pairs += 1
            if a == b:
                hits += 1
    return Fraction(hits, pairs)


def sample_maximal(p: int, n: int, rng: np.random.Generator) -> CyclicSubmodule:
    """One uniform maximal cyclic submodule."""
    return CyclicSubmodule.from_index(p, n, int(rng.integers(count_maximal(p, n))))


def sample_pair(p: int, n: int, spec: RngSpec, trial: int) -> PairSample:
    """The trial-th independent pair; deterministic given (spec, trial)."""
    return PairSample(
        sample_maximal(p, n, spec.stream(trial, 0)),
        sample_maximal(p, n, spec.stream(trial, 1)),
    )


def chi_square_uniformity(
    p: int, n: int, draws: int, spec: RngSpec
) -> tuple[float, int]:
    """Chi-square statistic and degrees of freedom for sampler uniformity."""
    count = count_maximal(p, n)
    idx = spec.stream().integers(0, count, size=draws)
    observed = np.bincount(idx, minlength=count)
    expected = draws / count
    stat = float((((observed - expected) ** 2) / expected).sum())
    return stat, count - 1


def _resolve_threads(threads: int) -> int:
    if threads < 0:
        raise ValueError(f"threads must be >= 0, got {threads}")
    if threads == 0:
        return min(8, os.cpu_count() or 1)
    return threads


def _sorted_counts(counter: Counter) -> dict:
    return dict(sorted(counter.items()))


@dataclass(frozen=True)
class MonteCarloResult:
    """Aggregated collision and intersection statistics for sampled pairs."""

    p: int
    level: int
    trials: int
    seed: int
    collisions: int
    exponent_counts: dict
    quotient_structure_counts: dict
    exact: Fraction

    @property
    def frequency(self) -> Fraction:
        return Fraction(self.collisions, self.trials)

    @property
    def delta(self) -> float:
        return float(self.frequency - self.exact)

    @property
    def stderr(self) -> float:
        q = float(self.exact)
        return sqrt(q * (1 - q) / self.trials)


def _mc_chunk(p, n, spec, start, stop):
    collisions = 0
    exps: Counter = Counter()
    quots: Counter = Counter()
    for t in range(start, stop):
        pair = sample_pair(p, n, spec, t)
        meet = intersect(pair.n1, pair.n2)
        quotient = sum_and_quotient(pair.n1, pair.n2)
        if meet.size_exponent != quotient.quotient_size_exponent:
            raise RuntimeError(
                f"intersection/quotient duality violated at trial {t}: "
                f"{meet.size_exponent} != {quotient.quotient_size_exponent}"
            )
        exps[meet.size_exponent] += 1
        quots[quotient.cyclic_structure] += 1
        if pair.n1 == pair.n2:
            collisions += 1
    return collisions, exps, quots


def _chunk_ranges(total: int, parts: int):
    size, rem = divmod(total, parts)
    start = 0
    for i in range(parts):
        stop = start + size + (1 if i < rem else 0)
        if stop > start:
            yield start, stop
        start = stop


def monte_carlo(
    p: int, n: int, trials: int, spec: RngSpec, threads: int = 1
) -> MonteCarloResult:
    """Sample pairs, cross-check intersection against quotient, aggregate.

    Identical results for every thread count: trials own their generators
    and chunk counts merge commutatively.
    """
    check_prime(p)
    check_level(n)
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    workers = _resolve_threads(threads)
    ranges = list(_chunk_ranges(trials, workers))
    if len(ranges) > 1:
        with ThreadPoolExecutor(max_workers=len(ranges)) as pool:
            parts = list(
                pool.map(lambda r: _mc_chunk(p, n, spec, r[0], r[1]), ranges)
            )
    else:
        parts = [_mc_chunk(p, n, spec, 0, trials)]
    collisions = 0
    exps: Counter = Counter()
    quots: Counter = Counter()
    for c, e, q in parts:
        collisions += c
        exps.update(e)
        quots.update(q)
    return MonteCarloResult(
        p=p,
        level=n,
        trials=trials,
        seed=spec.seed,
        collisions=collisions,
        exponent_counts=_sorted_counts(exps),
        quotient_structure_counts=_sorted_counts(quots),
        exact=collision_probability_exact(p, n),
    )


@dataclass(frozen=True)
class PushforwardReport:
    """Fiber census of the projection from level m down to level n."""

    p: int
    low_level: int
    high_level: int
    expected_fiber: int
    fibers_uniform: bool
    lifts_partition: bool
    fiber_counts: dict


def pushforward_consistency(p: int, n: int, m: int) -> PushforwardReport:
    """Check that projection pushes the level-m census onto the level-n one.

    Counts the fiber over every level-n submodule (all must equal p^(m-n))
    and verifies that lifting gives exactly those fibers back.
    """
    check_prime(p)
    check_level(n)
    check_level(m)
    if n >= m:
        raise ValueError(f"need low level {n} < high level {m}")
    expected = p ** (m - n)
    fibers: Counter = Counter()
    for high in enumerate_maximal(p, m):
        fibers[project(high, n).index()] += 1
    low_forms = list(enumerate_maximal(p, n))
    uniform = len(fibers) == len(low_forms) and all(
        fibers[f.index()] == expected for f in low_forms
    )
    partition = True
    seen_high = set()
    for low in low_forms:
        lifted = list(lifts(low, m))
        if len(lifted) != expected or any(project(h, n) != low for h in lifted):
            partition = False
            break
        for h in lifted:
            if h in seen_high:
                partition = False
                break
            seen_high.add(h)
    if partition:
        partition = len(seen_high) == count_maximal(p, m)
    return PushforwardReport(
        p=p,
        low_level=n,
        high_level=m,
        expected_fiber=expected,
        fibers_uniform=uniform,
        lifts_partition=partition,
        fiber_counts=_sorted_counts(fibers),
    )


@dataclass(frozen=True)
class TowerReport:
    """Stabilization statistics for sampled tower pairs.

    For a pair distinct at the top, the intersection exponent at level k is
    min(v, k) where v is the exponent at the top, so it stabilizes from
    level v + 1 on; equal pairs have exponent k at every level k. Violations
    raise instead of being recorded.
    """

    p: int
    max_level: int
    trials: int
    seed: int
    collisions: int
    exponent_counts: dict
    stabilization_level_counts: dict
    exact: Fraction


def tower_experiment(
    p: int, max_level: int, trials: int, spec: RngSpec
) -> TowerReport:
    """Sample pairs at the top level and track intersections down the tower."""
    check_prime(p)
    check_level(max_level)
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    collisions = 0
    v_counts: Counter = Counter()
    n0_counts: Counter = Counter()
    for t in range(trials):
        pair = sample_pair(p, max_level, spec, t)
        tower1 = SubmoduleTower.from_top(pair.n1)
        tower2 = SubmoduleTower.from_top(pair.n2)
        exps = [
            intersect(a, b).size_exponent
            for a, b in zip(tower1.stages, tower2.stages)
        ]
        if pair.n1 == pair.n2:
            collisions += 1
            expected = list(range(1, max_level + 1))
        else:
            v = exps[-1]
            v_counts[v] += 1
            n0_counts[v + 1] += 1
            expected = [min(v, k) for k in range(1, max_level + 1)]
        if exps != expected:
            raise RuntimeError(
                f"stabilization violated at trial {t}: got {exps}, expected {expected}"
            )
    return TowerReport(
        p=p,
        max_level=max_level,
        trials=trials,
        seed=spec.seed,
        collisions=collisions,
        exponent_counts=_sorted_counts(v_counts),
        stabilization_level_counts=_sorted_counts(n0_counts),
        exact=collision_probability_exact(p, max_level),
    )
