"""Mamdani inference engine that arbitrates global vs local search.

Three crisp inputs on a 0-100 axis (solution quality, proximity to the best
candidate, diversity against the population) pass through trapezoidal
memberships and four rules; the clipped output terms are aggregated by max
and defuzzified by center of gravity.  Outputs above 50 select the global
(teacher) phase, everything else the local (learner) phase.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LOCAL_SEARCH = "local_search"
GLOBAL_SEARCH = "global_search"


@dataclass(frozen=True)
class TrapezoidMF:
    """Trapezoid on [a, d]: rises on [a, b], holds 1 on [b, c], falls on [c, d]."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        if not self.a <= self.b <= self.c <= self.d:
            raise ValueError(f"trapezoid vertices must be ordered: {self}")

    def membership(self, x: float) -> float:
        if self.b <= x <= self.c:
            return 1.0
        if x <= self.a or x >= self.d:
            return 0.0
        if x < self.b:
            return (x - self.a) / (self.b - self.a)
        return (self.d - x) / (self.d - self.c)


def membership_set(kind: str) -> list[tuple[str, TrapezoidMF]]:
    """Linguistic terms for one axis.

    ``qm_dm_axis``: low / medium / high partition of [0, 100].
    ``im_axis``: same shapes with low and high exchanged (closeness to the
    best reads high when the distance value is small).
    ``output_axis``: local_search / global_search.
    """
    if kind == "qm_dm_axis":
        return [
            ("low", TrapezoidMF(0, 0, 20, 40)),
            ("medium", TrapezoidMF(20, 40, 60, 80)),
            ("high", TrapezoidMF(60, 80, 100, 100)),
        ]
    if kind == "im_axis":
        return [
            ("high", TrapezoidMF(0, 0, 20, 40)),
            ("medium", TrapezoidMF(20, 40, 60, 80)),
            ("low", TrapezoidMF(60, 80, 100, 100)),
        ]
    if kind == "output_axis":
        return [
            (LOCAL_SEARCH, TrapezoidMF(0, 0, 20, 80)),
            (GLOBAL_SEARCH, TrapezoidMF(20, 80, 100, 100)),
        ]
    raise ValueError(f"unknown membership set {kind!r}")


def quality_measure(current_fitness: int, min_fitness: int, max_fitness: int) -> float:
    """Fitness of the current candidate normalized to [0, 100] within the population.

    A flat population (max == min) reads as 100: no quality deficit.
    """
    if not min_fitness <= current_fitness <= max_fitness:
        raise ValueError(
            f"fitness {current_fitness} outside population range "
            f"[{min_fitness}, {max_fitness}]"
        )
    if max_fitness == min_fitness:
        return 100.0
    return 100.0 * (current_fitness - min_fitness) / (max_fitness - min_fitness)


def intensification_measure(current, best) -> float:
    """Hamming distance to the best candidate as a percentage of the dimension."""
    current = np.asarray(current)
    best = np.asarray(best)
    if current.shape != best.shape:
        raise ValueError(f"length mismatch: {current.shape} vs {best.shape}")
    return 100.0 * int(np.count_nonzero(current != best)) / current.size


def diversification_measure(current, population, literal: bool = False) -> float:
    """Mean Hamming distance of the candidate against the population, in [0, 100].

    With ``literal=True`` the distance sum is divided by the dimension only
    (no population-size normalization) and clamped at 100.
    """
    pop = np.asarray(population)
    if pop.size == 0:
        raise ValueError("empty population")
    current = np.asarray(current)
    total = int(np.count_nonzero(pop != current))
    denom = current.size if literal else current.size * pop.shape[0]
    return min(100.0, 100.0 * total / denom)


@dataclass(frozen=True)
class Rule:
    """One rule: antecedent term per input (None = wildcard) and a consequent."""

    qm: str | None
    im: str | None
    dm: str | None
    consequent: str


@dataclass(frozen=True)
class RuleBase:
    rules: tuple[Rule, ...]

    def __post_init__(self):
        if len(self.rules) != 4:
            raise ValueError(f"rule base needs exactly 4 rules, got {len(self.rules)}")
        for rule in self.rules:
            if rule.consequent not in (LOCAL_SEARCH, GLOBAL_SEARCH):
                raise ValueError(f"bad consequent {rule.consequent!r}")


def default_rules() -> RuleBase:
    """The four phase-selection rules.

    1. poor quality -> global (escape a stagnant region)
    2. good quality, no diversity -> global (population collapsed)
    3. good quality, far from the best -> local (refine toward it)
    4. good quality, near the best, still diverse -> local (converging)
    """
    return RuleBase((
        Rule("low", None, None, GLOBAL_SEARCH),
        Rule("high", None, "low", GLOBAL_SEARCH),
        Rule("high", "low", None, LOCAL_SEARCH),
        Rule("high", "high", "high", LOCAL_SEARCH),
    ))


def select_phase(selection: float) -> str:
    """Crisp output above 50 selects the global phase; 50 or below, local."""
    return GLOBAL_SEARCH if selection > 50.0 else LOCAL_SEARCH


class FuzzyEngine:
    """Immutable membership sets + rule base; reusable across evaluations.

    ``diagnostics`` may be set to a writable text stream; each ``selection``
    call then appends a CSV row ``qm,im,dm,r1,r2,r3,r4,out,phase``.
    """

    def __init__(self, rules: RuleBase | None = None, diagnostics=None):
        self.qm_terms = dict(membership_set("qm_dm_axis"))
        self.dm_terms = self.qm_terms
        self.im_terms = dict(membership_set("im_axis"))
        self.output_terms = dict(membership_set("output_axis"))
        self.rules = rules if rules is not None else default_rules()
        self.diagnostics = diagnostics
        self._centroid_cache: dict[tuple[float, float], float] = {}

    def rule_strengths(self, qm: float, im: float, dm: float) -> tuple[float, ...]:
        """Antecedent firing strength of each rule (min over non-wildcard terms)."""
        out = []
        for rule in self.rules.rules:
            s = 1.0
            if rule.qm is not None:
                s = min(s, self.qm_terms[rule.qm].membership(qm))
            if rule.im is not None:
                s = min(s, self.im_terms[rule.im].membership(im))
            if rule.dm is not None:
                s = min(s, self.dm_terms[rule.dm].membership(dm))
            out.append(s)
        return tuple(out)

    def infer(self, qm: float, im: float, dm: float) -> float:
        """Crisp selection in [0, 100] for the three inputs."""
        strengths = self.rule_strengths(qm, im, dm)
        return self.defuzzify(self._clip_levels(strengths))

    def selection(self, qm: float, im: float, dm: float) -> float:
        """Like ``infer``; also emits a diagnostics row when enabled."""
        strengths = self.rule_strengths(qm, im, dm)
        out = self.defuzzify(self._clip_levels(strengths))
        if self.diagnostics is not None:
            r = ",".join(f"{s:.6g}" for s in strengths)
            self.diagnostics.write(
                f"{qm:.6g},{im:.6g},{dm:.6g},{r},{out:.6g},{select_phase(out)}\n"
            )
        return out

    def _clip_levels(self, strengths) -> dict[str, float]:
        levels = {LOCAL_SEARCH: 0.0, GLOBAL_SEARCH: 0.0}
        for rule, s in zip(self.rules.rules, strengths):
            if s > levels[rule.consequent]:
                levels[rule.consequent] = s
        return levels

    def defuzzify(self, clip_levels: dict[str, float]) -> float:
        """Center of gravity of the max-aggregated clipped output terms.

        Exact piecewise-linear integration over [0, 100]; a zero aggregate
        falls back to the axis midpoint 50.
        """
        h_local = clip_levels.get(LOCAL_SEARCH, 0.0)
        h_global = clip_levels.get(GLOBAL_SEARCH, 0.0)
        key = (h_local, h_global)
        cached = self._centroid_cache.get(key)
        if cached is not None:
            return cached
        out = _aggregate_centroid(
            self.output_terms[LOCAL_SEARCH], h_local,
            self.output_terms[GLOBAL_SEARCH], h_global,
        )
        self._centroid_cache[key] = out
        return out


def _clipped(mf: TrapezoidMF, h: float, x: float) -> float:
    return min(mf.membership(x), h)


def _aggregate_centroid(mf_a: TrapezoidMF, h_a: float, mf_b: TrapezoidMF, h_b: float) -> float:
    if h_a <= 0.0 and h_b <= 0.0:
        return 50.0
    points = {0.0, 100.0}
    for mf, h in ((mf_a, h_a), (mf_b, h_b)):
        points.update((mf.a, mf.b, mf.c, mf.d))
        if 0.0 < h < 1.0:
            if mf.b > mf.a:
                points.add(mf.a + h * (mf.b - mf.a))
            if mf.d > mf.c:
                points.add(mf.d - h * (mf.d - mf.c))
    base = sorted(x for x in points if 0.0 <= x <= 100.0)

    # Both clipped terms are linear between adjacent base points; insert their
    # crossings so the max is linear on every final piece.
    xs: list[float] = []
    for x0, x1 in zip(base, base[1:]):
        xs.append(x0)
        fa0, fa1 = _clipped(mf_a, h_a, x0), _clipped(mf_a, h_a, x1)
        fb0, fb1 = _clipped(mf_b, h_b, x0), _clipped(mf_b, h_b, x1)
        d0, d1 = fa0 - fb0, fa1 - fb1
        if d0 * d1 < 0.0:
            xs.append(x0 + (x1 - x0) * d0 / (d0 - d1))
    xs.append(base[-1])

    area = 0.0
    moment = 0.0
    g = [max(_clipped(mf_a, h_a, x), _clipped(mf_b, h_b, x)) for x in xs]
    for i in range(len(xs) - 1):
        x0, x1 = xs[i], xs[i + 1]
        g0, g1 = g[i], g[i + 1]
        width = x1 - x0
        area += 0.5 * (g0 + g1) * width
        moment += width / 6.0 * (g0 * (2.0 * x0 + x1) + g1 * (x0 + 2.0 * x1))
    if area <= 0.0:
        return 50.0
    return moment / area


def infer(signals, rules: RuleBase | None = None) -> float:
    """One-shot Mamdani evaluation of a ``(qm, im, dm)`` triple."""
    qm, im, dm = signals
    return FuzzyEngine(rules=rules).infer(qm, im, dm)
