"""Smallset row selection.

Three strategies over the coverage matrix C and distance matrix Q:

* ``random``: seeded uniform draw of K rows;
* ``coverage``: any K rows such that every effective step altered at least
  one of them (greedy set cover, exact search as fallback);
* ``coverage_variety``: among coverage-feasible K-subsets, maximize the total
  pairwise appearance distance z'Qz, so the chosen rows look as different
  from each other as possible.

Steps whose coverage column is all zero cannot be covered by any row; they
are removed from the constraints, reported in ``dropped_steps``, and flagged
with a warning.

Everything here is exact integer arithmetic on a purpose-built 64-bit PRNG,
so a fixed seed reproduces the same selection on any platform.  The variety
problem is solved exactly by enumeration while C(N, K) stays within
``exhaustive_limit``; past that a steepest-ascent swap search with seeded
restarts takes over and the result is flagged ``heuristic``.  Objective ties
always resolve to the lexicographically smallest row-id set.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from itertools import combinations

from .diffing import CoverageMatrix, DistanceMatrix
from .errors import InfeasibleK, KTooLarge, SmalltimeWarning

_MASK64 = (1 << 64) - 1

RESTARTS = 32


class SplitMix64:
    """Deterministic 64-bit generator used for all seeded draws."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Unbiased draw from range(n) by rejection."""
        if n <= 0:
            raise ValueError("below() needs n >= 1")
        threshold = (_MASK64 + 1) - ((_MASK64 + 1) % n)
        while True:
            value = self.next_u64()
            if value < threshold:
                return value % n

    def sample(self, n: int, k: int) -> list[int]:
        """K distinct indices from range(n), by partial Fisher-Yates."""
        pool = list(range(n))
        for i in range(k):
            j = i + self.below(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]


@dataclass(frozen=True)
class SelectorConfig:
    k: int
    method: str = "coverage_variety"
    seed: int = 0
    exhaustive_limit: int = 2_000_000
    warn_bounds: tuple[int, int] = (5, 15)


@dataclass(frozen=True)
class SmallsetSelection:
    """Result of one selection run.

    ``z`` is the 0/1 membership vector over the coverage matrix's row order;
    ``selected_row_ids`` is the same set as ascending row ids.
    ``dropped_steps`` lists 1-based steps excluded from the constraints
    because no row covers them.  ``objective_value`` is z'Qz for the variety
    method and 0 otherwise.
    """

    selected_row_ids: tuple[int, ...]
    z: tuple[int, ...]
    method: str
    objective_value: int
    seed: int | None
    dropped_steps: tuple[int, ...]
    heuristic: bool = False

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "k": len(self.selected_row_ids),
            "selected_row_ids": list(self.selected_row_ids),
            "z": list(self.z),
            "objective_value": self.objective_value,
            "seed": self.seed,
            "dropped_steps": list(self.dropped_steps),
            "heuristic": self.heuristic,
        }


def _prepare(coverage: CoverageMatrix, cfg: SelectorConfig) -> tuple[int, list[int]]:
    """Shared validation; returns (N, retained 0-based step indices)."""
    n = len(coverage.row_ids)
    if cfg.k < 1:
        raise ValueError(f"K must be at least 1, got {cfg.k}")
    if cfg.k > n:
        raise KTooLarge(f"K={cfg.k} exceeds the {n} selectable rows")
    lo, hi = cfg.warn_bounds
    if not lo <= cfg.k <= hi:
        warnings.warn(
            f"K={cfg.k} is outside the recommended Smallset size of {lo}-{hi} rows",
            SmalltimeWarning,
            stacklevel=3,
        )
    retained = []
    dropped = []
    for h in range(coverage.step_count):
        if any(row[h] for row in coverage.entries):
            retained.append(h)
        else:
            dropped.append(h + 1)
    if dropped:
        warnings.warn(
            f"steps {dropped} changed no rows and were dropped from the coverage constraints",
            SmalltimeWarning,
            stacklevel=3,
        )
    return n, retained


def _result(
    coverage: CoverageMatrix,
    indices: set[int],
    method: str,
    objective: int,
    seed: int | None,
    retained: list[int],
    heuristic: bool = False,
) -> SmallsetSelection:
    dropped = tuple(
        h + 1 for h in range(coverage.step_count) if h not in retained
    )
    return SmallsetSelection(
        selected_row_ids=tuple(sorted(coverage.row_ids[i] for i in indices)),
        z=tuple(1 if i in indices else 0 for i in range(len(coverage.row_ids))),
        method=method,
        objective_value=objective,
        seed=seed,
        dropped_steps=dropped,
        heuristic=heuristic,
    )


def select_random(coverage: CoverageMatrix, cfg: SelectorConfig) -> SmallsetSelection:
    """Seeded uniform draw of K rows, with a warning for uncovered steps."""
    n, retained = _prepare(coverage, cfg)
    rng = SplitMix64(cfg.seed)
    chosen = set(rng.sample(n, cfg.k))
    uncovered = [
        h + 1
        for h in retained
        if not any(coverage.entries[i][h] for i in chosen)
    ]
    if uncovered:
        warnings.warn(
            f"random selection leaves steps {uncovered} with no altered row in the Smallset",
            SmalltimeWarning,
            stacklevel=2,
        )
    return _result(coverage, chosen, "random", 0, cfg.seed, retained)


def _greedy_cover(coverage: CoverageMatrix, retained: list[int]) -> list[int]:
    """Classic greedy set cover; returns row indices, ignoring any K budget."""
    uncovered = set(retained)
    chosen: list[int] = []
    while uncovered:
        best_i = -1
        best_gain = 0
        for i, row in enumerate(coverage.entries):
            if i in chosen:
                continue
            gain = sum(1 for h in uncovered if row[h])
            if gain > best_gain:
                best_gain = gain
                best_i = i
        if best_i < 0:
            break  # unreachable for retained steps, kept as a guard
        chosen.append(best_i)
        uncovered -= {h for h in retained if coverage.entries[best_i][h]}
    return chosen


def _min_cover(coverage: CoverageMatrix, retained: list[int], limit: int) -> list[int] | None:
    """Smallest cover of size <= limit via depth-first search, else None.

    Branches on the uncovered step with the fewest candidate rows, which
    keeps the tree tiny for realistic step counts.
    """
    candidates = {
        h: [i for i, row in enumerate(coverage.entries) if row[h]] for h in retained
    }
    best: list[int] | None = None

    def dfs(chosen: list[int], uncovered: set[int]) -> None:
        nonlocal best
        if not uncovered:
            if best is None or len(chosen) < len(best):
                best = list(chosen)
            return
        bound = len(best) - 1 if best is not None else limit
        if len(chosen) >= bound:
            return
        pivot = min(uncovered, key=lambda h: (len(candidates[h]), h))
        for i in candidates[pivot]:
            if i in chosen:
                continue
            covered = {h for h in uncovered if coverage.entries[i][h]}
            chosen.append(i)
            dfs(chosen, uncovered - covered)
            chosen.pop()

    dfs([], set(retained))
    if best is not None and len(best) <= limit:
        return best
    return None


def _fill(chosen: list[int], n: int, k: int) -> set[int]:
    out = set(chosen)
    for i in range(n):
        if len(out) == k:
            break
        out.add(i)
    return out


def _covering_set(coverage: CoverageMatrix, cfg: SelectorConfig, retained: list[int]) -> set[int]:
    n = len(coverage.row_ids)
    greedy = _greedy_cover(coverage, retained)
    if len(greedy) <= cfg.k:
        return _fill(greedy, n, cfg.k)
    exact = _min_cover(coverage, retained, cfg.k)
    if exact is None:
        raise InfeasibleK(
            f"no {cfg.k}-row subset covers every effective step "
            f"(greedy cover needs {len(greedy)} rows)"
        )
    return _fill(exact, n, cfg.k)


def select_coverage(coverage: CoverageMatrix, cfg: SelectorConfig) -> SmallsetSelection:
    """K rows such that every effective step altered at least one of them."""
    _, retained = _prepare(coverage, cfg)
    chosen = _covering_set(coverage, cfg, retained)
    return _result(coverage, chosen, "coverage", 0, None, retained)


def select_coverage_variety(
    coverage: CoverageMatrix,
    distance: DistanceMatrix,
    cfg: SelectorConfig,
) -> SmallsetSelection:
    """Coverage-feasible K-subset maximizing z'Qz.

    Exact while C(N, K) <= cfg.exhaustive_limit, otherwise steepest-ascent
    swap search restarted from seeded starts (flagged heuristic).
    """
    n, retained = _prepare(coverage, cfg)
    if distance.row_ids != coverage.row_ids:
        raise ValueError("distance and coverage matrices describe different rows")
    base = _covering_set(coverage, cfg, retained)  # raises InfeasibleK early
    q = distance.q

    if math.comb(n, cfg.k) <= cfg.exhaustive_limit:
        chosen, objective = _variety_exact(coverage, q, cfg.k, retained)
        return _result(coverage, chosen, "coverage_variety", objective, None, retained)

    chosen, objective = _variety_ascent(coverage, q, cfg, retained, base)
    return _result(
        coverage, chosen, "coverage_variety", objective, cfg.seed, retained, heuristic=True
    )


def _variety_exact(
    coverage: CoverageMatrix,
    q: tuple[tuple[int, ...], ...],
    k: int,
    retained: list[int],
) -> tuple[set[int], int]:
    n = len(coverage.row_ids)
    ids = coverage.row_ids
    best_obj = -1
    best_ids: tuple[int, ...] | None = None
    best_set: tuple[int, ...] = ()
    for combo in combinations(range(n), k):
        ok = True
        for h in retained:
            if not any(coverage.entries[i][h] for i in combo):
                ok = False
                break
        if not ok:
            continue
        pair_sum = 0
        for a in range(k):
            qa = q[combo[a]]
            for b in range(a + 1, k):
                pair_sum += qa[combo[b]]
        objective = 2 * pair_sum
        if objective > best_obj:
            best_obj, best_set = objective, combo
            best_ids = tuple(sorted(ids[i] for i in combo))
        elif objective == best_obj:
            cand = tuple(sorted(ids[i] for i in combo))
            if best_ids is None or cand < best_ids:
                best_set, best_ids = combo, cand
    # base cover existence guarantees at least one feasible subset
    return set(best_set), best_obj


def _variety_ascent(
    coverage: CoverageMatrix,
    q: tuple[tuple[int, ...], ...],
    cfg: SelectorConfig,
    retained: list[int],
    base: set[int],
) -> tuple[set[int], int]:
    n = len(coverage.row_ids)
    ids = coverage.row_ids
    core = sorted(base)[: cfg.k]
    rng = SplitMix64(cfg.seed)

    best_obj = -1
    best_ids: tuple[int, ...] | None = None
    best_set: set[int] = set()
    for restart in range(RESTARTS):
        if restart == 0:
            start = set(base)
        else:
            # keep a covering core for feasibility, randomize the free slots
            start = set(_cover_core(coverage, core, retained))
            while len(start) < cfg.k:
                start.add(rng.below(n))
        selected, objective = _ascend(coverage, q, start, retained)
        cand = tuple(sorted(ids[i] for i in selected))
        if objective > best_obj or (objective == best_obj and (best_ids is None or cand < best_ids)):
            best_obj, best_ids, best_set = objective, cand, selected
    return best_set, best_obj


def _cover_core(coverage: CoverageMatrix, core: list[int], retained: list[int]) -> list[int]:
    # Trim the core to rows still needed: drop any whose steps stay covered.
    kept = list(core)
    for i in list(kept):
        without = [r for r in kept if r != i]
        if all(any(coverage.entries[r][h] for r in without) for h in retained):
            kept = without
    return kept


def _ascend(
    coverage: CoverageMatrix,
    q: tuple[tuple[int, ...], ...],
    start: set[int],
    retained: list[int],
) -> tuple[set[int], int]:
    """Steepest-ascent single-swap search from one feasible start."""
    n = len(coverage.row_ids)
    selected = set(start)
    rowsum = [sum(q[r][s] for s in selected) for r in range(n)]
    cover = {h: sum(coverage.entries[i][h] for i in selected) for h in retained}

    while True:
        best_delta = 0
        best_swap: tuple[int, int] | None = None
        for out in sorted(selected):
            c_out = coverage.entries[out]
            for cand in range(n):
                if cand in selected:
                    continue
                feasible = all(
                    cover[h] - c_out[h] + coverage.entries[cand][h] >= 1 for h in retained
                )
                if not feasible:
                    continue
                delta = 2 * (rowsum[cand] - q[cand][out] - rowsum[out])
                if delta > best_delta:
                    best_delta = delta
                    best_swap = (out, cand)
        if best_swap is None:
            break
        out, cand = best_swap
        selected.remove(out)
        selected.add(cand)
        for r in range(n):
            rowsum[r] += q[r][cand] - q[r][out]
        for h in retained:
            cover[h] += coverage.entries[cand][h] - coverage.entries[out][h]
    objective = sum(rowsum[i] for i in selected)
    return selected, objective
