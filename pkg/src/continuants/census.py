"""Exhaustive census of bounded sequences with a prescribed continuant.

Every element is strictly below the bound ``N``. The search is a depth-first
walk over prefixes carrying the pair ``(p, q) = (<prefix^->, <prefix>)``.
Two pruning rules keep the walk small; both are exact.

* A child ``a`` is only generated while ``a*q + p <= target`` (continuants
  grow strictly with length).
* A nonempty suffix ``v`` completes the prefix iff
  ``target = q*<v> + p*<v_>``. Writing ``x = <v>``, ``y = <v_>`` gives
  ``y <= x <= N*y``, so ``y`` lies in ``[target/(q*N + p), target/(q + p)]``
  and ``p*y = target (mod q)``. A prefix with no such ``y`` is dropped.

The second rule is what makes desk-scale targets like ``3**10`` cheap; it
never removes a real solution.
"""
from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Literal, Optional, Sequence

from .core import PartialQuotients, continuant
from .errors import BudgetExceededError, CountOverflowError, OutOfRangeError

Mode = Literal["sequences", "fractions"]
MODES = ("sequences", "fractions")
DEFAULT_NODE_BUDGET = 10**9
UINT64_MAX = 2**64 - 1


@dataclass(frozen=True)
class CensusQuery:
    target: int
    bound: int
    mode: Mode = "sequences"

    def __post_init__(self):
        if self.target < 2:
            raise OutOfRangeError(f"target must be >= 2, got {self.target}")
        if self.bound < 2:
            raise OutOfRangeError(f"bound must be >= 2, got {self.bound}")
        if self.mode not in MODES:
            raise OutOfRangeError(f"mode must be one of {MODES}, got {self.mode!r}")


@dataclass(frozen=True)
class CountResult:
    count: int
    nodes_visited: int
    elapsed: float
    exhaustive: bool = True

    @property
    def millis(self) -> int:
        return round(self.elapsed * 1000)


def _completable(target: int, bound: int, p: int, q: int) -> bool:
    """Can the prefix with continuants (p, q) be extended by a nonempty suffix to hit target?"""
    lo = -(-target // (q * bound + p))
    hi = target // (q + p)
    if lo > hi:
        return False
    if hi - lo + 1 >= q:
        return True
    y0 = target * pow(p, -1, q) % q
    return lo + (y0 - lo) % q <= hi


class _Walker:
    """One depth-first walk; keeps the node counter and budget."""

    def __init__(self, target: int, bound: int, budget: int):
        self.target = target
        self.bound = bound
        self.budget = budget
        self.nodes = 0
        self.found = 0

    def _tick(self):
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceededError(self.budget, self.nodes, self.found)

    def _children(self, p: int, q: int, descending: bool) -> list[tuple[int, int, int]]:
        target = self.target
        top = min(self.bound - 1, (target - p) // q)
        out = []
        for a in range(1, top + 1):
            nq = a * q + p
            if nq == target or _completable(target, self.bound, q, nq):
                out.append((a, q, nq))
        if descending:
            out.reverse()
        return out

    def walk(self, first_values: Sequence[int], descending: bool = False) -> Iterator[PartialQuotients]:
        """Yield every solution whose first element is in ``first_values``.

        Output is in lexicographic order (reverse order if ``descending``).
        """
        target, bound = self.target, self.bound
        firsts = sorted((a for a in first_values if 1 <= a < bound and a <= target), reverse=descending)
        # stack entries: (path, p, q); pushed in reverse so pops come out in order
        stack = []
        for a in reversed(firsts):
            if a == target or _completable(target, bound, 1, a):
                stack.append(((a,), 1, a))
        while stack:
            path, p, q = stack.pop()
            self._tick()
            if q == target:
                self.found += 1
                yield path
                continue
            for a, np_, nq in reversed(self._children(p, q, descending)):
                stack.append((path + (a,), np_, nq))

    def count(self, first_values: Sequence[int], canonical_only: bool) -> int:
        """Count solutions without materializing them."""
        target, bound = self.target, self.bound
        stack = []
        for a in first_values:
            if 1 <= a < bound and a <= target and (a == target or _completable(target, bound, 1, a)):
                stack.append((1, a, a))
        budget = self.budget
        nodes = self.nodes
        found = 0
        while stack:
            p, q, last = stack.pop()
            nodes += 1
            if nodes > budget:
                raise BudgetExceededError(budget, nodes, self.found + found)
            if q == target:
                if not canonical_only or last >= 2:
                    found += 1
                continue
            top = min(bound - 1, (target - p) // q)
            for a in range(1, top + 1):
                nq = a * q + p
                if nq == target or _completable(target, bound, q, nq):
                    stack.append((q, nq, a))
        self.nodes = nodes
        self.found += found
        return found


def _check_budget(node_budget: int) -> None:
    if node_budget < 1:
        raise OutOfRangeError("node budget must be positive")


def _split_firsts(bound: int, workers: int) -> list[list[int]]:
    firsts = list(range(1, bound))
    chunks = [firsts[i::workers] for i in range(workers)]
    return [c for c in chunks if c]


def _enumerate_chunk(args):
    target, bound, budget, firsts, canonical_only = args
    walker = _Walker(target, bound, budget)
    found = [u for u in walker.walk(firsts) if not canonical_only or u[-1] >= 2]
    return found, walker.nodes


def _count_chunk(args):
    target, bound, budget, firsts, canonical_only = args
    walker = _Walker(target, bound, budget)
    return walker.count(firsts, canonical_only), walker.nodes


def enumerate_sequences(
    query: CensusQuery,
    node_budget: int = DEFAULT_NODE_BUDGET,
    workers: int = 1,
) -> list[PartialQuotients]:
    """All sequences with elements in ``[1, N-1]`` whose continuant is the target.

    In ``fractions`` mode only canonical expansions (last element >= 2) are
    returned, one per reduced fraction c/target. The result is sorted
    lexicographically and does not depend on ``workers``.
    """
    _check_budget(node_budget)
    canonical_only = query.mode == "fractions"
    if workers <= 1:
        walker = _Walker(query.target, query.bound, node_budget)
        return [u for u in walker.walk(range(1, query.bound)) if not canonical_only or u[-1] >= 2]
    jobs = [(query.target, query.bound, node_budget, chunk, canonical_only)
            for chunk in _split_firsts(query.bound, workers)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_enumerate_chunk, jobs))
    nodes = sum(n for _, n in parts)
    merged = sorted(u for found, _ in parts for u in found)
    if nodes > node_budget:
        raise BudgetExceededError(node_budget, nodes, len(merged))
    return merged


def count_target(
    target: int,
    bound: int,
    mode: Mode = "sequences",
    node_budget: int = DEFAULT_NODE_BUDGET,
    workers: int = 1,
) -> CountResult:
    """Exact number of bounded sequences (or canonical fractions) with continuant ``target``."""
    query = CensusQuery(target, bound, mode)
    _check_budget(node_budget)
    canonical_only = mode == "fractions"
    start = time.perf_counter()
    if workers <= 1:
        walker = _Walker(target, bound, node_budget)
        count = walker.count(range(1, bound), canonical_only)
        nodes = walker.nodes
    else:
        jobs = [(target, bound, node_budget, chunk, canonical_only)
                for chunk in _split_firsts(bound, workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_count_chunk, jobs))
        count = sum(c for c, _ in parts)
        nodes = sum(n for _, n in parts)
        if nodes > node_budget:
            raise BudgetExceededError(node_budget, nodes, count)
    elapsed = time.perf_counter() - start
    if count > UINT64_MAX:
        raise CountOverflowError(f"count {count} does not fit in 64 bits")
    return CountResult(count=count, nodes_visited=nodes, elapsed=elapsed)


def count_f(
    a: int,
    m: int,
    N: int,
    mode: Mode = "sequences",
    node_budget: int = DEFAULT_NODE_BUDGET,
    workers: int = 1,
) -> CountResult:
    """f(a^m, N): the number of sequences with elements < N and continuant a^m."""
    if a < 2 or m < 1 or N < 2:
        raise OutOfRangeError(f"need a >= 2, m >= 1, N >= 2; got a={a}, m={m}, N={N}")
    return count_target(a**m, N, mode, node_budget, workers)


def first_sequence(
    target: int,
    bound: int,
    *,
    first_values: Optional[Sequence[int]] = None,
    accept=None,
    largest: bool = True,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> Optional[PartialQuotients]:
    """Lexicographically largest (or smallest) solution passing ``accept``, or None."""
    walker = _Walker(target, bound, node_budget)
    firsts = range(1, bound) if first_values is None else first_values
    for u in walker.walk(firsts, descending=largest):
        if accept is None or accept(u):
            return u
    return None


def _expansion_below(c: int, d: int, bound: int) -> tuple[Optional[PartialQuotients], bool]:
    """Canonical expansion of c/d if all elements < bound; also whether the split form qualifies.

    The split form replaces the last element ``x`` by ``(x - 1, 1)``.
    """
    out = []
    while c:
        q, r = divmod(d, c)
        if q > bound or (q == bound and r != 0):
            return None, False
        out.append(q)
        d, c = c, r
    last_ok = out[-1] < bound
    return tuple(out), last_ok


def count_by_scan(target: int, bound: int, mode: Mode = "sequences") -> int:
    """Count solutions by expanding every c/target, 1 <= c < target, gcd(c, target) = 1.

    Independent of the depth-first walk: each reduced c/target has exactly two
    expansions, the canonical one and the one ending in 1. O(target log target).
    """
    CensusQuery(target, bound, mode)
    total = 0
    for c in range(1, target):
        if math.gcd(c, target) != 1:
            continue
        expansion, canonical_ok = _expansion_below(c, target, bound)
        if expansion is None:
            continue
        if canonical_ok:
            total += 1
        if mode == "sequences":
            # the split form ends (..., x - 1, 1), valid iff x - 1 < bound
            total += 1
    return total


def zaremba_witness(d: int, N: int) -> Optional[tuple[int, PartialQuotients]]:
    """Smallest c with gcd(c, d) = 1 whose expansion of c/d has all elements < N."""
    if d < 2:
        raise OutOfRangeError(f"d must be >= 2, got {d}")
    for c in range(1, d):
        if math.gcd(c, d) != 1:
            continue
        expansion, canonical_ok = _expansion_below(c, d, N)
        if expansion is not None and canonical_ok:
            return c, expansion
    return None


def to_jsonl(sequences: Sequence[PartialQuotients]) -> str:
    """One JSON object per line; continuants are decimal strings."""
    lines = [
        json.dumps({"elements": list(u), "continuant": str(continuant(u))}, separators=(",", ":"))
        for u in sequences
    ]
    return "".join(line + "\n" for line in lines)


CSV_FIELDS = ("a", "m", "N", "mode", "count", "nodes", "millis")


def to_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: row[k] for k in CSV_FIELDS})
    return buf.getvalue()


def summary_row(a: int, m: int, N: int, mode: str, result: CountResult) -> dict:
    return {
        "a": a, "m": m, "N": N, "mode": mode,
        "count": result.count, "nodes": result.nodes_visited, "millis": result.millis,
    }


__all__ = [
    "CensusQuery", "CountResult", "DEFAULT_NODE_BUDGET", "MODES",
    "count_by_scan", "count_f", "count_target", "enumerate_sequences",
    "first_sequence", "summary_row", "to_csv", "to_jsonl", "zaremba_witness",
]
