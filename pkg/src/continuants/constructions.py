"""Doubling constructions that turn one witness for a^k into many witnesses for a^m.

A witness here is a sequence of partial quotients whose continuant is exactly
a power of ``a`` and whose elements are all below an exclusive bound (``a**s``
in the main family). Every sequence this module returns has had its continuant
recomputed from scratch before being handed out.
"""
from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

from filelock import FileLock

from .bounds import base_window
from .census import first_sequence
from .core import PartialQuotients, as_sequence, continuant
from .errors import (
    ConstructionInvariantError,
    OutOfRangeError,
    PreconditionError,
    SeedNotFoundError,
)

SEED_CACHE_VERSION = 1
DEFAULT_SEED_CACHE = Path.home() / ".cache" / "continuants" / "seeds.jsonl"


@dataclass(frozen=True)
class ConstructionParams:
    a: int
    s: int
    m: int
    r: int

    def __post_init__(self):
        if self.a < 2:
            raise OutOfRangeError(f"a must be >= 2, got {self.a}")
        if self.s < 2:
            raise OutOfRangeError(f"s must be >= 2, got {self.s}")
        if not 0 <= self.r <= self.s:
            raise OutOfRangeError(f"r must satisfy 0 <= r <= s, got r={self.r}, s={self.s}")
        if (self.m - self.r) % 2:
            raise PreconditionError(f"r={self.r} and m={self.m} must have the same parity")

    @property
    def b(self) -> int:
        return self.a**self.r

    @property
    def element_bound(self) -> int:
        return self.a**self.s

    @property
    def parent_exponent(self) -> int:
        return (self.m - self.r) // 2


@dataclass
class WitnessSet:
    """Distinct sequences sharing one continuant, with how each was produced."""

    target: int
    element_bound: int
    members: tuple[PartialQuotients, ...] = ()
    provenance: dict[PartialQuotients, tuple[str, ...]] = field(default_factory=dict)

    def __len__(self):
        return len(self.members)

    def __contains__(self, u):
        return tuple(u) in self.provenance

    def __iter__(self):
        return iter(self.members)

    def verify(self) -> None:
        """Re-check every invariant; raises ConstructionInvariantError on the first violation."""
        if len(set(self.members)) != len(self.members):
            raise ConstructionInvariantError("duplicate members")
        for u in self.members:
            if continuant(u) != self.target:
                raise ConstructionInvariantError(f"{u} has continuant {continuant(u)} != {self.target}")
            if max(u) >= self.element_bound:
                raise ConstructionInvariantError(f"{u} has an element >= {self.element_bound}")

    def to_jsonl(self) -> str:
        lines = []
        for u in self.members:
            lines.append(json.dumps({
                "elements": list(u),
                "continuant": str(self.target),
                "provenance": list(self.provenance[u]),
            }, separators=(",", ":")))
        return "".join(line + "\n" for line in lines)


def _checked(w: PartialQuotients, expected: int, what: str) -> PartialQuotients:
    got = continuant(w)
    if got != expected:
        raise ConstructionInvariantError(f"{what}: {w} has continuant {got}, expected {expected}")
    return w


def hensley_double(u: Iterable[int], b: int) -> tuple[PartialQuotients, PartialQuotients]:
    """Return ``(w, w')`` with <w> = b<u>^2 and <w'> = <u>^2.

    ``w  = (u_1..u_{n-1}, u_n - 1, 1, b - 1, u_n, ..., u_1)``
    ``w' = (u_1..u_{n-1}, u_n - 1, u_n + 1, u_{n-1}, ..., u_1)``
    """
    seq = as_sequence(u)
    if not seq:
        raise PreconditionError("u must be nonempty")
    if b < 2:
        raise PreconditionError(f"b must be >= 2, got {b}")
    last = seq[-1]
    if last == 1:
        raise PreconditionError("the last element of u must be > 1")
    head, back = seq[:-1], tuple(reversed(seq))
    w = head + (last - 1, 1, b - 1) + back
    w_prime = head + (last - 1, last + 1) + back[1:]
    k = continuant(seq)
    return _checked(w, b * k * k, "w"), _checked(w_prime, k * k, "w'")


def doubling_forms(u: PartialQuotients, b: int) -> tuple[PartialQuotients, PartialQuotients]:
    """The two children of ``u`` for multiplier ``b`` (``b = 1`` is the r = 0 case).

    For ``b > 1``::

        (u_1..u_n, b - 1, 1, u_n - 1, u_{n-1}..u_1)
        (u_1..u_{n-1}, u_n - 1, 1, b - 1, u_n..u_1)

    For ``b = 1``::

        (u_1..u_{n-1}, u_n + 1, u_n - 1, u_{n-1}..u_1)
        (u_1..u_{n-1}, u_n - 1, u_n + 1, u_{n-1}..u_1)

    Each child has continuant ``b * <u>**2``. No bound checks happen here.
    """
    last = u[-1]
    head, inner_back = u[:-1], tuple(reversed(u[:-1]))
    if b > 1:
        first = u + (b - 1, 1, last - 1) + inner_back
        second = head + (last - 1, 1, b - 1) + tuple(reversed(u))
    else:
        first = head + (last + 1, last - 1) + inner_back
        second = head + (last - 1, last + 1) + inner_back
    expected = b * continuant(u) ** 2
    return _checked(first, expected, "doubling"), _checked(second, expected, "doubling")


def _endpoint_problem(u: Sequence[int], bound: int, forbid_top: bool) -> Optional[str]:
    if u[0] == 1 or u[-1] == 1:
        return "endpoints must differ from 1"
    if forbid_top and (u[0] == bound - 1 or u[-1] == bound - 1):
        return f"endpoints must differ from {bound - 1}"
    return None


def lemma2_children(u: Iterable[int], params: ConstructionParams) -> list[PartialQuotients]:
    """The two sequences with continuant a^m built from ``u`` with <u> = a^((m - r)/2).

    Preconditions: every element of ``u`` lies in ``[1, a^s - 1]`` and neither
    endpoint is 1 or ``a^s - 1``. Both children keep those properties.
    """
    seq = as_sequence(u)
    if not seq:
        raise PreconditionError("u must be nonempty")
    bound = params.element_bound
    if params.m <= params.s:
        raise PreconditionError(f"m must exceed s (m={params.m}, s={params.s})")
    expected = params.a**params.parent_exponent
    if continuant(seq) != expected:
        raise PreconditionError(
            f"<u> = {continuant(seq)} but a^((m-r)/2) = {expected}")
    if max(seq) > bound - 1:
        raise PreconditionError(f"elements of u must be <= {bound - 1}")
    problem = _endpoint_problem(seq, bound, forbid_top=True)
    if problem:
        raise PreconditionError(problem)
    children = doubling_forms(seq, params.b if params.r else 1)
    target = params.a**params.m
    for w in children:
        _checked(w, target, "lemma 2")
        if max(w) >= bound or _endpoint_problem(w, bound, forbid_top=True):
            raise ConstructionInvariantError(f"{w} violates the element or endpoint constraints")
    return list(children)


def endpoint_variants(w: Iterable[int]) -> list[PartialQuotients]:
    """``w`` together with its three rewrites that split an endpoint ``x`` into ``(1, x - 1)``."""
    seq = as_sequence(w)
    if not seq:
        raise PreconditionError("w must be nonempty")
    if seq[0] < 2 or seq[-1] < 2:
        raise PreconditionError("both endpoints must be >= 2")
    if len(seq) == 1 and seq[0] < 3:
        raise PreconditionError("a single element must be >= 3 to split both ends")
    front = (1, seq[0] - 1) + seq[1:]
    back = seq[:-1] + (seq[-1] - 1, 1)
    if len(seq) == 1:
        both = (1, seq[0] - 2, 1)
    else:
        both = (1, seq[0] - 1) + seq[1:-1] + (seq[-1] - 1, 1)
    out = [seq, front, back, both]
    k = continuant(seq)
    for v in out:
        _checked(v, k, "endpoint variant")
    return out


VARIANT_TAGS = ("variant:none", "variant:front", "variant:back", "variant:both")


class SeedCache:
    """JSON-lines file of seed sequences keyed by (a, s, m).

    Reads and writes are serialized with a thread lock and a file lock.
    ``path=None`` keeps the cache in memory only.
    """

    def __init__(self, path: Optional[Path] = DEFAULT_SEED_CACHE):
        self.path = Path(path) if path is not None else None
        self._lock = threading.Lock()
        self._memory: dict[tuple[int, int, int], PartialQuotients] = {}
        self._loaded = False

    def _file_lock(self):
        return FileLock(str(self.path) + ".lock")

    def _load(self):
        if self._loaded or self.path is None:
            return
        self._loaded = True
        if not self.path.exists():
            return
        for line in self.path.read_text().splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rec = json.loads(line)
            if rec.get("version") != SEED_CACHE_VERSION:
                continue
            self._memory[(rec["a"], rec["s"], rec["m"])] = tuple(rec["elements"])

    def get(self, a: int, s: int, m: int) -> Optional[PartialQuotients]:
        with self._lock:
            if self.path is not None:
                with self._file_lock():
                    self._load()
            return self._memory.get((a, s, m))

    def put(self, a: int, s: int, m: int, elements: PartialQuotients) -> None:
        with self._lock:
            self._memory[(a, s, m)] = tuple(elements)
            if self.path is None:
                return
            self.path.parent.mkdir(parents=True, exist_ok=True)
            rec = {"version": SEED_CACHE_VERSION, "a": a, "s": s, "m": m, "elements": list(elements)}
            with self._file_lock():
                new = not self.path.exists()
                with self.path.open("a") as fh:
                    if new:
                        fh.write(f"# seed cache, format version {SEED_CACHE_VERSION}\n")
                    fh.write(json.dumps(rec, separators=(",", ":")) + "\n")


_default_cache: Optional[SeedCache] = None


def default_seed_cache() -> SeedCache:
    global _default_cache
    if _default_cache is None:
        _default_cache = SeedCache()
    return _default_cache


def search_seed(a: int, m: int, bound: int, forbid_top: bool = True) -> Optional[PartialQuotients]:
    """Lexicographically largest sequence with continuant a^m, elements < bound, admissible endpoints."""
    target = a**m
    top = bound - 1 if forbid_top else None
    firsts = [x for x in range(2, bound) if x != top]

    def accept(u):
        return u[-1] != 1 and u[-1] != top

    return first_sequence(target, bound, first_values=firsts, accept=accept, largest=True)


def find_seed(a: int, s: int, m: int, cache: Optional[SeedCache] = None) -> PartialQuotients:
    """A seed for (a, s, m): continuant a^m, elements < a^s, endpoints not in {1, a^s - 1}."""
    cache = cache if cache is not None else default_seed_cache()
    hit = cache.get(a, s, m)
    if hit is not None:
        bound = a**s
        if continuant(hit) == a**m and max(hit) < bound and not _endpoint_problem(hit, bound, True):
            return hit
    found = search_seed(a, m, a**s)
    if found is None:
        raise SeedNotFoundError(a, s, m)
    cache.put(a, s, m, found)
    return found


def seed_sequences(a: int, s: int, cache: Optional[SeedCache] = None) -> dict[int, PartialQuotients]:
    """One seed for every exponent in the base window of (a, s)."""
    if a < 2 or s < 2:
        raise OutOfRangeError(f"need a >= 2 and s >= 2, got a={a}, s={s}")
    lo, hi = base_window(a, s)
    return {m: find_seed(a, s, m, cache) for m in range(lo, hi + 1)}


@dataclass(frozen=True)
class _Scheme:
    a: int
    bound: int
    window: tuple[int, int]
    exponents: tuple[int, ...]
    forbid_top: bool


def _grow(scheme: _Scheme, m: int, seed_for) -> dict[PartialQuotients, tuple[str, ...]]:
    """Core members for exponent m (before endpoint variants), with provenance."""
    memo: dict[int, dict[PartialQuotients, tuple[str, ...]]] = {}
    lo, hi = scheme.window

    def core(k: int) -> dict[PartialQuotients, tuple[str, ...]]:
        if k in memo:
            return memo[k]
        if k <= hi:
            if k < lo:
                out = {}
            else:
                seed = seed_for(k)
                out = {seed: (f"seed:m={k}",)}
        else:
            out = {}
            target = scheme.a**k
            for r in scheme.exponents:
                if (k - r) % 2 or (k - r) // 2 < lo:
                    continue
                b = scheme.a**r if r else 1
                if b - 1 > scheme.bound - 1:
                    continue
                for u, trace in core((k - r) // 2).items():
                    for form, w in enumerate(doubling_forms(u, b), start=1 if r else 3):
                        _checked(w, target, "family")
                        if w not in out:
                            out[w] = trace + (f"lemma2:r={r}:form={form}",)
        memo[k] = out
        return out

    return core(m)


def _with_variants(core: dict, target: int, bound: int) -> WitnessSet:
    provenance: dict[PartialQuotients, tuple[str, ...]] = {}
    for w, trace in core.items():
        for tag, v in zip(VARIANT_TAGS, endpoint_variants(w)):
            if max(v) >= bound:
                raise ConstructionInvariantError(f"{v} has an element >= {bound}")
            provenance.setdefault(v, trace + (tag,))
    members = tuple(sorted(provenance))
    return WitnessSet(target=target, element_bound=bound, members=members, provenance=provenance)


def generate_family(a: int, s: int, m: int, cache: Optional[SeedCache] = None) -> WitnessSet:
    """Witnesses for continuant a^m with all elements below a^s.

    Seeds cover the base window of exponents; above it every admissible
    ``r`` (``0 <= r <= s``, same parity as m) doubles each parent, and the
    four endpoint variants are applied once at the end. At least ``4*g_m``
    distinct sequences come out.
    """
    if a < 2 or s < 2 or m < 2:
        raise OutOfRangeError(f"need a >= 2, s >= 2, m >= 2; got a={a}, s={s}, m={m}")
    bound = a**s
    lo, hi = base_window(a, s)
    if m < lo:
        # below the window nothing is promised; a direct sequence is never doubled
        # again, so only endpoint 1 is excluded
        direct = search_seed(a, m, bound, forbid_top=False)
        if direct is None:
            raise SeedNotFoundError(a, s, m)
        core = {direct: (f"direct:m={m}",)}
    else:
        scheme = _Scheme(a, bound, (lo, hi), tuple(range(0, s + 1)), True)
        core = _grow(scheme, m, lambda k: find_seed(a, s, k, cache))
    return _with_variants(core, a**m, bound)


THEOREM4_WINDOW = (4, 7)
THEOREM5_SEED = (2, 1, 2)


def theorem4_family(m: int) -> WitnessSet:
    """Witnesses for 3^m with elements <= 3, built with one doubling per step."""
    if m < THEOREM4_WINDOW[0]:
        raise OutOfRangeError(f"m must be >= {THEOREM4_WINDOW[0]}, got {m}")
    scheme = _Scheme(3, 4, THEOREM4_WINDOW, (0, 1), True)

    def seed_for(k):
        found = search_seed(3, k, 4)
        if found is None:
            raise SeedNotFoundError(3, 1, k)
        return found

    return _with_variants(_grow(scheme, m, seed_for), 3**m, 4)


def theorem5_family(k: int) -> WitnessSet:
    """Witnesses for 2^(2^k - 1) with elements <= 2, grown from (2, 1, 2) with b = 2."""
    if k < 2:
        raise OutOfRangeError(f"k must be >= 2, got {k}")
    scheme = _Scheme(2, 3, (3, 3), (1,), False)
    core = _grow(scheme, 2**k - 1, lambda _: THEOREM5_SEED)
    return _with_variants(core, 2 ** (2**k - 1), 3)


__all__ = [
    "ConstructionParams", "SeedCache", "WitnessSet", "doubling_forms", "endpoint_variants",
    "find_seed", "generate_family", "hensley_double", "lemma2_children", "search_seed",
    "seed_sequences", "theorem4_family", "theorem5_family",
]
