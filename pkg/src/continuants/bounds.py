"""Lower-bound machinery: the g_m recurrence, index chains and per-theorem reports.

``g_m`` counts the witnesses the doubling construction is guaranteed to
produce before endpoint variants, so ``f(a^m, a^s) >= 4 * g_m``. All chains
in this module are evaluated with exact integers; only the case-polynomial
roots are real numbers, and those come with certified brackets.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import mpmath

from . import spectral
from .errors import BudgetExceededError, ConstructionInvariantError, NotApplicableError, OutOfRangeError

HOLDS, FAILS, UNAVAILABLE = "holds", "fails", "oracle-unavailable"

# census targets above this are not attempted by the "auto" oracle
AUTO_CENSUS_TARGET = 10**12
AUTO_CENSUS_BUDGET = 2 * 10**6


def base_window(a: int, s: int) -> tuple[int, int]:
    """Exponents m for which g_m = 1 is taken as given (seeds exist).

    For a = 2, s = 2 no seed exists for 2^2 (the only sequence with
    continuant 4 and elements <= 3 is (1, 2, 1)), so the window is shifted to
    m = 6..11 where explicit seeds are known.
    """
    if a < 2 or s < 2:
        raise OutOfRangeError(f"need a >= 2 and s >= 2, got a={a}, s={s}")
    if a == 2 and s == 2:
        return (6, 11)
    return (2, s + 2)


def g_values(exponents: Iterable[int], window: tuple[int, int], m_max: int) -> list[int]:
    """g_0..g_{m_max} for a doubling scheme.

    ``g_m = 1`` inside ``window``, 0 below it, and above it
    ``g_m = 2 * sum(g_{(m - r)/2})`` over allowed ``r`` with ``r = m (mod 2)``.
    """
    lo, hi = window
    exps = sorted(set(exponents))
    g = [0] * (max(m_max, hi) + 1)
    for m in range(lo, hi + 1):
        g[m] = 1
    for m in range(hi + 1, len(g)):
        g[m] = 2 * sum(g[(m - r) // 2] for r in exps if (m - r) % 2 == 0 and (m - r) // 2 >= lo)
    return g[: m_max + 1]


@dataclass(frozen=True)
class GTable:
    s: int
    window: tuple[int, int]
    values: tuple[int, ...]  # indexed by m, 0..m_max

    @property
    def m_max(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, m: int) -> int:
        return self.values[m]


def g_table(s: int, m_max: int, window: Optional[tuple[int, int]] = None) -> GTable:
    """g_2..g_{m_max} for element bound a^s, computed by both forms of the recurrence.

    The sum over ``r`` and the sum over the index range
    ``floor((m - s + 1)/2) .. floor(m/2)`` are evaluated independently (the
    second through prefix sums) and must agree term by term.
    """
    if s < 2 or m_max < 2:
        raise OutOfRangeError(f"need s >= 2 and m_max >= 2, got s={s}, m_max={m_max}")
    window = window or (2, s + 2)
    lo, hi = window
    by_r = g_values(range(0, s + 1), window, m_max)

    size = max(m_max, hi) + 1
    by_k = [0] * size
    prefix = [0] * (size + 1)  # prefix[i] = by_k[0] + ... + by_k[i-1]
    for m in range(size):
        if lo <= m <= hi:
            by_k[m] = 1
        elif m > hi:
            first = max((m - s + 1) // 2, lo)
            last = m // 2
            by_k[m] = 2 * (prefix[last + 1] - prefix[first]) if last >= first else 0
        prefix[m + 1] = prefix[m] + by_k[m]
    for m in range(m_max + 1):
        if by_r[m] != by_k[m]:
            raise ConstructionInvariantError(f"recurrence forms disagree at s={s}, m={m}")
    return GTable(s, window, tuple(by_r))


def floor_log(n: int, a: int) -> int:
    """Largest s with a**s <= n."""
    if n < 1 or a < 2:
        raise OutOfRangeError("need n >= 1 and a >= 2")
    s, p = 0, 1
    while p * a <= n:
        p *= a
        s += 1
    return s


def ceil_log2(x: Fraction) -> int:
    """Smallest integer n with 2**n >= x, for rational x > 0."""
    x = Fraction(x)
    if x <= 0:
        raise OutOfRangeError("ceil_log2 needs x > 0")
    n = 0
    if x <= 1:
        while Fraction(2) ** (n - 1) >= x:
            n -= 1
        return n
    while Fraction(2) ** n < x:
        n += 1
    return n


def iteration_depth(m: int, s: int) -> int:
    """ceil(log2(floor((m - s + 1) / (4s + 4)))), valid for m >= 5s + 5."""
    if m < 5 * s + 5:
        raise NotApplicableError(f"iteration depth needs m >= 5s + 5 = {5 * s + 5}, got m={m}")
    ratio = (m - s + 1) // (4 * s + 4)
    if ratio < 1:
        raise NotApplicableError("floor((m - s + 1)/(4s + 4)) is 0")
    return (ratio - 1).bit_length()


def index_chain(m: int, s: int) -> list[int]:
    """Smallest indices i_0 > i_1 > ... reached by repeatedly applying the recurrence.

    ``i_0 = floor((m - s + 1)/2)`` and ``i_{j+1} = floor((i_j - s + 1)/2)``,
    continuing while the current index is at least s + 3.
    """
    chain = [(m - s + 1) // 2]
    while chain[-1] >= s + 3:
        chain.append((chain[-1] - s + 1) // 2)
    return chain


# -- reports -----------------------------------------------------------------

@dataclass
class BoundReport:
    theorem_id: str
    parameters: dict
    claimed_bound: int
    oracle_value: Optional[int] = None
    oracle_source: Optional[str] = None
    kind: str = "lower"
    notes: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        if self.oracle_value is None:
            return UNAVAILABLE
        if self.kind == "lower":
            ok = self.oracle_value >= self.claimed_bound
        elif self.kind == "upper":
            ok = self.oracle_value <= self.claimed_bound
        else:  # "equal"
            ok = self.oracle_value == self.claimed_bound
        return HOLDS if ok else FAILS

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem_id,
            "kind": self.kind,
            "parameters": {k: _jsonable(v) for k, v in self.parameters.items()},
            "claimed_bound": str(self.claimed_bound),
            "oracle_value": None if self.oracle_value is None else str(self.oracle_value),
            "oracle_source": self.oracle_source,
            "verdict": self.verdict,
            "notes": {k: _jsonable(v) for k, v in self.notes.items()},
        }


REPORT_CSV_FIELDS = ("theorem", "kind", "parameters", "claimed_bound", "oracle_value", "oracle_source", "verdict")


def reports_to_csv(reports: Iterable[BoundReport]) -> str:
    """One row per report; parameters are flattened as ``key=value`` pairs."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_CSV_FIELDS)
    for r in reports:
        d = r.to_dict()
        params = ";".join(f"{k}={v}" for k, v in d["parameters"].items())
        writer.writerow([d["theorem"], d["kind"], params, d["claimed_bound"],
                         d["oracle_value"] or "", d["oracle_source"] or "", d["verdict"]])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, bool) or v is None or isinstance(v, (float, str)):
        return v
    if isinstance(v, int):
        return str(v) if abs(v) >= 2**53 else v
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return str(v)


def _ceil_scaled_power(scale: Fraction, root_of, n: int) -> int:
    """ceil(scale * lambda**n) for an irrational root, tightening the bracket until stable."""
    bits = 64
    while True:
        res = root_of(Fraction(1, 2 ** (bits + 2 * n)))
        lo = math.ceil(scale * res.lo**n)
        hi = math.ceil(scale * res.hi**n)
        if lo == hi:
            return lo
        bits *= 2
        if bits > 4096:
            return hi


def _census_oracle(a: int, m: int, bound: int, budget: int) -> Optional[int]:
    from .census import count_f

    if a**m > AUTO_CENSUS_TARGET:
        return None
    try:
        return count_f(a, m, bound, node_budget=budget).count
    except BudgetExceededError:
        return None


def _attach_oracle(report: BoundReport, a: int, m: int, bound: int, method_value: int,
                   oracle: str, budget: int) -> BoundReport:
    report.notes["method_value_4g"] = method_value
    if oracle in ("auto", "census"):
        value = _census_oracle(a, m, bound, budget)
        if value is not None:
            report.oracle_value, report.oracle_source = value, "census"
            return report
        if oracle == "census":
            return report
    if oracle in ("auto", "method"):
        report.oracle_value, report.oracle_source = method_value, "method:4*g_m"
    return report


def row_vector(s: int) -> tuple[int, ...]:
    """Class-count row vector used in the first step of the matrix chain."""
    cm = spectral.case_matrix(s)
    q = cm.q
    if cm.source == "(13)":
        return (q, (q + 1) // 2, (q + 2) // 2)
    if cm.source == "(20)":
        return (q // 2, (q + 1) // 2, q)
    return (1, 1)


def matrix_chain(s: int, n: int) -> int:
    """2 * row * (2A)^n * (1, ..., 1)^T: exact integer lower bound on g_m after n steps."""
    A = spectral.case_matrix(s).entries
    P = spectral.mat_pow(spectral.mat_scale(2, A), n)
    ones = (1,) * len(A)
    return 2 * sum(x * y for x, y in zip(row_vector(s), spectral.mat_vec(P, ones)))


def theorem1_bound(a: int, s: int, m: int, oracle: str = "auto",
                   node_budget: int = AUTO_CENSUS_BUDGET) -> BoundReport:
    """Explicit finite lower bound on f(a^m, a^s) from the proof chain for this s.

    * s = 2: ``4 * 2^ceil(log2((m+1)/12))`` for a = 2 (m >= 12), with 12
      replaced by 5 for a > 2 (m >= 5).
    * s = 4: ``ceil(4 * lambda^n)`` with n = iteration_depth(m, 4), m >= 25.
    * odd s: ``4 * (s+1)^n``, m > 5s + 5.
    * even s >= 6: ``ceil(4 * (2/3) * lambda^n)``, m >= 5s + 5.

    ``oracle`` is "census", "method" (4*g_m from the recurrence), "auto"
    (census when cheap, otherwise method) or "none".
    """
    if a < 2 or s < 2:
        raise OutOfRangeError(f"need a >= 2 and s >= 2, got a={a}, s={s}")
    params = {"a": a, "s": s, "m": m}
    notes: dict = {"case": spectral.case_of(s)}
    if s == 2:
        base = 12 if a == 2 else 5
        if m < base:
            raise NotApplicableError(f"s=2 chain needs m >= {base}")
        n = ceil_log2(Fraction(m + 1, base))
        claimed = 4 * 2**n
        notes.update(n=n, lam=2.0)
    elif s % 2:
        if m <= 5 * s + 5:
            raise NotApplicableError(f"odd s chain needs m > 5s + 5 = {5 * s + 5}")
        n = iteration_depth(m, s)
        claimed = 4 * (s + 1) ** n
        notes.update(n=n, lam=float(s + 1))
    else:
        n = iteration_depth(m, s)
        poly = spectral.polynomial_Ps(s)
        scale = Fraction(4) if s == 4 else Fraction(8, 3)
        claimed = _ceil_scaled_power(scale, lambda tol: spectral.largest_root(poly, tol), n)
        notes.update(n=n, lam=spectral.largest_root(poly).lam, integer_chain=4 * matrix_chain(s, n))
    if oracle == "none":
        return BoundReport("theorem1", params, claimed, notes=notes)
    table = g_table(s, m, base_window(a, s))
    report = BoundReport("theorem1", params, claimed, notes=notes)
    return _attach_oracle(report, a, m, a**s, 4 * table[m], oracle, node_budget)


def theorem2_bound(a: int, N: int, m: int, s0: Optional[int] = None, oracle: str = "auto",
                   node_budget: int = AUTO_CENSUS_BUDGET) -> BoundReport:
    """Lower bound on f(a^m, N) through s = floor(log_a N).

    Reports the root of the case-3 polynomial at this s next to the root of the
    polynomial that actually governs the residue of s; they differ unless
    s = 4 (mod 8), and the report flags that.
    """
    s = floor_log(N, a)
    if s0 is None:
        s0, _ = spectral.find_s0(max(12, s + (4 - s) % 8))
        if s0 is None:
            raise NotApplicableError("no s0 found in the searched range")
    if N < a**s0:
        raise NotApplicableError(f"N={N} is below a^s0 = {a}^{s0}")
    inner = theorem1_bound(a, s, m, oracle="none")
    params = {"a": a, "N": N, "m": m, "s": s, "s0": s0}
    lam3 = spectral.largest_root(spectral.case_polynomial(3, s)).lam
    lam_case = spectral.polynomial_Ps(s)
    notes = {
        "lambda_poly3": lam3,
        "lambda_residue_case": spectral.largest_root(lam_case).lam,
        "residue_case": lam_case.case_id,
        "poly3_mismatch": lam_case.case_id != 3,
        "n": inner.notes.get("n"),
    }
    report = BoundReport("theorem2", params, inner.claimed_bound, notes=notes)
    if oracle == "none":
        return report
    table = g_table(s, m, base_window(a, s))
    return _attach_oracle(report, a, m, N, 4 * table[m], oracle, node_budget)


def theorem3_chain(t: int) -> int:
    """row * (2^5 B)^t * (2A)^5 * (1,1,1)^T for s = 6, exact."""
    A = spectral.SIX_MATRIX
    B = spectral.matrix_B()
    M = spectral.mat_mul(spectral.mat_pow(spectral.mat_scale(32, B), t),
                         spectral.mat_pow(spectral.mat_scale(2, A), 5))
    return sum(spectral.vec_mat(row_vector(6), M))


def theorem1_same_steps(t: int) -> int:
    """row * (2A)^(5t + 5) * (1,1,1)^T: the plain chain over the same number of steps."""
    A = spectral.mat_scale(2, spectral.SIX_MATRIX)
    return sum(spectral.vec_mat(row_vector(6), spectral.mat_pow(A, 5 * t + 5)))


def theorem3_bound(m: int, oracle: str = "method") -> BoundReport:
    """Refined s = 6 lower bound on f(a^m, a^6) via the matrix B chain."""
    n = iteration_depth(m, 6)
    if n < 10:
        raise NotApplicableError(f"theorem 3 chain needs iteration depth >= 10, got {n}")
    t = (n - 5) // 5
    chain = theorem3_chain(t)
    claimed = 4 * 2 * chain
    mu = spectral.mu().lam
    notes = {
        "n": n, "t": t, "chain": chain,
        "same_steps_plain_chain": theorem1_same_steps(t),
        "exponent_fifth": 1 + math.log2(mu) / 5,
        "exponent_seventh": 1 + math.log2(mu) / 7,
        "exponent_theorem1": math.log2(spectral.case_lambda(6).lam),
        "mu": mu,
    }
    report = BoundReport("theorem3", {"s": 6, "m": m}, claimed, notes=notes)
    if oracle == "none":
        return report
    table = g_table(6, m)
    report.oracle_value, report.oracle_source = 4 * table[m], "method:4*g_m"
    report.notes["method_value_4g"] = report.oracle_value
    return report


THEOREM4_WINDOW = (4, 7)


def theorem4_bound(m: int, oracle: str = "auto", node_budget: int = 10**8) -> BoundReport:
    """f(3^m, 4) >= ceil((m + 1)/4) for m >= 8."""
    if m < 8:
        raise NotApplicableError(f"theorem 4 needs m >= 8, got {m}")
    claimed = -(-(m + 1) // 4)
    g = g_values((0, 1), THEOREM4_WINDOW, m)
    report = BoundReport("theorem4", {"m": m, "a": 3, "N": 4}, claimed)
    return _attach_oracle(report, 3, m, 4, 4 * g[m], oracle, node_budget)


def theorem5_bound(k: int, oracle: str = "auto", node_budget: int = 10**8) -> BoundReport:
    """f(2^(2^k - 1), 3) >= 2^k for k >= 2."""
    if k < 2:
        raise NotApplicableError(f"theorem 5 needs k >= 2, got {k}")
    m = 2**k - 1
    g = g_values((1,), (3, 3), m)
    report = BoundReport("theorem5", {"k": k, "m": m, "a": 2, "N": 3}, 2**k)
    return _attach_oracle(report, 2, m, 3, 4 * g[m], oracle, node_budget)


def _power_exceeds(g: int, m: int, s: int) -> bool:
    """Is g > m^(log2(s+1))? Exact when s + 1 is a power of two."""
    base = s + 1
    if base & (base - 1) == 0:
        return g > m ** (base.bit_length() - 1)
    with mpmath.workdps(60):
        return mpmath.log(g, 2) > mpmath.log(base, 2) * mpmath.log(m, 2)


def theorem6_s4_bound(k: int, bottom: Sequence[int] = (1, 2)) -> int:
    """2^(k-3) * (1, 1) * A^(k-4) * bottom^T with A = [[1, 2], [1, 1]]."""
    A = spectral.case_matrix(4).entries
    v = spectral.mat_vec(spectral.mat_pow(A, k - 4), tuple(bottom))
    return 2 ** (k - 3) * (v[0] + v[1])


def theorem6_upper(s: int, m_max: int = 4096, k_range: Optional[range] = None) -> BoundReport:
    """Upper bounds showing the method cannot beat the growth exponent.

    * odd s: g_m <= m^(log2(s+1)) for 2 <= m <= m_max (tightest m reported).
    * s = 4: g_{2^k - 1} <= 2^(k-3) (1,1) A^(k-4) (1,2)^T for k in k_range
      (default 6..12); the same chain with (g_6, g_7) read from the table is
      reported alongside.
    * s = 2 (a = 2 window): g_{2^k - 1} = 2^(k-3) = (m + 1)/8, k in k_range (default 4..12).
    """
    if s % 2:
        table = g_table(s, m_max)
        worst = None
        failures = []
        for m in range(2, m_max + 1):
            g = table[m]
            if _power_exceeds(g, m, s):
                failures.append(m)
            ratio = math.log2(g) - math.log2(s + 1) * math.log2(m) if g else -math.inf
            if worst is None or ratio > worst[0]:
                worst = (ratio, m)
        m_star = worst[1]
        bound = math.floor(mpmath.power(m_star, mpmath.log(s + 1, 2)))
        report = BoundReport("theorem6", {"s": s, "m_max": m_max}, bound, table[m_star],
                             "g-table", kind="upper")
        report.notes.update(tightest_m=m_star, failures=failures, all_hold=not failures)
        if failures:
            first = failures[0]
            report.claimed_bound = math.floor(mpmath.power(first, mpmath.log(s + 1, 2)))
            report.oracle_value = table[first]
            report.notes["tightest_m"] = first
        return report
    if s == 4:
        ks = k_range or range(6, 13)
        table = g_table(4, 2 ** max(ks) - 1)
        rows = []
        for k in ks:
            g = table[2**k - 1]
            printed = theorem6_s4_bound(k)
            from_table = theorem6_s4_bound(k, (table[6], table[7]))
            rows.append({"k": k, "g": g, "printed_bound": printed, "table_bound": from_table})
        bad = [r for r in rows if r["g"] > r["printed_bound"]]
        pick = bad[0] if bad else min(rows, key=lambda r: r["printed_bound"] - r["g"])
        report = BoundReport("theorem6", {"s": 4, "k": [min(ks), max(ks)]}, pick["printed_bound"],
                             pick["g"], "g-table", kind="upper")
        report.notes.update(rows=rows, printed_failures=[r["k"] for r in bad],
                            table_bound_holds=all(r["g"] <= r["table_bound"] for r in rows),
                            g6=table[6], g7=table[7])
        return report
    if s == 2:
        ks = k_range or range(4, 13)
        table = g_table(2, 2 ** max(ks) - 1, base_window(2, 2))
        rows = [{"k": k, "g": table[2**k - 1], "expected": 2 ** (k - 3)} for k in ks]
        bad = [r for r in rows if r["g"] != r["expected"]]
        pick = bad[0] if bad else rows[-1]
        report = BoundReport("theorem6", {"s": 2, "a": 2, "k": [min(ks), max(ks)]}, pick["expected"],
                             pick["g"], "g-table", kind="equal")
        report.notes.update(rows=rows, mismatches=[r["k"] for r in bad])
        return report
    raise NotApplicableError(f"theorem 6 covers odd s, s = 4 and s = 2; got s={s}")
