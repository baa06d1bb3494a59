"""Case polynomials, case matrices and their largest real roots.

Roots are bracketed and bisected on dyadic rationals with exact sign
evaluation, so every reported root comes with a certified enclosing interval
``[lo, hi]``. Floats only appear in the final reported value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import BracketingError, OutOfRangeError

Matrix = tuple[tuple[int, ...], ...]

DEFAULT_TOL = Fraction(1, 2**64)  # well below 1e-12; lambda comes out as the nearest float


# -- polynomials -------------------------------------------------------------

CASE_RULES = {
    1: "s = 0 (mod 8), s >= 6",
    2: "s = 2 (mod 8), s >= 6",
    3: "s = 4 (mod 8), s >= 6",
    4: "s = 6 (mod 8), s >= 6",
    5: "s = 4",
    6: "s = 2",
    7: "s odd, s >= 3",
}


@dataclass(frozen=True)
class CasePolynomial:
    s: int
    case_id: int
    coefficients: tuple[int, ...]  # highest degree first, monic

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, x):
        acc = 0
        for c in self.coefficients:
            acc = acc * x + c
        return acc

    def __str__(self):
        return format_polynomial(self.coefficients)


def format_polynomial(coefficients: Sequence[int], var: str = "λ") -> str:
    deg = len(coefficients) - 1
    parts = []
    for i, c in enumerate(coefficients):
        if c == 0:
            continue
        power = deg - i
        mag = abs(c)
        body = var if power == 1 else f"{var}^{power}" if power else ""
        if power and mag == 1:
            term = body
        else:
            term = f"{mag}{body}"
        sign = "-" if c < 0 else "+"
        parts.append((sign, term))
    if not parts:
        return "0"
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, term in parts[1:]:
        out += f" {sign} {term}"
    return out


def case_polynomial(case_id: int, s: int) -> CasePolynomial:
    """Polynomial number ``case_id`` evaluated at parameter ``s`` (no residue check)."""
    coeffs = {
        1: (1, -s, -s, -s),
        2: (1, -(s + 2), s + 2, -(s - 2)),
        3: (1, -(s + 2), s, s + 4),
        4: (1, -s, -(s + 2), s + 2),
        5: (1, -4, -4),
        6: (1, -2),
        7: (1, -s - 1),
    }
    if case_id not in coeffs:
        raise OutOfRangeError(f"unknown case {case_id}")
    return CasePolynomial(s, case_id, coeffs[case_id])


def case_of(s: int) -> int:
    """Which of the seven polynomials governs exponent bound ``s``."""
    if s < 2:
        raise OutOfRangeError(f"s must be >= 2, got {s}")
    if s == 2:
        return 6
    if s == 4:
        return 5
    if s % 2:
        return 7
    return {0: 1, 2: 2, 4: 3, 6: 4}[s % 8]


def polynomial_Ps(s: int) -> CasePolynomial:
    return case_polynomial(case_of(s), s)


# -- matrices ----------------------------------------------------------------

@dataclass(frozen=True)
class CaseMatrix:
    s: int
    entries: Matrix
    source: str

    @property
    def q(self) -> Optional[int]:
        if self.source == "(13)":
            return (self.s - 2) // 4
        if self.source == "(20)":
            return self.s // 4
        return None


def _ceil_half(x: int) -> int:
    return (x + 1) // 2


def case_matrix(s: int) -> CaseMatrix:
    """Integer matrix A whose doubled largest eigenvalue governs g_m growth for even s >= 4."""
    if s % 2 or s < 4:
        raise OutOfRangeError(f"no matrix case for s={s}; odd s is scalar (polynomial 7)")
    if s == 4:
        return CaseMatrix(s, ((1, 2), (1, 1)), "(22)")
    if s % 4 == 2:
        q = (s - 2) // 4
        entries = (
            (q + 1, (q + 1) // 2, _ceil_half(q + 1)),
            (q + 1, q // 2, _ceil_half(q)),
            (q, (q + 1) // 2, _ceil_half(q + 1)),
        )
        return CaseMatrix(s, entries, "(13)")
    q = s // 4
    entries = (
        ((q + 1) // 2, _ceil_half(q + 1), q),
        (q // 2, _ceil_half(q), q + 1),
        (q // 2, _ceil_half(q), q),
    )
    return CaseMatrix(s, entries, "(20)")


SIX_MATRIX: Matrix = ((2, 1, 1), (2, 0, 1), (1, 1, 1))
CORRECTION: Matrix = ((0, 1, -1), (0, 1, -1), (0, 1, -1))


def mat_mul(x: Matrix, y: Matrix) -> Matrix:
    cols = list(zip(*y))
    return tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in cols) for row in x)


def mat_add(x: Matrix, y: Matrix) -> Matrix:
    return tuple(tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(x, y))


def mat_scale(k: int, x: Matrix) -> Matrix:
    return tuple(tuple(k * a for a in row) for row in x)


def identity(n: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def mat_pow(x: Matrix, e: int) -> Matrix:
    """Exact power by repeated squaring."""
    if e < 0:
        raise OutOfRangeError("negative matrix power")
    result = identity(len(x))
    base = x
    while e:
        if e & 1:
            result = mat_mul(result, base)
        base = mat_mul(base, base)
        e >>= 1
    return result


def mat_vec(x: Matrix, v: Sequence[int]) -> tuple[int, ...]:
    return tuple(sum(a * b for a, b in zip(row, v)) for row in x)


def vec_mat(v: Sequence[int], x: Matrix) -> tuple[int, ...]:
    return tuple(sum(a * row[j] for a, row in zip(v, x)) for j in range(len(x[0])))


def charpoly(x: Matrix) -> tuple[int, ...]:
    """det(λI - X) for an integer matrix, by Faddeev-LeVerrier (exact)."""
    n = len(x)
    coeffs = [1]
    m = identity(n)
    for k in range(1, n + 1):
        am = mat_mul(x, m)
        c = Fraction(-sum(am[i][i] for i in range(n)), k)
        if c.denominator != 1:
            raise ArithmeticError("non-integer characteristic coefficient")
        c = int(c)
        coeffs.append(c)
        m = mat_add(am, mat_scale(c, identity(n)))
    return tuple(coeffs)


def char_poly_check(s: int) -> bool:
    """Does det(λI - 2A) match the case polynomial for this s exactly?"""
    if s % 2 or s < 4:
        raise OutOfRangeError(f"need even s >= 4, got {s}")
    doubled = mat_scale(2, case_matrix(s).entries)
    return charpoly(doubled) == polynomial_Ps(s).coefficients


def matrix_B() -> Matrix:
    """A^5 plus the rank-one correction, for the s = 6 matrix A."""
    return mat_add(mat_pow(SIX_MATRIX, 5), CORRECTION)


# -- roots -------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralResult:
    lam: float
    lo: Fraction
    hi: Fraction
    residual: float
    mu: Optional[float] = None

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2


def _eval(coeffs: Sequence, x):
    acc = 0
    for c in coeffs:
        acc = acc * x + c
    return acc


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def _poly_rem(num: list[Fraction], den: list[Fraction]) -> list[Fraction]:
    num = list(num)
    while len(num) >= len(den) and any(num):
        factor = num[0] / den[0]
        for i in range(len(den)):
            num[i] -= factor * den[i]
        num.pop(0)
    while num and num[0] == 0:
        num.pop(0)
    return num


def sturm_sequence(coeffs: Sequence[int]) -> list[list[Fraction]]:
    p0 = [Fraction(c) for c in coeffs]
    deg = len(p0) - 1
    p1 = [c * (deg - i) for i, c in enumerate(p0[:-1])]
    seq = [p0, p1]
    while len(seq[-1]) > 1:
        rem = _poly_rem(seq[-2], seq[-1])
        if not rem:
            break
        seq.append([-c for c in rem])
    return seq


def count_roots_above(coeffs: Sequence[int], x: Fraction) -> int:
    """Number of distinct real roots strictly greater than ``x`` (Sturm's theorem)."""
    seq = sturm_sequence(coeffs)

    def changes(signs):
        signs = [v for v in signs if v]
        return sum(1 for a, b in zip(signs, signs[1:]) if a != b)

    at_x = changes(_sign(_eval(p, x)) for p in seq)
    # sign at +infinity is the sign of the leading coefficient
    at_inf = changes(_sign(p[0]) for p in seq)
    return at_x - at_inf


def cauchy_bound(coeffs: Sequence[int]) -> Fraction:
    lead = abs(coeffs[0])
    return 1 + Fraction(max(abs(c) for c in coeffs[1:]), lead)


def largest_real_root(
    coeffs: Sequence[int],
    tol: Fraction = DEFAULT_TOL,
    scan_top: Optional[Fraction] = None,
    step: Fraction = Fraction(1, 16),
) -> SpectralResult:
    """Largest real root of an integer polynomial, enclosed in an interval of width <= tol.

    The scan walks down from ``scan_top`` (default: Cauchy's bound) in steps of
    ``step`` until the sign changes; Sturm's theorem then confirms that no
    root lies above the bracket before bisection starts.
    """
    coeffs = tuple(int(c) for c in coeffs)
    if len(coeffs) < 2 or coeffs[0] == 0:
        raise OutOfRangeError("need a polynomial of degree >= 1")
    tol = Fraction(tol)
    if len(coeffs) == 2:
        root = Fraction(-coeffs[1], coeffs[0])
        return SpectralResult(float(root), root, root, 0.0)
    top = Fraction(scan_top) if scan_top is not None else cauchy_bound(coeffs)
    top = max(top, cauchy_bound(coeffs))
    lead_sign = _sign(coeffs[0])
    hi = top
    if _sign(_eval(coeffs, hi)) != lead_sign:
        raise BracketingError("polynomial does not have its leading sign at the scan top")
    floor = -top
    lo = hi - step
    while _sign(_eval(coeffs, lo)) == lead_sign:
        hi = lo
        lo -= step
        if lo < floor:
            raise BracketingError("no sign change found")
    if _eval(coeffs, lo) == 0:
        hi = lo
    elif count_roots_above(coeffs, hi) != 0:
        raise BracketingError("scan step too coarse: roots above the bracket")
    while hi - lo > tol:
        mid = (lo + hi) / 2
        v = _eval(coeffs, mid)
        if v == 0:
            lo = hi = mid
            break
        if _sign(v) == lead_sign:
            hi = mid
        else:
            lo = mid
    value = float((lo + hi) / 2)
    residual = abs(float(_eval(coeffs, (lo + hi) / 2)))
    return SpectralResult(value, lo, hi, residual)


def largest_root(p: CasePolynomial, tol: Fraction = DEFAULT_TOL) -> SpectralResult:
    """Largest real root of a case polynomial, scanning down from s + 2."""
    return largest_real_root(p.coefficients, tol=tol, scan_top=Fraction(p.s + 2))


def case_lambda(s: int, tol: Fraction = DEFAULT_TOL) -> SpectralResult:
    return largest_root(polynomial_Ps(s), tol)


def mu(tol: Fraction = DEFAULT_TOL) -> SpectralResult:
    """Largest real eigenvalue of B, via its exact characteristic cubic."""
    res = largest_real_root(charpoly(matrix_B()), tol=tol)
    return SpectralResult(res.lam, res.lo, res.hi, res.residual, mu=res.lam)


@dataclass(frozen=True)
class GapResult:
    value: float
    lam: SpectralResult
    mu: SpectralResult

    def exceeds(self, threshold) -> bool:
        """Certified: 2*mu^(1/5) - lambda > threshold, using the interval endpoints exactly."""
        t = Fraction(threshold)
        # 2 mu^(1/5) > lam + t  <=>  32 mu > (lam + t)^5 when lam + t > 0
        return 32 * self.mu.lo > (self.lam.hi + t) ** 5

    def below(self, threshold) -> bool:
        t = Fraction(threshold)
        return 32 * self.mu.hi < (self.lam.lo + t) ** 5


def gap_check(tol: Fraction = Fraction(1, 2**80)) -> GapResult:
    """2*mu^(1/5) - lambda for s = 6; the intervals are tight enough for ~1e-20 accuracy."""
    lam = largest_real_root(charpoly(mat_scale(2, SIX_MATRIX)), tol=tol)
    m = mu(tol)
    fifth = _fifth_root(m.mid, tol)
    value = float(2 * fifth - lam.mid)
    return GapResult(value, lam, m)


def _fifth_root(x: Fraction, tol: Fraction) -> Fraction:
    lo, hi = Fraction(0), max(Fraction(1), x)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if mid**5 > x:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2


def eigen_lambda(s: int) -> float:
    """Largest real eigenvalue of 2*case_matrix(s), by a dense LAPACK eigen-solve."""
    import numpy as np

    values = np.linalg.eigvals(2 * np.array(case_matrix(s).entries, dtype=float))
    real = [v.real for v in values if abs(v.imag) < 1e-9 * max(1.0, abs(v))]
    return max(real)


# -- asymptotic residuals ----------------------------------------------------

REMARK1_INTERVALS = {1: (-1, 0), 2: (0, 3), 3: (-9, -6), 4: (-1, 0)}


@dataclass(frozen=True)
class Remark1Result:
    s: int
    case_id: int
    lam: float
    theta: float
    interval: tuple[int, int]
    within: bool
    in_bracket: bool  # s < lambda < s + 1
    remark6_residual: Optional[float] = None


def _precise_tol(s: int) -> Fraction:
    return Fraction(1, 2 ** (48 + 7 * s.bit_length()))


def _theta(case_id: int, s: int, lam: Fraction) -> Fraction:
    s = Fraction(s)
    if case_id in (1, 4):
        return (lam - s - 1) * s**2
    base = s + 1 - 3 / s**2 + 3 / s**3
    return (lam - base) * s**4


def remark1_expansion(s: int) -> Remark1Result:
    """Scaled deviation of the largest root from its leading asymptotic terms.

    Cases (1) and (4): ``(lambda - s - 1) * s^2``. Cases (2) and (3):
    ``(lambda - (s + 1 - 3/s^2 + 3/s^3)) * s^4``, reported raw (for case (3)
    the printed interval (-9, -6) is compared against this raw value).
    For case (3) the residual against the six-term expansion, scaled by
    ``s^7``, is also reported.
    """
    if s % 2 or s < 6:
        raise OutOfRangeError(f"need even s >= 6, got {s}")
    cid = case_of(s)
    res = largest_root(polynomial_Ps(s), tol=_precise_tol(s))
    lo_t, hi_t = _theta(cid, s, res.lo), _theta(cid, s, res.hi)
    interval = REMARK1_INTERVALS[cid]
    within = interval[0] < lo_t and hi_t < interval[1]
    in_bracket = s < res.lo and res.hi < s + 1
    r6 = None
    if cid == 3:
        S = Fraction(s)
        six = S + 1 - 3 / S**2 + 3 / S**3 - 6 / S**4 - 9 / S**5 - 15 / S**6
        r6 = float((res.mid - six) * S**7)
    return Remark1Result(s, cid, res.lam, float((lo_t + hi_t) / 2), interval, within, in_bracket, r6)


@dataclass(frozen=True)
class S0Row:
    s: int
    lam3: float
    others: dict  # case id -> lambda (7 means s + 1)
    smallest: bool


def find_s0(s_max: int, s_min: int = 12) -> tuple[Optional[int], list[S0Row]]:
    """Smallest s' (s' = 4 mod 8) from which the case-3 polynomial has the smallest largest root.

    For each s = 4 (mod 8) in [s_min, s_max], the largest root of case 3 is
    compared with those of cases 1, 2, 4 at the same s and with s + 1. All
    comparisons are strict and certified by interval endpoints. Returns
    ``(s0, table)`` with ``s0 = None`` when the last row fails.
    """
    if s_max < 12:
        raise OutOfRangeError("s_max must be >= 12")
    rows = []
    start = s_min + (4 - s_min) % 8
    for s in range(start, s_max + 1, 8):
        tol = _precise_tol(s)
        lam3 = largest_root(case_polynomial(3, s), tol)
        others = {}
        smallest = lam3.hi < s + 1
        for cid in (1, 2, 4):
            r = largest_root(case_polynomial(cid, s), tol)
            others[cid] = r.lam
            smallest = smallest and lam3.hi < r.lo
        others[7] = float(s + 1)
        rows.append(S0Row(s, lam3.lam, others, smallest))
    s0 = None
    for row in reversed(rows):
        if not row.smallest:
            break
        s0 = row.s
    return s0, rows


def log2(x: float) -> float:
    return math.log2(x)
