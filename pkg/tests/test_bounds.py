import json
import math

import pytest
from hypothesis import given, settings, strategies as st

from continuants import bounds as b
from continuants.census import count_f
from continuants.errors import NotApplicableError, OutOfRangeError

G_S2_A2 = (0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 2, 2, 4, 2, 4, 2, 4, 2, 4, 2, 4, 2, 6, 4, 8, 4, 12, 8, 12, 4, 12)
G_S3 = (0, 0, 1, 1, 1, 1, 4, 4, 4, 4, 4, 4, 10)
G_S6 = (0, 0, 1, 1, 1, 1, 1, 1, 1, 6, 8, 6, 8, 6, 8, 6, 8, 6, 18, 16, 32)


def test_base_window():
    assert b.base_window(2, 2) == (6, 11)
    assert b.base_window(3, 2) == (2, 4)
    assert b.base_window(2, 5) == (2, 7)
    with pytest.raises(OutOfRangeError):
        b.base_window(1, 2)


def test_g_table_goldens():
    assert b.g_table(2, 32, b.base_window(2, 2)).values == G_S2_A2
    assert b.g_table(3, 12).values == G_S3
    assert b.g_table(6, 20).values == G_S6


def test_g_table_examples():
    t = b.g_table(2, 12, (6, 11))
    assert [t[m] for m in range(6, 12)] == [1] * 6 and t[12] == 2
    assert b.g_table(3, 6)[6] == 4
    t = b.g_table(2, 2**12, (6, 11))
    assert [t[2**k - 1] for k in range(4, 13)] == [2 ** (k - 3) for k in range(4, 13)]


def test_g_table_validation():
    with pytest.raises(OutOfRangeError):
        b.g_table(1, 10)
    with pytest.raises(OutOfRangeError):
        b.g_table(3, 1)


def test_g_is_not_monotone():
    t = b.g_table(2, 20, (6, 11))
    assert t[14] == 4 > t[15] == 2
    t = b.g_table(6, 12)
    assert t[10] == 8 > t[11] == 6


@pytest.mark.parametrize("s", [3, 5, 7, 9])
def test_growth_bounded_by_window_max(s):
    t = b.g_table(s, 600)
    for m in range(s + 3, 601):
        window = [t[k] for k in range(max((m - s + 1) // 2, 2), m // 2 + 1)]
        assert t[m] <= (s + 1) * max(window)


def test_theorem_schemes():
    g4 = b.g_values((0, 1), b.THEOREM4_WINDOW, 20)
    assert g4[4:8] == [1, 1, 1, 1] and g4[8] == 2 and g4[16] == 4
    g5 = b.g_values((1,), (3, 3), 63)
    assert [g5[2**k - 1] for k in range(2, 7)] == [1, 2, 4, 8, 16]


def test_iteration_depth():
    assert b.iteration_depth(35, 2) == 1
    assert b.iteration_depth(35, 6) == 0
    assert b.iteration_depth(10**6, 6) == 16
    for s in (2, 6, 9):
        with pytest.raises(NotApplicableError):
            b.iteration_depth(4 * s + 4 + s - 1, s)


def test_index_chain():
    assert b.index_chain(100, 6) == [47, 21, 8]
    chain = b.index_chain(10**5, 4)
    assert all(x > y for x, y in zip(chain, chain[1:])) and chain[-1] < 7


def test_ceil_log2_and_floor_log():
    assert [b.ceil_log2(x) for x in (1, 2, 3, 4, 5)] == [0, 1, 2, 2, 3]
    from fractions import Fraction
    assert b.ceil_log2(Fraction(25, 12)) == 2 and b.ceil_log2(Fraction(1, 3)) == -1
    assert b.floor_log(80, 3) == 3 and b.floor_log(81, 3) == 4


def test_theorem1_s2_against_census():
    for m in range(12, 21):
        r = b.theorem1_bound(2, 2, m)
        assert r.oracle_source == "census" and r.verdict == b.HOLDS
        assert r.oracle_value == count_f(2, m, 4).count
    # n = ceil(log2(25/12)) = 2
    assert b.theorem1_bound(2, 2, 24, oracle="none").claimed_bound == 4 * 4
    assert b.theorem1_bound(3, 2, 5, oracle="none").claimed_bound == 8


def test_s2_chain_below_g_table():
    from fractions import Fraction
    for (lo, hi), base in (((6, 11), 12), ((2, 4), 5)):
        t = b.g_table(2, 4096, (lo, hi))
        for m in range(base, 4097):
            assert 2 ** b.ceil_log2(Fraction(m + 1, base)) <= t[m]


def test_theorem1_thresholds():
    with pytest.raises(NotApplicableError):
        b.theorem1_bound(2, 2, 11)
    with pytest.raises(NotApplicableError):
        b.theorem1_bound(2, 3, 20)
    with pytest.raises(NotApplicableError):
        b.theorem1_bound(2, 6, 34)


def test_theorem1_even_cases():
    r = b.theorem1_bound(2, 6, 10**4, oracle="method")
    n = b.iteration_depth(10**4, 6)
    assert r.notes["n"] == n
    assert r.claimed_bound == math.ceil(8 * r.notes["lam"] ** n / 3)
    assert r.verdict == b.HOLDS and r.notes["integer_chain"] <= r.notes["method_value_4g"]
    r = b.theorem1_bound(2, 4, 200, oracle="method")
    assert r.verdict == b.HOLDS


@pytest.mark.parametrize("s", [3, 5, 7])
def test_theorem1_odd(s):
    m = 40 * s
    r = b.theorem1_bound(2, s, m, oracle="method")
    assert r.claimed_bound == 4 * (s + 1) ** b.iteration_depth(m, s)
    assert r.verdict == b.HOLDS


@pytest.mark.parametrize("s", range(4, 31, 2))
def test_matrix_chain_below_method(s):
    for m in (6 * s + 6, 20 * s, 60 * s):
        n = b.iteration_depth(m, s)
        assert 4 * b.matrix_chain(s, n) <= 4 * b.g_table(s, m)[m]


def test_theorem2():
    r = b.theorem2_bound(2, 2**12, 100, s0=12, oracle="method")
    assert r.notes["residue_case"] == 3 and not r.notes["poly3_mismatch"]
    r = b.theorem2_bound(2, 2**14, 120, s0=12, oracle="method")
    assert r.notes["poly3_mismatch"] and r.notes["lambda_poly3"] < r.notes["lambda_residue_case"]
    assert r.verdict == b.HOLDS
    with pytest.raises(NotApplicableError):
        b.theorem2_bound(2, 2**10, 100, s0=12)


def test_theorem3():
    m = 28 * 513 + 5
    r = b.theorem3_bound(m)
    assert r.notes["n"] == 10 and r.notes["t"] == 1
    assert r.claimed_bound == 8 * b.theorem3_chain(1)
    assert r.verdict == b.HOLDS
    assert r.notes["exponent_fifth"] > r.notes["exponent_theorem1"] > r.notes["exponent_seventh"]
    with pytest.raises(NotApplicableError):
        b.theorem3_bound(1000)


def test_refined_chain_dominates():
    assert b.theorem3_chain(0) == b.theorem1_same_steps(0) == 47584
    for t in range(1, 6):
        assert b.theorem3_chain(t) > b.theorem1_same_steps(t)
    assert b.theorem3_chain(1) == 789487616


def test_theorem4():
    for m, count in ((8, 84), (9, 182), (10, 204)):
        r = b.theorem4_bound(m)
        assert r.claimed_bound == -(-(m + 1) // 4)
        assert (r.oracle_value, r.oracle_source, r.verdict) == (count, "census", b.HOLDS)
    with pytest.raises(NotApplicableError):
        b.theorem4_bound(7)


def test_theorem5():
    r = b.theorem5_bound(2)
    assert (r.claimed_bound, r.oracle_value, r.verdict) == (4, 4, b.HOLDS)
    assert b.theorem5_bound(3).verdict == b.HOLDS
    with pytest.raises(NotApplicableError):
        b.theorem5_bound(1)


@pytest.mark.parametrize("s", [3, 5, 7])
def test_theorem6_odd(s):
    r = b.theorem6_upper(s, m_max=1024)
    assert r.kind == "upper" and r.verdict == b.HOLDS and r.notes["all_hold"]


def test_theorem6_s2():
    r = b.theorem6_upper(2)
    assert r.kind == "equal" and r.verdict == b.HOLDS and not r.notes["mismatches"]


def test_theorem6_s4_table_chain():
    r = b.theorem6_upper(4)
    assert (r.notes["g6"], r.notes["g7"]) == (1, 4)
    assert r.notes["table_bound_holds"]
    rows = {row["k"]: row for row in r.notes["rows"]}
    assert rows[6] == {"k": 6, "g": 192, "printed_bound": 152, "table_bound": 264}
    assert b.theorem6_s4_bound(4, (1, 4)) == 10 == b.g_table(4, 15)[15]


def test_theorem6_other_s():
    with pytest.raises(NotApplicableError):
        b.theorem6_upper(6)


def test_report_serialization():
    r = b.BoundReport("x", {"a": 2, "big": 2**80}, 2**70, 2**71, "census")
    d = json.loads(json.dumps(r.to_dict()))
    assert d["claimed_bound"] == str(2**70) and d["parameters"]["big"] == str(2**80)
    assert d["verdict"] == b.HOLDS
    assert b.BoundReport("x", {}, 5).verdict == b.UNAVAILABLE
    assert b.BoundReport("x", {}, 5, 6, kind="upper").verdict == b.FAILS
    assert b.BoundReport("x", {}, 5, 5, kind="equal").verdict == b.HOLDS
    lines = b.reports_to_csv([b.theorem5_bound(2)]).splitlines()
    assert lines[1] == "theorem5,lower,k=2;m=3;a=2;N=3,4,4,census,holds"


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 64), st.integers(2, 600))
def test_recurrence_forms_agree(s, m_max):
    b.g_table(s, m_max)  # raises on disagreement


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 3), st.integers(2, 3), st.integers(0, 10))
def test_census_dominates_method(a, s, extra):
    lo, hi = b.base_window(a, s)
    m = hi + 1 + extra
    if a**m * a**s > 10**6:
        return
    assert count_f(a, m, a**s).count >= 4 * b.g_table(s, m, (lo, hi))[m]
