"""Full-count acceptance runs, one per criterion, each printing a PASS/FAIL line."""

import pytest

from ncelim import selftest

# number: (suite, required instance count, runtime limit in seconds)
CRITERIA = {
    1: ("congruence identity", 500, 10),
    2: ("orthogonal duality", 300, 120),
    3: ("block completion", 200, 5),
    4: ("Caratheodory compression", 100, 10),
    5: ("elimination equivalence", 200, 600),
    6: ("semidefinite coefficient", 100, 120),
    7: ("strict recursion", 100, 600),
    8: ("formula cross-validation", 50, 300),
    9: ("spectrahedrop", 50, 300),
    10: ("nonlinear lifting", 50, 600),
}


@pytest.mark.slow
@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    name, count, limit = CRITERIA[number]
    res = selftest.SUITES[number](seed=0)
    within = res.seconds < limit
    ok = res.passed and res.count >= count and within
    with capsys.disabled():
        print(f"\n{'PASS' if ok else 'FAIL'} [{number}] {name}: {res.line()} (limit {limit}s)")
    assert res.name == name
    assert res.count >= count
    assert res.contradictions == 0
    assert res.passed, res.line()
    assert within, f"{res.seconds:.1f}s exceeds {limit}s"
