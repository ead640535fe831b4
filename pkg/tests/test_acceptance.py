"""Acceptance criteria 1-7, one PASS/FAIL line each.

Run with pytest (the lines appear in the terminal summary) or directly with
``python tests/test_acceptance.py``.
"""

import sys
import time

import pytest

from nckdv.verify import DEFAULT_SEED, run_suite

CRITERIA = [
    (1, "flows", "Lax flows 1 and 2 equal the closed forms"),
    (2, "classical", "classical flow 2 closed form; mu=0 part of flow n is classical for n <= 4"),
    (3, "commute", "P_n,0 dispersionless, genus shapes for n <= 4; flows (1,2), (1,3), (2,3) commute to eps^8"),
    (4, "series", "S, Q_1, Q_2 and the b-series identity"),
    (5, "onepsi", "one-psi generator: <tau_1>_1, <tau_4>_2, (a^2-1)/576"),
    (6, "solver", "tau-solver g<=2, n<=3, modes<=3, flows<=3 consistent and matches all oracles"),
    (7, "graphs", "weighting counts r^h1 and |G_1,1| = 2"),
]

RESULTS = []


def evaluate(number, suite, title, seed=DEFAULT_SEED):
    start = time.time()
    checks = run_suite(suite, seed=seed)
    ok = all(c.ok for c in checks)
    line = f"criterion {number} [{suite}] {'PASS' if ok else 'FAIL'} ({time.time() - start:.1f}s): {title}"
    details = [c.line() for c in checks]
    return ok, line, details


@pytest.mark.parametrize("number,suite,title", CRITERIA, ids=[c[1] for c in CRITERIA])
def test_criterion(number, suite, title, seed):
    ok, line, details = evaluate(number, suite, title, seed)
    print(line)
    for d in details:
        print("    " + d)
    RESULTS.append((line, details))
    assert ok, "\n".join([line] + [d for d in details if d.startswith("FAIL")])


if __name__ == "__main__":
    failed = 0
    for number, suite, title in CRITERIA:
        ok, line, details = evaluate(number, suite, title)
        print(line, flush=True)
        for d in details:
            print("    " + d, flush=True)
        failed += not ok
    sys.exit(1 if failed else 0)
