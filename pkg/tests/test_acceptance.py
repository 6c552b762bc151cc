"""The eleven acceptance criteria, one test each, run once in parallel."""

import os

import pytest

from kleinpair.acceptance import CRITERIA, DEFAULT_SEED, run

from conftest import ACCEPTANCE_LINES


@pytest.fixture(scope="module")
def results():
    workers = int(os.environ.get("KLEINPAIR_WORKERS", str(min(os.cpu_count() or 1, 6))))
    out = {r.number: r for r in run(sorted(CRITERIA), DEFAULT_SEED, workers)}
    for n in sorted(out):
        line = out[n].line()
        ACCEPTANCE_LINES.append(line)
        print(line)
    return out


@pytest.mark.parametrize("number", sorted(CRITERIA), ids=[f"{n:02d}-{CRITERIA[n][0].replace(' ', '_')}" for n in sorted(CRITERIA)])
def test_criterion(results, number):
    r = results[number]
    assert r.ok, r.line()
