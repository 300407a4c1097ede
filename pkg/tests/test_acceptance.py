"""Acceptance run: every criterion at its tolerance and time budget.

Each group of the ``all`` suite runs once (sequentially, so its wall time is
not inflated by the thread pool) and the rows are checked per criterion.
"""
import subprocess
import sys

import pytest

from conftest import ACCEPTANCE_LINES
from ncgdist.verify import GROUPS, run_group

SEED = 7

# criterion -> (group, budget in seconds)
CRITERIA = {
    1: ("two_point", 1), 2: ("three_point", 10), 3: ("three_point_inverse", 10),
    4: ("four_point", 30), 5: ("complete_graph", 30), 6: ("graph_properties", 60),
    7: ("m2_eigen", 10), 8: ("moyal_ball", 60), 9: ("sphere_point", 20),
    10: ("pythagoras", 60), 11: ("segment", 60), 12: ("isometry_projection", 60),
    13: ("bundle", 30), 14: ("moyal_convergence", 600), 15: ("quantum_length", 5),
    16: ("kantorovich", 60),
}


@pytest.fixture(scope="module")
def results():
    return {name: run_group(name, SEED) for name in GROUPS}


def record(n: int, ok: bool, detail: str):
    line = f"C{n}: {'PASS' if ok else 'FAIL'} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)


def test_criteria_cover_all_groups():
    assert sorted(g for g, _ in CRITERIA.values()) == sorted(GROUPS)


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(results, n):
    group, budget = CRITERIA[n]
    rows, secs = results[group]
    prefix = GROUPS[group][0]
    assert rows and all(r.case_id.startswith(prefix) for r in rows)
    failed = [r for r in rows if not r.passed]
    ok = not failed and secs < budget
    record(n, ok, f"{group}: {len(rows)} rows, {len(failed)} failed, {secs:.2f} s of {budget} s")
    assert not failed, "\n".join(",".join(r.cells(False)) for r in failed[:10])
    assert secs < budget


def test_criterion_17_determinism(tmp_path):
    outs = []
    for i in range(2):
        p = tmp_path / f"run{i}.csv"
        proc = subprocess.run([sys.executable, "-m", "ncgdist.cli", "verify", "all", "--seed", str(SEED),
                               "--out", str(p)], capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        outs.append(p.read_bytes())
    ok = outs[0] == outs[1]
    nrows = outs[0].count(b"\n") - 1
    record(17, ok, f"verify all --seed {SEED}: {nrows} rows, "
                   f"{'byte-identical' if ok else 'different'} CSV")
    assert ok
