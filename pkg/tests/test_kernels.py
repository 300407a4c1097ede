import os
import subprocess
import sys

import numpy as np
import pytest

from ncgdist import _accel, kernels
from ncgdist.solver import SolverOptions, _reduced
from ncgdist.triple import graph_triple, truncated_moyal_triple


@pytest.fixture(scope="module", params=["graph", "moyal"])
def problem(request):
    if request.param == "graph":
        W = np.array([[0, 1, 2, 0], [1, 0, 0.5, 1], [2, 0.5, 0, 3], [0, 1, 3, 0.]])
        t = graph_triple(4, W)
    else:
        t = truncated_moyal_triple(3, 1.5)
    red = _reduced(t, SolverOptions().kernel_tol)
    return red.tens, red.sizes, red.offsets


def test_lipschitz_variants_agree(problem, rng):
    tens, sizes, offsets = problem
    Y = rng.normal(size=(50, tens.shape[0]))
    np.testing.assert_allclose(kernels.lipschitz_batch_nb(Y, tens, sizes, offsets),
                               kernels.lipschitz_batch_np(Y, tens, sizes, offsets), rtol=1e-10)


def test_hill_climb_variants_agree(problem, rng):
    tens, sizes, offsets = problem
    r = tens.shape[0]
    y0, g = rng.normal(size=r), rng.normal(size=r)
    a = kernels.hill_climb_np(y0.copy(), g, tens, sizes, offsets, 0.25, 1e-6, 500)
    b = kernels.hill_climb_nb(y0.copy(), g, tens, sizes, offsets, 0.25, 1e-6, 500)
    assert a[1] == pytest.approx(b[1], rel=1e-8)
    start = kernels.batch_ratio(y0, g, tens, sizes, offsets)[0]
    assert a[1] >= start - 1e-12


@pytest.mark.parametrize("sgn, z", [(1.0, 0.3), (-1.0, -0.5), (1.0, 0.0)])
def test_torus_grid_variants_agree(sgn, z):
    args = (2.0, sgn, z, 0.8, 1.1, 2.5, 64)
    u1, v1, h1 = kernels.torus_grid_np(*args)
    u2, v2, h2 = kernels.torus_grid_nb(*args)
    assert h1 == pytest.approx(h2, rel=1e-12)


def test_env_flag_selects_numpy():
    code = "from ncgdist import _accel; print(_accel.USE_NUMBA)"
    env = dict(os.environ, **{_accel.ENV_FLAG: "1"})
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "False"


def test_solver_same_with_numpy_fallback():
    code = ("from ncgdist import *; import sys; sys.path.insert(0, 'tests');"
            "from conftest import graph_points; p = graph_points(3);"
            "t = graph_triple(3, [[0, 1, 2], [1, 0, 3], [2, 3, 0]]);"
            "print(repr(spectral_distance(t, p[0], p[1]).value))")
    vals = []
    for flag in ("0", "1"):
        env = dict(os.environ, **{_accel.ENV_FLAG: flag})
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                             cwd=os.path.dirname(os.path.dirname(__file__)))
        vals.append(float(out.stdout.strip()))
    assert vals[0] == pytest.approx(vals[1], rel=1e-9)
