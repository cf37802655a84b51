"""The compiled stepper and the pure-numpy reference must be interchangeable."""

import os
import subprocess
import sys

import numpy as np
import pytest

from halfscat import _backend
from halfscat import _stepper_py

compiled = pytest.importorskip("halfscat._stepper")


def _run_both(mode, k, n=2, accumulate=False):
    rng = np.random.default_rng(11)
    w = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    p_mat = np.ascontiguousarray((w + w.conj().T) / 2.0)
    s_mat = np.ascontiguousarray(0.3 * np.eye(n, dtype=complex))
    y_p = np.ascontiguousarray(np.eye(n, dtype=complex))
    y_pp = np.ascontiguousarray(rng.normal(size=(n, n)) + 0j)
    args = (mode, k, p_mat, s_mat, 0.0, 1.5, 0.0, y_p, y_pp,
            1e-10, 1e-12, 0.1, accumulate)
    return (compiled.advance_interval(*args),
            _stepper_py.advance_interval(*args))


@pytest.mark.parametrize("mode", [0, 1])
@pytest.mark.parametrize("k", [0.5, 3.0, 1j * 0.8, 2.0 + 0.0j])
def test_steppers_agree(mode, k):
    (p1, pp1, e1, h1, q1, n1), (p2, pp2, e2, h2, q2, n2) = _run_both(mode, complex(k))
    # same algorithm, different summation order: states to rounding noise,
    # error accumulators to a relative whisker
    assert np.max(np.abs(p1 - p2)) < 1e-13 * max(1.0, np.max(np.abs(p1)))
    assert np.max(np.abs(pp1 - pp2)) < 1e-13 * max(1.0, np.max(np.abs(pp1)))
    assert abs(e1 - e2) <= 1e-3 * e1 + 1e-30
    assert n1 == n2


def test_norm_accumulator_agrees():
    (_, _, _, _, q1, _), (_, _, _, _, q2, _) = _run_both(1, 1.2 + 0j, accumulate=True)
    assert q1 is not None and q2 is not None
    assert np.max(np.abs(np.asarray(q1) - np.asarray(q2))) < 1e-12


def test_backend_env_override():
    # HALFSCAT_FORCE_PYTHON picks the reference stepper even when the
    # extension is importable
    code = ("import halfscat; print(halfscat.BACKEND_NAME)")
    env = dict(os.environ, HALFSCAT_FORCE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_default_backend_is_compiled_here():
    assert _backend.BACKEND_NAME == "compiled"
