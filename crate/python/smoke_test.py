"""Smoke test for the decomp_lab_py extension module.

Build and install first:
    cd crates/py && maturin build --release -o dist && pip install dist/*.whl
"""

import json
import math

import numpy as np
import pytest

import decomp_lab_py as dl


def test_schatten_norms_match_numpy():
    rng = np.random.default_rng(5)
    a = rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4))
    s = np.linalg.svd(a, compute_uv=False)
    re, im = a.real.tolist(), a.imag.tolist()
    assert dl.schatten_norm(re, im, "inf") == pytest.approx(s.max(), rel=1e-12)
    assert dl.schatten_norm(re, im, "1") == pytest.approx(s.sum(), rel=1e-12)
    assert dl.schatten_norm(re, im, "3") == pytest.approx((s**3).sum() ** (1 / 3), rel=1e-12)


def test_dec_and_cb_of_identity_and_transpose():
    dec, cb, report = dl.dec_norm(dl.identity_map(2))
    assert dec == pytest.approx(1.0, abs=1e-6)
    assert cb == pytest.approx(1.0, abs=1e-6)
    assert json.loads(report)["passed"]

    dec, cb, _ = dl.dec_norm(dl.transpose_map(2))
    assert dec == pytest.approx(2.0, abs=1e-5)
    assert dl.cb_norm(dl.transpose_map(2)) == pytest.approx(cb, abs=1e-9)


def test_schur_symbol_and_estimate():
    sym = {"kind": "schur", "values": {"rows": 2, "cols": 2, "re": [1, 1, 0, 1], "im": [0, 0, 0, 0]}}
    dec, _, report = dl.dec_norm(json.dumps(sym), p="3", restarts=4)
    assert dec == pytest.approx(2 / math.sqrt(3), abs=1e-5)
    names = [a["name"] for a in json.loads(report)["assertions"]]
    assert "estimate below dec" in names


def test_p2_estimate_is_liouville_norm():
    # The transpose permutes matrix units, so its Liouville matrix is unitary.
    assert dl.pq_norm_lower(dl.transpose_map(3), "2") == pytest.approx(1.0, abs=1e-12)


def test_verify_and_errors():
    passed, report = dl.verify("unitary-row")
    assert passed
    assert json.loads(report)["results"]["dec_n2"] == pytest.approx(2.0, abs=1e-4)
    with pytest.raises(ValueError):
        dl.verify("nope")
    with pytest.raises(ValueError):
        dl.dec_norm(dl.identity_map(2), p="2")
    with pytest.raises(ValueError):
        dl.schatten_norm([[1.0], [1.0, 2.0]])
