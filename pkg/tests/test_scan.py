import json

import numpy as np
import pytest
from conftest import TRANSACTIONS
from oracle import graded_poset, random_distribution

from posetinfo import Distribution, gain_scan, learn_from_transactions
from posetinfo.errors import ValidationError


def test_example_rows():
    model = learn_from_transactions(TRANSACTIONS, 0.2)
    rows = gain_scan(model, parallel=1)
    assert [r.element for r in rows] == ["2", "4,5", "1,2,4,5"]
    assert [r.gain for r in rows] == pytest.approx([0.0523, 0.0170, 0.0040], abs=1e-4)
    assert all(r.dof == 3 and r.error is None for r in rows)
    assert rows[0].lambda_ == pytest.approx(1.046, abs=2e-3)
    assert gain_scan(model, 300, parallel=1)[0].lambda_ == pytest.approx(31.38, abs=6e-2)
    assert set(rows[0].to_dict()) == {"element", "gain", "lambda", "p_value", "dof"}


def test_uniform_has_no_gain(diamond):
    rows = gain_scan(Distribution.uniform(diamond), 50, parallel=1)
    for r in rows:
        assert r.gain == pytest.approx(0.0, abs=1e-14)
        assert r.p_value == pytest.approx(1.0)


def test_needs_sample_size(phat):
    with pytest.raises(ValidationError):
        gain_scan(phat)


def test_failures_become_rows(phat):
    rows = gain_scan(phat, 10, dof=0, parallel=1)
    assert len(rows) == 3
    assert all(r.gain is None and r.error.startswith("InvalidDof") for r in rows)
    assert "error" in rows[0].to_dict()


def test_parallel_is_bitwise_sequential():
    rng = np.random.default_rng(7)
    P = graded_poset(rng, 120, width=30)
    p = Distribution(P, random_distribution(rng, len(P)))
    seq = [r.to_dict() for r in gain_scan(p, 100, parallel=1)]
    par = [r.to_dict() for r in gain_scan(p, 100, parallel=3)]
    assert json.dumps(seq) == json.dumps(par)
    assert [r["element"] for r in seq] == list(P.labels[1:])
