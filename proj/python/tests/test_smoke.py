# Copyright 2026 The TabPerturb Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import json
import math
import os
import pathlib

import numpy as np
import pytest

import tabperturb as tp

DATA = pathlib.Path(
    os.environ.get("TABPERTURB_DATA_DIR",
                   pathlib.Path(__file__).resolve().parents[2] / "data"))


def test_laplace_sampler_matches_variance():
    x = tp.sample_laplace(7, 0, 0.0, 2.0, 200_000)
    assert isinstance(x, np.ndarray)
    assert x.var() == pytest.approx(8.0, rel=0.03)
    assert np.array_equal(x, tp.sample_laplace(7, 0, 0.0, 2.0, 200_000))


def test_samplers_reject_bad_parameters():
    with pytest.raises(ValueError):
        tp.sample_gaussian(1, 0, 0.0, -1.0, 10)


def test_geometric_pmf_and_mechanism():
    a = math.exp(-1.0)
    assert tp.two_sided_geometric_pmf(0, 1.0) == pytest.approx((1 - a) / (1 + a))
    draws = tp.sample_two_sided_geometric(3, 0, 1.0, 1000)
    assert draws.dtype == np.int64
    assert isinstance(tp.geometric_mechanism(10, 1.0, seed=5), int)


def test_gaussian_sigma_formula():
    expected = math.sqrt(2 * math.log(1.25 / 1e-5)) / 1.0
    assert tp.gaussian_sigma(1.0, 1e-5) == pytest.approx(expected)
    with pytest.raises(ValueError):
        tp.gaussian_mechanism(0.0, 2.0, 1e-5)
    tp.gaussian_mechanism(0.0, 2.0, 1e-5, permissive=True)


def test_exponential_probabilities():
    p = tp.exponential_probabilities([0.0, 1.0], 2.0)
    assert p == pytest.approx([0.2689414, 0.7310586], abs=1e-6)
    assert tp.exponential_mechanism(["a", "b"], [0.0, 1.0], 2.0) in ("a", "b")


def test_randomized_response_estimate():
    answers = [i < 3000 for i in range(10000)]
    r = tp.randomized_response(answers, 0.75, seed=11)
    assert len(r["responses"]) == 10000
    assert r["estimate"] == pytest.approx(0.30, abs=0.03)


def test_ledger_refuses_overdraft():
    ledger = tp.PrivacyLedger(1.0)
    ledger.charge("a", 0.4)
    ledger.charge("b", 0.4)
    with pytest.raises(tp.BudgetExhaustedError):
        ledger.charge("c", 0.4)
    assert ledger.spent_epsilon == pytest.approx(0.8)
    assert [e[0] for e in ledger.entries] == ["a", "b"]
    again = tp.PrivacyLedger.deserialize(ledger.serialize())
    assert again.spent_epsilon == pytest.approx(0.8)


def test_ks_and_chi_square():
    assert tp.ks_two_sample(np.array([1.0, 2.0, 3.0]),
                            np.array([4.0, 5.0])) == pytest.approx(1.0)
    assert tp.ks_two_sample([1.0, 2.0], [1.0, 2.0]) == 0.0
    stat, dof = tp.chi_square(["a", "b"] * 50, ["a", "b"] * 50)
    assert stat == 0.0 and dof == 1


def test_mask_and_luhn():
    assert tp.mask("555-123-4567", "phone") != "555-123-4567"
    assert tp.luhn_valid("4539 1488 0343 6467")
    assert not tp.luhn_valid("4539 1488 0343 6468")


def test_binning_credit_bands():
    labels = tp.bin_values([669, 670, 850, 851],
                           json.dumps({"preset": "credit_score"}))
    assert labels[0] != labels[1]
    assert labels[3] == "<out of range>"
    assert tp.bin_values([None], json.dumps({"preset": "credit_score"})) == [None]


def test_pii_consistent_mode_is_keyed():
    key = "00112233445566778899aabbccddeeff"
    text = "Call 555.944.0934 or mail dorothy.kelly@example.com"
    kinds = [k for k, _, _ in tp.detect_pii(text)]
    assert "phone" in kinds and "email" in kinds
    a = tp.transform_pii(text, key)
    b = tp.transform_pii(text, key, seed=99)
    assert a["text"] == b["text"]
    assert "dorothy.kelly" not in a["text"]
    with pytest.raises(ValueError):
        tp.transform_pii(text, "nothex")


def test_end_to_end_pipeline_is_deterministic(monkeypatch):
    csv = (DATA / "sample_loans.csv").read_text()
    config = json.loads((DATA / "sample_config.json").read_text())
    key_file = DATA / "demo_pii.key"
    one = tp.perturb(csv, config, key_file=key_file, workers=1)
    many = tp.perturb(csv, config, key_file=key_file, workers=4)
    assert one["csv"] == many["csv"]
    assert one["manifest"]["output_digest"] == many["manifest"]["output_digest"]
    assert one["report"]["numeric"]
    monkeypatch.delenv(tp.KEY_ENV, raising=False)
    with pytest.raises(ValueError):
        tp.perturb(csv, config)


def test_validate_and_report():
    csv = (DATA / "sample_loans.csv").read_text()
    over = (DATA / "over_budget_config.json").read_text()
    assert any("budget" in v for v in tp.validate(csv, over))
    assert tp.validate(csv, (DATA / "identity_config.json").read_text()) == []
    rep = tp.report(csv, csv)
    assert all(c["ks_statistic"] == 0.0 for c in rep["numeric"])


def test_query_charges_ledger():
    csv = "x\n1\n2\n3\n4\n5\n"
    ledger = tp.PrivacyLedger(1.0)
    out = tp.query(csv, {"kind": "count", "epsilon": 0.5}, ledger, seed=1)
    assert "result" in out
    assert ledger.spent_epsilon == pytest.approx(0.5)
    with pytest.raises(tp.BudgetExhaustedError):
        tp.query(csv, {"kind": "count", "epsilon": 0.6}, ledger, seed=2)
