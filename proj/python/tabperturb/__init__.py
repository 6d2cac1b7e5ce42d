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
"""Deterministic privacy-preserving perturbation of tabular data."""

import json as _json
import os as _os

from . import _core
from ._core import (
    BudgetExhaustedError,
    PrivacyLedger,
    TabPerturbIOError,
    bin_values,
    chi_square,
    detect_pii,
    exponential_mechanism,
    exponential_probabilities,
    gaussian_mechanism,
    gaussian_sigma,
    geometric_mechanism,
    geometric_mechanism_pmf,
    ks_two_sample,
    laplace_mechanism,
    laplace_scale,
    luhn_valid,
    mask,
    randomized_response,
    sample_cauchy,
    sample_gaussian,
    sample_laplace,
    sample_two_sided_geometric,
    sample_uniform,
    transform_pii,
    two_sided_geometric_pmf,
    validate,
)

__version__ = "0.1.0"

KEY_ENV = "TABPERTURB_PII_KEY"


def _config_text(config):
    return config if isinstance(config, str) else _json.dumps(config)


def perturb(csv, config, *, seed=None, workers=0, key_file=None):
    """Runs a pipeline over CSV text.

    The PII key comes from `key_file` or the TABPERTURB_PII_KEY environment
    variable. Returns a dict with the output CSV, the manifest and the
    fidelity report, the latter two decoded from JSON.
    """
    key = None
    if key_file is not None:
        with open(key_file, encoding="utf-8") as f:
            key = f.read().strip()
    elif _os.environ.get(KEY_ENV):
        key = _os.environ[KEY_ENV]
    out = _core.perturb(csv, _config_text(config), key, seed, workers)
    out["manifest"] = _json.loads(out["manifest"])
    out["report"] = _json.loads(out["report"])
    return out


def report(original_csv, processed_csv, manifest=None):
    if manifest is not None and not isinstance(manifest, str):
        manifest = _json.dumps(manifest)
    return _json.loads(_core.report(original_csv, processed_csv, manifest))


def query(csv, spec, ledger, seed, stream=0):
    spec_text = spec if isinstance(spec, str) else _json.dumps(spec)
    return _json.loads(_core.query(csv, spec_text, ledger, seed, stream))
