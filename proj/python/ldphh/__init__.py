# Copyright 2026 The ldphh Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Locally differentially private heavy-hitter identification (PEM, SPM, MCM)."""

import csv
import io
import json

from ._core import (
    Dataset,
    Error,
    InfeasibleError,
    compare_partition_vs_split,
    exact_counts,
    exp_freqs,
    from_ints,
    generate,
    grr_ldp_ratio,
    grr_params,
    grr_variance,
    joint_estimate,
    lemma_E,
    lemma_E_check,
    load,
    min_population,
    normal_cdf,
    normal_inv_cdf,
    olh_params,
    olh_variance,
    zipf_freqs,
)
from . import _core

QUERY_LIMIT = 1 << 20


def plan(m, k, eps, query_limit=QUERY_LIMIT):
    """The default PEM configuration: the largest eta that fits the query limit."""
    return json.loads(_core._plan(m, k, query_limit, eps))


def run(data, protocol="pem", eps=1.0, k=16, seed=1, theta=None, eta=None,
        variant="split", final_frac=0.1, query_limit=QUERY_LIMIT):
    """One seeded run; returns the RunResult as a dict."""
    return json.loads(_core._run(data, protocol, eps, k, seed, theta, eta,
                                 variant, final_frac, query_limit))


def compare(data, protocols=("pem", "spm", "mcm"), eps=(1.0,), k=16, reps=1,
            seed=1, query_limit=QUERY_LIMIT):
    """Protocol x eps sweep; returns the result rows as dicts."""
    text = _core._compare(data, list(protocols), list(eps), k, reps, seed, query_limit)
    return list(csv.DictReader(io.StringIO(text)))


def analyze(m, k, n, eps, dist="zipf", s=1.5, drop=0, rate=0.05, support=1024,
            eta=None, query_limit=QUERY_LIMIT):
    """Analytic identification probabilities and utility scores of a PEM plan."""
    return json.loads(_core._analyze(dist, s, drop, rate, support, m, k, n, eps,
                                     eta, query_limit))


def optimize(m, k, n, eps, dist="zipf", s=1.5, drop=0, rate=0.05, support=1024,
             weights="f1", vary_cand_size=False, query_limit=QUERY_LIMIT):
    """The PEM plan with the best analytic utility, analysed like analyze()."""
    return json.loads(_core._optimize(dist, s, drop, rate, support, m, k, n, eps,
                                      query_limit, weights, vary_cand_size))


__all__ = [
    "Dataset", "Error", "InfeasibleError", "QUERY_LIMIT", "analyze", "compare",
    "compare_partition_vs_split", "exact_counts", "exp_freqs", "from_ints",
    "generate", "grr_ldp_ratio", "grr_params", "grr_variance", "joint_estimate",
    "lemma_E", "lemma_E_check", "load", "min_population", "normal_cdf",
    "normal_inv_cdf", "olh_params", "olh_variance", "optimize", "plan", "run",
    "zipf_freqs",
]
