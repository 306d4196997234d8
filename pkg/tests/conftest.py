"""Shared fixtures: the frozen reference corpus and profiled sessions.

Profiling a corpus member runs a full 21-point rate sweep, so sessions are
built once per test run and shared read-only.
"""

import numpy as np
import pytest

from apax import ingest
from apax.profiler import ProfileSession


@pytest.fixture(scope="session")
def corpus():
    """name -> (spec, samples) for every corpus-v1 member."""
    return {spec.name: (spec, ingest.synth(spec)) for spec in ingest.CORPUS_V1}


@pytest.fixture(scope="session")
def corpus_sessions(corpus):
    """name -> ProfileSession (full default-grid sweep, recommendation set)."""
    out = {}
    for name, (spec, x) in corpus.items():
        out[name] = ProfileSession(x, spec.dtype, name=name)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(0xA9A)
