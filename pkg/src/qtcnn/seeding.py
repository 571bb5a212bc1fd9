"""Deterministic per-stage random streams derived from one root seed.

Every stochastic stage (synthetic data, sampling, init, shuffling, dropout,
bootstrap) pulls its own named stream so that adding or re-ordering one stage
never perturbs the draws seen by another.
"""

from __future__ import annotations

import zlib

import numpy as np


def stage_rng(root_seed: int, stage: str) -> np.random.Generator:
    """Return a Generator keyed by (root_seed, stage name)."""
    tag = zlib.crc32(stage.encode("utf-8"))
    return np.random.default_rng(np.random.SeedSequence([int(root_seed) & 0xFFFFFFFF, tag]))
