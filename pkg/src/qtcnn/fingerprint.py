"""Stable short hashes of run configuration, embedded in reports and
checkpoints so outputs can be traced back to the exact settings."""

from __future__ import annotations

import hashlib
import json


def config_fingerprint(config: dict) -> str:
    """16-hex-digit digest of a canonical JSON rendering; any field change
    changes the digest."""
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]
