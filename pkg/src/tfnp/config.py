"""Default caps, overridable from the environment."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, fields, replace

logger = logging.getLogger(__name__)

ENV_PREFIX = "TFNP_"


@dataclass(frozen=True, slots=True)
class Limits:
    """Caps used when a caller does not pass one explicitly.

    Args:
        step_cap: local-search and strategy-improvement step cap: default 2**20
        size_cap: support enumeration strategy cap: default 5
        hopfield_game_cap: node cap for the Hopfield -> game tensor: default 12
        sperner_cap: resolution cap for brute-force Sperner scans: default 256
        brute_force_cap: positional strategy pairs enumerated by oracles: default 10**6
        label_cap: largest parity label accepted by the reduction: default 16
        precision_cap: Sqrt-Sum working precision cap in bits: default 4096
        bit_cap: PosSLP intermediate bit-length cap: default 2**20
        iter_cap: fixed-point iteration cap: default 10**6
        retries: grid refinements for Scarf: default 8
        exact_bits: bit size after which LFP iterates are rounded down: default 512
    """

    step_cap: int = 2**20
    size_cap: int = 5
    hopfield_game_cap: int = 12
    sperner_cap: int = 256
    brute_force_cap: int = 10**6
    label_cap: int = 16
    precision_cap: int = 4096
    bit_cap: int = 2**20
    iter_cap: int = 10**6
    retries: int = 8
    exact_bits: int = 512

    @classmethod
    def from_env(cls, environ: dict[str, str] | None = None) -> Limits:
        env = os.environ if environ is None else environ
        overrides: dict[str, int] = {}
        for f in fields(cls):
            key = f"{ENV_PREFIX}{f.name.upper()}"
            if key in env:
                try:
                    overrides[f.name] = int(env[key])
                except ValueError:
                    logger.warning(f"Ignoring non-integer {key}={env[key]!r}")
        return replace(cls(), **overrides)


DEFAULT_LIMITS = Limits()
