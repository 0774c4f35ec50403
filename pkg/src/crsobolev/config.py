"""Frozen normalization constants and default run settings."""
from __future__ import annotations

import json
import math
import os
from pathlib import Path

from .specfun import log_gamma

CONFIG_ENV = "CRSOBOLEV_CONFIG"


def cr_total_mass(n: int) -> float:
    """Total mass of the CR volume form on S^{2n+1}.

    Fixed by requiring the F = 1 Sobolev quotient to equal the reciprocal of
    the sharp constant; the condition gives (4 pi)^{n+1} for every gamma
    (see ``sphere_numerics.sobolev.calibrate_cr_total_mass``).
    """
    return (4.0 * math.pi) ** (n + 1)


def euclidean_sphere_area(n: int) -> float:
    """Surface area of the unit sphere S^n in R^{n+1}."""
    return 2.0 * math.exp(0.5 * (n + 1) * math.log(math.pi) - log_gamma(0.5 * (n + 1)))


DEFAULTS = {
    "n": 1,
    "gamma": "1",
    "symmetric": True,
    "jmax": 3,
    "kmax": 3,
    "hmax": 5,
    "maxdeg": 20,
    "tolerance": 1e-5,
    "seed": 0,
    "restarts": 50,
    "m_points": 4,
    "format": "table",
}


def load_config(path: str | os.PathLike | None = None) -> dict:
    """Defaults overlaid with a JSON file (explicit path, else $CRSOBOLEV_CONFIG)."""
    cfg = dict(DEFAULTS)
    path = path or os.environ.get(CONFIG_ENV)
    if path:
        data = json.loads(Path(path).read_text())
        if not isinstance(data, dict):
            raise ValueError(f"config file {path} must hold a JSON object")
        cfg.update(data)
    return cfg
