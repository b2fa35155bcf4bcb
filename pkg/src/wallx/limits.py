"""Desk-scale bounds, overridable through the WALLX_BOUNDS environment
variable.

Format: comma-separated key=value pairs, e.g. ``WALLX_BOUNDS="n=6,d=4"``.
Known keys: ``n`` (matrix size for root/weight combinatorics, default 5),
``d`` (number of embeddings, default 3), ``enum`` (Weyl enumeration bound,
default 8).  The bounds exist to keep brute-force enumerations honest, not
to hide bugs; exceeding one raises :class:`BoundExceeded`, which the CLI
maps to exit code 3.
"""

from __future__ import annotations

import os

DEFAULTS = {"n": 5, "d": 3, "enum": 8}


class BoundExceeded(Exception):
    """A requested size is past the configured desk-scale bound."""


def get_bounds() -> dict[str, int]:
    bounds = dict(DEFAULTS)
    raw = os.environ.get("WALLX_BOUNDS", "")
    for part in raw.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ValueError(f"WALLX_BOUNDS entry {part!r} is not key=value")
        key, _, val = part.partition("=")
        key = key.strip()
        if key not in DEFAULTS:
            raise ValueError(f"WALLX_BOUNDS key {key!r} unknown (have {sorted(DEFAULTS)})")
        bounds[key] = int(val)
    return bounds


def check_bound(key: str, value: int, what: str) -> None:
    limit = get_bounds()[key]
    if value > limit:
        raise BoundExceeded(
            f"{what} = {value} exceeds the configured bound {key} <= {limit}; "
            f"raise it via WALLX_BOUNDS=\"{key}={value}\" if you mean it")
