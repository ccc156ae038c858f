# SPDX-License-Identifier: Apache-2.0
"""Design-space exploration for streaming CNN accelerators.

Functions take network and device descriptions either as text or as
paths; results are plain dicts and lists.
"""

from __future__ import annotations

import json
import os
from typing import Iterable, Sequence

from . import _core
from ._core import SaOptions, StreamflowError, __version__

__all__ = [
    "SaOptions",
    "StreamflowError",
    "__version__",
    "evaluate",
    "multi",
    "optimize",
    "pareto",
    "parse_device",
    "parse_network",
    "shape_table",
]


def _text(source: str | os.PathLike) -> str:
    # Descriptions are multi-line; a single line naming an existing file is a path.
    if isinstance(source, os.PathLike) or ("\n" not in source and os.path.isfile(source)):
        with open(source, encoding="utf-8") as f:
            return f.read()
    return str(source)


def _options(seed: int, **sa) -> SaOptions:
    opts = SaOptions()
    opts.seed = seed
    for key, value in sa.items():
        if not hasattr(opts, key):
            raise TypeError(f"unknown annealing option {key!r}")
        setattr(opts, key, value)
    return opts


def parse_network(source) -> list[dict]:
    """Per-layer name, kind, input/output shape, ops and weights."""
    return json.loads(_core.network_json(_text(source)))


def shape_table(source) -> str:
    return _core.shape_table(_text(source))


def parse_device(source) -> str:
    """Validated, canonical device description."""
    return _core.device_text(_text(source))


def optimize(net, device, objective: str = "latency", seed: int = 1, **sa) -> dict:
    """Annealing search; `objective` is "latency" or "throughput:<B>"."""
    return json.loads(_core.optimize(_text(net), _text(device), objective, _options(seed, **sa)))


def evaluate(
    net,
    device,
    coarse: Sequence[int],
    fine: Sequence[int],
    cuts: Iterable[int] = (),
    mode: str = "throughput",
    batch: int = 1,
) -> dict:
    return json.loads(
        _core.evaluate(_text(net), _text(device), list(coarse), list(fine), list(cuts), mode, batch)
    )


def pareto(
    net,
    device,
    metric: str = "latency",
    resource: str = "dsp",
    batch: int = 1,
    limit: int = 1_000_000,
    max_partitions: int = 0,
) -> list[dict]:
    """Non-dominated designs of the enumerated space, best metric first."""
    return json.loads(
        _core.pareto(_text(net), _text(device), metric, resource, batch, limit, max_partitions)
    )


def multi(entries, device, lam: float = 0.1, seed: int = 1, **sa) -> dict:
    """Maps several CNNs onto one device.

    `entries` holds (name, network, weight, target_latency_s) tuples.
    """
    rows = [(name, _text(net), float(w), float(t)) for name, net, w, t in entries]
    return json.loads(_core.multi(rows, _text(device), lam, _options(seed, **sa)))
