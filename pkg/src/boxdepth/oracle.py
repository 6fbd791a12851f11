"""Brute-force ground truth over the compressed coordinate grid.

Every box endpoint (clipped to the domain) becomes a grid line, so no
cell straddles a box boundary and the depth of a cell equals the depth
of its midpoint.  This is the independent oracle the fast algorithms are
tested against; it is never a performance path.
"""

from __future__ import annotations

import numpy as np

from .errors import BudgetExceededError
from .geom import Instance
from .measures import DepthDistribution, _finish_dd, dd_to_klee, dd_to_maxdepth

DEFAULT_CELL_BUDGET = 50_000_000


def _grid_dd(
    los: np.ndarray,
    his: np.ndarray,
    dlo: np.ndarray,
    dhi: np.ndarray,
    cell_budget: int = DEFAULT_CELL_BUDGET,
) -> np.ndarray:
    """Exact-depth volume vector (length n+1) on the compressed grid."""
    n, d = los.shape
    clo = np.clip(los, dlo, dhi)
    chi = np.clip(his, dlo, dhi)
    axes: list[np.ndarray] = []
    cells = 1
    for k in range(d):
        coords = np.unique(np.concatenate([[dlo[k], dhi[k]], clo[:, k], chi[:, k]]))
        axes.append(coords)
        cells *= len(coords) - 1
    if cells > cell_budget:
        raise BudgetExceededError(
            f"compressed grid has {cells} cells, over the budget of {cell_budget}; "
            "reduce n or d"
        )
    depth = np.zeros(tuple(len(c) - 1 for c in axes), dtype=np.int32)
    for b in range(n):
        slices = tuple(
            slice(
                np.searchsorted(axes[k], clo[b, k]),
                np.searchsorted(axes[k], chi[b, k]),
            )
            for k in range(d)
        )
        depth[slices] += 1
    vol = np.diff(axes[0])
    for k in range(1, d):
        vol = vol[..., None] * np.diff(axes[k])
    out = np.bincount(depth.ravel(), weights=vol.ravel(), minlength=n + 1)
    return out[: n + 1]


def _instance_arrays(instance: Instance) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    d = instance.dim
    n = instance.n
    los = np.empty((n, d))
    his = np.empty((n, d))
    for i, b in enumerate(instance.boxes):
        los[i] = b.lo
        his[i] = b.hi
    return los, his, np.asarray(instance.domain.lo), np.asarray(instance.domain.hi)


def oracle_dd(instance: Instance, cell_budget: int = DEFAULT_CELL_BUDGET) -> DepthDistribution:
    """Depth distribution by evaluating every grid cell at its midpoint."""
    los, his, dlo, dhi = _instance_arrays(instance)
    raw = _grid_dd(los, his, dlo, dhi, cell_budget)
    return _finish_dd(raw, float(np.prod(dhi - dlo)))


def oracle_klee(instance: Instance, cell_budget: int = DEFAULT_CELL_BUDGET) -> float:
    return dd_to_klee(oracle_dd(instance, cell_budget))


def oracle_max_depth(instance: Instance, cell_budget: int = DEFAULT_CELL_BUDGET) -> int:
    return dd_to_maxdepth(oracle_dd(instance, cell_budget))
