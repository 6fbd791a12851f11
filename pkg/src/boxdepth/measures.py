"""Depth-distribution arithmetic, the 1-D sweep, polynomial products and
the slab-case solvers.

A depth distribution over a domain of volume V stores n+1 nonnegative
entries v[0..n]; v[k] is the volume covered by exactly k boxes and the
entries sum to V.  Index 0 (the uncovered volume) is kept explicitly so
that mass conservation is testable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ContractViolationError, UndefinedResultError
from .geom import FULL_COVER, AxisBox, DomainBox, slab_axis

# Result sizes below this use schoolbook convolution, larger ones the FFT.
DIRECT_CONVOLUTION_CUTOFF = 64

# Sweeps smaller than this run as plain Python loops; beyond it numpy wins.
_PY_SCAN_MAX = 32

_EPS_REL = 1e-12


class DepthDistribution:
    """Mutable vector v[0..n] of volumes indexed by exact depth."""

    __slots__ = ("values",)

    def __init__(self, values: Iterable[float] | np.ndarray):
        self.values = np.asarray(values, dtype=float)
        if self.values.ndim != 1 or len(self.values) < 1:
            raise ContractViolationError("a depth distribution needs at least the v[0] entry")

    @property
    def n(self) -> int:
        return len(self.values) - 1

    @property
    def v0(self) -> float:
        return float(self.values[0])

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, k: int) -> float:
        return float(self.values[k])

    def __iter__(self):
        return iter(self.values.tolist())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DepthDistribution):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __repr__(self) -> str:
        return f"DepthDistribution({self.values.tolist()!r})"

    def to_json(self) -> dict:
        """The output object: v0, the published v[1..n], and both refinements."""
        return {
            "v0": self.v0,
            "v": self.values[1:].tolist(),
            "klee": dd_to_klee(self),
            "max_depth": dd_to_maxdepth(self),
        }


@dataclass(frozen=True)
class RealPolynomial:
    """Polynomial with nonnegative real coefficients, coeffs[j] for x^j."""

    coeffs: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


def _finish_dd(raw: np.ndarray, domain_volume: float) -> DepthDistribution:
    """Clamp rounding noise and wrap; entries below -eps indicate a bug."""
    eps = _EPS_REL * domain_volume
    lo = raw.min() if len(raw) else 0.0
    if lo < 0.0:
        if lo < -eps:
            raise ContractViolationError(f"negative depth-distribution entry {lo}")
        raw = np.where(raw < 0.0, 0.0, raw)
    return DepthDistribution(raw)


def dd_to_klee(dd: DepthDistribution) -> float:
    """Klee's measure: total volume covered at least once."""
    return float(dd.values[1:].sum())


def dd_to_maxdepth(dd: DepthDistribution) -> int:
    """Largest depth whose volume exceeds the clamping threshold."""
    eps = _EPS_REL * float(dd.values.sum())
    idx = np.nonzero(dd.values[1:] > eps)[0]
    return int(idx[-1]) + 1 if len(idx) else 0


def dd_to_probabilities(dd: DepthDistribution) -> list[float]:
    """P(depth = k) for k in [1..n] for a point drawn from the covered region."""
    total = dd_to_klee(dd)
    if total <= 0.0:
        raise UndefinedResultError("no covered volume; depth probabilities undefined")
    return [float(v) / total for v in dd.values[1:]]


def dd_accumulate(target: DepthDistribution, source: DepthDistribution, shift: int) -> None:
    """Add source shifted by ``shift`` depths into target (in place).

    source[k] flows to target[k + shift] for every k >= 0; the uncovered
    part source[0] lands on target[shift], which accounts for volume lying
    under exactly ``shift`` enclosing boxes.
    """
    if shift < 0:
        raise ContractViolationError(f"shift must be >= 0, got {shift}")
    if shift + len(source.values) > len(target.values):
        raise ContractViolationError(
            f"shift {shift} overflows target of length {len(target.values)}"
        )
    target.values[shift:shift + len(source.values)] += source.values


def _scan_pairs(pairs: Sequence[tuple[float, float]], glo: float, ghi: float) -> np.ndarray:
    """Exact-depth length vector of already-clipped intervals inside (glo, ghi).

    Ties process starts before ends (closed intervals); returns a vector of
    length len(pairs)+1.
    """
    m = len(pairs)
    out = np.zeros(m + 1)
    if m == 0:
        out[0] = ghi - glo
        return out
    if m <= _PY_SCAN_MAX:
        ev = []
        for s, e in pairs:
            ev.append((s, 0))
            ev.append((e, 1))
        ev.sort()
        depth = 0
        prev = glo
        for coord, kind in ev:
            if coord > prev:
                out[depth] += coord - prev
                prev = coord
            depth += 1 - 2 * kind
        out[0] += ghi - prev
        return out
    arr = np.asarray(pairs, dtype=float)
    coords = np.concatenate([arr[:, 0], arr[:, 1]])
    kinds = np.concatenate([np.zeros(m, dtype=np.int8), np.ones(m, dtype=np.int8)])
    order = np.lexsort((kinds, coords))
    xs = coords[order]
    depth = np.cumsum(1 - 2 * kinds[order].astype(np.int64))
    out[0] += xs[0] - glo
    seg = np.diff(xs)
    out += np.bincount(depth[:-1], weights=seg, minlength=m + 1)
    out[0] += ghi - xs[-1]
    return out


def _max_positive_depth(scan: np.ndarray) -> int:
    idx = np.nonzero(scan[1:] > 0.0)[0]
    return int(idx[-1]) + 1 if len(idx) else 0


def dd_intervals_1d(
    intervals: Sequence[tuple[float, float]], domain: tuple[float, float]
) -> DepthDistribution:
    """Depth distribution of intervals clipped to a 1-D domain.

    The result has length len(intervals)+1 even when some intervals clip
    away entirely (their depths are simply unreachable).
    """
    glo, ghi = float(domain[0]), float(domain[1])
    if ghi - glo <= 0.0:
        raise ContractViolationError("domain must have positive length")
    clipped = []
    for i, (lo, hi) in enumerate(intervals):
        if lo > hi:
            raise ContractViolationError(f"interval {i} has lo={lo} > hi={hi}")
        s, e = max(lo, glo), min(hi, ghi)
        if s <= e:
            clipped.append((s, e))
    raw = _scan_pairs(clipped, glo, ghi)
    out = np.zeros(len(intervals) + 1)
    out[: len(raw)] = raw
    return _finish_dd(out, ghi - glo)


def _convolve(a: np.ndarray, b: np.ndarray, method: str = "auto") -> np.ndarray:
    if len(a) == 0 or len(b) == 0:
        return np.zeros(0)
    size = len(a) + len(b) - 1
    if method == "direct" or (method == "auto" and size < DIRECT_CONVOLUTION_CUTOFF):
        return np.convolve(a, b)
    padded = 1 << (size - 1).bit_length()
    out = np.fft.irfft(np.fft.rfft(a, padded) * np.fft.rfft(b, padded), padded)[:size]
    return out


def _clamp_small_negatives(out: np.ndarray) -> np.ndarray:
    if len(out) == 0 or out.min() >= 0.0:
        return out
    eps = _EPS_REL * max(float(out.sum()), 1.0)
    return np.where((out < 0.0) & (out >= -eps), 0.0, out)


def poly_multiply(ps: Sequence[RealPolynomial], method: str = "auto") -> RealPolynomial:
    """Product of polynomials with nonnegative coefficients.

    ``method`` selects the convolution path: "auto" switches from
    schoolbook to FFT at DIRECT_CONVOLUTION_CUTOFF coefficients, "direct"
    and "transform" force one path (they agree to 1e-12 relative).
    """
    if not ps:
        raise ContractViolationError("poly_multiply needs at least one polynomial")
    if method not in ("auto", "direct", "transform"):
        raise ContractViolationError(f"unknown method {method!r}")
    conv_method = {"auto": "auto", "direct": "direct", "transform": "transform"}[method]
    acc = np.asarray(ps[0].coeffs, dtype=float)
    for p in ps[1:]:
        acc = _convolve(acc, np.asarray(p.coeffs, dtype=float),
                        "direct" if conv_method == "direct" else
                        ("transform" if conv_method == "transform" else "auto"))
    return RealPolynomial(tuple(_clamp_small_negatives(acc).tolist()))


def _slab_product(
    per_axis_pairs: list[list[tuple[float, float]]],
    gamma_lo: Sequence[float],
    gamma_hi: Sequence[float],
) -> np.ndarray:
    """Depth vector of slabs given their clipped projections, one list per axis.

    Axes without slabs contribute their plain extent as a constant factor.
    """
    const = 1.0
    vectors: list[np.ndarray] = []
    for axis, pairs in enumerate(per_axis_pairs):
        glo, ghi = gamma_lo[axis], gamma_hi[axis]
        if pairs:
            vectors.append(_scan_pairs(pairs, glo, ghi))
        else:
            const *= ghi - glo
    if not vectors:
        return np.array([const])
    acc = vectors[0]
    for vec in vectors[1:]:
        acc = _convolve(acc, vec)
    return _clamp_small_negatives(acc * const)


def _split_slabs_by_axis(
    slabs: Sequence[AxisBox], gamma: DomainBox
) -> list[list[tuple[float, float]]]:
    d = gamma.dim
    per_axis: list[list[tuple[float, float]]] = [[] for _ in range(d)]
    for i, box in enumerate(slabs):
        axis = slab_axis(box, gamma)
        if axis is FULL_COVER:
            raise ContractViolationError(
                f"box {i} covers the whole domain; account for it via the containment shift"
            )
        if axis is None:
            raise ContractViolationError(f"box {i} is not a slab within the domain")
        s = max(box.lo[axis], gamma.lo[axis])
        e = min(box.hi[axis], gamma.hi[axis])
        per_axis[axis].append((s, e) if s <= e else (gamma.lo[axis], gamma.lo[axis]))
    return per_axis


def dd_slabs(slabs: Sequence[AxisBox], gamma: DomainBox) -> DepthDistribution:
    """Depth distribution of slabs inside the domain via per-axis sweeps and
    a product of one polynomial per axis."""
    per_axis = _split_slabs_by_axis(slabs, gamma)
    raw = _slab_product(per_axis, gamma.lo, gamma.hi)
    out = np.zeros(len(slabs) + 1)
    out[: len(raw)] = raw
    gamma_volume = 1.0
    for l, h in zip(gamma.lo, gamma.hi):
        gamma_volume *= h - l
    return _finish_dd(out, gamma_volume)


def klee_slabs(slabs: Sequence[AxisBox], gamma: DomainBox) -> float:
    """Covered volume of a slab arrangement: |G| minus the product of the
    per-axis uncovered lengths."""
    per_axis = _split_slabs_by_axis(slabs, gamma)
    total = 1.0
    uncovered = 1.0
    for axis, pairs in enumerate(per_axis):
        extent = gamma.hi[axis] - gamma.lo[axis]
        total *= extent
        if pairs:
            uncovered *= float(_scan_pairs(pairs, gamma.lo[axis], gamma.hi[axis])[0])
        else:
            uncovered *= extent
    return total - uncovered


def maxdepth_slabs(slabs: Sequence[AxisBox], gamma: DomainBox) -> int:
    """Maximum depth of a slab arrangement: per-axis 1-D maxima add up."""
    per_axis = _split_slabs_by_axis(slabs, gamma)
    out = 0
    for axis, pairs in enumerate(per_axis):
        if pairs:
            out += _max_positive_depth(_scan_pairs(pairs, gamma.lo[axis], gamma.hi[axis]))
    return out
