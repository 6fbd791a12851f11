"""Core geometric types, predicates, instance I/O and random generators.

Boxes are closed axis-aligned products of intervals in R^d with
double-precision coordinates.  Zero-extent (degenerate) boxes are legal:
they carry no volume but still intersect and produce graph edges.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import ContractViolationError, ParseError, UnknownKindError

GENERATOR_KINDS = ("uniform", "slabs", "cubes", "containing-chain")


class _FullCover:
    """Sentinel returned by :func:`slab_axis` for boxes covering the domain."""

    __slots__ = ()

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return "FULL_COVER"


FULL_COVER = _FullCover()


def _as_coords(name: str, values: Iterable[float]) -> tuple[float, ...]:
    coords = tuple(float(v) for v in values)
    if not coords:
        raise ContractViolationError(f"{name} must have at least one coordinate")
    for v in coords:
        if not math.isfinite(v):
            raise ContractViolationError(f"{name} contains non-finite coordinate {v!r}")
    return coords


@dataclass(frozen=True)
class AxisBox:
    """Closed axis-aligned box ``[lo[0], hi[0]] x ... x [lo[d-1], hi[d-1]]``."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", _as_coords("lo", self.lo))
        object.__setattr__(self, "hi", _as_coords("hi", self.hi))
        if len(self.lo) != len(self.hi):
            raise ContractViolationError(
                f"lo has {len(self.lo)} coordinates but hi has {len(self.hi)}"
            )
        for k, (l, h) in enumerate(zip(self.lo, self.hi)):
            if l > h:
                raise ContractViolationError(f"lo[{k}]={l} exceeds hi[{k}]={h}")

    @property
    def dim(self) -> int:
        return len(self.lo)


@dataclass(frozen=True)
class DomainBox(AxisBox):
    """An AxisBox with strictly positive extent in every dimension."""

    def __post_init__(self) -> None:
        super().__post_init__()
        for k, (l, h) in enumerate(zip(self.lo, self.hi)):
            if h - l <= 0.0:
                raise ContractViolationError(f"domain extent in dimension {k} is not positive")


@dataclass(frozen=True)
class Instance:
    """A domain box together with a finite sequence of boxes of equal dimension."""

    dim: int
    domain: DomainBox
    boxes: tuple[AxisBox, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "boxes", tuple(self.boxes))
        if self.dim < 1:
            raise ContractViolationError(f"dim must be >= 1, got {self.dim}")
        if self.domain.dim != self.dim:
            raise ContractViolationError(
                f"domain has dimension {self.domain.dim}, instance declares {self.dim}"
            )
        for i, b in enumerate(self.boxes):
            if b.dim != self.dim:
                raise ContractViolationError(
                    f"boxes[{i}] has dimension {b.dim}, instance declares {self.dim}"
                )

    @property
    def n(self) -> int:
        return len(self.boxes)


def volume(b: AxisBox) -> float:
    """Product of the extents; 0.0 for degenerate boxes."""
    v = 1.0
    for l, h in zip(b.lo, b.hi):
        v *= h - l
    return v


def _require_same_dim(a: AxisBox, b: AxisBox) -> None:
    if a.dim != b.dim:
        raise ContractViolationError(f"dimension mismatch: {a.dim} vs {b.dim}")


def intersect(a: AxisBox, b: AxisBox) -> AxisBox | None:
    """Componentwise intersection, or None when the boxes are disjoint.

    Closed-box convention: touching boundaries yield a degenerate
    zero-volume box rather than None.
    """
    _require_same_dim(a, b)
    lo = tuple(max(x, y) for x, y in zip(a.lo, b.lo))
    hi = tuple(min(x, y) for x, y in zip(a.hi, b.hi))
    for l, h in zip(lo, hi):
        if l > h:
            return None
    return AxisBox(lo, hi)


def contains(outer: AxisBox, inner: AxisBox) -> bool:
    """True iff ``inner`` lies inside ``outer`` in every dimension."""
    _require_same_dim(outer, inner)
    return all(
        ol <= il and ih <= oh
        for ol, oh, il, ih in zip(outer.lo, outer.hi, inner.lo, inner.hi)
    )


def clip(b: AxisBox, gamma: DomainBox) -> AxisBox | None:
    """Restriction of ``b`` to the domain; None when they are disjoint."""
    return intersect(b, gamma)


def slab_axis(b: AxisBox, gamma: DomainBox) -> int | _FullCover | None:
    """Axis a box constrains when restricted to ``gamma``.

    Returns the unique dimension in which ``b`` fails to span the full
    extent of ``gamma``, :data:`FULL_COVER` when it spans every dimension,
    and None when it fails to span two or more dimensions (the box then
    has a (d-2)-face and is not a slab).
    """
    _require_same_dim(b, gamma)
    axis: int | None = None
    for k, (l, h, gl, gh) in enumerate(zip(b.lo, b.hi, gamma.lo, gamma.hi)):
        if l <= gl and h >= gh:
            continue
        if axis is not None:
            return None
        axis = k
    return FULL_COVER if axis is None else axis


def generate(kind: str, n: int, d: int, seed: int) -> Instance:
    """Deterministic random instance of one of the benchmark families.

    Kinds: ``uniform`` (corner pairs in the unit cube), ``slabs``
    (axis-aligned slabs spanning the domain), ``cubes`` (equal-side cubes,
    possibly poking out of the domain), ``containing-chain`` (nested
    boxes b1 contains b2 contains ...).  The domain is always [0,1]^d.
    """
    if kind not in GENERATOR_KINDS:
        raise UnknownKindError(f"unknown generator kind {kind!r}; expected one of {GENERATOR_KINDS}")
    if n < 0:
        raise ContractViolationError(f"n must be >= 0, got {n}")
    if d < 1:
        raise ContractViolationError(f"d must be >= 1, got {d}")
    rng = random.Random(seed)
    domain = DomainBox((0.0,) * d, (1.0,) * d)
    boxes: list[AxisBox] = []
    if kind == "uniform":
        for _ in range(n):
            lo, hi = [], []
            for _ in range(d):
                a, b = rng.random(), rng.random()
                lo.append(min(a, b))
                hi.append(max(a, b))
            boxes.append(AxisBox(tuple(lo), tuple(hi)))
    elif kind == "slabs":
        for _ in range(n):
            axis = rng.randrange(d)
            a, b = rng.random(), rng.random()
            lo = [0.0] * d
            hi = [1.0] * d
            lo[axis], hi[axis] = min(a, b), max(a, b)
            boxes.append(AxisBox(tuple(lo), tuple(hi)))
    elif kind == "cubes":
        for _ in range(n):
            side = rng.uniform(0.05, 0.5)
            center = [rng.random() for _ in range(d)]
            boxes.append(
                AxisBox(
                    tuple(c - side / 2.0 for c in center),
                    tuple(c + side / 2.0 for c in center),
                )
            )
    else:  # containing-chain
        lows = [sorted(rng.uniform(0.0, 0.49) for _ in range(n)) for _ in range(d)]
        highs = [sorted((rng.uniform(0.51, 1.0) for _ in range(n)), reverse=True) for _ in range(d)]
        for t in range(n):
            boxes.append(
                AxisBox(
                    tuple(lows[k][t] for k in range(d)),
                    tuple(highs[k][t] for k in range(d)),
                )
            )
    return Instance(d, domain, tuple(boxes))


def _parse_number_list(field_name: str, value: object, dim: int) -> tuple[float, ...]:
    if not isinstance(value, list):
        raise ParseError(field_name, "expected an array of numbers")
    if len(value) != dim:
        raise ParseError(field_name, f"expected {dim} numbers, got {len(value)}")
    out = []
    for j, v in enumerate(value):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ParseError(f"{field_name}[{j}]", "expected a number")
        if not math.isfinite(v):
            raise ParseError(f"{field_name}[{j}]", "coordinate must be finite")
        out.append(float(v))
    return tuple(out)


def read_instance(data: bytes | str) -> Instance:
    """Parse the Instance JSON format; raises ParseError naming the bad field."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError("document", f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("document", "expected a JSON object")
    dim = doc.get("dim")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise ParseError("dim", "expected a positive integer")
    dom = doc.get("domain")
    if not isinstance(dom, dict):
        raise ParseError("domain", "expected an object with lo and hi arrays")
    dom_lo = _parse_number_list("domain.lo", dom.get("lo"), dim)
    dom_hi = _parse_number_list("domain.hi", dom.get("hi"), dim)
    for k in range(dim):
        if dom_hi[k] - dom_lo[k] <= 0.0:
            raise ParseError(f"domain.hi[{k}]", "domain extent must be positive")
    raw_boxes = doc.get("boxes")
    if not isinstance(raw_boxes, list):
        raise ParseError("boxes", "expected an array")
    boxes = []
    for i, rb in enumerate(raw_boxes):
        if not isinstance(rb, dict):
            raise ParseError(f"boxes[{i}]", "expected an object with lo and hi arrays")
        lo = _parse_number_list(f"boxes[{i}].lo", rb.get("lo"), dim)
        hi = _parse_number_list(f"boxes[{i}].hi", rb.get("hi"), dim)
        for k in range(dim):
            if lo[k] > hi[k]:
                raise ParseError(f"boxes[{i}].lo[{k}]", f"lo={lo[k]} exceeds hi={hi[k]}")
        boxes.append(AxisBox(lo, hi))
    return Instance(dim, DomainBox(dom_lo, dom_hi), tuple(boxes))


def write_instance(instance: Instance) -> bytes:
    """Serialize to the Instance JSON format with round-trip float precision."""
    doc = {
        "dim": instance.dim,
        "domain": {"lo": list(instance.domain.lo), "hi": list(instance.domain.hi)},
        "boxes": [{"lo": list(b.lo), "hi": list(b.hi)} for b in instance.boxes],
    }
    return json.dumps(doc).encode("utf-8")
