"""Matrix multiplication through depth distributions of a rectangle gadget.

Each rank-1 term of the product (column i of A times row i of B) becomes a
gadget of rectangles inside a shared 2-D domain: one box per A-coefficient
stacked vertically by running row maxima, a doubled suffix slab per
B-coefficient, and doubled full-width separators that keep different rows
at different depths.  The (i, j) product entry then appears as the volume
at one specific depth, identical across gadgets, so the depth distribution
of the whole arrangement reads off the product.

The depth index of entry (i, j) is affine in (i, j); rather than trusting
an index formula, the layout is calibrated once per order by locating the
entries of a known product (distinct prime matrices) in the oracle's
distribution, and the affine map is frozen and asserted afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import ContractViolationError, ParseError, ReductionIntegrityError
from .geom import AxisBox, DomainBox, Instance
from .measures import DepthDistribution
from .oracle import oracle_dd
from .sdc import sdc_depth_distribution

ENGINES = ("sdc", "oracle")

_calibration_cache: dict[int, tuple[int, int, int]] = {}


@dataclass(frozen=True)
class NonnegativeMatrix:
    """Square matrix of nonnegative reals, row-major."""

    entries: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        rows = tuple(tuple(float(x) for x in row) for row in self.entries)
        object.__setattr__(self, "entries", rows)
        n = len(rows)
        if n == 0:
            raise ContractViolationError("matrix order must be >= 1")
        for i, row in enumerate(rows):
            if len(row) != n:
                raise ContractViolationError(f"row {i} has {len(row)} entries, expected {n}")
            for j, x in enumerate(row):
                if x < 0.0:
                    raise ContractViolationError(f"entry ({i},{j}) is negative: {x}")

    @property
    def order(self) -> int:
        return len(self.entries)


def _require_same_order(a: NonnegativeMatrix, b: NonnegativeMatrix) -> int:
    if a.order != b.order:
        raise ContractViolationError(f"order mismatch: {a.order} vs {b.order}")
    return a.order


def direct_product(a: NonnegativeMatrix, b: NonnegativeMatrix) -> NonnegativeMatrix:
    """Reference triple-loop product."""
    n = _require_same_order(a, b)
    out = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for k in range(n):
            aik = a.entries[i][k]
            if aik == 0.0:
                continue
            brow = b.entries[k]
            orow = out[i]
            for j in range(n):
                orow[j] += aik * brow[j]
    return NonnegativeMatrix(tuple(tuple(row) for row in out))


def build_gadget(a: NonnegativeMatrix, b: NonnegativeMatrix) -> Instance:
    """The 5n^2-box instance whose depth distribution encodes the product.

    Gadget i occupies the x-range of row i of B (widths = entries); the
    A-column boxes sit in y-bands of height = row maxima of A.  Zero
    entries produce zero-extent boxes, never omitted ones, so the box
    count and depth layout are independent of the values.  A domain axis
    whose natural extent is zero is padded to unit length to stay a valid
    domain; all boxes are then degenerate on that axis.
    """
    n = _require_same_order(a, b)
    row_max = [max(a.entries[j]) for j in range(n)]
    s = [0.0] * (n + 1)
    for j in range(n):
        s[j + 1] = s[j] + row_max[j]
    row_sum = [sum(b.entries[i]) for i in range(n)]
    t = [0.0] * (n + 1)
    for i in range(n):
        t[i + 1] = t[i] + row_sum[i]
    width = t[n] if t[n] > 0.0 else 1.0
    height = s[n] if s[n] > 0.0 else 1.0
    boxes: list[AxisBox] = []
    for i in range(n):
        gx0, gx1 = t[i], t[i + 1]
        for j in range(n):
            boxes.append(AxisBox((gx0, s[j]), (gx1, s[j] + a.entries[j][i])))
        x = gx0
        for j in range(n):
            slab = AxisBox((x, 0.0), (gx1, height))
            boxes.append(slab)
            boxes.append(slab)
            x += b.entries[i][j]
    for j in range(n):
        sep = AxisBox((0.0, s[j + 1]), (width, s[n]))
        boxes.extend([sep] * (2 * n))
    assert len(boxes) == 5 * n * n
    return Instance(2, DomainBox((0.0, 0.0), (width, height)), tuple(boxes))


def _first_primes(count: int) -> list[int]:
    primes: list[int] = []
    x = 2
    while len(primes) < count:
        if all(x % p for p in primes if p * p <= x):
            primes.append(x)
        x += 1
    return primes


def depth_calibration(n: int) -> tuple[int, int, int]:
    """(base, row_stride, col_stride): entry (i, j) of an order-n product
    lives at depth base + (i-1)*row_stride + (j-1)*col_stride.

    Derived empirically from a distinct-prime canary product located in
    the oracle's depth distribution, checked affine, then cached.
    """
    if n < 1:
        raise ContractViolationError(f"order must be >= 1, got {n}")
    cached = _calibration_cache.get(n)
    if cached is not None:
        return cached
    primes = _first_primes(2 * n * n)
    a = NonnegativeMatrix(
        tuple(tuple(float(p) for p in primes[i * n:(i + 1) * n]) for i in range(n))
    )
    b = NonnegativeMatrix(
        tuple(tuple(float(p) for p in primes[n * n + i * n:n * n + (i + 1) * n]) for i in range(n))
    )
    expected = direct_product(a, b)
    values = oracle_dd(build_gadget(a, b)).values
    located: dict[tuple[int, int], int] = {}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            target = expected.entries[i - 1][j - 1]
            hits = [
                idx for idx, v in enumerate(values) if abs(v - target) <= 1e-9 * target
            ]
            if len(hits) != 1:
                raise ReductionIntegrityError(
                    f"calibration for order {n}: entry ({i},{j}) matched depths {hits}"
                )
            located[(i, j)] = hits[0]
    base = located[(1, 1)]
    row_stride = located[(2, 1)] - base if n >= 2 else 0
    col_stride = located[(1, 2)] - base if n >= 2 else 0
    for (i, j), idx in located.items():
        if idx != base + (i - 1) * row_stride + (j - 1) * col_stride:
            raise ReductionIntegrityError(
                f"calibration for order {n}: depth indices are not affine at ({i},{j})"
            )
    _calibration_cache[n] = (base, row_stride, col_stride)
    return base, row_stride, col_stride


def product_via_dd(
    a: NonnegativeMatrix, b: NonnegativeMatrix, engine: str = "sdc"
) -> NonnegativeMatrix:
    """Multiply by building the gadget, computing its depth distribution
    with the chosen engine, and projecting the calibrated depths."""
    n = _require_same_order(a, b)
    if engine not in ENGINES:
        raise ContractViolationError(f"unknown engine {engine!r}; expected one of {ENGINES}")
    base, row_stride, col_stride = depth_calibration(n)
    instance = build_gadget(a, b)
    dd: DepthDistribution
    if engine == "sdc":
        dd = sdc_depth_distribution(instance)
    else:
        dd = oracle_dd(instance)
    values = dd.values
    out = []
    for i in range(1, n + 1):
        row = []
        for j in range(1, n + 1):
            idx = base + (i - 1) * row_stride + (j - 1) * col_stride
            if not 0 <= idx < len(values):
                raise ReductionIntegrityError(
                    f"calibrated depth {idx} outside distribution of length {len(values)}"
                )
            row.append(max(float(values[idx]), 0.0))
        out.append(tuple(row))
    return NonnegativeMatrix(tuple(out))


def read_matrix_csv(text: str) -> NonnegativeMatrix:
    """Parse a matrix from CSV (rows = lines, comma-separated decimals)."""
    rows = []
    lines = [line for line in text.strip().splitlines() if line.strip()]
    if not lines:
        raise ParseError("matrix", "empty document")
    for i, line in enumerate(lines):
        row = []
        for j, cell in enumerate(line.split(",")):
            try:
                value = float(cell)
            except ValueError as exc:
                raise ParseError(f"row {i} column {j}", f"not a number: {cell.strip()!r}") from exc
            row.append(value)
        rows.append(tuple(row))
    try:
        return NonnegativeMatrix(tuple(rows))
    except ContractViolationError as exc:
        raise ParseError("matrix", str(exc)) from exc


def write_matrix_csv(m: NonnegativeMatrix) -> str:
    return "\n".join(",".join(repr(x) for x in row) for row in m.entries) + "\n"
