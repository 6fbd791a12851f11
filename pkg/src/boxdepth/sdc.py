"""Simplify-divide-and-conquer solvers for depth distribution, Klee's
measure and maximum depth.

The recursion removes boxes containing the current domain (counting them
in a shift c), stops when the survivors are all slabs (solved by per-axis
sweeps and a polynomial product) or few enough for the grid oracle, and
otherwise splits the domain at a weighted median of the (d-2)-face
coordinates on the current first axis, rotating the axis order below.

Box state is split into per-axis slab buckets plus a short list of face
boxes (those with at least two constrained dimensions).  Buckets for
axes other than the cut pass to both children by reference; only the
cut-axis bucket and the face boxes are walked per split.  Coordinates
stay raw (unclipped) throughout and are clamped on read, so no box data
is ever copied down the tree.  Boxes whose clip to the current domain
has zero volume are dropped: they cannot move any volume entry.

Termination: every cut lands on a face coordinate, which stops being
strictly interior in both children, so the face-event count strictly
decreases along every path.
"""

from __future__ import annotations

import math
from itertools import chain

import numpy as np

from .errors import ContractViolationError
from .geom import AxisBox, DomainBox, Instance, clip, contains, volume
from .measures import _convolve, _finish_dd, _max_positive_depth, DepthDistribution

# Largest non-slab subproblem handed to the grid oracle; guarantees
# termination under coincident coordinates.
SMALL_BASE_SIZE = 4

# Engine-internal convolution switch; np.convolve beats the FFT well past
# the public poly_multiply default on leaf-sized vectors.
_LEAF_FFT_CUTOFF = 512

# Sweeps below this many intervals run as plain Python loops.
_PY_SWEEP_MAX = 24


def _axis_tables(d):
    full = (1 << d) - 1
    axis_of = {full ^ (1 << k): k for k in range(d)}
    # weight of one face endpoint pairing on the cut axis (renamed 1) with
    # an endpoint on the axis renamed r: 2^((1+r)/2)
    pow_table = [2.0 ** ((1 + r) / 2.0) for r in range(d + 1)]
    return axis_of, pow_table


def _classify_root(d, dlo, dhi, boxes, axis_of):
    """Sort raw boxes into per-axis slab buckets, face records and the
    count of boxes containing the domain; zero-volume clips are dropped.

    A bucket is a list of chunks, each chunk a flat float64 array of
    interleaved (start, end) coordinates."""
    flat: list[list[float]] = [[] for _ in range(d)]
    faces: list[tuple[tuple[float, ...], int, int]] = []
    c = 0
    for lo, hi in boxes:
        mask = 0
        ns = 0
        alive = True
        for k in range(d):
            l, h, gl, gh = lo[k], hi[k], dlo[k], dhi[k]
            if l <= gl and h >= gh:
                mask |= 1 << k
                ns += 1
            elif (l if l > gl else gl) >= (h if h < gh else gh):
                alive = False
                break
        if not alive:
            continue
        if ns == d:
            c += 1
        elif ns == d - 1:
            q = axis_of[mask]
            flat[q].append(lo[q])
            flat[q].append(hi[q])
        else:
            faces.append((tuple(lo) + tuple(hi), mask, ns))
    buckets = [[ch] if ch else [] for ch in flat]
    sizes = [len(ch) // 2 for ch in flat]
    return buckets, sizes, faces, c


def _sweep(chunks, gl, gh, m):
    """Depth-length vector (length m+1) of m slab intervals, clamped to
    (gl, gh); interval starts count before ends at equal coordinates."""
    out = np.zeros(m + 1)
    if m == 0:
        out[0] = gh - gl
        return out
    if m <= _PY_SWEEP_MAX:
        ev = []
        for chunk in chunks:
            for i in range(0, len(chunk), 2):
                s = chunk[i]
                e = chunk[i + 1]
                ev.append((s if s > gl else gl, 0))
                ev.append((e if e < gh else gh, 1))
        ev.sort()
        depth = 0
        prev = gl
        for coord, kind in ev:
            if coord > prev:
                out[depth] += coord - prev
                prev = coord
            depth += 1 - 2 * kind
        out[0] += gh - prev
        return out
    arr = np.fromiter(chain.from_iterable(chunks), dtype=float, count=2 * m)
    starts = np.sort(np.maximum(arr[0::2], gl))
    ends = np.sort(np.minimum(arr[1::2], gh))
    xs = np.sort(np.concatenate((starts, ends)), kind="stable")
    # depth inside (xs[i], xs[i+1]) counts starts <= xs[i] minus ends <= xs[i]
    depth = np.searchsorted(starts, xs[:-1], side="right") - np.searchsorted(
        ends, xs[:-1], side="right"
    )
    out[0] += xs[0] - gl
    out += np.bincount(depth, weights=np.diff(xs), minlength=m + 1)
    out[0] += gh - xs[-1]
    return out


def _leaf_dd(d, glo, ghi, buckets, sizes):
    """Depth vector of an all-slab node: product of one factor per axis."""
    const = 1.0
    acc = None
    for a in range(d):
        if sizes[a] == 0:
            const *= ghi[a] - glo[a]
            continue
        vec = _sweep(buckets[a], glo[a], ghi[a], sizes[a])
        if acc is None:
            acc = vec
        elif len(acc) + len(vec) - 1 < _LEAF_FFT_CUTOFF:
            acc = np.convolve(acc, vec)
        else:
            acc = _convolve(acc, vec, "transform")
    if acc is None:
        return np.array([const])
    return acc * const if const != 1.0 else acc


def _find_cut(d, glo, ghi, faces, axis, pow_table, weighted):
    """Weighted median of face coordinates on the first axis carrying any
    (rotating); ties go to the smaller coordinate.  None when no face box
    has a strictly interior endpoint anywhere (defensive; callers then use
    the oracle base)."""
    for t in range(d):
        a = (axis + t) % d
        abit = 1 << a
        da = d + a
        gl = glo[a]
        gh = ghi[a]
        events: list[tuple[float, float]] = []
        if d == 2 and weighted:
            # single other axis, so the pairing weight reduces to the count
            # of its strictly interior endpoints (the 2^(3/2) factor is a
            # common scale the median ignores)
            j = 1 - a
            dj = 2 + j
            gjl = glo[j]
            gjh = ghi[j]
            for row, mask, _ns in faces:
                w = float((row[j] > gjl) + (row[dj] < gjh))
                l = row[a]
                h = row[da]
                if l > gl:
                    events.append((l, w))
                if gl < h < gh:
                    events.append((h, w))
        else:
            for row, mask, _ns in faces:
                if mask & abit:
                    continue
                if weighted:
                    w = 0.0
                    for j in range(d):
                        if j == a or mask >> j & 1:
                            continue
                        cnt = (row[j] > glo[j]) + (row[d + j] < ghi[j])
                        w += cnt * pow_table[(j - a) % d + 1]
                else:
                    w = 1.0
                l = row[a]
                h = row[da]
                if l > gl:
                    events.append((l, w))
                if gl < h < gh:
                    events.append((h, w))
        if events:
            events.sort()
            half = 0.5 * sum(w for _, w in events)
            acc = 0.0
            i = 0
            k = len(events)
            while i < k:
                x = events[i][0]
                while i < k and events[i][0] == x:
                    acc += events[i][1]
                    i += 1
                if acc >= half:
                    return a, x
    return None


def _split(d, glo, ghi, buckets, sizes, faces, cut, m_cut, axis_of):
    """Children of the split at x_cut = m_cut.  Off-axis slab buckets are
    shared by reference; the cut-axis bucket and face boxes are walked.
    Returns two (buckets, sizes, faces, new_containing) tuples."""
    da = d + cut
    abit = 1 << cut
    gl = glo[cut]
    gh = ghi[cut]
    lpairs: list[float] = []
    rpairs: list[float] = []
    cl = 0
    cr = 0
    for chunk in buckets[cut]:
        for i in range(0, len(chunk), 2):
            s = chunk[i]
            e = chunk[i + 1]
            if s < m_cut:
                if e >= m_cut and s <= gl:
                    cl += 1
                else:
                    lpairs.append(s)
                    lpairs.append(e)
            if e > m_cut:
                if s <= m_cut and e >= gh:
                    cr += 1
                else:
                    rpairs.append(s)
                    rpairs.append(e)
    lfaces: list[tuple[tuple[float, ...], int, int]] = []
    rfaces: list[tuple[tuple[float, ...], int, int]] = []
    ldem: dict[int, list[float]] | None = None
    rdem: dict[int, list[float]] | None = None
    for rec in faces:
        row, mask, ns = rec
        l = row[cut]
        h = row[da]
        spanned = mask & abit
        if l < m_cut:
            if not spanned and l <= gl and h >= m_cut:
                # gains the cut dimension; a face box has ns <= d-2, so it
                # can demote to a slab but never to a full cover
                if ns + 1 == d - 1:
                    q = axis_of[mask | abit]
                    if ldem is None:
                        ldem = {}
                    dem = ldem.setdefault(q, [])
                    dem.append(row[q])
                    dem.append(row[d + q])
                else:
                    lfaces.append((row, mask | abit, ns + 1))
            else:
                lfaces.append(rec)
        if h > m_cut:
            if not spanned and h >= gh and l <= m_cut:
                if ns + 1 == d - 1:
                    q = axis_of[mask | abit]
                    if rdem is None:
                        rdem = {}
                    dem = rdem.setdefault(q, [])
                    dem.append(row[q])
                    dem.append(row[d + q])
                else:
                    rfaces.append((row, mask | abit, ns + 1))
            else:
                rfaces.append(rec)
    lbuckets = []
    lsizes = []
    rbuckets = []
    rsizes = []
    for a in range(d):
        if a == cut:
            chunks, size = ([lpairs] if lpairs else []), len(lpairs) // 2
        else:
            chunks, size = buckets[a], sizes[a]
        if ldem is not None and a in ldem:
            dem = ldem[a]
            chunks = chunks + [dem]
            size += len(dem) // 2
        lbuckets.append(chunks)
        lsizes.append(size)
        if a == cut:
            chunks, size = ([rpairs] if rpairs else []), len(rpairs) // 2
        else:
            chunks, size = buckets[a], sizes[a]
        if rdem is not None and a in rdem:
            dem = rdem[a]
            chunks = chunks + [dem]
            size += len(dem) // 2
        rbuckets.append(chunks)
        rsizes.append(size)
    return (lbuckets, lsizes, lfaces, cl), (rbuckets, rsizes, rfaces, cr)


def _node_rows(d, glo, ghi, buckets, faces):
    """Materialize the node's boxes (slabs synthesized at domain extent)."""
    rows = []
    for a in range(d):
        for chunk in buckets[a]:
            for i in range(0, len(chunk), 2):
                lo = list(glo)
                hi = list(ghi)
                lo[a] = chunk[i]
                hi[a] = chunk[i + 1]
                rows.append(lo + hi)
    for row, _mask, _ns in faces:
        rows.append(list(row))
    return rows

# exactly-k from subset intersections: E_k = sum_j (-1)^(j-k) C(j,k) S_j
_IE_COEFF = [
    [(-1) ** (j - k) * math.comb(j, k) for k in range(j + 1)]
    for j in range(SMALL_BASE_SIZE + 1)
]


def _small_dd(d, glo, ghi, buckets, faces):
    """Exact depth vector of at most SMALL_BASE_SIZE boxes by
    inclusion-exclusion over subset intersection volumes."""
    rows = _node_rows(d, glo, ghi, buckets, faces)
    m = len(rows)
    boxes = [None] * (1 << m)
    vols = [0.0] * (1 << m)
    dom = list(glo) + list(ghi)
    boxes[0] = dom
    vols[0] = _domain_volume(glo, ghi)
    out = [0.0] * (m + 1)
    for sub in range(1, 1 << m):
        i = (sub & -sub).bit_length() - 1
        rest = boxes[sub & (sub - 1)]
        if rest is None:
            continue
        row = rows[i]
        cur = [0.0] * (2 * d)
        vol = 1.0
        for k in range(d):
            l = row[k] if row[k] > rest[k] else rest[k]
            h = row[d + k] if row[d + k] < rest[d + k] else rest[d + k]
            if l >= h:
                vol = 0.0
                break
            cur[k] = l
            cur[d + k] = h
            vol *= h - l
        if vol == 0.0:
            continue
        boxes[sub] = cur
        vols[sub] = vol
        j = bin(sub).count("1")
        coeff = _IE_COEFF[j]
        for k in range(1, j + 1):
            out[k] += coeff[k] * vol
    covered = 0.0
    for k in range(1, m + 1):
        covered += out[k]
    out[0] = vols[0] - covered
    return np.array(out)


def _domain_volume(glo, ghi):
    v = 1.0
    for l, h in zip(glo, ghi):
        v *= h - l
    return v


def _dd_engine(d, dlo, dhi, boxes, n_total, weighted_cut=True):
    """Full SDC recursion; returns the raw accumulator of length n_total+1."""
    V = np.zeros(n_total + 1)
    axis_of, pow_table = _axis_tables(d)
    buckets, sizes, faces, c0 = _classify_root(d, dlo, dhi, boxes, axis_of)
    stack = [(list(dlo), list(dhi), buckets, sizes, faces, c0, 0)]
    while stack:
        glo, ghi, buckets, sizes, faces, c, axis = stack.pop()
        if not faces:
            local = _leaf_dd(d, glo, ghi, buckets, sizes)
            V[c:c + len(local)] += local
            continue
        cut = None
        if len(faces) + sum(sizes) > SMALL_BASE_SIZE:
            cut = _find_cut(d, glo, ghi, faces, axis, pow_table, weighted_cut)
        if cut is None:
            local = _small_dd(d, glo, ghi, buckets, faces)
            V[c:c + len(local)] += local
            continue
        a, m_cut = cut
        left, right = _split(d, glo, ghi, buckets, sizes, faces, a, m_cut, axis_of)
        nxt = (a + 1) % d
        rglo = list(glo)
        rglo[a] = m_cut
        lghi = list(ghi)
        lghi[a] = m_cut
        stack.append((rglo, ghi, right[0], right[1], right[2], c + right[3], nxt))
        stack.append((glo, lghi, left[0], left[1], left[2], c + left[3], nxt))
    return V


def _klee_engine(d, dlo, dhi, boxes, weighted_cut=True):
    """Klee-only recursion: domains under any containing box are counted
    whole and not refined further."""
    axis_of, pow_table = _axis_tables(d)
    buckets, sizes, faces, c0 = _classify_root(d, dlo, dhi, boxes, axis_of)
    if c0 >= 1:
        return _domain_volume(dlo, dhi)
    total = 0.0
    stack = [(list(dlo), list(dhi), buckets, sizes, faces, 0)]
    while stack:
        glo, ghi, buckets, sizes, faces, axis = stack.pop()
        if not faces:
            tot = 1.0
            unc = 1.0
            for a in range(d):
                extent = ghi[a] - glo[a]
                tot *= extent
                if sizes[a]:
                    unc *= float(_sweep(buckets[a], glo[a], ghi[a], sizes[a])[0])
                else:
                    unc *= extent
            total += tot - unc
            continue
        cut = None
        if len(faces) + sum(sizes) > SMALL_BASE_SIZE:
            cut = _find_cut(d, glo, ghi, faces, axis, pow_table, weighted_cut)
        if cut is None:
            local = _small_dd(d, glo, ghi, buckets, faces)
            total += float(local[1:].sum())
            continue
        a, m_cut = cut
        left, right = _split(d, glo, ghi, buckets, sizes, faces, a, m_cut, axis_of)
        nxt = (a + 1) % d
        for side, lo_a, hi_a in ((left, glo[a], m_cut), (right, m_cut, ghi[a])):
            sglo = list(glo)
            sghi = list(ghi)
            sglo[a] = lo_a
            sghi[a] = hi_a
            if side[3] >= 1:
                total += _domain_volume(sglo, sghi)
            else:
                stack.append((sglo, sghi, side[0], side[1], side[2], nxt))
    return total


def _maxdepth_engine(d, dlo, dhi, boxes, weighted_cut=True):
    axis_of, pow_table = _axis_tables(d)
    buckets, sizes, faces, c0 = _classify_root(d, dlo, dhi, boxes, axis_of)
    best = 0
    stack = [(list(dlo), list(dhi), buckets, sizes, faces, c0, 0)]
    while stack:
        glo, ghi, buckets, sizes, faces, c, axis = stack.pop()
        if c + len(faces) + sum(sizes) <= best:
            continue
        if not faces:
            depth = c
            for a in range(d):
                if sizes[a]:
                    depth += _max_positive_depth(_sweep(buckets[a], glo[a], ghi[a], sizes[a]))
            if depth > best:
                best = depth
            continue
        cut = None
        if len(faces) + sum(sizes) > SMALL_BASE_SIZE:
            cut = _find_cut(d, glo, ghi, faces, axis, pow_table, weighted_cut)
        if cut is None:
            local = _small_dd(d, glo, ghi, buckets, faces)
            eps = 1e-12 * float(local.sum())
            idx = np.nonzero(local[1:] > eps)[0]
            best = max(best, c + (int(idx[-1]) + 1 if len(idx) else 0))
            continue
        a, m_cut = cut
        left, right = _split(d, glo, ghi, buckets, sizes, faces, a, m_cut, axis_of)
        nxt = (a + 1) % d
        rglo = list(glo)
        rglo[a] = m_cut
        lghi = list(ghi)
        lghi[a] = m_cut
        stack.append((rglo, ghi, right[0], right[1], right[2], c + right[3], nxt))
        stack.append((glo, lghi, left[0], left[1], left[2], c + left[3], nxt))
    return best


def _instance_boxes(instance: Instance):
    return [(b.lo, b.hi) for b in instance.boxes]


def sdc_depth_distribution(instance: Instance, weighted_cut: bool = True) -> DepthDistribution:
    """Depth distribution of the instance inside its domain.

    ``weighted_cut`` switches the split heuristic between the weighted
    face median and the plain median; outputs agree either way, only the
    running time differs.
    """
    raw = _dd_engine(
        instance.dim,
        instance.domain.lo,
        instance.domain.hi,
        _instance_boxes(instance),
        instance.n,
        weighted_cut,
    )
    return _finish_dd(raw, volume(instance.domain))


def sdc_klee(instance: Instance, weighted_cut: bool = True) -> float:
    """Klee's measure via the SDC recursion with cheap slab base cases."""
    return _klee_engine(
        instance.dim,
        instance.domain.lo,
        instance.domain.hi,
        _instance_boxes(instance),
        weighted_cut,
    )


def sdc_max_depth(instance: Instance, weighted_cut: bool = True) -> int:
    """Maximum depth via the SDC recursion; the max combines over children."""
    return _maxdepth_engine(
        instance.dim,
        instance.domain.lo,
        instance.domain.hi,
        _instance_boxes(instance),
        weighted_cut,
    )


def simplify(boxes, gamma: DomainBox) -> tuple[list[AxisBox], int]:
    """Split boxes into those kept for recursion and the count containing
    the domain; boxes disjoint from the domain are dropped."""
    kept: list[AxisBox] = []
    count = 0
    for b in boxes:
        if clip(b, gamma) is None:
            continue
        if contains(b, gamma):
            count += 1
        else:
            kept.append(b)
    return kept, count


def choose_cut(boxes, gamma: DomainBox, axis: int = 0, weighted: bool = True) -> float:
    """Cut coordinate on ``axis``: the weighted median of the (d-2)-face
    coordinates strictly inside the domain, falling back to the unweighted
    median of distinct strict box endpoints when no face touches the axis.

    Raises ContractViolationError when neither exists (the caller must
    take a base case then).
    """
    d = gamma.dim
    axis_of, pow_table = _axis_tables(d)
    _buckets, _sizes, faces, _c = _classify_root(
        d, gamma.lo, gamma.hi, [(b.lo, b.hi) for b in boxes], axis_of
    )
    found = _find_cut(d, gamma.lo, gamma.hi, faces, axis, pow_table, weighted)
    if found is not None and found[0] == axis:
        return found[1]
    endpoints = sorted(
        {
            t
            for b in boxes
            for t in (b.lo[axis], b.hi[axis])
            if gamma.lo[axis] < t < gamma.hi[axis]
        }
    )
    if not endpoints:
        raise ContractViolationError(
            f"no face or endpoint strictly inside the domain on axis {axis}"
        )
    return endpoints[(len(endpoints) - 1) // 2]
