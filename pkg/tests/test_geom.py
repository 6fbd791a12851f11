import itertools
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boxdepth import (
    FULL_COVER,
    AxisBox,
    ContractViolationError,
    DomainBox,
    Instance,
    ParseError,
    UnknownKindError,
    clip,
    contains,
    generate,
    intersect,
    read_instance,
    slab_axis,
    volume,
    write_instance,
)
from boxdepth.geom import GENERATOR_KINDS

UNIT2 = DomainBox((0.0, 0.0), (1.0, 1.0))


def box(lo, hi):
    return AxisBox(tuple(lo), tuple(hi))


def test_volume_unit_cube():
    assert volume(box((0, 0, 0), (1, 1, 1))) == 1.0


def test_volume_degenerate_is_zero():
    assert volume(box((0.3, 0.0), (0.3, 1.0))) == 0.0


def test_volume_product_of_extents():
    assert volume(box((0, 0), (2, 0.5))) == pytest.approx(1.0)


def test_intersect_disjoint():
    assert intersect(box((0, 0), (1, 1)), box((2, 2), (3, 3))) is None


def test_intersect_boundary_touch_is_degenerate():
    got = intersect(box((0, 0), (1, 1)), box((1, 1), (2, 2)))
    assert got == box((1, 1), (1, 1))
    assert volume(got) == 0.0


def test_intersect_overlap():
    assert intersect(box((0, 0), (2, 2)), box((1, 1), (3, 3))) == box((1, 1), (2, 2))


def test_intersect_dimension_mismatch():
    with pytest.raises(ContractViolationError):
        intersect(box((0,), (1,)), box((0, 0), (1, 1)))


def test_contains_examples():
    assert contains(box((0, 0), (3, 3)), box((1, 1), (2, 2)))
    b = box((0.1, 0.2), (0.9, 0.8))
    assert contains(b, b)
    assert not contains(box((0, 0), (1, 1)), box((0.5, 0), (1.5, 1)))


def test_clip_examples():
    assert clip(box((2, 2), (3, 3)), UNIT2) is None
    assert clip(box((-1, -1), (2, 2)), UNIT2) == box((0, 0), (1, 1))
    assert clip(box((-1, 0), (0.5, 1)), UNIT2) == box((0, 0), (0.5, 1))


def test_slab_axis_single_dimension_constrained():
    assert slab_axis(box((0.2, -1), (0.6, 2)), UNIT2) == 0


def test_slab_axis_full_cover_sentinel():
    assert slab_axis(box((-1, -1), (2, 2)), UNIT2) is FULL_COVER
    assert slab_axis(box((0, 0), (1, 1)), UNIT2) is FULL_COVER


def test_slab_axis_corner_box_is_not_a_slab():
    assert slab_axis(box((0.2, 0.2), (0.6, 0.6)), UNIT2) is None


def test_slab_axis_exhaustive_small_grid():
    # every box with endpoints on a small grid, against the definition
    coords = [-0.5, 0.0, 0.25, 0.75, 1.0, 1.5]
    pairs = [(l, h) for l in coords for h in coords if l <= h]
    for (xl, xh), (yl, yh) in itertools.product(pairs, pairs):
        b = box((xl, yl), (xh, yh))
        non_spanning = [
            k
            for k, (l, h, gl, gh) in enumerate(
                zip(b.lo, b.hi, UNIT2.lo, UNIT2.hi)
            )
            if not (l <= gl and h >= gh)
        ]
        got = slab_axis(b, UNIT2)
        if not non_spanning:
            assert got is FULL_COVER
        elif len(non_spanning) == 1:
            assert got == non_spanning[0]
        else:
            assert got is None


def test_axis_box_validation():
    with pytest.raises(ContractViolationError):
        AxisBox((1.0,), (0.0,))
    with pytest.raises(ContractViolationError):
        AxisBox((0.0, 0.0), (1.0,))
    with pytest.raises(ContractViolationError):
        AxisBox((float("nan"),), (1.0,))
    with pytest.raises(ContractViolationError):
        DomainBox((0.0, 0.0), (1.0, 0.0))


def test_instance_validation():
    with pytest.raises(ContractViolationError):
        Instance(2, UNIT2, (box((0,), (1,)),))
    with pytest.raises(ContractViolationError):
        Instance(1, UNIT2, ())


coordinate = st.floats(-2.0, 2.0, allow_nan=False, width=32)


@st.composite
def box_pairs(draw):
    d = draw(st.integers(1, 3))
    out = []
    for _ in range(2):
        lo, hi = [], []
        for _ in range(d):
            a, b = draw(coordinate), draw(coordinate)
            lo.append(min(a, b))
            hi.append(max(a, b))
        out.append(AxisBox(tuple(lo), tuple(hi)))
    return out


@settings(max_examples=80, deadline=None)
@given(box_pairs())
def test_intersection_volume_bounded(pair):
    a, b = pair
    got = intersect(a, b)
    if got is not None:
        assert volume(got) <= min(volume(a), volume(b)) + 1e-12


@settings(max_examples=80, deadline=None)
@given(box_pairs())
def test_clip_lies_inside_domain(pair):
    a, _ = pair
    gamma = DomainBox((-1.0,) * a.dim, (1.0,) * a.dim)
    got = clip(a, gamma)
    if got is not None:
        assert contains(gamma, got)


@pytest.mark.parametrize("kind", GENERATOR_KINDS)
def test_generate_deterministic(kind):
    a = generate(kind, 9, 3, 42)
    b = generate(kind, 9, 3, 42)
    assert write_instance(a) == write_instance(b)
    assert write_instance(a) != write_instance(generate(kind, 9, 3, 43))


def test_generate_empty():
    inst = generate("uniform", 0, 2, 5)
    assert inst.boxes == ()
    assert inst.domain == DomainBox((0.0, 0.0), (1.0, 1.0))


def test_generate_slabs_are_slabs():
    inst = generate("slabs", 25, 3, 7)
    for b in inst.boxes:
        assert isinstance(slab_axis(b, inst.domain), int)


def test_generate_cubes_have_equal_sides():
    inst = generate("cubes", 10, 3, 1)
    for b in inst.boxes:
        sides = [h - l for l, h in zip(b.lo, b.hi)]
        assert max(sides) - min(sides) < 1e-12


def test_generate_chain_is_nested():
    inst = generate("containing-chain", 8, 2, 3)
    for outer, inner in zip(inst.boxes, inst.boxes[1:]):
        assert contains(outer, inner)


def test_generate_unknown_kind():
    with pytest.raises(UnknownKindError):
        generate("spheres", 3, 2, 0)


def test_generate_validates_arguments():
    with pytest.raises(ContractViolationError):
        generate("uniform", -1, 2, 0)
    with pytest.raises(ContractViolationError):
        generate("uniform", 3, 0, 0)


def test_read_minimal_document():
    inst = read_instance(b'{"dim":1,"domain":{"lo":[0],"hi":[1]},"boxes":[]}')
    assert inst.dim == 1 and inst.n == 0


def test_round_trip_identity():
    rng = random.Random(11)
    for kind in GENERATOR_KINDS:
        inst = generate(kind, 7, 3, rng.randrange(1000))
        assert read_instance(write_instance(inst)) == inst


def test_parse_error_names_field():
    bad = b'{"dim":2,"domain":{"lo":[0,0],"hi":[1,1]},"boxes":[{"lo":[0,0,0],"hi":[1,1,1]}]}'
    with pytest.raises(ParseError) as err:
        read_instance(bad)
    assert "boxes[0].lo" in str(err.value)


def test_parse_error_lo_above_hi():
    bad = b'{"dim":1,"domain":{"lo":[0],"hi":[1]},"boxes":[{"lo":[0.9],"hi":[0.1]}]}'
    with pytest.raises(ParseError) as err:
        read_instance(bad)
    assert "boxes[0].lo[0]" in str(err.value)


@pytest.mark.parametrize(
    "doc,field",
    [
        (b"not json", "document"),
        (b'{"dim":0,"domain":{"lo":[],"hi":[]},"boxes":[]}', "dim"),
        (b'{"dim":1,"domain":{"lo":[0],"hi":[0]},"boxes":[]}', "domain.hi[0]"),
        (b'{"dim":1,"domain":{"lo":[0],"hi":[1]}}', "boxes"),
        (b'{"dim":2,"domain":{"lo":[0],"hi":[1,1]},"boxes":[]}', "domain.lo"),
    ],
)
def test_parse_errors(doc, field):
    with pytest.raises(ParseError) as err:
        read_instance(doc)
    assert field in str(err.value)
