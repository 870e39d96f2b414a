# SPDX-FileCopyrightText: 2026 aesc silicon
#
# SPDX-License-Identifier: AGPL-3.0-or-later

"""Tests for flows, cuts and pipelines."""
import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import flows
from popctl.library.model import OMEGA
from popctl.library.semiring import (
    TROPICAL_INFINITY,
    TROPICAL_OMEGA,
    Capacity,
    CutMatrix,
    FlowMatrix,
    Pipeline,
    Sval,
    TropicalCut,
    cut_from_flow,
    cut_is_idempotent,
    cut_iterate,
    cut_product,
    cut_unstable_by_growth,
    flow_dom,
    flow_from_cut,
    flow_identity,
    flow_im,
    flow_is_idempotent,
    flow_iterate,
    flow_product,
    flow_unstable,
    flow_zero,
    format_tropical,
    pipeline_capacity,
    pipeline_cut,
    tropical_add,
    tropical_power
)


W, I = Sval.OMEGA, Sval.INFTY


def power(flow, exponent):
    result = flow
    for _ in range(exponent - 1):
        result = flow_product(result, flow)
    return result


def test_text_form():
    flow = FlowMatrix.parse("1w\n0i\n")
    assert flow.entry(0, 1) == Sval.OMEGA
    assert flow.entry(1, 1) == Sval.INFTY
    assert flow.dump() == "1w\n0i"
    assert str(Sval.parse("w")) == "w"


def test_layers_must_nest():
    with pytest.raises(ValueError):
        FlowMatrix(1, ((0,), (1,), (0,)))
    with pytest.raises(ValueError):
        FlowMatrix.from_entries([[1, 0]])


def test_product():
    f = FlowMatrix.from_entries([[1, I], [0, 0]])
    g = FlowMatrix.from_entries([[0, 0], [W, 1]])
    assert (f * g).entries() == ((W, Sval.ONE), (Sval.ZERO, Sval.ZERO))
    with pytest.raises(ValueError):
        flow_product(f, flow_identity(3))


@given(flows())
def test_identity_and_zero(flow):
    identity = flow_identity(flow.dim)
    assert flow * identity == flow
    assert identity * flow == flow
    assert flow * flow_zero(flow.dim) == flow_zero(flow.dim)


@given(st.integers(min_value=1, max_value=4).flatmap(
    lambda dim: st.tuples(flows(dim=dim), flows(dim=dim), flows(dim=dim))))
def test_product_is_associative(triple):
    f, g, h = triple
    assert (f * g) * h == f * (g * h)


def test_domain_and_image():
    flow = FlowMatrix.from_entries([[1, 1], [0, I]])
    assert flow_dom(flow) == (OMEGA, OMEGA)
    assert flow_im(flow) == (1, OMEGA)
    single = FlowMatrix.from_entries([[1, 0], [0, 0]])
    assert flow_dom(single) == (1, 0)
    assert flow_im(single) == (1, 0)


def test_unstable_entry_is_iterated():
    e = FlowMatrix.from_entries([[W, 1], [0, W]])
    assert flow_is_idempotent(e)
    assert flow_unstable(e, 0, 1)
    assert flow_iterate(e).entries() == ((W, W), (Sval.ZERO, W))


def test_diagonal_infinity_makes_ones_unstable():
    e = FlowMatrix.from_entries([[I, 1], [0, I]])
    assert flow_is_idempotent(e)
    assert flow_unstable(e, 0, 1)


def test_stable_entry_survives_iteration():
    e = FlowMatrix.from_entries([[1, 1], [0, 0]])
    assert flow_is_idempotent(e)
    assert not flow_unstable(e, 0, 0)
    assert flow_iterate(e) == e


def test_iteration_preconditions():
    not_idempotent = FlowMatrix.from_entries([[0, 1], [0, 0]])
    with pytest.raises(ValueError):
        flow_iterate(not_idempotent)
    with pytest.raises(ValueError):
        flow_unstable(flow_identity(2), 0, 1)


@settings(max_examples=50)
@given(flows(max_dim=4))
def test_iteration_keeps_idempotents(flow):
    # layers multiply independently, so the 24th power is idempotent
    e = power(flow, 24)
    assert flow_is_idempotent(e)
    iterated = flow_iterate(e)
    assert flow_is_idempotent(iterated)
    for s in range(e.dim):
        for t in range(e.dim):
            before, after = e.entry(s, t), iterated.entry(s, t)
            assert after == before or (before == Sval.ONE and after == Sval.OMEGA)


def test_cut_of_a_single_one():
    cut = cut_from_flow(FlowMatrix.from_entries([[1, 0], [0, 0]]))
    assert cut(0b01, 0b00) == Sval.ONE
    assert cut(0b01, 0b01) == Sval.ZERO
    assert cut(0b01, 0b10) == Sval.ONE
    assert cut(0b10, 0b00) == Sval.ZERO
    assert cut(0b00, 0b00) == Sval.ZERO


@given(flows())
def test_flow_of_cut_inverts_cut_of_flow(flow):
    assert flow_from_cut(cut_from_flow(flow)) == flow


@given(st.integers(min_value=1, max_value=3).flatmap(
    lambda dim: st.tuples(flows(dim=dim), flows(dim=dim))))
def test_cut_of_product_is_product_of_cuts(pair):
    f, g = pair
    assert cut_from_flow(f * g) == cut_product(cut_from_flow(f), cut_from_flow(g))


def test_cut_cap():
    with pytest.raises(ValueError):
        cut_from_flow(flow_identity(5))
    assert cut_from_flow(flow_identity(5), cap=5).states == 5


def test_cut_kinds_do_not_mix():
    cut = cut_from_flow(flow_identity(2))
    with pytest.raises(ValueError):
        cut_product(cut, TropicalCut.from_cut(cut))


def test_cut_iteration_without_ones():
    cut = cut_from_flow(flow_identity(2))
    assert isinstance(cut, CutMatrix)
    assert cut_iterate(cut) == cut


def test_tropical_arithmetic():
    assert tropical_add(1, 2) == 3
    assert tropical_add(TROPICAL_OMEGA, 5) == TROPICAL_OMEGA
    assert tropical_add(TROPICAL_OMEGA, TROPICAL_INFINITY) == TROPICAL_INFINITY
    assert [format_tropical(v) for v in (3, TROPICAL_OMEGA, TROPICAL_INFINITY)] == ["3", "w", "i"]


def test_pipeline_rejects_omega():
    with pytest.raises(ValueError):
        Pipeline((FlowMatrix.from_entries([[W]]),))
    with pytest.raises(ValueError):
        Pipeline(())
    with pytest.raises(ValueError):
        Pipeline((flow_identity(1), flow_identity(2)))


def test_pipeline_cut_of_identity():
    cut = pipeline_cut(Pipeline((flow_identity(2),)))
    assert cut(0b01, 0b01) == 0
    assert cut(0b01, 0b00) == TROPICAL_INFINITY


def test_pipeline_capacity():
    split = FlowMatrix.from_entries([[1, 1], [0, 0]])
    merge = FlowMatrix.from_entries([[0, 1], [0, 1]])
    assert pipeline_capacity(Pipeline((split,)), [0], [1], cap=8) == Capacity(1)
    assert pipeline_capacity(Pipeline((split, merge)), [0], [1], cap=8) == Capacity(2)
    unbounded = pipeline_capacity(Pipeline((flow_identity(2),)), [0], [0], cap=8)
    assert unbounded == Capacity(8, saturated=True)
    assert str(unbounded) == ">=8"


ACTION_VALUES = (Sval.ZERO, Sval.ONE, Sval.INFTY)


def pipelines(max_dim=3, max_length=3):
    return st.integers(min_value=1, max_value=max_dim).flatmap(
        lambda dim: st.lists(flows(dim=dim, values=ACTION_VALUES),
                             min_size=1, max_size=max_length).map(
            lambda word: Pipeline(tuple(word))))


@settings(max_examples=50, deadline=None)
@given(flows(max_dim=3))
def test_cut_of_iteration_is_iteration_of_cut(flow):
    e = power(flow, 24)
    cut = cut_from_flow(e)
    assert cut_is_idempotent(cut)
    assert cut_iterate(cut) == cut_from_flow(flow_iterate(e))


@settings(max_examples=30, deadline=None)
@given(flows(max_dim=3))
def test_unstable_ones_grow_under_tropical_powers(flow):
    cut = cut_from_flow(power(flow, 24))
    iterated = cut_iterate(cut)
    size = 1 << cut.states
    for source, target in itertools.product(range(size), repeat=2):
        if cut(source, target) == Sval.ONE:
            unstable = iterated(source, target) == Sval.OMEGA
            assert cut_unstable_by_growth(cut, source, target) == unstable


@given(flows(max_dim=3), st.integers(min_value=1, max_value=6))
def test_tropical_power(flow, exponent):
    base = TropicalCut.from_cut(cut_from_flow(flow))
    expected = base
    for _ in range(exponent - 1):
        expected = cut_product(expected, base)
    assert tropical_power(base, exponent) == expected
    with pytest.raises(ValueError):
        tropical_power(base, 0)


@settings(max_examples=60, deadline=None)
@given(pipelines(), st.data())
def test_pipeline_cut_bounds_single_source_capacity(pipeline, data):
    """A finite cut D bounds the capacity C by D <= C <= D·|S|²."""
    dim = pipeline.dim
    source = data.draw(st.integers(min_value=0, max_value=dim - 1))
    finals = data.draw(st.sets(st.integers(min_value=0, max_value=dim - 1), min_size=1))
    cut = pipeline_cut(pipeline)
    bound = cut(1 << source, cut.full ^ sum(1 << t for t in finals))
    capacity = pipeline_capacity(pipeline, [source], finals, cap=64)
    if bound == TROPICAL_INFINITY:
        assert capacity.saturated
    else:
        assert not capacity.saturated
        assert bound <= capacity.value <= bound * dim * dim


@settings(max_examples=60, deadline=None)
@given(pipelines())
def test_pipeline_cut_monotonicity_and_subadditivity(pipeline):
    # the second argument is the side kept with the sources: shrinking it
    # disconnects more states and can only cost more
    cut = pipeline_cut(pipeline)
    size = 1 << pipeline.dim
    for sources, kept, other in itertools.product(range(size), repeat=3):
        if kept & other == kept:
            assert cut(sources, kept) >= cut(sources, other)
        if sources & other == sources:
            assert cut(sources, kept) <= cut(other, kept)
        joint = cut(sources, kept & other)
        assert joint <= tropical_add(cut(sources, kept), cut(sources, other))
        assert cut(sources, kept | other) <= min(cut(sources, kept), cut(sources, other))


def test_capacity_can_exceed_the_cut_times_the_states():
    # one ∞ fan-out followed by nine 1-edges into the targets
    fan = FlowMatrix.from_entries([[I, I, I], [0, 0, 0], [0, 0, 0]])
    merge = FlowMatrix.from_entries([[1, 1, 1]] * 3)
    pipeline = Pipeline((fan, merge))
    cut = pipeline_cut(pipeline)
    assert cut(0b001, 0b000) == 1
    assert pipeline_capacity(pipeline, [0], [0, 1, 2], cap=64) == Capacity(9)
