# SPDX-FileCopyrightText: 2026 aesc silicon
#
# SPDX-License-Identifier: AGPL-3.0-or-later

"""Tests for the sequential flow problem."""
import logging

import pytest
from hypothesis import given, settings

from helpers import LOOP, SIMPLE, TRAP, counted_flow_instances
from popctl.library.common import BudgetExceededError, InputError
from popctl.library.flowproblem import (
    bounded_path_oracle,
    copied_mdp,
    parse_flow_instance,
    path_exists,
    reduce_to_constant_one,
    reduced_initial,
    render_flow_instance,
    solve_sequential_flow
)
from popctl.library.model import OMEGA


def instance_text(mdp, w0, commits, targets):
    lines = [f"w0: {w0}"]
    lines += [f"commit: {commit}" for commit in commits]
    lines += [f"target: {target}" for target in targets]
    return mdp + "\n".join(lines) + "\n"


REACH = instance_text(SIMPLE, "w 0", ["w w a"], ["0 w a"])
STUCK = instance_text(LOOP, "w 0", ["w w a"], ["0 w a"])
COUNTED = instance_text(SIMPLE, "2 0", ["2 w a"], ["0 w a"])
SINK = instance_text(TRAP, "w 0 0", ["w w w a"], ["0 w 0 a"])

# b merges both tokens into s, where a only admits one of them
MERGE = """\
states: s f
actions: a b
init: s
final: f
trans: s a -> f
trans: s b -> s
trans: f a -> f
trans: f b -> s
"""
COLLIDE = instance_text(MERGE, "1 1", ["1 1 b", "w 0 b", "1 0 a", "0 w a"], ["0 w a"])


def test_parse_instance():
    instance = parse_flow_instance(REACH)
    assert instance.initial == (OMEGA, 0)
    assert len(instance.arena) == 1
    assert instance.target_states() == (1,)
    assert instance.largest_constant == 0
    assert parse_flow_instance(render_flow_instance(instance)) == instance


def test_dummy_commits_extend_the_mdp():
    instance = parse_flow_instance(instance_text(SIMPLE, "w 0", ["w w a"], ["0 w __dummy"]))
    assert instance.mdp.dummy == 1


@pytest.mark.parametrize("text", [
    SIMPLE + "commit: w w a\n",
    instance_text(SIMPLE, "w", ["w w a"], []),
    instance_text(SIMPLE, "w 0", ["1 1 a"], []),
    instance_text(SIMPLE, "w 0", ["w w b"], []),
])
def test_malformed_instance(text):
    with pytest.raises(InputError):
        parse_flow_instance(text)


def test_targets_outside_the_arena_are_dropped(caplog):
    with caplog.at_level(logging.WARNING):
        instance = parse_flow_instance(instance_text(SIMPLE, "1 0", ["1 1 a"], ["0 w a"]))
    assert len(instance.targets) == 0
    assert "dropping 1 target commits" in caplog.text


@pytest.mark.parametrize("text, answer", [
    (REACH, True),
    (STUCK, False),
    (COUNTED, True),
    (SINK, True),
])
@pytest.mark.parametrize("shortcuts", [True, False])
def test_solve(text, answer, shortcuts):
    assert solve_sequential_flow(parse_flow_instance(text), shortcuts=shortcuts) is answer


def test_initial_inside_targets():
    instance = parse_flow_instance(instance_text(LOOP, "0 w", ["w w a"], ["0 w a"]))
    assert solve_sequential_flow(instance)


def test_cached_semigroups_give_the_same_answer():
    instance = parse_flow_instance(REACH)
    cache = {}
    assert solve_sequential_flow(instance, shortcuts=False, cache=cache)
    assert 0 in cache
    assert solve_sequential_flow(instance, shortcuts=False, cache=cache)


@pytest.mark.parametrize("text", [REACH, STUCK, COUNTED, SINK])
def test_positive_answers_agree_with_search(text):
    instance = parse_flow_instance(text)
    pairs = bounded_path_oracle(instance, 3)
    assert [tokens for tokens, _ in pairs] == [0, 1, 2, 3]
    if solve_sequential_flow(instance):
        assert all(feasible for _, feasible in pairs)
    else:
        assert not all(feasible for _, feasible in pairs)


def test_stuck_oracle():
    pairs = bounded_path_oracle(parse_flow_instance(STUCK), 2)
    assert pairs == [(0, True), (1, False), (2, False)]


def test_path_search():
    instance = parse_flow_instance(REACH)
    assert path_exists(instance, (3, 0))
    assert path_exists(instance, (0, 2))
    assert not path_exists(parse_flow_instance(STUCK), (1, 0))


def test_copied_mdp(simple):
    copies = copied_mdp(simple, 2)
    assert copies.states == ("s@1", "f@1", "s@2", "f@2")
    assert copies.initial == 2
    assert copies.finals == frozenset({1, 3})
    assert copies.successors(2, 0) == (2, 3)


def test_reduction_to_constant_one():
    instance = parse_flow_instance(COUNTED)
    assert instance.largest_constant == 2
    reduced = reduce_to_constant_one(instance)
    assert reduced.mdp.num_states == 6
    assert reduced.largest_constant <= 1
    assert reduced.initial == reduced_initial(instance.initial) == (1, 0, 1, 0, 0, 0)
    assert reduce_to_constant_one(parse_flow_instance(REACH)) == parse_flow_instance(REACH)


def test_reduced_initial_keeps_omega_on_the_last_copy():
    assert reduced_initial((1, OMEGA)) == (1, 0, 0, OMEGA)


def test_reduction_cap():
    with pytest.raises(BudgetExceededError):
        reduce_to_constant_one(parse_flow_instance(COUNTED), cap=1)


def test_counted_tokens_get_private_copies():
    instance = parse_flow_instance(COLLIDE)
    assert instance.largest_constant == 1
    assert instance.needs_reduction
    reduced = reduce_to_constant_one(instance)
    assert reduced.private and not reduced.needs_reduction
    assert reduced.initial == (1, 0, 0, 1, 0, 0)
    assert not path_exists(instance, instance.initial)
    for prune in (False, True):
        assert not solve_sequential_flow(instance, shortcuts=False, prune=prune)


@settings(max_examples=25, deadline=None)
@given(counted_flow_instances(max_tokens=2))
def test_reduction_agrees_with_explicit_search(instance):
    expected = path_exists(instance, instance.initial)
    assert bounded_path_oracle(instance, 0) == [(0, expected)]
    reduced = reduce_to_constant_one(instance)
    assert reduced.largest_constant <= 1
    assert not reduced.needs_reduction
    assert path_exists(reduced, reduced.initial) is expected
    assert solve_sequential_flow(instance, shortcuts=False, prune=True) is expected
    assert solve_sequential_flow(reduced, shortcuts=False, prune=True) is expected
