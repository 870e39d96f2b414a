# SPDX-FileCopyrightText: 2026 aesc silicon
#
# SPDX-License-Identifier: AGPL-3.0-or-later

"""
Bottlenecks and chains of bottlenecks.

A bottleneck of capacity k lets the controller move k tokens at once from
its start to its target, but not more. Capacity 1 is a random split onto
`x`/`y` followed by two actions that are each safe on one side only.
Capacity 2k splits the tokens onto `l`/`r` and sends each half through its
own capacity-k copy (`red`, `blue`) into the centre `c`.

The chain joins K capacity-1 members. Member n isolates one token from
`q<n>` (as in the force-one gadget) and passes it through a capacity-1
bottleneck into `q<n+1>`. The leaky chain adds a capacity-K recovery
bottleneck fed by `e1` from every `c<n>` and leading back to `q1`.
"""
from typing import Optional

from popctl.library.gadgets.helper import HEAVEN, GadgetBuilder, Scope, is_power_of_two
from popctl.library.model import Mdp


# pylint: disable=too-many-arguments, too-many-positional-arguments
def add_bottleneck(builder: GadgetBuilder, capacity: int, start: str, target: str,
                   prefix: str = "", scope: Scope = ()):
    """
    Wire a bottleneck from `start` to `target` into `builder`.

    Args:
        builder (GadgetBuilder): Builder to extend; `start` and `target` must exist.
        capacity (int): Power of two.
        start (str): Entry state, owned by the enclosing scope.
        target (str): Exit state, owned by the enclosing scope.
        prefix (str): Prefix of the fresh state and action names.
        scope (Scope): Scope of the fresh states and actions.

    Raises:
        ValueError: If `capacity` is not a power of two.
    """
    if not is_power_of_two(capacity):
        raise ValueError(f"bottleneck capacity must be a power of two, got {capacity}")
    scope = tuple(scope)
    if capacity == 1:
        x = builder.state(f"{prefix}x", scope)
        y = builder.state(f"{prefix}y", scope)
        b, c, d = (builder.action(f"{prefix}{name}", scope) for name in "bcd")
        builder.move(start, b, x, y)
        builder.move(x, c, target)
        builder.move(y, d, target)
        return
    left, right, centre = (builder.state(f"{prefix}{name}", scope) for name in "lrc")
    a, b, e = (builder.action(f"{prefix}{name}", scope) for name in "abe")
    builder.move(start, b, left, right)
    builder.move(left, a, left, right)
    builder.move(right, a, left, right)
    builder.move(centre, e, target)
    for colour, entry in (("red", left), ("blue", right)):
        add_bottleneck(builder, capacity // 2, entry, centre,
                       prefix=f"{prefix}{colour}.", scope=scope + (colour,))


def bottleneck(capacity: int) -> Mdp:
    """Standalone bottleneck from `s` into the target."""
    builder = GadgetBuilder()
    builder.state("s")
    add_bottleneck(builder, capacity, "s", HEAVEN)
    return builder.build("s")


_MEMBER = ("a", "b", "u", "v", "e")


def _add_chain(builder: GadgetBuilder, length: int, leak: Optional[str] = None):
    if length < 1:
        raise ValueError(f"chain length must be at least 1, got {length}")
    scope = ("chain",)
    for n in range(1, length + 1):
        for role in ("q", "s", "x", "y", "c"):
            builder.state(f"{role}{n}", scope)
    for n in range(1, length + 1):
        for name in _MEMBER:
            builder.action(f"{name}{n}", scope)

    def exit_of(n):
        return HEAVEN if n == length else f"q{n + 1}"

    for n in range(1, length + 1):
        q, s, x, y, c = (f"{role}{n}" for role in ("q", "s", "x", "y", "c"))
        a, b, u, v, e = (f"{name}{n}" for name in _MEMBER)
        builder.move(q, a, q, s)
        builder.move(s, a, q, s)
        builder.move(s, b, x, y)
        builder.move(x, u, c)
        builder.move(y, v, c)
        if leak is not None and n == 1:
            builder.move(c, e, exit_of(n), leak)
        else:
            builder.move(c, e, exit_of(n))
        for action in (b, u, v, e):
            builder.ignore(q, action)
        for action in (u, v):
            builder.ignore(c, action)
        # lower members are ignored, higher ones only block on b and e
        for state in (q, s, x, y, c):
            for m in range(1, length + 1):
                if m == n:
                    continue
                for name in _MEMBER:
                    if m > n and name in ("b", "e"):
                        continue
                    if leak is not None and state == c and m == 1 and name == "e":
                        builder.move(c, "e1", c, leak)
                    else:
                        builder.ignore(state, f"{name}{m}")


def chain(length: int) -> Mdp:
    """Chain of `length` capacity-1 members from `q1` into the target."""
    builder = GadgetBuilder()
    _add_chain(builder, length)
    return builder.build("q1")


def leaky_chain(length: int) -> Mdp:
    """
    Chain whose `e1` also leaks tokens from every `c<n>` into a capacity
    `length` recovery bottleneck leading back to `q1`.

    Raises:
        ValueError: If `length` is not a power of two.
    """
    if not is_power_of_two(length):
        raise ValueError(f"leaky chain length must be a power of two, got {length}")
    builder = GadgetBuilder()
    builder.state("rec")
    _add_chain(builder, length, leak="rec")
    add_bottleneck(builder, length, "rec", "q1", prefix="rec.", scope=("recovery",))
    return builder.build("q1")
