# SPDX-FileCopyrightText: 2026 aesc silicon
#
# SPDX-License-Identifier: AGPL-3.0-or-later

"""
Small positive instances: force-all, force-one and the butterfly.
"""
from popctl.library.gadgets.helper import GadgetBuilder
from popctl.library.model import Mdp


def force_all() -> Mdp:
    """
    Tokens are shuffled between `l` and `r` by `a` until all of them sit on
    `r`; `b` then moves them to the target and is daemonic everywhere else.
    """
    builder = GadgetBuilder()
    for name in ("i", "l", "r"):
        builder.state(name)
    a = builder.action("a")
    b = builder.action("b")
    for name in ("i", "l", "r"):
        builder.move(name, a, "l", "r")
    builder.angelic("r", b)
    return builder.build("i")


def force_one() -> Mdp:
    """
    `a` moves tokens between `i` and `m` until exactly one token sits on `m`.
    `b` sends it to `x` or `y` at random; `b` again (from `x`) or `c`
    (from `y`) reaches the target. Two tokens on `m` may be split and lost.
    """
    builder = GadgetBuilder()
    for name in ("i", "m", "x", "y"):
        builder.state(name)
    a, b, c = (builder.action(name) for name in "abc")
    builder.move("i", a, "i", "m")
    builder.move("m", a, "i", "m")
    builder.move("m", b, "x", "y")
    builder.angelic("x", b)
    builder.angelic("y", c)
    builder.ignore("i", b)
    builder.ignore("i", c)
    return builder.build("i")


def _butterfly_wing(builder: GadgetBuilder, side: str, other: str):
    """
    One side of the butterfly. A round is `side+ side1 (side2 | side3)`:
    `side` shuffles tokens between the hub and `x`, `side1` swaps the hubs
    and splits the tokens on `x` onto `p` and `q`, from where `side2`
    (from `p`) or `side3` (from `q`) brings them back to the hub.
    """
    hub, x, p, q = side.upper(), f"{side}x", f"{side}p", f"{side}q"
    spin = builder.action(side)
    swap = builder.action(f"{side}1")
    back_p = builder.action(f"{side}2")
    back_q = builder.action(f"{side}3")
    builder.move(hub, spin, hub, x)
    builder.move(x, spin, hub, x)
    builder.move(hub, swap, other.upper())
    builder.move(other.upper(), swap, hub)
    builder.move(x, swap, p, q)
    builder.move(p, back_p, hub)
    builder.move(q, back_q, hub)
    for action in (back_p, back_q):
        builder.ignore(hub, action)
    for action in (spin, back_p, back_q):
        builder.ignore(other.upper(), action)


def butterfly() -> Mdp:
    """
    Tokens are scattered onto `L` and `R` and must all end up on one side.

    A round on one side keeps at most one isolated token on that side and
    swaps the rest with the tokens of the other side, so picking the smaller
    side and isolating exactly one token shrinks it by one per round.
    `win_l` is angelic on the left states and daemonic on the right ones,
    `win_r` the other way round.
    """
    builder = GadgetBuilder()
    builder.state("init")
    left = [builder.state(name) for name in ("L", "lx", "lp", "lq")]
    right = [builder.state(name) for name in ("R", "rx", "rp", "rq")]
    scatter = builder.action("scatter")
    builder.move("init", scatter, "L", "R")
    _butterfly_wing(builder, "l", "r")
    _butterfly_wing(builder, "r", "l")
    win_l = builder.action("win_l")
    win_r = builder.action("win_r")
    for name in left:
        builder.angelic(name, win_l)
    for name in right:
        builder.angelic(name, win_r)
    return builder.build("init")
