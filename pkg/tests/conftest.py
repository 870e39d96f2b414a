# SPDX-FileCopyrightText: 2026 aesc silicon
#
# SPDX-License-Identifier: AGPL-3.0-or-later

import pytest

from helpers import LOOP, SIMPLE, TRAP
from popctl.library.common import activate
from popctl.library.model import parse_mdp


@pytest.fixture(autouse=True)
def shipped_defaults():
    """Every test starts and ends with the shipped defaults."""
    activate(None)
    yield
    activate(None)


@pytest.fixture
def simple():
    return parse_mdp(SIMPLE)


@pytest.fixture
def trap():
    return parse_mdp(TRAP)


@pytest.fixture
def loop():
    return parse_mdp(LOOP)
