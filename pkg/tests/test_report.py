# SPDX-FileCopyrightText: 2026 aesc silicon
#
# SPDX-License-Identifier: AGPL-3.0-or-later

"""Tests for run reports."""
import pytest

from popctl.library.report import STATUS_ERROR, RunReport, digest, format_value


@pytest.mark.parametrize("value, text", [
    (None, "-"),
    (True, "true"),
    (False, "false"),
    (2.5, "2.5"),
    (3.0, "3"),
    (["a", 1, True], "a 1 true"),
    (7, "7"),
])
def test_format_value(value, text):
    assert format_value(value) == text


def test_digest():
    assert digest(b"") == "e3b0c44298fc1c14"
    assert len(digest(b"states: s")) == 16


def test_render_order():
    report = RunReport("oracle", digest="0123456789abcdef", answer=True, seed=4)
    report.set("tokens", 2)
    report.set("winning", 3)
    assert report.render() == (
        "command: oracle\n"
        "input: 0123456789abcdef\n"
        "status: ok\n"
        "answer: true\n"
        "seed: 4\n"
        "tokens: 2\n"
        "winning: 3\n"
    )


def test_error_report_has_no_answer_line():
    report = RunReport("decide", status=STATUS_ERROR)
    report.set("error", "line 2: bad")
    assert report.render() == "command: decide\nstatus: error\nerror: line 2: bad\n"


def test_timings_only_on_request():
    report = RunReport("flow", answer=False)
    with report.phase("flow"):
        pass
    with report.phase("flow"):
        pass
    assert "flow" in report.timings
    assert "time." not in report.render()
    assert report.render(timings=True).splitlines()[-1].startswith("time.flow: ")


def test_appendix_follows_the_key_lines():
    report = RunReport("semigroup", answer=True, appendix="G 1w/0i\n")
    assert report.render().endswith("answer: true\nG 1w/0i\n")
