# SPDX-FileCopyrightText: 2026 aesc silicon
#
# SPDX-License-Identifier: AGPL-3.0-or-later

"""
Run reports of the command-line interface.

A report is a list of `key: value` lines. Everything but the timings is
derived from the inputs and the seed, so repeated runs print the same text.
"""
import hashlib
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Dict, Optional


STATUS_OK = "ok"
STATUS_INCONCLUSIVE = "inconclusive"
STATUS_ERROR = "error"


def digest(data: bytes) -> str:
    """Short SHA-256 digest of an input file."""
    return hashlib.sha256(data).hexdigest()[:16]


def format_value(value) -> str:
    """Text form of a report value."""
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:g}"
    if isinstance(value, (list, tuple)):
        return " ".join(format_value(v) for v in value)
    return str(value)


# pylint: disable=too-many-instance-attributes
@dataclass
class RunReport:
    """
    Outcome of one CLI invocation.

    Attributes:
        command (str): Subcommand name.
        digest (str | None): Digest of the main input file.
        status (str): "ok", "inconclusive" or "error".
        answer (bool | None): Computed answer, if any.
        details (Dict[str, object]): Further values in insertion order.
        timings (Dict[str, float]): Seconds per phase.
        seed (int | None): Seed used, if the command is randomized.
        appendix (str): Free text printed after the key lines.
    """
    command: str
    digest: Optional[str] = None
    status: str = STATUS_OK
    answer: Optional[bool] = None
    details: Dict[str, object] = field(default_factory=dict)
    timings: Dict[str, float] = field(default_factory=dict)
    seed: Optional[int] = None
    appendix: str = ""

    def set(self, key: str, value):
        """Add or replace a detail line."""
        self.details[key] = value

    @contextmanager
    def phase(self, name: str):
        """Time the enclosed block under `name`."""
        begin = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = self.timings.get(name, 0.0) + time.perf_counter() - begin

    def render(self, timings: bool = False) -> str:
        """
        Render the report.

        Args:
            timings (bool): Append one `time.<phase>` line per phase.

        Returns:
            str: Newline terminated `key: value` lines.
        """
        lines = [f"command: {self.command}"]
        if self.digest is not None:
            lines.append(f"input: {self.digest}")
        lines.append(f"status: {self.status}")
        if self.answer is not None or self.status == STATUS_OK:
            lines.append(f"answer: {format_value(self.answer)}")
        if self.seed is not None:
            lines.append(f"seed: {self.seed}")
        lines += [f"{key}: {format_value(value)}" for key, value in self.details.items()]
        if timings:
            lines += [f"time.{name}: {seconds:.3f}" for name, seconds in self.timings.items()]
        return "\n".join(lines) + "\n" + self.appendix
