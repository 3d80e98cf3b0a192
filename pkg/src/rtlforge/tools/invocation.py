"""Tool invocation and result values, plus content-addressed keying."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum

from rtlforge.errors import RtlforgeError


class ToolKind(Enum):
    COMPILE = "COMPILE"
    SIMULATE = "SIMULATE"
    SYNTHESIZE = "SYNTHESIZE"


DEFAULT_TIMEOUTS = {
    ToolKind.COMPILE: 30.0,
    ToolKind.SIMULATE: 120.0,
    ToolKind.SYNTHESIZE: 300.0,
}

# wall-timeout sentinel recorded in fixtures (shell convention)
TIMEOUT_EXIT_STATUS = 124


@dataclass(frozen=True)
class ToolInvocation:
    tool: ToolKind
    inputs: tuple[tuple[str, str], ...]      # (file name, content)
    args: tuple[str, ...] = ()
    timeout: float = 0.0
    expected_artifacts: tuple[str, ...] = ()  # not part of the key

    def __post_init__(self):
        if not self.inputs:
            raise ValueError("invocation requires at least one input file")
        if self.timeout <= 0:
            object.__setattr__(self, "timeout", DEFAULT_TIMEOUTS[self.tool])

    def key(self) -> str:
        payload = json.dumps(
            {
                "tool": self.tool.value,
                "args": list(self.args),
                "inputs": sorted([name, content] for name, content in self.inputs),
            },
            sort_keys=True,
            separators=(",", ":"),
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass
class ToolResult:
    exit_status: int
    stdout: str
    stderr: str
    artifacts: dict[str, str] = field(default_factory=dict)
    wall_time: float = 0.0

    def __post_init__(self):
        if self.wall_time < 0:
            raise ValueError("wall_time must be non-negative")

    @property
    def timed_out(self) -> bool:
        return self.exit_status == TIMEOUT_EXIT_STATUS or self.exit_status < 0

    def to_dict(self) -> dict:
        return {
            "exit_status": self.exit_status,
            "stdout": self.stdout,
            "stderr": self.stderr,
            "artifacts": sorted(self.artifacts),
            "wall_time": self.wall_time,
        }


class ToolError(RtlforgeError):
    pass


class ToolMissing(ToolError):
    def __init__(self, name: str):
        self.tool_name = name
        super().__init__(
            f"tool binary '{name}' not found; set the matching RTLFORGE_* "
            f"environment variable or use replay fixtures")


class ToolTimeout(ToolError):
    def __init__(self, tool: ToolKind, timeout: float):
        self.tool = tool
        self.timeout = timeout
        super().__init__(f"{tool.value} exceeded {timeout:.0f}s")


class FixtureMissing(ToolError):
    def __init__(self, key: str, tool: ToolKind):
        self.key = key
        super().__init__(f"no recorded fixture {key[:12]}... for {tool.value} in replay mode")
