"""Subprocess execution of the external EDA tools with record/replay."""

from __future__ import annotations

import os
import shutil
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

from rtlforge.tools.fixtures import FixtureStore
from rtlforge.tools.invocation import (
    TIMEOUT_EXIT_STATUS,
    FixtureMissing,
    ToolInvocation,
    ToolKind,
    ToolMissing,
    ToolResult,
)

ENV_VARS = {
    ToolKind.COMPILE: "RTLFORGE_IVERILOG",
    ToolKind.SIMULATE: "RTLFORGE_VVP",
    ToolKind.SYNTHESIZE: "RTLFORGE_YOSYS",
}

DEFAULT_BINARIES = {
    ToolKind.COMPILE: "iverilog",
    ToolKind.SIMULATE: "vvp",
    ToolKind.SYNTHESIZE: "yosys",
}


@dataclass
class ToolingConfig:
    """Fixture mode ('off' runs tools directly) and binary locations."""

    mode: str = "off"                        # off | record | replay
    fixture_dir: Path | None = None
    binaries: dict[ToolKind, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.mode not in ("off", "record", "replay"):
            raise ValueError(f"unknown fixture mode {self.mode!r}")
        if self.mode in ("record", "replay") and self.fixture_dir is None:
            raise ValueError(f"fixture mode {self.mode!r} requires a fixture directory")

    def binary(self, tool: ToolKind) -> str:
        if tool in self.binaries:
            return self.binaries[tool]
        return os.environ.get(ENV_VARS[tool], DEFAULT_BINARIES[tool])


class ToolRunner:
    """Runs invocations in isolated scratch directories, honoring fixtures."""

    def __init__(self, config: ToolingConfig | None = None):
        self.config = config or ToolingConfig()
        self.store = (FixtureStore(self.config.fixture_dir)
                      if self.config.fixture_dir is not None else None)
        self.last_workdir: Path | None = None  # inspected by the staging audit

    def run(self, inv: ToolInvocation) -> ToolResult:
        key = inv.key()
        if self.config.mode == "replay":
            result = self.store.load(key)
            if result is None:
                raise FixtureMissing(key, inv.tool)
            return result
        if self.config.mode == "record":
            cached = self.store.load(key)
            if cached is not None:
                return cached
        result = self._execute(inv)
        if self.config.mode == "record":
            self.store.save(key, result)
        return result

    def _execute(self, inv: ToolInvocation) -> ToolResult:
        binary = self.config.binary(inv.tool)
        resolved = shutil.which(binary)
        if resolved is None and not os.path.isfile(binary):
            raise ToolMissing(binary)
        workdir = Path(tempfile.mkdtemp(prefix="rtlforge-"))
        self.last_workdir = workdir
        try:
            for name, content in inv.inputs:
                target = workdir / name
                if not str(target.resolve()).startswith(str(workdir.resolve())):
                    raise ValueError(f"unsafe input file name {name!r}")
                target.write_text(content, encoding="utf-8")
            cmd = [resolved or binary, *inv.args]
            started = time.monotonic()
            try:
                proc = subprocess.run(
                    cmd,
                    cwd=workdir,
                    capture_output=True,
                    text=True,
                    timeout=inv.timeout,
                )
                exit_status = proc.returncode
                stdout, stderr = proc.stdout, proc.stderr
            except subprocess.TimeoutExpired as exc:
                exit_status = TIMEOUT_EXIT_STATUS
                stdout = (exc.stdout or b"").decode("utf-8", "replace") \
                    if isinstance(exc.stdout, bytes) else (exc.stdout or "")
                stderr = (exc.stderr or b"").decode("utf-8", "replace") \
                    if isinstance(exc.stderr, bytes) else (exc.stderr or "")
            wall = time.monotonic() - started
            artifacts = {}
            for name in inv.expected_artifacts:
                path = workdir / name
                if path.is_file():
                    artifacts[name] = path.read_text(encoding="utf-8", errors="replace")
            return ToolResult(exit_status, stdout, stderr, artifacts, wall)
        finally:
            shutil.rmtree(workdir, ignore_errors=True)
