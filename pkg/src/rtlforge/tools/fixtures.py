"""Content-addressed fixture store for tool results.

Layout: <root>/<sha256>/result.json plus one file per artifact. Reads are
lock-free; writes are serialized and land atomically via a rename, so
concurrent workers can share one store.
"""

from __future__ import annotations

import json
import shutil
import tempfile
import threading
from pathlib import Path

from rtlforge.tools.invocation import ToolResult


class FixtureStore:
    def __init__(self, root: Path | str):
        self.root = Path(root)
        self._write_lock = threading.Lock()

    def path_for(self, key: str) -> Path:
        return self.root / key

    def load(self, key: str) -> ToolResult | None:
        entry = self.path_for(key)
        meta_path = entry / "result.json"
        if not meta_path.is_file():
            return None
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
        artifacts = {}
        for name in meta["artifacts"]:
            artifacts[name] = (entry / name).read_text(encoding="utf-8")
        return ToolResult(
            exit_status=meta["exit_status"],
            stdout=meta["stdout"],
            stderr=meta["stderr"],
            artifacts=artifacts,
            wall_time=meta["wall_time"],
        )

    def save(self, key: str, result: ToolResult):
        with self._write_lock:
            entry = self.path_for(key)
            if (entry / "result.json").is_file():
                return  # content-addressed: an existing entry is equivalent
            self.root.mkdir(parents=True, exist_ok=True)
            tmp = Path(tempfile.mkdtemp(dir=self.root, prefix=".staging-"))
            try:
                meta = result.to_dict()
                for name, content in result.artifacts.items():
                    if "/" in name or name.startswith("."):
                        raise ValueError(f"unsafe artifact name {name!r}")
                    (tmp / name).write_text(content, encoding="utf-8")
                (tmp / "result.json").write_text(
                    json.dumps(meta, indent=2, sort_keys=True), encoding="utf-8")
                tmp.rename(entry)
            except OSError:
                shutil.rmtree(tmp, ignore_errors=True)
                if not (entry / "result.json").is_file():
                    raise
