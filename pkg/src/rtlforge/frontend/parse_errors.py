"""Diagnostics for the frontend."""

from __future__ import annotations

from dataclasses import dataclass

from rtlforge.errors import RtlforgeError


@dataclass(frozen=True)
class SyntaxIssue:
    """One (line, column, message) diagnostic.

    ``fatal`` distinguishes hard parse failures from subset limitations that
    an external tool may still accept (see UnsupportedConstruct).
    """

    line: int
    column: int
    message: str
    fatal: bool = True

    def render(self) -> str:
        return f"{self.line}:{self.column}: {self.message}"


class FrontendError(RtlforgeError):
    pass


class VerilogSyntaxError(FrontendError):
    """Parse failure carrying one or more diagnostics."""

    def __init__(self, errors: list[SyntaxIssue]):
        assert errors
        self.errors = errors
        super().__init__("; ".join(e.render() for e in errors))


class UnsupportedConstruct(FrontendError):
    """A construct outside the supported subset (generate, task, ...)."""

    def __init__(self, construct: str, line: int):
        self.construct = construct
        self.line = line
        super().__init__(f"unsupported construct '{construct}' at line {line}")

    def as_issue(self) -> SyntaxIssue:
        return SyntaxIssue(self.line, 1, f"unsupported construct '{self.construct}'", fatal=False)


class CombinationalLoop(FrontendError):
    """Combinational cycle in the dataflow graph."""

    def __init__(self, labels: list[str]):
        self.labels = labels
        super().__init__("combinational loop: " + " -> ".join(labels))
