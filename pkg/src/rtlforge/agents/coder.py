"""The code generation agent: prompt the backend and extract candidate RTL."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from rtlforge.agents.backend import ChatBackend, make_exchange
from rtlforge.agents.dialectic import AgentConfig
from rtlforge.agents.injector import PromptBundle
from rtlforge.errors import RtlforgeError
from rtlforge.frontend.syntax import VerilogSource


class NoCodeFound(RtlforgeError):
    pass


class ExtractionMethod(Enum):
    FENCED_BLOCK = "FENCED_BLOCK"
    MODULE_SPAN = "MODULE_SPAN"


@dataclass
class CandidateCode:
    source: VerilogSource
    raw_response: str
    method: ExtractionMethod
    discarded: list[str] = field(default_factory=list)

    def __post_init__(self):
        if "module" not in self.source.text or "endmodule" not in self.source.text:
            raise ValueError("candidate lacks a module...endmodule body")


_FENCE_RE = re.compile(r"```[a-zA-Z0-9_+-]*\s*\n(.*?)```", re.DOTALL)
_MODULE_RE = re.compile(r"\bmodule\b.*?\bendmodule\b", re.DOTALL)


def extract_candidate(response: str, origin: str) -> CandidateCode | None:
    fences = _FENCE_RE.findall(response)
    usable = [f for f in fences if "module" in f and "endmodule" in f]
    if usable:
        return CandidateCode(
            source=VerilogSource(usable[0].strip() + "\n", origin),
            raw_response=response,
            method=ExtractionMethod.FENCED_BLOCK,
            discarded=[f.strip() for f in usable[1:]],
        )
    span = _MODULE_RE.search(response)
    if span:
        return CandidateCode(
            source=VerilogSource(span.group(0) + "\n", origin),
            raw_response=response,
            method=ExtractionMethod.MODULE_SPAN,
        )
    return None


def generate_candidate(backend: ChatBackend, c0: VerilogSource, bundle: PromptBundle,
                       config: AgentConfig | None = None,
                       iteration: int = 0) -> CandidateCode:
    """Generate one candidate; re-asks once before giving up on extraction."""
    config = config or AgentConfig()
    origin = f"generated@iter-{iteration}"
    system = bundle.role_preamble
    user = bundle.render()
    response = backend.complete(
        make_exchange(system, user, config.model_id, config.temperature),
        agent="coder", revision=iteration)
    candidate = extract_candidate(response, origin)
    if candidate is not None:
        return candidate
    if config.re_ask:
        response = backend.complete(
            make_exchange(system, user + "\n\nRespond with a single fenced Verilog block.",
                          config.model_id, config.temperature),
            agent="coder", revision=iteration)
        candidate = extract_candidate(response, origin)
        if candidate is not None:
            return candidate
    raise NoCodeFound("response contains neither a fenced block nor a module span")
