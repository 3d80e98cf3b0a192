"""Domain knowledge injection: example selection and prompt assembly."""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from importlib import resources

from rtlforge.errors import RtlforgeError
from rtlforge.frontend.dfg import build_dataflow_graph, longest_comb_path
from rtlforge.frontend.parser import parse_module
from rtlforge.frontend.syntax import (
    Assignment,
    Binary,
    Case,
    ModuleAst,
    NetKind,
    Ternary,
    Unary,
    VerilogSource,
    walk_expr,
    walk_stmts,
)
from rtlforge.goals import OptimizationKind


class EmptyBank(RtlforgeError):
    def __init__(self, kind):
        super().__init__(f"no examples for optimization kind {kind}")


class BudgetTooSmall(RtlforgeError):
    pass


_OP_CLASSES = {
    "+": "add", "-": "add", "*": "mul", "/": "mul", "%": "mul",
    "&": "bit", "|": "bit", "^": "bit", "~^": "bit", "^~": "bit",
    "&&": "bool", "||": "bool",
    "==": "cmp", "!=": "cmp", "<": "cmp", ">": "cmp", "<=": "cmp", ">=": "cmp",
    "<<": "shift", ">>": "shift", "<<<": "shift", ">>>": "shift",
}
_HISTOGRAM_KEYS = ("add", "mul", "bit", "bool", "cmp", "shift", "mux", "not")


def feature_vector(ast: ModuleAst) -> list[float]:
    """(port count, register count, longest comb path, operator histogram)."""
    histogram = {k: 0 for k in _HISTOGRAM_KEYS}

    def count_expr(e):
        for node in walk_expr(e):
            if isinstance(node, Binary):
                key = _OP_CLASSES.get(node.op)
                if key:
                    histogram[key] += 1
            elif isinstance(node, Ternary):
                histogram["mux"] += 1
            elif isinstance(node, Unary):
                histogram["not"] += 1

    for a in ast.assigns:
        count_expr(a.rhs)
    for blk in ast.always_blocks:
        for st in walk_stmts(blk.body):
            if isinstance(st, Assignment):
                count_expr(st.rhs)
            elif isinstance(st, Case):
                histogram["mux"] += max(1, len(st.items) - 1)

    reg_count = len({n.name for n in ast.nets if n.kind is NetKind.REG})
    try:
        comb_len, _ = longest_comb_path(build_dataflow_graph(ast))
    except Exception:
        comb_len = 0
    return [float(len(ast.ports)), float(reg_count), float(comb_len)] + [
        float(histogram[k]) for k in _HISTOGRAM_KEYS]


def cosine_similarity(a: list[float], b: list[float]) -> float:
    dot = sum(x * y for x, y in zip(a, b))
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(x * x for x in b))
    if na == 0 or nb == 0:
        return 0.0
    return dot / (na * nb)


@dataclass(frozen=True)
class BankExample:
    name: str
    kind: OptimizationKind
    unoptimized: str
    optimized: str
    annotation: str
    features: tuple[float, ...]
    rank: int = 0    # position in the selection order, set by select_examples

    def render(self, index: int) -> str:
        return (
            f"Example {index} ({self.annotation}):\n"
            f"--- unoptimized ---\n{self.unoptimized}"
            f"--- optimized ---\n{self.optimized}"
        )


class ExampleBank:
    def __init__(self, examples: list[BankExample]):
        self.examples = examples

    @classmethod
    def from_data(cls, data: dict) -> "ExampleBank":
        out = []
        for entry in data["examples"]:
            ast = parse_module(VerilogSource(entry["unoptimized"], entry["name"]))
            out.append(BankExample(
                name=entry["name"],
                kind=OptimizationKind(entry["kind"]),
                unoptimized=entry["unoptimized"],
                optimized=entry["optimized"],
                annotation=entry["annotation"],
                features=tuple(feature_vector(ast)),
            ))
        return cls(out)

    def for_kind(self, kind: OptimizationKind) -> list[BankExample]:
        return [e for e in self.examples if e.kind is kind]


_bundled_bank: ExampleBank | None = None


def bundled_bank() -> ExampleBank:
    global _bundled_bank
    if _bundled_bank is None:
        text = resources.files("rtlforge.agents").joinpath("bank.json").read_text("utf-8")
        _bundled_bank = ExampleBank.from_data(json.loads(text))
    return _bundled_bank


def select_examples(kind: OptimizationKind, ast: ModuleAst, k: int,
                    bank: ExampleBank | None = None) -> list[BankExample]:
    """Top-k bank entries by feature cosine similarity; ties keep bank order."""
    if k < 1:
        raise ValueError("k must be >= 1")
    bank = bank or bundled_bank()
    candidates = bank.for_kind(kind)
    if not candidates:
        raise EmptyBank(kind)
    query = feature_vector(ast)
    scored = sorted(
        enumerate(candidates),
        key=lambda pair: (-cosine_similarity(query, list(pair[1].features)), pair[0]),
    )
    picked = scored[:min(k, len(candidates))]
    from dataclasses import replace
    return [replace(example, rank=r) for r, (_, example) in enumerate(picked)]


ROLE_PREAMBLE = (
    "You are an expert RTL designer. Apply the requested optimization "
    "({kind}) to the given Verilog module while preserving its behavior, "
    "ports, and module name."
)

OUTPUT_INSTRUCTIONS = (
    "Respond with exactly one fenced Verilog code block containing the "
    "complete optimized module."
)


@dataclass
class PromptBundle:
    role_preamble: str
    examples: list[BankExample]
    plan_text: str
    hypothesis_text: str
    dfg_schema: str
    source_text: str
    token_budget: int
    instructions: str = OUTPUT_INSTRUCTIONS
    truncation: list[str] = field(default_factory=list)

    def render(self) -> str:
        parts = [self.role_preamble]
        for i, example in enumerate(self.examples, start=1):
            parts.append(example.render(i))
        if self.dfg_schema:
            parts.append("Dataflow graph of the design:\n" + self.dfg_schema)
        if self.plan_text:
            parts.append("Transformation plan:\n" + self.plan_text)
        if self.hypothesis_text:
            parts.append("Predicted outcomes and risks:\n" + self.hypothesis_text)
        parts.append("Design to optimize:\n" + self.source_text)
        parts.append(self.instructions)
        return "\n\n".join(parts)

    def token_estimate(self) -> int:
        return estimate_tokens(self.render())


def estimate_tokens(text: str) -> int:
    """Budget approximation: 4 characters per token."""
    return (len(text) + 3) // 4


def compose_prompt(plan, hypo, dfg_schema: str, src: VerilogSource,
                   examples: list[BankExample], budget: int,
                   kind: OptimizationKind | None = None) -> PromptBundle:
    """Assemble the generation prompt, shedding parts in fixed priority.

    Over budget, last-ranked examples go first, then trailing schema EDGE
    lines; the plan and the source are never dropped.
    """
    plan_text = plan.render() if plan is not None else ""
    hypo_text = hypo.render() if hypo is not None else ""
    kind = kind or (plan.goal if plan is not None else OptimizationKind.PIPELINING)

    if estimate_tokens(plan_text) + estimate_tokens(src.text) > budget:
        raise BudgetTooSmall(
            f"plan plus source alone need more than {budget} tokens")

    bundle = PromptBundle(
        role_preamble=ROLE_PREAMBLE.format(kind=kind.value.replace("_", " ")),
        examples=list(examples),
        plan_text=plan_text,
        hypothesis_text=hypo_text,
        dfg_schema=dfg_schema,
        source_text=src.text,
        token_budget=budget,
    )
    while bundle.token_estimate() > budget and bundle.examples:
        dropped = max(bundle.examples, key=lambda e: e.rank)
        bundle.examples.remove(dropped)
        bundle.truncation.append(f"dropped example '{dropped.name}'")
    dropped_edges = 0
    while bundle.token_estimate() > budget:
        lines = bundle.dfg_schema.splitlines()
        edge_indices = [i for i, line in enumerate(lines) if line.startswith("EDGE ")]
        if not edge_indices:
            break
        del lines[edge_indices[-1]]
        bundle.dfg_schema = "\n".join(lines)
        dropped_edges += 1
    if dropped_edges:
        bundle.truncation.append(f"dropped {dropped_edges} schema edge lines")
    return bundle
