import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from rtlforge.agents import (
    AgentConfig,
    BackendUnavailable,
    BudgetTooSmall,
    EmptyBank,
    ExampleBank,
    ExtractionMethod,
    HttpBackend,
    HttpBackendConfig,
    HypothesisParseError,
    NoCodeFound,
    PlanParseError,
    ScriptBank,
    ScriptExhausted,
    ScriptedBackend,
    articulator_assist,
    articulator_init,
    articulator_update,
    bundled_bank,
    compose_prompt,
    estimate_tokens,
    extract_candidate,
    generate_candidate,
    hypo_init,
    hypo_update,
    llm_complete,
    make_exchange,
    select_examples,
)
from rtlforge.evaluation import FunctionalMismatch
from rtlforge.frontend import VerilogSource, build_dataflow_graph, parse_module, serialize_dfg
from rtlforge.goals import GoalSpec, OptimizationKind

MUL_SRC = VerilogSource(
    "module mul8(input clk, input [7:0] a, input [7:0] b, output [15:0] p);\n"
    "  assign p = a * b;\nendmodule", "mul8")
GOAL = GoalSpec(OptimizationKind.PIPELINING)


def schema_of(src=MUL_SRC):
    return serialize_dfg(build_dataflow_graph(parse_module(src)))


# --- backends ---

def test_scripted_backend_in_order():
    backend = ScriptedBackend({"coder": ["OK"]})
    assert llm_complete(backend, make_exchange("s", "u"), agent="coder") == "OK"


def test_scripted_backend_exhaustion():
    backend = ScriptedBackend({"coder": ["once"]})
    llm_complete(backend, make_exchange("s", "u"), agent="coder")
    with pytest.raises(ScriptExhausted):
        llm_complete(backend, make_exchange("s", "u"), agent="coder")


def test_script_bank_layering():
    bank = ScriptBank({
        "default": {"coder": ["base"]},
        "by_seed": {"2": {"coder": ["seeded"]}},
        "by_triple": {"t1": {"coder": ["tripled"],
                             "by_seed": {"5": {"coder": ["both"]}}}},
    })
    assert bank.roles()["coder"] == ["base"]
    assert bank.roles(seed=2)["coder"] == ["seeded"]
    assert bank.roles("t1", 0)["coder"] == ["tripled"]
    assert bank.roles("t1", 5)["coder"] == ["both"]


class _FlakyHandler(BaseHTTPRequestHandler):
    failures = 2
    hits = 0

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        self.rfile.read(length)
        type(self).hits += 1
        if type(self).hits <= type(self).failures:
            self.send_response(429)
            self.end_headers()
            return
        body = json.dumps({"choices": [{"message": {"content": "recovered"}}]})
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.end_headers()
        self.wfile.write(body.encode())

    def log_message(self, *args):
        pass


@pytest.fixture()
def flaky_server():
    _FlakyHandler.hits = 0
    server = HTTPServer(("127.0.0.1", 0), _FlakyHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}/v1/chat"
    server.shutdown()


def test_http_backend_retries_then_succeeds(flaky_server):
    backend = HttpBackend(HttpBackendConfig(
        endpoint=flaky_server, max_retries=3, retry_delay=0.0))
    text = backend.complete(make_exchange("s", "u"), agent="coder")
    assert text == "recovered"
    assert backend.telemetry["last_retries"] == 2


def test_http_backend_gives_up(flaky_server):
    _FlakyHandler.failures = 10
    try:
        backend = HttpBackend(HttpBackendConfig(
            endpoint=flaky_server, max_retries=2, retry_delay=0.0))
        with pytest.raises(BackendUnavailable):
            backend.complete(make_exchange("s", "u"), agent="coder")
    finally:
        _FlakyHandler.failures = 2


# --- plan author ---

def test_articulator_init_anchored_steps():
    backend = ScriptedBackend({"articulator": [
        "STEP 1: register the operands feeding @p\n"
        "STEP 2: split the array at @p\n"
        "ASSUME: one operand pair per cycle"]})
    plan = articulator_init(backend, MUL_SRC, GOAL, schema_of())
    assert plan.revision == 0
    assert len(plan.steps) == 2
    assert all(s.anchored for s in plan.steps)
    assert plan.assumptions == ["one operand pair per cycle"]


def test_articulator_init_unanchored_flagged():
    backend = ScriptedBackend({"articulator": [
        "STEP 1: add register @no_such_construct"]})
    plan = articulator_init(backend, MUL_SRC, GOAL, schema_of())
    assert len(plan.steps) == 1
    assert not plan.steps[0].anchored
    assert plan.unanchored_steps() == plan.steps


def test_articulator_prose_fails_after_re_ask():
    backend = ScriptedBackend({"articulator": [
        "I think pipelining would be lovely.",
        "Still no structured plan here."]})
    with pytest.raises(PlanParseError):
        articulator_init(backend, MUL_SRC, GOAL, schema_of())
    assert backend.cursors["articulator"] == 2  # the re-ask happened


def test_articulator_update_revision_and_diff():
    backend = ScriptedBackend({"articulator": [
        "STEP 1: original step @p",
        "STEP 1: original step @p\nSTEP 2: declare stage register s1"]})
    plan = articulator_init(backend, MUL_SRC, GOAL, schema_of())
    from rtlforge.frontend.parse_errors import SyntaxIssue
    updated = articulator_update(backend, plan, [SyntaxIssue(4, 1, "undeclared net s1")])
    assert updated.revision == plan.revision + 1
    assert updated.last_diff.added == (2,)
    assert updated.last_diff.removed == ()
    assert "declare stage register" in updated.steps[1].action


def test_articulator_update_requires_feedback():
    backend = ScriptedBackend({"articulator": ["STEP 1: x @p"]})
    plan = articulator_init(backend, MUL_SRC, GOAL, schema_of())
    with pytest.raises(ValueError):
        articulator_update(backend, plan, [])


def test_articulator_assist_mismatch_constraints():
    backend = ScriptedBackend({"articulator": [
        "STEP 1: pipeline the datapath @p",
        "STEP 1: pipeline the datapath @p\n"
        "STEP 2: add output-alignment register\n"
        "ASSUME: outputs shift by pipeline depth"]})
    plan = articulator_init(backend, MUL_SRC, GOAL, schema_of())
    updated = articulator_assist(backend, plan, [
        FunctionalMismatch("p", 3, "15", "0")])
    assert updated.revision == 1
    assert any("alignment" in s.action for s in updated.steps)
    assert updated.assumptions == ["outputs shift by pipeline depth"]


# --- outcome predictor ---

def test_hypo_init_parses_numbers():
    backend = ScriptedBackend({"hypothesis": [
        "PREDICT timing_gain=20 power_gain=3 area_ratio=1.05\n"
        "RISK: latency grows @p"]})
    hypo = hypo_init(backend, MUL_SRC, GOAL, schema_of())
    assert hypo.predicted.timing_gain == 20.0
    assert hypo.predicted.area_ratio == 1.05
    assert hypo.revision == 0
    assert len(hypo.risks) == 1 and not hypo.area_ratio_defaulted


def test_hypo_init_missing_area_ratio_defaults_after_re_ask():
    backend = ScriptedBackend({"hypothesis": [
        "PREDICT timing_gain=20 power_gain=3",
        "PREDICT timing_gain=20 power_gain=3"]})
    hypo = hypo_init(backend, MUL_SRC, GOAL, schema_of())
    assert hypo.predicted.area_ratio == 1.0
    assert hypo.area_ratio_defaulted


def test_hypo_init_malformed_twice_fails():
    backend = ScriptedBackend({"hypothesis": ["nothing", "still nothing"]})
    with pytest.raises(HypothesisParseError):
        hypo_init(backend, MUL_SRC, GOAL, schema_of())


class _FakeAssessment:
    timing_gain = 12.0
    power_gain = 1.0

    @staticmethod
    def primary_metric_name():
        return "timing_gain"

    @staticmethod
    def feedback_text():
        return "timing gain 12% below prediction"


def test_hypo_update_deviation_record():
    backend = ScriptedBackend({"hypothesis": [
        "PREDICT timing_gain=20 power_gain=3 area_ratio=1.05",
        "PREDICT timing_gain=14 power_gain=3 area_ratio=1.05\n"
        "CAUSE: stage imbalance in the array"]})
    hypo = hypo_init(backend, MUL_SRC, GOAL, schema_of())
    updated = hypo_update(backend, hypo, _FakeAssessment())
    assert updated.revision == 1
    record = updated.deviations[-1]
    assert record.predicted == 20.0 and record.observed == 12.0
    assert record.delta == pytest.approx(-8.0)
    assert "imbalance" in record.cause


def test_hypo_update_mismatches_grow_risks():
    backend = ScriptedBackend({"hypothesis": [
        "PREDICT timing_gain=20 power_gain=3 area_ratio=1.0",
        "PREDICT timing_gain=20 power_gain=3 area_ratio=1.0\n"
        "RISK: output misaligned by one cycle"]})
    hypo = hypo_init(backend, MUL_SRC, GOAL, schema_of())
    updated = hypo_update(backend, hypo, [FunctionalMismatch("p", 2, "1", "0")])
    assert len(updated.risks) > len(hypo.risks)
    assert updated.revision == 1


def test_hypo_update_requires_feedback():
    backend = ScriptedBackend({"hypothesis": [
        "PREDICT timing_gain=20 power_gain=3 area_ratio=1.0"]})
    hypo = hypo_init(backend, MUL_SRC, GOAL, schema_of())
    with pytest.raises(ValueError):
        hypo_update(backend, hypo, [])


# --- example selection ---

def test_select_examples_ranked_and_deterministic():
    ast = parse_module(MUL_SRC)
    first = select_examples(OptimizationKind.PIPELINING, ast, 2)
    second = select_examples(OptimizationKind.PIPELINING, ast, 2)
    assert [e.name for e in first] == [e.name for e in second]
    assert len(first) == 2
    # the multiplier-shaped bank entry must rank first for a multiplier query
    assert first[0].name == "mul4_two_stage"
    assert [e.rank for e in first] == [0, 1]


def test_select_examples_hand_ranked_similarity():
    from rtlforge.agents.injector import cosine_similarity, feature_vector
    ast = parse_module(MUL_SRC)
    query = feature_vector(ast)
    bank = bundled_bank()
    scored = sorted(
        ((cosine_similarity(query, list(e.features)), i, e.name)
         for i, e in enumerate(bank.for_kind(OptimizationKind.PIPELINING))),
        key=lambda tup: (-tup[0], tup[1]))
    picked = select_examples(OptimizationKind.PIPELINING, ast, 3)
    assert [e.name for e in picked] == [name for _, _, name in scored[:3]]


def test_select_examples_k_larger_than_bank():
    ast = parse_module(MUL_SRC)
    got = select_examples(OptimizationKind.PIPELINING, ast, 99)
    assert len(got) == len(bundled_bank().for_kind(OptimizationKind.PIPELINING))


def test_select_examples_empty_bank():
    ast = parse_module(MUL_SRC)
    empty = ExampleBank([])
    with pytest.raises(EmptyBank):
        select_examples(OptimizationKind.CLOCK_GATING, ast, 1, bank=empty)


# --- prompt composition ---

def _plan_and_hypo():
    backend = ScriptedBackend({
        "articulator": ["STEP 1: split the datapath @p"],
        "hypothesis": ["PREDICT timing_gain=20 power_gain=0 area_ratio=1.2"]})
    plan = articulator_init(backend, MUL_SRC, GOAL, schema_of())
    hypo = hypo_init(backend, MUL_SRC, GOAL, schema_of())
    return plan, hypo


def test_compose_prompt_contains_every_part_in_order():
    plan, hypo = _plan_and_hypo()
    examples = select_examples(OptimizationKind.PIPELINING, parse_module(MUL_SRC), 2)
    bundle = compose_prompt(plan, hypo, schema_of(), MUL_SRC, examples, 8000)
    text = bundle.render()
    assert not bundle.truncation
    order = [text.index(examples[0].unoptimized[:20]),
             text.index("NODE 0"),
             text.index("STEP 1"),
             text.index("PREDICT"),
             text.index(MUL_SRC.text[:30])]
    assert order == sorted(order)
    assert text.count("STEP 1: split the datapath @p") == 1
    assert bundle.token_estimate() <= 8000


def test_compose_prompt_drops_last_ranked_example_first():
    plan, hypo = _plan_and_hypo()
    examples = select_examples(OptimizationKind.PIPELINING, parse_module(MUL_SRC), 2)
    full = compose_prompt(plan, hypo, schema_of(), MUL_SRC, examples, 8000)
    budget = full.token_estimate() - estimate_tokens(examples[1].render(2)) + 8
    trimmed = compose_prompt(plan, hypo, schema_of(), MUL_SRC, examples, budget)
    assert len(trimmed.examples) == 1
    assert trimmed.examples[0].name == examples[0].name
    assert any(examples[1].name in note for note in trimmed.truncation)


def test_compose_prompt_truncates_edges_before_plan():
    plan, hypo = _plan_and_hypo()
    schema = schema_of()
    lean = compose_prompt(plan, hypo, schema, MUL_SRC, [],
                          estimate_tokens(plan.render()) +
                          estimate_tokens(MUL_SRC.text) + 120)
    assert "STEP 1" in lean.render()
    assert MUL_SRC.text in lean.render()
    if lean.truncation:
        assert "edge" in lean.truncation[-1]
        assert lean.dfg_schema.count("EDGE ") < schema.count("EDGE ")


def test_compose_prompt_budget_too_small():
    plan, hypo = _plan_and_hypo()
    with pytest.raises(BudgetTooSmall):
        compose_prompt(plan, hypo, schema_of(), MUL_SRC, [], 10)


# --- candidate extraction ---

GOOD_MODULE = ("module mul8(input clk, input [7:0] a, input [7:0] b, "
               "output reg [15:0] p);\n  always @(posedge clk) p <= a * b;\n"
               "endmodule\n")


def test_fenced_block_extracted():
    cand = extract_candidate(f"Sure!\n```verilog\n{GOOD_MODULE}```\n", "gen")
    assert cand.method is ExtractionMethod.FENCED_BLOCK
    assert cand.source.text == GOOD_MODULE


def test_module_span_extracted_from_prose():
    cand = extract_candidate(f"The fix is simple: {GOOD_MODULE} as shown.", "gen")
    assert cand.method is ExtractionMethod.MODULE_SPAN
    assert cand.source.text.startswith("module mul8")


def test_two_fenced_blocks_first_wins_second_recorded():
    other = GOOD_MODULE.replace("mul8", "mul8_alt")
    response = f"```verilog\n{GOOD_MODULE}```\nor maybe\n```verilog\n{other}```"
    cand = extract_candidate(response, "gen")
    assert cand.source.text == GOOD_MODULE
    assert len(cand.discarded) == 1 and "mul8_alt" in cand.discarded[0]


def test_generate_candidate_re_asks_then_fails():
    plan, hypo = _plan_and_hypo()
    bundle = compose_prompt(plan, hypo, schema_of(), MUL_SRC, [], 8000)
    backend = ScriptedBackend({"coder": ["no code here", "still prose"]})
    with pytest.raises(NoCodeFound):
        generate_candidate(backend, MUL_SRC, bundle)
    assert backend.cursors["coder"] == 2


def test_generate_candidate_origin_tracks_iteration():
    plan, hypo = _plan_and_hypo()
    bundle = compose_prompt(plan, hypo, schema_of(), MUL_SRC, [], 8000)
    backend = ScriptedBackend({"coder": [f"```verilog\n{GOOD_MODULE}```"]})
    cand = generate_candidate(backend, MUL_SRC, bundle, iteration=4)
    assert cand.source.origin == "generated@iter-4"


# --- determinism across repeated runs ---

def test_scripted_pipeline_is_deterministic():
    def run_once():
        backend = ScriptedBackend({
            "articulator": ["STEP 1: split @p"],
            "hypothesis": ["PREDICT timing_gain=20 power_gain=0 area_ratio=1.2"],
            "coder": [f"```verilog\n{GOOD_MODULE}```"]})
        plan = articulator_init(backend, MUL_SRC, GOAL, schema_of())
        hypo = hypo_init(backend, MUL_SRC, GOAL, schema_of())
        examples = select_examples(OptimizationKind.PIPELINING,
                                   parse_module(MUL_SRC), 2)
        bundle = compose_prompt(plan, hypo, schema_of(), MUL_SRC, examples, 8000)
        cand = generate_candidate(backend, MUL_SRC, bundle)
        return bundle.render() + "\n==\n" + cand.source.text

    runs = {run_once() for _ in range(3)}
    assert len(runs) == 1
