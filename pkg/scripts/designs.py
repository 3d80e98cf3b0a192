"""Bundled sample designs, testbenches, and stimulus definitions.

Each testbench drives inputs at the falling clock edge from a closed-form
function of the cycle index; the same functions feed the reference
simulator so generated fixtures and live tool runs agree.
"""

from __future__ import annotations

MUL8_UNOPT = """\
module mul8(input clk, input [7:0] a, input [7:0] b, output [15:0] p);
  assign p = a * b;
endmodule
"""

MUL8_OPT = """\
module mul8(input clk, input [7:0] a, input [7:0] b, output reg [15:0] p);
  reg [11:0] pp_low;
  reg [11:0] pp_high;
  always @(posedge clk) begin
    pp_low  <= a * b[3:0];
    pp_high <= a * b[7:4];
    p <= pp_low + (pp_high << 4);
  end
endmodule
"""

MUL8_OPT3 = """\
module mul8(input clk, input [7:0] a, input [7:0] b, output reg [15:0] p);
  reg [9:0] pp0;
  reg [9:0] pp1;
  reg [9:0] pp2;
  reg [9:0] pp3;
  reg [12:0] s_low;
  reg [12:0] s_high;
  always @(posedge clk) begin
    pp0 <= a * b[1:0];
    pp1 <= a * b[3:2];
    pp2 <= a * b[5:4];
    pp3 <= a * b[7:6];
    s_low  <= pp0 + (pp1 << 2);
    s_high <= pp2 + (pp3 << 2);
    p <= s_low + (s_high << 4);
  end
endmodule
"""

MUL8_WRONG = """\
module mul8(input clk, input [7:0] a, input [7:0] b, output [15:0] p);
  assign p = a * b + 1;
endmodule
"""

MUL8_BROKEN = """\
module mul8(input clk, input [7:0] a, input [7:0] b, output [15:0] p);
  assign p = a * b
endmodule
"""

MUL8_TB = """\
module tb;
  reg clk = 0;
  always #5 clk = ~clk;
  reg [7:0] a = 11;
  reg [7:0] b = 7;
  wire [15:0] p;
  mul8 dut(.clk(clk), .a(a), .b(b), .p(p));
  integer i;
  initial begin
    $dumpfile("trace.vcd");
    $dumpvars(0, tb);
    for (i = 1; i <= 64; i = i + 1) begin
      @(negedge clk);
      a <= (i * 37 + 11) % 256;
      b <= (i * 53 + 7) % 256;
    end
    @(negedge clk);
    $finish;
  end
endmodule
"""


def mul8_stimulus(j: int) -> dict:
    return {"a": (j * 37 + 11) % 256, "b": (j * 53 + 7) % 256}


ADD32_UNOPT = """\
module add32(input clk, input [31:0] a, input [31:0] b, output reg [32:0] s);
  always @(posedge clk) s <= a + b;
endmodule
"""

ADD32_OPT = """\
module add32(input clk, input [31:0] a, input [31:0] b, output reg [32:0] s);
  reg [16:0] lo_q;
  reg [15:0] a_hi_q;
  reg [15:0] b_hi_q;
  always @(posedge clk) begin
    lo_q   <= a[15:0] + b[15:0];
    a_hi_q <= a[31:16];
    b_hi_q <= b[31:16];
    s      <= {a_hi_q + b_hi_q + lo_q[16], lo_q[15:0]};
  end
endmodule
"""

ADD32_TB = """\
module tb;
  reg clk = 0;
  always #5 clk = ~clk;
  reg [31:0] a = 5;
  reg [31:0] b = 9;
  wire [32:0] s;
  add32 dut(.clk(clk), .a(a), .b(b), .s(s));
  integer i;
  initial begin
    $dumpfile("trace.vcd");
    $dumpvars(0, tb);
    for (i = 1; i <= 64; i = i + 1) begin
      @(negedge clk);
      a <= i * 1234567 + 5;
      b <= i * 7654321 + 9;
    end
    @(negedge clk);
    $finish;
  end
endmodule
"""


def add32_stimulus(j: int) -> dict:
    return {"a": (j * 1234567 + 5) % (1 << 32), "b": (j * 7654321 + 9) % (1 << 32)}


ALU8_UNOPT = """\
module alu8(input clk, input [1:0] op, input [7:0] x, input [7:0] y, output reg [8:0] r);
  always @(posedge clk) begin
    case (op)
      2'b00: r <= x + y;
      2'b01: r <= x - y;
      2'b10: r <= {1'b0, x & y};
      default: r <= {1'b0, x ^ y};
    endcase
  end
endmodule
"""

ALU8_OPT = """\
module alu8(input clk, input [1:0] op, input [7:0] x, input [7:0] y, output reg [8:0] r);
  reg [1:0] op_q;
  reg [8:0] sum_q;
  reg [8:0] diff_q;
  reg [7:0] and_q;
  reg [7:0] xor_q;
  always @(posedge clk) begin
    op_q   <= op;
    sum_q  <= x + y;
    diff_q <= x - y;
    and_q  <= x & y;
    xor_q  <= x ^ y;
    case (op_q)
      2'b00: r <= sum_q;
      2'b01: r <= diff_q;
      2'b10: r <= {1'b0, and_q};
      default: r <= {1'b0, xor_q};
    endcase
  end
endmodule
"""

ALU8_TB = """\
module tb;
  reg clk = 0;
  always #5 clk = ~clk;
  reg [1:0] op = 0;
  reg [7:0] x = 3;
  reg [7:0] y = 12;
  wire [8:0] r;
  alu8 dut(.clk(clk), .op(op), .x(x), .y(y), .r(r));
  integer i;
  initial begin
    $dumpfile("trace.vcd");
    $dumpvars(0, tb);
    for (i = 1; i <= 64; i = i + 1) begin
      @(negedge clk);
      op <= i % 4;
      x <= (i * 29 + 3) % 256;
      y <= (i * 17 + 12) % 256;
    end
    @(negedge clk);
    $finish;
  end
endmodule
"""


def alu8_stimulus(j: int) -> dict:
    return {"op": j % 4, "x": (j * 29 + 3) % 256, "y": (j * 17 + 12) % 256}


GATED_BANK_UNOPT = """\
module gated_bank(input clk, input en, input [15:0] d, output reg [15:0] q);
  always @(posedge clk) q <= en ? d : q;
endmodule
"""

GATED_BANK_OPT = """\
module gated_bank(input clk, input en, input [15:0] d, output reg [15:0] q);
  always @(posedge clk) if (en) q <= d;
endmodule
"""

GATED_BANK_TB = """\
module tb;
  reg clk = 0;
  always #5 clk = ~clk;
  reg en = 1;
  reg [15:0] d = 21;
  wire [15:0] q;
  gated_bank dut(.clk(clk), .en(en), .d(d), .q(q));
  integer i;
  initial begin
    $dumpfile("trace.vcd");
    $dumpvars(0, tb);
    for (i = 1; i <= 64; i = i + 1) begin
      @(negedge clk);
      en <= ((i * 7) % 10) < 3;
      d <= (i * 97 + 21) % 65536;
    end
    @(negedge clk);
    $finish;
  end
endmodule
"""


def gated_bank_stimulus(j: int) -> dict:
    return {"en": 1 if (j == 0 or ((j * 7) % 10) < 3) else 0,
            "d": (j * 97 + 21) % 65536}


GATED_ACCUM_UNOPT = """\
module gated_accum(input clk, input valid, input [7:0] x, output [15:0] total);
  reg [15:0] acc = 0;
  always @(posedge clk) acc <= valid ? acc + x : acc;
  assign total = acc;
endmodule
"""

GATED_ACCUM_OPT = """\
module gated_accum(input clk, input valid, input [7:0] x, output [15:0] total);
  reg [15:0] acc = 0;
  always @(posedge clk) if (valid) acc <= acc + x;
  assign total = acc;
endmodule
"""

GATED_ACCUM_TB = """\
module tb;
  reg clk = 0;
  always #5 clk = ~clk;
  reg valid = 0;
  reg [7:0] x = 6;
  wire [15:0] total;
  gated_accum dut(.clk(clk), .valid(valid), .x(x), .total(total));
  integer i;
  initial begin
    $dumpfile("trace.vcd");
    $dumpvars(0, tb);
    for (i = 1; i <= 64; i = i + 1) begin
      @(negedge clk);
      valid <= ((i * 3) % 5) == 0;
      x <= (i * 41 + 6) % 256;
    end
    @(negedge clk);
    $finish;
  end
endmodule
"""


def gated_accum_stimulus(j: int) -> dict:
    return {"valid": 1 if (j > 0 and ((j * 3) % 5) == 0) else 0,
            "x": (j * 41 + 6) % 256}


BANK16_GATED = """\
module bank16(input clk, input en, input [15:0] d, output reg [15:0] q, output parity);
  always @(posedge clk) if (en) q <= d;
  assign parity = ^q;
endmodule
"""

BANK16_FREE = """\
module bank16(input clk, input en, input [15:0] d, output reg [15:0] q, output parity);
  always @(posedge clk) q <= d;
  assign parity = ^q;
endmodule
"""

BANK16_TB_TEMPLATE = """\
module tb;
  reg clk = 0;
  always #5 clk = ~clk;
  reg en = %(en0)s;
  reg [15:0] d = 40;
  wire [15:0] q;
  bank16 dut(.clk(clk), .en(en), .d(d), .q(q));
  integer i;
  initial begin
    $dumpfile("trace.vcd");
    $dumpvars(0, tb);
    for (i = 1; i <= 64; i = i + 1) begin
      @(negedge clk);
      en <= (i %% 10) < %(duty)d;
      d <= (i * 73 + 40) %% 65536;
    end
    @(negedge clk);
    $finish;
  end
endmodule
"""


def bank16_tb(duty_tenths: int) -> str:
    return BANK16_TB_TEMPLATE % {"duty": duty_tenths,
                                 "en0": "1" if 0 < duty_tenths else "0"}


def bank16_stimulus(duty_tenths: int):
    def f(j: int) -> dict:
        return {"en": 1 if (j % 10) < duty_tenths else 0,
                "d": (j * 73 + 40) % 65536}
    return f


COUNTER3 = """\
module counter3(input clk, output [2:0] count);
  reg [2:0] c = 0;
  always @(posedge clk) c <= c + 1;
  assign count = c;
endmodule
"""

COUNTER3_TB = """\
module tb;
  reg clk = 0;
  always #5 clk = ~clk;
  wire [2:0] count;
  counter3 dut(.clk(clk), .count(count));
  integer i;
  initial begin
    $dumpfile("trace.vcd");
    $dumpvars(0, tb);
    for (i = 0; i < 16; i = i + 1) @(negedge clk);
    $finish;
  end
endmodule
"""

COUNTER3_TB_NOFINISH = """\
module tb;
  reg clk = 0;
  always #5 clk = ~clk;
  wire [2:0] count;
  counter3 dut(.clk(clk), .count(count));
  initial begin
    $dumpfile("trace.vcd");
    $dumpvars(0, tb);
  end
endmodule
"""

UNDECLARED_NET = """\
module badnet(input clk, input a, output y);
  assign y = a & foo;
endmodule
"""

GENERATE_BLOCK = """\
module genblk(input [3:0] a, output [3:0] y);
  genvar i;
  generate
    for (i = 0; i < 4; i = i + 1) begin : g
      assign y[i] = ~a[i];
    end
  endgenerate
endmodule
"""

LATCHY = """\
module latchy(input en, input [3:0] d, output reg [3:0] q);
  always @(*) if (en) q = d;
endmodule
"""

EMPTY_MODULE = """\
module empty(input clk);
endmodule
"""

INVERTER = """\
module inv1(input a, output y);
  assign y = ~a;
endmodule
"""

INVERTER_TB = """\
module tb;
  reg clk = 0;
  always #5 clk = ~clk;
  reg a = 0;
  wire y;
  inv1 dut(.a(a), .y(y));
  integer i;
  initial begin
    $dumpfile("trace.vcd");
    $dumpvars(0, tb);
    for (i = 1; i <= 16; i = i + 1) begin
      @(negedge clk);
      a <= i % 2;
    end
    $finish;
  end
endmodule
"""


def inverter_stimulus(j: int) -> dict:
    return {"a": j % 2}


def counter_stimulus(j: int) -> dict:
    return {}


TRIPLES = {
    "add32_pipe": {
        "kind": "pipelining",
        "unopt": ADD32_UNOPT,
        "opt": ADD32_OPT,
        "tb": ADD32_TB,
        "stimulus": add32_stimulus,
        "cycles": 65,
        "difficulty": "easy",
        "meta_extra": {"goal.max_area_ratio": "3.0"},
    },
    "alu8_pipe": {
        "kind": "pipelining",
        "unopt": ALU8_UNOPT,
        "opt": ALU8_OPT,
        "tb": ALU8_TB,
        "stimulus": alu8_stimulus,
        "cycles": 65,
        "difficulty": "hard",
        "meta_extra": {"goal.max_area_ratio": "3.0", "goal.min_timing_gain": "5.0"},
    },
    "gated_accum": {
        "kind": "clock_gating",
        "unopt": GATED_ACCUM_UNOPT,
        "opt": GATED_ACCUM_OPT,
        "tb": GATED_ACCUM_TB,
        "stimulus": gated_accum_stimulus,
        "cycles": 65,
        "difficulty": "easy",
        "meta_extra": {},
    },
    "gated_bank": {
        "kind": "clock_gating",
        "unopt": GATED_BANK_UNOPT,
        "opt": GATED_BANK_OPT,
        "tb": GATED_BANK_TB,
        "stimulus": gated_bank_stimulus,
        "cycles": 65,
        "difficulty": "easy",
        "meta_extra": {},
    },
    "mul8_pipe": {
        "kind": "pipelining",
        "unopt": MUL8_UNOPT,
        "opt": MUL8_OPT,
        "tb": MUL8_TB,
        "stimulus": mul8_stimulus,
        "cycles": 65,
        "difficulty": "easy",
        "meta_extra": {"goal.max_area_ratio": "3.0", "goal.min_timing_gain": "20.0"},
    },
}
