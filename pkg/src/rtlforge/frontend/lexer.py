"""Tokenizer for the Verilog subset."""

from __future__ import annotations

import re
from dataclasses import dataclass

from rtlforge.frontend.parse_errors import SyntaxIssue, VerilogSyntaxError

KEYWORDS = {
    "module", "endmodule", "input", "output", "inout", "wire", "reg",
    "integer", "assign", "always", "posedge", "negedge", "or", "if", "else",
    "begin", "end", "case", "casez", "casex", "endcase", "default",
    "parameter", "localparam", "signed",
    # recognized so the parser can reject them by name
    "generate", "endgenerate", "genvar", "task", "endtask", "function",
    "endfunction", "initial", "forever", "for", "while", "repeat", "wait",
    "fork", "join", "real", "time", "specify", "endspecify", "primitive",
}

# multi-char operators first so the scanner is longest-match
_OPERATORS = [
    "<<<", ">>>", "===", "!==",
    "<=", ">=", "==", "!=", "&&", "||", "<<", ">>", "~^", "^~", "+:", "-:",
    "@", "(", ")", "[", "]", "{", "}", ",", ";", ":", "?", "=",
    "+", "-", "*", "/", "%", "&", "|", "^", "~", "!", "<", ">", "#", ".",
]

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*|/\*.*?\*/)
  | (?P<based>(?:\d+\s*)?'[sS]?[bodhBODH][0-9a-fA-FxXzZ_?]+)
  | (?P<number>\d[\d_]*)
  | (?P<id>[A-Za-z_][A-Za-z0-9_$]*|\\[^ \t\r\n]+)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<op>""" + "|".join(re.escape(o) for o in _OPERATORS) + r""")
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass(frozen=True)
class Token:
    kind: str      # 'id', 'keyword', 'number', 'based', 'string', 'op', 'eof'
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    """Scan source text into tokens.

    Raises VerilogSyntaxError for characters outside the language; the
    diagnostic message includes the byte offset of the offending character.
    """
    tokens: list[Token] = []
    pos = 0
    line = 1
    line_start = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            col = pos - line_start + 1
            ch = text[pos]
            raise VerilogSyntaxError([
                SyntaxIssue(line, col, f"illegal character {ch!r} at byte offset {pos}")
            ])
        lexeme = m.group(0)
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            col = pos - line_start + 1
            if kind == "id" and lexeme in KEYWORDS:
                kind = "keyword"
            tokens.append(Token(kind, lexeme, line, col))
        nl = lexeme.count("\n")
        if nl:
            line += nl
            line_start = pos + lexeme.rfind("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, max(1, n - line_start + 1)))
    return tokens
