"""S-expression reader and printer.

The wire grammar for kernel terms and types is fixed:

    term ::= (var <name> <type>) | (const <name> <type>)
           | (app <term> <term>) | (lam <name> <type> <term>)
    type ::= (tv <name>) | bool | (d <n>) | (arrow <type> <type>)

This module only deals in raw s-expressions: symbols (str), naturals (int)
and nodes (tuple).  `print_sexp(parse_sexp(s))` reproduces `s` up to
whitespace, and `parse_sexp(print_sexp(x)) == x` exactly.
"""

from __future__ import annotations

from .errors import SexpError

Sexp = "str | int | tuple"

_WS = " \t\r\n"
_DELIM = _WS + "();"


def tokenize(text: str) -> list[tuple[str, str, int]]:
    """Return (kind, value, line) triples; kind is 'open', 'close' or 'atom'."""
    toks = []
    i, n, line = 0, len(text), 1
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            i += 1
        elif c in _WS:
            i += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c == "(":
            toks.append(("open", "(", line))
            i += 1
        elif c == ")":
            toks.append(("close", ")", line))
            i += 1
        else:
            j = i
            while j < n and text[j] not in _DELIM:
                j += 1
            toks.append(("atom", text[i:j], line))
            i = j
    return toks


def _atom(value: str):
    return int(value) if value.isdigit() else value


def parse_many(text: str) -> list:
    """Parse a sequence of s-expressions."""
    toks = tokenize(text)
    out, stack = [], []
    for kind, value, line in toks:
        if kind == "open":
            stack.append([])
        elif kind == "close":
            if not stack:
                raise SexpError("unbalanced ')'", line)
            node = tuple(stack.pop())
            (stack[-1] if stack else out).append(node)
        else:
            (stack[-1] if stack else out).append(_atom(value))
    if stack:
        raise SexpError("unbalanced '(' at end of input")
    return out


def parse_sexp(text: str):
    """Parse exactly one s-expression."""
    items = parse_many(text)
    if len(items) != 1:
        raise SexpError(f"expected one s-expression, found {len(items)}")
    return items[0]


def print_sexp(x) -> str:
    if isinstance(x, tuple):
        return "(" + " ".join(print_sexp(e) for e in x) + ")"
    if isinstance(x, bool):
        raise SexpError(f"cannot print {x!r}")
    if isinstance(x, int):
        return str(x)
    if isinstance(x, str):
        if x == "" or any(ch in _DELIM for ch in x):
            raise SexpError(f"symbol {x!r} contains delimiter characters")
        return x
    raise SexpError(f"cannot print {type(x).__name__} as an s-expression")
