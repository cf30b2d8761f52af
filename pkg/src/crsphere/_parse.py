"""Small recursive-descent parser shared by the text formats.

Grammar (implicit multiplication by juxtaposition is allowed)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/')? unary)*
    unary  := ('+' | '-') unary | power
    power  := atom ('^' unary)?
    atom   := INTEGER | NAME | '(' expr ')'

Values are built through a caller-supplied algebra, so the same parser
reads both coefficient scalars and sphere polynomials.
"""
from __future__ import annotations

import re
from typing import Callable, Mapping

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


class ParseError(ValueError):
    pass


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        num, name, op = m.groups()
        if num is not None:
            tokens.append(("num", num))
        elif name is not None:
            tokens.append(("name", name))
        else:
            tokens.append(("op", "^" if op == "**" else op))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return tokens


def parse(text: str, symbols: Mapping[str, object], number: Callable[[int], object]):
    """Parse ``text`` using ``symbols`` for names and ``number`` for integers.

    The values must support ``+ - * /`` and integer ``**``.
    """
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty expression")
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else (None, None)

    def take():
        nonlocal pos
        tok = tokens[pos]
        pos += 1
        return tok

    def expr():
        val = term()
        while peek() in (("op", "+"), ("op", "-")):
            _, op = take()
            rhs = term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def starts_atom(tok):
        kind, v = tok
        return kind in ("num", "name") or tok == ("op", "(")

    def term():
        val = unary()
        while True:
            tok = peek()
            if tok in (("op", "*"), ("op", "/")):
                take()
                rhs = unary()
                val = val * rhs if tok[1] == "*" else val / rhs
            elif tok[0] is not None and starts_atom(tok):
                val = val * unary()
            else:
                return val

    def unary():
        tok = peek()
        if tok == ("op", "-"):
            take()
            return -unary()
        if tok == ("op", "+"):
            take()
            return unary()
        return power()

    def power():
        base = atom()
        if peek() == ("op", "^"):
            take()
            sign = 1
            while peek() in (("op", "-"), ("op", "+")):
                sign *= -1 if take()[1] == "-" else 1
            kind, v = take() if pos < len(tokens) else (None, None)
            if kind != "num":
                raise ParseError("exponent must be an integer literal")
            exp = sign * int(v)
            if exp < 0:
                return number(1) / base ** (-exp)
            return base ** exp
        return base

    def atom():
        if pos >= len(tokens):
            raise ParseError("unexpected end of input")
        kind, v = take()
        if kind == "num":
            return number(int(v))
        if kind == "name":
            if v not in symbols:
                raise ParseError(f"unknown symbol {v!r}")
            return symbols[v]
        if (kind, v) == ("op", "("):
            val = expr()
            if take() != ("op", ")"):
                raise ParseError("expected ')'")
            return val
        raise ParseError(f"unexpected token {v!r}")

    result = expr()
    if pos != len(tokens):
        raise ParseError(f"trailing input at token {tokens[pos][1]!r}")
    return result
