"""Lexer and term-level parsing shared by the ontology and rule formats."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Tuple

from dtd.kg.terms import (
    RESERVED_NAMESPACES,
    TYPE,
    XSD_DECIMAL,
    XSD_INTEGER,
    Term,
    Triple,
    bnode,
    iri,
    literal,
    var,
)


class ParseError(ValueError):
    """Syntax or well-formedness error carrying a source position."""

    def __init__(self, message: str, line: int = 0, column: int = 0, source: str = "") -> None:
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        where = f"{source}:" if source else ""
        super().__init__(f"{where}{line}:{column}: {message}")


@dataclass(frozen=True)
class Token:
    kind: str  # IRIREF PNAME VAR BNODE STRING NUMBER WORD PUNCT DTYPE EOF
    value: str
    line: int
    column: int


_TOKEN_RE = re.compile(
    r"""
    (?P<WS>[ \t\r]+)
  | (?P<NL>\n)
  | (?P<COMMENT>\#[^\n]*)
  | (?P<IRIREF><[^<>"{}|^`\\\s]*>)
  | (?P<STRING>"(?:[^"\\\n]|\\.)*")
  | (?P<DTYPE>\^\^)
  | (?P<VAR>\?[A-Za-z_][A-Za-z0-9_]*)
  | (?P<BNODE>_:[A-Za-z0-9_]+)
  | (?P<NUMBER>[+-]?[0-9]+(?:\.[0-9]+)?(?![A-Za-z_:]))
  | (?P<PNAME>(?:[A-Za-z][A-Za-z0-9_-]*)?:(?:[A-Za-z0-9_](?:[A-Za-z0-9_.-]*[A-Za-z0-9_-])?)?)
  | (?P<WORD>@?[A-Za-z_][A-Za-z0-9_-]*)
  | (?P<PUNCT>[.;,{}])
    """,
    re.VERBOSE,
)

_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", '"': '"', "\\": "\\"}


def tokenize(text: str, source: str = "") -> List[Token]:
    tokens: List[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1, source)
        kind = m.lastgroup
        value = m.group()
        col = pos - line_start + 1
        if kind == "NL":
            line += 1
            line_start = m.end()
        elif kind not in ("WS", "COMMENT"):
            tokens.append(Token(kind, value, line, col))
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens


def _unescape(body: str) -> str:
    return re.sub(r"\\(.)", lambda m: _ESCAPES.get(m.group(1), m.group(1)), body)


class TokenStream:
    """Cursor over tokens with prefix-aware term parsing."""

    def __init__(self, tokens: List[Token], prefixes: Optional[Mapping[str, str]] = None, source: str = "") -> None:
        self.tokens = tokens
        self.pos = 0
        self.prefixes: Dict[str, str] = dict(prefixes or {})
        self.source = source

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def at_end(self) -> bool:
        return self.peek().kind == "EOF"

    def error(self, message: str, tok: Optional[Token] = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(message, tok.line, tok.column, self.source)

    def expect(self, kind: str, value: Optional[str] = None) -> Token:
        tok = self.next()
        if tok.kind != kind or (value is not None and tok.value != value):
            want = value if value is not None else kind
            got = tok.value or "end of input"
            raise self.error(f"expected {want!r}, found {got!r}", tok)
        return tok

    def accept(self, kind: str, value: Optional[str] = None) -> Optional[Token]:
        tok = self.peek()
        if tok.kind == kind and (value is None or tok.value == value):
            return self.next()
        return None

    def is_keyword(self, *words: str) -> bool:
        tok = self.peek()
        return tok.kind == "WORD" and tok.value.upper() in words

    # -- directives -------------------------------------------------------
    def prefix_directive(self) -> bool:
        """Consume ``@prefix p: <iri> .`` or ``PREFIX p: <iri>``; False if absent."""
        tok = self.peek()
        if tok.kind != "WORD" or tok.value not in ("@prefix", "PREFIX", "prefix"):
            return False
        self.next()
        name = self.expect("PNAME")
        if not name.value.endswith(":"):
            raise self.error("prefix name must end with ':'", name)
        target = self.expect("IRIREF")
        self.prefixes[name.value[:-1]] = target.value[1:-1]
        if tok.value == "@prefix":
            self.expect("PUNCT", ".")
        else:
            self.accept("PUNCT", ".")
        return True

    # -- terms ------------------------------------------------------------
    def expand(self, tok: Token) -> str:
        prefix, _, local = tok.value.partition(":")
        if prefix not in self.prefixes:
            raise self.error(f"unknown prefix {prefix + ':'!r}", tok)
        return self.prefixes[prefix] + local

    def _iri(self, tok: Token) -> Term:
        value = tok.value[1:-1] if tok.kind == "IRIREF" else self.expand(tok)
        if value.startswith(RESERVED_NAMESPACES):
            raise self.error(f"IRI {value!r} lies in a reserved engine namespace", tok)
        return iri(value)

    def term(self, allow_vars: bool, allow_bnodes: bool, position: str) -> Term:
        tok = self.next()
        if tok.kind in ("IRIREF", "PNAME"):
            return self._iri(tok)
        if tok.kind == "WORD" and tok.value == "a" and position == "predicate":
            return TYPE
        if tok.kind == "VAR":
            if not allow_vars:
                raise self.error(f"variable {tok.value} not allowed here", tok)
            return var(tok.value)
        if tok.kind == "BNODE":
            if not allow_bnodes:
                raise self.error(f"blank node {tok.value} not allowed here", tok)
            return bnode(tok.value[2:])
        if position == "object":
            if tok.kind == "STRING":
                body = _unescape(tok.value[1:-1])
                datatype = ""
                if self.accept("DTYPE"):
                    dt = self.next()
                    if dt.kind not in ("IRIREF", "PNAME"):
                        raise self.error("expected datatype IRI after '^^'", dt)
                    datatype = dt.value[1:-1] if dt.kind == "IRIREF" else self.expand(dt)
                return literal(body, datatype)
            if tok.kind == "NUMBER":
                return literal(tok.value, XSD_DECIMAL if "." in tok.value else XSD_INTEGER)
        raise self.error(f"unexpected {tok.value or 'end of input'!r} in {position} position", tok)

    def triples_block(self, allow_vars: bool, allow_bnodes: bool, stop: Tuple[str, ...]) -> List[Tuple[Triple, Token]]:
        """Parse ``S P O (; P O)* (, O)* .`` statements until a stop token.

        ``stop`` lists PUNCT values or keywords that end the block; the final
        statement's ``.`` is optional before a stop token.
        """
        out: List[Tuple[Triple, Token]] = []
        while True:
            tok = self.peek()
            if tok.kind == "EOF" or (tok.kind == "PUNCT" and tok.value in stop) or (
                tok.kind == "WORD" and tok.value.upper() in stop
            ):
                return out
            subj = self.term(allow_vars, allow_bnodes, "subject")
            while True:
                ptok = self.peek()
                pred = self.term(allow_vars, False, "predicate")
                while True:
                    obj = self.term(allow_vars, allow_bnodes, "object")
                    out.append((Triple(subj, pred, obj), ptok))
                    if not self.accept("PUNCT", ","):
                        break
                if self.accept("PUNCT", ";"):
                    nxt = self.peek()
                    if nxt.kind == "PUNCT" and nxt.value in (".",) + stop:
                        break
                    continue
                break
            if self.accept("PUNCT", "."):
                continue
            nxt = self.peek()
            if nxt.kind == "EOF" or (nxt.kind == "PUNCT" and nxt.value in stop) or (
                nxt.kind == "WORD" and nxt.value.upper() in stop
            ):
                if "EOF" in stop or nxt.kind != "EOF":
                    return out
            raise self.error(f"expected '.', found {nxt.value or 'end of input'!r}", nxt)
