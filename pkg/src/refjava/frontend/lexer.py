"""Tokenizer for the Java subset."""

from __future__ import annotations

from dataclasses import dataclass

from ..spans import Span

KEYWORDS = {
    "class", "interface", "public", "private", "protected", "static",
    "void", "int", "boolean", "true", "false", "if", "else", "while",
    "return", "new", "this",
}

_TWO_CHAR = {"==", "!=", "<=", ">=", "&&", "||"}
_ONE_CHAR = set("{}();,=.@+-*/%!<>")


class LexError(Exception):
    def __init__(self, message: str, span: Span):
        super().__init__(message)
        self.message = message
        self.span = span


@dataclass(frozen=True)
class Token:
    kind: str  # "ident" | "keyword" | "int" | "string" | "punct" | "eof"
    text: str
    span: Span
    # For strings: cooked value plus the file offset of every cooked char.
    value: str | None = None
    offsets: tuple[int, ...] | None = None


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            i += 1
            continue
        if text.startswith("//", i):
            j = text.find("\n", i)
            i = n if j < 0 else j + 1
            continue
        if text.startswith("/*", i):
            j = text.find("*/", i + 2)
            if j < 0:
                raise LexError("unterminated block comment", Span(i, n))
            i = j + 2
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("int", text[i:j], Span(i, j)))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = "keyword" if word in KEYWORDS else "ident"
            tokens.append(Token(kind, word, Span(i, j)))
            i = j
            continue
        if ch == '"':
            cooked: list[str] = []
            offsets: list[int] = []
            j = i + 1
            while j < n and text[j] != '"':
                if text[j] == "\\":
                    if j + 1 >= n or text[j + 1] not in ('"', "\\"):
                        raise LexError("unsupported escape sequence", Span(j, j + 2))
                    cooked.append(text[j + 1])
                    offsets.append(j)
                    j += 2
                elif text[j] == "\n":
                    raise LexError("unterminated string literal", Span(i, j))
                else:
                    cooked.append(text[j])
                    offsets.append(j)
                    j += 1
            if j >= n:
                raise LexError("unterminated string literal", Span(i, n))
            offsets.append(j)  # position of the closing quote = end sentinel
            tokens.append(
                Token(
                    "string",
                    text[i : j + 1],
                    Span(i, j + 1),
                    value="".join(cooked),
                    offsets=tuple(offsets),
                )
            )
            i = j + 1
            continue
        two = text[i : i + 2]
        if two in _TWO_CHAR:
            tokens.append(Token("punct", two, Span(i, i + 2)))
            i += 2
            continue
        if ch in _ONE_CHAR:
            tokens.append(Token("punct", ch, Span(i, i + 1)))
            i += 1
            continue
        raise LexError(f"unexpected character {ch!r}", Span(i, i + 1))
    tokens.append(Token("eof", "", Span(n, n)))
    return tokens
