"""Compact record expressions such as ``[WWBB]^3 WBB`` or ``B^5W``.

Grammar (whitespace is ignored everywhere)::

    Record := Term+
    Term   := ('B' | 'W' | '[' Record ']') ('^' positive-integer)?

An empty input denotes the empty record.
"""

from __future__ import annotations

from .core import ColorRecord

# Repetitions covering at least this many symbols are rendered compressed.
MIN_COMPRESSED = 8
MAX_BLOCK = 16


class RecordSyntaxError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte offset {offset}")
        self.offset = offset
        self.reason = message


class _Parser:
    def __init__(self, text: str):
        self.data = text.encode("utf-8")
        self.i = 0

    def skip(self):
        while self.i < len(self.data) and self.data[self.i] in b" \t\r\n":
            self.i += 1

    def peek(self):
        self.skip()
        return self.data[self.i : self.i + 1]

    def record(self, closing: bool) -> str:
        terms = []
        start = self.i
        while True:
            c = self.peek()
            if c == b"" or c == b"]":
                break
            terms.append(self.term())
        if not terms and closing:
            raise RecordSyntaxError("empty group", start)
        return "".join(terms)

    def term(self) -> str:
        c = self.peek()
        at = self.i
        if c in (b"B", b"W"):
            self.i += 1
            body = c.decode()
        elif c == b"[":
            self.i += 1
            body = self.record(closing=True)
            if self.peek() != b"]":
                raise RecordSyntaxError("expected ']'", self.i)
            self.i += 1
        else:
            raise RecordSyntaxError(f"unexpected character {c.decode(errors='replace')!r}", at)
        if self.peek() == b"^":
            self.i += 1
            body *= self.count()
        return body

    def count(self) -> int:
        self.skip()
        start = self.i
        while self.i < len(self.data) and self.data[self.i : self.i + 1].isdigit():
            self.i += 1
        if start == self.i:
            raise RecordSyntaxError("expected repetition count", start)
        k = int(self.data[start : self.i])
        if k == 0:
            raise RecordSyntaxError("zero repetition", start)
        return k


def parse_record(text: str, start: int = 1) -> ColorRecord:
    parser = _Parser(text)
    body = parser.record(closing=False)
    if parser.peek() != b"":
        raise RecordSyntaxError("unmatched ']'", parser.i)
    return ColorRecord(body, start)


def render(record: ColorRecord | str) -> str:
    """Literal text, with repetitions covering >= 8 symbols run-length compressed."""
    s = record.symbols if isinstance(record, ColorRecord) else record
    out = []
    i = 0
    n = len(s)
    while i < n:
        best = None
        for b in range(1, min(MAX_BLOCK, (n - i) // 2) + 1):
            block = s[i : i + b]
            k = 1
            while s.startswith(block, i + k * b):
                k += 1
            if k >= 2 and b * k >= MIN_COMPRESSED and (best is None or b * k > best[0] * best[1]):
                best = (b, k)
        if best is None:
            out.append(s[i])
            i += 1
            continue
        b, k = best
        block = s[i : i + b]
        out.append(f"{block}^{k}" if b == 1 else f"[{block}]^{k}")
        i += b * k
    return "".join(out)
