"""Text form of sequences and gauges.

Grammar (whitespace is ignored everywhere)::

    seq    := [prefix] (paren | [number '*'] '2^(' [number] 'j)' ['*(1+j)^' power] ['*log^' power])
    paren  := 'paren(' number ')'
    prefix := '[' number {',' number} ']:'
    gauge  := [number '*'] 'r^' power ['*(1+L)^' power]
    power  := number | '(' number ')'
    number := ['+'|'-'] digits ['.' digits] [('e'|'E') ['+'|'-'] digits] ['/' digits]

``log`` stands for ln(e+j) and ``L`` for |log2 r|.  A missing rate in ``2^(j)``
means 1.  The printer emits exact rationals, so ``parse_seq(format_seq(s)) == s``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import List, Optional, Tuple

from .gauge import GaugeExpr
from .seqcalc import SeqExpr, format_number


class ParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        self.offset = len(text[:pos].encode("utf-8"))
        self.text = text
        super().__init__(f"{message} at offset {self.offset}")


_NUMBER = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?(?:/\d+)?")


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def at_end(self) -> bool:
        self.skip()
        return self.pos >= len(self.text)

    def peek(self, literal: str) -> bool:
        save = self.pos
        ok = self._match(literal)
        self.pos = save
        return ok

    def _match(self, literal: str) -> bool:
        for ch in literal:
            self.skip()
            if self.pos < len(self.text) and self.text[self.pos] == ch:
                self.pos += 1
            else:
                return False
        return True

    def accept(self, literal: str) -> bool:
        save = self.pos
        if self._match(literal):
            return True
        self.pos = save
        return False

    def expect(self, literal: str, what: Optional[str] = None) -> None:
        save = self.pos
        if not self._match(literal):
            err = self.pos
            self.pos = save
            raise ParseError(f"expected {what or repr(literal)}", self.text, self._err_pos(err))

    def _err_pos(self, pos: int) -> int:
        while pos < len(self.text) and self.text[pos].isspace():
            pos += 1
        return pos

    def number_token(self) -> Optional[Tuple[str, int]]:
        """Read a number; whitespace inside it is tolerated."""
        self.skip()
        start = self.pos
        # collapse interior whitespace by scanning a compacted view
        compact: List[str] = []
        index: List[int] = []
        for i in range(start, len(self.text)):
            ch = self.text[i]
            if ch.isspace():
                continue
            compact.append(ch)
            index.append(i)
        m = _NUMBER.match("".join(compact))
        if not m:
            return None
        self.pos = index[m.end() - 1] + 1
        return m.group(0), start

    def number(self, what: str = "a number") -> Tuple[Fraction, str, int]:
        tok = self.number_token()
        if tok is None:
            raise ParseError(f"expected {what}", self.text, self._err_pos(self.pos))
        s, start = tok
        try:
            value = Fraction(s)
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"malformed number {s!r}", self.text, start) from None
        return value, s, start

    def power(self) -> Tuple[Fraction, str, int]:
        if self.accept("("):
            out = self.number()
            self.expect(")")
            return out
        return self.number()


def _scale(value: Fraction, text: str, start: int, src: str) -> float:
    f = float(value) if "/" in text else float(text)
    if not f > 0:
        raise ParseError("scale must be positive", src, start)
    return f


def parse_seq(text: str) -> SeqExpr:
    sc = _Scanner(text)
    prefix: Tuple[float, ...] = ()
    if sc.accept("["):
        vals = []
        while True:
            v, s, start = sc.number()
            vals.append(_scale(v, s, start, text))
            if sc.accept("]"):
                break
            sc.expect(",", "',' or ']'")
        sc.expect(":", "':' after prefix")
        prefix = tuple(vals)
    if sc.accept("paren("):
        a, _, _ = sc.number()
        sc.expect(")")
        out = SeqExpr(rate=a, prefix=prefix)
    else:
        scale = 1.0
        save = sc.pos
        tok = sc.number_token()
        if tok is not None and sc.accept("*"):
            scale = _scale(Fraction(tok[0]), tok[0], tok[1], text)
        else:
            sc.pos = save
        sc.expect("2^(", "'2^('")
        if sc.peek("j"):
            a = Fraction(1)
        else:
            a, _, _ = sc.number("a rate")
        sc.expect("j)", "'j)'")
        b = c = Fraction(0)
        seen_poly = seen_log = False
        while sc.accept("*"):
            if not seen_poly and not seen_log and sc.accept("(1+j)^"):
                b, _, _ = sc.power()
                seen_poly = True
            elif not seen_log and sc.accept("log^"):
                c, _, _ = sc.power()
                seen_log = True
            else:
                raise ParseError("expected '(1+j)^' or 'log^'", text, sc._err_pos(sc.pos))
        out = SeqExpr(scale=scale, rate=a, polylog=b, loglog=c, prefix=prefix)
    if not sc.at_end():
        raise ParseError("unexpected trailing input", text, sc.pos)
    return out


def parse_gauge(text: str, n: int = 1) -> GaugeExpr:
    sc = _Scanner(text)
    scale = 1.0
    save = sc.pos
    tok = sc.number_token()
    if tok is not None and sc.accept("*"):
        scale = _scale(Fraction(tok[0]), tok[0], tok[1], text)
    else:
        sc.pos = save
    sc.expect("r^", "'r^'")
    d, _, dstart = sc.power()
    if d < 0:
        raise ParseError("gauge exponent d must be nonnegative", text, dstart)
    beta = Fraction(0)
    if sc.accept("*"):
        sc.expect("(1+L)^", "'(1+L)^'")
        beta, _, _ = sc.power()
    if not sc.at_end():
        raise ParseError("unexpected trailing input", text, sc.pos)
    try:
        return GaugeExpr(scale=scale, d=d, beta=beta, n=n)
    except ValueError as exc:
        raise ParseError(str(exc), text, dstart) from None


def _power(x: Fraction) -> str:
    s = format_number(x)
    return f"({s})" if "/" in s else s


def format_seq(s: SeqExpr) -> str:
    out = ""
    if s.prefix:
        out += "[" + ",".join(repr(v) for v in s.prefix) + "]:"
    if s.scale != 1.0:
        out += repr(s.scale) + "*"
    rate = format_number(s.rate)
    out += f"2^({'' if s.rate == 1 else rate}j)"
    if s.polylog:
        out += f"*(1+j)^{_power(s.polylog)}"
    if s.loglog:
        out += f"*log^{_power(s.loglog)}"
    return out


def format_gauge(g: GaugeExpr) -> str:
    out = "" if g.scale == 1.0 else repr(g.scale) + "*"
    out += f"r^{_power(g.d)}"
    if g.beta:
        out += f"*(1+L)^{_power(g.beta)}"
    return out
