"""Line-oriented text format for protocols.

A protocol file looks like::

    # five-cycle from two emitters
    dim 3
    emitters e0 e1
    H e0
    HDAG e1
    X e0 2
    Z e0 1
    CZ e0 e1 2
    PUMP e0 p1
    CZ p1 e1 1
    MEAS e0 o1
    CORR p3 Z (q-1)*o1
    ORDER p1 p2 p3

``dim`` comes first, ``emitters`` second, then instructions.  ``#`` starts
a comment, blank lines are ignored.  Correction exponents are arithmetic
expressions in integers, the symbol ``q``, and outcome variables, and must
be linear in the outcomes.  ``ORDER`` (optional, at most once) fixes the
presentation order of the photons; the default is pump order.  Every
syntax error is reported with its 1-based line number.
"""

from __future__ import annotations

import re

from .engine import (
    Correct,
    GateCZ,
    GateH,
    GateHdag,
    GateX,
    GateZ,
    Instruction,
    MeasureZ,
    Protocol,
    ProtocolValidationError,
    Pump,
)


class ProtocolParseError(ValueError):
    """Syntax or structure error in a protocol file."""

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


_LABEL_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def _label(token: str, what: str, line: int) -> str:
    if token == "q" or not _LABEL_RE.match(token):
        raise ProtocolParseError(f"invalid {what} {token!r}", line)
    return token


def _integer(token: str, what: str, line: int) -> int:
    try:
        return int(token, 10)
    except ValueError:
        raise ProtocolParseError(f"{what} must be an integer, got {token!r}", line) from None


# ============================================================
#  Correction-exponent expressions
# ============================================================

# A parsed expression is kept in canonical linear form: a constant plus
# integer coefficients on outcome variables.


class _Linear:
    __slots__ = ("const", "coeffs")

    def __init__(self, const: int = 0, coeffs: dict[str, int] | None = None):
        self.const = const
        self.coeffs = coeffs or {}

    def add(self, other: "_Linear", sign: int) -> "_Linear":
        coeffs = dict(self.coeffs)
        for var, c in other.coeffs.items():
            coeffs[var] = coeffs.get(var, 0) + sign * c
        return _Linear(self.const + sign * other.const, coeffs)

    def scale(self, k: int) -> "_Linear":
        return _Linear(k * self.const, {v: k * c for v, c in self.coeffs.items()})

    @property
    def is_constant(self) -> bool:
        return all(c == 0 for c in self.coeffs.values())


_EXPR_TOKEN = re.compile(r"\s*(\d+|[A-Za-z_][A-Za-z0-9_]*|[()+\-*])")


def _tokenize_expr(text: str, line: int) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _EXPR_TOKEN.match(text, pos)
        if not m:
            raise ProtocolParseError(
                f"bad character {text[pos:].lstrip()[:1]!r} in expression {text!r}", line
            )
        tokens.append(m.group(1))
        pos = m.end()
    return tokens


class _ExprParser:
    """Recursive-descent parser for +, -, * over ints, q, and outcome vars."""

    def __init__(self, tokens: list[str], q: int, line: int):
        self.tokens = tokens
        self.pos = 0
        self.q = q
        self.line = line

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ProtocolParseError("unexpected end of expression", self.line)
        self.pos += 1
        return tok

    def parse(self) -> _Linear:
        value = self.expr()
        if self.peek() is not None:
            raise ProtocolParseError(f"trailing token {self.peek()!r} in expression", self.line)
        return value

    def expr(self) -> _Linear:
        value = self.term()
        while self.peek() in ("+", "-"):
            op = self.next()
            value = value.add(self.term(), 1 if op == "+" else -1)
        return value

    def term(self) -> _Linear:
        value = self.unary()
        while self.peek() == "*":
            self.next()
            rhs = self.unary()
            # Products must stay linear in the outcome variables.
            if value.is_constant:
                value = rhs.scale(value.const)
            elif rhs.is_constant:
                value = value.scale(rhs.const)
            else:
                raise ProtocolParseError(
                    "correction exponent must be linear in outcome variables",
                    self.line,
                )
        return value

    def unary(self) -> _Linear:
        if self.peek() == "-":
            self.next()
            return self.unary().scale(-1)
        return self.atom()

    def atom(self) -> _Linear:
        tok = self.next()
        if tok == "(":
            value = self.expr()
            if self.next() != ")":
                raise ProtocolParseError("unbalanced parentheses in expression", self.line)
            return value
        if tok.isdigit():
            return _Linear(int(tok))
        if tok == "q":
            return _Linear(self.q)
        if _LABEL_RE.match(tok):
            return _Linear(0, {tok: 1})
        raise ProtocolParseError(f"unexpected token {tok!r} in expression", self.line)


def parse_correction_expression(text: str, q: int, line: int = 0) -> tuple[tuple[tuple[int, str], ...], int]:
    """Parse an exponent expression into ((coeff, var), ...) and a constant."""
    tokens = _tokenize_expr(text, line)
    if not tokens:
        raise ProtocolParseError("empty correction expression", line)
    lin = _ExprParser(tokens, q, line).parse()
    terms = tuple((c, v) for v, c in sorted(lin.coeffs.items()) if c != 0)
    return terms, lin.const


# ============================================================
#  File parser
# ============================================================

_OPCODES = ("H", "HDAG", "X", "Z", "CZ", "PUMP", "MEAS", "CORR")


def parse_protocol(text: str, name: str | None = None) -> Protocol:
    """Parse protocol source text into a validated :class:`Protocol`."""
    q: int | None = None
    emitters: tuple[str, ...] | None = None
    instructions: list[Instruction] = []
    order: tuple[str, ...] | None = None

    live: set[str] = set()
    photons: list[str] = []
    measured: set[str] = set()
    bound: set[str] = set()

    def need_live(label: str, line: int) -> None:
        if label in live:
            return
        if label in measured:
            raise ProtocolParseError(f"emitter {label!r} was already measured", line)
        raise ProtocolParseError(f"unknown site {label!r}", line)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        fields = stripped.split()
        head, args = fields[0], fields[1:]

        if q is None:
            if head != "dim":
                raise ProtocolParseError(
                    f"expected 'dim <q>' as the first directive, got {head!r}", lineno
                )
            if len(args) != 1:
                raise ProtocolParseError("dim takes exactly one value", lineno)
            value = _integer(args[0], "dim", lineno)
            if value < 2:
                raise ProtocolParseError(f"dim must be >= 2, got {value}", lineno)
            q = value
            continue

        if head == "dim":
            raise ProtocolParseError("duplicate dim directive", lineno)

        if emitters is None:
            if head != "emitters":
                raise ProtocolParseError(
                    f"expected 'emitters <labels...>' before instructions, got {head!r}",
                    lineno,
                )
            if not args:
                raise ProtocolParseError("emitters directive needs at least one label", lineno)
            labels = tuple(_label(a, "emitter label", lineno) for a in args)
            if len(set(labels)) != len(labels):
                raise ProtocolParseError(f"duplicate emitter labels: {list(labels)}", lineno)
            emitters = labels
            live.update(labels)
            continue

        if head == "emitters":
            raise ProtocolParseError("duplicate emitters directive", lineno)

        if head == "ORDER":
            if order is not None:
                raise ProtocolParseError("duplicate ORDER directive", lineno)
            labels = tuple(_label(a, "photon label", lineno) for a in args)
            if sorted(labels) != sorted(photons):
                raise ProtocolParseError(
                    f"ORDER must list each pumped photon exactly once; "
                    f"pumped so far: {photons}",
                    lineno,
                )
            order = labels
            continue

        if head == "H" or head == "HDAG":
            if len(args) != 1:
                raise ProtocolParseError(f"{head} takes one target", lineno)
            target = _label(args[0], "target", lineno)
            need_live(target, lineno)
            instructions.append(GateH(target) if head == "H" else GateHdag(target))
        elif head in ("X", "Z"):
            if len(args) != 2:
                raise ProtocolParseError(f"{head} takes a target and an exponent", lineno)
            target = _label(args[0], "target", lineno)
            need_live(target, lineno)
            power = _integer(args[1], f"{head} exponent", lineno)
            instructions.append(GateX(target, power) if head == "X" else GateZ(target, power))
        elif head == "CZ":
            if len(args) != 3:
                raise ProtocolParseError("CZ takes two targets and a weight", lineno)
            a = _label(args[0], "target", lineno)
            b = _label(args[1], "target", lineno)
            need_live(a, lineno)
            need_live(b, lineno)
            if a == b:
                raise ProtocolParseError("CZ needs two distinct targets", lineno)
            w = _integer(args[2], "CZ weight", lineno)
            instructions.append(GateCZ(a, b, w))
        elif head == "PUMP":
            if len(args) != 2:
                raise ProtocolParseError("PUMP takes an emitter and a fresh photon label", lineno)
            src = _label(args[0], "emitter", lineno)
            if src not in emitters:
                raise ProtocolParseError(f"PUMP source {src!r} is not an emitter", lineno)
            need_live(src, lineno)
            ph = _label(args[1], "photon label", lineno)
            if ph in live or ph in measured:
                raise ProtocolParseError(f"label {ph!r} is already in use", lineno)
            live.add(ph)
            photons.append(ph)
            instructions.append(Pump(src, ph))
        elif head == "MEAS":
            if len(args) != 2:
                raise ProtocolParseError("MEAS takes an emitter and an outcome variable", lineno)
            src = _label(args[0], "emitter", lineno)
            if src not in emitters:
                raise ProtocolParseError(f"MEAS target {src!r} is not an emitter", lineno)
            need_live(src, lineno)
            var = _label(args[1], "outcome variable", lineno)
            if var in bound:
                raise ProtocolParseError(f"outcome variable {var!r} bound twice", lineno)
            live.discard(src)
            measured.add(src)
            bound.add(var)
            instructions.append(MeasureZ(src, var))
        elif head == "CORR":
            if len(args) < 3:
                raise ProtocolParseError(
                    "CORR takes a target, the gate kind Z, and an exponent expression", lineno
                )
            target = _label(args[0], "target", lineno)
            need_live(target, lineno)
            if args[1] != "Z":
                raise ProtocolParseError(
                    f"corrections are Z powers; got gate kind {args[1]!r}", lineno
                )
            terms, const = parse_correction_expression(" ".join(args[2:]), q, lineno)
            for _, var in terms:
                if var not in bound:
                    raise ProtocolParseError(f"unknown outcome variable {var!r}", lineno)
            instructions.append(Correct(target, terms, const))
        else:
            raise ProtocolParseError(
                f"unknown directive {head!r}; expected one of "
                f"{', '.join(_OPCODES + ('ORDER',))}",
                lineno,
            )

    if q is None:
        raise ProtocolParseError("empty protocol: missing dim directive")
    if emitters is None:
        raise ProtocolParseError("protocol has no emitters directive")
    if order is None:
        order = tuple(photons)

    protocol = Protocol(q, emitters, tuple(instructions), order, name)
    try:
        protocol.validate()
    except ProtocolValidationError as exc:
        # Backstop for defects the line scan cannot attribute to one line
        # (e.g. an emitter that is never measured).
        raise ProtocolParseError(str(exc)) from exc
    return protocol
