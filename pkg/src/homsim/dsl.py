"""Line-oriented description format for two-port interferometer circuits.

Grammar::

    file   = header stmt+
    header = "circuit" NAME
    stmt   = input | elem | detect
    input  = "in" PORT AMPEXPR
    elem   = "bs" SIGN | "bs" "superposed" CASE | "phase" PORT PHEXPR
    detect = "detect" PORT PORT

``#`` starts a comment. Ports are single letters and come in layers of two:
a/b feed the first beam splitter, c/d leave it, e/f leave the second, and so
on. An amplitude is ``NUMBER``, ``exp(i*PHASE)`` or ``NUMBER*exp(i*PHASE)``.
A phase is a literal in radians (``0.3``, ``pi``, ``pi/2``, ``-pi/2``,
``2pi``, ``3*pi/4``) or a parameter name. ``CASE`` is
``same|opposite symmetric|antisymmetric +|-``.

Example (a HOM beam splitter)::

    circuit hom
    in a 1
    in b exp(i*theta)
    bs +
    detect c d
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

from .numerics import BasisSign
from .phase_basis import BasisCase, Combination, Relation

PARAMETERS = ("theta", "zeta")
INPUT_PORTS = ("a", "b")

_NUMBER = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_PI = re.compile(r"([+-]?)(?:(\d+(?:\.\d*)?)\*?)?pi(?:/(\d+(?:\.\d*)?))?")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_EXP = re.compile(r"exp\(i\*(.+)\)")
_PORT = re.compile(r"[a-z]")


class ParseError(ValueError):
    def __init__(self, line: int, column: int, message: str, snippet: str):
        self.line = line
        self.column = column
        self.message = message
        self.snippet = snippet
        super().__init__(f"line {line}, column {column}: {message} ({snippet!r})")


class ValidationError(ValueError):
    def __init__(self, message: str, element_index: int | None = None):
        self.element_index = element_index
        self.message = message
        where = f"element {element_index}: " if element_index is not None else ""
        super().__init__(where + message)


# --- AST -------------------------------------------------------------------

@dataclass(frozen=True)
class Literal:
    value: float


@dataclass(frozen=True)
class Param:
    name: str


PhaseExpr = Union[Literal, Param]


@dataclass(frozen=True)
class Amplitude:
    magnitude: float = 1.0
    phase: PhaseExpr | None = None


@dataclass(frozen=True)
class BS:
    sign: BasisSign


@dataclass(frozen=True)
class SuperposedBS:
    case: BasisCase


@dataclass(frozen=True)
class Phase:
    port: str
    expr: PhaseExpr


Element = Union[BS, SuperposedBS, Phase]


@dataclass(frozen=True)
class Circuit:
    name: str
    inputs: tuple  # ((port, Amplitude), ...) in port order
    elements: tuple
    detectors: tuple

    def parameters(self) -> set:
        names = {amp.phase.name for _, amp in self.inputs if isinstance(amp.phase, Param)}
        names |= {el.expr.name for el in self.elements
                  if isinstance(el, Phase) and isinstance(el.expr, Param)}
        return names

    @property
    def n_splitters(self) -> int:
        return sum(isinstance(el, (BS, SuperposedBS)) for el in self.elements)

    def output_ports(self) -> tuple:
        return layer_ports(self.n_splitters)


def layer_ports(layer: int) -> tuple:
    """Port pair after ``layer`` beam splitters (0 -> a/b, 1 -> c/d, ...)."""
    if not 0 <= layer < 13:
        raise ValueError(f"no port labels for layer {layer}")
    first = chr(ord("a") + 2 * layer)
    return first, chr(ord(first) + 1)


# --- angles ----------------------------------------------------------------

def parse_angle(text: str) -> float:
    """Radians from ``'0.25'``, ``'pi'``, ``'pi/2'``, ``'-pi/2'``, ``'2pi'``, ``'3*pi/4'``."""
    t = text.strip().replace(" ", "")
    m = _PI.fullmatch(t)
    if m:
        sign, mult, div = m.groups()
        val = math.pi
        if mult is not None:
            val = float(mult) * val
        if div is not None:
            val = val / float(div)
        return -val if sign == "-" else val
    if _NUMBER.fullmatch(t):
        val = float(t)
        if math.isfinite(val):
            return val
    raise ValueError(f"malformed angle {text!r}")


_ANGLE_NAMES = {
    math.pi: "pi",
    -math.pi: "-pi",
    math.pi / 2: "pi/2",
    -math.pi / 2: "-pi/2",
    2 * math.pi: "2pi",
    -2 * math.pi: "-2pi",
}


def format_angle(value: float) -> str:
    return _ANGLE_NAMES.get(value, repr(float(value)))


def _parse_phase(text: str) -> PhaseExpr:
    if _PI.fullmatch(text) or _NUMBER.fullmatch(text):
        return Literal(parse_angle(text))
    if _NAME.fullmatch(text):
        return Param(text)
    raise ValueError(f"malformed number {text!r}")


def _render_phase(expr: PhaseExpr) -> str:
    return expr.name if isinstance(expr, Param) else format_angle(expr.value)


def _parse_amplitude(text: str) -> Amplitude:
    m = _EXP.fullmatch(text)
    if m:
        return Amplitude(1.0, _parse_phase(m.group(1)))
    if "*exp(" in text:
        mag, rest = text.split("*", 1)
        m = _EXP.fullmatch(rest)
        if m is None:
            raise ValueError(f"malformed amplitude {text!r}")
        return Amplitude(_parse_magnitude(mag), _parse_phase(m.group(1)))
    return Amplitude(_parse_magnitude(text), None)


def _parse_magnitude(text: str) -> float:
    if not _NUMBER.fullmatch(text):
        raise ValueError(f"malformed number {text!r}")
    val = float(text)
    if not math.isfinite(val):
        raise ValueError(f"malformed number {text!r}")
    return val


def _render_amplitude(amp: Amplitude) -> str:
    if amp.phase is None:
        return repr(float(amp.magnitude))
    exp = f"exp(i*{_render_phase(amp.phase)})"
    return exp if amp.magnitude == 1.0 else f"{amp.magnitude!r}*{exp}"


# --- parser ----------------------------------------------------------------

class _Line:
    def __init__(self, lineno: int, raw: str):
        self.lineno = lineno
        self.raw = raw
        code = raw.split("#", 1)[0]
        self.code = code
        self.tokens = [(m.group(), m.start()) for m in re.finditer(r"\S+", code)]

    def error(self, message: str, token: int | None = None) -> ParseError:
        if token is not None and token < len(self.tokens):
            text, start = self.tokens[token]
            return ParseError(self.lineno, start + 1, message, text)
        stripped = self.code.rstrip()
        col = max(len(stripped), 1)
        return ParseError(self.lineno, col, message, stripped.strip())

    def rest(self, token: int) -> str:
        """Everything from ``token`` to the end of the code, whitespace removed."""
        start = self.tokens[token][1]
        return re.sub(r"\s+", "", self.code[start:])


def _parse_case(line: _Line) -> BasisCase:
    words = [t for t, _ in line.tokens[2:]]
    if len(words) != 3:
        raise line.error("superposed bs needs 'same|opposite symmetric|antisymmetric +|-'", 2)
    try:
        rel = Relation(words[0])
    except ValueError:
        raise line.error(f"unknown relation {words[0]!r}", 2) from None
    try:
        comb = Combination(words[1])
    except ValueError:
        raise line.error(f"unknown combination {words[1]!r}", 3) from None
    if words[2] not in ("+", "-"):
        raise line.error(f"unknown sign {words[2]!r}", 4)
    return BasisCase(rel, comb, BasisSign.from_symbol(words[2]))


def _check_port(line: _Line, token: int, allowed=None) -> str:
    text = line.tokens[token][0]
    if not _PORT.fullmatch(text) or (allowed is not None and text not in allowed):
        hint = f" (expected one of {', '.join(allowed)})" if allowed else ""
        raise line.error(f"undeclared port {text!r}{hint}", token)
    return text


def parse(source: str) -> Circuit:
    """Parse circuit text; raises :class:`ParseError` with line and column."""
    name = None
    inputs: dict = {}
    elements: list = []
    detectors = None
    last = None
    for lineno, raw in enumerate(source.splitlines() or [""], start=1):
        line = _Line(lineno, raw)
        if not line.tokens:
            continue
        last = line
        kw = line.tokens[0][0]
        nt = len(line.tokens)
        stmt = None
        if kw == "circuit":
            if name is not None:
                raise line.error("duplicate circuit header", 0)
            if nt != 2 or not _NAME.fullmatch(line.tokens[1][0]):
                raise line.error("expected 'circuit NAME'", 1 if nt > 1 else None)
            name = line.tokens[1][0]
            continue
        if kw == "in":
            if nt < 3:
                raise line.error("expected 'in PORT AMPLITUDE'")
            port = _check_port(line, 1, INPUT_PORTS)
            if port in inputs:
                raise line.error(f"duplicate input on port {port!r}", 1)
            try:
                amp = _parse_amplitude(line.rest(2))
            except ValueError as exc:
                raise line.error(str(exc), 2) from None
            stmt = ("in", port, amp)
        elif kw == "bs":
            if nt < 2:
                raise line.error("expected a sign or 'superposed' after bs")
            if line.tokens[1][0] == "superposed":
                stmt = ("el", SuperposedBS(_parse_case(line)))
            else:
                if nt != 2 or line.tokens[1][0] not in ("+", "-"):
                    raise line.error(f"unknown sign {line.tokens[1][0]!r}", 1)
                stmt = ("el", BS(BasisSign.from_symbol(line.tokens[1][0])))
        elif kw == "phase":
            if nt < 3:
                raise line.error("expected 'phase PORT PHASE'")
            port = _check_port(line, 1)
            try:
                expr = _parse_phase(line.rest(2))
            except ValueError as exc:
                raise line.error(str(exc), 2) from None
            stmt = ("el", Phase(port, expr))
        elif kw == "detect":
            if detectors is not None:
                raise line.error("duplicate detector statement", 0)
            if nt != 3:
                raise line.error("expected 'detect PORT PORT'", 3 if nt > 3 else None)
            p1 = _check_port(line, 1)
            p2 = _check_port(line, 2)
            if p1 == p2:
                raise line.error(f"duplicate detector port {p2!r}", 2)
            stmt = ("detect", (p1, p2))
        else:
            raise line.error(f"unknown keyword {kw!r}", 0)

        if name is None:
            raise line.error("missing 'circuit NAME' header before first statement", 0)
        if stmt[0] == "in":
            inputs[stmt[1]] = stmt[2]
        elif stmt[0] == "el":
            elements.append(stmt[1])
        else:
            detectors = stmt[1]

    if last is None:
        raise ParseError(1, 1, "empty circuit source", "")
    if name is None:
        raise last.error("missing 'circuit NAME' header")
    if detectors is None:
        raise last.error("missing 'detect PORT PORT' statement")
    return Circuit(name, tuple(sorted(inputs.items())), tuple(elements), detectors)


def render(c: Circuit) -> str:
    lines = [f"circuit {c.name}"]
    for port, amp in c.inputs:
        lines.append(f"in {port} {_render_amplitude(amp)}")
    for el in c.elements:
        if isinstance(el, BS):
            lines.append(f"bs {el.sign.symbol}")
        elif isinstance(el, SuperposedBS):
            cs = el.case
            lines.append(f"bs superposed {cs.relation.value} {cs.combination.value} "
                         f"{cs.primary_sign.symbol}")
        else:
            lines.append(f"phase {el.port} {_render_phase(el.expr)}")
    lines.append(f"detect {c.detectors[0]} {c.detectors[1]}")
    return "\n".join(lines) + "\n"


def validate(c: Circuit, bound=PARAMETERS) -> None:
    """Check port continuity, detector reachability and parameter closure."""
    if not c.elements:
        raise ValidationError("circuit has no elements")
    if not c.inputs:
        raise ValidationError("circuit has no inputs")
    for port, amp in c.inputs:
        if port not in INPUT_PORTS:
            raise ValidationError(f"input on undeclared port {port!r}")
        if isinstance(amp.phase, Param) and amp.phase.name not in bound:
            raise ValidationError(f"unbound parameter {amp.phase.name!r} on input {port!r}")
    if all(amp.magnitude == 0 for _, amp in c.inputs):
        raise ValidationError("all inputs have zero amplitude")
    layer = 0
    for idx, el in enumerate(c.elements):
        if isinstance(el, Phase):
            ports = layer_ports(layer)
            if el.port not in ports:
                raise ValidationError(
                    f"phase on port {el.port!r} but the current layer has ports {ports}", idx)
            if isinstance(el.expr, Param) and el.expr.name not in bound:
                raise ValidationError(f"unbound parameter {el.expr.name!r}", idx)
        else:
            layer += 1
            if layer > 12:
                raise ValidationError("too many beam splitters for port labels", idx)
    final = layer_ports(layer)
    for port in c.detectors:
        if port not in final:
            raise ValidationError(
                f"detector on undeclared port {port!r}; final layer ports are {final}")
    if sorted(c.detectors) != list(final):
        raise ValidationError(f"detectors must cover both final ports {final}")


BUILTINS = {
    "hom": "circuit hom\nin a 1\nin b exp(i*theta)\nbs +\ndetect c d\n",
    "mzi": "circuit mzi\nin a 1\nbs +\nphase d zeta\nbs +\ndetect e f\n",
    "one_input_bs": "circuit one_input_bs\nin a 1\nbs +\ndetect c d\n",
}


def builtin(name: str) -> Circuit:
    try:
        return parse(BUILTINS[name])
    except KeyError:
        raise ValueError(f"unknown builtin circuit {name!r}; choose from {sorted(BUILTINS)}") from None
