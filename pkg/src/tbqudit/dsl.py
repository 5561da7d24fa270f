"""Line-oriented circuit language (``.qbc`` files) and its IR.

Grammar, one statement per line, ``#`` starts a comment::

    qudit NAME WIDTH
    spin NAME
    gate (X|Y|Z|H|S|SDG|TG) NAME[i]
    u(theta, phi, psi0, psi1) NAME[i]
    ctrl (X|Y|Z|H|S|SDG|TG|u(...)) NAME[c] ... NAME[t]
    cnot NAME[m] NAME[n]
    toffoli NAME[m] NAME[n] NAME[p]
    qnd SPIN NAME[i]
    cz SPIN NAME1[m] NAME2[n]
    prepare NAME [re,im; re,im; ...]
    measure NAME

Angles accept float literals and arithmetic on ``pi``.
"""
from __future__ import annotations

import ast
import math
import operator
import re
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .bits import MAX_QUBITS
from .errors import ParseError
from .matrices import gate_matrix, NAMED_GATES

GATE_NAMES = ("X", "Y", "Z", "H", "S", "SDG", "TG")


@dataclass(frozen=True)
class Gate:
    name: str  # one of GATE_NAMES, or "U" with params
    qudit: str
    qubit: int
    params: tuple = ()
    line: int = field(default=0, compare=False)

    def matrix(self) -> np.ndarray:
        return _matrix(self.name, self.params)


@dataclass(frozen=True)
class Cnot:
    qudit: str
    control: int
    target: int
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Toffoli:
    qudit: str
    control1: int
    control2: int
    target: int
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ControlledU:
    name: str
    qudit: str
    controls: tuple
    target: int
    params: tuple = ()
    line: int = field(default=0, compare=False)

    def matrix(self) -> np.ndarray:
        return _matrix(self.name, self.params)


@dataclass(frozen=True)
class Qnd:
    spin: str
    qudit: str
    qubit: int
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class CrossCz:
    spin: str
    qudit1: str
    m: int
    qudit2: str
    n: int
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Prepare:
    qudit: str
    amplitudes: tuple
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Measure:
    qudit: str
    line: int = field(default=0, compare=False)


Statement = Union[Gate, Cnot, Toffoli, ControlledU, Qnd, CrossCz, Prepare, Measure]
GATE_STATEMENTS = (Gate, Cnot, Toffoli, ControlledU)


@dataclass
class CircuitIR:
    qudits: dict = field(default_factory=dict)  # name -> width, declaration order
    spins: list = field(default_factory=list)
    statements: list = field(default_factory=list)

    def width(self, qudit: str | None = None) -> int:
        if qudit is None:
            if len(self.qudits) != 1:
                raise ValueError("circuit declares more than one qudit")
            qudit = next(iter(self.qudits))
        return self.qudits[qudit]

    @property
    def is_single_qudit(self) -> bool:
        return len(self.qudits) == 1 and not any(isinstance(s, (Qnd, CrossCz)) for s in self.statements)

    def gates(self) -> list:
        return [s for s in self.statements if isinstance(s, GATE_STATEMENTS)]

    def prepared(self, qudit: str):
        for s in self.statements:
            if isinstance(s, Prepare) and s.qudit == qudit:
                return s
        return None


def _matrix(name, params):
    if name == "U":
        from .mzi import GateParams, cell_matrix
        return cell_matrix(GateParams(*params))
    return gate_matrix(name)


# --- angle expressions ------------------------------------------------------

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNARY = {ast.USub: operator.neg, ast.UAdd: operator.pos}


def _eval_angle(text: str) -> float:
    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            return _UNARY[type(node.op)](ev(node.operand))
        raise ValueError("unsupported expression")

    value = ev(ast.parse(text.strip(), mode="eval"))
    if not math.isfinite(value):
        raise ValueError("angle is not finite")
    return value


# --- parser -----------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>[ \t]+)
  | (?P<ref>[A-Za-z_]\w*\[\s*-?\d+\s*\])
  | (?P<u>[uU]\s*\([^)]*\))
  | (?P<list>\[[^\]]*\])
  | (?P<word>[A-Za-z_]\w*)
  | (?P<num>-?\d+)
  | (?P<bad>\S+)
""", re.VERBOSE)

_REF = re.compile(r"([A-Za-z_]\w*)\[\s*(-?\d+)\s*\]")


@dataclass
class _Tok:
    kind: str
    text: str
    col: int  # 1-based


class _Line:
    def __init__(self, text, lineno):
        self.lineno = lineno
        self.toks = []
        for m in _TOKEN.finditer(text):
            if m.lastgroup != "ws":
                self.toks.append(_Tok(m.lastgroup, m.group(), m.start() + 1))
        self.end_col = len(text) + 1

    def error(self, msg, tok=None):
        if tok is None:
            return ParseError(msg, self.lineno, self.end_col)
        return ParseError(msg, self.lineno, tok.col, tok.text)


class _Parser:
    def __init__(self):
        self.ir = CircuitIR()
        self.touched = set()  # qudits with gates applied
        self.measured = set()

    # helpers
    def expect_count(self, ln, toks, n, usage):
        if len(toks) < n:
            raise ln.error(f"missing operand; usage: {usage}")
        if len(toks) > n:
            raise ln.error(f"unexpected token; usage: {usage}", toks[n])

    def name(self, ln, tok):
        if tok.kind != "word":
            raise ln.error("expected a name", tok)
        return tok.text

    def qudit_name(self, ln, tok):
        name = self.name(ln, tok)
        if name not in self.ir.qudits:
            raise ln.error(f"undeclared qudit {name!r}", tok)
        return name

    def ref(self, ln, tok):
        if tok.kind != "ref":
            raise ln.error("expected a qubit reference NAME[index]", tok)
        m = _REF.fullmatch(tok.text)
        name, idx = m.group(1), int(m.group(2))
        if name not in self.ir.qudits:
            raise ln.error(f"undeclared qudit {name!r}", tok)
        width = self.ir.qudits[name]
        if not 0 <= idx < width:
            raise ln.error(f"qubit index {idx} out of range for qudit {name!r} of width {width}", tok)
        return name, idx

    def spin(self, ln, tok):
        name = self.name(ln, tok)
        if name not in self.ir.spins:
            raise ln.error(f"undeclared spin {name!r}", tok)
        return name

    def u_params(self, ln, tok):
        inner = tok.text[tok.text.index("(") + 1:-1]
        parts = inner.split(",")
        if len(parts) != 4:
            raise ln.error("u(...) takes four angles: theta, phi, psi0, psi1", tok)
        try:
            return tuple(_eval_angle(p) for p in parts)
        except (ValueError, SyntaxError, ZeroDivisionError, OverflowError):
            raise ln.error("malformed angle in u(...)", tok) from None

    def use(self, ln, tok, qudit):
        if qudit in self.measured:
            raise ln.error(f"qudit {qudit!r} was already measured; measurement is terminal", tok)
        self.touched.add(qudit)

    def same_qudit(self, ln, toks, refs):
        names = {r[0] for r in refs}
        if len(names) != 1:
            raise ln.error("all operands must belong to the same qudit", toks[1])
        idx = [r[1] for r in refs]
        if len(set(idx)) != len(idx):
            if len(idx) == 2:
                raise ln.error("control equals target", toks[2])
            raise ln.error("qubit indices must be distinct", toks[1])
        return refs[0][0], idx

    # statements
    def statement(self, ln):
        toks = ln.toks
        head = toks[0]
        kw = head.text.lower() if head.kind in ("word", "u") else None
        if head.kind == "u":
            kw = "u"
        handler = getattr(self, f"st_{kw}", None) if kw else None
        if handler is None:
            raise ln.error(f"unknown statement {head.text!r}", head)
        handler(ln, toks)

    def st_qudit(self, ln, toks):
        self.expect_count(ln, toks, 3, "qudit NAME WIDTH")
        name = self.name(ln, toks[1])
        if name in self.ir.qudits or name in self.ir.spins:
            raise ln.error(f"{name!r} already declared", toks[1])
        if toks[2].kind != "num":
            raise ln.error("width must be an integer", toks[2])
        width = int(toks[2].text)
        if not 1 <= width <= MAX_QUBITS:
            raise ln.error(f"width must be between 1 and {MAX_QUBITS}", toks[2])
        self.ir.qudits[name] = width

    def st_spin(self, ln, toks):
        self.expect_count(ln, toks, 2, "spin NAME")
        name = self.name(ln, toks[1])
        if name in self.ir.qudits or name in self.ir.spins:
            raise ln.error(f"{name!r} already declared", toks[1])
        self.ir.spins.append(name)

    def st_gate(self, ln, toks):
        usage = "gate (X|Y|Z|H|S|SDG|TG) NAME[i]"
        self.expect_count(ln, toks, 3, usage)
        gname = toks[1].text.upper()
        if toks[1].kind != "word" or gname not in GATE_NAMES:
            raise ln.error(f"unknown gate; usage: {usage}", toks[1])
        q, i = self.ref(ln, toks[2])
        self.use(ln, toks[2], q)
        self.ir.statements.append(Gate(gname, q, i, line=ln.lineno))

    def st_u(self, ln, toks):
        self.expect_count(ln, toks, 2, "u(theta,phi,psi0,psi1) NAME[i]")
        params = self.u_params(ln, toks[0])
        q, i = self.ref(ln, toks[1])
        self.use(ln, toks[1], q)
        self.ir.statements.append(Gate("U", q, i, params, line=ln.lineno))

    def st_ctrl(self, ln, toks):
        usage = "ctrl GATE NAME[c] ... NAME[t]"
        if len(toks) < 4:
            raise ln.error(f"missing operand; usage: {usage}")
        g = toks[1]
        if g.kind == "u":
            gname, params = "U", self.u_params(ln, g)
        elif g.kind == "word" and g.text.upper() in GATE_NAMES:
            gname, params = g.text.upper(), ()
        else:
            raise ln.error(f"unknown gate; usage: {usage}", g)
        refs = [self.ref(ln, t) for t in toks[2:]]
        q, idx = self.same_qudit(ln, toks[1:], refs)
        self.use(ln, toks[2], q)
        self.ir.statements.append(
            ControlledU(gname, q, tuple(idx[:-1]), idx[-1], params, line=ln.lineno))

    def st_cnot(self, ln, toks):
        self.expect_count(ln, toks, 3, "cnot NAME[m] NAME[n]")
        refs = [self.ref(ln, t) for t in toks[1:]]
        q, (m, n) = self.same_qudit(ln, toks, refs)
        self.use(ln, toks[1], q)
        self.ir.statements.append(Cnot(q, m, n, line=ln.lineno))

    def st_toffoli(self, ln, toks):
        self.expect_count(ln, toks, 4, "toffoli NAME[m] NAME[n] NAME[p]")
        refs = [self.ref(ln, t) for t in toks[1:]]
        q, (m, n, p) = self.same_qudit(ln, toks, refs)
        self.use(ln, toks[1], q)
        self.ir.statements.append(Toffoli(q, m, n, p, line=ln.lineno))

    def st_qnd(self, ln, toks):
        self.expect_count(ln, toks, 3, "qnd SPIN NAME[i]")
        s = self.spin(ln, toks[1])
        q, i = self.ref(ln, toks[2])
        self.use(ln, toks[2], q)
        self.ir.statements.append(Qnd(s, q, i, line=ln.lineno))

    def st_cz(self, ln, toks):
        self.expect_count(ln, toks, 4, "cz SPIN NAME1[m] NAME2[n]")
        s = self.spin(ln, toks[1])
        q1, m = self.ref(ln, toks[2])
        q2, n = self.ref(ln, toks[3])
        if q1 == q2:
            raise ln.error("cz needs two distinct qudits", toks[3])
        self.use(ln, toks[2], q1)
        self.use(ln, toks[3], q2)
        self.ir.statements.append(CrossCz(s, q1, m, q2, n, line=ln.lineno))

    def st_prepare(self, ln, toks):
        self.expect_count(ln, toks, 3, "prepare NAME [re,im; ...]")
        q = self.qudit_name(ln, toks[1])
        if q in self.touched or self.ir.prepared(q) is not None:
            raise ln.error(f"prepare must be the first operation on qudit {q!r}", toks[0])
        if toks[2].kind != "list":
            raise ln.error("expected an amplitude list [re,im; ...]", toks[2])
        body = toks[2].text[1:-1].strip()
        amps = []
        for entry in body.split(";") if body else []:
            parts = entry.split(",")
            try:
                if len(parts) != 2:
                    raise ValueError
                amps.append(complex(float(parts[0]), float(parts[1])))
            except ValueError:
                raise ln.error(f"malformed amplitude {entry.strip()!r}", toks[2]) from None
        if len(amps) != 1 << self.ir.qudits[q]:
            raise ln.error(f"expected {1 << self.ir.qudits[q]} amplitudes, got {len(amps)}", toks[2])
        norm = math.sqrt(sum(abs(a) ** 2 for a in amps))
        if abs(norm - 1) > 1e-6:
            raise ln.error(f"amplitudes have norm {norm:.9g}, expected 1", toks[2])
        self.ir.statements.append(Prepare(q, tuple(amps), line=ln.lineno))

    def st_measure(self, ln, toks):
        self.expect_count(ln, toks, 2, "measure NAME")
        q = self.qudit_name(ln, toks[1])
        if q in self.measured:
            raise ln.error(f"qudit {q!r} measured twice", toks[1])
        self.measured.add(q)
        self.ir.statements.append(Measure(q, line=ln.lineno))


def parse(source: str) -> CircuitIR:
    """Parse circuit text; raises :class:`ParseError` at the first problem."""
    p = _Parser()
    for lineno, raw in enumerate(source.splitlines(), start=1):
        text = raw.rstrip("\r")
        if "#" in text:
            text = text[:text.index("#")]
        ln = _Line(text, lineno)
        if not ln.toks:
            continue
        bad = next((t for t in ln.toks if t.kind == "bad"), None)
        if bad is not None:
            raise ln.error("unexpected token", bad)
        p.statement(ln)
    return p.ir


# --- serializer -------------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def _u(params) -> str:
    return "u(" + ", ".join(_fmt(p) for p in params) + ")"


def serialize(ir: CircuitIR) -> str:
    lines = [f"qudit {n} {w}" for n, w in ir.qudits.items()]
    lines += [f"spin {s}" for s in ir.spins]
    for s in ir.statements:
        if isinstance(s, Gate):
            head = _u(s.params) if s.name == "U" else f"gate {s.name}"
            lines.append(f"{head} {s.qudit}[{s.qubit}]")
        elif isinstance(s, ControlledU):
            g = _u(s.params) if s.name == "U" else s.name
            refs = " ".join(f"{s.qudit}[{q}]" for q in (*s.controls, s.target))
            lines.append(f"ctrl {g} {refs}")
        elif isinstance(s, Cnot):
            lines.append(f"cnot {s.qudit}[{s.control}] {s.qudit}[{s.target}]")
        elif isinstance(s, Toffoli):
            lines.append(f"toffoli {s.qudit}[{s.control1}] {s.qudit}[{s.control2}] {s.qudit}[{s.target}]")
        elif isinstance(s, Qnd):
            lines.append(f"qnd {s.spin} {s.qudit}[{s.qubit}]")
        elif isinstance(s, CrossCz):
            lines.append(f"cz {s.spin} {s.qudit1}[{s.m}] {s.qudit2}[{s.n}]")
        elif isinstance(s, Prepare):
            body = "; ".join(f"{_fmt(a.real)},{_fmt(a.imag)}" for a in s.amplitudes)
            lines.append(f"prepare {s.qudit} [{body}]")
        elif isinstance(s, Measure):
            lines.append(f"measure {s.qudit}")
        else:
            raise TypeError(f"cannot serialize {s!r}")
    return "\n".join(lines) + "\n"


def ir_equal(a: CircuitIR, b: CircuitIR) -> bool:
    return (list(a.qudits.items()) == list(b.qudits.items()) and a.spins == b.spins
            and a.statements == b.statements)


__all__ = [
    "CircuitIR", "Gate", "Cnot", "Toffoli", "ControlledU", "Qnd", "CrossCz", "Prepare",
    "Measure", "GATE_NAMES", "GATE_STATEMENTS", "parse", "serialize", "ir_equal", "NAMED_GATES",
]
