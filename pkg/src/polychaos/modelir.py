"""System definitions and the polynomial right-hand-side representation.

Expressions use the grammar::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('+' | '-') unary | power
    power  := atom ('^' unary)?
    atom   := NUMBER | NAME | NAME '(' expr (',' expr)* ')' | '(' expr ')'

Every expression is kept as an AST (for numeric evaluation of the nominal
model) and, when it is polynomial in states and parameters, as a canonical
:class:`PolyExpr`. Inputs and the time symbol ``t`` are deterministic and enter
monomials as opaque multiplicative factors.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from os import PathLike
from typing import Any, Callable, Mapping

import numpy as np

from .distributions import FAMILIES, Dirac, Distribution, DistributionError, from_spec

TIME = "t"


class ModelError(ValueError):
    pass


class ParseError(ModelError):
    pass


class NameResolutionError(ModelError):
    def __init__(self, name: str, where: str = ""):
        self.name = name
        loc = f" in {where}" if where else ""
        super().__init__(f"unknown identifier {name!r}{loc}")


class NotExpandableError(ModelError):
    """The expression is not polynomial in states and parameters."""

    def __init__(self, reason: str, subexpr: str):
        self.subexpr = subexpr
        super().__init__(f"not Galerkin-expandable: {reason} in '{subexpr}'")


class SchemaError(ModelError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


# -- tokens and AST --------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^(),]))"
)


def tokenize(text: str) -> list[tuple[str, str]]:
    tokens, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos:].lstrip()[:1]!r} in '{text}'")
        kind = m.lastgroup
        tokens.append((kind, m.group(kind)))
        pos = m.end()
    return tokens


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: Any


@dataclass(frozen=True)
class BinOp:
    op: str
    left: Any
    right: Any


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple


_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}


def to_text(node) -> str:
    """Render an AST with the minimal parentheses needed to re-parse it identically."""
    if isinstance(node, Num):
        return repr(node.value) if node.value != int(node.value) or abs(node.value) >= 1e16 else str(int(node.value))
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        inner = to_text(node.arg)
        if isinstance(node.arg, BinOp) and node.arg.op != "^":
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(node, Call):
        return f"{node.func}({', '.join(to_text(a) for a in node.args)})"
    prec = _PRECEDENCE[node.op]

    def side(child, right):
        text = to_text(child)
        if isinstance(child, BinOp):
            cp = _PRECEDENCE[child.op]
            if cp < prec or (cp == prec and (right if node.op != "^" else not right)):
                return f"({text})"
        elif isinstance(child, Neg) and (node.op == "^" or right):
            return f"({text})"
        return text

    return f"{side(node.left, False)} {node.op} {side(node.right, True)}"


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self, value=None):
        tok = self.peek()
        if tok[0] is None or (value is not None and tok[1] != value):
            want = f"{value!r}" if value else "a token"
            raise ParseError(f"expected {want} at position {self.pos} in '{self.text}'")
        self.pos += 1
        return tok

    def parse(self):
        if not self.tokens:
            raise ParseError("empty expression")
        node = self.expr()
        if self.pos != len(self.tokens):
            raise ParseError(f"unexpected {self.peek()[1]!r} in '{self.text}'")
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[1] == "-":
            self.take()
            return Neg(self.unary())
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        kind, value = self.take()
        if kind == "num":
            return Num(float(value))
        if kind == "name":
            if self.peek()[1] == "(":
                self.take("(")
                args = [self.expr()]
                while self.peek()[1] == ",":
                    self.take(",")
                    args.append(self.expr())
                self.take(")")
                return Call(value, tuple(args))
            return Var(value)
        if value == "(":
            node = self.expr()
            self.take(")")
            return node
        raise ParseError(f"unexpected {value!r} in '{self.text}'")


def parse_ast(text: str):
    return _Parser(text).parse()


def names_in(node) -> set[str]:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Num):
        return set()
    if isinstance(node, Neg):
        return names_in(node.arg)
    if isinstance(node, Call):
        return set().union(*(names_in(a) for a in node.args))
    return names_in(node.left) | names_in(node.right)


def calls_in(node) -> list[Call]:
    if isinstance(node, Call):
        return [node] + [c for a in node.args for c in calls_in(a)]
    if isinstance(node, Neg):
        return calls_in(node.arg)
    if isinstance(node, BinOp):
        return calls_in(node.left) + calls_in(node.right)
    return []


# -- numeric evaluation ----------------------------------------------------


def piecewise(times, values, t):
    """Zero-order hold: ``values[k]`` on ``[times[k], times[k+1])``, last value held."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.shape != values.shape or times.ndim != 1 or len(times) == 0:
        raise ValueError("piecewise needs equally long, non-empty time and value vectors")
    if np.any(np.diff(times) <= 0):
        raise ValueError("piecewise breakpoints must be strictly increasing")
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < times[0]):
        raise ValueError(f"piecewise input undefined before t={times[0]}")
    k = np.searchsorted(times, t_arr, side="right") - 1
    out = values[k]
    return float(out) if out.ndim == 0 else out


FUNCTIONS: dict[str, Callable] = {
    "piecewise": piecewise,
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
}


def _source(node) -> str:
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return f"env[{node.name!r}]"
    if isinstance(node, Neg):
        return f"(-{_source(node.arg)})"
    if isinstance(node, Call):
        return f"_f[{node.func!r}]({', '.join(_source(a) for a in node.args)})"
    op = "**" if node.op == "^" else node.op
    return f"({_source(node.left)} {op} {_source(node.right)})"


def compile_ast(node) -> Callable[[Mapping[str, Any]], Any]:
    """Compile an AST into ``f(env)``; works elementwise on numpy arrays."""
    code = compile(f"lambda env: {_source(node)}", "<expr>", "eval")
    return eval(code, {"_f": FUNCTIONS, "__builtins__": {}})


# -- polynomial representation ---------------------------------------------

Powers = tuple  # sorted tuple of (name, exponent)


@dataclass(frozen=True)
class Monomial:
    coeff: float
    powers: Powers  # states and parameters
    inputs: Powers = ()  # inputs and the time symbol

    @property
    def key(self):
        return (self.powers, self.inputs)

    def degree_in(self, names) -> int:
        return sum(e for n, e in self.powers if n in names)


def _merge(a: Powers, b: Powers) -> Powers:
    out = dict(a)
    for n, e in b:
        out[n] = out.get(n, 0) + e
    return tuple(sorted(out.items()))


@dataclass(frozen=True)
class PolyExpr:
    monomials: tuple[Monomial, ...] = ()

    @staticmethod
    def from_terms(terms: Mapping) -> "PolyExpr":
        mons = [Monomial(c, k[0], k[1]) for k, c in terms.items() if c != 0.0]
        mons.sort(key=lambda m: (sum(e for _, e in m.powers), m.powers, m.inputs))
        return PolyExpr(tuple(mons))

    def terms(self) -> dict:
        return {m.key: m.coeff for m in self.monomials}

    def __add__(self, other: "PolyExpr") -> "PolyExpr":
        out = self.terms()
        for k, c in other.terms().items():
            out[k] = out.get(k, 0.0) + c
        return PolyExpr.from_terms(out)

    def __neg__(self) -> "PolyExpr":
        return PolyExpr(tuple(Monomial(-m.coeff, m.powers, m.inputs) for m in self.monomials))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "PolyExpr") -> "PolyExpr":
        out: dict = {}
        for a in self.monomials:
            for b in other.monomials:
                k = (_merge(a.powers, b.powers), _merge(a.inputs, b.inputs))
                out[k] = out.get(k, 0.0) + a.coeff * b.coeff
        return PolyExpr.from_terms(out)

    def scale(self, c: float) -> "PolyExpr":
        return PolyExpr.from_terms({k: v * c for k, v in self.terms().items()})

    @property
    def constant_value(self) -> float | None:
        if not self.monomials:
            return 0.0
        if len(self.monomials) == 1 and not self.monomials[0].powers and not self.monomials[0].inputs:
            return self.monomials[0].coeff
        return None

    def evaluate(self, env: Mapping[str, Any]):
        total = 0.0
        for m in self.monomials:
            term = m.coeff
            for n, e in m.powers + m.inputs:
                term = term * env[n] ** e
            total = total + term
        return total

    def __str__(self) -> str:
        if not self.monomials:
            return "0"
        parts = []
        for m in self.monomials:
            factors = [n if e == 1 else f"{n}^{e}" for n, e in m.powers + m.inputs]
            c = m.coeff
            if factors and abs(c) == 1.0:
                body = "*".join(factors)
            else:
                body = "*".join([repr(abs(c))] + factors)
            parts.append(("- " if c < 0 else "+ ") + body)
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]


def _const(c: float) -> PolyExpr:
    return PolyExpr.from_terms({((), ()): float(c)})


@dataclass(frozen=True)
class Symbols:
    """Declared names visible to an expression."""

    states: frozenset = frozenset()
    parameters: frozenset = frozenset()
    inputs: frozenset = frozenset()
    extras: frozenset = frozenset()

    @property
    def random(self) -> frozenset:
        return self.states | self.parameters


def to_poly(node, symbols: Symbols) -> PolyExpr:
    """Convert an AST to canonical polynomial form or raise :class:`NotExpandableError`."""
    if isinstance(node, Num):
        return _const(node.value)
    if isinstance(node, Var):
        if node.name in symbols.random:
            return PolyExpr((Monomial(1.0, ((node.name, 1),)),))
        if node.name in symbols.inputs or node.name == TIME:
            return PolyExpr((Monomial(1.0, (), ((node.name, 1),)),))
        if node.name in symbols.extras:
            raise NotExpandableError("input vector used outside an input definition", node.name)
        raise NameResolutionError(node.name)
    if isinstance(node, Neg):
        return -to_poly(node.arg, symbols)
    if isinstance(node, Call):
        raise NotExpandableError(f"function {node.func!r} applied to an expression", to_text(node))
    left = to_poly(node.left, symbols)
    right = to_poly(node.right, symbols)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    if node.op == "/":
        c = right.constant_value
        if c is None:
            raise NotExpandableError("division by a non-constant", to_text(node))
        if c == 0.0:
            raise NotExpandableError("division by zero", to_text(node))
        return left.scale(1.0 / c)
    # power
    e = right.constant_value
    if e is None or e != int(e) or e < 0:
        raise NotExpandableError("exponent is not a non-negative integer constant", to_text(node))
    out = _const(1.0)
    for _ in range(int(e)):
        out = out * left
    return out


def _check_names(node, allowed: set[str], where: str):
    for name in sorted(names_in(node)):
        if name not in allowed:
            raise NameResolutionError(name, where)
    for call in calls_in(node):
        if call.func not in FUNCTIONS:
            raise NameResolutionError(call.func, where)


def parse_expression(text: str, symbols: Symbols) -> PolyExpr:
    """Parse ``text`` into canonical polynomial form.

    Raises :class:`NameResolutionError` for undeclared names and
    :class:`NotExpandableError` for constructs outside the polynomial grammar.
    """
    node = parse_ast(text)
    allowed = set(symbols.random | symbols.inputs | symbols.extras) | {TIME}
    _check_names(node, allowed, f"'{text}'")
    return to_poly(node, symbols)


# -- system definition -----------------------------------------------------


@dataclass(frozen=True)
class Expression:
    text: str
    ast: Any
    poly: PolyExpr | None
    diagnostic: str | None = None
    fn: Callable = field(default=None, compare=False, repr=False)

    @property
    def galerkin_ok(self) -> bool:
        return self.poly is not None

    def __call__(self, env):
        return self.fn(env)


@dataclass(frozen=True)
class StateDef:
    name: str
    initial: Distribution
    rhs: Expression


@dataclass(frozen=True)
class ParameterDef:
    name: str
    dist: Distribution


@dataclass(frozen=True)
class InputDef:
    name: str
    rhs: Expression
    extras: Mapping[str, np.ndarray] = field(default_factory=dict)

    def breakpoints(self, overrides: Mapping[str, Any] | None = None) -> list[float]:
        """Switching times of ``piecewise`` calls, used to restart the integrator."""
        env = {**self.extras, **(overrides or {})}
        out = []
        for call in calls_in(self.rhs.ast):
            if call.func == "piecewise" and isinstance(call.args[0], Var) and call.args[0].name in env:
                out.extend(float(v) for v in np.atleast_1d(env[call.args[0].name]))
        return out


@dataclass(frozen=True)
class OutputDef:
    name: str
    rhs: Expression


@dataclass(frozen=True)
class SystemDef:
    states: tuple[StateDef, ...]
    parameters: tuple[ParameterDef, ...] = ()
    inputs: tuple[InputDef, ...] = ()
    outputs: tuple[OutputDef, ...] = ()

    @property
    def state_names(self) -> list[str]:
        return [s.name for s in self.states]

    @property
    def parameter_names(self) -> list[str]:
        return [p.name for p in self.parameters]

    @property
    def symbols(self) -> Symbols:
        return Symbols(
            frozenset(self.state_names),
            frozenset(self.parameter_names),
            frozenset(i.name for i in self.inputs),
            frozenset(k for i in self.inputs for k in i.extras),
        )

    @property
    def galerkin_ok(self) -> bool:
        return all(s.rhs.galerkin_ok for s in self.states) and all(o.rhs.galerkin_ok for o in self.outputs)

    def diagnostics(self) -> list[str]:
        out = []
        for kind, items in (("state", self.states), ("output", self.outputs)):
            for item in items:
                if item.rhs.diagnostic:
                    out.append(f"{kind} {item.name}: {item.rhs.diagnostic}")
        return out

    def extras(self) -> dict[str, np.ndarray]:
        return {k: v for i in self.inputs for k, v in i.extras.items()}

    def with_distribution(self, name: str, dist: Distribution) -> "SystemDef":
        """Copy with one parameter distribution or initial condition replaced."""
        if name in self.parameter_names:
            params = tuple(ParameterDef(p.name, dist) if p.name == name else p for p in self.parameters)
            return SystemDef(self.states, params, self.inputs, self.outputs)
        if name in self.state_names:
            states = tuple(StateDef(s.name, dist, s.rhs) if s.name == name else s for s in self.states)
            return SystemDef(states, self.parameters, self.inputs, self.outputs)
        raise KeyError(f"{name!r} is neither a parameter nor a state")

    def distribution_of(self, name: str) -> Distribution:
        for p in self.parameters:
            if p.name == name:
                return p.dist
        for s in self.states:
            if s.name == name:
                return s.initial
        raise KeyError(f"{name!r} is neither a parameter nor a state")

    def input_values(self, t, overrides: Mapping[str, Any] | None = None) -> dict[str, Any]:
        env = {**self.extras(), **(overrides or {}), TIME: t}
        return {i.name: i.rhs(env) for i in self.inputs}

    def breakpoints(self, overrides=None) -> list[float]:
        return sorted({b for i in self.inputs for b in i.breakpoints(overrides)})

    def to_document(self) -> dict:
        def dist(d):
            return {"pdf": d.kind, "data": list(d.data)}

        return {
            "states": [{"name": s.name, **dist(s.initial), "rhs": s.rhs.text} for s in self.states],
            "parameters": [{"name": p.name, **dist(p.dist)} for p in self.parameters],
            "inputs": [
                {"name": i.name, "rhs": i.rhs.text, **{k: list(map(float, v)) for k, v in i.extras.items()}}
                for i in self.inputs
            ],
            "outputs": [{"name": o.name, "rhs": o.rhs.text} for o in self.outputs],
        }


_IDENT = re.compile(r"^[A-Za-z_]\w*$")
_RESERVED = {TIME} | set(FUNCTIONS)


def _field(entry: Mapping, key: str, path: str):
    if key not in entry:
        raise SchemaError(f"{path}.{key}", "missing required field")
    return entry[key]


def _name(entry, path, seen: dict):
    name = _field(entry, "name", path)
    if not isinstance(name, str) or not _IDENT.match(name):
        raise SchemaError(f"{path}.name", f"invalid identifier {name!r}")
    if name in _RESERVED:
        raise SchemaError(f"{path}.name", f"{name!r} is reserved")
    if name in seen:
        raise SchemaError(f"{path}.name", f"duplicate name {name!r} (first used at {seen[name]})")
    seen[name] = f"{path}.name"
    return name


def _dist(entry, path) -> Distribution:
    pdf = _field(entry, "pdf", path)
    data = _field(entry, "data", path)
    if not isinstance(pdf, str) or pdf.lower() not in FAMILIES:
        raise SchemaError(f"{path}.pdf", f"unknown pdf {pdf!r}; expected one of {sorted(FAMILIES)}")
    if isinstance(data, (int, float)):
        data = [data]
    if not isinstance(data, list) or not all(isinstance(v, (int, float)) for v in data):
        raise SchemaError(f"{path}.data", "must be a numeric array")
    try:
        return from_spec(pdf, data)
    except DistributionError as exc:
        raise SchemaError(f"{path}.data", str(exc)) from None


def _array(doc, key) -> list:
    value = doc.get(key, [])
    if not isinstance(value, list):
        raise SchemaError(key, "must be an array")
    for n, entry in enumerate(value):
        if not isinstance(entry, dict):
            raise SchemaError(f"{key}[{n}]", "must be an object")
    return value


def _expression(text, path, symbols: Symbols, allowed: set[str]) -> Expression:
    if not isinstance(text, str):
        raise SchemaError(path, "must be a string")
    try:
        node = parse_ast(text)
    except ParseError as exc:
        raise SchemaError(path, str(exc)) from None
    try:
        _check_names(node, allowed, f"'{text}'")
    except NameResolutionError as exc:
        raise SchemaError(path, str(exc)) from None
    try:
        poly, diag = to_poly(node, symbols), None
    except NotExpandableError as exc:
        poly, diag = None, str(exc)
    return Expression(text, node, poly, diag, compile_ast(node))


def load_system(document: Mapping | str | PathLike) -> SystemDef:
    """Validate a system document (a mapping, JSON text, or a path) into a :class:`SystemDef`."""
    if not isinstance(document, Mapping):
        text = str(document)
        if not text.lstrip().startswith("{"):
            with open(text) as fh:
                text = fh.read()
        try:
            document = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError("$", f"invalid JSON: {exc}") from None
    if not isinstance(document, Mapping):
        raise SchemaError("$", "document must be an object")
    unknown = set(document) - {"states", "parameters", "inputs", "outputs"}
    if unknown:
        raise SchemaError("$", f"unknown top-level keys {sorted(unknown)}")
    states = _array(document, "states")
    if not states:
        raise SchemaError("states", "at least one state is required")
    parameters = _array(document, "parameters")
    inputs = _array(document, "inputs")
    outputs = _array(document, "outputs")

    seen: dict[str, str] = {}
    state_names = [_name(e, f"states[{n}]", seen) for n, e in enumerate(states)]
    param_names = [_name(e, f"parameters[{n}]", seen) for n, e in enumerate(parameters)]
    input_names = [_name(e, f"inputs[{n}]", seen) for n, e in enumerate(inputs)]
    output_names = [_name(e, f"outputs[{n}]", seen) for n, e in enumerate(outputs)]

    input_extras = []
    for n, entry in enumerate(inputs):
        extras = {}
        for key, value in entry.items():
            if key in ("name", "rhs"):
                continue
            path = f"inputs[{n}].{key}"
            if not _IDENT.match(key) or key in _RESERVED:
                raise SchemaError(path, f"invalid variable name {key!r}")
            if key in seen:
                raise SchemaError(path, f"duplicate name {key!r} (first used at {seen[key]})")
            values = value if isinstance(value, list) else [value]
            if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
                raise SchemaError(path, "extra input fields must be numeric arrays")
            seen[key] = path
            extras[key] = np.asarray(values, dtype=float)
        input_extras.append(extras)

    symbols = Symbols(
        frozenset(state_names),
        frozenset(param_names),
        frozenset(input_names),
        frozenset(k for ex in input_extras for k in ex),
    )
    model_names = set(state_names) | set(param_names) | set(input_names) | {TIME}

    input_defs = []
    for n, (entry, extras) in enumerate(zip(inputs, input_extras)):
        path = f"inputs[{n}].rhs"
        text = _field(entry, "rhs", f"inputs[{n}]")
        if not isinstance(text, str):
            raise SchemaError(path, "must be a string")
        try:
            node = parse_ast(text)
            _check_names(node, set(extras) | {TIME}, f"'{text}'")
        except ModelError as exc:
            raise SchemaError(path, str(exc)) from None
        input_defs.append(InputDef(input_names[n], Expression(text, node, None, None, compile_ast(node)), extras))

    state_defs = []
    for n, entry in enumerate(states):
        path = f"states[{n}]"
        initial = _dist(entry, path)
        rhs = _expression(_field(entry, "rhs", path), f"{path}.rhs", symbols, model_names)
        state_defs.append(StateDef(state_names[n], initial, rhs))
    param_defs = [
        ParameterDef(param_names[n], _dist(entry, f"parameters[{n}]")) for n, entry in enumerate(parameters)
    ]
    output_defs = [
        OutputDef(
            output_names[n],
            _expression(_field(entry, "rhs", f"outputs[{n}]"), f"outputs[{n}].rhs", symbols, model_names),
        )
        for n, entry in enumerate(outputs)
    ]
    system = SystemDef(tuple(state_defs), tuple(param_defs), tuple(input_defs), tuple(output_defs))
    # evaluate inputs once so malformed piecewise data fails at load time
    try:
        system.input_values(min(system.breakpoints(), default=0.0))
    except (ValueError, TypeError, IndexError) as exc:
        raise SchemaError("inputs", f"input evaluation failed: {exc}") from None
    return system


def example_system() -> SystemDef:
    """Decay with a beta-distributed rate: ``x' = -a x``, ``x(0) = 2``, ``a ~ B(2, 2)``."""
    return load_system(
        {
            "states": [{"name": "x", "pdf": "dirac", "data": [2], "rhs": "-a*x"}],
            "parameters": [{"name": "a", "pdf": "beta", "data": [2, 2]}],
        }
    )


def deterministic(sys: SystemDef) -> bool:
    return all(isinstance(s.initial, Dirac) for s in sys.states) and all(
        isinstance(p.dist, Dirac) for p in sys.parameters
    )


__all__ = [
    "ModelError",
    "ParseError",
    "NameResolutionError",
    "NotExpandableError",
    "SchemaError",
    "PolyExpr",
    "Monomial",
    "Symbols",
    "SystemDef",
    "StateDef",
    "ParameterDef",
    "InputDef",
    "OutputDef",
    "parse_expression",
    "parse_ast",
    "load_system",
    "piecewise",
    "example_system",
]
