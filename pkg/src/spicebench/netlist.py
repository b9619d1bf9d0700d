"""SPICE netlist subset: typed circuit IR, parser, canonical serializer, flattener.

The grammar accepted here is the package's single normative netlist format
(summarized in the README):

* element cards: R/C/L (two nodes + value), M (four nodes + model + ``W=``
  ``L=`` and optional ``M=`` multiplicity), Q (three nodes + model, optional
  ``M=``), V/I (two nodes + DC/PULSE/SIN/PWL waveform), X (nodes followed by
  a subcircuit name);
* directives: ``.model``, ``.op``, ``.dc``, ``.tran``, ``.ac``, ``.temp``,
  ``.subckt``/``.ends``, ``.end``; any other dot-directive is preserved
  verbatim as an opaque entry instead of being rejected;
* lexical rules: ``*`` starts a full-line comment, ``;`` starts an inline
  comment, ``+`` continues the previous card, keywords and names are
  case-insensitive, and numbers accept engineering suffixes (f p n u m k
  meg g t) with trailing unit letters ignored.

Node names canonicalize to lower case with the ground aliases ``0`` and
``gnd`` collapsing to ``0``. Element, model, and subcircuit names
canonicalize to upper case. All IR values are plain dataclasses that are
never mutated after construction, so they are safe to share across threads.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from typing import Iterator, Union

from .errors import SpicebenchError

GROUND = "0"

_GROUND_ALIASES = {"0", "gnd"}
_ELEMENT_LETTERS = "RCLMQVIX"
# Longest suffix first so "meg" wins over "m".
_SUFFIXES = (
    ("meg", 1e6),
    ("f", 1e-15),
    ("p", 1e-12),
    ("n", 1e-9),
    ("u", 1e-6),
    ("m", 1e-3),
    ("k", 1e3),
    ("g", 1e9),
    ("t", 1e12),
)
_NUMBER_RE = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_EQUALS_RE = re.compile(r"\s*=\s*")
_FENCE_RE = re.compile(r"```[^\n]*\n(.*?)```", re.DOTALL)


class ParseError(SpicebenchError):
    """Malformed netlist text, with a 1-based source location when known."""

    def __init__(self, reason: str, line: int | None = None, column: int | None = None):
        self.reason = reason
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", token {column}"
            where += ": "
        super().__init__(where + reason)


class NoNetlistFound(SpicebenchError):
    """No line of the given text parses as a SPICE card or directive."""


class UnknownSubckt(SpicebenchError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown subcircuit: {name}")


class RecursionDetected(SpicebenchError):
    def __init__(self, cycle: list[str]):
        self.cycle = cycle
        super().__init__("recursive subcircuit instantiation: " + " -> ".join(cycle))


class SubcktArityError(SpicebenchError):
    def __init__(self, instance: str, subckt: str, got: int, want: int):
        self.instance = instance
        super().__init__(
            f"{instance}: subcircuit {subckt} takes {want} nodes, got {got}"
        )


def canonical_node(name: str) -> str:
    """Lower-case a node name, collapsing ground aliases to "0".

    Idempotent: canonical names map to themselves.
    """
    low = name.lower()
    return GROUND if low in _GROUND_ALIASES else low


def is_ground(node: str) -> bool:
    return node.lower() in _GROUND_ALIASES


# --- source waveforms -------------------------------------------------------


@dataclass(frozen=True)
class Dc:
    v: float


@dataclass(frozen=True)
class Pulse:
    v1: float
    v2: float
    td: float
    tr: float
    tf: float
    pw: float
    per: float


@dataclass(frozen=True)
class Sin:
    vo: float
    va: float
    freq: float
    td: float = 0.0
    theta: float = 0.0


@dataclass(frozen=True)
class Pwl:
    points: tuple[tuple[float, float], ...]


Waveform = Union[Dc, Pulse, Sin, Pwl]


def waveform_violations(w: Waveform) -> list[str]:
    """Timing/shape constraints a well-formed waveform must satisfy.

    The parser deliberately accepts violating waveforms so the linter can
    report them as diagnostics instead of hard parse failures.
    """
    problems: list[str] = []
    if isinstance(w, Pulse):
        if w.tr <= 0:
            problems.append("rise time tr must be > 0")
        if w.tf <= 0:
            problems.append("fall time tf must be > 0")
        if w.pw <= 0:
            problems.append("pulse width pw must be > 0")
        if w.per < w.tr + w.tf + w.pw:
            problems.append("period per must be >= tr + tf + pw")
    elif isinstance(w, Sin):
        if w.freq <= 0:
            problems.append("frequency must be > 0")
    elif isinstance(w, Pwl):
        times = [t for t, _ in w.points]
        if any(b <= a for a, b in zip(times, times[1:])):
            problems.append("PWL times must strictly increase")
    return problems


# --- analysis directives ----------------------------------------------------


@dataclass(frozen=True)
class Op:
    kind = "op"


@dataclass(frozen=True)
class DcSweep:
    source: str
    start: float
    stop: float
    step: float
    kind = "dc"


@dataclass(frozen=True)
class Tran:
    tstep: float
    tstop: float
    kind = "tran"


@dataclass(frozen=True)
class Ac:
    variation: str  # dec | oct | lin
    npoints: int
    fstart: float
    fstop: float
    kind = "ac"


@dataclass(frozen=True)
class Temp:
    celsius: float
    kind = "temp"


@dataclass(frozen=True)
class UnknownDirective:
    """A dot-directive outside the supported set, preserved verbatim.

    Presence of one of these is a warning condition, never a parse error.
    """

    raw: str
    kind = "unknown"


Directive = Union[Op, DcSweep, Tran, Ac, Temp, UnknownDirective]

ANALYSIS_KINDS = ("op", "dc", "tran", "ac")


# --- model cards and elements ----------------------------------------------

MODEL_KINDS = ("NMOS", "PMOS", "NPN", "PNP")


@dataclass(frozen=True)
class ModelCard:
    """A .model card. Recognized parameter keys include VTO, KP, LAMBDA;
    everything else is carried through untouched."""

    name: str
    kind: str  # one of MODEL_KINDS
    params: dict[str, float] = field(default_factory=dict)

    @property
    def is_mos(self) -> bool:
        return self.kind in ("NMOS", "PMOS")


@dataclass(frozen=True)
class MosfetParams:
    model: str
    w: float
    l: float
    m: int = 1


@dataclass(frozen=True)
class BjtParams:
    model: str
    m: int = 1


@dataclass(frozen=True)
class Element:
    """Base element card: a name (first letter encodes the kind) plus the
    ordered nodes it attaches to."""

    name: str
    nodes: tuple[str, ...]

    letter = "?"


@dataclass(frozen=True)
class Resistor(Element):
    value: float = 0.0
    letter = "R"


@dataclass(frozen=True)
class Capacitor(Element):
    value: float = 0.0
    letter = "C"


@dataclass(frozen=True)
class Inductor(Element):
    value: float = 0.0
    letter = "L"


@dataclass(frozen=True)
class Mosfet(Element):
    params: MosfetParams = None  # type: ignore[assignment]
    letter = "M"

    @property
    def w_over_l(self) -> float:
        return self.params.w / self.params.l


@dataclass(frozen=True)
class Bjt(Element):
    params: BjtParams = None  # type: ignore[assignment]
    letter = "Q"


@dataclass(frozen=True)
class VSource(Element):
    waveform: Waveform = None  # type: ignore[assignment]
    letter = "V"


@dataclass(frozen=True)
class ISource(Element):
    waveform: Waveform = None  # type: ignore[assignment]
    letter = "I"


@dataclass(frozen=True)
class SubcktInstance(Element):
    subckt: str = ""
    letter = "X"


@dataclass(frozen=True)
class SubcktDef:
    name: str
    ports: tuple[str, ...]
    elements: tuple[Element, ...]


@dataclass
class Netlist:
    """Parsed circuit: ordered elements plus model cards, directives, and
    subcircuit definitions."""

    title: str = ""
    elements: list[Element] = field(default_factory=list)
    models: dict[str, ModelCard] = field(default_factory=dict)
    directives: list[Directive] = field(default_factory=list)
    subckts: dict[str, SubcktDef] = field(default_factory=dict)
    end_present: bool = False

    def structurally_equal(self, other: "Netlist") -> bool:
        """Equality of circuit content. ``end_present`` is serialization
        bookkeeping (canonical form always appends .end) and is ignored."""
        return (
            self.title == other.title
            and self.elements == other.elements
            and self.models == other.models
            and self.directives == other.directives
            and self.subckts == other.subckts
        )

    def nodes(self) -> list[str]:
        """Sorted distinct node names referenced by elements (ground included
        when present)."""
        seen: set[str] = set()
        for e in self.elements:
            seen.update(e.nodes)
        return sorted(seen)

    def analyses(self) -> list[Directive]:
        return [d for d in self.directives if d.kind in ANALYSIS_KINDS]

    def temp_directives(self) -> list[Temp]:
        return [d for d in self.directives if isinstance(d, Temp)]

    def sources(self) -> Iterator[Union[VSource, ISource]]:
        for e in self.elements:
            if isinstance(e, (VSource, ISource)):
                yield e


# --- number parsing ---------------------------------------------------------


def parse_value(token: str, line: int | None = None, column: int | None = None) -> float:
    """Resolve a SPICE number token to a float.

    Engineering suffixes f/p/n/u/m/k/meg/g/t are honored case-insensitively
    with longest-match ("1meg" is 1e6, not 1e-3), and trailing unit letters
    after the suffix are ignored ("2kohm" is 2000).

    Results are snapped to the serializer's 6-significant-digit grid so that
    suffix arithmetic (e.g. ``50 * 1e-9``) cannot leave parse/serialize
    round-trips off by one ulp.
    """
    m = _NUMBER_RE.match(token)
    if m is None or m.start() != 0:
        raise ParseError(f"not a number: {token!r}", line, column)
    value = float(m.group(0))
    rest = token[m.end() :].lower()
    for suffix, mult in _SUFFIXES:
        if rest.startswith(suffix):
            value *= mult
            rest = rest[len(suffix) :]
            break
    if rest and not rest.isalpha():
        raise ParseError(f"garbled number: {token!r}", line, column)
    if not math.isfinite(value):
        raise ParseError(f"number out of range: {token!r}", line, column)
    return float(f"{value:.6e}")


def format_value(x: float) -> str:
    """Canonical rendering: scientific notation, 6 significant digits, bare
    exponent ("1.000000e3")."""
    mant, exp = f"{x:.6e}".split("e")
    return f"{mant}e{int(exp)}"


# --- parser -----------------------------------------------------------------


def _strip_comment(line: str) -> str:
    cut = line.find(";")
    return line if cut < 0 else line[:cut]


def _logical_lines(text: str) -> list[tuple[int, str]]:
    """Join continuation lines; yield (first physical line number, text)."""
    out: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if line.startswith("+"):
            if not out:
                raise ParseError("continuation line with nothing to continue", lineno)
            prev_no, prev = out[-1]
            out[-1] = (prev_no, prev + " " + line[1:].strip())
            continue
        out.append((lineno, line))
    return out


def _tokenize(line: str) -> list[str]:
    # normalize "W = 2u" to "W=2u", then let parens/commas act as whitespace
    line = _EQUALS_RE.sub("=", line)
    line = line.replace("(", " ").replace(")", " ").replace(",", " ")
    return line.split()


def _split_kv(tokens: list[str], lineno: int, allowed: set[str], what: str) -> dict[str, str]:
    pairs: dict[str, str] = {}
    for col, tok in enumerate(tokens, start=1):
        if "=" not in tok:
            raise ParseError(f"{what}: expected key=value, got {tok!r}", lineno, col)
        key, _, val = tok.partition("=")
        key = key.upper()
        if allowed and key not in allowed:
            raise ParseError(f"{what}: unknown parameter {key}", lineno, col)
        if not val:
            raise ParseError(f"{what}: empty value for {key}", lineno, col)
        pairs[key] = val
    return pairs


def _parse_multiplicity(raw: str | None, lineno: int) -> int:
    if raw is None:
        return 1
    m = parse_value(raw, lineno)
    if m < 1 or m != int(m):
        raise ParseError(f"multiplicity M must be a positive integer, got {raw!r}", lineno)
    return int(m)


def _parse_waveform(tokens: list[str], lineno: int) -> Waveform:
    if not tokens:
        raise ParseError("source card missing a value or waveform", lineno)
    head = tokens[0].lower()
    if head == "dc":
        if len(tokens) != 2:
            raise ParseError("DC takes exactly one value", lineno)
        return Dc(parse_value(tokens[1], lineno))
    if head == "pulse":
        if len(tokens) != 8:
            raise ParseError("PULSE takes 7 values (v1 v2 td tr tf pw per)", lineno)
        vals = [parse_value(t, lineno) for t in tokens[1:]]
        return Pulse(*vals)
    if head == "sin":
        if len(tokens) < 4 or len(tokens) > 6:
            raise ParseError("SIN takes 3 to 5 values (vo va freq [td [theta]])", lineno)
        vals = [parse_value(t, lineno) for t in tokens[1:]]
        return Sin(*vals)
    if head == "pwl":
        vals = [parse_value(t, lineno) for t in tokens[1:]]
        if len(vals) < 2 or len(vals) % 2 != 0:
            raise ParseError("PWL takes an even number (>= 2) of time/value pairs", lineno)
        points = tuple(zip(vals[0::2], vals[1::2]))
        return Pwl(points)
    if len(tokens) == 1:
        return Dc(parse_value(tokens[0], lineno))
    raise ParseError(f"unrecognized waveform {tokens[0]!r}", lineno)


def _parse_element(tokens: list[str], lineno: int) -> Element:
    name = tokens[0].upper()
    letter = name[0]
    rest = tokens[1:]

    if letter in "RCL":
        if len(rest) < 3:
            raise ParseError(f"{name}: expected two nodes and a value", lineno)
        if len(rest) > 3:
            raise ParseError(f"{name}: unexpected trailing tokens", lineno)
        nodes = (canonical_node(rest[0]), canonical_node(rest[1]))
        value = parse_value(rest[2], lineno, 4)
        if value <= 0:
            raise ParseError(f"{name}: value must be strictly positive", lineno, 4)
        cls = {"R": Resistor, "C": Capacitor, "L": Inductor}[letter]
        return cls(name, nodes, value)

    if letter == "M":
        if len(rest) < 5:
            raise ParseError(f"{name}: expected 4 nodes and a model name", lineno)
        nodes = tuple(canonical_node(n) for n in rest[:4])
        model = rest[4].upper()
        kv = _split_kv(rest[5:], lineno, {"W", "L", "M"}, name)
        if "W" not in kv or "L" not in kv:
            raise ParseError(f"{name}: W= and L= are required", lineno)
        w = parse_value(kv["W"], lineno)
        l = parse_value(kv["L"], lineno)
        if w <= 0 or l <= 0:
            raise ParseError(f"{name}: W and L must be strictly positive", lineno)
        m = _parse_multiplicity(kv.get("M"), lineno)
        return Mosfet(name, nodes, MosfetParams(model, w, l, m))

    if letter == "Q":
        if len(rest) < 4:
            raise ParseError(f"{name}: expected 3 nodes and a model name", lineno)
        nodes = tuple(canonical_node(n) for n in rest[:3])
        model = rest[3].upper()
        kv = _split_kv(rest[4:], lineno, {"M"}, name)
        m = _parse_multiplicity(kv.get("M"), lineno)
        return Bjt(name, nodes, BjtParams(model, m))

    if letter in "VI":
        if len(rest) < 3:
            raise ParseError(f"{name}: expected two nodes and a value or waveform", lineno)
        nodes = (canonical_node(rest[0]), canonical_node(rest[1]))
        waveform = _parse_waveform(rest[2:], lineno)
        cls = VSource if letter == "V" else ISource
        return cls(name, nodes, waveform)

    if letter == "X":
        if len(rest) < 2:
            raise ParseError(f"{name}: expected at least one node and a subcircuit name", lineno)
        nodes = tuple(canonical_node(n) for n in rest[:-1])
        return SubcktInstance(name, nodes, rest[-1].upper())

    raise ParseError(f"unsupported element kind {letter!r} in {name}", lineno)


def _parse_model(tokens: list[str], lineno: int) -> ModelCard:
    if len(tokens) < 3:
        raise ParseError(".model: expected a name and a kind", lineno)
    name = tokens[1].upper()
    kind = tokens[2].upper()
    if kind not in MODEL_KINDS:
        raise ParseError(f".model {name}: unsupported kind {kind}", lineno)
    kv = _split_kv(tokens[3:], lineno, set(), f".model {name}")
    params = {k: parse_value(v, lineno) for k, v in kv.items()}
    return ModelCard(name, kind, params)


def _parse_directive(tokens: list[str], raw: str, lineno: int) -> Directive:
    word = tokens[0].lower()
    args = tokens[1:]
    if word == ".op":
        if args:
            raise ParseError(".op takes no arguments", lineno)
        return Op()
    if word == ".dc":
        if len(args) != 4:
            raise ParseError(".dc expects: source start stop step", lineno)
        return DcSweep(
            args[0].upper(),
            parse_value(args[1], lineno),
            parse_value(args[2], lineno),
            parse_value(args[3], lineno),
        )
    if word == ".tran":
        if len(args) != 2:
            raise ParseError(".tran expects: tstep tstop", lineno)
        return Tran(parse_value(args[0], lineno), parse_value(args[1], lineno))
    if word == ".ac":
        if len(args) != 4:
            raise ParseError(".ac expects: dec|oct|lin npoints fstart fstop", lineno)
        variation = args[0].lower()
        if variation not in ("dec", "oct", "lin"):
            raise ParseError(f".ac: unknown variation {args[0]!r}", lineno)
        npoints = parse_value(args[1], lineno)
        if npoints != int(npoints):
            raise ParseError(".ac: npoints must be an integer", lineno)
        return Ac(variation, int(npoints), parse_value(args[2], lineno), parse_value(args[3], lineno))
    if word == ".temp":
        if len(args) != 1:
            raise ParseError(".temp expects one value", lineno)
        return Temp(parse_value(args[0], lineno))
    return UnknownDirective(raw)


_REFDES_RE = re.compile(r"[A-Za-z]\d")


def _can_start_card(line: str) -> bool:
    first = line[0]
    if first.upper() in _ELEMENT_LETTERS or first in ".*+;":
        return True
    # "D1", "E12", ... look like element cards of an unsupported kind; route
    # them to the element parser so they fail loudly instead of becoming a
    # title.
    return bool(_REFDES_RE.match(line.split()[0]))


def parse_netlist(text: str) -> Netlist:
    """Parse netlist source into a Netlist.

    The first line is treated as a free-text title only when it cannot start
    a card, directive, or comment; titles beginning with an element letter or
    a reference-designator-shaped word are therefore not representable (use a
    ``*`` comment instead).
    """
    if not text.strip():
        raise ParseError("empty netlist", 1)

    physical = text.splitlines()
    title = ""
    body_start = 0
    for i, raw in enumerate(physical):
        stripped = raw.strip()
        if not stripped:
            continue
        if not _can_start_card(stripped):
            title = stripped
            body_start = i + 1
        break

    body = "\n".join(physical[body_start:])
    offset = body_start

    netlist = Netlist(title=title)
    current_sub: tuple[str, tuple[str, ...], list[Element], int] | None = None

    for rel_lineno, line in _logical_lines(body):
        lineno = rel_lineno + offset
        if line.startswith("*"):
            continue
        if line.startswith("."):
            tokens = _tokenize(line)
            word = tokens[0].lower()
            if word == ".end":
                netlist.end_present = True
                break
            if word == ".subckt":
                if current_sub is not None:
                    raise ParseError("nested .subckt definitions are not supported", lineno)
                if len(tokens) < 3:
                    raise ParseError(".subckt expects a name and at least one port", lineno)
                ports = tuple(canonical_node(p) for p in tokens[2:])
                current_sub = (tokens[1].upper(), ports, [], lineno)
                continue
            if word == ".ends":
                if current_sub is None:
                    raise ParseError(".ends without a matching .subckt", lineno)
                sub_name, ports, elems, _ = current_sub
                if sub_name in netlist.subckts:
                    raise ParseError(f"duplicate subcircuit {sub_name}", lineno)
                netlist.subckts[sub_name] = SubcktDef(sub_name, ports, tuple(elems))
                current_sub = None
                continue
            if current_sub is not None:
                raise ParseError(f"directive {word} not allowed inside .subckt", lineno)
            if word == ".model":
                card = _parse_model(tokens, lineno)
                if card.name in netlist.models:
                    raise ParseError(f"duplicate model {card.name}", lineno)
                netlist.models[card.name] = card
                continue
            netlist.directives.append(_parse_directive(tokens, line, lineno))
            continue

        first = line[0]
        if first.upper() not in _ELEMENT_LETTERS:
            raise ParseError(f"unrecognized card starting with {first!r}", lineno, 1)
        element = _parse_element(_tokenize(line), lineno)
        if current_sub is not None:
            current_sub[2].append(element)
        else:
            netlist.elements.append(element)

    if current_sub is not None:
        raise ParseError(f".subckt {current_sub[0]} without .ends", current_sub[3])
    return netlist


# --- canonical serializer ---------------------------------------------------


def _waveform_card(w: Waveform) -> str:
    fv = format_value
    if isinstance(w, Dc):
        return f"DC {fv(w.v)}"
    if isinstance(w, Pulse):
        vals = " ".join(fv(x) for x in (w.v1, w.v2, w.td, w.tr, w.tf, w.pw, w.per))
        return f"PULSE({vals})"
    if isinstance(w, Sin):
        vals = " ".join(fv(x) for x in (w.vo, w.va, w.freq, w.td, w.theta))
        return f"SIN({vals})"
    if isinstance(w, Pwl):
        vals = " ".join(f"{fv(t)} {fv(v)}" for t, v in w.points)
        return f"PWL({vals})"
    raise TypeError(f"unknown waveform {w!r}")


def _element_card(e: Element) -> str:
    fv = format_value
    nodes = " ".join(e.nodes)
    if isinstance(e, (Resistor, Capacitor, Inductor)):
        return f"{e.name} {nodes} {fv(e.value)}"
    if isinstance(e, Mosfet):
        p = e.params
        card = f"{e.name} {nodes} {p.model} W={fv(p.w)} L={fv(p.l)}"
        return card + (f" M={p.m}" if p.m != 1 else "")
    if isinstance(e, Bjt):
        p = e.params
        card = f"{e.name} {nodes} {p.model}"
        return card + (f" M={p.m}" if p.m != 1 else "")
    if isinstance(e, (VSource, ISource)):
        return f"{e.name} {nodes} {_waveform_card(e.waveform)}"
    if isinstance(e, SubcktInstance):
        return f"{e.name} {nodes} {e.subckt}"
    raise TypeError(f"unknown element {e!r}")


def _directive_card(d: Directive) -> str:
    fv = format_value
    if isinstance(d, Op):
        return ".op"
    if isinstance(d, DcSweep):
        return f".dc {d.source} {fv(d.start)} {fv(d.stop)} {fv(d.step)}"
    if isinstance(d, Tran):
        return f".tran {fv(d.tstep)} {fv(d.tstop)}"
    if isinstance(d, Ac):
        return f".ac {d.variation} {d.npoints} {fv(d.fstart)} {fv(d.fstop)}"
    if isinstance(d, Temp):
        return f".temp {fv(d.celsius)}"
    if isinstance(d, UnknownDirective):
        return d.raw
    raise TypeError(f"unknown directive {d!r}")


def serialize(netlist: Netlist) -> str:
    """Render the deterministic canonical form: one card per line, models and
    subcircuits sorted by name, values at 6 significant digits, ``.end`` last.
    """
    lines: list[str] = []
    if netlist.title:
        lines.append(netlist.title)
    for name in sorted(netlist.subckts):
        sub = netlist.subckts[name]
        lines.append(f".subckt {sub.name} {' '.join(sub.ports)}")
        lines.extend(_element_card(e) for e in sub.elements)
        lines.append(".ends")
    for name in sorted(netlist.models):
        card = netlist.models[name]
        params = " ".join(f"{k}={format_value(v)}" for k, v in sorted(card.params.items()))
        suffix = f" ({params})" if params else ""
        lines.append(f".model {card.name} {card.kind}{suffix}")
    lines.extend(_element_card(e) for e in netlist.elements)
    lines.extend(_directive_card(d) for d in netlist.directives)
    lines.append(".end")
    return "\n".join(lines) + "\n"


# --- flattening -------------------------------------------------------------


def flatten(netlist: Netlist) -> Netlist:
    """Expand every subcircuit instance in place of its X card.

    Instance element names gain an ``<INSTNAME>.`` prefix and internal nodes
    become ``<instname>.<node>``; ground is global and never renamed. The
    result carries no subcircuit definitions. Flattened element names no
    longer obey the first-letter-encodes-kind rule, so the flat netlist is an
    in-memory analysis form, not a serialization target.

    A netlist without X cards is returned unchanged.
    """
    if not any(isinstance(e, SubcktInstance) for e in netlist.elements):
        return netlist

    def instantiate(inst: SubcktInstance, stack: list[str]) -> list[Element]:
        sub = netlist.subckts.get(inst.subckt)
        if sub is None:
            raise UnknownSubckt(inst.subckt)
        if inst.subckt in stack:
            raise RecursionDetected(stack + [inst.subckt])
        if len(inst.nodes) != len(sub.ports):
            raise SubcktArityError(inst.name, sub.name, len(inst.nodes), len(sub.ports))
        node_map = dict(zip(sub.ports, inst.nodes))
        prefix = inst.name
        out: list[Element] = []
        for e in sub.elements:
            mapped = tuple(
                n if is_ground(n) else node_map.get(n, f"{prefix.lower()}.{n}")
                for n in e.nodes
            )
            renamed = replace(e, name=f"{prefix}.{e.name}", nodes=mapped)
            if isinstance(renamed, SubcktInstance):
                out.extend(instantiate(renamed, stack + [sub.name]))
            else:
                out.append(renamed)
        return out

    flat_elements: list[Element] = []
    for e in netlist.elements:
        if isinstance(e, SubcktInstance):
            flat_elements.extend(instantiate(e, []))
        else:
            flat_elements.append(e)
    return Netlist(
        title=netlist.title,
        elements=flat_elements,
        models=dict(netlist.models),
        directives=list(netlist.directives),
        subckts={},
        end_present=netlist.end_present,
    )


# --- extraction from LLM output ---------------------------------------------


def _is_cardish(line: str) -> bool:
    stripped = line.strip()
    if not stripped:
        return False
    if stripped.startswith("."):
        return True
    if stripped[0].upper() not in _ELEMENT_LETTERS:
        return False
    try:
        _parse_element(_tokenize(_strip_comment(stripped)), 1)
    except ParseError:
        return False
    return True


def _is_neutral(line: str) -> bool:
    stripped = line.strip()
    return not stripped or stripped.startswith("*") or stripped.startswith("+")


def extract_netlist(llm_output: str) -> str:
    """Pull netlist text out of a model reply.

    Preference order: the last fenced code block that contains at least one
    parseable card; otherwise the largest contiguous run of card/directive
    lines (comments, continuations, and blanks do not break a run). Raises
    NoNetlistFound when no line of the input parses as a card.
    """
    blocks = _FENCE_RE.findall(llm_output)
    for block in reversed(blocks):
        if any(_is_cardish(l) for l in block.splitlines()):
            return block.strip("\n")

    lines = llm_output.splitlines()
    best: tuple[int, int, int] | None = None  # (card_count, start, stop)
    start = None
    count = 0
    for i, line in enumerate(lines + [""]):  # sentinel flushes the last run
        if i < len(lines) and (_is_cardish(line) or (start is not None and _is_neutral(line))):
            if start is None:
                start = i
            if _is_cardish(line):
                count += 1
            continue
        if start is not None and count > 0:
            if best is None or count > best[0]:
                best = (count, start, i)
        start = None
        count = 0
    if best is None:
        raise NoNetlistFound("no line parses as a SPICE card or directive")
    _, lo, hi = best
    run = lines[lo:hi]
    while run and _is_neutral(run[-1]):
        run.pop()
    return "\n".join(run)
