"""
Problem files (``.clw``): sectioned, line-oriented declarations of a PDE system
and the objects attached to it.

``parse_problem`` reads the text into raw sections, then interprets them in
canonical order against a JetSpace built from ``[vars]``. ``print_problem``
writes the raw sections back in canonical order, so printing a parsed file is a
fixed point of parse-then-print.
"""

import hashlib
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import sympy
from sympy import Expr

from jetlaw.core.errors import (
    InvalidSystem,
    MissingVars,
    ParseError,
    UndeclaredSymbol,
    UnknownSection,
)
from jetlaw.expr.jetspace import FieldSpec, JetSpace, JetVar
from jetlaw.expr.opaque import OpaqueRegistry
from jetlaw.jet.ranking import Ranking
from jetlaw.jet.system import PdeSystem
from jetlaw.claws.bridge import Syzygy, syzygy_from_expression
from jetlaw.claws.model import ConservationLaw, ConstraintSet, Multiplier
from jetlaw.hodograph.transform import HodographMap, build_map
from jetlaw.problem.grammar import ELEMENTARY, ExpressionBuilder
from jetlaw.symmetry.characteristics import Characteristic, characteristic_from_point
from jetlaw.variational.operators import FluxVector, euler_lagrange_system

logger = logging.getLogger(__name__)

SECTION_ORDER = (
    "vars",
    "fields",
    "functions",
    "ranking",
    "define",
    "system",
    "lagrangian",
    "syzygy",
    "constraints",
    "lambda",
    "multiplier",
    "claw",
    "symmetry",
    "hodograph",
    "checks",
)
NAMED_SECTIONS = frozenset({"claw", "multiplier", "symmetry"})
EXPECTED_RESULTS = ("verified", "refuted", "numeric-only", "error")

_HEADER = re.compile(r"^\[\s*([A-Za-z]+)(?:\s+([A-Za-z0-9_~.-]+))?\s*\]$")
_FUNCTION_RULE = re.compile(r"^([A-Za-z][A-Za-z0-9]*)'\(\s*([A-Za-z][A-Za-z0-9]*)\s*\)$")
_CALL_DECL = re.compile(r"^([A-Za-z][A-Za-z0-9]*)\s*\(([^)]*)\)$")


@dataclass
class Entry:
    text: str
    line: int
    column: int = 1


@dataclass
class RawSection:
    kind: str
    name: str = ""
    entries: List[Entry] = field(default_factory=list)
    line: int = 0

    @property
    def header(self) -> str:
        if self.name and self.name != self.kind:
            return f"[{self.kind} {self.name}]"
        return f"[{self.kind}]"


@dataclass
class Check:
    command: str
    names: List[str]
    expr_text: Optional[str]
    expected: str
    line: int
    expr: Optional[Expr] = None

    def describe(self) -> str:
        parts = [self.command] + self.names
        if self.expr_text is not None:
            parts += [":", self.expr_text]
        return " ".join(parts)


@dataclass
class HodographSpec:
    map: HodographMap
    target: Optional[ConservationLaw] = None
    expect: List[Expr] = field(default_factory=list)


@dataclass
class ProblemFile:
    """A parsed problem: its raw sections plus the objects they declare."""

    sections: List[RawSection]
    space: JetSpace
    ranking: Ranking
    source: str = "<string>"
    system: Optional[PdeSystem] = None
    lagrangian: Optional[Expr] = None
    lagrangian_leads: Optional[List[JetVar]] = None
    constraints: Optional[ConstraintSet] = None
    lambdas: Dict[str, Expr] = field(default_factory=dict)
    multipliers: Dict[str, Multiplier] = field(default_factory=dict)
    claws: Dict[str, ConservationLaw] = field(default_factory=dict)
    symmetries: Dict[str, Characteristic] = field(default_factory=dict)
    syzygies: List[Syzygy] = field(default_factory=list)
    hodograph: Optional[HodographSpec] = None
    checks: List[Check] = field(default_factory=list)
    names: Dict[str, Expr] = field(default_factory=dict)

    @property
    def digest(self) -> str:
        return hashlib.sha256(print_problem(self).encode("utf-8")).hexdigest()

    def builder(self, line: int = 0, column: int = 0) -> ExpressionBuilder:
        return ExpressionBuilder(self.space, self.names, line, column)

    def parse(self, text: str) -> Expr:
        return self.builder().parse(text)


# -- raw sections --------------------------------------------------------------


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].rstrip()


def read_sections(text: str) -> List[RawSection]:
    """Split ``text`` into sections; comments and blank lines are dropped."""
    sections: List[RawSection] = []
    seen = set()
    current: Optional[RawSection] = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = _strip_comment(raw)
        if not body.strip():
            continue
        stripped = body.strip()
        column = len(body) - len(body.lstrip()) + 1
        if stripped.startswith("["):
            match = _HEADER.match(stripped)
            if not match:
                raise ParseError(f"malformed section header {stripped}", lineno, column)
            kind, name = match.group(1), match.group(2) or ""
            if kind not in SECTION_ORDER:
                raise UnknownSection(f"unknown section [{kind}]", lineno, column)
            if name and kind not in NAMED_SECTIONS:
                raise ParseError(f"section [{kind}] takes no name", lineno, column)
            if kind in NAMED_SECTIONS and not name:
                name = kind
            key = (kind, name)
            if key in seen:
                raise ParseError(f"duplicate section {stripped}", lineno, column)
            seen.add(key)
            current = RawSection(kind, name, line=lineno)
            sections.append(current)
            continue
        if current is None:
            raise ParseError("text before the first section header", lineno, column)
        current.entries.append(Entry(" ".join(stripped.split()), lineno, column))
    return sections


def _canonical_sections(sections: Sequence[RawSection]) -> List[RawSection]:
    order = {kind: k for k, kind in enumerate(SECTION_ORDER)}
    indexed = sorted(enumerate(sections), key=lambda item: (order[item[1].kind], item[0]))
    return [s for _, s in indexed]


def print_sections(sections: Sequence[RawSection]) -> str:
    blocks = []
    for section in _canonical_sections(sections):
        lines = [section.header] + [entry.text for entry in section.entries]
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def print_problem(problem: ProblemFile) -> str:
    """Canonical text of a problem."""
    return print_sections(problem.sections)


# -- interpretation ------------------------------------------------------------


def _split(entry: Entry, separator: str = "=") -> Tuple[str, str, int]:
    """Split ``key = value``; returns the value and its column."""
    if separator not in entry.text:
        raise ParseError(f"expected '{separator}' in '{entry.text}'", entry.line, entry.column)
    key, value = entry.text.split(separator, 1)
    value_column = entry.column + len(key) + len(separator) + (len(value) - len(value.lstrip()))
    return key.strip(), value.strip(), value_column


def _names(value: str) -> List[str]:
    return [item.strip() for item in value.split(",") if item.strip()]


def _ordered(value: str) -> List[str]:
    return [item.strip() for item in value.split(">") if item.strip()]


class _Interpreter:
    def __init__(self, sections: List[RawSection], source: str):
        self.sections = sections
        self.source = source
        self.by_kind: Dict[str, List[RawSection]] = {}
        for section in _canonical_sections(sections):
            self.by_kind.setdefault(section.kind, []).append(section)
        self.names: Dict[str, Expr] = {}

    def single(self, kind: str) -> Optional[RawSection]:
        found = self.by_kind.get(kind, [])
        return found[0] if found else None

    def expr(self, space: JetSpace, text: str, line: int, column: int, extra=None) -> Expr:
        names = dict(self.names)
        names.update(extra or {})
        return ExpressionBuilder(space, names, line, column).parse(text)

    # -- declarations ---------------------------------------------------------

    def vars(self) -> Dict[str, object]:
        section = self.single("vars")
        if section is None:
            raise MissingVars("problem declares no [vars] section")
        decl: Dict[str, object] = {"unknown": {}}
        for entry in section.entries:
            key, value, column = _split(entry)
            if key in ("independent", "dependent", "arbitrary", "constants", "positive"):
                decl[key] = _names(value)
            elif key == "unknown":
                for item in re.findall(r"[A-Za-z][A-Za-z0-9]*\s*\([^)]*\)", value):
                    match = _CALL_DECL.match(item.strip())
                    decl["unknown"][match.group(1)] = _names(match.group(2))  # type: ignore[index,union-attr]
            else:
                raise ParseError(f"unknown [vars] key '{key}'", entry.line, entry.column)
        if not decl.get("independent"):
            raise MissingVars("[vars] declares no independent variables")
        return decl

    def fields(self) -> Tuple[List[FieldSpec], List[Tuple[FieldSpec, Entry, str, int]]]:
        specs, relations = [], []
        section = self.single("fields")
        for entry in section.entries if section else []:
            head, _, relation = entry.text.partition(":")
            match = _CALL_DECL.match(head.strip())
            if not match:
                raise ParseError(f"expected name(args) in '{entry.text}'", entry.line, entry.column)
            spec = FieldSpec(match.group(1), tuple(_names(match.group(2))))
            specs.append(spec)
            if relation.strip():
                offset = entry.column + len(head) + 1
                relations.append((spec, entry, relation.strip(), offset))
        return specs, relations

    def functions(self) -> Tuple[OpaqueRegistry, List[Tuple[str, str, Entry, str, int]]]:
        registry = OpaqueRegistry()
        rules = []
        section = self.single("functions")
        for entry in section.entries if section else []:
            if "=" in entry.text:
                key, value, column = _split(entry)
                match = _FUNCTION_RULE.match(key)
                if not match:
                    raise ParseError(f"expected F'(s) = rule, got '{key}'", entry.line, entry.column)
                if match.group(1) not in registry:
                    registry.declare(match.group(1))
                rules.append((match.group(1), match.group(2), entry, value, column))
            else:
                for name in _names(entry.text):
                    if name in ELEMENTARY:
                        raise ParseError(f"'{name}' is a built-in function", entry.line, entry.column)
                    registry.declare(name)
        return registry, rules

    def space(self) -> JetSpace:
        decl = self.vars()
        specs, relations = self.fields()
        registry, rules = self.functions()
        try:
            space = JetSpace(
                decl["independent"],  # type: ignore[arg-type]
                decl.get("dependent", []),  # type: ignore[arg-type]
                arbitrary=decl.get("arbitrary", []),  # type: ignore[arg-type]
                fields=specs,
                constants=decl.get("constants", []),  # type: ignore[arg-type]
                functions=registry,
                unknowns=decl["unknown"],  # type: ignore[arg-type]
                positive=decl.get("positive", []),  # type: ignore[arg-type]
            )
        except InvalidSystem as exc:
            raise ParseError(str(exc), self.single("vars").line, 1)  # type: ignore[union-attr]
        for spec, entry, relation, offset in relations:
            lhs, rhs = relation.split("=", 1) if "=" in relation else (relation, "")
            coord = space.parse_name(lhs.strip())
            if coord is None or coord.base != spec.name or coord.idx.is_zero():
                raise ParseError(f"expected a partial of {spec.name} in '{relation}'", entry.line, offset)
            spec.relations[coord.idx] = self.expr(space, rhs.strip(), entry.line, offset + len(lhs) + 1)
        for name, var, entry, value, column in rules:
            rule = self.expr(space, value, entry.line, column, {var: registry.variable})
            registry.set_rule(name, rule)
        return space

    def ranking(self, space: JetSpace, strategy: str) -> Ranking:
        section = self.single("ranking")
        options: Dict[str, object] = {"strategy": strategy}
        for entry in section.entries if section else []:
            key, value, _ = _split(entry)
            if key == "strategy":
                options["strategy"] = value
            elif key in ("independent", "dependent"):
                options[key] = _ordered(value)
            else:
                raise ParseError(f"unknown [ranking] key '{key}'", entry.line, entry.column)
        try:
            return Ranking(space, **options)  # type: ignore[arg-type]
        except InvalidSystem as exc:
            raise ParseError(str(exc), section.line if section else 0, 1)

    def defines(self, space: JetSpace) -> None:
        section = self.single("define")
        for entry in section.entries if section else []:
            key, value, column = _split(entry)
            self.names[key] = self.expr(space, value, entry.line, column)

    # -- systems --------------------------------------------------------------

    def _lead(self, space: JetSpace, text: str, entry: Entry) -> JetVar:
        coord = space.parse_name(text.strip())
        if not isinstance(coord, JetVar):
            raise UndeclaredSymbol(text.strip(), entry.line, entry.column)
        return coord

    def system(self, space: JetSpace, ranking: Ranking, max_depth: int) -> Optional[PdeSystem]:
        section = self.single("system")
        if section is None:
            return None
        components, leads, solved = [], [], []
        for entry in section.entries:
            text, lead_text = entry.text, None
            if "@" in text:
                text, lead_text = text.rsplit("@", 1)
            key, value, column = _split(Entry(text.strip(), entry.line, entry.column))
            lhs = self.expr(space, key, entry.line, entry.column)
            rhs = self.expr(space, value, entry.line, column)
            lead = self._lead(space, lead_text, entry) if lead_text else None
            plain = space.parse_name(key)
            if lead is None and isinstance(plain, JetVar):
                lead, omega = plain, rhs
            else:
                omega = None
            components.append(lhs - rhs)
            leads.append(lead)
            solved.append(omega)
        try:
            return PdeSystem.from_components(
                space, components, ranking, leads, solved, max_depth=max_depth
            )
        except InvalidSystem as exc:
            raise ParseError(str(exc), section.line, 1)

    def lagrangian(self, space: JetSpace) -> Tuple[Optional[Expr], Optional[List[JetVar]]]:
        section = self.single("lagrangian")
        if section is None:
            return None, None
        lagrangian, leads = None, None
        for entry in section.entries:
            key, value, column = _split(entry)
            if key == "L":
                lagrangian = self.expr(space, value, entry.line, column)
            elif key == "lead":
                leads = [self._lead(space, name, entry) for name in _names(value)]
            else:
                raise ParseError(f"unknown [lagrangian] key '{key}'", entry.line, entry.column)
        if lagrangian is None:
            raise ParseError("[lagrangian] needs L = expr", section.line, 1)
        return lagrangian, leads

    def syzygies(self, space: JetSpace, system: Optional[PdeSystem]) -> List[Syzygy]:
        section = self.single("syzygy")
        if section is None:
            return []
        if system is None:
            raise ParseError("[syzygy] needs a system", section.line, 1)
        placeholders = [f"A{mu + 1}" for mu in range(len(system))]
        extended = space.derived(
            space.independents, list(space.dependents) + placeholders, positive=space.positive
        )
        out = []
        for entry in section.entries:
            key, value, column = _split(entry) if "=" in entry.text else (entry.text, "0", entry.column)
            relation = self.expr(extended, key, entry.line, entry.column)
            target = self.expr(space, value, entry.line, column)
            out.append(syzygy_from_expression(system, extended, relation, target))
        return out

    # -- attached objects ------------------------------------------------------

    def constraints(self, space: JetSpace) -> Optional[ConstraintSet]:
        section = self.single("constraints")
        if section is None:
            return None
        rows = []
        for entry in section.entries:
            if "=" in entry.text:
                key, value, column = _split(entry)
                rows.append(
                    self.expr(space, key, entry.line, entry.column)
                    - self.expr(space, value, entry.line, column)
                )
            else:
                rows.append(self.expr(space, entry.text, entry.line, entry.column))
        try:
            return ConstraintSet.from_rows(space, rows)
        except InvalidSystem as exc:
            raise ParseError(str(exc), section.line, 1)

    def lambdas(self, space: JetSpace) -> Dict[str, Expr]:
        section = self.single("lambda")
        out: Dict[str, Expr] = {}
        for entry in section.entries if section else []:
            key, value, column = _split(entry)
            out[key] = self.expr(space, value, entry.line, column)
            self.names[key] = out[key]
        return out

    def _indexed(
        self, space: JetSpace, section: RawSection, prefix: str, labels: Sequence[str]
    ) -> List[Expr]:
        values: List[Expr] = [sympy.S.Zero] * len(labels)
        for entry in section.entries:
            key, value, column = _split(entry)
            label = key[len(prefix):].lstrip("_") if key.startswith(prefix) else None
            if label == "" and len(labels) == 1:
                label = labels[0]
            if label not in labels:
                raise ParseError(
                    f"'{key}' is not one of {', '.join(prefix + l for l in labels)}",
                    entry.line,
                    entry.column,
                )
            values[list(labels).index(label)] = self.expr(space, value, entry.line, column)
        return values

    def multipliers(self, space: JetSpace, count: int) -> Dict[str, Multiplier]:
        labels = [str(mu + 1) for mu in range(count)]
        return {
            s.name: Multiplier.of(self._indexed(space, s, "Q", labels), s.name)
            for s in self.by_kind.get("multiplier", [])
        }

    def claws(self, space: JetSpace) -> Dict[str, ConservationLaw]:
        out = {}
        for section in self.by_kind.get("claw", []):
            if len(section.entries) == 1 and section.entries[0].text.startswith("divergence"):
                entry = section.entries[0]
                _, value, column = _split(entry)
                out[section.name] = ConservationLaw.from_divergence(
                    self.expr(space, value, entry.line, column), section.name
                )
                continue
            fluxes = self._indexed(space, section, "F", space.independents)
            out[section.name] = ConservationLaw(FluxVector.of(fluxes), section.name)
        return out

    def symmetries(self, space: JetSpace) -> Dict[str, Characteristic]:
        out = {}
        for section in self.by_kind.get("symmetry", []):
            keys = {_split(e)[0] for e in section.entries}
            if any(k.startswith(("xi", "eta")) for k in keys):
                xi, eta = self._point(space, section)
                out[section.name] = characteristic_from_point(space, xi, eta, section.name)
            else:
                q = self._indexed(space, section, "Q", space.dependents)
                out[section.name] = Characteristic.of(q, section.name)
        return out

    def _point(self, space: JetSpace, section: RawSection) -> Tuple[List[Expr], List[Expr]]:
        xi: List[Expr] = [sympy.S.Zero] * space.n
        eta: List[Expr] = [sympy.S.Zero] * len(space.dependents)
        for entry in section.entries:
            key, value, column = _split(entry)
            kind, _, label = key.partition("_")
            expr = self.expr(space, value, entry.line, column)
            if kind == "xi" and label in space.independents:
                xi[space.independents.index(label)] = expr
            elif kind == "eta" and label in space.dependents:
                eta[space.dependents.index(label)] = expr
            else:
                raise ParseError(f"unexpected point-symmetry key '{key}'", entry.line, entry.column)
        return xi, eta

    def hodograph(self, space: JetSpace) -> Optional[HodographSpec]:
        section = self.single("hodograph")
        if section is None:
            return None
        settings: Dict[str, Tuple[str, Entry, int]] = {}
        for entry in section.entries:
            key, value, column = _split(entry)
            settings[key] = (value, entry, column)
        if "swap" not in settings:
            raise ParseError("[hodograph] needs swap = u <-> x", section.line, 1)
        pair = [p.strip() for p in settings["swap"][0].split("<->")]
        max_order = int(settings["max_order"][0]) if "max_order" in settings else 3
        try:
            hmap = build_map(space, pair[0], pair[1], max_order)
        except Exception as exc:
            raise ParseError(str(exc), settings["swap"][1].line, settings["swap"][2])
        new = hmap.new
        fluxes: List[Expr] = [sympy.S.Zero] * new.n
        has_target = False
        expect = []
        for key, (value, entry, column) in settings.items():
            if key.startswith("F_") and key[2:] in new.independents:
                fluxes[new.independents.index(key[2:])] = self.expr(new, value, entry.line, column)
                has_target = True
            elif key == "expect_system":
                expect.append(self.expr(new, value, entry.line, column))
            elif key not in ("swap", "max_order"):
                raise ParseError(f"unknown [hodograph] key '{key}'", entry.line, entry.column)
        target = ConservationLaw(FluxVector.of(fluxes), "target") if has_target else None
        return HodographSpec(hmap, target, expect)

    def checks(self, space: JetSpace) -> List[Check]:
        section = self.single("checks")
        out = []
        for entry in section.entries if section else []:
            if "->" not in entry.text:
                raise ParseError("check needs '-> expected'", entry.line, entry.column)
            body, expected = entry.text.rsplit("->", 1)
            expected = expected.strip()
            if expected not in EXPECTED_RESULTS:
                raise ParseError(f"unknown expected result '{expected}'", entry.line, entry.column)
            head, colon, expr_text = body.partition(":")
            words = head.split()
            if not words:
                raise ParseError("check needs a command", entry.line, entry.column)
            text = expr_text.strip() if colon else None
            parsed = None
            if text is not None:
                parsed = self.expr(space, text, entry.line, entry.column + len(head) + 1)
            out.append(Check(words[0], words[1:], text, expected, entry.line, parsed))
        return out


def parse_problem(
    text: str, source: str = "<string>", max_depth: int = 64, ranking: str = "grlex"
) -> ProblemFile:
    """Parse and interpret a problem file.

    Raises:
        MissingVars: If no independent variables are declared
        ParseError: With line and column for malformed input
        UndeclaredSymbol: For names used but never declared
        UnknownSection: For section headers outside the format
    """
    sections = read_sections(text)
    interp = _Interpreter(sections, source)
    space = interp.space()
    order = interp.ranking(space, ranking)
    interp.defines(space)
    system = interp.system(space, order, max_depth)
    lagrangian, leads = interp.lagrangian(space)
    if system is None and lagrangian is not None:
        system = euler_lagrange_system(space, lagrangian, leads, order, max_depth)
    syzygies = interp.syzygies(space, system)
    if system is not None:
        system.syzygies = tuple(syzygies)
    constraints = interp.constraints(space)
    lambdas = interp.lambdas(space)
    problem = ProblemFile(
        sections=sections,
        space=space,
        ranking=order,
        source=source,
        system=system,
        lagrangian=lagrangian,
        lagrangian_leads=leads,
        constraints=constraints,
        lambdas=lambdas,
        multipliers=interp.multipliers(space, len(system) if system is not None else 1),
        claws=interp.claws(space),
        symmetries=interp.symmetries(space),
        syzygies=syzygies,
        hodograph=interp.hodograph(space),
        checks=interp.checks(space),
        names=interp.names,
    )
    logger.debug(
        "parsed %s: %d equations, %d laws, %d checks",
        source,
        len(system) if system is not None else 0,
        len(problem.claws),
        len(problem.checks),
    )
    return problem


_JET_TOKEN = re.compile(r"(?<![A-Za-z0-9_'])([A-Za-z][A-Za-z0-9]*)(?:_([a-z]+))?(?![A-Za-z0-9_'])(\s*\()?")


def problem_from_expression(text: str, independents: Sequence[str]) -> ProblemFile:
    """A problem declaring what an expression needs: dependents from its jet names,
    opaque functions from unknown calls."""
    dependents: List[str] = []
    functions: List[str] = []
    for match in _JET_TOKEN.finditer(text):
        base, suffix, call = match.group(1), match.group(2), match.group(3)
        if base == "D" and suffix:
            continue
        if call:
            if base not in ELEMENTARY and base not in functions:
                functions.append(base)
            continue
        if base in independents or base == "pi":
            continue
        if suffix and any(letter not in independents for letter in suffix):
            raise UndeclaredSymbol(match.group(0).strip(), 0, match.start() + 1)
        if base not in dependents:
            dependents.append(base)
    for match in re.finditer(r"([A-Za-z][A-Za-z0-9]*)'+\s*\(", text):
        if match.group(1) not in functions:
            functions.append(match.group(1))
    lines = ["[vars]", f"independent = {', '.join(independents)}"]
    if dependents:
        lines.append(f"dependent = {', '.join(dependents)}")
    if functions:
        lines += ["", "[functions]", ", ".join(functions)]
    return parse_problem("\n".join(lines) + "\n", "<expression>")


def load_problem(path, max_depth: int = 64, ranking: str = "grlex") -> ProblemFile:
    """Read and parse a ``.clw`` file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path.name} is not UTF-8 text: {exc.reason}")
    return parse_problem(text, str(path), max_depth=max_depth, ranking=ranking)
