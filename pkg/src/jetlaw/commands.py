"""
Command dispatch shared by the CLI and the corpus runner.

``run`` looks up a handler by command name, feeds it the parsed problem and the
resolved engine settings, and wraps the verdict in a VerdictReport. Handlers
raise domain errors; callers decide how to surface them.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import sympy
from sympy import Expr

from jetlaw.claws import (
    ConservationLaw,
    Multiplier,
    bridge_verify,
    characteristic_form,
    check_candidate,
    construct_c_lambda,
    determining_equations,
    equivalent,
    first_integral,
    is_trivial,
    solve_lambda,
    verify_cl,
    verify_multiplier,
    verify_syzygy,
)
from jetlaw.claws.conservation import constraint_system
from jetlaw.core.config_helpers import EngineSettings
from jetlaw.core.errors import ShapeMismatch
from jetlaw.core.logging_manager import log_event
from jetlaw.expr import JetVar, MultiIndex, Verdict, canonicalize, is_zero, print_expr
from jetlaw.hodograph import transform_cl, transform_system
from jetlaw.jet import PdeSystem, reduce_modulo
from jetlaw.problem import ProblemFile, print_problem
from jetlaw.reports import VerdictReport, Witness
from jetlaw.symmetry import (
    Characteristic,
    check_noether1,
    check_symmetry,
    check_variational,
)
from jetlaw.variational import euler

logger = logging.getLogger(__name__)

RESULT_OF = {
    Verdict.PROVED_ZERO: "verified",
    Verdict.PROVED_NONZERO: "refuted",
    Verdict.PROBABLY_ZERO: "numeric-only",
    Verdict.UNKNOWN: "error",
}


@dataclass
class CommandOptions:
    """Per-invocation arguments: item names, the variable and the expression."""

    names: List[str] = field(default_factory=list)
    var: Optional[str] = None
    expr_text: Optional[str] = None
    expr: Optional[Expr] = None
    candidate: Optional[str] = None


@dataclass
class Outcome:
    verdict: Verdict
    witnesses: List[Tuple[str, str]] = field(default_factory=list)
    messages: List[str] = field(default_factory=list)

    def witness(self, label: str, e) -> None:
        self.witnesses.append((label, e if isinstance(e, str) else print_expr(e)))


class _Invocation:
    def __init__(self, problem: ProblemFile, options: CommandOptions, settings: EngineSettings):
        self.problem = problem
        self.options = options
        self.settings = settings

    @property
    def space(self):
        return self.problem.space

    @property
    def system(self) -> PdeSystem:
        if self.problem.system is None:
            raise ShapeMismatch("this command needs a [system] or [lagrangian] section")
        return self.problem.system

    def expression(self) -> Expr:
        if self.options.expr is not None:
            return self.options.expr
        if self.options.expr_text is None:
            raise ShapeMismatch("this command needs an expression (--expr)")
        return self.problem.parse(self.options.expr_text)

    def variable(self) -> str:
        var = self.options.var or (self.options.names[0] if self.options.names else None)
        if var is None:
            raise ShapeMismatch("this command needs a variable (--var)")
        return var

    def _pick(self, table: Dict[str, object], kind: str, name: Optional[str] = None):
        if name is not None:
            if name not in table:
                raise ShapeMismatch(f"no {kind} named '{name}'")
            return table[name]
        if len(table) != 1:
            raise ShapeMismatch(
                f"name one of the {kind} items: {', '.join(table) or 'none declared'}"
            )
        return next(iter(table.values()))

    def claw(self, name: Optional[str] = None) -> ConservationLaw:
        return self._pick(self.problem.claws, "claw", name)  # type: ignore[return-value]

    def multiplier(self, name: Optional[str] = None) -> Multiplier:
        return self._pick(self.problem.multipliers, "multiplier", name)  # type: ignore[return-value]

    def symmetry(self, name: Optional[str] = None) -> Characteristic:
        return self._pick(self.problem.symmetries, "symmetry", name)  # type: ignore[return-value]

    def named(self, default_all: Dict[str, object]) -> List[str]:
        return list(self.options.names) or list(default_all)

    def source(self) -> Tuple[Optional[ConservationLaw], Optional[Multiplier]]:
        """The claw or multiplier named first (either table), else the only one declared."""
        name = self.options.names[0] if self.options.names else None
        if name is not None:
            if name in self.problem.claws:
                return self.problem.claws[name], None
            if name in self.problem.multipliers:
                return None, self.problem.multipliers[name]
            raise ShapeMismatch(f"no claw or multiplier named '{name}'")
        if self.problem.claws:
            return self.claw(), None
        return None, self.multiplier()

    def lambdas(self) -> List[Expr]:
        return list(self.problem.lambdas.values())

    def lagrangian(self) -> Expr:
        if self.problem.lagrangian is None:
            raise ShapeMismatch("this command needs a [lagrangian] section")
        return self.problem.lagrangian


# -- handlers ------------------------------------------------------------------


def _normalize(inv: _Invocation) -> Outcome:
    if inv.options.expr is not None or inv.options.expr_text is not None:
        out = Outcome(Verdict.PROVED_ZERO)
        out.witness("canonical", canonicalize(inv.expression()))
        return out
    out = Outcome(Verdict.PROVED_ZERO)
    out.witness("digest", inv.problem.digest)
    if inv.problem.system is not None:
        for line in inv.problem.system.describe():
            out.witness("equation", line)
        report = inv.problem.system.validate_orthonomic()
        out.messages.extend(report.lines())
        if not report.valid:
            out.verdict = Verdict.PROVED_NONZERO
    out.messages.append(print_problem(inv.problem).rstrip("\n"))
    return out


def _dx(inv: _Invocation) -> Outcome:
    var = inv.variable()
    if var not in inv.space.independents:
        raise ShapeMismatch(f"'{var}' is not an independent variable")
    out = Outcome(Verdict.PROVED_ZERO)
    out.witness(
        "result",
        canonicalize(inv.space.total_derivative(inv.expression(), inv.space.independents.index(var))),
    )
    return out


def _euler(inv: _Invocation) -> Outcome:
    var = inv.variable()
    space = inv.space
    if var not in space.dependents + space.arbitrary:
        raise ShapeMismatch(f"'{var}' is not a dependent variable or arbitrary function")
    result = euler(space, inv.expression(), var)
    out = Outcome(Verdict.PROVED_ZERO)
    out.witness("result", result)
    system = inv.problem.system
    if system is not None and var in space.dependents:
        component = system.components[space.dependents.index(var)]
        out.verdict = is_zero(result - component, inv.settings, space.functions)
        out.witness("difference", canonicalize(result - component))
    return out


def _reduce(inv: _Invocation) -> Outcome:
    e = inv.expression()
    normal = inv.system.normal_form(e)
    out = Outcome(is_zero(normal, inv.settings, inv.space.functions))
    out.witness("normal_form", normal)
    return out


def _verify_cl(inv: _Invocation) -> Outcome:
    verdicts = []
    out = Outcome(Verdict.PROVED_ZERO)
    gsys = constraint_system(inv.system, inv.problem.constraints)
    for name in inv.named(inv.problem.claws):
        cl = inv.claw(name)
        verdict = verify_cl(inv.system, cl, inv.problem.constraints, inv.settings)
        reduced = reduce_modulo(cl.divergence(inv.space), [gsys, inv.system])
        out.witness(f"{name}.divergence", reduced)
        out.messages.append(f"{name}: {verdict.value}")
        verdicts.append(verdict)
    if not verdicts:
        raise ShapeMismatch("no [claw] section to verify")
    out.verdict = Verdict.conjunction(verdicts)
    return out


def _char_form(inv: _Invocation) -> Outcome:
    name = inv.options.names[0] if inv.options.names else None
    form = characteristic_form(inv.system, inv.claw(name), inv.problem.constraints, inv.settings)
    out = Outcome(form.verdict)
    for label, value in form.multiplier.describe().items():
        out.witness(label, value)
    for mu, value in enumerate(form.restricted):
        out.witness(f"Q{mu + 1}|0", value)
    return out


def _verify_multiplier(inv: _Invocation) -> Outcome:
    verdicts = []
    out = Outcome(Verdict.PROVED_ZERO)
    for name in inv.named(inv.problem.multipliers):
        verdict = verify_multiplier(
            inv.system, inv.multiplier(name), inv.problem.constraints, inv.settings
        )
        out.messages.append(f"{name}: {verdict.value}")
        verdicts.append(verdict)
    if not verdicts:
        raise ShapeMismatch("no [multiplier] section to verify")
    out.verdict = Verdict.conjunction(verdicts)
    return out


def _det_eqs(inv: _Invocation) -> Outcome:
    name = inv.options.names[0] if inv.options.names else None
    equations = determining_equations(inv.system, inv.multiplier(name))
    out = Outcome(Verdict.PROVED_ZERO)
    for k, e in enumerate(equations):
        out.witness(f"eq{k + 1}", e)
    candidate = inv.options.candidate
    if candidate is None and (inv.options.expr is not None or inv.options.expr_text):
        candidate_expr: Optional[Expr] = inv.expression()
    else:
        candidate_expr = inv.problem.parse(candidate) if candidate else None
    if candidate_expr is not None:
        space = inv.space
        if len(space.unknowns) != 1:
            raise ShapeMismatch("candidate checks need exactly one unknown function")
        fn_name, args = next(iter(space.unknowns.items()))
        arguments = [
            space.indep(a)
            if a in space.independents
            else space.symbol(JetVar(a, MultiIndex.zero(space.n)))
            for a in args
        ]
        out.verdict = check_candidate(
            equations,
            space.unknown_function(fn_name),
            arguments,
            candidate_expr,
            inv.settings,
            space.functions,
        )
        out.witness("candidate", candidate_expr)
    return out


def _bridge(inv: _Invocation) -> Outcome:
    if inv.problem.constraints is None:
        raise ShapeMismatch("bridge needs a [constraints] section")
    cl, q = inv.source()
    result = bridge_verify(
        inv.system, inv.problem.constraints, inv.lambdas(), cl, q, inv.settings
    )
    out = Outcome(result.verdict)
    for g, residual in result.residuals.items():
        out.witness(f"residual.{g}", residual)
    return out


def _solve_lambda(inv: _Invocation) -> Outcome:
    if inv.problem.constraints is None:
        raise ShapeMismatch("solve-lambda needs a [constraints] section")
    cl, q = inv.source()
    solution = solve_lambda(inv.system, inv.problem.constraints, cl, q, inv.settings)
    out = Outcome(solution.verdict)
    for label, value in solution.describe().items():
        out.witness(label, value)
    return out


def _clambda(inv: _Invocation) -> Outcome:
    constraints = inv.problem.constraints
    if constraints is None:
        raise ShapeMismatch("clambda needs a [constraints] section")
    lam: Sequence[Expr] = inv.lambdas()
    out = Outcome(Verdict.PROVED_ZERO)
    verdicts = []
    if not lam:
        cl, q = inv.source()
        solution = solve_lambda(inv.system, constraints, cl, q, inv.settings)
        lam = solution.components
        verdicts.append(solution.verdict)
        for label, value in solution.describe().items():
            out.witness(label, value)
    law = construct_c_lambda(inv.space, constraints, lam)
    for label, value in law.describe(inv.space).items():
        out.witness(label, value)
    verdicts.append(verify_cl(inv.system, law, constraints, inv.settings))
    if len(inv.options.names) > 1:
        compare = inv.claw(inv.options.names[1])
        verdicts.append(equivalent(inv.system, law, compare, constraints, inv.settings))
        out.messages.append(f"compared with {compare.name}")
    out.verdict = Verdict.conjunction(verdicts)
    return out


def _equiv(inv: _Invocation) -> Outcome:
    names = inv.options.names
    constraints = inv.problem.constraints
    if len(names) == 1:
        verdict = is_trivial(inv.system, inv.claw(names[0]), constraints, inv.settings)
        out = Outcome(verdict)
        out.messages.append(f"{names[0]} is {'trivial' if verdict.holds else 'not shown trivial'}")
        return out
    if len(names) != 2:
        raise ShapeMismatch("equiv takes one claw (triviality) or two (equivalence)")
    verdict = equivalent(
        inv.system, inv.claw(names[0]), inv.claw(names[1]), constraints, inv.settings
    )
    return Outcome(verdict)


def _syzygy(inv: _Invocation) -> Outcome:
    syzygies = inv.problem.syzygies
    if not syzygies:
        raise ShapeMismatch("no [syzygy] section")
    out = Outcome(Verdict.PROVED_ZERO)
    verdicts = []
    for k, syz in enumerate(syzygies):
        verdict = verify_syzygy(inv.system, syz.ops, syz.extra, syz.target, inv.settings)
        ops = " + ".join(
            f"({op.describe(inv.space)})A{mu + 1}" for mu, op in enumerate(syz.ops) if not op.is_zero()
        )
        out.witness(f"syzygy{k + 1}", ops or "0")
        out.messages.append(f"syzygy {k + 1}: {verdict.value}")
        verdicts.append(verdict)
    out.verdict = Verdict.conjunction(verdicts)
    return out


def _first_integral(inv: _Invocation) -> Outcome:
    name = inv.options.names[0] if inv.options.names else None
    result = first_integral(inv.system, inv.claw(name), inv.problem.constraints, inv.settings)
    out = Outcome(result.verdict)
    out.witness("lambda", result.lam)
    out.witness("direction", inv.space.independents[result.direction])
    if inv.options.expr is not None or inv.options.expr_text is not None:
        expected = inv.expression()
        agreement = inv.system.restricted_is_zero(result.lam - expected, inv.settings)
        out.verdict = Verdict.conjunction([result.verdict, agreement])
    return out


def _symmetry(inv: _Invocation) -> Outcome:
    verdicts = []
    out = Outcome(Verdict.PROVED_ZERO)
    for name in inv.named(inv.problem.symmetries):
        verdict = check_symmetry(
            inv.system, inv.symmetry(name), inv.problem.constraints, inv.settings
        )
        out.messages.append(f"{name}: {verdict.value}")
        verdicts.append(verdict)
    if not verdicts:
        raise ShapeMismatch("no [symmetry] section")
    out.verdict = Verdict.conjunction(verdicts)
    return out


def _variational(inv: _Invocation) -> Outcome:
    lagrangian = inv.lagrangian()
    verdicts = []
    out = Outcome(Verdict.PROVED_ZERO)
    for name in inv.named(inv.problem.symmetries):
        verdict = check_variational(inv.space, lagrangian, inv.symmetry(name), inv.settings)
        out.messages.append(f"{name}: {verdict.value}")
        verdicts.append(verdict)
    if not verdicts:
        raise ShapeMismatch("no [symmetry] section")
    out.verdict = Verdict.conjunction(verdicts)
    return out


def _noether(inv: _Invocation) -> Outcome:
    lagrangian = inv.lagrangian()
    verdicts = []
    out = Outcome(Verdict.PROVED_ZERO)
    for name in inv.named(inv.problem.symmetries):
        report = check_noether1(
            inv.space,
            lagrangian,
            inv.symmetry(name),
            inv.problem.lagrangian_leads,
            inv.problem.ranking,
            inv.settings,
        )
        out.messages.append(
            f"{name}: variational {report.variational.value}, multiplier {report.multiplier.value}"
        )
        verdicts.append(report.verdict)
    if not verdicts:
        raise ShapeMismatch("no [symmetry] section")
    out.verdict = Verdict.conjunction(verdicts)
    return out


def _hodograph(inv: _Invocation) -> Outcome:
    spec = inv.problem.hodograph
    if spec is None:
        raise ShapeMismatch("hodograph needs a [hodograph] section")
    hmap = spec.map
    name = inv.options.names[0] if inv.options.names else None
    cl = inv.claw(name)
    new_system = transform_system(hmap, inv.system)
    transformed = transform_cl(hmap, cl, inv.settings)
    out = Outcome(Verdict.PROVED_ZERO)
    for line in new_system.describe():
        out.witness("system", line)
    for label, value in transformed.law.describe(hmap.new).items():
        out.witness(label, value)
    out.messages.append(f"fluxes from {transformed.reconstruction}")
    out.messages.extend(f"assuming {c}" for c in transformed.side_conditions)

    verdicts = [verify_cl(new_system, transformed.law, settings=inv.settings)]
    if spec.target is not None:
        verdicts.append(
            equivalent(new_system, transformed.law, spec.target, settings=inv.settings)
        )
    for e in spec.expect:
        verdicts.append(
            is_zero(new_system.normal_form(e), inv.settings, hmap.new.functions)
        )
    law = spec.target if spec.target is not None else transformed.law
    if law.fluxes is not None and len(law.fluxes.nonzero()) == 1:
        integral = first_integral(new_system, law, settings=inv.settings)
        out.witness("first_integral", integral.lam)
        verdicts.append(integral.verdict)
    out.verdict = Verdict.conjunction(verdicts)
    return out


COMMANDS: Dict[str, Callable[[_Invocation], Outcome]] = {
    "normalize": _normalize,
    "dx": _dx,
    "euler": _euler,
    "reduce": _reduce,
    "verify-cl": _verify_cl,
    "char-form": _char_form,
    "verify-multiplier": _verify_multiplier,
    "det-eqs": _det_eqs,
    "bridge": _bridge,
    "solve-lambda": _solve_lambda,
    "clambda": _clambda,
    "equiv": _equiv,
    "syzygy": _syzygy,
    "first-integral": _first_integral,
    "symmetry": _symmetry,
    "variational": _variational,
    "noether": _noether,
    "hodograph": _hodograph,
}


def run(
    command: str,
    problem: ProblemFile,
    options: Optional[CommandOptions] = None,
    settings: Optional[EngineSettings] = None,
) -> VerdictReport:
    """Run one command against a parsed problem.

    Args:
        command: One of COMMANDS
        problem: Parsed problem file
        options: Item names, variable and expression for the command
        settings: Resolved engine settings (defaults when None)

    Returns:
        VerdictReport with the mapped result and witnesses

    Raises:
        ShapeMismatch: For unknown commands or missing inputs
        JetlawError: Domain errors raised by the operation
    """
    handler = COMMANDS.get(command)
    if handler is None:
        raise ShapeMismatch(f"unknown command '{command}'")
    options = options or CommandOptions()
    settings = settings or EngineSettings()
    started = time.monotonic()
    outcome = handler(_Invocation(problem, options, settings))
    duration_ms = int((time.monotonic() - started) * 1000)
    report = VerdictReport(
        command=command,
        input_name=problem.source,
        inputs_digest=problem.digest,
        result=RESULT_OF[outcome.verdict],  # type: ignore[arg-type]
        witnesses=[Witness(label=k, expr=v) for k, v in outcome.witnesses],
        seed=settings.seed,
        probes=settings.probes,
        tol=settings.tol,
        messages=outcome.messages,
        duration_ms=duration_ms,
    )
    log_event(
        logger,
        "command",
        command=command,
        source=problem.source,
        result=report.result,
        duration_ms=duration_ms,
    )
    return report


def render(report: VerdictReport) -> str:
    """Summary line plus the fenced ``jetlaw`` block of ``key: value`` lines."""
    summary = f"{report.command} {report.input_name}: {report.result}"
    lines = [
        f"command: {report.command}",
        f"input: {report.input_name}",
        f"digest: {report.inputs_digest}",
        f"result: {report.result}",
        f"seed: {report.seed}",
        f"probes: {report.probes}",
        f"tol: {report.tol}",
    ]
    lines += [f"{w.label}: {w.expr}" for w in report.witnesses]
    body = "\n".join(lines)
    messages = "".join(f"{m}\n" for m in report.messages)
    return f"{summary}\n{messages}```jetlaw\n{body}\n```"
