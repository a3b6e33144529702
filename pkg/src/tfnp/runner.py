"""
Command dispatch.

Solvers register themselves per ``(kind, command)`` with the ``solver``
decorator. ``run`` looks the pair up, calls the solver and wraps its
``Outcome`` into a ``ResultDocument``. The ``certify`` commands take a
previously emitted result and re-check its certificate with the owning
module's checker.
"""

from __future__ import annotations

import logging
import time
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from importlib.metadata import PackageNotFoundError, version
from typing import Any

from pydantic import BaseModel, ConfigDict, NonNegativeInt, PositiveInt

from .circuits import DomainSpec, NashVariant, circuit_eval, export_nash_circuit, format_circuit, is_linear_circuit, validate_self_map
from .config import Limits
from .core import Vector, linf_distance, parse_rational
from .decide import posslp_decide, sqrt_sum_compare
from .errors import CertificationFailed, OracleViolation, SchemaError, UnsupportedCommand
from .instances import Document, Rational
from .lemke_howson import lemke_howson
from .lfp import bp_to_system, extinction_report, lfp_solve, scfg_to_system
from .local_search import (
    configuration_profile,
    congestion_converge,
    congestion_cost,
    congestion_pure_equilibria,
    hopfield_converge,
    hopfield_potential,
    hopfield_to_game,
    node_stability,
    pure_nash_check,
    rosenthal_potential,
    stable_configurations,
)
from .market import market_equilibrium_weak, price_map
from .mean_payoff import (
    brute_force_positional,
    certify_mpg,
    certify_parity,
    mpg_decision,
    mpg_solve,
    parity_solve,
    parity_winner,
)
from .normal_form import (
    MixedProfile,
    epsilon_nash_check,
    nash_map,
    pure_equilibria,
    support_enumeration_nash,
)
from .results import ResultDocument, jsonable
from .shapley import shapley_operator, shapley_solve
from .simplicial import SpernerCell, brute_force_sperner, scarf_weak_fixpoint, sperner_orientation, sperner_solve
from .ssg import certify_ssg, ssg_decision, ssg_solve

logger = logging.getLogger(__name__)

try:
    VERSION = version("tfnp")
except PackageNotFoundError:  # pragma: no cover
    VERSION = "0.0.0"


class RunOptions(BaseModel):
    """Flags shared by every command.

    Args:
        epsilon: approximation target for weak solvers: default 1/100
        seed: seed for randomized rules and sampling: default 0
        method: solver variant, meaning depends on the kind: default per kind
        cap: overrides the kind's main cap (steps, iterations, brute force...): default None
        node: node for decision queries: default None
        threshold: threshold for decision queries: default None
        beta: discount override for the SSG discounted mode: default None
        dropped_label: dropped label for Lemke-Howson: default 0
        pitch: starting grid pitch for path following: default epsilon / 4
        retries: pitch refinements for path following: default from ``Limits``
        iter_cap: iteration cap for least fixed points, ahead of ``cap``: default None
        samples: sample count for self-map validation: default 1000
        oracle_check: cross-check the result with the brute-force oracle: default False
        variant: Nash circuit variant: default 'projection'
        timing: record wall clock (breaks byte-identical output): default False
        claimed: result document to re-check with ``certify``: default None
    """

    model_config = ConfigDict(extra="forbid")

    epsilon: Rational = Fraction(1, 100)
    seed: int = 0
    method: str | None = None
    cap: PositiveInt | None = None
    node: NonNegativeInt | None = None
    threshold: Rational | None = None
    beta: Rational | None = None
    dropped_label: NonNegativeInt = 0
    pitch: Rational | None = None
    retries: NonNegativeInt | None = None
    iter_cap: PositiveInt | None = None
    samples: PositiveInt = 1000
    oracle_check: bool = False
    variant: NashVariant = "projection"
    timing: bool = False
    claimed: ResultDocument | None = None


@dataclass(frozen=True, slots=True)
class Outcome:
    solution: dict[str, Any]
    certificate: dict[str, Any] = field(default_factory=dict)
    exact: bool = True
    counts: dict[str, int] = field(default_factory=dict)


SolverFunc = Callable[[Any, RunOptions, Limits], Outcome]


class SolverRegistry:
    """Maps ``(kind, command)`` pairs to solver functions."""

    def __init__(self) -> None:
        self._solvers: dict[tuple[str, str], SolverFunc] = {}

    def add(self, kind: str, command: str, func: SolverFunc) -> None:
        if (kind, command) in self._solvers:
            raise ValueError(f"{kind}.{command} is already registered")
        self._solvers[(kind, command)] = func

    def get(self, kind: str, command: str) -> SolverFunc:
        try:
            return self._solvers[(kind, command)]
        except KeyError:
            supported = ", ".join(self.commands(kind)) or "none"
            raise UnsupportedCommand(f"{command!r} is not available for {kind!r} (supported: {supported})") from None

    def commands(self, kind: str) -> list[str]:
        return sorted(c for k, c in self._solvers if k == kind)


registry = SolverRegistry()


def solver(command: str, *kinds: str) -> Callable[[SolverFunc], SolverFunc]:
    """Register the decorated function as ``command`` for every kind in ``kinds``."""

    def decorator(func: SolverFunc) -> SolverFunc:
        for kind in kinds:
            registry.add(kind, command, func)
        return func

    return decorator


def run(doc: Document, command: str, options: RunOptions | None = None, limits: Limits | None = None) -> ResultDocument:
    options = options or RunOptions()
    limits = limits or Limits.from_env()
    kind: str = doc.kind  # type: ignore[attr-defined]
    func = registry.get(kind, command)
    logger.info(f"run: {kind}.{command} seed={options.seed} epsilon={options.epsilon}")
    start = time.perf_counter()
    outcome = func(doc, options, limits)
    elapsed = time.perf_counter() - start
    return ResultDocument(
        solver=f"{kind}.{command}",
        version=VERSION,
        kind=kind,
        command=command,
        exact=outcome.exact,
        epsilon=None if outcome.exact else options.epsilon,
        seed=options.seed,
        solution=jsonable(outcome.solution),
        certificate=jsonable(outcome.certificate),
        counts=outcome.counts,
        wall_clock=elapsed if options.timing else None,
    )


# Helpers


def _retries(options: RunOptions, limits: Limits) -> int:
    return limits.retries if options.retries is None else options.retries


def _iter_cap(options: RunOptions, limits: Limits) -> int:
    return options.iter_cap or options.cap or limits.iter_cap


def _claimed(options: RunOptions) -> ResultDocument:
    if options.claimed is None:
        raise SchemaError("certify needs a result document", fields={"result": "missing"})
    return options.claimed


def _certificate(options: RunOptions, *names: str) -> list[Any]:
    cert = _claimed(options).certificate
    missing = [n for n in names if n not in cert]
    if missing:
        raise SchemaError(f"certificate lacks {', '.join(missing)}", fields={n: "missing" for n in missing})
    return [cert[n] for n in names]


def _vector(values: Any) -> Vector:
    return tuple(parse_rational(v) for v in values)


def _strategy(data: Mapping[str, Any]) -> dict[int, int]:
    return {int(k): int(v) for k, v in data.items()}


def _certified(ok: bool, what: str) -> Outcome:
    if not ok:
        raise CertificationFailed(f"{what} certificate does not hold")
    logger.info(f"certify: {what} certificate holds")
    return Outcome({"certified": True})


def _decision_inputs(options: RunOptions) -> tuple[int, Fraction]:
    if options.node is None or options.threshold is None:
        raise SchemaError("decide needs --node and --threshold", fields={"node": "required", "threshold": "required"})
    return options.node, options.threshold


# Local search


@solver("solve", "hopfield")
def _hopfield_solve(doc: Any, options: RunOptions, limits: Limits) -> Outcome:
    net = doc.build()
    s0 = doc.initial or [1] * net.nodes
    result = hopfield_converge(net, s0, options.method or "first-unstable", options.cap or limits.step_cap, options.seed)
    s = result.configuration
    return Outcome(
        {"configuration": s, "potential": hopfield_potential(net, s), "trace": result.trace},
        {"configuration": s, "fields": [node_stability(net, s, v).field for v in range(net.nodes)]},
        counts={"switches": len(result.trace)},
    )


@solver("certify", "hopfield")
def _hopfield_certify(doc: Any, options: RunOptions, limits: Limits) -> Outcome:
    net = doc.build()
    (s,) = _certificate(options, "configuration")
    return _certified(all(node_stability(net, s, v).stable for v in range(net.nodes)), "hopfield")


@solver("oracle", "hopfield")
def _hopfield_oracle(doc: Any, options: RunOptions, limits: Limits) -> Outcome:
    net = doc.build()
    stable = stable_configurations(net)
    solution: dict[str, Any] = {"stable": stable}
    if net.nodes <= (options.cap or limits.hopfield_game_cap):
        game = hopfield_to_game(net, options.cap or limits.hopfield_game_cap)
        agrees = sorted(configuration_profile(s) for s in stable) == sorted(pure_equilibria(game))
        if not agrees:
            raise OracleViolation("stable configurations differ from the pure equilibria of the node game")
        solution["game_agrees"] = agrees
    return Outcome(solution, counts={"stable": len(stable)})


@solver("solve", "congestion")
def _congestion_solve(doc: Any, options: RunOptions, limits: Limits) -> Outcome:
    g = doc.build()
    s0 = doc.initial or [0] * g.players
    result = congestion_converge(g, s0, options.method or "first-improving", options.cap or limits.step_cap, options.seed)
    s = result.profile
    return Outcome(
        {
            "profile": s,
            "costs": [congestion_cost(g, s, i) for i in range(g.players)],
            "potential": rosenthal_potential(g, s),
            "trace": result.trace,
        },
        {"profile": s},
        counts={"moves": len(result.trace)},
    )


@solver("certify", "congestion")
def _congestion_certify(doc: Any, options: RunOptions, limits: Limits) -> Outcome:
    (s,) = _certificate(options, "profile")
    return _certified(pure_nash_check(doc.build(), s).holds, "congestion")


@solver("oracle", "congestion")
def _congestion_oracle(doc: Any, options: RunOptions, limits: Limits) -> Outcome:
    found = congestion_pure_equilibria(doc.build())
    return Outcome({"equilibria": found}, counts={"equilibria": len(found)})


# Normal-form games


@solver("solve", "nfg", "bimatrix")
def _nash_solve(doc: Any, options: RunOptions, limits: Limits) -> Outcome:
    """Lemke-Howson for two players, a weak fixed point of the Nash map otherwise."""
    g = doc.build()
    if g.is_bimatrix and options.method != "scarf":
        lh = lemke_howson(g, options.dropped_label, pivot_limit=options.cap)
        if options.oracle_check and lh.profile not in support_enumeration_nash(g, limits.size_cap):
            raise OracleViolation("Lemke-Howson equilibrium is not among the support-enumeration equilibria")
        return Outcome(
            {"profile": lh.profile.blocks, "dropped_label": lh.dropped_label},
            {"profile": lh.profile.blocks},
            counts={"pivots": lh.pivots},
        )
    domain = DomainSpec.product(*g.strategy_counts)
    circuit = export_nash_circuit(g, options.variant)
    scarf = scarf_weak_fixpoint(
        circuit,
        options.epsilon,
        pitch=options.pitch,
        domain=domain,
        retries=_retries(options, limits),
        step_cap=options.cap or limits.step_cap,
    )
    x = MixedProfile.from_flat(scarf.point, g.strategy_counts)
    check = epsilon_nash_check(g, x)
    return Outcome(
        {"profile": x.blocks, "residual": scarf.residual, "worst_gain": check.worst_gain},
        {"profile": x.blocks, "variant": options.variant},
        exact=False,
        counts={"cells": scarf.cells, "refinements": scarf.refinements},
    )


@solver("certify", "nfg", "bimatrix")
def _nash_certify(doc: Any, options: RunOptions, limits: Limits) -> Outcome:
    g = doc.build()
    claimed = _claimed(options)
    (blocks,) = _certificate(options, "profile")
    x = MixedProfile.of(*blocks)
    if claimed.exact:
        return _certified(epsilon_nash_check(g, x, 0).holds, "Nash equilibrium")
    residual = linf_distance(nash_map(g, x).flat, x.flat)
    return _certified(residual <= (claimed.epsilon or options.epsilon), "Nash map fixed point")


@solver("oracle", "nfg", "bimatrix")
def _nash_oracle(doc: Any, options: RunOptions, limits: Limits) -> Outcome:
    g = doc.build()
    if g.is_bimatrix:
        found = [x.blocks for x in support_enumeration_nash(g, options.cap or limits.size_cap)]
        return Outcome({"equilibria": found}, counts={"equilibria": len(found)})
    pure = pure_equilibria(g)
    return Outcome({"pure_equilibria": pure}, counts={"equilibria": len(pure)})


@solver("export-circuit", "nfg", "bimatrix")
def _nash_export(doc: Any, options: RunOptions, limits: Limits) -> Outcome:
    g = doc.build()
    circuit = export_nash_circuit(g, options.variant)
    domain = DomainSpec.product(*g.strategy_counts)
    return Outcome(
        {"circuit": format_circuit(circuit, domain), "variant": options.variant, "linear": is_linear_circuit(circuit)},
        counts={"gates": len(circuit.gates)},
    )


# Sperner and fixed points


@solver("solve", "sperner")
def _sperner_solve(doc: Any, options: RunOptions, limits: Limits) -> Outcome:
    cell = sperner_solve(doc.build(), options.cap or limits.step_cap)
    return Outcome({"vertices": cell.vertices, "colors": cell.colors}, {"vertices": cell.vertices})


@solver("certify", "sperner")
def _sperner_certify(doc: Any, options: RunOptions, limits: Limits) -> Outcome:
    inst = doc.build()
    (vertices,) = _certificate(options, "vertices")
    points = [tuple(int(c) for c in v) for v in vertices]
    on_grid = len(points) == 3 and all(len(v) == 3 and sum(v) == inst.n and min(v) >= 0 for v in points)
    return _certified(on_grid and SpernerCell.of(inst, points).panchromatic, "Sperner")


@solver("oracle", "sperner")
def _sperner_oracle(doc: Any, options: RunOptions, limits: Limits) -> Outcome:
    cells = brute_force_sperner(doc.build(), options.cap or limits.sperner_cap)
    return Outcome(
        {"cells": [c.vertices for c in cells], "orientation_sum": sum(sperner_orientation(c) for c in cells)},
        counts={"panchromatic": len(cells)},
    )


@solver("solve", "market")
def _market_solve(doc: Any, options: RunOptions, limits: Limits) -> Outcome:
    result = market_equilibrium_weak(
        doc.build(), options.epsilon, pitch=options.pitch, retries=_retries(options, limits), seed=options.seed
    )
    return Outcome(
        {"prices": result.prices, "residual": result.residual, "excess": result.excess},
        {"prices": result.prices, "eta": result.eta},
        exact=False,
        counts={"cells": result.scarf.cells, "refinements": result.scarf.refinements},
    )


@solver("certify", "market")
def _market_certify(doc: Any, options: RunOptions, limits: Limits) -> Outcome:
    prices, eta = _certificate(options, "prices", "eta")
    p = _vector(prices)
    residual = linf_distance(circuit_eval(price_map(doc.build(), parse_rational(eta)), p), p)
    return _certified(residual <= (_claimed(options).epsilon or options.epsilon), "market")


@solver("solve", "circuit")
def _circuit_solve(doc: Any, options: RunOptions, limits: Limits) -> Outcome:
    circuit, domain = doc.build()
    result = scarf_weak_fixpoint(
        circuit,
        options.epsilon,
        pitch=options.pitch,
        domain=domain,
        retries=_retries(options, limits),
        step_cap=options.cap or limits.step_cap,
    )
    return Outcome(
        {"point": result.point, "residual": result.residual, "pitch": result.pitch},
        {"point": result.point},
        exact=False,
        counts={"cells": result.cells, "refinements": result.refinements},
    )


@solver("certify", "circuit")
def _circuit_certify(doc: Any, options: RunOptions, limits: Limits) -> Outcome:
    circuit, domain = doc.build()
    (point,) = _certificate(options, "point")
    x = _vector(point)
    ok = domain.contains(x) is None and linf_distance(circuit_eval(circuit, x), x) <= (
        _claimed(options).epsilon or options.epsilon
    )
    return _certified(ok, "fixed point")


@solver("oracle", "circuit")
def _circuit_oracle(doc: Any, options: RunOptions, limits: Limits) -> Outcome:
    circuit, domain = doc.build()
    report = validate_self_map(circuit, domain, options.samples, options.seed)
    return Outcome(
        {"passed": report.passed, "violations": report.violations},
        counts={"checked": report.checked, "violations": len(report.violations)},
    )


@solver("decide", "circuit")
def _circuit_linear(doc: Any, options: RunOptions, limits: Limits) -> Outcome:
    circuit, _ = doc.build()
    return Outcome({"linear": is_linear_circuit(circuit)})


@solver("export-circuit", "circuit")
def _circuit_export(doc: Any, options: RunOptions, limits: Limits) -> Outcome:
    circuit, domain = doc.build()
    return Outcome({"circuit": format_circuit(circuit, domain), "linear": is_linear_circuit(circuit)})


# Stochastic games


@solver("solve", "shapley")
def _shapley_solve(doc: Any, options: RunOptions, limits: Limits) -> Outcome:
    result = shapley_solve(doc.build(), options.epsilon, _iter_cap(options, limits))
    return Outcome(
        {"values": result.values, "residual": result.residual, "strategies": result.strategies},
        {"values": result.values},
        exact=False,
        counts={"iterations": result.iterations},
    )


@solver("certify", "shapley")
def _shapley_certify(doc: Any, options: RunOptions, limits: Limits) -> Outcome:
    g = doc.build()
    (values,) = _certificate(options, "values")
    x = _vector(values)
    # |F(x) - x| <= eps * q / 2 puts x within eps of the values
    eps = _claimed(options).epsilon or options.epsilon
    return _certified(linf_distance(shapley_operator(g, x), x) <= eps * g.q / 2, "Shapley")


def _positional_solution(values: Vector, s1: Mapping[int, int], s2: Mapping[int, int]) -> dict[str, Any]:
    return {"values": values, "max_strategy": dict(sorted(s1.items())), "min_strategy": dict(sorted(s2.items()))}


@solver("solve", "ssg")
def _ssg_solve(doc: Any, options: RunOptions, limits: Limits) -> Outcome:
    result = ssg_solve(doc.build(), options.method or "strategy-improvement", options.beta, options.cap or limits.step_cap)
    payload = _positional_solution(result.values, result.max_strategy, result.min_strategy)
    if result.beta is not None:
        payload["beta"] = result.beta
    return Outcome(payload, _positional_solution(result.values, result.max_strategy, result.min_strategy), counts={"iterations": result.iterations})


@solver("decide", "ssg")
def _ssg_decide(doc: Any, options: RunOptions, limits: Limits) -> Outcome:
    g = doc.build()
    node, threshold = _decision_inputs(options)
    result = ssg_solve(g, options.method or "strategy-improvement", options.beta, options.cap or limits.step_cap)
    return Outcome(
        {"node": node, "threshold": threshold, "decision": ssg_decision(g, node, threshold, result), "values": result.values},
        _positional_solution(result.values, result.max_strategy, result.min_strategy),
    )


@solver("certify", "ssg")
def _ssg_certify(doc: Any, options: RunOptions, limits: Limits) -> Outcome:
    values, s1, s2 = _certificate(options, "values", "max_strategy", "min_strategy")
    return _certified(certify_ssg(doc.build(), _vector(values), _strategy(s1), _strategy(s2)), "SSG")


@solver("oracle", "ssg", "mpg", "parity")
def _positional_oracle(doc: Any, options: RunOptions, limits: Limits) -> Outcome:
    found = brute_force_positional(doc.build(), options.cap or limits.brute_force_cap)
    key = "winners" if doc.kind == "parity" else "values"
    return Outcome({key: found})


@solver("solve", "mpg")
def _mpg_solve(doc: Any, options: RunOptions, limits: Limits) -> Outcome:
    result = mpg_solve(doc.build(), options.method or "value-iteration", options.cap or limits.step_cap)
    return Outcome(
        _positional_solution(result.values, result.max_strategy, result.min_strategy),
        _positional_solution(result.values, result.max_strategy, result.min_strategy),
        counts={"horizon": result.horizon},
    )


@solver("decide", "mpg")
def _mpg_decide(doc: Any, options: RunOptions, limits: Limits) -> Outcome:
    g = doc.build()
    node, threshold = _decision_inputs(options)
    result = mpg_solve(g, options.method or "value-iteration", options.cap or limits.step_cap)
    return Outcome(
        {"node": node, "threshold": threshold, "decision": mpg_decision(g, node, threshold, result), "values": result.values},
        _positional_solution(result.values, result.max_strategy, result.min_strategy),
    )


@solver("certify", "mpg")
def _mpg_certify(doc: Any, options: RunOptions, limits: Limits) -> Outcome:
    values, s1, s2 = _certificate(options, "values", "max_strategy", "min_strategy")
    return _certified(certify_mpg(doc.build(), _vector(values), _strategy(s1), _strategy(s2)), "mean-payoff")


@solver("solve", "parity")
def _parity_solve(doc: Any, options: RunOptions, limits: Limits) -> Outcome:
    result = parity_solve(doc.build(), options.cap or limits.label_cap)
    payload = {
        "winners": result.winners,
        "max_strategy": dict(sorted(result.max_strategy.items())),
        "min_strategy": dict(sorted(result.min_strategy.items())),
    }
    return Outcome(payload, dict(payload))


@solver("decide", "parity")
def _parity_decide(doc: Any, options: RunOptions, limits: Limits) -> Outcome:
    if options.node is None:
        raise SchemaError("decide needs --node", fields={"node": "required"})
    result = parity_winner(doc.build(), options.node, options.cap or limits.label_cap)
    return Outcome({"node": options.node, "winner": result.winner, "strategy": dict(sorted(result.strategy.items()))})


@solver("certify", "parity")
def _parity_certify(doc: Any, options: RunOptions, limits: Limits) -> Outcome:
    winners, s1, s2 = _certificate(options, "winners", "max_strategy", "min_strategy")
    ok = certify_parity(doc.build(), [int(w) for w in winners], _strategy(s1), _strategy(s2), limits.label_cap)
    return _certified(ok, "parity")


# Least fixed points


def _lfp(system: Any, options: RunOptions, limits: Limits) -> tuple[dict[str, Any], dict[str, int]]:
    method = options.method or "newton"
    primary, check = lfp_solve(system, options.epsilon, method, _iter_cap(options, limits), limits.exact_bits)  # type: ignore[arg-type]
    payload: dict[str, Any] = {"lower": primary.x, "residual": primary.residual, "upper": primary.upper}
    counts = {"iterations": primary.iterations, "newton_steps": primary.newton_steps, "kleene_steps": primary.kleene_steps}
    if check is not None:
        payload["kleene"] = check.x
        payload["agree"] = linf_distance(primary.x, check.x) <= 2 * options.epsilon
    return payload, counts


@solver("solve", "bp")
def _bp_solve(doc: Any, options: RunOptions, limits: Limits) -> Outcome:
    b = doc.build()
    if options.method == "both":
        report = extinction_report(b, options.epsilon, _iter_cap(options, limits), limits.exact_bits)
        upper = report.newton.upper
        return Outcome(
            {
                "lower": report.probabilities,
                "upper": upper,
                "agree": report.agree,
                "certain": report.certain,
                "residual": report.newton.residual,
            },
            {"lower": report.probabilities, "upper": upper},
            exact=False,
            counts={"newton_iterations": report.newton.iterations, "kleene_iterations": report.kleene.iterations},
        )
    payload, counts = _lfp(bp_to_system(b), options, limits)
    return Outcome(payload, {"lower": payload["lower"], "upper": payload["upper"]}, exact=False, counts=counts)


@solver("solve", "scfg")
def _scfg_solve(doc: Any, options: RunOptions, limits: Limits) -> Outcome:
    g = doc.build()
    payload, counts = _lfp(scfg_to_system(g), options, limits)
    payload["probability"] = payload["lower"][g.start_index]
    return Outcome(payload, {"lower": payload["lower"], "upper": payload["upper"]}, exact=False, counts=counts)


@solver("certify", "bp", "scfg")
def _lfp_certify(doc: Any, options: RunOptions, limits: Limits) -> Outcome:
    """The residual at the lower bound is small and the upper bound, if any, satisfies ``F(u) <= u``."""
    built = doc.build()
    system = bp_to_system(built) if doc.kind == "bp" else scfg_to_system(built)
    lower, upper = _certificate(options, "lower", "upper")
    x = _vector(lower)
    ok = linf_distance(system.evaluate(x), x) <= (_claimed(options).epsilon or options.epsilon)
    if upper is not None:
        u = _vector(upper)
        ok = ok and all(a <= b for a, b in zip(x, u)) and all(f <= b for f, b in zip(system.evaluate(u), u))
    return _certified(ok, "least fixed point")


# Exact decisions


@solver("decide", "sqrtsum")
def _sqrt_sum(doc: Any, options: RunOptions, limits: Limits) -> Outcome:
    d, k = doc.build()
    result = sqrt_sum_compare(d, k, options.cap or limits.precision_cap)
    return Outcome(
        {"outcome": result.outcome, "lower": result.lower, "upper": result.upper},
        counts={"precision": result.precision},
    )


@solver("decide", "posslp")
def _posslp(doc: Any, options: RunOptions, limits: Limits) -> Outcome:
    return Outcome({"sign": posslp_decide(doc.build(), options.cap or limits.bit_cap)})
