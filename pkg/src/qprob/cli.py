"""Command line interface.

Usage: qprob <command> (--preset NAME | --scenario FILE) [flags]

Commands: validate, gross, joint, conditional, collapse, luder, branches,
net, lifetime, check. Exit status 0 on success, 1 for input or usage
errors (bad flags, unknown preset, unreadable or unparseable file,
command/scenario mismatch), 2 for validation or numeric failures. Output
is deterministic: the same invocation produces identical bytes.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

from . import __version__
from .engine import (
    ProbabilityOperator,
    born,
    branch_decompose,
    collapse,
    conditional,
    correlation_check,
    joint_matrix,
    luder,
)
from .errors import (
    IncompatibleCommandError,
    QprobError,
    ScenarioParseError,
    UnknownPresetError,
)
from .hilbert import structure_check
from .observables import Observable, lift, validate_observable
from .render import FORMATS, RenderedTable, Report, TextLines, format_number, render_report
from .scenario import PRESET_NAMES, Scenario, ScenarioObservable, load_file, load_preset
from .weighting import Scheme, lifetime_distribution, net_table

__all__ = ["COMMANDS", "build_parser", "run_command", "main"]

COMMANDS = (
    "validate",
    "gross",
    "joint",
    "conditional",
    "collapse",
    "luder",
    "branches",
    "net",
    "lifetime",
    "check",
)


@dataclass(frozen=True)
class Options:
    tol: float = 1e-10
    log_base: object = None  # None: scenario setting, else 2
    precision: int = 6
    given: str | None = None
    target: str | None = None
    on: str | None = None
    obs: str | None = None
    rows: str | None = None
    cols: str | None = None


class _Parser(argparse.ArgumentParser):
    # Usage problems are input errors: exit 1, not argparse's default 2.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    source = common.add_mutually_exclusive_group(required=True)
    source.add_argument("--preset", choices=PRESET_NAMES, help="shipped scenario name")
    source.add_argument("--scenario", metavar="FILE", help="scenario file path")
    common.add_argument("--tol", type=_positive_float, default=1e-10, metavar="X",
                        help="tolerance for toleranced checks (default 1e-10)")
    common.add_argument("--log-base", choices=["2", "e"], default=None,
                        help="entropy log base (default: scenario setting, else 2)")
    common.add_argument("--precision", type=_positive_int, default=6, metavar="N",
                        help="significant digits in text output (default 6)")
    common.add_argument("--format", choices=list(FORMATS), default="text",
                        help="output format (default text)")

    parser = _Parser(prog="qprob", description="Finite-dimensional quantum probability engine.")
    parser.add_argument("--version", action="version", version=f"qprob {__version__}")
    parser.set_defaults(command=None)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    sub.add_parser("validate", parents=[common], help="report scenario validation residuals")
    sub.add_parser("gross", parents=[common], help="per-channel probabilities of every observable")

    p = sub.add_parser("joint", parents=[common], help="joint probability table over two factors")
    p.add_argument("--rows", metavar="OBS", help="row observable id (default: first on factor 1)")
    p.add_argument("--cols", metavar="OBS", help="column observable id (default: first on factor 2)")

    p = sub.add_parser("conditional", parents=[common], help="conditional probabilities after an outcome")
    p.add_argument("--given", metavar="OBS:CHANNEL", help="conditioning channel (default: every row)")
    p.add_argument("--target", metavar="OBS", help="target observable id (default: the other factor)")

    p = sub.add_parser("collapse", parents=[common], help="a-posteriori operator given one outcome")
    p.add_argument("--on", metavar="OBS:CHANNEL", required=True, help="conditioning channel")

    p = sub.add_parser("luder", parents=[common], help="decohere the state over an observable")
    p.add_argument("--obs", metavar="OBS", help="observable id (default: first declared)")

    p = sub.add_parser("branches", parents=[common], help="branch decomposition over an observable")
    p.add_argument("--obs", metavar="OBS", help="observable id (default: first declared)")

    sub.add_parser("net", parents=[common], help="observer-weighted net perception table")
    sub.add_parser("lifetime", parents=[common], help="perceived-moment distribution over a lifetime profile")
    sub.add_parser("check", parents=[common], help="all validations plus the correlation check")
    return parser


# -- helpers -----------------------------------------------------------


def _clamp(p: float) -> float:
    # Presentation-side clamp; raw values stay untouched in the library.
    return min(max(float(p), 0.0), 1.0)


def _require_quantum(scn: Scenario, command: str) -> None:
    if scn.is_classical:
        raise IncompatibleCommandError(
            f"command {command!r} needs a quantum scenario; {scn.name!r} is classical"
        )


def _require_composite(scn: Scenario, command: str) -> None:
    if scn.composite is None or len(scn.composite.factors) < 2:
        raise IncompatibleCommandError(
            f"command {command!r} needs a composite scenario with at least two factors"
        )


def _observable(scn: Scenario, obs_id: str) -> ScenarioObservable:
    try:
        return scn.observable_by_id(obs_id)
    except KeyError as exc:
        raise IncompatibleCommandError(exc.args[0]) from None


def _lifted(scn: Scenario, sobs: ScenarioObservable) -> Observable:
    if scn.composite is None:
        return sobs.observable
    return lift(sobs.observable, scn.composite)


def _channel_ref(scn: Scenario, text: str, flag: str):
    if ":" not in text:
        raise IncompatibleCommandError(f"{flag} expects OBSERVABLE:CHANNEL, got {text!r}")
    obs_id, label = text.split(":", 1)
    sobs = _observable(scn, obs_id)
    try:
        index = sobs.observable.index(label)
    except KeyError as exc:
        raise IncompatibleCommandError(exc.args[0]) from None
    return sobs, index


def _factor_observable(scn: Scenario, index: int, command: str) -> ScenarioObservable:
    found = scn.observables_on_factor(index)
    if not found:
        raise IncompatibleCommandError(
            f"command {command!r} needs an observable on factor {index + 1} "
            f"({scn.composite.factors[index]})"
        )
    return found[0]


def _state(scn: Scenario) -> ProbabilityOperator:
    assert scn.state is not None
    return scn.state


def _log_base(scn: Scenario, opts: Options):
    if opts.log_base is not None:
        return opts.log_base
    if scn.weighting is not None:
        return scn.weighting.log_base
    return 2


def _basis_labels(dim: int) -> tuple[str, ...]:
    return tuple(str(k) for k in range(dim))


def _operator_table(caption: str, op) -> RenderedTable:
    entries = op.entries
    labels = _basis_labels(entries.shape[0])
    cells = tuple(tuple(complex(entries[i, j]) for j in range(entries.shape[1])) for i in range(entries.shape[0]))
    return RenderedTable(caption, labels, labels, cells)


def _probability_table(caption: str, row_labels, probs) -> RenderedTable:
    cells = tuple((_clamp(p),) for p in probs)
    return RenderedTable(caption, tuple(row_labels), ("probability",), cells)


# -- command handlers ---------------------------------------------------


def _validation_sections(scn: Scenario, opts: Options) -> list:
    sections: list = []
    if scn.is_classical:
        model = scn.classical
        lines = [
            f"kind: classical, {len(model.points)} sample points",
            f"measure total residual: {abs(sum(model.measure) - 1.0):.3e} (tol 1e-12): ok",
            f"all weights within [0, 1]: ok",
            f"events: {', '.join(e.id for e in scn.events) or '(none)'}",
        ]
        sections.append(TextLines(f"scenario '{scn.name}': valid", tuple(lines)))
        return sections

    lines = [f"kind: quantum, spaces: " + ", ".join(f"{s.label} (dim {s.dim})" for s in scn.spaces)]
    if scn.composite is not None:
        lines.append("composite factor order: " + " * ".join(s.label for s in scn.composite.factors))
    lines.append(f"state space dimension: {scn.full_space.dim}")
    sections.append(TextLines(f"scenario '{scn.name}': valid", tuple(lines)))

    m = scn.state.matrix
    herm = structure_check(m, "hermitian", 1e-10)
    psd = structure_check(m, "psd", 1e-10)
    trace_residual = abs(m.trace() - 1.0)
    sections.append(TextLines(
        "state checks",
        (
            f"hermitian residual: {herm.residual:.3e} (tol 1e-10): ok",
            f"unit-trace residual: {trace_residual:.3e} (tol 1e-10): ok",
            f"positive semidefinite residual: {psd.residual:.3e} (tol 1e-10): ok",
        ),
    ))

    for sobs in scn.observables:
        report = validate_observable(sobs.observable)
        ranks = ", ".join(str(ch.rank) for ch in sobs.observable.channels)
        lines = [
            f"channels: {', '.join(sobs.observable.labels)} (ranks {ranks})",
            f"orthogonality residual: {report.orthogonality_residual:.3e} (tol 1e-10): ok",
            f"completeness residual: {report.completeness_residual:.3e} (tol 1e-10): ok",
        ]
        if sobs.quantitative is not None:
            lines.append("channel values: " + ", ".join(format_number(v, opts.precision)
                                                        for v in sobs.quantitative.values))
        sections.append(TextLines(f"observable '{sobs.id}' on '{sobs.space_id}'", tuple(lines)))

    if scn.observers:
        lines = []
        for o in scn.observers:
            lines.append(
                f"{o.id}: branch channels {o.branch_channels if o.branch_channels is not None else 'n/a'}, "
                f"lifetime {format_number(o.lifetime, opts.precision)}, "
                f"perception duration {format_number(o.perception_duration, opts.precision)}"
            )
        sections.append(TextLines("observers", tuple(lines)))
    if scn.weighting is not None:
        sections.append(TextLines(
            "weighting",
            (f"scheme: {scn.weighting.variant}, log base {scn.weighting.log_base}",),
        ))
    if scn.lifetime_profile is not None:
        sections.append(TextLines(
            "lifetime profile",
            (f"{len(scn.lifetime_profile.segments)} segments",),
        ))
    return sections


def _cmd_validate(scn: Scenario, opts: Options) -> Report:
    return Report(f"validate: scenario '{scn.name}'", tuple(_validation_sections(scn, opts)))


def _correlation_section(scn: Scenario, opts: Options) -> TextLines:
    if scn.is_classical or scn.composite is None or len(scn.composite.factors) != 2:
        return TextLines("correlation check", ("not applicable: needs a two-factor quantum scenario",))
    rows = scn.observables_on_factor(0)
    cols = scn.observables_on_factor(1)
    if not rows or not cols:
        return TextLines("correlation check", ("not applicable: needs an observable on each factor",))
    report = correlation_check(
        _state(scn), _lifted(scn, rows[0]), _lifted(scn, cols[0]), tol=opts.tol
    )
    lines = [
        f"observables: '{rows[0].id}' ({report.row_channels} channels) vs "
        f"'{cols[0].id}' ({report.col_channels} channels)",
        f"channel counts match: {'yes' if report.counts_match else 'no'}",
        f"off-diagonal joint mass: {report.off_diagonal_mass:.3e}",
        f"max conditional deviation from identity: {report.max_conditional_deviation:.3e}",
    ]
    if report.skipped_rows:
        lines.append("rows skipped for zero marginal: " + ", ".join(str(i + 1) for i in report.skipped_rows))
    verdict = "yes" if report.adequately_correlated else "no"
    lines.append(f"adequately correlated at tol {opts.tol:.3g}: {verdict}")
    return TextLines("correlation check", tuple(lines))


def _cmd_check(scn: Scenario, opts: Options) -> Report:
    sections = _validation_sections(scn, opts)
    sections.append(_correlation_section(scn, opts))
    return Report(f"check: scenario '{scn.name}'", tuple(sections))


def _cmd_gross(scn: Scenario, opts: Options) -> Report:
    sections = []
    if scn.is_classical:
        labels = tuple(e.id for e in scn.events)
        probs = [e.event.prob() for e in scn.events]
        sections.append(_probability_table("event probabilities", labels, probs))
    else:
        state = _state(scn)
        for sobs in scn.observables:
            lifted = _lifted(scn, sobs)
            probs = [born(state, ch) for ch in lifted.channels]
            sections.append(_probability_table(
                f"gross probabilities: observable '{sobs.id}'", lifted.labels, probs
            ))
            if sobs.quantitative is not None:
                value = sum(v * p for v, p in zip(sobs.quantitative.values, probs))
                sections.append(TextLines(
                    f"expectation of '{sobs.id}'",
                    (f"value: {format_number(value, opts.precision)}",),
                ))
    return Report(f"gross: scenario '{scn.name}'", tuple(sections))


def _joint_pair(scn: Scenario, opts: Options, command: str):
    _require_quantum(scn, command)
    _require_composite(scn, command)
    rows = _observable(scn, opts.rows) if opts.rows else _factor_observable(scn, 0, command)
    cols = _observable(scn, opts.cols) if opts.cols else _factor_observable(scn, 1, command)
    if rows.id == cols.id:
        raise IncompatibleCommandError("row and column observables must differ")
    return rows, cols


def _joint_table(scn: Scenario, rows: ScenarioObservable, cols: ScenarioObservable,
                 opts: Options, caption: str) -> RenderedTable:
    jm = joint_matrix(_state(scn), _lifted(scn, rows), _lifted(scn, cols), tol=max(opts.tol, 1e-10))
    cells = tuple(tuple(_clamp(v) for v in row) for row in jm.values)
    return RenderedTable(caption, rows.observable.labels, cols.observable.labels, cells)


def _cmd_joint(scn: Scenario, opts: Options) -> Report:
    rows, cols = _joint_pair(scn, opts, "joint")
    table = _joint_table(
        scn, rows, cols, opts,
        f"joint probabilities: rows '{rows.id}', columns '{cols.id}'",
    )
    return Report(f"joint: scenario '{scn.name}'", (table, _correlation_section(scn, opts)))


def _cmd_conditional(scn: Scenario, opts: Options) -> Report:
    _require_quantum(scn, "conditional")
    _require_composite(scn, "conditional")
    state = _state(scn)
    if opts.given:
        sobs, index = _channel_ref(scn, opts.given, "--given")
        if opts.target:
            target = _observable(scn, opts.target)
        else:
            others = [so for so in scn.observables if so.observable.space != sobs.observable.space]
            if not others:
                raise IncompatibleCommandError("no observable on another factor to condition; pass --target")
            target = others[0]
        given_event = _lifted(scn, sobs).channels[index]
        probs = conditional(state, given_event, _lifted(scn, target))
        label = f"{sobs.id}:{sobs.observable.labels[index]}"
        table = RenderedTable(
            f"probabilities of '{target.id}' given '{label}'",
            (label,),
            target.observable.labels,
            (tuple(_clamp(p) for p in probs),),
        )
        return Report(f"conditional: scenario '{scn.name}'", (table,))

    rows = _factor_observable(scn, 0, "conditional")
    target = _factor_observable(scn, 1, "conditional")
    lifted_rows = _lifted(scn, rows)
    lifted_target = _lifted(scn, target)
    kept_labels = []
    cells = []
    skipped = []
    for label, ch in zip(lifted_rows.labels, lifted_rows.channels):
        p = born(state, ch)
        if p <= 1e-12:
            skipped.append(label)
            continue
        probs = conditional(state, ch, lifted_target)
        kept_labels.append(f"{rows.id}:{label}")
        cells.append(tuple(_clamp(x) for x in probs))
    sections: list = [RenderedTable(
        f"probabilities of '{target.id}' given channels of '{rows.id}'",
        tuple(kept_labels),
        target.observable.labels,
        tuple(cells),
    )]
    if skipped:
        sections.append(TextLines(
            "skipped rows",
            tuple(f"'{rows.id}:{lbl}': zero probability, cannot condition" for lbl in skipped),
        ))
    return Report(f"conditional: scenario '{scn.name}'", tuple(sections))


def _cmd_collapse(scn: Scenario, opts: Options) -> Report:
    _require_quantum(scn, "collapse")
    sobs, index = _channel_ref(scn, opts.on, "--on")
    event = _lifted(scn, sobs).channels[index]
    result = collapse(_state(scn), event)
    label = f"{sobs.id}:{sobs.observable.labels[index]}"
    lines = TextLines(
        "collapse",
        (
            f"eventuality: {label}",
            f"probability: {format_number(_clamp(result.probability), opts.precision)}",
        ),
    )
    table = _operator_table(f"a-posteriori operator given '{label}'", result.operator.matrix)
    return Report(f"collapse: scenario '{scn.name}'", (lines, table))


def _cmd_luder(scn: Scenario, opts: Options) -> Report:
    _require_quantum(scn, "luder")
    sobs = _observable(scn, opts.obs) if opts.obs else scn.observables[0]
    lifted = _lifted(scn, sobs)
    result = luder(_state(scn), lifted)
    probs = [born(result, ch) for ch in lifted.channels]
    table = _probability_table(
        f"channel probabilities under the decohered operator (observable '{sobs.id}')",
        lifted.labels,
        probs,
    )
    op_table = _operator_table("decohered operator", result.matrix)
    return Report(f"luder: scenario '{scn.name}'", (table, op_table))


def _cmd_branches(scn: Scenario, opts: Options) -> Report:
    _require_quantum(scn, "branches")
    sobs = _observable(scn, opts.obs) if opts.obs else scn.observables[0]
    lifted = _lifted(scn, sobs)
    source = scn.state_vector if scn.state_vector is not None else _state(scn)
    bd = branch_decompose(source, lifted)
    sections: list = [_probability_table(
        f"branch probabilities (observable '{sobs.id}')", lifted.labels, bd.probabilities
    )]
    if bd.zero_channels:
        sections.append(TextLines(
            "zero-probability branches",
            tuple(
                f"'{lifted.labels[i]}': probability below threshold {bd.threshold:.0e}; no a-posteriori operator"
                for i in bd.zero_channels
            ),
        ))
    for label, post in zip(lifted.labels, bd.posteriors):
        if post is not None:
            sections.append(_operator_table(f"branch '{label}': a-posteriori operator", post.matrix))
    return Report(f"branches: scenario '{scn.name}'", tuple(sections))


def _cmd_net(scn: Scenario, opts: Options) -> Report:
    _require_quantum(scn, "net")
    if not scn.observers:
        raise IncompatibleCommandError(f"scenario {scn.name!r} defines no observers")
    if scn.weighting is None:
        raise IncompatibleCommandError(f"scenario {scn.name!r} defines no weighting scheme")
    scheme = Scheme(scn.weighting.variant, _log_base(scn, opts))
    state = _state(scn)

    gross = []
    channel_labels = []
    for o in scn.observers:
        if o.observable is None:
            raise IncompatibleCommandError(
                f"observer {o.id!r} has no perception observable; gross probabilities are undefined"
            )
        matches = [so for so in scn.observables if so.observable is o.observable]
        sobs = matches[0] if matches else None
        lifted = _lifted(scn, sobs) if sobs is not None else o.observable
        gross.append([born(state, ch) for ch in lifted.channels])
        channel_labels.append(lifted.labels)
    table = net_table(scheme, scn.observers, gross)

    sections: list = []
    if (
        scn.composite is not None
        and len(scn.composite.factors) == 2
        and len(scn.observers) == 2
        and {o.observable.space for o in scn.observers} == set(scn.composite.factors)
    ):
        by_factor = sorted(
            scn.observers, key=lambda o: scn.composite.factor_index(o.observable.space)
        )
        row_matches = [so for so in scn.observables if so.observable is by_factor[0].observable]
        col_matches = [so for so in scn.observables if so.observable is by_factor[1].observable]
        if row_matches and col_matches:
            sections.append(_joint_table(
                scn, row_matches[0], col_matches[0], opts,
                f"joint gross probabilities: rows '{row_matches[0].id}', columns '{col_matches[0].id}'",
            ))

    if scheme.variant == "entropic":
        caption = (
            f"observer weights (entropic, log base {scheme.log_base}): "
            f"alpha = {format_number(table.normalizer, opts.precision)}"
        )
    elif scheme.variant == "proper":
        caption = f"observer weights (proper): rate = {format_number(table.normalizer, opts.precision)}"
    else:
        caption = "observer weights (weak)"
    sections.append(RenderedTable(
        caption,
        tuple(o.id for o in scn.observers),
        ("weight",),
        tuple((float(w),) for w in table.weights),
    ))

    row_labels = []
    cells = []
    for o, labels, g, n in zip(scn.observers, channel_labels, table.gross, table.net):
        for label, gv, nv in zip(labels, g, n):
            row_labels.append(f"{o.id}:{label}")
            cells.append((_clamp(gv), _clamp(nv)))
    sections.append(RenderedTable(
        "net perception probabilities",
        tuple(row_labels),
        ("gross", "net"),
        tuple(cells),
        arrow_pair=True,
    ))
    sections.append(TextLines(
        "totals",
        (f"net total: {format_number(table.grand_total(), opts.precision)}",),
    ))
    return Report(f"net: scenario '{scn.name}'", tuple(sections))


def _cmd_lifetime(scn: Scenario, opts: Options) -> Report:
    if scn.lifetime_profile is None:
        raise IncompatibleCommandError(f"scenario {scn.name!r} defines no lifetime profile")
    base = _log_base(scn, opts)
    dist = lifetime_distribution(scn.lifetime_profile, base)
    labels = tuple(f"segment {k + 1}" for k in range(len(scn.lifetime_profile.segments)))
    cells = []
    for seg, dens, mass, cum in zip(scn.lifetime_profile.segments, dist.densities, dist.masses, dist.cumulative):
        cells.append((
            float(seg.duration),
            float(seg.entropy(base)),
            float(seg.perception_duration),
            float(dens),
            float(mass),
            float(cum),
        ))
    table = RenderedTable(
        f"perceived-moment distribution (log base {base})",
        labels,
        ("duration", "capacity", "perception", "density", "mass", "cumulative"),
        tuple(cells),
    )
    lines = TextLines(
        "summary",
        (f"most likely segment: {dist.argmax_segment + 1} of {len(labels)}",),
    )
    return Report(f"lifetime: scenario '{scn.name}'", (table, lines))


_HANDLERS = {
    "validate": _cmd_validate,
    "gross": _cmd_gross,
    "joint": _cmd_joint,
    "conditional": _cmd_conditional,
    "collapse": _cmd_collapse,
    "luder": _cmd_luder,
    "branches": _cmd_branches,
    "net": _cmd_net,
    "lifetime": _cmd_lifetime,
    "check": _cmd_check,
}


def run_command(command: str, scn: Scenario, opts: Options) -> Report:
    """Run one command against a loaded scenario and return its report."""
    if command not in _HANDLERS:
        raise IncompatibleCommandError(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
    return _HANDLERS[command](scn, opts)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else (0 if exc.code is None else 1)
    if args.command is None:
        parser.print_usage(sys.stderr)
        sys.stderr.write("qprob: error: a command is required\n")
        return 1
    opts = Options(
        tol=args.tol,
        log_base={"2": 2, "e": "e", None: None}[args.log_base],
        precision=args.precision,
        given=getattr(args, "given", None),
        target=getattr(args, "target", None),
        on=getattr(args, "on", None),
        obs=getattr(args, "obs", None),
        rows=getattr(args, "rows", None),
        cols=getattr(args, "cols", None),
    )
    try:
        scn = load_preset(args.preset) if args.preset else load_file(args.scenario)
        report = run_command(args.command, scn, opts)
        text = render_report(report, args.format, args.precision)
    except (UnknownPresetError, ScenarioParseError, IncompatibleCommandError) as exc:
        sys.stderr.write(f"qprob: error: {exc}\n")
        return 1
    except (QprobError, ValueError) as exc:
        sys.stderr.write(f"qprob: error: {exc}\n")
        return 2
    sys.stdout.write(text)
    return 0
