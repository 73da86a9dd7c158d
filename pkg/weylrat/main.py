import io
import json
import logging
from typing import Any, Dict, Iterable, List, Optional

import click
import click_log
from pydantic import ValidationError
from rich import box
from rich.console import Console
from rich.table import Table

from weylrat import log
from weylrat.config import (
    MAX_VERIFY_RANK,
    CliConfig,
    Config,
    OutputFormat,
    load_config,
)
from weylrat.cyclic_family import (
    FamilyKind,
    Half,
    SubsetIndex,
    allowed_moves,
    arrow_count,
    c_element,
    d_element,
    defect_polynomial,
    family_defect,
    family_length,
    forbidden_move_certificate,
    format_cycle,
    recognize,
    two_level_data,
)
from weylrat.fmt import ifmt, okfmt, polyfmt, setfmt, sfmt
from weylrat.oracle import VerificationSummary, run_verification
from weylrat.rationality import (
    build_graph,
    certificate_of_graph,
    is_rational,
    nu_sequence,
)
from weylrat.rationality_graph import build_gamma, to_dot, to_json
from weylrat.root_system import Root, root_table
from weylrat.signed_perm import (
    SignedPerm,
    compose,
    format_one_line,
    length,
    parse_one_line,
    simple_reflection,
)

logger = logging.getLogger("weylrat")
click_log.basic_config(logger)  # type: ignore


CONTEXT_SETTINGS = dict(help_option_names=["-h", "--help"], auto_envvar_prefix="WEYL")

rank_option = click.option(
    "-r",
    "--rank",
    type=int,
    default=None,
    help="Rank r of D_r (odd, at least 5). Defaults to verify.rank from the config.",
)
output_option = click.option(
    "-o",
    "--output",
    type=click.Path(dir_okay=False, writable=True),
    default=None,
    help="Write the result to this file instead of standard output.",
)


def format_option(*choices: OutputFormat) -> Any:
    return click.option(
        "--format",
        "fmt",
        type=click.Choice([c.value for c in choices]),
        default=None,
        help="Output format.",
    )


def _cli_config(
    ctx: click.Context,
    rank: Optional[int],
    fmt: Optional[str],
    output: Optional[str],
    workers: Optional[int] = None,
) -> CliConfig:
    config: Config = ctx.obj
    values: Dict[str, Any] = {
        "rank": rank if rank is not None else config.verify.rank,
        "format": fmt or config.output.format.value,
        "output": output or config.output.output,
        "workers": workers if workers is not None else config.verify.workers,
    }
    try:
        return CliConfig(**values)
    except ValidationError as e:
        messages = "; ".join(err["msg"] for err in e.errors())
        raise click.BadParameter(messages, param_hint="'--rank'/'--workers'")


def _render(content: Table) -> str:
    buffer = io.StringIO()
    Console(file=buffer, width=120).print(content)
    return buffer.getvalue()


def _emit(text: str, output: Optional[str]) -> None:
    if output is None:
        click.echo(text, nl=not text.endswith("\n"))
        return
    with open(output, "w", encoding="utf8") as file:
        file.write(text if text.endswith("\n") else text + "\n")
    log.notice(f"Wrote {output}")


def _dump(data: Any) -> str:
    return json.dumps(data, indent=2)


def _roots(roots: Iterable[Root]) -> List[str]:
    return [str(root) for root in roots]


def _levels(u: SignedPerm) -> List[List[str]]:
    table = root_table(u.rank)
    return [_roots(table.canonical(level)) for level in nu_sequence(u).levels]


@click.group(context_settings=CONTEXT_SETTINGS)
@click_log.simple_verbosity_option(logger)  # type: ignore
@click.option(
    "-c",
    "--config",
    help="Path to toml config",
    default=None,
    type=click.Path(exists=True, dir_okay=False, readable=True),
)
@click.pass_context
def cli(ctx: click.Context, config: Optional[str]) -> None:
    """weylrat studies rational elements of the Weyl group W(D_r), r odd.

    It verifies the classification of rational elements by exhaustive
    enumeration, recognises them from one-line notation, and exports the graph
    of rational elements joined by simple left multiplications.
    """
    try:
        ctx.obj = load_config(config)
    except (RuntimeError, ValidationError) as e:
        raise click.UsageError(str(e))
    ctx.meta["config_path"] = config


@cli.command(context_settings=CONTEXT_SETTINGS)
@rank_option
@click.option(
    "-j",
    "--workers",
    type=int,
    default=None,
    envvar="WEYL_WORKERS",
    help="Worker processes for the enumeration (default: all cores).",
)
@click.option("--extended", is_flag=True, help="Opt in to the r=9 run.")
@click.option("--progress", is_flag=True, help="Show a progress bar.")
@format_option(OutputFormat.JSON, OutputFormat.TEXT)
@output_option
@click.pass_context
def verify(
    ctx: click.Context,
    rank: Optional[int],
    workers: Optional[int],
    extended: bool,
    progress: bool,
    fmt: Optional[str],
    output: Optional[str],
) -> None:
    """Enumerate W(D_r) and confirm there are exactly 2^r - 1 rational elements."""
    config: Config = ctx.obj
    settings = _cli_config(ctx, rank, fmt, output, workers)
    if settings.format is OutputFormat.DOT:
        raise click.BadParameter("verify has no DOT output", param_hint="'--format'")
    if settings.rank > MAX_VERIFY_RANK:
        raise click.BadParameter(
            f"r={settings.rank} is out of desk scale for verification",
            param_hint="'--rank'",
        )
    if settings.rank == MAX_VERIFY_RANK and not (extended or config.verify.extended):
        raise click.BadParameter(
            f"r={settings.rank} is an extended run, pass --extended",
            param_hint="'--rank'",
        )
    if ctx.meta.get("config_path"):
        config.display(ctx.meta["config_path"])

    summary = run_verification(
        settings.rank,
        workers=settings.workers,
        progress=progress or config.verify.progress,
        progress_interval=config.verify.progress_interval,
        chunks_per_worker=config.verify.chunks_per_worker,
    )
    if settings.format is OutputFormat.TEXT:
        text = _render(_summary_table(summary))
    else:
        text = _dump({"ok": summary.ok, **summary.model_dump()})
    _emit(text, settings.output)
    if not summary.ok:
        log.error(f"verification at r={settings.rank} failed")
        ctx.exit(1)


def _summary_table(summary: VerificationSummary) -> Table:
    report = summary.report
    table = Table(title=f"W(D_{report.rank}) verification", box=box.SIMPLE_HEAVY)
    table.add_column("Check")
    table.add_column("Value", justify="right")
    table.add_column("Status", justify="center")
    table.add_row("Group order", ifmt(report.group_order), "")
    table.add_row("Elements visited", ifmt(report.visited, report.group_order), "")
    table.add_row(
        "Rational elements",
        ifmt(report.rational_count, report.expected_count),
        okfmt(report.rational_count == report.expected_count),
    )
    table.add_row(
        "Mismatches",
        ifmt(len(report.mismatches), 0),
        okfmt(not report.mismatches),
    )
    table.add_row(
        "Defect histogram",
        str(report.defect_histogram),
        okfmt(report.defect_histogram == defect_polynomial(report.rank)),
    )
    table.add_row(
        "Descent",
        f"{summary.descent.checked} checked",
        okfmt(summary.descent.ok),
    )
    table.add_row(
        "Certificates",
        f"{summary.certificates.checked} checked",
        okfmt(summary.certificates.ok),
    )
    table.add_row("Family closure", "", okfmt(summary.family_closure))
    table.add_row("Workers", str(report.worker_count), "")
    table.add_row("Elapsed", sfmt(report.elapsed), "")
    return table


def _parse_element(text: str) -> SignedPerm:
    try:
        return parse_one_line(text)
    except ValueError as e:
        raise click.BadParameter(str(e), param_hint="'ELEMENT'")


@cli.command("recognize", context_settings=CONTEXT_SETTINGS)
@click.argument("element")
@click.option(
    "--check",
    is_flag=True,
    help="Cross-check the answer against the root-poset graph of the element.",
)
@output_option
@click.pass_context
def recognize_cmd(
    ctx: click.Context, element: str, check: bool, output: Optional[str]
) -> None:
    """Decide whether ELEMENT, e.g. "(-1,-3,-4,-5,2)", is rational."""
    u = _parse_element(element)
    if u.rank < 5 or u.rank % 2 == 0:
        raise click.BadParameter(
            f"rank {u.rank} is not supported: recognition needs r >= 5 odd",
            param_hint="'ELEMENT'",
        )
    result = recognize(u)
    _emit(_dump(result.to_json()), output)
    if check and result.rational != is_rational(u):
        log.error(f"recognition of {format_one_line(u)} disagrees with its graph")
        ctx.exit(1)
    if not result.rational:
        ctx.exit(1)


@cli.command(context_settings=CONTEXT_SETTINGS)
@click.argument("element")
@output_option
@click.pass_context
def rationality(ctx: click.Context, element: str, output: Optional[str]) -> None:
    """Test ELEMENT for rationality from its root-poset graph, at any rank."""
    u = _parse_element(element)
    if u.rank % 2 == 0:
        log.warning(
            f"r={u.rank} is even; the classification of rational elements "
            "only covers odd ranks"
        )
    try:
        certificate = certificate_of_graph(build_graph(u))
        data = {
            "element": format_one_line(u),
            "rational": certificate is None,
            "length": length(u),
            "nu": _levels(u),
            "certificate": certificate.to_json() if certificate else None,
        }
    except ValueError as e:
        raise click.BadParameter(str(e), param_hint="'ELEMENT'")
    _emit(_dump(data), output)
    if certificate is not None:
        ctx.exit(1)


@cli.command(context_settings=CONTEXT_SETTINGS)
@rank_option
@click.option(
    "--no-validate",
    is_flag=True,
    help="Skip checking every edge against the group action.",
)
@format_option(OutputFormat.JSON, OutputFormat.DOT, OutputFormat.TEXT)
@output_option
@click.pass_context
def graph(
    ctx: click.Context,
    rank: Optional[int],
    no_validate: bool,
    fmt: Optional[str],
    output: Optional[str],
) -> None:
    """Export the graph of rational elements of W(D_r)."""
    settings = _cli_config(ctx, rank, fmt, output)
    gamma = build_gamma(settings.rank, validate=not no_validate)
    if settings.format is OutputFormat.DOT:
        text = to_dot(gamma)
    elif settings.format is OutputFormat.TEXT:
        table = Table(
            title=f"Rational elements of W(D_{gamma.rank})", box=box.SIMPLE_HEAVY
        )
        table.add_column("Vertex")
        table.add_column("Element")
        table.add_column("Degree", justify="right")
        table.add_column("Neighbours")
        for v in gamma.vertices:
            table.add_row(
                v.name,
                format_one_line(v.element()),
                str(gamma.adjacency_degree(v)),
                ", ".join(
                    f"{n.name} (s{gamma.label(v, n)})" for n in gamma.neighbours(v)
                ),
            )
        text = _render(table)
    else:
        text = _dump(to_json(gamma))
    _emit(text, settings.output)


SHOW_CHOICES = ["element", "nu", "arrows", "length", "certificate-table"]


def _family_element_data(subset: SubsetIndex) -> Dict[str, Any]:
    return {
        "subset": subset.to_json(),
        "p_cycle": format_cycle(subset),
        "c": format_one_line(c_element(subset)),
        "d": format_one_line(d_element(subset)),
    }


def _family_nu_data(subset: SubsetIndex, check: bool) -> Dict[str, Any]:
    data = two_level_data(subset)
    levels = nu_sequence(c_element(subset)).levels
    result: Dict[str, Any] = {
        "subset": subset.to_json(),
        "a_set": _roots(data.a_set),
        "b_set": _roots(data.b_set),
        "nu": _levels(c_element(subset)),
    }
    if check:
        result["check"] = (
            levels[0] == frozenset(data.vertices)
            and len(levels) > 1
            and levels[1] == frozenset(data.a_set)
            and not levels[-1]
            and len(levels) <= 3
        )
    return result


def _family_arrows_data(subset: SubsetIndex, check: bool) -> Dict[str, Any]:
    data = two_level_data(subset)
    result: Dict[str, Any] = {
        "subset": subset.to_json(),
        "arrows": [[str(s), str(t)] for s, t in data.arrows],
        "count": arrow_count(subset),
    }
    if check:
        graph = build_graph(c_element(subset))
        result["check"] = set(graph.arc_pairs()) == set(data.arrows) and len(
            data.arrows
        ) == arrow_count(subset)
    return result


def _family_length_data(subset: SubsetIndex, check: bool) -> Dict[str, Any]:
    result: Dict[str, Any] = {
        "subset": subset.to_json(),
        "length": family_length(subset),
        "defect": family_defect(subset),
    }
    if check:
        result["check"] = (
            length(c_element(subset))
            == length(d_element(subset))
            == family_length(subset)
        )
    return result


def _family_certificate_data(subset: SubsetIndex, check: bool) -> Dict[str, Any]:
    r = subset.rank
    rows = []
    ok = True
    for half in Half:
        element = c_element(subset) if half is Half.C else d_element(subset)
        allowed = allowed_moves(half, subset)
        for a in range(1, r + 1):
            if a in allowed:
                continue
            certificate = forbidden_move_certificate(half, subset, a)
            moved = compose(simple_reflection(a, r), element)
            row: Dict[str, Any] = {
                "half": half.value,
                "move": f"s{a}",
                "element": format_one_line(moved),
                "certificate": certificate.to_json(),
            }
            if check:
                row["valid"] = certificate.validate(moved)
                ok = ok and row["valid"]
            rows.append(row)
    result: Dict[str, Any] = {
        "subset": subset.to_json(),
        "allowed": {half.value: sorted(allowed_moves(half, subset)) for half in Half},
        "forbidden": rows,
    }
    if check:
        result["check"] = ok
    return result


@cli.command(context_settings=CONTEXT_SETTINGS)
@rank_option
@click.option("--subset", "subset_text", required=True, help='Subset I, e.g. "1,3".')
@click.option(
    "--show",
    type=click.Choice(SHOW_CHOICES),
    default="element",
    show_default=True,
    help="Which closed-form data to print.",
)
@click.option(
    "--check",
    is_flag=True,
    help="Cross-validate against the definition-level computation.",
)
@format_option(OutputFormat.JSON, OutputFormat.TEXT)
@output_option
@click.pass_context
def family(
    ctx: click.Context,
    rank: Optional[int],
    subset_text: str,
    show: str,
    check: bool,
    fmt: Optional[str],
    output: Optional[str],
) -> None:
    """Print closed-form data of the cyclic elements c_I and d_I."""
    settings = _cli_config(ctx, rank, fmt, output)
    try:
        subset = SubsetIndex.parse(subset_text, settings.rank)
    except ValueError as e:
        raise click.BadParameter(str(e), param_hint="'--subset'")
    if subset.is_empty():
        raise click.BadParameter(
            "the subset must be non-empty", param_hint="'--subset'"
        )

    if show == "element":
        data = _family_element_data(subset)
        if check:
            data["check"] = recognize(c_element(subset)).kind is FamilyKind.C and (
                recognize(d_element(subset)).kind is FamilyKind.D
            )
    elif show == "nu":
        data = _family_nu_data(subset, check)
    elif show == "arrows":
        data = _family_arrows_data(subset, check)
    elif show == "length":
        data = _family_length_data(subset, check)
    else:
        data = _family_certificate_data(subset, check)

    if settings.format is OutputFormat.TEXT:
        table = Table(title=f"I = {setfmt(subset)}, r = {subset.rank}", box=box.SIMPLE)
        table.add_column("Field")
        table.add_column("Value")
        for key, value in data.items():
            table.add_row(key, okfmt(value) if key == "check" else str(value))
        text = _render(table)
    else:
        text = _dump(data)
    _emit(text, settings.output)
    if check and not data["check"]:
        log.error(f"closed-form {show} data for I = {setfmt(subset)} failed its check")
        ctx.exit(1)


@cli.command("defect-poly", context_settings=CONTEXT_SETTINGS)
@rank_option
@format_option(OutputFormat.JSON, OutputFormat.TEXT)
@output_option
@click.pass_context
def defect_poly(
    ctx: click.Context, rank: Optional[int], fmt: Optional[str], output: Optional[str]
) -> None:
    """Print the generating polynomial of defects over the rational elements."""
    settings = _cli_config(ctx, rank, fmt, output)
    coefficients = defect_polynomial(settings.rank)
    if settings.format is OutputFormat.TEXT:
        text = (
            f"F_{settings.rank}(q) = {polyfmt(coefficients)}\n"
            f"coefficients = {coefficients}\n"
            f"degree = {len(coefficients) - 1}\n"
            f"F(1) = {sum(coefficients)}\n"
        )
    else:
        text = _dump(
            {
                "rank": settings.rank,
                "coefficients": coefficients,
                "degree": len(coefficients) - 1,
                "value_at_one": sum(coefficients),
            }
        )
    _emit(text, settings.output)
