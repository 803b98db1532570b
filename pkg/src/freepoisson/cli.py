"""Command-line interface.

    freepoisson <subcommand> [flags]

Subcommands: nc, cumulants, dist, limit, process, kl, integrate, simulate.
Every subcommand writes a machine-readable report whose format follows the
--out extension (.json or .csv); without --out the JSON report goes to
stdout.  The table/simulation subcommands (limit, kl, integrate, simulate)
additionally render a PNG figure next to the report unless --no-fig is
given.  Given identical flags (and seed), every subcommand writes
byte-identical reports.

Exit codes: 0 on success, 2 on validation errors (the diagnostic names the
offending field; malformed JSON input counts), 3 when a resource limit is
exceeded.  The environment variable FREEPROB_SEED overrides --seed, which
overrides DEFAULT_SEED.  --threads caps BLAS/LAPACK parallelism.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from threadpoolctl import threadpool_limits

from . import modes
from .cumulants import (
    CumulantSequence,
    MomentSequence,
    cumulants_to_moments,
    moments_to_cumulants,
)
from .distributions import (
    classify_free_poisson,
    cumulant_sequence,
    distribution_from_jsonable,
    distribution_to_jsonable,
    moment_sequence,
)
from .errors import ResourceLimitError, SchemaError
from .integration import (
    PiecewisePoly,
    StepFunction,
    approximate,
    centered_l1_bound,
    integral_cumulants,
    integrate_step,
    l2_moment_bound,
)
from .limits import CONVERGENCE_HEADER, TriangularArraySpec, convergence_table
from .ncpart import SetPartition, catalan, enumerate_noncrossing, mobius
from .processes import (
    MERCER_HEADER,
    increment_cumulants,
    kl_eigensystem,
    mercer_table,
    process_from_jsonable,
    process_to_jsonable,
    sum_processes,
)
from .rmt import EnsembleConfig, step_integral_report

DEFAULT_SEED = 1729  # used whenever neither FREEPROB_SEED nor --seed is set
MOBIUS_MAX_N = 10  # nc reports mobius_top only up to here (cost grows fast)
FIGURE_COMMANDS = ("limit", "kl", "integrate", "simulate")


@dataclass(frozen=True)
class RunConfig:
    """One resolved CLI invocation."""

    command: str
    out: Path | None = None
    seed: int = DEFAULT_SEED
    threads: int | None = None
    no_fig: bool = False
    order: int | None = None
    tol: float | None = None
    params: dict = field(default_factory=dict)

    def figure_path(self) -> Path | None:
        if self.out is None or self.no_fig or self.command not in FIGURE_COMMANDS:
            return None
        return self.out.with_suffix(".png")


# ---------------------------------------------------------------------------
# parsing helpers


def _parse_number(text: str, field_name: str):
    """Exact when possible: Fraction accepts '3', '1/2', '0.25', '1e-3'."""
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        pass
    try:
        return float(text)
    except ValueError:
        raise SchemaError(f"{field_name}: not a number: {text!r}") from None


def _parse_int_list(text: str, field_name: str) -> tuple:
    items = []
    for part in text.split(","):
        part = part.strip()
        if not part.isdigit() or int(part) < 1:
            raise SchemaError(f"{field_name}: expected positive integers, got {part!r}")
        items.append(int(part))
    if not items:
        raise SchemaError(f"{field_name}: expected a comma-separated list")
    return tuple(items)


def _load_json(path, field_name: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SchemaError(f"{field_name}: cannot read {path}: {exc.strerror or exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{field_name}: malformed JSON: {exc}") from exc


def _encoder(exact: bool):
    return modes.encode_number if exact else lambda v: float(v)


def _sequence_report(seq, extra: dict) -> tuple[dict, list[str]]:
    report = dict(extra)
    report.update(seq.to_jsonable())
    csv_lines = ["n,value"]
    for n, v in enumerate(seq.values, start=1):
        csv_lines.append(f"{n},{modes.encode_number(v)}")
    return report, csv_lines


# ---------------------------------------------------------------------------
# subcommand handlers: each returns (report, csv_lines, figure_writer|None)


def _run_nc(cfg: RunConfig):
    n = cfg.params["count"]
    parts = enumerate_noncrossing(n)
    report = {"n": n, "count": len(parts), "catalan": catalan(n)}
    if n <= MOBIUS_MAX_N:
        top = SetPartition.of(n, [range(1, n + 1)])
        report["mobius_top"] = modes.encode_number(mobius(SetPartition.singletons(n), top))
    header = "n,count,catalan,mobius_top"
    row = f"{n},{report['count']},{report['catalan']},{report.get('mobius_top', '')}"
    return report, [header, row], None


def _run_cumulants(cfg: RunConfig):
    data = _load_json(cfg.params["infile"], "in")
    direction = cfg.params["direction"]
    if direction == "m2c":
        seq = moments_to_cumulants(MomentSequence.from_jsonable(data, field_name="in"))
    else:
        seq = cumulants_to_moments(CumulantSequence.from_jsonable(data, field_name="in"))
    return _sequence_report(seq, {"direction": direction}) + (None,)


def _run_dist(cfg: RunConfig):
    spec = distribution_from_jsonable(_load_json(cfg.params["spec"], "spec"), field="spec")
    emit = cfg.params["emit"]
    if emit == "classify":
        verdict = classify_free_poisson(cumulant_sequence(spec, cfg.order))
        report = {
            "emit": emit,
            "order": cfg.order,
            "spec": distribution_to_jsonable(spec),
            "classification": distribution_to_jsonable(verdict),
        }
        csv_lines = ["key,value"]
        for k, v in sorted(report["classification"].items()):
            csv_lines.append(f"{k},{v}")
        return report, csv_lines, None
    fn = moment_sequence if emit == "moments" else cumulant_sequence
    seq = fn(spec, cfg.order)
    report, csv_lines = _sequence_report(
        seq, {"emit": emit, "spec": distribution_to_jsonable(spec)}
    )
    return report, csv_lines, None


def _run_limit(cfg: RunConfig):
    p = cfg.params
    spec = TriangularArraySpec.of([(p["alpha"], p["lam"])])
    order = cfg.order if cfg.order is not None else p["n"]
    rows = convergence_table(spec, 0, p["Ns"], order)
    if p["n"] is not None:
        rows = [row for row in rows if row[1] == p["n"]]
    enc = _encoder(p["exact"])
    csv_lines = [",".join(CONVERGENCE_HEADER)]
    csv_lines += [f"{N},{n},{enc(k)},{enc(e)}" for N, n, k, e in rows]
    report = {
        "lambda": modes.encode_number(p["lam"]),
        "alpha": modes.encode_number(p["alpha"]),
        "header": list(CONVERGENCE_HEADER),
        "rows": [[N, n, enc(k), enc(e)] for N, n, k, e in rows],
    }

    def fig(path):
        from .plotting import save_convergence_figure

        save_convergence_figure(rows, path)

    return report, csv_lines, fig


def _run_process(cfg: RunConfig):
    p = cfg.params
    if p["sum"] is not None:
        data = _load_json(p["sum"], "sum")
        if not isinstance(data, list) or not data:
            raise SchemaError("sum: expected a non-empty array of process objects")
        procs = [process_from_jsonable(d, field=f"sum[{i}]") for i, d in enumerate(data)]
        proc = sum_processes(procs)
    else:
        proc = process_from_jsonable(_load_json(p["spec"], "spec"), field="spec")
    seq = increment_cumulants(proc, p["s"], p["t"], cfg.order)
    verdict = classify_free_poisson(seq)
    report, csv_lines = _sequence_report(
        seq,
        {
            "process": process_to_jsonable(proc),
            "s": modes.encode_number(p["s"]),
            "t": modes.encode_number(p["t"]),
            "classification": distribution_to_jsonable(verdict),
        },
    )
    return report, csv_lines, None


def _run_kl(cfg: RunConfig):
    p = cfg.params
    emit = p["emit"]
    count = p["count"]
    if emit == "mercer":
        count = max(count, max(p["Ns"]))
    sys_ = kl_eigensystem(p["alpha"], p["T"], count)
    if emit == "eigen":
        report = sys_.to_jsonable()
        csv_lines = ["n,eigenvalue"]
        csv_lines += [f"{n},{lam}" for n, lam in enumerate(sys_.eigenvalues, start=1)]

        def fig(path):
            from .plotting import save_eigensystem_figure

            save_eigensystem_figure(sys_, path)

        return report, csv_lines, fig

    rows = mercer_table(sys_, p["Ns"], p["grid"])
    report = {
        "T": sys_.T,
        "alpha": sys_.alpha,
        "grid": p["grid"],
        "header": list(MERCER_HEADER),
        "rows": [[N, err] for N, err in rows],
    }
    csv_lines = [",".join(MERCER_HEADER)] + [f"{N},{err}" for N, err in rows]

    def fig(path):
        from .plotting import save_mercer_figure

        save_mercer_figure(rows, path)

    return report, csv_lines, fig


def _run_integrate(cfg: RunConfig):
    p = cfg.params
    if p["step"] is not None:
        s = StepFunction.from_jsonable(_load_json(p["step"], "step"), field="step")
        seq = integrate_step(s, cfg.order)
        lhs, rhs = l2_moment_bound(s)
        report, csv_lines = _sequence_report(
            seq,
            {
                "kind": "step",
                "l2_moment_bound": {
                    "lhs": modes.encode_number(lhs),
                    "rhs": modes.encode_number(rhs),
                },
                "centered_l1_bound": modes.encode_number(centered_l1_bound(s)),
            },
        )

        def fig(path):
            from .plotting import save_step_figure

            save_step_figure(s, path)

        return report, csv_lines, fig

    f = PiecewisePoly.from_jsonable(_load_json(p["f"], "f"), field="f")
    seq = integral_cumulants(f, cfg.order, cfg.tol)
    report, csv_lines = _sequence_report(seq, {"kind": "piecewise_poly", "tol": cfg.tol})

    def fig(path):
        from .plotting import save_integrand_figure

        bounds = f.support_bounds()
        s = None
        if bounds is not None:
            width = bounds[1] - bounds[0]
            s = approximate(f, width / 64)
        save_integrand_figure(f, s, path)

    return report, csv_lines, fig


def _run_simulate(cfg: RunConfig):
    p = cfg.params
    s = StepFunction.from_jsonable(_load_json(p["step"], "step"), field="step")
    ens = EnsembleConfig(d=p["d"], seed=cfg.seed, samples=p["samples"])
    report = step_integral_report(s, ens, cfg.order)
    csv_lines = ["order,predicted,empirical,abs_error"]
    for m in range(cfg.order):
        csv_lines.append(
            f"{m + 1},{report['predicted'][m]},{report['empirical'][m]},{report['abs_error'][m]}"
        )

    def fig(path):
        from .plotting import save_simulation_figure

        save_simulation_figure(report, path)

    return report, csv_lines, fig


_HANDLERS = {
    "nc": _run_nc,
    "cumulants": _run_cumulants,
    "dist": _run_dist,
    "limit": _run_limit,
    "process": _run_process,
    "kl": _run_kl,
    "integrate": _run_integrate,
    "simulate": _run_simulate,
}


# ---------------------------------------------------------------------------
# report writing and dispatch


def _write_report(cfg: RunConfig, report: dict, csv_lines: list[str]) -> None:
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if cfg.out is None:
        sys.stdout.write(text)
        return
    suffix = cfg.out.suffix.lower()
    if suffix == ".json":
        cfg.out.write_text(text)
    elif suffix == ".csv":
        cfg.out.write_text("\n".join(csv_lines) + "\n")
    else:
        raise SchemaError(f"out: unsupported extension {suffix!r} (use .json or .csv)")


def run(cfg: RunConfig) -> dict:
    """Execute one invocation and write its report (and figure); returns the report."""
    handler = _HANDLERS.get(cfg.command)
    if handler is None:
        raise SchemaError(f"command: unknown subcommand {cfg.command!r}")
    fig_path = cfg.figure_path()
    report, csv_lines, fig = handler(cfg)
    if fig_path is not None and fig is not None:
        fig(fig_path)
        report["figure"] = fig_path.name
    _write_report(cfg, report, csv_lines)
    return report


# ---------------------------------------------------------------------------
# argument parsing


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, help="report path; .json or .csv")
    common.add_argument("--seed", type=int, help=f"RNG seed (default {DEFAULT_SEED})")
    common.add_argument("--threads", type=int, help="cap BLAS/LAPACK threads")
    common.add_argument("--no-fig", action="store_true", help="skip the PNG figure")

    parser = argparse.ArgumentParser(
        prog="freepoisson", description="Free-probability reports and simulations."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    nc = sub.add_parser("nc", parents=[common], help="non-crossing partition counts")
    nc.add_argument("--count", type=int, required=True, metavar="N")

    cum = sub.add_parser("cumulants", parents=[common], help="moment/cumulant transforms")
    cum.add_argument("--in", dest="infile", required=True, metavar="SEQ_JSON")
    cum.add_argument("--direction", choices=("m2c", "c2m"), required=True)

    dist = sub.add_parser("dist", parents=[common], help="distribution sequences")
    dist.add_argument("--spec", required=True, metavar="SPEC_JSON")
    dist.add_argument("--order", type=int, required=True)
    dist.add_argument("--emit", choices=("moments", "cumulants", "classify"),
                      default="moments")

    limit = sub.add_parser("limit", parents=[common], help="triangular-array convergence")
    limit.add_argument("--lambda", dest="lam", required=True)
    limit.add_argument("--alpha", required=True)
    limit.add_argument("--Ns", required=True, help="comma-separated row sizes")
    limit.add_argument("--order", type=int, help="report all n <= order")
    limit.add_argument("--n", type=int, help="report only this cumulant order")
    limit.add_argument("--exact", action="store_true",
                       help="emit p/q strings instead of floats")

    proc = sub.add_parser("process", parents=[common], help="increment cumulants")
    proc.add_argument("--spec", metavar="PROC_JSON")
    proc.add_argument("--sum", metavar="PROC_LIST_JSON",
                      help="sum the processes in this JSON array")
    proc.add_argument("--s", default="0")
    proc.add_argument("--t", default="1")
    proc.add_argument("--order", type=int, required=True)

    kl = sub.add_parser("kl", parents=[common], help="Karhunen-Loeve eigensystem")
    kl.add_argument("--alpha", default="1")
    kl.add_argument("--T", default="1")
    kl.add_argument("--count", type=int, default=10)
    kl.add_argument("--emit", choices=("eigen", "mercer"), default="eigen")
    kl.add_argument("--Ns", default="25,50,100,200", help="mercer truncation ranks")
    kl.add_argument("--grid", type=int, default=101)

    integ = sub.add_parser("integrate", parents=[common], help="stochastic-integral cumulants")
    integ.add_argument("--step", metavar="STEP_JSON")
    integ.add_argument("--f", metavar="POLY_JSON")
    integ.add_argument("--order", type=int, required=True)
    integ.add_argument("--tol", type=float, default=1e-6)

    sim = sub.add_parser("simulate", parents=[common], help="random-matrix step integrals")
    sim.add_argument("--step", required=True, metavar="STEP_JSON")
    sim.add_argument("--d", type=int, default=200)
    sim.add_argument("--samples", type=int, default=1)
    sim.add_argument("--order", type=int, default=4)

    return parser


def _resolve_seed(args) -> int:
    env = os.environ.get("FREEPROB_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise SchemaError(f"FREEPROB_SEED: must be an integer, got {env!r}") from None
    if args.seed is not None:
        return args.seed
    return DEFAULT_SEED


def _config_from_args(args) -> RunConfig:
    cmd = args.command
    params: dict = {}
    order = getattr(args, "order", None)
    tol = getattr(args, "tol", None)
    if cmd == "nc":
        params["count"] = args.count
    elif cmd == "cumulants":
        params.update(infile=args.infile, direction=args.direction)
    elif cmd == "dist":
        params.update(spec=args.spec, emit=args.emit)
    elif cmd == "limit":
        if (args.order is None) == (args.n is None):
            raise SchemaError("order: give exactly one of --order or --n")
        params.update(
            lam=_parse_number(args.lam, "lambda"),
            alpha=_parse_number(args.alpha, "alpha"),
            Ns=_parse_int_list(args.Ns, "Ns"),
            n=args.n,
            exact=args.exact,
        )
    elif cmd == "process":
        if (args.spec is None) == (args.sum is None):
            raise SchemaError("spec: give exactly one of --spec or --sum")
        params.update(
            spec=args.spec,
            sum=args.sum,
            s=_parse_number(args.s, "s"),
            t=_parse_number(args.t, "t"),
        )
    elif cmd == "kl":
        params.update(
            alpha=float(_parse_number(args.alpha, "alpha")),
            T=float(_parse_number(args.T, "T")),
            count=args.count,
            emit=args.emit,
            Ns=_parse_int_list(args.Ns, "Ns"),
            grid=args.grid,
        )
    elif cmd == "integrate":
        if (args.step is None) == (args.f is None):
            raise SchemaError("step: give exactly one of --step or --f")
        params.update(step=args.step, f=args.f)
    elif cmd == "simulate":
        params.update(step=args.step, d=args.d, samples=args.samples)
    return RunConfig(
        command=cmd,
        out=args.out,
        seed=_resolve_seed(args),
        threads=args.threads,
        no_fig=args.no_fig,
        order=order,
        tol=tol,
        params=params,
    )


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _config_from_args(args)
        if cfg.threads is not None:
            with threadpool_limits(limits=cfg.threads):
                run(cfg)
        else:
            run(cfg)
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (SchemaError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
