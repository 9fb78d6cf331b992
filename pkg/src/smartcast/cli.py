"""Command-line front end: ``analytic``, ``simulate`` and ``compare``.

Every output is CSV preceded by ``#`` metadata lines. Lines of the form
``# key=value`` are exactly the inputs of the run, so a previous output file
can be handed back through ``--config`` to regenerate it.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
import tempfile

from . import analytic as A
from .config import ConfigError, ScenarioConfig, load_config_file
from .sim import METRIC_FIELDS, run_experiment, run_paired, trial_seed

SCENARIO_KEYS = (
    "protocol", "n", "k", "p_e", "p_hat", "beta_star", "p_nack", "rho", "subslot_count",
    "coding_mode", "reestimate", "norm_block_size", "norm_aggregation_slots", "trials", "master_seed",
)


def _floats(text):
    return [float(x) for x in str(text).split(",") if x.strip()]


def _ints(text):
    return [int(x) for x in str(text).split(",") if x.strip()]


def _bool(text):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text!r}")


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isinf(v):
            return "inf"
        return repr(v)
    if isinstance(v, (list, tuple)):
        return ",".join(_fmt(x) for x in v)
    return str(v)


def _scenario_flags(p: argparse.ArgumentParser, skip=()):
    add = {
        "protocol": dict(choices=["smart", "genie", "norm"], default="smart"),
        "n": dict(type=int, default=1000),
        "k": dict(type=int, default=100),
        "p_e": dict(type=float, default=0.1),
        "p_hat": dict(type=float, default=None, help="transmitter's erasure estimate (default: p_e)"),
        "beta_star": dict(type=float, default=0.9),
        "p_nack": dict(type=float, default=0.0),
        "rho": dict(type=float, default=0.0),
        "subslot_count": dict(type=int, default=16),
        "coding_mode": dict(choices=["dof", "rank"], default="dof"),
        "reestimate": dict(type=_bool, default=False),
        "norm_block_size": dict(type=int, default=250),
        "norm_aggregation_slots": dict(type=int, default=10),
        "trials": dict(type=int, default=100),
    }
    for name, kw in add.items():
        if name not in skip:
            p.add_argument("--" + name.replace("_", "-"), dest=name, **kw)
    p.add_argument("--seed", dest="master_seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="smartcast", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key = value file (or an earlier output CSV); flags override it")
        p.add_argument("--out", default="-", help="output CSV path, '-' for stdout")

    an = sub.add_parser("analytic", help="tabulate closed-form quantities")
    an.add_argument("formula", choices=["beta-curve", "t-star", "stragglers", "accommodate"])
    common(an)
    an.add_argument("--k", dest="k_list", type=_ints, default=[100])
    an.add_argument("--p-e", dest="p_e_list", type=_floats, default=[0.1])
    an.add_argument("--lam", dest="lam_list", type=_floats, default=None, help="arrival rate; overrides --p-e")
    an.add_argument("--n", dest="n_list", type=_floats, default=[1000])
    an.add_argument("--beta-star", dest="beta_star_list", type=_floats, default=[0.9])
    an.add_argument("--t-min", dest="t_min", type=float, default=0.0)
    an.add_argument("--t-max", dest="t_max", type=float, default=200.0)
    an.add_argument("--t-step", dest="t_step", type=float, default=1.0)
    an.add_argument("--model", choices=["discrete", "continuous"], default="discrete")

    sim = sub.add_parser("simulate", help="run one scenario for many seeded trials")
    common(sim)
    _scenario_flags(sim)
    sim.add_argument("--workers", type=int, default=1)
    sim.add_argument("--trace", help="write per-trial feedback timeline CSV here")

    cmp_ = sub.add_parser("compare", help="SMART vs genie vs NORM over a (k, p_e) grid")
    common(cmp_)
    _scenario_flags(cmp_, skip=("protocol", "k", "p_e", "p_hat"))
    cmp_.add_argument("--k-list", dest="k_list", type=_ints, default=[10, 100, 1000])
    cmp_.add_argument("--p-e-list", dest="p_e_list", type=_floats, default=[0.1])
    cmp_.add_argument("--workers", type=int, default=1)
    return parser


def _apply_config_file(parser, argv):
    """Re-parse with values from ``--config`` installed as defaults."""
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    values = load_config_file(args.config)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest for a in sub._actions}
    defaults = {}
    for key, value in values.items():
        if key in ("command", "formula"):
            continue
        if key not in known:
            raise ConfigError(key, "unknown configuration key")
        defaults[key] = value
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


# -- output ---------------------------------------------------------------------


def _write_atomic(path, text: str):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".smartcast-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _render(title: str, meta: list, header: list, rows, footer: list = ()) -> str:
    buf = io.StringIO()
    buf.write(f"# smartcast {title}\n")
    for key, value in meta:
        buf.write(f"# {key}={_fmt(value)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    for line in footer:
        buf.write(line + "\n")
    return buf.getvalue()


# -- commands -------------------------------------------------------------------


def _t_grid(args, integer):
    if args.t_step <= 0 or args.t_max < args.t_min or args.t_min < 0:
        raise ConfigError("t_step", "need 0 <= t_min <= t_max and t_step > 0")
    count = int(math.floor((args.t_max - args.t_min) / args.t_step + 1e-9)) + 1
    grid = [args.t_min + i * args.t_step for i in range(count)]
    if integer:
        if any(t != int(t) for t in grid):
            raise ConfigError("t_min", "discrete model needs integer t_min and t_step")
        grid = [int(t) for t in grid]
    return grid


def _lams(args):
    if args.lam_list:
        return [(None, lam) for lam in args.lam_list]
    return [(pe, 1.0 - pe) for pe in args.p_e_list]


def cmd_analytic(args) -> str:
    f = args.formula
    meta = [
        ("k_list", args.k_list), ("p_e_list", args.p_e_list), ("n_list", args.n_list),
        ("beta_star_list", args.beta_star_list), ("t_min", args.t_min), ("t_max", args.t_max),
        ("t_step", args.t_step), ("model", args.model),
    ]
    if args.lam_list:
        meta.append(("lam_list", args.lam_list))
    rows = []
    if f == "beta-curve":
        header = ["model", "k", "p_e", "lambda", "n", "t", "beta"]
        grid = _t_grid(args, args.model == "discrete")
        for k in args.k_list:
            for pe, lam in _lams(args):
                for n in args.n_list:
                    if args.model == "discrete":
                        if pe is None:
                            raise ConfigError("lam_list", "the discrete model takes --p-e")
                        prm = A.DiscreteParams(k=k, p_e=pe, n=_as_int("n_list", n))
                        rows += [["discrete", k, pe, lam, prm.n, t, A.beta_discrete(t, prm)] for t in grid]
                    else:
                        prm = A.ContinuousParams(k=k, lam=lam, n=n)
                        rows += [["continuous", k, pe, lam, n, t, A.beta_continuous(t, prm)] for t in grid]
    elif f == "stragglers":
        header = ["k", "p_e", "n", "t", "beta", "mean_stragglers"]
        grid = _t_grid(args, True)
        for k in args.k_list:
            for pe in args.p_e_list:
                for n in args.n_list:
                    prm = A.DiscreteParams(k=k, p_e=pe, n=_as_int("n_list", n))
                    for t in grid:
                        lf, ld = A.log_node_tails_discrete(t, k, pe)
                        rows.append([k, pe, prm.n, t, A.beta_discrete(t, prm), prm.n * math.exp(lf)])
    elif f == "t-star":
        header = ["k", "p_e", "lambda", "n", "beta_star", "t_star", "lambda_t_star", "t_star_discrete"]
        for k in args.k_list:
            for pe, lam in _lams(args):
                for n in args.n_list:
                    for bs in args.beta_star_list:
                        ts = A.t_star_continuous(bs, A.ContinuousParams(k=k, lam=lam, n=n))
                        td = ""
                        if pe is not None and n == int(n):
                            td = A.first_time_discrete(bs, A.DiscreteParams(k=k, p_e=pe, n=int(n)))
                        rows.append([k, pe if pe is not None else "", lam, n, bs, ts, lam * ts, td])
    else:
        header = ["k", "p_e", "lambda", "beta_star", "t", "lambda_t", "n_accommodated"]
        grid = _t_grid(args, False)
        for k in args.k_list:
            for pe, lam in _lams(args):
                for bs in args.beta_star_list:
                    for t in grid:
                        try:
                            n = A.accommodated_n(t, k, lam, bs)
                        except A.SaturatedError:
                            n = "saturated"
                        rows.append([k, pe if pe is not None else "", lam, bs, t, lam * t, n])
    return _render(f"analytic {f}", meta, header, rows)


def _as_int(field, v):
    if v != int(v):
        raise ConfigError(field, f"discrete model needs an integer n, got {v!r}")
    return int(v)


def _scenario(args, **overrides) -> ScenarioConfig:
    values = {k: getattr(args, k) for k in SCENARIO_KEYS if hasattr(args, k)}
    values.update(overrides)
    return ScenarioConfig(**values)


def cmd_simulate(args):
    sc = _scenario(args)
    summary = run_experiment(sc, sc.trials, sc.master_seed, workers=args.workers)
    header = ["trial", "seed", *METRIC_FIELDS]
    rows = []
    trace_rows = []
    for i, m in enumerate(summary.metrics):
        seed = trial_seed(sc.master_seed, i)
        r = m.row()
        rows.append([i, seed, *(r[f] for f in METRIC_FIELDS)])
        trace_rows += [[i, sc.protocol, slot, width] for slot, width in m.nack_timeline]
    footer = ["#summary,metric,mean,std,ci_low,ci_high"]
    for name in METRIC_FIELDS:
        s = summary.stats[name]
        footer.append("#summary," + ",".join([name] + [_fmt(s[c]) for c in ("mean", "std", "ci_low", "ci_high")]))
    meta = [(line.split("=", 1)[0], line.split("=", 1)[1]) for line in sc.to_lines()]
    text = _render("simulate", meta, header, rows, footer)
    trace = None
    if args.trace:
        trace = _render("simulate trace", meta, ["trial", "protocol", "slot", "feedback_slots"], trace_rows)
    return text, trace


def cmd_compare(args) -> str:
    if not args.k_list:
        raise ConfigError("k_list", "must not be empty")
    if not args.p_e_list:
        raise ConfigError("p_e_list", "must not be empty")
    base = _scenario(args, k=args.k_list[0], p_e=args.p_e_list[0])
    header = ["k", "p_e", "n", "trials"]
    for p in ("smart", "genie", "norm"):
        header += [f"{p}_per_packet", f"{p}_data_per_packet"]
    header += ["smart_cycles", "norm_cycles", "smart_premature"]
    rows = []
    for k in args.k_list:
        for pe in args.p_e_list:
            sc = base.replace(k=k, p_e=pe, p_hat=pe)
            res = run_paired(sc, ("smart", "genie", "norm"), sc.trials, sc.master_seed, workers=args.workers)
            row = [k, pe, sc.n, sc.trials]
            for p in ("smart", "genie", "norm"):
                row += [res[p].mean("per_packet_time"), res[p].mean("data_per_packet")]
            row += [res["smart"].mean("cycles"), res["norm"].mean("cycles"), res["smart"].mean("premature_termination")]
            rows.append(row)
    meta = [("k_list", args.k_list), ("p_e_list", args.p_e_list)]
    meta += [(line.split("=", 1)[0], line.split("=", 1)[1]) for line in base.to_lines()
             if line.split("=", 1)[0] not in ("protocol", "k", "p_e", "p_hat")]
    return _render("compare", meta, header, rows)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config_file(parser, argv)
        if args.command == "analytic":
            _write_atomic(args.out, cmd_analytic(args))
        elif args.command == "simulate":
            text, trace = cmd_simulate(args)
            _write_atomic(args.out, text)
            if trace is not None:
                _write_atomic(args.trace, trace)
        else:
            _write_atomic(args.out, cmd_compare(args))
    except ConfigError as exc:
        print(f"error field={exc.field} message={exc.message}", file=sys.stderr)
        return 2
    except ValueError as exc:
        msg = str(exc)
        print(f"error field={msg.split()[0] if msg else 'unknown'} message={msg}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
