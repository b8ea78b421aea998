"""Command-line entry point: ``semvia {analytic|simulate|validate|optimize|sweep|trace}``.

Exit codes: 0 success, 1 validation failure, 2 invalid input.

CSV schemas
-----------
trace
    t, x, xhat, sampled, delivered, via, aoiv, aoii
validate
    point, p, q, p_s, policy, metric, closed_form, oracle, oracle_diff,
    oracle_status, simulated, stderr, z, sim_status, tail_mass
optimize
    p, q, p_s, eta, e_max, objective, family, feasible, p_a, q1, q2,
    objective_value, cost_rate, cost_binding
sweep (one file per metric: via, aoiv, aoii, p_e)
    sweep_var, value, policy, metric, analytic, simulated, stderr, cost, feasible
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import replace
from typing import Optional

import numpy as np

from . import analytic as an
from . import oracle, rng, sim
from .config import ConfigError, RunConfig, SimSettings, load
from .errors import DegenerateOptimum, DomainError, TruncationTooSmall
from .model import ChannelParams, SourceParams
from .optimizer import CostBudget, classify_fixed_policies, solve_mrsc, solve_mrsc_equal, solve_rsc, solve_via_rsc
from .policies import MRS, RS, ChangeAware, Policy, SemanticsAware, policy_name, policy_to_dict

TRACE_HEADER = list(sim.TRACE_COLUMNS)
VALIDATE_HEADER = [
    "point", "p", "q", "p_s", "policy", "metric", "closed_form", "oracle", "oracle_diff",
    "oracle_status", "simulated", "stderr", "z", "sim_status", "tail_mass",
]
OPTIMIZE_HEADER = [
    "p", "q", "p_s", "eta", "e_max", "objective", "family", "feasible", "p_a", "q1", "q2",
    "objective_value", "cost_rate", "cost_binding",
]
SWEEP_HEADER = ["sweep_var", "value", "policy", "metric", "analytic", "simulated", "stderr", "cost", "feasible"]
SWEEP_METRICS = ("via", "aoiv", "aoii", "p_e")
ORACLE_TOL = 1e-8
Z = 4.0

_REPORT_FIELD = {"via": "avg_via", "aoiv": "avg_aoiv", "aoii": "avg_aoii", "p_e": "p_e", "cost": "cost_rate"}
_SIM_FIELD = {"via": "avg_via", "aoiv": "avg_aoiv", "aoii": "avg_aoii", "p_e": "p_e_hat", "cost": "cost_rate_hat"}


def fmt(x) -> str:
    """CSV cell: 12 significant digits for floats, empty for missing values."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return f"{float(x):.12g}"


def _round12(obj):
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, float):
        return obj if not math.isfinite(obj) else float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    return obj


def _dump_json(obj) -> str:
    # inf has no JSON literal; spell it as a string
    def clean(o):
        if isinstance(o, float) and math.isinf(o):
            return "inf"
        if isinstance(o, dict):
            return {k: clean(v) for k, v in o.items()}
        if isinstance(o, list):
            return [clean(v) for v in o]
        return o

    return json.dumps(clean(_round12(obj)), indent=2)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def _emit(text: str, out: Optional[str]):
    if out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _delta(cfg: RunConfig) -> float:
    return cfg.budget.delta if cfg.budget is not None else 1.0


def _require_policy(cfg: RunConfig) -> Policy:
    if cfg.policy is None:
        raise ConfigError("this command needs a policy section")
    return cfg.policy


def _sim_settings(cfg: RunConfig, args) -> SimSettings:
    return _sim_settings_from(cfg.sim_settings, args)


# ---------------------------------------------------------------------------
# analytic


def analytic_payload(cfg: RunConfig) -> dict:
    policy = _require_policy(cfg)
    report = an.analytic_report(policy, cfg.source, cfg.channel, _delta(cfg))
    metrics, notices = {}, []
    for k, v in report.as_dict().items():
        if v is None:
            notices.append(f"{k}: no closed form for policy {policy_name(policy)}; simulation-only")
        elif math.isinf(v):
            notices.append(f"{k}: divergent")
        else:
            metrics[k] = v
    return {
        "policy": policy_to_dict(policy),
        "source": {"p": cfg.source.p, "q": cfg.source.q},
        "channel": {"p_s": cfg.channel.p_s},
        "delta": _delta(cfg),
        "metrics": metrics,
        "notices": notices,
    }


def cmd_analytic(cfg: RunConfig, args) -> int:
    payload = analytic_payload(cfg)
    if args.format == "csv":
        rows = [(k, v) for k, v in payload["metrics"].items()]
        _emit(_csv_text(["metric", "value"], rows), args.out)
    else:
        _emit(_dump_json(payload), args.out)
    for n in payload["notices"]:
        print(f"notice: {n}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# simulate / trace


def _sim_config(cfg: RunConfig, s: SimSettings, seed: Optional[int] = None) -> sim.SimConfig:
    return sim.SimConfig(
        cfg.source, cfg.channel, _require_policy(cfg),
        horizon=s.horizon, seed=s.seed if seed is None else seed, burn_in=s.burn_in, delta=_delta(cfg),
    )


def cmd_simulate(cfg: RunConfig, args) -> int:
    s = _sim_settings(cfg, args)
    sc = _sim_config(cfg, s)
    summary = sim.run_many(sc, s.reps)
    payload = {
        "policy": policy_to_dict(sc.policy),
        "horizon": s.horizon, "seed": s.seed, "reps": s.reps, "burn_in": s.burn_in,
        "summary": summary.as_dict(),
    }
    _emit(_dump_json(payload), args.out)
    if args.trace is not None:
        slots = min(s.horizon, args.trace_slots)
        _emit(_csv_text(TRACE_HEADER, sim.trace(sc, slots)), args.trace)
    return 0


def cmd_trace(cfg: RunConfig, args) -> int:
    # the dump length is --trace-slots; the horizon only matters to simulate
    seed = cfg.sim_settings.seed if args.seed is None else args.seed
    sc = _sim_config(cfg, cfg.sim_settings, seed=seed)
    _emit(_csv_text(TRACE_HEADER, sim.trace(sc, args.trace_slots)), args.out)
    return 0


# ---------------------------------------------------------------------------
# validate


def default_validation_grid() -> list[tuple[SourceParams, ChannelParams, Policy]]:
    pols = (RS(0.5), MRS(0.6, 1.0), ChangeAware(), SemanticsAware())
    return [
        (SourceParams(p, q), ChannelParams(ps), pol)
        for p in (0.2, 0.5, 0.8) for q in (0.2, 0.5, 0.8) for ps in (0.3, 0.9) for pol in pols
    ]


def _oracle_values(policy, source, channel, delta) -> dict:
    """Oracle value and tail mass (or None) per metric."""
    out = {
        "p_e": (oracle.reconstruction_error_oracle(policy, source, channel), None),
        "cost": (oracle.cost_rate_oracle(policy, source, channel, delta), None),
        "aoii": (oracle.aoii_average_oracle(policy, source, channel), None),
    }
    dist = oracle.aoiv_distribution(policy, source, channel)
    out["aoiv"] = (sum(k * w for (_, _, k), w in dist.items()), None)
    if isinstance(policy, (RS, ChangeAware)):
        try:
            pi, chain = oracle.via_distribution(policy, source, channel)
            out["via"] = (float(pi.sum(axis=0) @ np.arange(chain.truncation + 1)), chain.info["tail_mass"])
        except (DomainError, TruncationTooSmall):
            out["via"] = (None, None)
    return out


def validate_point(index: int, source, channel, policy, s: Optional[SimSettings], delta: float = 1.0) -> list[list]:
    report = an.analytic_report(policy, source, channel, delta).as_dict()
    orc = _oracle_values(policy, source, channel, delta)
    summary = checks = None
    if s is not None:
        sc = sim.SimConfig(source, channel, policy, horizon=s.horizon,
                           seed=rng.derive_seed(s.seed, index), burn_in=s.burn_in, delta=delta)
        summary = sim.run_many(sc, s.reps)
        checks = {c.metric: c for c in sim.compare(summary, an.AnalyticReport(**report), Z)}
    rows = []
    for metric in ("via", "aoiv", "aoii", "p_e", "cost"):
        closed = report[_REPORT_FIELD[metric]]
        if closed is not None and math.isinf(closed):
            closed = None
        o_val, tail = orc.get(metric, (None, None))
        if closed is not None and o_val is not None:
            diff = abs(closed - o_val)
            o_status = "pass" if diff <= ORACLE_TOL * max(1.0, abs(closed)) else "fail"
        else:
            diff, o_status = None, "n/a"
        sim_val = se = z = None
        sim_status = "skipped"
        if checks is not None:
            c = checks[_SIM_FIELD[metric]]
            sim_val, se, sim_status = c.simulated, c.stderr, c.status
            if c.analytic is not None and se:
                z = (c.simulated - c.analytic) / se
        rows.append([index, source.p, source.q, channel.p_s, policy_name(policy) + _policy_suffix(policy),
                     metric, closed, o_val, diff, o_status, sim_val, se, z, sim_status, tail])
    return rows


def _policy_suffix(policy) -> str:
    if isinstance(policy, RS):
        return f"({fmt(policy.p_a)})"
    if isinstance(policy, MRS):
        return f"({fmt(policy.q1)};{fmt(policy.q2)})"
    return ""


def cmd_validate(cfg: Optional[RunConfig], args) -> int:
    if cfg is not None and cfg.policy is not None:
        points = [(cfg.source, cfg.channel, cfg.policy)]
        base = cfg.sim_settings
        delta = _delta(cfg)
    else:
        points = default_validation_grid()
        base = cfg.sim_settings if cfg is not None else SimSettings()
        delta = _delta(cfg) if cfg is not None else 1.0
    s = None if args.skip_sim else _sim_settings_from(base, args)
    results = sim.map_ordered(lambda it: validate_point(it[0], *it[1], s, delta), list(enumerate(points)))
    rows = [r for block in results for r in block]
    _emit(_csv_text(VALIDATE_HEADER, rows), args.out)
    o_fail = sum(r[9] == "fail" for r in rows)
    s_fail = sum(r[13] == "fail" for r in rows)
    o_n = sum(r[9] != "n/a" for r in rows)
    s_n = sum(r[13] in ("pass", "fail") for r in rows)
    tails = [r[14] for r in rows if r[14] is not None]
    print(f"oracle checks: {o_n - o_fail}/{o_n} pass (tol {ORACLE_TOL:g})", file=sys.stderr)
    if s is not None:
        print(f"simulation checks: {s_n - s_fail}/{s_n} pass (z = {Z:g})", file=sys.stderr)
    if tails:
        print(f"VIA chain tail mass: max {max(tails):.3g}", file=sys.stderr)
    return 1 if (o_fail or s_fail) else 0


def _sim_settings_from(base: SimSettings, args) -> SimSettings:
    over = {k: getattr(args, k) for k in ("seed", "horizon", "reps") if getattr(args, k, None) is not None}
    try:
        return replace(base, **over)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


# ---------------------------------------------------------------------------
# optimize


def _opt_row(cfg: RunConfig, res) -> list:
    params = res.params or {}
    return [
        cfg.source.p, cfg.source.q, cfg.channel.p_s, cfg.budget.eta, cfg.e_max,
        res.objective, res.family, res.feasible, params.get("p_a"), params.get("q1"), params.get("q2"),
        res.objective_value, res.cost_rate, res.binding.get("cost") if isinstance(res.binding.get("cost"), bool) else None,
    ]


def optimize_point(cfg: RunConfig, grid_step: float = 0.005) -> list[list]:
    if cfg.budget is None:
        raise ConfigError("optimize needs a budget section")
    b, src, ch = cfg.budget, cfg.source, cfg.channel
    rows = []
    if cfg.e_max is not None:
        rows.append(_opt_row(cfg, solve_via_rsc(src, ch, b, cfg.e_max)))
        ca = classify_fixed_policies(src, ch, b, "via")["change_aware"]
        if ca.feasible and an.reconstruction_error(ChangeAware(), src, ch) > cfg.e_max + 1e-9:
            ca = replace(ca, feasible=False, objective_value=None)
        rows.append(_opt_row(cfg, ca))
    for obj in ("aoiv", "aoii"):
        rows.append(_opt_row(cfg, solve_rsc(obj, src, ch, b)))
        try:
            rows.append(_opt_row(cfg, solve_mrsc(obj, src, ch, b, grid_step)))
        except DegenerateOptimum:
            rows.append([src.p, src.q, ch.p_s, b.eta, cfg.e_max, obj, "mrsc", False] + [None] * 6)
        rows.append(_opt_row(cfg, solve_mrsc_equal(obj, src, ch, b)))
        fixed = classify_fixed_policies(src, ch, b, obj)
        for name in ("change_aware", "semantics_aware"):
            rows.append(_opt_row(cfg, fixed[name]))
    return rows


def table_configs() -> list[RunConfig]:
    budget = CostBudget.from_eta(0.5)
    return [
        RunConfig(SourceParams(p, q), ChannelParams(ps), budget=budget)
        for ps in (0.1, 0.9) for q in (0.2, 0.8) for p in (0.1, 0.3, 0.5, 0.7, 0.9)
    ]


def _sweep_points(cfg: RunConfig) -> list[RunConfig]:
    if cfg.sweep is None:
        return [cfg]
    return [cfg.with_value(cfg.sweep.variable, v) for v in cfg.sweep.values()]


def cmd_optimize(cfg: Optional[RunConfig], args) -> int:
    if args.preset == "tables":
        points = table_configs()
    else:
        if cfg is None:
            raise ConfigError("optimize needs --config or --preset tables")
        points = _sweep_points(cfg)
    blocks = sim.map_ordered(lambda c: optimize_point(c, args.grid_step), points)
    _emit(_csv_text(OPTIMIZE_HEADER, [r for b in blocks for r in b]), args.out)
    return 0


# ---------------------------------------------------------------------------
# sweep


def _sweep_policies(cfg: RunConfig, metric: str, grid_step: float) -> list[tuple[str, Optional[Policy], bool]]:
    """``(label, policy, feasible)`` entries compared at one sweep point for one metric."""
    out = []
    if cfg.policy is not None:
        out.append((policy_name(cfg.policy) + _policy_suffix(cfg.policy), cfg.policy, True))
    if cfg.budget is None:
        return out
    b, src, ch = cfg.budget, cfg.source, cfg.channel
    rs_ok = True
    if metric == "via" and cfg.e_max is not None:
        rs_ok = solve_via_rsc(src, ch, b, cfg.e_max).feasible
    out.append(("rsc", RS(b.eta), rs_ok))
    if metric in ("aoiv", "aoii"):
        try:
            r = solve_mrsc(metric, src, ch, b, grid_step)
            out.append(("mrsc", MRS(r.params["q1"], r.params["q2"]), True))
        except DegenerateOptimum:
            out.append(("mrsc", None, False))
        r = solve_mrsc_equal(metric, src, ch, b)
        out.append(("mrsc_equal", MRS(r.params["q1"], r.params["q2"]), True))
    fixed = classify_fixed_policies(src, ch, b)
    out.append(("change_aware", ChangeAware(), fixed["change_aware"].feasible))
    out.append(("semantics_aware", SemanticsAware(), fixed["semantics_aware"].feasible))
    return out


def sweep_point(cfg: RunConfig, index: int, value: float, s: Optional[SimSettings], grid_step: float) -> dict:
    """Rows per metric for one sweep value."""
    var = cfg.sweep.variable
    delta = _delta(cfg)
    cache = {}
    rows = {m: [] for m in SWEEP_METRICS}
    for metric in SWEEP_METRICS:
        for j, (label, pol, feasible) in enumerate(_sweep_policies(cfg, metric, grid_step)):
            if pol is None:
                rows[metric].append([var, value, label, metric, None, None, None, None, False])
                continue
            report = an.analytic_report(pol, cfg.source, cfg.channel, delta).as_dict()
            a_val = report[_REPORT_FIELD[metric]]
            sim_val = se = None
            if s is not None:
                if pol not in cache:
                    sc = sim.SimConfig(cfg.source, cfg.channel, pol, horizon=s.horizon,
                                       seed=rng.derive_seed(s.seed, 1000 * index + len(cache)),
                                       burn_in=s.burn_in, delta=delta)
                    cache[pol] = sim.run_many(sc, s.reps)
                summ = cache[pol]
                sim_val = getattr(summ, _SIM_FIELD[metric])
                se = summ.stderr.get(_SIM_FIELD[metric])
            rows[metric].append([var, value, label, metric, a_val, sim_val, se, report["cost_rate"], feasible])
    return rows


def cmd_sweep(cfg: Optional[RunConfig], args) -> int:
    if cfg is None or cfg.sweep is None:
        raise ConfigError("sweep needs a config with a sweep section")
    if cfg.policy is None and cfg.budget is None:
        raise ConfigError("sweep needs a policy or a budget section")
    values = cfg.sweep.values()
    points = [cfg.with_value(cfg.sweep.variable, v) for v in values]
    s = _sim_settings(cfg, args) if cfg.sweep.simulate else None
    blocks = sim.map_ordered(lambda it: sweep_point(it[1], it[0], values[it[0]], s, args.grid_step), list(enumerate(points)))
    per_metric = {m: [r for b in blocks for r in b[m]] for m in SWEEP_METRICS}
    if args.out is None:
        _emit(_csv_text(SWEEP_HEADER, [r for m in SWEEP_METRICS for r in per_metric[m]]), None)
    else:
        os.makedirs(args.out, exist_ok=True)
        for m in SWEEP_METRICS:
            _emit(_csv_text(SWEEP_HEADER, per_metric[m]), os.path.join(args.out, f"sweep_{m}.csv"))
    return 0


# ---------------------------------------------------------------------------


COMMANDS = {
    "analytic": cmd_analytic,
    "simulate": cmd_simulate,
    "validate": cmd_validate,
    "optimize": cmd_optimize,
    "sweep": cmd_sweep,
    "trace": cmd_trace,
}
_CONFIG_OPTIONAL = {"validate", "optimize"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="semvia", description="Semantics-aware sampling metrics for a binary Markov source.")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="JSON run configuration")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--horizon", type=int)
    parser.add_argument("--reps", type=int)
    parser.add_argument("--out", help="output file (directory for sweep)")
    parser.add_argument("--grid-step", type=float, default=0.005)
    parser.add_argument("--trace", nargs="?", const="trace.csv", default=None,
                        help="simulate: also write a per-slot trace CSV (default trace.csv)")
    parser.add_argument("--trace-slots", type=int, default=1000, help="slots in a trace dump")
    parser.add_argument("--dump-config", action="store_true", help="print the normalized config and exit")
    parser.add_argument("--preset", choices=["tables"], help="optimize: built-in table grid")
    parser.add_argument("--format", choices=["json", "csv"], default="json", help="analytic output format")
    parser.add_argument("--skip-sim", action="store_true", help="validate: closed form vs oracle only")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if not 0 < args.grid_step <= 0.1:
            raise ConfigError("--grid-step must lie in (0, 0.1]")
        if args.trace_slots < 1:
            raise ConfigError("--trace-slots must be positive")
        cfg = load(args.config) if args.config else None
        if args.dump_config:
            if cfg is None:
                raise ConfigError("--dump-config needs --config")
            _emit(cfg.to_json(), args.out)
            return 0
        if cfg is None and args.command not in _CONFIG_OPTIONAL:
            raise ConfigError(f"{args.command} needs --config")
        return COMMANDS[args.command](cfg, args)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    main_entry()
