"""Command-line entry point: ``carleman-lab <subcommand> <config.json>``.

Each run writes delimited results (CSV/JSON), a long-format plot table
(``x, y, series``) and PNG figures into ``output.dir``.  Exit status is 0 on
success, 2 for configuration errors and 3 for numerical failures; failures
also print a JSON object ``{"error": ..., "message": ...}`` on stdout.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import plotting
from .bank import elliptic_bank, parabolic_bank
from .carleman import elliptic_sweep, parabolic_sweep
from .config import ExperimentConfig, geometric_sequence, load_config
from .errors import CarlemanLabError, ConfigInvalid
from .geometry import INNER, OUTER, GridDomain, build_annulus
from .oracles import run_all
from .reporting import dumps, write_csv, write_json, write_plot_csv
from .riemannian import MetricField, PotentialField
from .solvers.elliptic import extract_cauchy, radial_derivative_on
from .solvers.parabolic import ParabolicProblem, solve_parabolic
from .stability import (AdmissibleSpec, EllipticSetup, ParabolicAdmissibleSpec, ParabolicSetup, SeparableData,
                        TrigPoly, elliptic_ratio, parabolic_ratio, run_parabolic_study, run_study)
from .weights import EllipticWeight, build_parabolic_weight, build_radial_weight

SWEEP_COLUMNS = ["test_id", "s", "gamma", "lhs_interior", "lhs_upsilon", "rhs_pde", "rhs_pi", "rhs_tau", "ratio",
                 "flag"]
STABILITY_COLUMNS = ["sample_id", "h1_S", "h1_Gamma", "l2_dn_Gamma", "ratio"]


# ------------------------------------------------------------------ helpers


def _carleman_domain(geo: dict, factor: int = 1) -> GridDomain:
    if geo.get("kind") != "annulus":
        raise ConfigInvalid("Carleman verification needs geometry.kind = 'annulus'")
    ups = geo["upsilon"]
    other = OUTER if ups == INNER else INNER
    return build_annulus(geo["r_inner"], geo["r_outer"], geo["n_r"] * factor, geo["n_theta"] * factor,
                         {ups: "S", other: "Gamma"})


def _select(bank, wanted):
    if wanted is None:
        return bank
    known = {b.id: b for b in bank}
    missing = [w for w in wanted if w not in known]
    if missing:
        raise ConfigInvalid(f"carleman/bank: unknown test functions {missing}; known {sorted(known)}")
    return [known[w] for w in wanted]


def _sweep_outputs(cfg: ExperimentConfig, res, refined, title: str) -> dict:
    paths = {"sweep_csv": write_csv(cfg.out("sweep", "csv"), res.rows(), SWEEP_COLUMNS)}
    summary = res.summary()
    if refined is not None:
        paths["sweep_refined_csv"] = write_csv(cfg.out("sweep_refined", "csv"), refined.rows(), SWEEP_COLUMNS)
        summary["refined"] = refined.summary()
        if res.c_emp is not None and refined.c_emp is not None:
            summary["C_emp_rel_change"] = abs(refined.c_emp - res.c_emp) / res.c_emp
    summary["config"] = cfg.echo()
    paths["summary_json"] = write_json(cfg.out("summary", "json"), summary)
    series = {}
    ratios = res.ratios
    for m, tid in enumerate(res.test_ids):
        for a, gam in enumerate(res.gamma_grid):
            series[f"{tid} gamma={gam:g}"] = (res.s_grid, ratios[m, a])
    paths["plot_csv"] = write_plot_csv(cfg.out("sweep_plot", "csv"), series)
    if cfg["output"]["figures"]:
        paths["figure"] = plotting.line_figure(cfg.out("sweep", "png"), series, "s", "lhs / rhs", title,
                                               logx=True, logy=True, hline=res.c_emp)
    return {"summary": {k: summary.get(k) for k in ("gamma_star", "s_star", "C_emp", "stable",
                                                    "C_emp_rel_change")}, "paths": paths}


def _report_outputs(cfg: ExperimentConfig, rep, extra_series: dict | None = None) -> dict:
    paths = {"samples_csv": write_csv(cfg.out("samples", "csv"), rep.rows(), STABILITY_COLUMNS)}
    body = rep.to_dict()
    body["config"] = cfg.echo()
    paths["report_json"] = write_json(cfg.out("report", "json"), body)
    ratios = np.array([r.ratio for r in rep.records], dtype=float)
    series = {"ratio (sorted)": (np.arange(ratios.size), np.sort(ratios))}
    series.update(extra_series or {})
    paths["plot_csv"] = write_plot_csv(cfg.out("ratios_plot", "csv"), series)
    if cfg["output"]["figures"] and np.isfinite(ratios).any():
        paths["figure"] = plotting.ratio_figure(cfg.out("ratios", "png"), ratios, rep.kind)
    return {"summary": rep.aggregate, "paths": paths}


def _elliptic_setup(cfg: ExperimentConfig, geo: dict) -> EllipticSetup:
    pot, sol = cfg["potential"], cfg["solver"]
    preset = cfg.metric_preset()
    if geo["kind"] == "disk":
        return EllipticSetup.interior(geo["r_outer"], geo["r_gamma"], geo["n_r"], geo["n_theta"], preset,
                                      pot["value"], sol["tol"])
    if geo["kind"] == "exterior":
        return EllipticSetup.exterior(geo["r_inner"], geo["r_gamma"], geo.get("n_gamma", 32), geo["n_theta"],
                                      preset, pot["value"], pot["eta"] or None, sol["R_inf"],
                                      sol["truncation_tol"], sol["tol"])
    raise ConfigInvalid("stability/solve need geometry.kind 'disk' (interior) or 'exterior'")


def _parabolic_setup(cfg: ExperimentConfig) -> ParabolicSetup:
    geo, sol = cfg["geometry"], cfg["solver"]
    if geo["kind"] != "disk":
        raise ConfigInvalid("the parabolic problem needs geometry.kind = 'disk'")
    return ParabolicSetup.disk(geo["r_outer"], geo["r_gamma"], geo["n_r"], geo["n_theta"], sol["n_t"], sol["T"],
                               cfg.metric_preset(), sol["parabolic_tol"])


def _trig(d: dict) -> TrigPoly:
    return TrigPoly(d["c0"], tuple(d.get("cos", ())), tuple(d.get("sin", ())))


# ------------------------------------------------------------------ subcommands


def cmd_verify_carleman(cfg: ExperimentConfig) -> dict:
    geo, w_cfg = cfg["geometry"], cfg["weight"]
    s_grid, g_grid = geometric_sequence(w_cfg["s"]), geometric_sequence(w_cfg["gamma"])
    pot = cfg["potential"]

    def run(factor):
        dom = _carleman_domain(geo, factor)
        g = MetricField.sample(dom, cfg.metric_preset())
        p = PotentialField.constant(dom, pot["value"], pot["eta"])
        w = EllipticWeight.radial(dom, geo["upsilon"], g_grid[0], s_grid[0], w_cfg["delta_min"])
        bank = [(b.id, b.sample(dom)) for b in _select(elliptic_bank(dom), cfg["carleman"]["bank"])]
        return elliptic_sweep(bank, w, g, p, s_grid, g_grid, slack=cfg["carleman"]["slack"], workers=cfg.threads)

    res = run(1)
    refined = run(2) if cfg["carleman"]["refine"] else None
    return _sweep_outputs(cfg, res, refined, "elliptic Carleman sweep")


def cmd_verify_parabolic(cfg: ExperimentConfig) -> dict:
    geo, w_cfg = cfg["geometry"], cfg["weight"]
    s_grid, g_grid = geometric_sequence(w_cfg["s"]), geometric_sequence(w_cfg["gamma"])
    T = cfg["solver"]["T"]

    def run(factor):
        dom = _carleman_domain(geo, factor)
        g = MetricField.sample(dom, cfg.metric_preset())
        w = build_parabolic_weight(build_radial_weight(dom, geo["upsilon"]), T, w_cfg["n_t"] * factor,
                                   g_grid[0], s_grid[0])
        bank = [(b.id, b.sample_space_time(dom, w.t)) for b in _select(parabolic_bank(), cfg["carleman"]["bank"])]
        return parabolic_sweep(bank, w, g, s_grid, g_grid, slack=cfg["carleman"]["slack"], workers=cfg.threads)

    res = run(1)
    refined = run(2) if cfg["carleman"]["refine"] else None
    return _sweep_outputs(cfg, res, refined, "parabolic Carleman sweep")


def cmd_solve(cfg: ExperimentConfig) -> dict:
    sv = cfg["solve"]
    data = _trig(sv["data"])
    paths = {}
    if sv["problem"] == "parabolic":
        setup = _parabolic_setup(cfg)
        g = SeparableData(tuple(sv["g0"]), data, setup.T)
        dom, th, t = setup.domain, setup.theta, setup.t
        u0 = setup.harmonic_extension(g.values(0.0, th))
        u = solve_parabolic(ParabolicProblem(dom, setup.metric, setup.T, setup.n_t, u0,
                                             lambda s: g.values(s, th), tol=setup.tol))
        ring = dom.ring_index(setup.r_gamma)
        dn = np.stack([radial_derivative_on(u.at(k), ring) for k in range(t.size)])
        rows = [{"t": t[k], "theta": th[j], "trace": u.values[k, ring, j], "normal_deriv": dn[k, j]}
                for k in range(t.size) for j in range(th.size)]
        paths["cauchy_csv"] = write_csv(cfg.out("cauchy", "csv"), rows, ["t", "theta", "trace", "normal_deriv"])
        final = u.values[-1]
        rec = parabolic_ratio(g, cfg["study"]["eps"] or setup.T / 4, setup)
        summary = {"problem": "parabolic", "ratio": rec.ratio, "h1_S": rec.h1_S, "h1_Gamma": rec.h1_Gamma,
                   "l2_dn_Gamma": rec.l2_dn_Gamma, "corollary_ratio": rec.extra["corollary_ratio"]}
        series = {"trace(T)": (th, u.values[-1, ring]), "normal_deriv(T)": (th, dn[-1])}
    else:
        setup = _elliptic_setup(cfg, cfg["geometry"])
        dom, th = setup.domain, setup.theta
        u = setup.solve(data(th))
        cd = extract_cauchy(u, setup.gamma_curve)
        rows = [{"theta": th[j], "trace": cd.trace[j], "normal_deriv": cd.normal_deriv[j]} for j in range(th.size)]
        paths["cauchy_csv"] = write_csv(cfg.out("cauchy", "csv"), rows, ["theta", "trace", "normal_deriv"])
        final = u.values
        rec = elliptic_ratio(data, setup)
        summary = {"problem": setup.kind, "ratio": rec.ratio, **cd.norms, "h1_S": rec.h1_S}
        series = {"trace": (th, cd.trace), "normal_deriv": (th, cd.normal_deriv)}
    frows = [{"r": dom.r[i], "theta": dom.theta[j], "value": final[i, j]}
             for i in range(dom.n_r + 1) for j in range(dom.n_theta)]
    paths["field_csv"] = write_csv(cfg.out("field", "csv"), frows, ["r", "theta", "value"])
    paths["summary_json"] = write_json(cfg.out("summary", "json"), {**summary, "config": cfg.echo()})
    paths["plot_csv"] = write_plot_csv(cfg.out("cauchy_plot", "csv"), series)
    if cfg["output"]["figures"]:
        paths["figure"] = plotting.line_figure(cfg.out("cauchy", "png"), series, "theta", "value on Gamma",
                                               "Cauchy data on Gamma")
    return {"summary": summary, "paths": paths}


def cmd_stability(cfg: ExperimentConfig) -> dict:
    adm, st = cfg["admissible"], cfg["study"]
    setup = _elliptic_setup(cfg, cfg["geometry"])
    spec = AdmissibleSpec(adm["alpha"], adm["beta"], adm["fourier_degree"], adm["seed"])
    rep = run_study(spec, setup, st["count"], st["refine"], cfg.threads)
    return _report_outputs(cfg, rep)


def cmd_parabolic_stability(cfg: ExperimentConfig) -> dict:
    adm, st = cfg["admissible"], cfg["study"]
    setup = _parabolic_setup(cfg)
    spec = ParabolicAdmissibleSpec(adm["alpha"], adm["beta"], adm["u0_profile"], adm["time_degree"],
                                   adm["fourier_degree"], adm["seed"])
    eps = st["eps"] if st["eps"] is not None else setup.T / 4
    rep = run_parabolic_study(spec, setup, st["count"], eps, st["refine"], cfg.threads)
    cor = np.array([r.extra.get("corollary_ratio", math.nan) for r in rep.records], dtype=float)
    return _report_outputs(cfg, rep, {"corollary ratio (sorted)": (np.arange(cor.size), np.sort(cor))})


def cmd_oracle_check(cfg: ExperimentConfig) -> dict:
    results = run_all()
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: value={r.value:.10g} reference={r.reference:.10g} "
              f"error={r.error:.3g} tol={r.tol:g}", file=sys.stderr)
    rows = [r.row() for r in results]
    paths = {"oracles_csv": write_csv(cfg.out("oracles", "csv"), rows,
                                      ["name", "value", "reference", "error", "tol", "passed"]),
             "oracles_json": write_json(cfg.out("oracles", "json"), {"checks": rows})}
    failed = [r.name for r in results if not r.passed]
    return {"summary": {"checks": len(results), "failed": failed}, "paths": paths, "ok": not failed}


COMMANDS = {
    "verify-carleman": cmd_verify_carleman,
    "verify-parabolic": cmd_verify_parabolic,
    "solve": cmd_solve,
    "stability": cmd_stability,
    "parabolic-stability": cmd_parabolic_stability,
    "oracle-check": cmd_oracle_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="carleman-lab",
                                     description="Carleman inequalities and stability constants on polar grids")
    parser.add_argument("command", choices=sorted(COMMANDS), help="experiment to run")
    parser.add_argument("config", nargs="?", help="JSON config (optional for oracle-check)")
    return parser


def _fail(err: CarlemanLabError, status: int) -> int:
    print(json.dumps(err.to_dict(), sort_keys=True))
    return status


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config is None:
            if args.command != "oracle-check":
                raise ConfigInvalid(f"{args.command} needs a config file")
            from .config import parse_config
            cfg = parse_config({}, args.command)
        else:
            cfg = load_config(args.config, args.command)
        result = COMMANDS[args.command](cfg)
    except ConfigInvalid as err:
        return _fail(err, 2)
    except CarlemanLabError as err:
        return _fail(err, 3)
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as err:
        print(json.dumps({"error": type(err).__name__, "message": str(err)}, sort_keys=True))
        return 3
    out = {"command": args.command, "summary": result["summary"],
           "outputs": {k: str(v) for k, v in result["paths"].items()}}
    print(dumps(out))
    return 0 if result.get("ok", True) else 3


if __name__ == "__main__":
    sys.exit(main())
