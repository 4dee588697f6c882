"""Command-line experiment runner.

Every command reads an optional JSON config, runs one sweep and writes a
CSV (or JSON) table whose header records the config, its hash and the seed.
Output is a pure function of (config, seed): reruns are byte-identical
regardless of ``--parallel``.

Exit codes: 0 success, 1 validation failure, 2 config or scenario error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .analysis import KappaSearchError, ee_sweep, kappa_search, rate_crossing
from .config import ConfigError, ExperimentConfig, config_hash, load_config
from .rates import asymptotic_rate, closed_form_fr, closed_form_onebit, mc_moments
from .scenario import ScenarioError, build_scenario, db_to_linear
from .validation import FAIL, run_suite

__all__ = ["SweepResult", "cmd_rate_sweep", "cmd_antenna_sweep", "cmd_kappa", "cmd_ee",
           "cmd_validate", "main"]

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG = 0, 1, 2


@dataclass
class SweepResult:
    columns: list
    rows: list
    metadata: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key, value in self.metadata.items():
            buf.write(f"# {key}: {_meta_str(value)}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([_fmt(v) for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        rows = [{c: _json_value(v) for c, v in zip(self.columns, row)} for row in self.rows]
        doc = {"metadata": {k: _json_value(v) for k, v in self.metadata.items()},
               "columns": self.columns, "rows": rows}
        return json.dumps(doc, indent=2, allow_nan=True) + "\n"


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _meta_str(v):
    if isinstance(v, dict):
        return json.dumps(v, sort_keys=True, separators=(",", ":"))
    return _fmt(v)


def _json_value(v):
    if isinstance(v, np.generic):
        return v.item()
    return v


def _metadata(cfg: ExperimentConfig, command: str, **extra) -> dict:
    meta = {"command": command, "version": __version__, "seed": cfg.mc.seed,
            "config_hash": config_hash(cfg)}
    meta.update(extra)
    cfg_dict = cfg.to_dict()
    cfg_dict.pop("output")
    meta["config"] = cfg_dict
    return meta


def _mc_kwargs(cfg, parallel):
    mc = cfg.mc
    return dict(symbol_draws=mc.symbol_draws, symbols=mc.symbols, qn_method=mc.qn_method,
                transmit_gain=mc.transmit_gain, batches=mc.batches, parallel=parallel)


def _mc_columns(scenario, cfg, P_t_list, parallel):
    """Per-user MC rate and standard error per P_t, for both modes."""
    if cfg.mc.trials == 0:
        nan = [float("nan")] * len(P_t_list)
        return {m: (nan, nan) for m in ("mc-onebit", "mc-fr")}
    out = {}
    for mode in ("mc-onebit", "mc-fr"):
        mom = mc_moments(scenario, cfg.mc.trials, mode=mode, rng=cfg.mc.seed,
                         **_mc_kwargs(cfg, parallel))
        bds = [mom.rate_breakdown(p) for p in P_t_list]
        se = [float("nan") if b.per_user_se is None else b.per_user_se for b in bds]
        out[mode] = ([b.per_user for b in bds], se)
    return out


def cmd_rate_sweep(cfg: ExperimentConfig, parallel=1) -> SweepResult:
    """Per-user sum rate over the transmit-power grid at the configured M."""
    scenario = build_scenario(cfg)
    pts = [float(db_to_linear(p)) for p in cfg.power.pt_db]
    mc = _mc_columns(scenario, cfg, pts, parallel)
    rows = []
    for i, (p_db, P_t) in enumerate(zip(cfg.power.pt_db, pts)):
        rows.append([float(p_db),
                     closed_form_onebit(scenario, P_t=P_t).per_user,
                     closed_form_fr(scenario, P_t=P_t).per_user,
                     mc["mc-onebit"][0][i], mc["mc-onebit"][1][i],
                     mc["mc-fr"][0][i], mc["mc-fr"][1][i]])
    cols = ["pt_db", "cf_one", "cf_fr", "mc_one", "mc_one_se", "mc_fr", "mc_fr_se"]
    return SweepResult(cols, rows, _metadata(cfg, "rate-sweep", trials=cfg.mc.trials,
                                             M=cfg.scenario.M))


def cmd_antenna_sweep(cfg: ExperimentConfig, parallel=1) -> SweepResult:
    """Per-user sum rate over the antenna grid at ``analysis.fixed_pt_db``."""
    an = cfg.analysis
    P_t = float(db_to_linear(an.fixed_pt_db))
    base = build_scenario(cfg, P_t=P_t)
    limit = asymptotic_rate(base).per_user
    rows = []
    for M in an.m_grid:
        sc = base.with_constants(M=int(M))
        one = closed_form_onebit(sc).per_user
        fr = closed_form_fr(sc).per_user
        mc = _mc_columns(sc, cfg, [P_t], parallel)
        rows.append([int(M), one, fr, mc["mc-onebit"][0][0], mc["mc-onebit"][1][0],
                     mc["mc-fr"][0][0], mc["mc-fr"][1][0], limit, one / limit, fr / limit])
    extra = {"pt_db": an.fixed_pt_db, "trials": cfg.mc.trials, "rate_target": an.rate_target}
    for name, onebit in (("crossing_m_one", True), ("crossing_m_conv", False)):
        try:
            extra[name] = rate_crossing(base, an.rate_target, onebit)
        except KappaSearchError:
            extra[name] = float("nan")
    cols = ["m", "cf_one", "cf_fr", "mc_one", "mc_one_se", "mc_fr", "mc_fr_se",
            "asymptote", "frac_one", "frac_fr"]
    return SweepResult(cols, rows, _metadata(cfg, "antenna-sweep", **extra))


def cmd_kappa(cfg: ExperimentConfig, parallel=1) -> SweepResult:
    """Antenna ratio for every (M_conv, P_t) pair of the analysis grid."""
    an = cfg.analysis
    base = build_scenario(cfg)
    rows = []
    for m_conv in an.m_conv:
        for p_db in an.kappa_pt_db:
            r = kappa_search(base, float(m_conv), an.epsilon, P_t=float(db_to_linear(p_db)),
                             criterion=an.kappa_criterion)
            rows.append([float(m_conv), float(p_db), r.kappa, r.M_one, r.M_one_int,
                         r.achieved_gap])
    cols = ["m_conv", "pt_db", "kappa", "m_one", "m_one_int", "gap"]
    return SweepResult(cols, rows, _metadata(cfg, "kappa", epsilon=an.epsilon,
                                             criterion=an.kappa_criterion))


def cmd_ee(cfg: ExperimentConfig, parallel=1) -> SweepResult:
    """Energy efficiency of both architectures over the sampling-frequency grid."""
    an = cfg.analysis
    P_t = float(db_to_linear(an.fixed_pt_db))
    sc = build_scenario(cfg, P_t=P_t)
    fs = np.asarray(an.fs_mhz, dtype=float) * 1e6
    res = ee_sweep(sc, fs, M_conv=an.ee_m_conv, bits_fr=an.b_fr, bits_onebit=an.b_onebit,
                   P_RF=an.p_rf, amp_efficiency=an.amp_efficiency, P_t=P_t)
    rows = [[float(f), float(a), float(b)]
            for f, a, b in zip(an.fs_mhz, res.ee_onebit, res.ee_fr)]
    meta = _metadata(cfg, "ee", pt_db=an.fixed_pt_db, m_one=res.M_one, m_conv=res.M_conv,
                     crossover_mhz=res.crossover_fs / 1e6)
    return SweepResult(["fs_mhz", "ee_onebit", "ee_fr"], rows, meta)


def cmd_validate(cfg: ExperimentConfig, parallel=1) -> SweepResult:
    """Invariant suite; one row per check with its measured statistics."""
    sc = build_scenario(cfg, P_t=float(db_to_linear(cfg.analysis.fixed_pt_db)))
    kw = _mc_kwargs(cfg, parallel)
    kw.pop("parallel")
    checks = run_suite(sc, trials=cfg.mc.trials, seed=cfg.mc.seed, parallel=parallel, **kw)
    rows = [[c.name, c.status, json.dumps(c.stats, sort_keys=True)] for c in checks]
    passed = all(c.status != FAIL for c in checks)
    return SweepResult(["check", "status", "stats"], rows,
                       _metadata(cfg, "validate", passed=str(passed).lower()))


COMMANDS = {
    "rate-sweep": cmd_rate_sweep,
    "antenna-sweep": cmd_antenna_sweep,
    "kappa": cmd_kappa,
    "ee": cmd_ee,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="onebit-mimo", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        s = sub.add_parser(name, help=fn.__doc__.splitlines()[0])
        s.add_argument("--config", metavar="PATH", help="JSON config (defaults if omitted)")
        s.add_argument("--seed", type=int, help="root seed (overrides mc.seed)")
        s.add_argument("--out", metavar="PATH", help="output file (stdout if omitted)")
        s.add_argument("--format", choices=("csv", "json"), help="output format")
        s.add_argument("--trials", type=int, help="Monte-Carlo trials (overrides mc.trials)")
        s.add_argument("--parallel", type=int, default=1, metavar="N",
                       help="worker processes for Monte-Carlo batches")
    return p


def _resolve_config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    mc = {}
    if args.seed is not None:
        mc["seed"] = args.seed
    if args.trials is not None:
        if args.trials < 0:
            raise ConfigError("--trials: must be nonnegative")
        mc["trials"] = args.trials
    out = {}
    if args.format is not None:
        out["format"] = args.format
    if args.out is not None:
        out["path"] = args.out
    if args.parallel < 1:
        raise ConfigError("--parallel: must be at least 1")
    return cfg.with_overrides(mc=mc, output=out)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _resolve_config(args)
        result = COMMANDS[args.command](cfg, parallel=args.parallel)
    except (ConfigError, ScenarioError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    text = result.to_json() if cfg.output.format == "json" else result.to_csv()
    if cfg.output.path:
        with open(cfg.output.path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.command == "validate" and result.metadata.get("passed") != "true":
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
