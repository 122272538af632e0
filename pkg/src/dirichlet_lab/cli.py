"""Command-line entry point: ``dirichlet-lab <subcommand> [flags]``.

Exit codes: 0 when every verdict passes, 1 when at least one fails (the report
is still written), 2 for invalid input or configuration.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import __version__
from .norms import p_label, parse_p

log = logging.getLogger("dirichlet_lab")

SUBCOMMANDS = ("spectrum", "decay", "frac", "resolvent", "nell", "multiplier", "commutator",
               "ifunc", "all")
DOMAINS = {"rect": "rectangle", "rectangle": "rectangle", "disk": "disk",
           "lshape": "l_shape", "l_shape": "l_shape"}
REQUIRED = {
    "decay": ("ell",),
    "frac": ("alpha", "k"),
    "resolvent": ("M",),
    "nell": ("ell",),
    "multiplier": ("t",),
    "commutator": ("dim", "M", "ell"),
    "ifunc": ("k", "alpha"),
}


class ConfigError(ValueError):
    """Invalid flag or configuration value (exit code 2)."""


@dataclass
class RunConfig:
    """Resolved settings of one run; serialises to flat ``key = value`` text."""

    subcommand: str
    domain: str = "rect"
    n: int = 32
    refine: int | None = None
    ell: int | None = None
    k: int | None = None
    M: int | None = None
    alpha: float | None = None
    p: str = "inf"
    t: float | None = None
    tau: float = 1.0
    c: float = 1.0
    tmin: str = "auto"
    tmax: float = 0.5
    nt: int = 24
    dim: int | None = None
    seeds: int = 20
    seed: int = 0
    nquad: int = 512
    center: str = "0.5,0.5"
    radius: float = 0.2
    out: str | None = None
    format: str = "json"

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is not None:
                lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        values = parse_config_text(text)
        if "subcommand" not in values:
            raise ConfigError("config text lacks 'subcommand'")
        return cls(**coerce(values))

    def echo(self) -> dict:
        return {k: v for k, v in asdict(self).items() if k not in ("out", "format")}


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def parse_config_text(text: str) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for num, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {num}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _TYPES:
            raise ConfigError(f"config line {num}: unknown key {key!r}")
        out[key] = value
    return out


def coerce(values: dict) -> dict:
    out = {}
    for key, value in values.items():
        kind = str(_TYPES[key])
        if value is None or (isinstance(value, str) and value.lower() == "none"):
            out[key] = None
            continue
        try:
            if kind.startswith("int"):
                out[key] = int(value)
            elif kind.startswith("float"):
                out[key] = float(value)
            else:
                out[key] = str(value)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {value!r}") from exc
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dirichlet-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="flat key = value file; flags override it")
        sp.add_argument("--domain", choices=sorted(DOMAINS))
        sp.add_argument("--n", type=int)
        sp.add_argument("--refine", type=int, help="second grid size for refinement stability")
        sp.add_argument("--ell", type=int)
        sp.add_argument("--k", type=int)
        sp.add_argument("--M", type=int)
        sp.add_argument("--alpha", type=float)
        sp.add_argument("--p")
        sp.add_argument("--t", type=float)
        sp.add_argument("--tau", type=float)
        sp.add_argument("--c", type=float)
        sp.add_argument("--tmin")
        sp.add_argument("--tmax", type=float)
        sp.add_argument("--nt", type=int)
        sp.add_argument("--dim", type=int)
        sp.add_argument("--seeds", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--nquad", type=int)
        sp.add_argument("--center")
        sp.add_argument("--radius", type=float)
        sp.add_argument("--out")
        sp.add_argument("--format", choices=("json", "csv"))
        sp.add_argument("--no-timestamp", action="store_true")
    return parser


def resolve_config(ns: argparse.Namespace) -> RunConfig:
    values = {}
    if ns.config:
        try:
            with open(ns.config) as fh:
                values.update(parse_config_text(fh.read()))
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
    values = coerce(values)
    for f in fields(RunConfig):
        v = getattr(ns, f.name, None)
        if v is not None:
            values[f.name] = v
    values["subcommand"] = ns.subcommand
    missing = [k for k in REQUIRED.get(ns.subcommand, ()) if values.get(k) is None]
    if missing:
        raise ConfigError(f"{ns.subcommand}: missing required flag(s) "
                          + ", ".join("--" + k for k in missing))
    cfg = RunConfig(**values)
    if cfg.domain not in DOMAINS:
        raise ConfigError(f"unknown domain {cfg.domain!r}")
    try:
        parse_p(cfg.p)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.tmin != "auto":
        try:
            float(cfg.tmin)
        except ValueError as exc:
            raise ConfigError("--tmin must be 'auto' or a number") from exc
    return cfg


# ------------------------------------------------------------------ runners


def _lab(cfg: RunConfig, n: int | None = None):
    from .decay import SpectralLab

    return SpectralLab.build(DOMAINS[cfg.domain], n or cfg.n)


def _t_grid(cfg: RunConfig, h: float, alpha: float = 2.0, cubes: bool = False):
    from .decay import log_t_grid, resolution_floor

    tmin = resolution_floor(h, alpha, cubes) if cfg.tmin == "auto" else float(cfg.tmin)
    return log_t_grid(tmin, cfg.tmax, cfg.nt), tmin


def run_spectrum(cfg: RunConfig):
    from .decay import DecayReport
    from .laplacian import compare_spectra, dst_oracle_rectangle

    lab = _lab(cfg)
    report = DecayReport(config={"grid": lab.describe()})
    report.residuals = [{"index": i, "lambda": float(v)} for i, v in enumerate(lab.S.eigenvalues)]
    report.verdicts.append({"kind": "positivity", "lambda_1": lab.S.lambda_min,
                            "pass": bool(lab.S.lambda_min > 0)})
    if lab.grid.kind == "rectangle":
        cmp = compare_spectra(lab.S, dst_oracle_rectangle(lab.grid))
        report.verdicts.append({"kind": "oracle", **cmp,
                                "pass": bool(cmp["max_rel_eigenvalue_error"] <= 1e-9
                                             and cmp["max_subspace_angle"] <= 1e-6)})
    return report, ("index", "lambda")


def _rate_run(cfg: RunConfig, family: str, ell: int, alpha=None, M=None, ps=None):
    from .decay import (DecayReport, SLOPE_TOL, SLOPE_TOL_HIGH_ORDER, family_rate,
                        operator_decay_sweep, slope_fit, small_t_window)

    a = alpha if family == "frac" else 2.0
    ps = ps or [parse_p(cfg.p)]
    labs = [_lab(cfg)] + ([_lab(cfg, cfg.refine)] if cfg.refine else [])
    report = DecayReport(config={"run": cfg.echo()})
    sups = {}
    for lab in labs:
        t_grid, tmin = _t_grid(cfg, lab.h, a)
        report.config[f"tmin_n{lab.grid.n}"] = tmin
        rows = operator_decay_sweep(lab, ell, ps, family, t_grid, alpha=alpha, M=M)
        report.rows.extend(rows)
        for p in ps:
            pl = p_label(p)
            g_rows = [r for r in rows if r["p"] == pl]
            sups.setdefault(pl, []).append(max(r["scaled_ratio"] for r in g_rows))
            if family == "resolvent":
                continue
            window = small_t_window(lab.h, a)
            try:
                s, err = slope_fit(g_rows, window)
            except ValueError as exc:
                report.verdicts.append({"kind": "slope", "n": lab.grid.n, "p": pl,
                                        "error": str(exc), "pass": False})
                continue
            expected = -family_rate(family, ell, alpha)
            tol = SLOPE_TOL_HIGH_ORDER if ell >= 3 else SLOPE_TOL
            report.slopes.append({"n": lab.grid.n, "p": pl, "ell": ell, "window": list(window),
                                  "slope": s, "stderr": err, "expected": expected})
            report.verdicts.append({"kind": "slope", "n": lab.grid.n, "p": pl, "slope": s,
                                    "expected": expected, "tol": tol,
                                    "pass": bool(abs(s - expected) <= tol)})
    for pl, vals in sups.items():
        ratio = max(vals) / min(vals)
        report.verdicts.append({"kind": "stability", "p": pl, "sup_scaled": vals, "ratio": ratio,
                                "pass": bool(math.isfinite(ratio) and ratio <= 3.0)})
    return report, None


def run_decay(cfg):
    return _rate_run(cfg, "heat", cfg.ell)


def run_frac(cfg):
    if cfg.alpha <= 0:
        raise ConfigError("--alpha must be positive")
    return _rate_run(cfg, "frac", cfg.k, alpha=cfg.alpha)


def run_resolvent(cfg):
    ell = cfg.ell if cfg.ell is not None else 2 * cfg.M
    if ell > 2 * cfg.M:
        raise ConfigError(f"--ell {ell} exceeds 2M = {2 * cfg.M}")
    return _rate_run(cfg, "resolvent", ell, M=cfg.M, ps=[2.0])


def run_nell(cfg):
    from .decay import DecayReport, n_ell_report
    from .grid import bump_initial_data

    labs = [_lab(cfg)] + ([_lab(cfg, cfg.refine)] if cfg.refine else [])
    center = [float(v) for v in cfg.center.split(",")]
    report = DecayReport(config={"run": cfg.echo()})
    ratios = []
    for lab in labs:
        t_grid, _ = _t_grid(cfg, lab.h)
        try:
            u0 = bump_initial_data(lab.grid, center, cfg.radius)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        for ell in range(cfg.ell + 1):
            r = n_ell_report(lab, u0, ell, t_grid)
            report.residuals.append({"n": lab.grid.n, "ell": ell, "sup_ratio": r})
            if ell == cfg.ell:
                ratios.append(r)
    ok = all(math.isfinite(r) for r in ratios)
    if cfg.ell == 0:
        ok &= max(ratios) <= 1 + 1e-10
    if len(ratios) > 1:
        ok &= max(ratios) / min(ratios) <= 3.0
    report.verdicts.append({"kind": "n_ell", "ell": cfg.ell, "ratios": ratios, "pass": bool(ok)})
    return report, ("n", "ell", "sup_ratio")


def run_multiplier(cfg):
    from .calculus import multiplier_matrix, resolvent, unitary
    from .cubes import cube_partition, cube_report_rows, holder_cube_check
    from .decay import DecayReport
    from .derivatives import derivative_matrix
    from .grid import GridFunction, bump_initial_data

    lab = _lab(cfg)
    ell = cfg.ell if cfg.ell is not None else 1
    M = cfg.M if cfg.M is not None else 2
    alpha = cfg.alpha if cfg.alpha is not None else 1.0
    try:
        cube_partition(lab.grid, cfg.t)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    D = derivative_matrix(lab.grid, (ell,) + (0,) * (lab.grid.d - 1), lab.flavor)
    R = multiplier_matrix(lab.S, resolvent(cfg.t, M))
    T = D @ R @ multiplier_matrix(lab.S, unitary(cfg.tau, cfg.t, M))
    f = bump_initial_data(lab.grid, [float(v) for v in cfg.center.split(",")], cfg.radius)
    u = GridFunction(lab.grid, D @ (R @ f.values))
    report = DecayReport(config={"run": cfg.echo(), "operator": "d^ell R_{M,t} exp(i tau R_{M,t})",
                                 "field": "d^ell R_{M,t} f, f bump"})
    report.residuals = cube_report_rows(u, T, alpha, cfg.t)
    lhs, rhs, ok = holder_cube_check(u, cfg.t)
    report.verdicts.append({"kind": "holder_cube", "lhs": lhs, "rhs": rhs, "pass": ok})
    return report, ("cube", "l2_block_norm", "weighted_norm")


def run_commutator(cfg):
    from .commutators import check_resolvent_commutator, check_unitary_commutator
    from .decay import DecayReport

    report = DecayReport(config={"run": cfg.echo()})
    worst = 0.0
    for s in range(cfg.seeds):
        rng = np.random.default_rng([cfg.seed, s])
        B = rng.standard_normal((cfg.dim, cfg.dim))
        A = B @ B.T / cfg.dim
        x = rng.standard_normal(cfg.dim)
        for t in (0.1, 1.0):
            res = check_resolvent_commutator(A, x, cfg.M, cfg.ell, t)
            worst = max(worst, res)
            report.residuals.append({"check": "resolvent_commutator", "seed": s, "t": t,
                                     "M": cfg.M, "ell": cfg.ell, "residual": res})
    report.verdicts.append({"kind": "resolvent_commutator", "max_residual": worst,
                            "tol": 1e-10, "pass": bool(worst <= 1e-10)})
    if cfg.k is not None:
        rng = np.random.default_rng([cfg.seed, 10**6])
        B = rng.standard_normal((cfg.dim, cfg.dim))
        A = B @ B.T / cfg.dim
        x = rng.standard_normal(cfg.dim)
        res = check_unitary_commutator(A, x, cfg.M, 0.5, cfg.tau, cfg.k, cfg.nquad)
        report.residuals.append({"check": "duhamel", "seed": 0, "t": 0.5, "M": cfg.M,
                                 "ell": cfg.k, "residual": res})
        report.verdicts.append({"kind": "duhamel", "residual": res, "tol": 1e-7,
                                "pass": bool(res <= 1e-7)})
    return report, ("check", "seed", "t", "M", "ell", "residual")


def run_ifunc(cfg):
    from .decay import DecayReport, i_function, i_function_max

    report = DecayReport(config={"run": cfg.echo()})
    worst = 0.0
    for t in ((cfg.t,) if cfg.t is not None else (0.1, 0.37, 0.9)):
        a, b = i_function(t, cfg.k, cfg.alpha, cfg.c), i_function(2**cfg.alpha * t, cfg.k, cfg.alpha, cfg.c)
        rel = abs(b - a) / a
        worst = max(worst, rel)
        report.residuals.append({"t": t, "I_t": a, "I_scaled": b, "rel_diff": rel})
    mx = i_function_max(cfg.k, cfg.alpha, cfg.c)
    report.verdicts.append({"kind": "scaling", "max_rel_diff": worst, "pass": bool(worst <= 1e-10)})
    report.verdicts.append({"kind": "boundedness", **mx, "pass": bool(math.isfinite(mx["max"]))})
    return report, ("t", "I_t", "I_scaled", "rel_diff")


def run_all(cfg):
    from .decay import DecayReport

    report = DecayReport(config={"run": cfg.echo()})
    plans = [
        ("spectrum", {"n": min(cfg.n, 16)}),
        ("decay", {"n": 32, "ell": 1, "tmax": 0.3, "nt": 16}),
        ("frac", {"n": 32, "alpha": 3.0, "k": 1, "tmax": 0.005, "nt": 16}),
        ("resolvent", {"n": 24, "M": 2, "ell": 2, "p": "2", "nt": 12}),
        ("nell", {"n": 24, "ell": 2, "nt": 12}),
        ("multiplier", {"n": 24, "t": 0.05}),
        ("commutator", {"dim": 8, "M": 3, "ell": 3, "seeds": 5, "k": 1, "tau": 1.0, "nquad": 64}),
        ("ifunc", {"k": 1, "alpha": 2.0}),
    ]
    for name, over in plans:
        base = {f.name: getattr(RunConfig(subcommand=name), f.name) for f in fields(RunConfig)}
        base.update({"seed": cfg.seed, "subcommand": name, **over})
        sub, _ = RUNNERS[name](RunConfig(**base))
        report.merge(sub, prefix=name)
    return report, None


RUNNERS = {
    "spectrum": run_spectrum, "decay": run_decay, "frac": run_frac, "resolvent": run_resolvent,
    "nell": run_nell, "multiplier": run_multiplier, "commutator": run_commutator,
    "ifunc": run_ifunc, "all": run_all,
}


def render(report, columns, fmt: str, timestamp: str | None) -> str:
    if fmt == "json":
        return report.to_json(timestamp) + "\n"
    if columns is None:
        return report.to_csv()
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in report.residuals:
        w.writerow([repr(r[c]) if isinstance(r[c], float) else r[c] for c in columns])
    return buf.getvalue()


def run(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve_config(ns)
        report, columns = RUNNERS[cfg.subcommand](cfg)
    except (ConfigError, ValueError) as exc:
        parser.print_usage(sys.stderr)
        print(f"dirichlet-lab: error: {exc}", file=sys.stderr)
        return 2
    stamp = None if ns.no_timestamp else _dt.datetime.now(_dt.timezone.utc).isoformat()
    text = render(report, columns, cfg.format, stamp)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for v in report.verdicts:
        log.info("%s: %s", v.get("kind"), "pass" if v["pass"] else "FAIL")
    return 0 if report.passed else 1


def main() -> None:
    logging.basicConfig(level=logging.WARNING, format="%(message)s")
    sys.exit(run())


if __name__ == "__main__":
    main()
