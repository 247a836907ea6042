"""Configuration-driven experiment runner.

Each experiment reads a TOML config, drives the library deterministically,
writes one CSV (17 significant digits, LF endings, a schema comment line),
and evaluates declared thresholds.  Exit status: 0 when every declared
threshold passes, 1 on a threshold failure, 2 on a configuration or
runtime error.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass, field

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

import numpy as np

from .catalog import family_from_spec, sample_interior, shipped_families
from .domains import Domain, Mobius
from .entire import (entire_from_text, fix_diagonal, periodic_map,
                     shift_arguments, sup_grid_residual, time_one)
from .flow import average, co_metric, default_exhaustion, invariant_target, \
    orbit_stats, periodicity_residual
from .maps import MapClass, check_class
from .rigidity import rigidity_residual
from .schwarz import defect_many
from .dim2 import equivariance_residual

EXPERIMENTS = ("flow-orbit", "average-convergence", "defect-scan",
               "equivariance", "rigidity", "entire-demo", "periodicity")

CSV_SCHEMA_VERSION = 1


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    experiment: str
    family_spec: str
    params: dict
    csv_name: str
    seed: int
    thresholds: dict
    raw: dict = field(repr=False, default_factory=dict)


@dataclass
class RunReport:
    config: ExperimentConfig
    rows: list
    columns: tuple
    threshold_results: list   # (name, passed, detail)
    duration_s: float

    @property
    def passed(self):
        return all(ok for _, ok, _ in self.threshold_results)


_DEFAULTS = {
    "r_ladder": [25.0, 50.0, 100.0, 200.0, 400.0],
    "epsilon": 0.05,
    "samples": 2001,
    "depth": 6,
    "quad_panels": 512,
    "tol": 1e-9,
    "points": 10000,
    "period": 1.0,
}

_POSITIVE_PARAMS = ("epsilon", "samples", "depth", "quad_panels", "tol",
                    "points", "period")


def _split_family(spec):
    spec = spec.strip()
    if "(" in spec:
        if not spec.endswith(")"):
            raise ConfigError(f"malformed family spec {spec!r}")
        name, args = spec.split("(", 1)
        return name, args[:-1]
    return spec, ""


def parse_config(text):
    """Parse and validate a config document; fills defaults, builds the
    family, and class-checks it where the experiment demands membership."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as err:
        raise ConfigError(f"config parse error: {err}") from err

    experiment = doc.get("experiment")
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {experiment!r}")

    family_spec = doc.get("family", {}).get("spec", "mean")
    params = dict(_DEFAULTS)
    params.update(doc.get("params", {}))
    for key in _POSITIVE_PARAMS:
        value = params[key]
        if not isinstance(value, (int, float)) or value <= 0:
            raise ConfigError(f"parameter {key} must be positive, got {value!r}")
    ladder = params["r_ladder"]
    if not ladder or any(r <= 0 for r in ladder):
        raise ConfigError("r_ladder entries must be positive")
    if sorted(ladder) != list(ladder):
        raise ConfigError("r_ladder must be nondecreasing")

    csv_name = doc.get("output", {}).get("csv")
    if not csv_name:
        csv_name = experiment.replace("-", "_") + ".csv"
    seed = int(doc.get("seed", 0))
    thresholds = dict(doc.get("thresholds", {}))

    cfg = ExperimentConfig(experiment, family_spec, params, csv_name, seed,
                           thresholds, raw=doc)

    # experiments that flow or average the family need class membership;
    # the catalog keyword expands inside the experiment body instead
    if experiment in ("flow-orbit", "average-convergence", "periodicity") \
            and family_spec != "catalog":
        name, args = _split_family(family_spec)
        f = family_from_spec(name, args)
        wanted = MapClass.UNIFORM if experiment != "periodicity" else MapClass.DIAGONAL
        report = check_class(f, wanted, tol=max(params["tol"], 1e-9))
        if not report.passed:
            raise ConfigError(
                f"family {family_spec!r} fails the {wanted.value} class check: "
                f"diag residual {report.max_diag_residual:.3e}, "
                f"deriv residual {report.max_deriv_residual:.3e}")
    return cfg


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    if isinstance(value, int):
        return str(value)
    return str(value)


def _write_csv(path, columns, rows, cfg):
    tmp = path + ".tmp"
    try:
        with open(tmp, "w", newline="\n") as fh:
            echo = (f"# polyflow-csv v{CSV_SCHEMA_VERSION}; experiment={cfg.experiment}; "
                    f"family={cfg.family_spec}; seed={cfg.seed}")
            fh.write(echo + "\n")
            fh.write(",".join(columns) + "\n")
            for row in rows:
                fh.write(",".join(_fmt(v) for v in row) + "\n")
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise
    os.replace(tmp, path)


# --- experiment bodies -----------------------------------------------------

def _exp_flow_orbit(cfg):
    name, args = _split_family(cfg.family_spec)
    f = family_from_spec(name, args)
    ex = default_exhaustion(f.arity, depth=int(cfg.params["depth"]))
    target = invariant_target(f)
    columns = ("r", "epsilon", "n_samples", "fraction_within",
               "min_distance", "max_distance")
    rows = []
    fractions = []
    for r in cfg.params["r_ladder"]:
        stats = orbit_stats(f, target, float(r), float(cfg.params["epsilon"]),
                            n_samples=int(cfg.params["samples"]), exhaustion=ex)
        dists = stats.distances()
        rows.append((float(r), stats.epsilon, len(stats.samples),
                     stats.fraction_within, float(dists.min()), float(dists.max())))
        fractions.append(stats.fraction_within)
    checks = []
    if "final_fraction_min" in cfg.thresholds:
        bound = float(cfg.thresholds["final_fraction_min"])
        ok = fractions[-1] >= bound
        checks.append(("final_fraction_min", ok,
                       f"fraction {fractions[-1]:.4f} vs bound {bound}"))
    slack = float(cfg.thresholds.get("monotone_slack", 0.02))
    drops = [max(0.0, fractions[k] - fractions[k + 1]) for k in range(len(fractions) - 1)]
    worst = max(drops) if drops else 0.0
    checks.append(("monotone_within_slack", worst <= slack,
                   f"worst drop {worst:.4f} vs slack {slack}"))
    return columns, rows, checks


def _exp_average_convergence(cfg):
    name, args = _split_family(cfg.family_spec)
    f = family_from_spec(name, args)
    ex = default_exhaustion(f.arity, depth=int(cfg.params["depth"]))
    target = invariant_target(f)
    columns = ("r", "quad_panels", "distance_to_target")
    rows = []
    for r in cfg.params["r_ladder"]:
        dist = co_metric(average(f, float(r), int(cfg.params["quad_panels"])), target, ex)
        rows.append((float(r), int(cfg.params["quad_panels"]), dist))
    dists = [row[2] for row in rows]
    checks = []
    if cfg.thresholds.get("require_strict_decrease", False):
        ok = all(b < a for a, b in zip(dists, dists[1:]))
        checks.append(("strict_decrease", ok, f"distances {dists}"))
    if "final_distance_max" in cfg.thresholds:
        bound = float(cfg.thresholds["final_distance_max"])
        checks.append(("final_distance_max", dists[-1] <= bound,
                       f"distance {dists[-1]:.6f} vs bound {bound}"))
    return columns, rows, checks


_HIST_EDGES = (-np.inf, -1e-9, 0.0, 1e-9, 1e-6, 1e-3, 1e-2, 1e-1, 1.0, np.inf)


def _exp_defect_scan(cfg):
    count = int(cfg.params["points"])
    tol = float(cfg.params["tol"])
    if cfg.family_spec == "catalog":
        families = shipped_families()
    else:
        name, args = _split_family(cfg.family_spec)
        families = [(cfg.family_spec, family_from_spec(name, args))]
    columns = ("family", "bin_lo", "bin_hi", "count", "min_defect",
               "max_defect", "class_diag_residual", "class_deriv_residual",
               "class_passed")
    rows = []
    worst_floor = np.inf
    worst_cap = 0.0
    all_class_ok = True
    for idx, (label, f) in enumerate(families):
        pts = sample_interior(f.domain, f.arity, count, seed=cfg.seed + idx)
        defects = defect_many(f, tuple(pts))
        report = check_class(f, MapClass.UNIFORM, tol=tol)
        hist, _ = np.histogram(defects, bins=np.array(_HIST_EDGES))
        lo = float(np.min(defects))
        hi = float(np.max(defects))
        worst_floor = min(worst_floor, lo)
        worst_cap = max(worst_cap, hi)
        all_class_ok = all_class_ok and report.passed
        for k, c in enumerate(hist):
            rows.append((label, _HIST_EDGES[k], _HIST_EDGES[k + 1], int(c), lo, hi,
                         report.max_diag_residual, report.max_deriv_residual,
                         report.passed))
    checks = []
    if "defect_floor" in cfg.thresholds:
        bound = float(cfg.thresholds["defect_floor"])
        checks.append(("defect_floor", worst_floor >= bound,
                       f"min defect {worst_floor:.3e} vs floor {bound}"))
    if "defect_abs_max" in cfg.thresholds:
        bound = float(cfg.thresholds["defect_abs_max"])
        worst = max(abs(worst_floor), abs(worst_cap))
        checks.append(("defect_abs_max", worst <= bound,
                       f"max |defect| {worst:.3e} vs bound {bound}"))
    if cfg.thresholds.get("class_required", False):
        checks.append(("class_required", all_class_ok, "uniform-class membership"))
    return columns, rows, checks


def _equivariance_pairs():
    """100 deterministic (gamma, boundary angle) pairs."""
    gammas = []
    for t in (-2.0, -0.5, 0.0, 1.0, 3.0):
        gammas.append(Mobius.translation(t))
    for s in (0.25, 0.5, 2.0, 5.0):
        gammas.append(Mobius.dilation(s))
    for th in (0.3, 1.0, 2.2):
        gammas.append(Mobius.rotation_about_i(th))
    for c in (0.5, -1.5):
        gammas.append(Mobius(1.0, 0.0, c, 1.0))
    for ab in ((2.0, 1.0), (1.0, -3.0), (0.5, 0.2), (3.0, 0.0),
               (1.0, 1.0), (2.0, -1.0)):
        gammas.append(Mobius(ab[0], ab[1], 0.3, 1.0))
    angles = [2.0 * np.pi * k / 5.0 for k in range(5)]
    pairs = [(g, a) for g in gammas for a in angles]
    return pairs[:100]


def _exp_equivariance(cfg):
    columns = ("gamma_a", "gamma_b", "gamma_c", "gamma_d", "nu_angle", "residual")
    rows = []
    worst = 0.0
    for gamma, angle in _equivariance_pairs():
        resid = equivariance_residual(gamma, angle)
        worst = max(worst, resid)
        rows.append((gamma.a, gamma.b, gamma.c, gamma.d, angle, resid))
    checks = []
    if "residual_max" in cfg.thresholds:
        bound = float(cfg.thresholds["residual_max"])
        checks.append(("residual_max", worst <= bound,
                       f"worst residual {worst:.3e} vs bound {bound}"))
    return columns, rows, checks


def _exp_rigidity(cfg):
    specs = cfg.raw.get("rigidity", {}).get(
        "families", ["mean", "extremal(0)", "average(extremal(0),1000)"])
    columns = ("family", "a_dependence", "sup_h")
    rows = []
    values = {}
    for spec in specs:
        if spec.startswith("average("):
            inner, r = spec[len("average("):-1].rsplit(",", 1)
            name, args = _split_family(inner)
            f = average(family_from_spec(name, args), float(r),
                        int(cfg.params["quad_panels"]))
        else:
            name, args = _split_family(spec)
            f = family_from_spec(name, args)
        a_dep, sup_h = rigidity_residual(f)
        values[spec] = (a_dep, sup_h)
        rows.append((spec, a_dep, sup_h))
    checks = []
    if "mean_zero_tol" in cfg.thresholds and "mean" in values:
        bound = float(cfg.thresholds["mean_zero_tol"])
        a_dep, sup_h = values["mean"]
        checks.append(("mean_zero_tol", max(a_dep, sup_h) <= bound,
                       f"mean residuals ({a_dep:.2e}, {sup_h:.2e}) vs {bound}"))
    if "h0_a_dependence_min" in cfg.thresholds and "extremal(0)" in values:
        bound = float(cfg.thresholds["h0_a_dependence_min"])
        checks.append(("h0_a_dependence_min", values["extremal(0)"][0] >= bound,
                       f"a_dependence {values['extremal(0)'][0]:.4f} vs min {bound}"))
    return columns, rows, checks


_ENTIRE_POLYS = ("z1^2", "z1^2+z2", "z1*z2", "z1^3-2*z2^2", "z1^4+z2^3")


def _exp_entire_demo(cfg):
    columns = ("check", "label", "value")
    rows = []
    worst_intertwine = 0.0
    for text in _ENTIRE_POLYS:
        phi = entire_from_text(text, 2)
        lhs = fix_diagonal(shift_arguments(phi, 1.0))
        rhs = time_one(fix_diagonal(phi))
        resid = sup_grid_residual(lhs, rhs)
        worst_intertwine = max(worst_intertwine, resid)
        rows.append(("intertwine", text, resid))
    worst_period = 0.0
    for k in (1, 2, 3):
        f = periodic_map(k)
        g = f
        for _ in range(k):
            g = time_one(g)
        resid = sup_grid_residual(g, f)
        worst_period = max(worst_period, resid)
        rows.append(("periodicity", f"k={k}", resid))
    # restriction of the period-1 map to the poly-half-plane leaves the target
    f1 = periodic_map(1)
    xs = np.linspace(-1.0, 1.0, 21)
    ys = np.linspace(0.05, 2.0, 12)
    grid_re1, grid_re2, grid_im = np.meshgrid(xs, xs, ys, indexing="ij")
    z = grid_re1.ravel() + 1j * grid_im.ravel()
    w = grid_re2.ravel() + 1j * grid_im.ravel()
    vals = f1.ev((z, w))
    k = int(np.argmin(vals.imag))
    witness_im = float(vals.imag[k])
    rows.append(("im_witness", f"z={z[k]:.3f},w={w[k]:.3f}", witness_im))
    checks = []
    if "intertwine_max" in cfg.thresholds:
        bound = float(cfg.thresholds["intertwine_max"])
        checks.append(("intertwine_max", worst_intertwine <= bound,
                       f"worst {worst_intertwine:.2e} vs {bound}"))
    if "period_residual_max" in cfg.thresholds:
        bound = float(cfg.thresholds["period_residual_max"])
        checks.append(("period_residual_max", worst_period <= bound,
                       f"worst {worst_period:.2e} vs {bound}"))
    if cfg.thresholds.get("require_im_witness", False):
        checks.append(("require_im_witness", witness_im < 0.0,
                       f"most negative Im {witness_im:.4f}"))
    return columns, rows, checks


def _exp_periodicity(cfg):
    if cfg.family_spec == "catalog":
        families = [(name, f) for name, f in shipped_families(include_translates=False)
                    if f.domain is Domain.HALF_PLANE]
    else:
        name, args = _split_family(cfg.family_spec)
        families = [(cfg.family_spec, family_from_spec(name, args))]
    period = float(cfg.params["period"])
    columns = ("family", "period", "residual", "distance_to_target", "consistent")
    rows = []
    all_consistent = True
    for label, f in families:
        res = periodicity_residual(f, period)
        consistent = not res.inconsistent()
        all_consistent = all_consistent and consistent
        rows.append((label, period, res.residual, res.distance_to_target, consistent))
    checks = []
    if cfg.thresholds.get("require_consistent", False):
        checks.append(("require_consistent", all_consistent,
                       "no near-periodic family far from its target"))
    return columns, rows, checks


_BODIES = {
    "flow-orbit": _exp_flow_orbit,
    "average-convergence": _exp_average_convergence,
    "defect-scan": _exp_defect_scan,
    "equivariance": _exp_equivariance,
    "rigidity": _exp_rigidity,
    "entire-demo": _exp_entire_demo,
    "periodicity": _exp_periodicity,
}


def run_experiment(cfg, out_dir="."):
    """Run one experiment; returns the RunReport and writes its CSV."""
    start = time.perf_counter()
    columns, rows, checks = _BODIES[cfg.experiment](cfg)
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, cfg.csv_name)
    _write_csv(path, columns, rows, cfg)
    return RunReport(cfg, rows, columns, checks, time.perf_counter() - start)


def packaged_config_path(name):
    """Resolve a shipped config by bare name (without .toml)."""
    here = os.path.dirname(os.path.abspath(__file__))
    return os.path.join(here, "configs", name + ".toml")


def load_config(path_or_name):
    if os.path.exists(path_or_name):
        path = path_or_name
    else:
        path = packaged_config_path(path_or_name)
        if not os.path.exists(path):
            raise ConfigError(f"no config file or shipped config named {path_or_name!r}")
    with open(path, "rb") as fh:
        return parse_config(fh.read().decode("utf-8"))


def _print_report(report):
    cfg = report.config
    print(f"experiment : {cfg.experiment}")
    print(f"family     : {cfg.family_spec}")
    print(f"seed       : {cfg.seed}")
    print(f"csv        : {cfg.csv_name} ({len(report.rows)} rows)")
    print(f"duration   : {report.duration_s:.2f}s")
    for name, ok, detail in report.threshold_results:
        print(f"  [{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    if not report.threshold_results:
        print("  (no thresholds declared)")


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="polyflow",
        description="deterministic experiments on diagonal-fixing holomorphic maps")
    sub = parser.add_subparsers(dest="command", required=True)
    for exp in EXPERIMENTS:
        p = sub.add_parser(exp, help=f"run the {exp} experiment")
        p.add_argument("--config", required=True,
                       help="config path or shipped config name")
        p.add_argument("--out", default=".", help="output directory for CSV files")
        p.add_argument("--threads", type=int, default=1,
                       help="reserved; execution is deterministic single-process")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--tol", type=float, default=None, help="override config tol")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
        if cfg.experiment != args.command:
            raise ConfigError(
                f"config declares experiment {cfg.experiment!r}, invoked as {args.command!r}")
        if args.threads is not None and args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        if args.seed is not None:
            cfg.seed = args.seed
        if args.tol is not None:
            if args.tol <= 0:
                raise ConfigError("--tol must be positive")
            cfg.params["tol"] = args.tol
        report = run_experiment(cfg, out_dir=args.out)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except Exception as err:  # runtime errors surface with context, exit 2
        print(f"runtime error in {args.command}: {err}", file=sys.stderr)
        return 2
    _print_report(report)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
