"""Command-line front end.

Subcommands: icf-info, trajectory, orbit-asym, return-hist, correlations,
limit-law, sample-stable, ulam-gap.

Conventions:
  * every run needs an explicit --seed (no wall-clock defaults), even
    commands that happen not to draw randomness, so artifacts replay
    byte-identically;
  * JSON for reports (config echoed back, censoring counters included),
    CSV for bulk series;
  * default output directory is the current directory, overridable with
    the IBT_OUTPUT_DIR environment variable;
  * exit 0 success, 2 validation/config error, 3 unwritable output.

--threads is accepted and recorded; the compiled kernels run on a single
core with a fixed accumulation order so that results never depend on
scheduling.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys as _sys

import numpy as np

from . import __version__, kernels
from .baker import IbtMap, SquarePoint
from .errors import IbtError, InvalidParameterError, NearCutError
from .factor import build_factor
from .icf import make_beta_icf, verify_contact
from .induced import build_induced, cell_measure, check_orbit_asymptotics
from .limits import (
    birkhoff_ensemble,
    correlation_series,
    empirical_cf,
    green_kubo_sigma2,
    obs_weighted,
    obs_x_centered,
    obs_y_centered,
    predict_limit,
)
from .stable import StableParams, cdf as stable_cdf, ks_distance, sample as stable_sample
from .ulam import build_ulam, invariant_density, leading_spectrum

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_OUTPUT = 3


def _out_path(name: str, override: str | None) -> str:
    if override:
        return override
    base = os.environ.get("IBT_OUTPUT_DIR", ".")
    return os.path.join(base, name)


def _write_json(path: str, payload: dict) -> None:
    try:
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        print(f"cannot write output {path}: {exc}", file=_sys.stderr)
        raise SystemExit(EXIT_OUTPUT)


def _write_csv(path: str, header: list, rows) -> None:
    try:
        with open(path, "w") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(repr(v) if isinstance(v, float) else str(v) for v in row) + "\n")
    except OSError as exc:
        print(f"cannot write output {path}: {exc}", file=_sys.stderr)
        raise SystemExit(EXIT_OUTPUT)


def _report(args, extra: dict) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("func",)}
    return {"config": cfg, "version": __version__, **extra}


def _system(args, n_max: int = 4096):
    cf = make_beta_icf(args.alpha0, args.alpha1)
    fm = build_factor(cf)
    return build_induced(IbtMap(fm), n_max=n_max, r_max=getattr(args, "r_max", 10**6))


def _observable(args):
    kind = args.observable
    if kind == "y_centered":
        return obs_y_centered()
    if kind == "x_centered":
        return obs_x_centered()
    if kind == "weighted":
        return obs_weighted(args.weight)
    raise InvalidParameterError(f"unknown observable {kind!r}")


# -- subcommands ---------------------------------------------------------


def cmd_icf_info(args):
    cf = make_beta_icf(args.alpha0, args.alpha1)
    fm = build_factor(cf)
    sys_ = build_induced(IbtMap(fm), n_max=64)
    audit = verify_contact(cf, args.probe)
    payload = _report(args, {
        "alpha0": cf.alpha0, "alpha1": cf.alpha1,
        "c0": cf.c0, "c1": cf.c1, "A": fm.A,
        "contact_audit": audit,
        "period_two": {"p": sys_.orbit.p, "q": sys_.orbit.q,
                       "leb_base": sys_.orbit.leb_base},
    })
    _write_json(_out_path("icf_info.json", args.out), payload)
    return EXIT_OK


def cmd_trajectory(args):
    sys_ = _system(args, n_max=64)
    rng = np.random.default_rng(args.seed)
    x0 = args.x0 if args.x0 is not None else float(rng.uniform())
    y0 = args.y0 if args.y0 is not None else float(rng.uniform())
    try:
        fam = kernels.family_code(sys_.fm.cf)
        xs, ys, hit = kernels.trajectory(fam, x0, y0, args.n)
    except InvalidParameterError:
        from .baker import iterate
        hit = -1
        try:
            traj = iterate(sys_.m, SquarePoint(x0, y0), args.n)
        except NearCutError as exc:
            traj = None
            hit = exc.index if exc.index is not None else 0
        if traj is None:
            xs = np.array([x0])
            ys = np.array([y0])
        else:
            xs = np.array([t.x for t in traj])
            ys = np.array([t.y for t in traj])
    csv_path = _out_path("trajectory.csv", args.out)
    _write_csv(csv_path, ["k", "x", "y"],
               ((k, float(xs[k]), float(ys[k])) for k in range(len(xs))))
    meta = _report(args, {"x0": x0, "y0": y0, "steps_completed": len(xs) - 1,
                          "cut_hit_at": int(hit), "series": csv_path})
    _write_json(csv_path.replace(".csv", ".json"), meta)
    return EXIT_OK


def cmd_orbit_asym(args):
    sys_ = _system(args, n_max=args.n_max)
    rep = check_orbit_asymptotics(sys_)
    payload = _report(args, {"asymptotics": rep,
                             "period_two": {"p": sys_.orbit.p, "q": sys_.orbit.q}})
    _write_json(_out_path("orbit_asym.json", args.out), payload)
    return EXIT_OK


def cmd_return_hist(args):
    sys_ = _system(args, n_max=args.n_max)
    ns = np.arange(2, sys_.cells.n_max + 1)
    meas = np.array([cell_measure(sys_, int(n)) for n in ns])
    csv_path = _out_path("return_hist.csv", args.out)
    _write_csv(csv_path, ["n", "measure"], zip(ns.tolist(), meas.tolist()))
    # Kac check: tabulated sum + power-law tail correction
    alpha = max(sys_.fm.cf.alpha0, sys_.fm.cf.alpha1)
    tail_n = float(ns[-1])
    # lambda[r=n] ~ c n^{-(2+1/alpha)}; sum_{n>N} n*lambda[r=n] ~ c N^{-1/alpha} * alpha
    c_emp = meas[-1] * tail_n ** (2.0 + 1.0 / alpha)
    tail_corr = c_emp * alpha * tail_n ** (-1.0 / alpha)
    kac = float((ns * meas).sum() + tail_corr)
    lo = max(2, int(0.01 * sys_.cells.n_max))
    sel = ns >= lo
    slope = float(np.polyfit(np.log(ns[sel]), np.log(meas[sel]), 1)[0])
    payload = _report(args, {
        "kac_sum": kac,
        "kac_target": 1.0 / sys_.orbit.leb_base,
        "tail_fit_exponent": slope,
        "tail_fit_expected": -(2.0 + 1.0 / alpha),
        "series": csv_path,
    })
    _write_json(csv_path.replace(".csv", ".json"), payload)
    return EXIT_OK


def cmd_correlations(args):
    sys_ = _system(args, n_max=256)
    lags = np.unique(np.round(np.logspace(
        math.log10(args.k_min), math.log10(args.k_max), args.k_count)).astype(int))
    rep = correlation_series(sys_, lags, args.n_traj, args.length, args.seed,
                             width=args.width)
    cor = np.asarray(rep["correlation"])
    slope = float(np.polyfit(np.log(lags), np.log(np.maximum(cor, 1e-300)), 1)[0])
    csv_path = _out_path("correlations.csv", args.out)
    _write_csv(csv_path, ["k", "correlation"], zip(lags.tolist(), cor.tolist()))
    alpha = max(sys_.fm.cf.alpha0, sys_.fm.cf.alpha1)
    payload = _report(args, {
        "fitted_slope": slope,
        "expected_slope": -1.0 / alpha,
        "redraws": rep["redraws"],
        "psi_mean_exact": rep["psi_mean_exact"],
        "psi_mean_empirical": rep["psi_mean_empirical"],
        "series": csv_path,
    })
    _write_json(csv_path.replace(".csv", ".json"), payload)
    return EXIT_OK


def cmd_limit_law(args):
    sys_ = _system(args)
    obs = _observable(args)
    pred = predict_limit(obs, sys_)
    out = {"prediction": {
        "case": pred.case_id, "norming": pred.norming, "p": pred.p,
        "a": pred.a, "b": pred.b, "sigma2": pred.sigma2,
        "M0": pred.M0, "M1": pred.M1, "C0": pred.C0, "C1": pred.C1,
        "notes": pred.notes,
    }}
    if pred.case_id == "out_of_scope":
        payload = _report(args, out)
        _write_json(_out_path("limit_law.json", args.out), payload)
        return EXIT_OK
    if pred.case_id == "CLT":
        gk = green_kubo_sigma2(obs, sys_, n_traj=args.gk_traj,
                               n_returns=args.gk_returns, k_max=args.gk_kmax,
                               seed=args.seed + 1)
        sigma2 = gk["sigma2_map"]
        out["green_kubo"] = {k: gk[k] for k in
                             ("sigma2_induced", "sigma2_map", "n_excursions",
                              "truncated_orbits")}
    else:
        sigma2 = pred.sigma2
    ens = birkhoff_ensemble(obs, sys_, args.n, args.n_traj, args.seed, prediction=pred)
    z = ens["samples"]
    out["ensemble"] = {"n": args.n, "n_traj": args.n_traj,
                       "redraws": ens["redraws"], "censored": ens["censored"]}
    tgrid = np.array([0.25, 0.5, 1.0, 2.0])
    if pred.case_id in ("stable_one_sided", "stable_two_sided"):
        target = StableParams(pred.p, pred.a, pred.b)
        out["ks_distance"] = ks_distance(z, target)
        from .stable import char_fn
        out["sup_cf_distance"] = float(np.abs(
            empirical_cf(z, tgrid) - char_fn(target, tgrid)).max())
    else:
        zn = z / math.sqrt(sigma2)
        from scipy import special as sp
        zs = np.sort(zn)
        f = sp.ndtr(zs)
        n = zs.size
        out["ks_distance"] = float(max(
            (np.arange(1, n + 1) / n - f).max(), (f - np.arange(0, n) / n).max()))
        out["sigma2_used"] = sigma2
        out["empirical_variance"] = float(z.var())
    csv_path = _out_path("limit_law_samples.csv", None if args.out is None
                         else args.out.replace(".json", "_samples.csv"))
    _write_csv(csv_path, ["sample"], ((float(v),) for v in z))
    out["samples_csv"] = csv_path
    payload = _report(args, out)
    _write_json(_out_path("limit_law.json", args.out), payload)
    return EXIT_OK


def cmd_sample_stable(args):
    params = StableParams(args.p, args.a, args.b)
    rng = np.random.default_rng(args.seed)
    z = stable_sample(params, args.n, rng)
    csv_path = _out_path("stable_samples.csv", args.out)
    _write_csv(csv_path, ["sample"], ((float(v),) for v in z))
    payload = _report(args, {
        "self_ks": ks_distance(z, params),
        "cdf_at_zero": float(stable_cdf(params, 0.0)),
        "series": csv_path,
    })
    _write_json(csv_path.replace(".csv", ".json"), payload)
    return EXIT_OK


def cmd_ulam_gap(args):
    sys_ = _system(args, n_max=256)
    op = build_ulam(sys_, args.bins, args.samples, args.seed)
    ev = leading_spectrum(op, min(6, args.bins))
    dens = invariant_density(op)
    payload = _report(args, {
        "eigenvalues": [[float(v.real), float(v.imag)] for v in ev],
        "lambda1_error": float(abs(ev[0] - 1.0)),
        "lambda2_modulus": float(abs(ev[1])),
        "density_max_deviation": float(np.abs(dens - 1.0).max()),
        "redrawn": op.redrawn,
    })
    _write_json(_out_path("ulam_gap.json", args.out), payload)
    return EXIT_OK


# -- parser --------------------------------------------------------------


def _add_family(sp, required=True):
    sp.add_argument("--alpha0", type=float, required=required)
    sp.add_argument("--alpha1", type=float, required=required)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ibt", description=__doc__)
    ap.add_argument("--threads", type=int, default=1,
                    help="recorded in artifacts; kernels are sequential")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("icf-info")
    _add_family(p)
    p.add_argument("--probe", type=float, default=1e-4)
    p.add_argument("--out")
    p.set_defaults(func=cmd_icf_info)

    p = sub.add_parser("trajectory")
    _add_family(p)
    p.add_argument("--x0", type=float)
    p.add_argument("--y0", type=float)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_trajectory)

    p = sub.add_parser("orbit-asym")
    _add_family(p)
    p.add_argument("--n-max", type=int, default=100000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_orbit_asym)

    p = sub.add_parser("return-hist")
    _add_family(p)
    p.add_argument("--n-max", type=int, default=10000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_return_hist)

    p = sub.add_parser("correlations")
    _add_family(p)
    p.add_argument("--k-min", type=int, default=10)
    p.add_argument("--k-max", type=int, default=1000)
    p.add_argument("--k-count", type=int, default=13)
    p.add_argument("--n-traj", type=int, default=100000)
    p.add_argument("--length", type=int, default=2000)
    p.add_argument("--width", type=float, default=0.05)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_correlations)

    p = sub.add_parser("limit-law")
    p.add_argument("--config", help="JSON file with the parameters below")
    _add_family(p, required=False)
    p.add_argument("--observable",
                   choices=["y_centered", "x_centered", "weighted"])
    p.add_argument("--weight", type=float, default=0.0)
    p.add_argument("--n", type=int)
    p.add_argument("--n-traj", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--r-max", type=int, default=10**6)
    p.add_argument("--gk-traj", type=int, default=20000)
    p.add_argument("--gk-returns", type=int, default=200)
    p.add_argument("--gk-kmax", type=int, default=50)
    p.add_argument("--out")
    p.set_defaults(func=cmd_limit_law)

    p = sub.add_parser("sample-stable")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample_stable)

    p = sub.add_parser("ulam-gap")
    _add_family(p)
    p.add_argument("--bins", type=int, default=256)
    p.add_argument("--samples", type=int, default=20000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_ulam_gap)

    return ap


def _merge_config(args) -> None:
    path = getattr(args, "config", None)
    if not path:
        missing = [k for k in ("alpha0", "alpha1", "observable", "n", "n_traj", "seed")
                   if getattr(args, k, True) is None]
        if missing:
            raise InvalidParameterError(
                f"missing required parameters: {', '.join(missing)} "
                "(pass flags or --config)")
        return
    if not os.path.exists(path):
        raise InvalidParameterError(f"config not found: {path}")
    with open(path) as fh:
        try:
            cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidParameterError(f"config is not valid JSON: {exc}")
    for key, val in cfg.items():
        attr = key.replace("-", "_")
        if getattr(args, attr, None) is None:
            setattr(args, attr, val)
    if getattr(args, "seed", None) is None:
        raise InvalidParameterError("seed is mandatory (in config or --seed)")
    for k in ("alpha0", "alpha1", "observable", "n", "n_traj"):
        if getattr(args, k, None) is None:
            raise InvalidParameterError(f"missing required parameter: {k}")


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if args.command == "limit-law":
            _merge_config(args)
        return args.func(args)
    except SystemExit as exc:
        raise
    except (IbtError, ValueError) as exc:
        print(f"validation error: {exc}", file=_sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    raise SystemExit(main())
