"""``puffer`` command-line tool.

Exit codes: 0 success, 1 usage error, 2 bad input data, 3 numerical failure.
Every failure writes a single line ``ERROR <CODE>: message`` to stderr.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import logging
import sys
import warnings
from typing import List, Optional

import numpy as np

from . import dataio
from .core import DEFAULT_RANK_TOLERANCE, RegressionProblem, SupportSet, puffer_transform, transform_design
from .designs import DesignKind, DesignSpec, sample_beta_star, sample_design, sample_noise
from .diagnostics import (
    c_min,
    center_and_scale,
    high_dim_lambda,
    diagnose,
    ic_score,
    low_dim_lambda,
    theorem1_bound,
    theorem3_bound,
)
from .errors import InvalidSpec, PufferError
from .experiments import ExperimentConfig, run_experiment
from .lasso import lasso_path, solve_lasso
from .selection import first_with_df, ols_bic_select

DEFAULT_SEED = 42
EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERICAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------- helpers


def _emit(text: str, path: Optional[str]):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_design(path, y_col):
    """``(X, Y or None, names)``; without ``--y-col`` every column is a predictor."""
    if y_col is not None:
        prob = dataio.load_csv(path, y_col)
        return prob.X, prob.Y, dataio.predictor_names(path, y_col)
    header, table = dataio.read_table(path)
    return table, None, header


def _parse_support(text: str, p: int) -> np.ndarray:
    try:
        idx = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InvalidSpec(f"--support must be comma-separated integers, got {text!r}") from None
    if not idx:
        raise InvalidSpec("--support is empty")
    if min(idx) < 1 or max(idx) > p:
        raise InvalidSpec(f"--support indices are 1-based and must lie in 1..{p}")
    return np.array(idx, dtype=np.int64) - 1


def _parse_signs(text: Optional[str], s: int) -> Optional[np.ndarray]:
    if text is None:
        return None
    out = []
    for t in text.split(","):
        t = t.strip()
        if t in ("+", "+1", "1"):
            out.append(1.0)
        elif t in ("-", "-1"):
            out.append(-1.0)
        else:
            raise InvalidSpec(f"sign {t!r} is not one of +, -")
    if len(out) != s:
        raise InvalidSpec(f"--signs has {len(out)} entries but --support has {s}")
    return np.array(out)


def _coef_dict(names, beta):
    return {name: float(b) for name, b in zip(names, beta)}


# ---------------------------------------------------------------- subcommands


def cmd_precondition(args) -> int:
    prob = dataio.load_csv(args.input, args.y_col)
    names = dataio.predictor_names(args.input, args.y_col)
    tp = puffer_transform(prob, args.rank_tol, args.tikhonov)
    y_name = args.y_col if isinstance(args.y_col, str) and not args.y_col.isdigit() else "y"
    dataio.save_csv(args.output, tp.as_problem(), y_name, names)
    dec = tp.decomposition
    side = {
        "n": prob.n,
        "p": prob.p,
        "rank": dec.d,
        "rank_tolerance": dec.rank_tolerance,
        "tikhonov_delta": dec.tikhonov_delta,
        "singular_values": dec.D,
        "condition_number": float(dec.D[0] / dec.D[-1]),
        "orthonormality_error": tp.orthonormality_error(),
    }
    _emit(dataio.dumps(side), args.sidecar or args.output + ".json")
    return EXIT_OK


def cmd_fit(args) -> int:
    prob = dataio.load_csv(args.input, args.y_col)
    names = dataio.predictor_names(args.input, args.y_col)
    X, Y = prob.X, prob.Y
    if args.precondition:
        tp = puffer_transform(prob, args.rank_tol, args.tikhonov)
        X, Y = tp.X_tilde, tp.Y_tilde
    out = {"preconditioned": bool(args.precondition), "n": prob.n, "p": prob.p}
    if args.lam is not None:
        if args.lam <= 0:
            raise InvalidSpec("--lambda must be positive")
        sol = solve_lasso(X, Y, args.lam, tol=args.tol, max_iter=args.max_iter, raise_on_fail=True)
        out.update(
            mode="single",
            **{"lambda": sol.lam},
            active_count=sol.active_count,
            kkt_residual=sol.kkt_residual,
            iterations=sol.iterations,
            converged=sol.converged,
            coefficients=_coef_dict(names, sol.beta_hat),
        )
    else:
        rule = args.select[0]
        if rule == "ols-bic":
            if len(args.select) != 1:
                raise UsageError("--select ols-bic takes no argument")
            path = lasso_path(X, Y, args.grid, args.lambda_min_ratio, args.tol, args.max_iter,
                              max_active=args.df_max)
            sel = ols_bic_select(path, prob.X, prob.Y, args.df_max)
        elif rule == "first-df":
            if len(args.select) != 2 or not args.select[1].isdigit() or int(args.select[1]) < 1:
                raise UsageError("--select first-df needs a positive integer K")
            k = int(args.select[1])
            path = lasso_path(X, Y, args.grid, args.lambda_min_ratio, args.tol, args.max_iter, max_active=k - 1)
            sel = first_with_df(path, k)
        else:
            raise UsageError(f"unknown selection rule {rule!r}; use ols-bic or first-df K")
        chosen = path.solutions[sel.path_index]
        out.update(
            mode="path",
            grid_size=args.grid,
            lambda_max=path.lambda_max,
            path_length=len(path),
            **{"lambda": sel.chosen_lambda},
            active_count=chosen.active_count,
            kkt_residual=chosen.kkt_residual,
            converged=chosen.converged,
            coefficients=_coef_dict(names, sel.beta_hat),
            selection=sel.to_dict(),
        )
        # report predictor names alongside 0-based indices
        out["selection"]["chosen_support"] = [int(j) + 1 for j in sel.chosen_support]
        out["selection"]["chosen_names"] = [names[j] for j in sel.chosen_support]
    _emit(dataio.dumps(out), args.output)
    return EXIT_OK


def _bounds(X, S, lam, sigma2, eta_after, d_min):
    n, p = X.shape
    out = {}
    if sigma2 <= 0:
        return {"theorem1": 1.0 if n >= p else None, "theorem3": 1.0 if p > n else None}
    if n >= p:
        c_tilde = float(np.linalg.eigvalsh(X.T @ X / n)[0])
        out["theorem1"] = theorem1_bound(n, p, lam, sigma2, c_tilde)
        out["theorem3"] = None
    else:
        out["theorem1"] = None
        out["theorem3"] = theorem3_bound(n, p, lam, sigma2, max(eta_after, 0.0), d_min)
    return out


def cmd_diagnose(args) -> int:
    X, _, names = _load_design(args.input, args.y_col)
    n, p = X.shape
    support = _parse_support(args.support, p)
    signs = _parse_signs(args.signs, support.size)
    S = SupportSet(support, signs)
    if args.center_scale:
        X = center_and_scale(X)
    if args.lam is not None:
        lam = args.lam
    else:
        lam = low_dim_lambda(n) if n >= p else high_dim_lambda(n, p, support.size)
    dec_prob = RegressionProblem(X, np.zeros(n))
    tp = puffer_transform(dec_prob, args.rank_tol, args.tikhonov)
    Xt = tp.X_tilde
    if args.center_scale:
        Xt = center_and_scale(Xt)
    before = diagnose(X, S, lam, args.sigma2, signs=signs)
    noise_eig = args.sigma2 * float(np.max(tp.decomposition.inverse_factors) ** 2)
    after = diagnose(Xt, S, lam, args.sigma2, signs=signs, noise_max_eig=noise_eig)
    out = {
        "n": n,
        "p": p,
        "support": [int(j) + 1 for j in support],
        "support_names": [names[j] for j in support],
        "signs": [int(v) for v in (signs if signs is not None else np.ones(support.size))],
        "lambda": lam,
        "sigma2": args.sigma2,
        "center_scale": bool(args.center_scale),
        "ic_score_before": before.ic_score,
        "ic_score_after": after.ic_score,
        "eta_before": before.eta,
        "eta_after": after.eta,
        "before": before.to_dict(),
        "after": after.to_dict(),
        "bounds": _bounds(X, S, lam, args.sigma2, after.eta, after.d_min_proxy),
    }
    _emit(dataio.dumps(out), args.output)
    return EXIT_OK


def cmd_ic_score(args) -> int:
    X, _, _ = _load_design(args.input, args.y_col)
    support = _parse_support(args.support, X.shape[1])
    signs = _parse_signs(args.signs, support.size)
    if args.center_scale:
        X = center_and_scale(X)
    out = {"ic_score": ic_score(X, SupportSet(support, signs), signs)}
    if args.precondition:
        V = transform_design(X, args.rank_tol)
        if args.center_scale:
            V = center_and_scale(V)
        out["ic_score_preconditioned"] = ic_score(V, SupportSet(support, signs), signs)
    out["c_min"] = c_min(X, SupportSet(support, signs))
    _emit(dataio.dumps(out), args.output)
    return EXIT_OK


_SAMPLE_KINDS = {
    "gaussian": DesignKind.IID_GAUSSIAN,
    "stiefel": DesignKind.STIEFEL_UNIFORM,
    "constant-cor": DesignKind.CONSTANT_CORRELATION,
}


def cmd_sample(args) -> int:
    seed = DEFAULT_SEED if args.seed is None else args.seed
    ss = np.random.SeedSequence(seed)
    k_design, k_beta, k_noise = ss.spawn(3)
    X = sample_design(DesignSpec(_SAMPLE_KINDS[args.kind], args.n, args.p, k_design, rho=args.rho))
    beta = sample_beta_star(args.p, args.s, args.beta, k_beta, randomize=args.random_support)
    Y = X @ beta + sample_noise(args.n, args.sigma2, k_noise)
    dataio.save_csv(args.output, RegressionProblem(X, Y))
    if args.truth:
        _emit(dataio.dumps({"seed": seed, "beta_star": beta, "support": [int(j) + 1 for j in np.flatnonzero(beta)]}),
              args.truth)
    return EXIT_OK


def cmd_simulate(args) -> int:
    raw = dataio.load_json(args.config)
    if not isinstance(raw, dict):
        raise InvalidSpec("experiment config must be a JSON object")
    raw = dict(raw)
    if args.seed is not None:
        raw["master_seed"] = args.seed
    raw.setdefault("master_seed", DEFAULT_SEED)
    config = ExperimentConfig.from_dict(raw)
    result = run_experiment(config)
    result.to_csv(args.out)
    meta = {"config": config.to_dict(), "rows": len(result.rows), "n_failed": result.n_failed,
            "summary": result.summary}
    if not args.no_timestamp:
        meta["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
        meta["runtime_seconds"] = float(sum(result.timings))
    _emit(dataio.dumps(meta), args.meta or args.out + ".json")
    return EXIT_OK


# ---------------------------------------------------------------- parser


def _add_input(sp, y_required=True):
    sp.add_argument("--input", required=True, help="CSV file with a header row")
    if y_required:
        sp.add_argument("--y-col", required=True, help="response column (name or 0-based index)")
    else:
        sp.add_argument("--y-col", default=None, help="response column to drop from the design")


def _add_precond(sp):
    sp.add_argument("--tikhonov", type=float, default=0.0, metavar="DELTA")
    sp.add_argument("--rank-tol", type=float, default=DEFAULT_RANK_TOLERANCE)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="puffer", description="Puffer-preconditioned Lasso tools.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    sp = sub.add_parser("precondition", help="write the transformed problem")
    _add_input(sp)
    sp.add_argument("--output", required=True)
    sp.add_argument("--sidecar", default=None, help="JSON path (default: OUTPUT.json)")
    _add_precond(sp)
    sp.set_defaults(func=cmd_precondition)

    sp = sub.add_parser("fit", help="Lasso fit at one lambda or along a path")
    _add_input(sp)
    sp.add_argument("--precondition", action="store_true")
    _add_precond(sp)
    mode = sp.add_mutually_exclusive_group(required=True)
    mode.add_argument("--lambda", dest="lam", type=float)
    mode.add_argument("--path", action="store_true")
    sp.add_argument("--grid", type=int, default=100)
    sp.add_argument("--lambda-min-ratio", type=float, default=None)
    sp.add_argument("--select", nargs="+", default=["ols-bic"], metavar="RULE",
                    help="ols-bic, or first-df K")
    sp.add_argument("--df-max", type=int, default=40)
    sp.add_argument("--tol", type=float, default=1e-7)
    sp.add_argument("--max-iter", type=int, default=10_000)
    sp.add_argument("--output", default=None)
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("diagnose", help="IC score, constants and bounds before/after preconditioning")
    _add_input(sp, y_required=False)
    sp.add_argument("--support", required=True, help="1-based column indices, e.g. 1,2,5")
    sp.add_argument("--signs", default=None, help="e.g. +,+,-")
    sp.add_argument("--center-scale", action="store_true")
    sp.add_argument("--lambda", dest="lam", type=float, default=None)
    sp.add_argument("--sigma2", type=float, default=1.0)
    _add_precond(sp)
    sp.add_argument("--output", default=None)
    sp.set_defaults(func=cmd_diagnose)

    sp = sub.add_parser("ic-score", help="irrepresentable score of a support")
    _add_input(sp, y_required=False)
    sp.add_argument("--support", required=True)
    sp.add_argument("--signs", default=None)
    sp.add_argument("--center-scale", action="store_true")
    sp.add_argument("--precondition", action="store_true")
    sp.add_argument("--rank-tol", type=float, default=DEFAULT_RANK_TOLERANCE)
    sp.add_argument("--output", default=None)
    sp.set_defaults(func=cmd_ic_score)

    sp = sub.add_parser("sample", help="simulate a dataset")
    sp.add_argument("kind", choices=sorted(_SAMPLE_KINDS))
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--rho", type=float, default=0.0)
    sp.add_argument("--s", type=int, default=5)
    sp.add_argument("--beta", type=float, default=10.0)
    sp.add_argument("--sigma2", type=float, default=1.0)
    sp.add_argument("--random-support", action="store_true")
    sp.add_argument("--seed", type=int, default=None, help=f"default {DEFAULT_SEED}")
    sp.add_argument("--output", required=True)
    sp.add_argument("--truth", default=None, help="optional JSON with beta*")
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("simulate", help="run a Monte-Carlo study from a JSON config")
    sp.add_argument("--config", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--meta", default=None, help="metadata JSON path (default: OUT.json)")
    sp.add_argument("--seed", type=int, default=None, help=f"master seed (default {DEFAULT_SEED})")
    sp.add_argument("--no-timestamp", action="store_true")
    sp.set_defaults(func=cmd_simulate)
    return ap


def _fail(code: str, msg: str, status: int) -> int:
    msg = " ".join(str(msg).split())
    sys.stderr.write(f"ERROR {code}: {msg}\n")
    return status


def cli_main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        return _fail("USAGE", exc, EXIT_USAGE)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        with warnings.catch_warnings():
            if not args.verbose:
                warnings.simplefilter("ignore", RuntimeWarning)
            return args.func(args)
    except UsageError as exc:
        return _fail("USAGE", exc, EXIT_USAGE)
    except PufferError as exc:
        return _fail(exc.code, exc, exc.exit_code)
    except OSError as exc:
        return _fail("IO", f"{exc.strerror or exc}: {exc.filename or ''}", EXIT_DATA)
    except (MemoryError, ArithmeticError, np.linalg.LinAlgError) as exc:
        return _fail("NUMERICAL", exc, EXIT_NUMERICAL)


def main():  # console-script entry
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
