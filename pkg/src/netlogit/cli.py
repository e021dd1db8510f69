"""Command-line interface: graph generation, sampling, fitting, paths, experiments."""

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .covgen import CovariateSpec, GaussianAR, ThetaSpec, UniformShell, gen_theta, load_covariates
from .experiments import (
    ErdosRenyiFamily,
    ExperimentConfig,
    SBMFamily,
    desk_error_config,
    paper_error_config,
    paper_path_config,
    rate_slope,
    run_error_experiment,
    run_solution_path_experiment,
    write_aggregate_csv,
    write_error_csv,
    write_manifest,
)
from .graphs import (
    SBM,
    ErdosRenyi,
    FixedEdgeList,
    diagnostics,
    generate_graph,
    read_edge_list,
    scale_adjacency,
    write_edge_list,
)
from .errors import NoConvergedFitError
from .model import ModelParams, gibbs_sample, load_spins, save_spins
from .optim import SolverConfig, fit
from .pseudo import PseudoLikelihoodProblem
from .tune import LambdaGrid, select, solution_path, write_path_csv

PRESETS = {
    "fig1-er-path": lambda seed: ("path", paper_path_config(base_seed=seed)),
    "fig2-sbm-path": lambda seed: (
        "path",
        paper_path_config(
            ensemble=SBMFamily(proportions=(0.5, 0.5), base_matrix=((4.0, 8.0), (8.0, 4.0))),
            base_seed=seed,
        ),
    ),
    "fig3-er-desk": lambda seed: ("error", desk_error_config(base_seed=seed)),
    "fig3-er-paper": lambda seed: ("error", paper_error_config(base_seed=seed)),
    "fig3-sbm-desk": lambda seed: (
        "error",
        desk_error_config(
            ensemble=SBMFamily(proportions=(0.5, 0.5), base_matrix=((10.0, 5.0), (5.0, 10.0))),
            base_seed=seed,
        ),
    ),
    "fig3-sbm-paper": lambda seed: (
        "error",
        paper_error_config(
            ensemble=SBMFamily(proportions=(0.5, 0.5), base_matrix=((10.0, 5.0), (5.0, 10.0))),
            base_seed=seed,
        ),
    ),
}


def _parse_floats(text):
    return tuple(float(v) for v in text.split(","))


def _parse_matrix(text):
    return tuple(_parse_floats(row) for row in text.split(";"))


def _load_config_file(path):
    p = Path(path)
    raw = p.read_bytes()
    if p.suffix.lower() == ".json":
        return json.loads(raw)
    try:
        import tomllib as toml  # py>=3.11
    except ImportError:
        import tomli as toml
    return toml.loads(raw.decode("utf-8"))


def _ensemble_from_dict(doc):
    kind = doc.get("kind", "erdos_renyi")
    if kind in ("erdos_renyi", "er"):
        return ErdosRenyiFamily(c=float(doc["c"]))
    if kind == "sbm":
        return SBMFamily(
            proportions=tuple(float(v) for v in doc["proportions"]),
            base_matrix=tuple(tuple(float(v) for v in row) for row in doc["base_matrix"]),
        )
    raise ValueError(f"unknown ensemble kind: {kind}")


def _config_from_dict(doc, seed_override=None):
    d = int(doc["d"])
    s = int(doc["s"])
    grid_doc = doc.get("grid", {})
    grid = LambdaGrid.geometric(
        float(grid_doc.get("lo", 0.001)),
        float(grid_doc.get("hi", 0.1)),
        int(grid_doc.get("count", 100)),
    )
    base_seed = int(doc.get("base_seed", 0))
    if seed_override is not None:
        base_seed = seed_override
    config = ExperimentConfig(
        ensemble=_ensemble_from_dict(doc["ensemble"]),
        n_list=tuple(int(n) for n in doc["n_list"]),
        d=d,
        s=s,
        beta_true=float(doc.get("beta_true", 0.3)),
        covariate=CovariateSpec(d=d, kind=GaussianAR(rho=float(doc.get("cov_rho", 0.2)))),
        theta=ThetaSpec(
            d=d,
            s=s,
            signal=UniformShell(
                float(doc.get("signal_lo", 0.5)), float(doc.get("signal_hi", 1.0))
            ),
        ),
        grid=grid,
        reps=int(doc.get("reps", 1)),
        base_seed=base_seed,
        gibbs_iters=int(doc.get("gibbs_iters", 30000)),
        comparison=doc.get("comparison", "both"),
        tau=float(doc.get("tau", 0.8)),
        delta_tol=float(doc.get("delta_tol", 1e-3)),
        classical_bic=bool(doc.get("classical_bic", False)),
    )
    return doc.get("mode"), config


def _cmd_gen_graph(args):
    if args.kind == "er":
        if args.n is None or args.p is None:
            raise SystemExit("--kind er requires --n and --p")
        spec = ErdosRenyi(n=args.n, p=args.p)
    elif args.kind == "sbm":
        if args.n is None or not args.proportions or not args.base:
            raise SystemExit("--kind sbm requires --n, --proportions, and --base")
        spec = SBM(
            n=args.n,
            block_proportions=_parse_floats(args.proportions),
            base_matrix=_parse_matrix(args.base),
        )
    else:
        if not args.path:
            raise SystemExit("--kind file requires --path")
        spec = FixedEdgeList(path=args.path)
    g = generate_graph(spec, seed=args.seed)
    write_edge_list(g, args.out)
    print(f"wrote {args.out}: n={g.n_vertices}, edges={g.n_edges}")
    if args.diagnostics:
        a = scale_adjacency(g)
        z = load_covariates(args.z) if args.z else None
        diag = diagnostics(a, g, z=z, seed=args.seed)
        Path(args.diagnostics).write_text(diag.to_json() + "\n", encoding="utf-8")
        print(f"wrote {args.diagnostics}")
    return 0


def _cmd_sample(args):
    g = read_edge_list(args.graph)
    a = scale_adjacency(g)
    z = load_covariates(args.z)
    theta = np.loadtxt(args.theta, delimiter=",", ndmin=1)
    params = ModelParams(beta=args.beta, theta=theta)
    init = None
    if args.init and args.init != "plus":
        init = load_spins(args.init)[0]
    samples = []
    for chain in range(args.chains):
        samples.append(
            gibbs_sample(
                params,
                a,
                z,
                args.iters,
                init=init,
                scan=args.scan,
                seed=args.seed + chain,
            )
        )
    save_spins(args.out, np.vstack(samples))
    print(f"wrote {args.out}: {args.chains} configuration(s) of {a.n} spins")
    return 0


def _load_problem(args):
    g = read_edge_list(args.graph)
    a = scale_adjacency(g)
    z = load_covariates(args.z)
    x = load_spins(args.x)[args.row]
    return PseudoLikelihoodProblem(a, z, x)


def _cmd_fit(args):
    problem = _load_problem(args)
    config = SolverConfig(
        lam=args.lam,
        tau=args.tau,
        delta_tol=args.delta_tol,
        max_iters=args.max_iters,
        penalize_beta=args.penalize_beta,
        fixed_beta=args.fixed_beta,
    )
    res = fit(problem, config)
    doc = {
        "beta_hat": res.gamma_hat.beta,
        "theta_hat": res.gamma_hat.theta.tolist(),
        "n_iters": res.n_iters,
        "n_backtracks": res.n_backtracks,
        "final_step": res.final_step,
        "objective": float(res.objective_trace[-1]),
        "kkt_beta": res.kkt[0],
        "kkt_theta_max": res.kkt[1],
        "converged": res.converged,
    }
    text = json.dumps(doc, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        print(text)
    return 0


def _cmd_path(args):
    problem = _load_problem(args)
    grid = LambdaGrid.geometric(args.grid_lo, args.grid_hi, args.grid_count)
    config = SolverConfig(
        lam=grid.values[0],
        tau=args.tau,
        delta_tol=args.delta_tol,
        max_iters=args.max_iters,
        fixed_beta=args.fixed_beta,
    )
    result = solution_path(problem, grid, config, classical_bic=args.classical_bic)
    write_path_csv(result, args.out)
    print(f"wrote {args.out}")
    try:
        lam_hat, gamma_hat = select(result)
        print(
            f"selected lambda={lam_hat:.6g}, beta_hat={gamma_hat.beta:.6g}, "
            f"df={int(np.count_nonzero(gamma_hat.theta))}"
        )
    except NoConvergedFitError:
        print("warning: no grid point converged; nothing selected")
    if args.plot:
        from .plotting import solution_path_figure

        png = args.plot_out or str(Path(args.out).with_suffix(".png"))
        solution_path_figure(result, args.signal_count, png)
        print(f"wrote {png}")
    return 0


def _cmd_experiment(args):
    if args.preset:
        if args.preset not in PRESETS:
            raise SystemExit(f"unknown preset {args.preset!r}; choices: {sorted(PRESETS)}")
        mode, config = PRESETS[args.preset](args.seed if args.seed is not None else 7)
    else:
        if not args.config:
            raise SystemExit("--config or --preset is required")
        mode, config = _config_from_dict(_load_config_file(args.config), args.seed)
    if args.mode:
        mode = args.mode
    if mode not in ("error", "path"):
        raise SystemExit("experiment mode must be 'error' or 'path'")

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    outputs = []

    if mode == "error":
        table = run_error_experiment(config, threads=args.threads)
        errors_csv = out_dir / "errors.csv"
        summary_csv = out_dir / "errors_summary.csv"
        write_error_csv(table, errors_csv)
        write_aggregate_csv(table, summary_csv)
        outputs += [errors_csv.name, summary_csv.name]
        if args.plot:
            from .plotting import error_curves_figure

            fig = out_dir / "error_curves.png"
            error_curves_figure(table.aggregates(), fig)
            outputs.append(fig.name)
        timings = {
            f"{r.method}_n{r.n}_rep{r.rep}": r.runtime_sec for r in table.rows
        }
        extra = {"outputs": outputs, "timings_sec": timings}
        if len(config.n_list) >= 3 and "pmpl" in config.methods():
            extra["rate_slope_pmpl"] = rate_slope(table, "pmpl")
        for agg in table.aggregates():
            print(
                f"{agg['method']:>8} n={agg['n']:>5} "
                f"l1={agg['mean_l1']:.4f}±{agg['sd_l1']:.4f} "
                f"l2={agg['mean_l2']:.4f}±{agg['sd_l2']:.4f}"
            )
    else:
        runs = run_solution_path_experiment(config, threads=args.threads)
        extra = {"outputs": outputs}
        for run in runs:
            csv = out_dir / f"path_n{run.n}_rep{run.rep}.csv"
            write_path_csv(run.result, csv)
            outputs.append(csv.name)
            if args.plot:
                from .plotting import solution_path_figure

                png = csv.with_suffix(".png")
                solution_path_figure(run.result, config.s, png)
                outputs.append(png.name)
            print(f"wrote {csv}")

    extra["wall_sec"] = time.perf_counter() - t0
    write_manifest(out_dir / "run_manifest.json", config, extra)
    print(f"wrote {out_dir / 'run_manifest.json'}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="netlogit",
        description="Penalized pseudo-likelihood estimation for logistic regression on networks",
    )
    parser.add_argument("--version", action="version", version=f"netlogit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-graph", help="draw a graph from a random ensemble")
    p.add_argument("--kind", choices=("er", "sbm", "file"), required=True)
    p.add_argument("--n", type=int, help="number of vertices")
    p.add_argument("--p", type=float, help="edge probability (er)")
    p.add_argument("--proportions", help="comma-separated block proportions (sbm)")
    p.add_argument("--base", help="semicolon-separated base matrix rows (sbm)")
    p.add_argument("--path", help="edge-list file (kind=file)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="edge-list output file")
    p.add_argument("--diagnostics", help="also write assumption diagnostics JSON here")
    p.add_argument("--z", help="optional covariate CSV for the diagnostics")
    p.set_defaults(func=_cmd_gen_graph)

    p = sub.add_parser("sample", help="Gibbs-sample spin configurations")
    p.add_argument("--graph", required=True)
    p.add_argument("--z", required=True, help="covariate CSV")
    p.add_argument("--theta", required=True, help="CSV with one row of coefficients")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--iters", type=int, default=30000)
    p.add_argument("--scan", choices=("random", "systematic"), default="random")
    p.add_argument("--init", default="plus", help="'plus' or a spin CSV to start from")
    p.add_argument("--chains", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("fit", help="solve the penalized problem at one penalty")
    p.add_argument("--graph", required=True)
    p.add_argument("--z", required=True)
    p.add_argument("--x", required=True, help="spin CSV")
    p.add_argument("--row", type=int, default=0, help="row of the spin CSV to use")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--tau", type=float, default=0.8)
    p.add_argument("--delta-tol", type=float, default=1e-3)
    p.add_argument("--max-iters", type=int, default=100_000)
    p.add_argument("--fixed-beta", type=float, default=None)
    p.add_argument("--penalize-beta", action="store_true")
    p.add_argument("--out", help="write the fit JSON here instead of stdout")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("path", help="solution path over a penalty grid")
    p.add_argument("--graph", required=True)
    p.add_argument("--z", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--row", type=int, default=0)
    p.add_argument("--grid-lo", type=float, default=0.001)
    p.add_argument("--grid-hi", type=float, default=0.1)
    p.add_argument("--grid-count", type=int, default=100)
    p.add_argument("--tau", type=float, default=0.8)
    p.add_argument("--delta-tol", type=float, default=1e-3)
    p.add_argument("--max-iters", type=int, default=100_000)
    p.add_argument("--fixed-beta", type=float, default=None)
    p.add_argument("--classical-bic", action="store_true")
    p.add_argument("--out", required=True, help="path CSV output")
    p.add_argument("--plot", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--plot-out", help="figure file (default: CSV name with .png)")
    p.add_argument("--signal-count", type=int, default=0, help="leading coordinates to highlight")
    p.set_defaults(func=_cmd_path)

    p = sub.add_parser("experiment", help="run a full experiment from a config or preset")
    p.add_argument("--config", help="TOML or JSON experiment config")
    p.add_argument("--preset", help=f"one of: {', '.join(sorted(PRESETS))}")
    p.add_argument("--mode", choices=("error", "path"), help="override the config mode")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int, default=None, help="override the base seed")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--plot", action=argparse.BooleanOptionalAction, default=True)
    p.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
