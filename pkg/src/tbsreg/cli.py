"""Command-line interface: `tbs fit|simulate|consistency|baseline`.

Options come from a JSON config file plus flag overrides (flags win).
Every command is a pure function of (config, input files, seed); there is
no wall-clock anywhere, so re-runs are byte-identical.
"""

import argparse
import json
import os
import sys
from dataclasses import replace

from . import baselines, consistency, io, metrics, samplers, simlab
from . import model as mdl
from .model import Variant

MODEL_FLAGS = {"tbs": Variant.TBS_SG, "tbso": Variant.TBSO_SG,
               "tbst": Variant.TBST_SG, "tbss": Variant.TBSS_SG,
               "tbscn": Variant.TBSCN_SG}


def _load_config(args):
    cfg = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            cfg = json.load(fh)
    for key in ("seed", "out", "model", "preset", "replications"):
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if "seed" not in cfg or cfg["seed"] is None:
        raise SystemExit("a seed is required (config 'seed' or --seed)")
    cfg.setdefault("out", ".")
    os.makedirs(cfg["out"], exist_ok=True)
    return cfg


def _prior_from(cfg):
    return mdl.PriorHyper(**cfg.get("prior", {}))


def _mcmc_from(cfg, seed):
    mc = cfg.get("mcmc", {})
    return samplers.McmcConfig(
        n_iter=int(mc.get("n_iter", 20000)),
        burn_in=int(mc.get("burn_in", 10000)),
        thin=int(mc.get("thin", 5)),
        seed=int(seed),
        rw_scale_eta=float(mc.get("rw_scale_eta", 0.5)),
        adapt=bool(mc.get("adapt", True)),
    )


def _ingest(cfg):
    data, info = io.ingest_csv(cfg["input"], cfg["response_column"],
                               cfg.get("standardize_columns", ()))
    return data, info


def cmd_fit(args):
    cfg = _load_config(args)
    out = cfg["out"]
    data, info = _ingest(cfg)
    variant = MODEL_FLAGS[cfg.get("model", "tbs")]
    hyper = _prior_from(cfg)
    mcmc = _mcmc_from(cfg, cfg["seed"])
    try:
        chain = samplers.run_chain(data, variant, hyper=hyper, config=mcmc)
    except samplers.McmcDivergenceError as exc:
        io.write_json({"error": str(exc), "iteration": exc.iteration,
                       "block": exc.block},
                      os.path.join(out, "divergence.json"))
        return 1
    io.write_chain_jsonl(chain, os.path.join(out, "chain.jsonl"))
    summ = samplers.select_support(chain)
    beta_hat, eta_hat, gamma_hat, sigma2_hat = metrics.point_estimates(chain)
    summary = {
        "model": cfg.get("model", "tbs"),
        "seed": cfg["seed"],
        "dropped_rows": info["dropped_rows"],
        "covariates": info["covariates"],
        "selected": summ.selected,
        "inclusion_probabilities": summ.inclusion_prob.tolist(),
        "beta_mean": summ.beta_mean.tolist(),
        "beta_median": summ.beta_median.tolist(),
        "ci_lower": summ.ci_lower.tolist(),
        "ci_upper": summ.ci_upper.tolist(),
        "eta_mean": eta_hat,
        "sigma2_mean": sigma2_hat,
        "ppl": metrics.ppl(chain, data, variant),
        "gamma_selected": summ.gamma_selected,
        "gamma_inclusion_probabilities": summ.gamma_inclusion_prob.tolist(),
        "acceptance_rates": chain.acceptance_rates,
    }
    io.write_json(summary, os.path.join(out, "summary.json"))
    raw = metrics.residual_table(data, beta_hat, "raw")
    metrics.write_csv(os.path.join(out, "residuals_raw.csv"),
                      ["residual", "normal_quantile"], raw)
    gam = gamma_hat if variant is Variant.TBSO_SG else None
    trans = metrics.residual_table(data, beta_hat, "transformed",
                                   eta_hat=eta_hat, gamma_hat=gam)
    metrics.write_csv(os.path.join(out, "residuals_transformed.csv"),
                      ["residual", "normal_quantile"], trans)
    alphas = cfg.get("alphas", [0.25, 0.5, 0.75])
    curves = metrics.quantile_curve_table(chain, data, alphas, variant)
    metrics.write_csv(os.path.join(out, "quantile_curves.csv"),
                      ["fitted_median"] + [f"q{a}" for a in alphas], curves)
    return 0


def cmd_simulate(args):
    cfg = _load_config(args)
    scenario = simlab.preset(cfg["preset"], seed=int(cfg["seed"]))
    methods = cfg.get("methods", ["tbs", "lasso"])
    replications = int(cfg.get("replications", 50))
    mc = cfg.get("mcmc")
    mcmc = None
    if mc:
        mcmc = replace(simlab.STUDY_MCMC,
                       n_iter=int(mc.get("n_iter", simlab.STUDY_MCMC.n_iter)),
                       burn_in=int(mc.get("burn_in", simlab.STUDY_MCMC.burn_in)),
                       thin=int(mc.get("thin", simlab.STUDY_MCMC.thin)))
    report = simlab.run_study(scenario, methods, replications=replications,
                              mcmc=mcmc, n_jobs=int(cfg.get("n_jobs", 1)))
    report.to_csv(os.path.join(cfg["out"], "study.csv"))
    return 0


def cmd_consistency(args):
    cfg = _load_config(args)
    eta = float(cfg.get("eta", 1.8))
    pi0 = float(cfg.get("pi0", 0.5))
    n_grid = [int(n) for n in cfg.get("n_grid", [20, 60, 120, 200])]
    replications = int(cfg.get("replications", 20))
    rows = consistency.consistency_curve(
        eta, pi0, n_grid, replications=replications,
        beta01=float(cfg.get("beta01", 3.0)),
        sigma0=float(cfg.get("sigma0", 1.0)),
        sigma_beta2=float(cfg.get("sigma_beta2", 1.0)),
        seed=int(cfg["seed"]))
    probs = [r[2] for r in rows]
    nondecreasing = all(b >= a - 0.05 for a, b in zip(probs, probs[1:]))
    curve_rows = [(n, p, pr) for n, p, pr in rows]
    metrics.write_csv(os.path.join(cfg["out"], "curve.csv"),
                      ["n", "p", "mean_posterior_prob_true_support"],
                      curve_rows)
    hyper = mdl.PriorHyper()
    brows = []
    rng = samplers.rng_for(int(cfg["seed"]), stream=77)
    for eta_b in cfg.get("bound_etas", [0.8, 1.2, 1.8]):
        for rep in range(int(cfg.get("bound_replications", 5))):
            data = consistency.simulate_alt_data(20, 2, 3.0, float(eta_b),
                                                 1.0, rng)
            status, ratio = consistency.bound_check_upper(
                data, float(eta_b), hyper,
                float(cfg.get("sigma_beta2", 1.0)))
            brows.append((float(eta_b), rep, status, ratio))
    metrics.write_csv(os.path.join(cfg["out"], "bounds.csv"),
                      ["eta", "replication", "status", "log_ratio"], brows)
    io.write_json({"nondecreasing_trend": nondecreasing},
                  os.path.join(cfg["out"], "trend.json"))
    return 0


def cmd_baseline(args):
    cfg = _load_config(args)
    data, info = _ingest(cfg)
    method = cfg.get("method", "lasso")
    seed = int(cfg["seed"])
    if method == "lasso":
        lam, _ = baselines.cv_select(data.X, data.y, "lasso", seed=seed)
        fit = baselines.lasso_fit(data.X, data.y, lam)
        result = {"method": "lasso", "lambda": lam,
                  "beta": fit.beta.tolist(), "intercept": fit.intercept,
                  "support": fit.support, "kkt_residual": fit.kkt_residual}
    elif method == "quantile":
        tau = float(cfg.get("tau", 0.5))
        lam, _ = baselines.cv_select(data.X, data.y, "quantile", tau=tau,
                                     seed=seed)
        fit = baselines.quantile_lasso_fit(data.X, data.y, tau, lam)
        result = {"method": "quantile", "tau": tau, "lambda": lam,
                  "beta": fit.beta.tolist(), "intercept": fit.intercept,
                  "support": fit.support, "smoothing": fit.smoothing,
                  "objective": fit.objective}
    else:
        raise SystemExit(f"unknown baseline method {method!r}")
    result["dropped_rows"] = info["dropped_rows"]
    io.write_json(result, os.path.join(cfg["out"], "baseline.json"))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tbs",
        description="Bayesian variable selection for skewed heteroscedastic "
                    "responses (transform-both-sides models)")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (("fit", cmd_fit), ("simulate", cmd_simulate),
                     ("consistency", cmd_consistency),
                     ("baseline", cmd_baseline)):
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out")
        sp.add_argument("--model", choices=sorted(MODEL_FLAGS))
        sp.add_argument("--preset")
        sp.add_argument("--replications", type=int)
        sp.set_defaults(func=fn)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
