"""Command-line surface over the calibration, planning, and audit workflows.

Outputs are machine readable: JSON for single records, CSV for curves and
tables.  Stochastic commands record their seed in the output, and no
timestamps are emitted, so identical flags and seed produce byte-identical
output.  Exit codes: 0 success, 1 infeasible computation, 2 usage error.
"""

import io
import json
import math

import click
import numpy as np

from . import composition as comp
from . import cost as costmod
from . import mechanism as mech
from . import oracle
from . import risk
from . import sensitivity as sens
from .exceptions import InfeasibleBudgetError, InsufficientSamplesError, NoRootError

_PROB_DIGITS = "{:.6g}"


def _round6(x):
    if x is None:
        return None
    if isinstance(x, float) and math.isinf(x):
        return None
    return float(_PROB_DIGITS.format(x))


def _money(x):
    return round(float(x), 2)


def _emit_text(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", newline="") as handle:
            handle.write(text)
    else:
        click.echo(text, nl=False)


def _emit_json(payload: dict, output: str | None) -> None:
    _emit_text(json.dumps(payload, indent=2) + "\n", output)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def main():
    """Risk-aware calibration tools for Laplace-mechanism deployments."""


@main.command("risk")
@click.option("--case", type=click.IntRange(1, 3), default=1, show_default=True,
              help="1: noise randomness; 2: data sampling; 3: both coupled.")
@click.option("--eps0", type=float, default=None, help="Calibrated noise level.")
@click.option("--eps", type=float, default=None, help="Stronger privacy level of interest.")
@click.option("--gamma", type=float, default=None,
              help="Confidence (case 1/3) or target bound when solving for eps0.")
@click.option("--k", type=int, default=1, show_default=True, help="Query output dimension.")
@click.option("--rho", type=float, default=None, help="Estimation accuracy (cases 2 and 3).")
@click.option("--n", type=int, default=None, help="Sensitivity sample count (cases 2 and 3).")
@click.option("--eta", type=float, default=None,
              help="True-to-sampled sensitivity ratio (case 3).")
@click.option("--gamma2", type=float, default=None,
              help="Data-sampling confidence (cases 2 and 3).")
@click.option("--solve", type=click.Choice(["eps", "gamma", "eps0"]), default=None,
              help="Quantity to solve for; inferred from the missing flag when omitted.")
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
def cmd_risk(case, eps0, eps, gamma, k, rho, n, eta, gamma2, solve, output):
    """Assess or invert a privacy-level / confidence pair."""
    try:
        if case == 1:
            payload = _risk_case1(eps0, eps, gamma, k, solve)
        elif case == 2:
            payload = _risk_case2(eps, gamma2, rho, n)
        else:
            payload = _risk_case3(eps0, eps, gamma, k, rho, n, eta, gamma2, solve)
    except (NoRootError, ValueError) as exc:
        raise click.ClickException(str(exc))
    _emit_json(payload, output)


def _infer_solve(eps, gamma, solve):
    if solve is not None:
        return solve
    if gamma is None and eps is not None:
        return "gamma"
    if eps is None and gamma is not None:
        return "eps"
    raise click.UsageError("pass exactly one of --eps/--gamma, or both with --solve eps0")


def _require(ctx_name, **flags):
    missing = [name for name, value in flags.items() if value is None]
    if missing:
        raise click.UsageError(f"{ctx_name} requires --" + ", --".join(missing))


def _risk_case1(eps0, eps, gamma, k, solve):
    solve = _infer_solve(eps, gamma, solve)
    if solve == "gamma":
        _require("case 1 solving gamma", eps0=eps0, eps=eps)
        gamma = risk.explicit_confidence(eps, eps0, k)
    elif solve == "eps":
        _require("case 1 solving eps", eps0=eps0, gamma=gamma)
        eps = risk.level_for_confidence(gamma, eps0, k)
    else:
        _require("case 1 solving eps0", eps=eps, gamma=gamma)
        eps0 = risk.calibrate_noise_level(eps, gamma, k)
    record = risk.RiskAssessment(epsilon=eps, confidence=gamma, case="explicit")
    payload = record.to_dict()
    payload.update({"eps0": _round6(eps0), "k": k, "gamma": _round6(payload["gamma"]),
                    "eps": _round6(payload["eps"]), "solved": solve})
    return payload


def _risk_case2(eps, gamma2, rho, n):
    _require("case 2", gamma2=gamma2, rho=rho, n=n)
    bound = risk.dkw_adjusted_confidence(gamma2, rho, n)
    record = risk.RiskAssessment(epsilon=eps, confidence=bound, case="implicit",
                                 accuracy=rho, n_samples=n)
    payload = record.to_dict()
    payload.update({
        "eps": _round6(payload["eps"]) if eps is not None else None,
        "gamma": _round6(bound),
        "gamma2": _round6(gamma2),
        "alpha": _round6(risk.probabilistic_tolerance(rho, n)),
    })
    return payload


def _risk_case3(eps0, eps, gamma, k, rho, n, eta, gamma2, solve):
    _require("case 3", rho=rho, n=n, eta=eta, gamma2=gamma2, eps=eps)
    alpha = risk.probabilistic_tolerance(rho, n)
    if alpha <= 0:
        raise click.ClickException(
            f"sampling plan is vacuous: probabilistic tolerance {alpha:.6g} <= 0"
        )
    if solve == "eps0":
        _require("case 3 solving eps0", gamma=gamma)
        eps0 = risk.calibrate_noise_level_coupled(eps, gamma, gamma2, alpha, eta, k)
        bound = gamma
    else:
        _require("case 3", eps0=eps0)
        coupled = risk.coupled_confidence(eps, eps0, k, eta, gamma2)
        bound = risk.dkw_adjusted_confidence(coupled, rho, n)
    record = risk.RiskAssessment(epsilon=eps, confidence=bound, case="coupled",
                                 accuracy=rho, n_samples=n, sensitivity_ratio=eta)
    payload = record.to_dict()
    payload.update({
        "eps": _round6(payload["eps"]),
        "gamma": _round6(payload["gamma"]),
        "eps0": _round6(eps0),
        "k": k,
        "gamma2": _round6(gamma2),
        "alpha": _round6(alpha),
    })
    return payload


@main.command("sample-size")
@click.option("--rho", type=float, required=True, help="Estimation accuracy in (0, 1).")
@click.option("--alpha", type=float, required=True,
              help="Required probabilistic tolerance in (0, 1).")
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
def cmd_sample_size(rho, alpha, output):
    """Smallest sensitivity-sample count reaching the requested tolerance."""
    try:
        n = risk.sample_size_for(rho, alpha)
    except (ValueError, OverflowError) as exc:
        raise click.ClickException(str(exc))
    _emit_json({"rho": rho, "alpha": alpha, "n": n}, output)


@main.command("sensitivity")
@click.option("--data", type=click.Path(exists=True, dir_okay=False), required=True,
              help="CSV dataset with a header row and numeric columns.")
@click.option("--query", type=click.Choice(["count", "sum", "mean", "ridge"]), required=True)
@click.option("--column", type=int, default=None,
              help="Aggregated column (sum/mean) or predicate column (count).")
@click.option("--threshold", type=float, default=None, help="Count predicate threshold.")
@click.option("--ridge-lambda", type=float, default=0.01, show_default=True)
@click.option("--target", type=int, required=True,
              help="Column to min-max scale into [0, 1]; also the ridge response.")
@click.option("--p", type=int, required=True, help="Records per sampled dataset.")
@click.option("--n", type=int, required=True, help="Number of neighbour pairs to sample.")
@click.option("--gamma2", type=float, required=True,
              help="Confidence level at which to read the sensitivity quantile.")
@click.option("--rho", type=float, default=None,
              help="Estimation accuracy; enables tolerance and ratio reporting.")
@click.option("--seed", type=int, default=0, show_default=True, envvar="PAR_SEED")
@click.option("--samples-out", type=click.Path(dir_okay=False), default=None,
              help="Write raw sensitivity samples as single-column CSV.")
@click.option("--cdf-out", type=click.Path(dir_okay=False), default=None,
              help="Write the empirical CDF as value,cdf CSV.")
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
def cmd_sensitivity(data, query, column, threshold, ridge_lambda, target, p, n, gamma2,
                    rho, seed, samples_out, cdf_out, output):
    """Sample neighbour pairs and estimate the sensitivity distribution."""
    try:
        _, raw = sens.read_dataset_csv(data)
        source = sens.normalize(raw, target)
        spec_by_kind = {
            "count": lambda: sens.QuerySpec.count(column, threshold),
            "sum": lambda: sens.QuerySpec.sum(_need_column(column)),
            "mean": lambda: sens.QuerySpec.mean(_need_column(column)),
            "ridge": lambda: sens.QuerySpec.ridge(ridge_lambda, target),
        }
        query_spec = spec_by_kind[query]()
        samples = sens.sensitivity_samples(source, query_spec, p, n, seed)
        cdf = sens.empirical_cdf(samples)
        level = sens.sampled_sensitivity(cdf, gamma2)
        largest = cdf.quantile(1.0)
        ratio = None
        alpha = None
        if rho is not None:
            alpha = risk.probabilistic_tolerance(rho, n)
            if largest > 0:
                ratio = sens.eta_estimate(cdf, rho)
    except (ValueError, ArithmeticError) as exc:
        raise click.ClickException(str(exc))
    if samples_out:
        sens.write_samples_csv(samples_out, samples, seed=seed)
    if cdf_out:
        sens.write_cdf_csv(cdf_out, cdf, seed=seed)
    _emit_json({
        "query": query,
        "p": p,
        "n": n,
        "gamma2": _round6(gamma2),
        "sampled_sensitivity": level,
        "max_sampled_sensitivity": largest,
        "rho": rho,
        "alpha": _round6(alpha) if alpha is not None else None,
        "eta": _round6(ratio) if ratio is not None else None,
        "seed": seed,
    }, output)


def _need_column(column):
    if column is None:
        raise click.UsageError("this query requires --column")
    return column


@main.command("compose")
@click.option("--eps0", type=float, required=True)
@click.option("--delta", type=float, default=1e-5, show_default=True)
@click.option("--n-max", type=int, required=True, help="Largest evaluation count tabulated.")
@click.option("--eps", type=float, default=None,
              help="Assessed stronger level; defaults to eps0.")
@click.option("--gamma", type=float, default=None,
              help="Assessed confidence; defaults to 0 (no risk credit).")
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
def cmd_compose(eps0, delta, n_max, eps, gamma, output):
    """Tabulate basic, advanced, and risk-aware composition as CSV."""
    if (eps is None) != (gamma is None):
        raise click.UsageError("--eps and --gamma must be given together")
    if eps is None:
        eps, gamma = eps0, 0.0
    try:
        rows = comp.compare(eps0, delta, range(1, n_max + 1), eps, gamma)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    buffer = io.StringIO()
    comp.write_comparison_csv(buffer, rows)
    _emit_text(buffer.getvalue(), output)


@main.command("budget")
@click.option("--eps0", type=float, required=True)
@click.option("--E", "full_compensation", type=float, required=True,
              help="Per-person compensation with no privacy guarantee.")
@click.option("--c", "rate", type=float, default=1.0, show_default=True)
@click.option("--Emin", "floor_compensation", type=float, default=0.0, show_default=True)
@click.option("--N", "population", type=int, default=1, show_default=True)
@click.option("--k", type=int, default=1, show_default=True)
@click.option("--optimize", is_flag=True, help="Also report the budget-minimising level.")
@click.option("--mae-max", type=float, default=None,
              help="Largest acceptable expected absolute error.")
@click.option("--budget-cap", type=float, default=None, help="Total budget ceiling.")
@click.option("--curve-out", type=click.Path(dir_okay=False), default=None,
              help="Write an (eps, budget) curve CSV.")
@click.option("--curve-points", type=int, default=100, show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
def cmd_budget(eps0, full_compensation, rate, floor_compensation, population, k, optimize,
               mae_max, budget_cap, curve_out, curve_points, output):
    """Compensation budgets, optimal privacy level, and feasible level window."""
    if (mae_max is None) != (budget_cap is None):
        raise click.UsageError("--mae-max and --budget-cap must be given together")
    try:
        params = costmod.CostModelParams(full_compensation, floor_compensation, rate,
                                         population)
        at_eps0 = costmod.budget(eps0, eps0, params, k)
        payload = {"eps0": eps0, "budget_eps0": _money(at_eps0), "budget": _money(at_eps0)}
        gamma_for_bounds = 1.0
        if optimize:
            eps_min = costmod.epsilon_min(eps0, params, k)
            gamma_for_bounds = risk.explicit_confidence(eps_min, eps0, k)
            optimised = costmod.budget(eps_min, eps0, params, k)
            payload.update({
                "eps_min": _round6(eps_min),
                "gamma": _round6(gamma_for_bounds),
                "budget": _money(optimised),
                "savings": _money(at_eps0 - optimised),
            })
        feasible = True
        if mae_max is not None:
            bounds = costmod.epsilon_bounds(mae_max, budget_cap / population,
                                            gamma_for_bounds, eps0, params)
            feasible = bounds.feasible
            payload.update({
                "eps_lower": _round6(bounds.lower),
                "eps_upper": _round6(bounds.upper),
                "feasible": feasible,
            })
        if curve_out:
            grid = eps0 * np.arange(1, curve_points + 1) / curve_points
            curve = [costmod.budget(float(e), eps0, params, k) for e in grid]
            costmod.write_budget_curve_csv(curve_out, grid, curve)
    except InfeasibleBudgetError as exc:
        raise click.ClickException(str(exc))
    except (ValueError, NoRootError) as exc:
        raise click.ClickException(str(exc))
    _emit_json(payload, output)
    if not feasible:
        raise SystemExit(1)


@main.command("verify")
@click.option("--target", type=click.Choice(["gamma1", "overlap", "composition", "cost"]),
              required=True)
@click.option("--samples", type=int, default=200_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True, envvar="PAR_SEED")
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
def cmd_verify(target, samples, seed, output):
    """Validate analytic formulas against independent oracles; exit 1 on failure."""
    try:
        checks = _VERIFIERS[target](samples, seed)
    except InsufficientSamplesError as exc:
        raise click.ClickException(str(exc))
    payload = {
        "target": target,
        "samples": samples,
        "seed": seed,
        "checks": checks,
        "pass": all(check["pass"] for check in checks),
    }
    _emit_json(payload, output)
    if not payload["pass"]:
        raise SystemExit(1)


def _check(name, analytic, estimate, stderr, tolerance):
    gap = abs(analytic - estimate)
    return {
        "check": name,
        "analytic": _round6(analytic),
        "mc_estimate": _round6(estimate),
        "stderr": _round6(stderr),
        "gap": _round6(gap),
        "pass": bool(gap <= max(4.0 * stderr, tolerance)),
    }


def _verify_gamma1(samples, seed):
    combos = [(1, 0.08, 0.1), (1, 0.27, 0.5), (2, 0.5, 1.0), (5, 0.5, 1.0)]
    checks = []
    for k, eps, eps0 in combos:
        config = oracle.McConfig(sample_count=samples, master_seed=seed)
        report = oracle.validate_confidence(eps, eps0, k, config)
        report = {"check": f"confidence k={k} eps={eps} eps0={eps0}",
                  **{key: (_round6(val) if isinstance(val, float) else val)
                     for key, val in report.items()}}
        checks.append(report)
    return checks


def _verify_overlap(samples, seed):
    del seed  # grid integration is deterministic
    checks = []
    for eps1, eps2 in [(1.0, 0.6), (1.0, 1.0), (2.0, 0.5)]:
        closed = mech.overlap(eps1, eps2, 1.0)
        grid = np.linspace(-80.0, 80.0, max(samples, 10_000))
        first = np.exp(-np.abs(grid) * eps1) * eps1 / 2.0
        second = np.exp(-np.abs(grid) * eps2) * eps2 / 2.0
        numeric = float(np.trapezoid(np.minimum(first, second), grid))
        checks.append(_check(f"overlap eps1={eps1} eps2={eps2}", closed, numeric,
                             0.0, 0.003))
    return checks


def _verify_composition(samples, seed):
    del samples, seed  # closed-form cross-checks
    checks = []
    worst_reduction = 0.0
    worst_dominance = 0.0
    for eps0 in np.linspace(0.05, 1.0, 20):
        baseline = comp.advanced_composition(float(eps0), 10, 1e-5)
        worst_reduction = max(worst_reduction, abs(
            comp.par_composition(float(eps0), float(eps0), 0.0, 10, 1e-5) - baseline))
        for gamma in np.linspace(0.0, 1.0, 5):
            value = comp.par_composition(float(eps0), float(eps0) / 2.0, float(gamma),
                                         10, 1e-5)
            worst_dominance = max(worst_dominance, value - baseline)
    checks.append(_check("zero-confidence reduction", worst_reduction, 0.0, 0.0, 1e-12))
    checks.append(_check("dominance over advanced", max(worst_dominance, 0.0), 0.0,
                         0.0, 1e-12))
    mu = 0.8 * 0.08 * math.expm1(0.08) + 0.2 * 0.1 * math.expm1(0.1)
    expected = 0.1 * math.sqrt(20.0 * math.log(1e5)) + 10.0 * mu
    checks.append(_check("reference composition point",
                         comp.par_composition(0.1, 0.08, 0.80, 10, 1e-5), expected,
                         0.0, 1e-12))
    return checks


def _verify_cost(samples, seed):
    del samples, seed
    params = costmod.CostModelParams(full_compensation=5500.0)
    checks = []
    for eps0 in (0.1, 0.5, 1.0):
        golden = costmod.epsilon_min(eps0, params, k=1)
        newton = costmod.epsilon_min_scalar(eps0)
        checks.append(_check(f"optimal level routes eps0={eps0}", golden, newton,
                             0.0, 1e-4))
        saving = costmod.budget(eps0, eps0, params) - costmod.budget(golden, eps0, params)
        checks.append({"check": f"saving non-negative eps0={eps0}",
                       "analytic": _round6(saving), "mc_estimate": 0.0, "stderr": 0.0,
                       "gap": 0.0, "pass": bool(saving >= 0.0)})
    return checks


_VERIFIERS = {
    "gamma1": _verify_gamma1,
    "overlap": _verify_overlap,
    "composition": _verify_composition,
    "cost": _verify_cost,
}


if __name__ == "__main__":
    main()
