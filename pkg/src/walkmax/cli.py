import argparse
import logging
import sys
from pathlib import Path
from typing import Iterable, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .azema_yor import load_spec, verify_martingale_H
from .config import get_settings
from .difference import check_sufficient_condition
from .embedding import build_plan, stopped_law_exact, stopped_law_mc, verify_embedding
from .errors import ConsistencyError, ParameterError, WalkmaxError
from .inequalities import default_lambdas, doob_lp, doob_maximal, doob_sweep
from .kennedy import compare_pgf, kennedy_build, kennedy_function, kennedy_pole
from .measures import CenteredMeasure, load_measure
from .rationals import parse_rational
from .reports import (
    Report,
    doob_report,
    embed_report,
    header,
    joint_report,
    kennedy_report,
    martingale_report,
    render,
    simulate_report,
)
from .walk import WalkParams, joint_dist, simulate

logger = logging.getLogger(__name__)

Subcommand = Literal["simulate", "joint", "verify-martingale", "kennedy", "doob", "embed"]


class RunConfig(BaseModel):
    """One CLI invocation; echoed into the report header."""

    model_config = ConfigDict(extra="forbid")

    subcommand: Subcommand
    p: Optional[str] = None
    q: Optional[str] = None
    r: Optional[str] = None
    seed: int = Field(0, ge=0)
    format: Optional[Literal["json", "csv"]] = None
    output: Optional[Path] = None

    t: Optional[int] = Field(None, ge=0)
    horizon: Optional[int] = Field(None, ge=0)
    spec: Optional[Path] = None
    t_max: Optional[int] = Field(None, ge=0)
    a: Optional[str] = None
    b: Optional[str] = None
    n: Optional[int] = Field(None, ge=1)
    grid: int = Field(10, ge=2)
    pgf_horizon: int = Field(200, ge=0)
    lambdas: List[str] = Field(default_factory=list)
    sweep: bool = False
    lp_exponent: Optional[str] = None
    measure: Optional[Path] = None
    mode: Literal["auto", "exact", "mc"] = "auto"
    runs: Optional[int] = Field(None, ge=1)
    threads: int = Field(1, ge=1)
    sigmas: float = Field(3.0, gt=0)
    step_cap: Optional[int] = Field(None, ge=1)

    @model_validator(mode="after")
    def _default_format(self) -> "RunConfig":
        if self.format is None:
            self.format = "csv" if self.subcommand == "doob" else "json"
        return self

    def walk_params(self) -> WalkParams:
        if self.p is None or self.q is None:
            raise ParameterError(f"{self.subcommand} needs --p and --q")
        return WalkParams.from_strings(self.p, self.q, self.r)

    def echo(self) -> dict:
        return self.model_dump(mode="json", exclude={"output"}, exclude_none=True)

    def require(self, *names: str) -> None:
        missing = [name for name in names if getattr(self, name) is None]
        if missing:
            flags = ", ".join(f"--{name.replace('_', '-')}" for name in missing)
            raise ParameterError(f"{self.subcommand} needs {flags}")


def _rational_arg(raw: str) -> str:
    """argparse type for ``"num/den"`` strings."""
    try:
        parse_rational(raw)
    except ParameterError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    return raw


def _header(config: RunConfig):
    return header(config.subcommand, config.seed, config.echo())


def _run_simulate(config: RunConfig) -> Report:
    config.require("horizon")
    path = simulate(config.walk_params(), config.horizon, config.seed)
    return simulate_report(_header(config), path)


def _run_joint(config: RunConfig) -> Report:
    config.require("t")
    return joint_report(_header(config), joint_dist(config.walk_params(), config.t))


def _run_verify_martingale(config: RunConfig) -> Report:
    config.require("spec", "t_max")
    spec = load_spec(config.spec)
    if config.p is not None and config.walk_params() != spec.params:
        raise ParameterError("--p/--q disagree with the step law stored in the spec file")
    verdict = verify_martingale_H(spec, config.t_max)
    return martingale_report(_header(config), verdict, spec.y_max)


def _run_kennedy(config: RunConfig) -> Report:
    config.require("a", "b", "n")
    settings = get_settings()
    params = config.walk_params()
    kp = kennedy_build(config.a, config.b, config.n, params, x_max=max(config.n, config.grid))
    residuals = check_sufficient_condition(kennedy_function(kp, config.grid, config.grid, config.grid), params)
    comparison = compare_pgf(kp, config.pgf_horizon)
    try:
        pole = kennedy_pole(config.b, config.n, params)
    except WalkmaxError:
        pole = None
    return kennedy_report(_header(config), kp, residuals, comparison, settings.kennedy_tolerance, pole)


def _run_doob(config: RunConfig) -> Report:
    config.require("t")
    params = config.walk_params()
    lambdas = [parse_rational(raw) for raw in config.lambdas]
    if config.sweep:
        rows = doob_sweep(params, config.t, lambdas or None)
    else:
        rows = [doob_maximal(params, config.t, lam) for lam in lambdas or default_lambdas(config.t)]
    lp = None
    if config.lp_exponent is not None:
        lp = doob_lp(params, config.t, parse_rational(config.lp_exponent))
    return doob_report(_header(config), rows, lp)


def _run_embed(config: RunConfig) -> Report:
    config.require("measure")
    return run_embedding(config, load_measure(config.measure))


def run_embedding(config: RunConfig, measure: CenteredMeasure) -> Report:
    """Embed an already loaded measure as configured by ``config``."""
    settings = get_settings()
    params = config.walk_params()
    plan = build_plan(measure)
    mode = config.mode
    if mode == "auto":
        mode = "mc" if plan.measure.is_parametric or config.runs is not None else "exact"
    if mode == "exact":
        law = stopped_law_exact(plan, params, settings)
    else:
        law = stopped_law_mc(
            plan, params, config.runs or 100_000, config.seed, config.threads, config.step_cap, settings
        )
    verdict = verify_embedding(plan, params, law, sigmas=config.sigmas)
    logger.info("Embedding verdict: %s", "pass" if verdict.passed else "fail")
    return embed_report(_header(config), plan, law, verdict)


_HANDLERS = {
    "simulate": _run_simulate,
    "joint": _run_joint,
    "verify-martingale": _run_verify_martingale,
    "kennedy": _run_kennedy,
    "doob": _run_doob,
    "embed": _run_embed,
}


def build_report(config: RunConfig) -> Report:
    """The report for ``config``; raises ``WalkmaxError`` on bad input."""
    return _HANDLERS[config.subcommand](config)


def run(config: RunConfig) -> int:
    """Dispatch ``config``, write its report and return the exit status."""
    try:
        report = build_report(config)
    except ConsistencyError as exc:
        logger.error("%s", exc)
        print(f"walkmax {config.subcommand}: {exc}", file=sys.stderr)
        return 1
    except WalkmaxError as exc:
        logger.error("%s", exc)
        print(f"walkmax {config.subcommand}: {exc}", file=sys.stderr)
        return 2

    text = render(report, config.format)
    if config.output is not None:
        config.output.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="walkmax",
        description="Exact and Monte Carlo checks for martingales of a simple random walk and its maximum.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=_rational_arg, help="Probability of an up-step, e.g. 1/2")
    common.add_argument("--q", type=_rational_arg, help="Probability of a down-step")
    common.add_argument("--r", type=_rational_arg, help="Probability of staying put (default 1 - p - q)")
    common.add_argument("--seed", type=int, default=0, help="Seed recorded in every report")
    common.add_argument("--format", choices=["json", "csv"], help="Report format (default: csv for doob, json otherwise)")
    common.add_argument("--output", type=Path, help="Write the report here instead of stdout")

    commands = parser.add_subparsers(dest="subcommand", required=True)

    sim = commands.add_parser("simulate", parents=[common], help="Simulate one path")
    sim.add_argument("--horizon", type=int, required=True)

    joint = commands.add_parser("joint", parents=[common], help="Exact law of (Z_t, M_t)")
    joint.add_argument("--t", type=int, required=True)

    verify = commands.add_parser("verify-martingale", parents=[common], help="Check H(Z, M) from a spec file")
    verify.add_argument("--spec", type=Path, required=True)
    verify.add_argument("--t-max", type=int, required=True)

    kennedy = commands.add_parser("kennedy", parents=[common], help="Build and check a Kennedy martingale")
    kennedy.add_argument("--a", type=_rational_arg, required=True)
    kennedy.add_argument("--b", type=_rational_arg, required=True)
    kennedy.add_argument("--n", type=int, required=True)
    kennedy.add_argument("--grid", type=int, default=10, help="Residual grid size in t, x and y")
    kennedy.add_argument("--pgf-horizon", type=int, default=200)

    doob = commands.add_parser("doob", parents=[common], help="Doob maximal and L^pi inequalities")
    doob.add_argument("--t", type=int, required=True)
    doob.add_argument("--lambda", dest="lambdas", type=_rational_arg, action="append", default=[])
    doob.add_argument("--sweep", action="store_true", help="Check every t up to --t")
    doob.add_argument("--lp-exponent", type=_rational_arg)

    embed = commands.add_parser("embed", parents=[common], help="Azema-Yor Skorokhod embedding")
    embed.add_argument("--measure", type=Path, required=True)
    embed.add_argument("--mode", choices=["auto", "exact", "mc"], default="auto")
    embed.add_argument("--runs", type=int)
    embed.add_argument("--threads", type=int, default=1)
    embed.add_argument("--sigmas", type=float, default=3.0)
    embed.add_argument("--step-cap", type=int)
    return parser


def main(argv: Iterable[str] | None = None) -> int:
    settings = get_settings()
    logging.basicConfig(
        level=settings.log_level,
        stream=sys.stderr,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    values = {key: value for key, value in vars(args).items() if value is not None}
    try:
        config = RunConfig(**values)
    except ValidationError as exc:
        first = exc.errors()[0]
        flag = str(first["loc"][0]).replace("_", "-") if first.get("loc") else "arguments"
        parser.error(f"--{flag}: {first['msg']}")
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
