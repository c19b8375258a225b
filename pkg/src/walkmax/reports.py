"""Report models shared by the CLI and the HTTP service, with JSON and CSV rendering.

Exact quantities travel as ``"num/den"`` strings, floating-point ones as numbers; the
header's ``modes`` map labels every numeric field with its mode.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

from . import __version__
from .azema_yor import MartingaleVerdict
from .difference import SufficientConditionReport
from .embedding import EmbeddingPlan, EmbeddingVerdict, StoppedLaw
from .inequalities import DoobReport, LpReport
from .kennedy import KennedyParams, PgfComparison
from .rationals import format_rational
from .rng import PRNG_ID
from .walk import JointDist, PathSample, law_rows

Mode = Literal["exact", "float", "monte-carlo"]
Number = Union[str, float, int]


def _number(value: Any) -> Number:
    """Rationals as strings, floats untouched."""
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, float):
        return value
    return int(value)


def _mode(value: Any) -> Mode:
    return "float" if isinstance(value, float) else "exact"


class ReportHeader(BaseModel):
    """Provenance block carried by every report."""

    model_config = ConfigDict(extra="forbid")

    tool: str = "walkmax"
    version: str = __version__
    prng: str = PRNG_ID
    command: str
    seed: int
    config: Dict[str, Any] = Field(default_factory=dict)
    modes: Dict[str, Mode] = Field(default_factory=dict)


class Report(BaseModel):
    model_config = ConfigDict(extra="forbid")

    header: ReportHeader
    passed: bool = True

    def csv_rows(self) -> List[Dict[str, Any]]:
        raise NotImplementedError


class SimulateReport(Report):
    horizon: int
    steps: List[int]
    z: List[int]
    m: List[int]

    def csv_rows(self) -> List[Dict[str, Any]]:
        rows = [{"t": 0, "step": "", "z": 0, "m": 0}]
        for t, step in enumerate(self.steps, start=1):
            rows.append({"t": t, "step": step, "z": self.z[t], "m": self.m[t]})
        return rows


class JointRow(BaseModel):
    model_config = ConfigDict(extra="forbid")

    z: int
    m: int
    mass: str


class JointReport(Report):
    t: int
    states: int
    rows: List[JointRow]

    def csv_rows(self) -> List[Dict[str, Any]]:
        return [row.model_dump() for row in self.rows]


class MartingaleReport(Report):
    t_max: int
    y_max: int
    states_checked: int
    counterexample: Optional[List[int]] = None
    lhs: Optional[Number] = None
    rhs: Optional[Number] = None

    def csv_rows(self) -> List[Dict[str, Any]]:
        x, y = self.counterexample if self.counterexample else ("", "")
        return [
            {
                "passed": self.passed,
                "t_max": self.t_max,
                "states_checked": self.states_checked,
                "x": x,
                "y": y,
                "lhs": "" if self.lhs is None else self.lhs,
                "rhs": "" if self.rhs is None else self.rhs,
            }
        ]


class KennedyReport(Report):
    a: Number
    b: Number
    n: int
    alpha_plus: float
    alpha_minus: float
    h: List[float]
    interior_residual: Number
    boundary_residual: Number
    interior_relative: float
    boundary_relative: float
    residual_tolerance: float
    pgf: float
    pgf_oracle: float
    pgf_horizon: int
    pgf_tail_bound: Optional[float]
    pgf_difference: float
    pgf_conclusive: bool
    pole: Optional[float] = None

    def csv_rows(self) -> List[Dict[str, Any]]:
        return [{"x": x, "h": value} for x, value in enumerate(self.h)]


class DoobRow(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    t: int
    lam: Number = Field(..., alias="lambda")
    ceil_lambda: int
    prob: str
    lhs: str
    rhs: str
    relation: str
    regime: str


class LpSummary(BaseModel):
    model_config = ConfigDict(extra="forbid")

    t: int
    pi: Number
    lhs: Number
    rhs: Number
    intermediate: Optional[str] = None
    passed: bool


class DoobResult(Report):
    rows: List[DoobRow]
    lp: Optional[LpSummary] = None

    def csv_rows(self) -> List[Dict[str, Any]]:
        return [row.model_dump(by_alias=True) for row in self.rows]


class AtomRow(BaseModel):
    model_config = ConfigDict(extra="forbid")

    x: int
    probability: Number
    target: str
    psi: Optional[int] = None
    stderr: Optional[float] = None


class EmbedReport(Report):
    mode: Literal["exact", "monte-carlo"]
    C: int
    atoms: List[AtomRow]
    expected_T: Number
    expected_T_stderr: Optional[float] = None
    n_runs: int = 0
    n_capped: int = 0
    truncation_budget: str = "0"
    residual_mass: Optional[str] = None
    methods: List[str] = Field(default_factory=list)
    warnings: List[str] = Field(default_factory=list)
    failures: List[str] = Field(default_factory=list)

    def csv_rows(self) -> List[Dict[str, Any]]:
        return [
            {
                "x": atom.x,
                "psi": "" if atom.psi is None else atom.psi,
                "probability": atom.probability,
                "stderr": "" if atom.stderr is None else atom.stderr,
                "target": atom.target,
            }
            for atom in self.atoms
        ]


def header(command: str, seed: int, config: Dict[str, Any], modes: Optional[Dict[str, Mode]] = None) -> ReportHeader:
    return ReportHeader(command=command, seed=seed, config=config, modes=modes or {})


def simulate_report(head: ReportHeader, path: PathSample) -> SimulateReport:
    head.modes.update({"steps": "exact", "z": "exact", "m": "exact"})
    return SimulateReport(header=head, horizon=path.horizon, steps=list(path.steps), z=list(path.z), m=list(path.m))


def joint_report(head: ReportHeader, dist: JointDist) -> JointReport:
    head.modes.update({"mass": "exact"})
    rows = [JointRow(**row) for row in law_rows(dist)]
    return JointReport(header=head, t=dist.t, states=len(rows), rows=rows)


def martingale_report(head: ReportHeader, verdict: MartingaleVerdict, y_max: int) -> MartingaleReport:
    head.modes.update({"lhs": _mode(verdict.lhs), "rhs": _mode(verdict.rhs)})
    return MartingaleReport(
        header=head,
        passed=verdict.passed,
        t_max=verdict.t_max,
        y_max=y_max,
        states_checked=verdict.states_checked,
        counterexample=list(verdict.counterexample) if verdict.counterexample else None,
        lhs=None if verdict.lhs is None else _number(verdict.lhs),
        rhs=None if verdict.rhs is None else _number(verdict.rhs),
    )


def kennedy_report(
    head: ReportHeader,
    kp: KennedyParams,
    residuals: SufficientConditionReport,
    comparison: PgfComparison,
    residual_tolerance: float,
    pole: Optional[float] = None,
) -> KennedyReport:
    head.modes.update(
        {
            "a": _mode(kp.a),
            "b": _mode(kp.b),
            "alpha_plus": "float",
            "alpha_minus": "float",
            "h": "float",
            "interior_residual": _mode(residuals.interior_residual),
            "boundary_residual": _mode(residuals.boundary_residual),
            "pgf": "float",
            "pgf_oracle": "float",
        }
    )
    passed = residuals.within(residual_tolerance) and comparison.passed
    return KennedyReport(
        header=head,
        passed=passed,
        a=_number(kp.a),
        b=_number(kp.b),
        n=kp.n,
        alpha_plus=kp.alpha_plus,
        alpha_minus=kp.alpha_minus,
        h=list(kp.h),
        interior_residual=_number(residuals.interior_residual),
        boundary_residual=_number(residuals.boundary_residual),
        interior_relative=residuals.interior_relative,
        boundary_relative=residuals.boundary_relative,
        residual_tolerance=residual_tolerance,
        pgf=comparison.closed_form,
        pgf_oracle=comparison.oracle,
        pgf_horizon=comparison.horizon,
        pgf_tail_bound=comparison.tail_bound if comparison.conclusive else None,
        pgf_difference=comparison.difference,
        pgf_conclusive=comparison.conclusive,
        pole=pole,
    )


def doob_report(head: ReportHeader, rows: List[DoobReport], lp: Optional[LpReport] = None) -> DoobResult:
    head.modes.update({"prob": "exact", "lhs": "exact", "rhs": "exact"})
    summary = None
    if lp is not None:
        head.modes.update({"lp.lhs": _mode(lp.lhs), "lp.rhs": _mode(lp.rhs)})
        summary = LpSummary(
            t=lp.t,
            pi=_number(lp.pi),
            lhs=_number(lp.lhs),
            rhs=_number(lp.rhs),
            intermediate=None if lp.intermediate is None else format_rational(lp.intermediate),
            passed=lp.holds,
        )
    passed = all(row.holds for row in rows) and (lp is None or lp.holds)
    return DoobResult(header=head, passed=passed, rows=[DoobRow(**row.to_row()) for row in rows], lp=summary)


def embed_report(head: ReportHeader, plan: EmbeddingPlan, law: StoppedLaw, verdict: EmbeddingVerdict) -> EmbedReport:
    value_mode: Mode = "exact" if law.mode == "exact" else "monte-carlo"
    head.modes.update({"probability": value_mode, "expected_T": value_mode, "target": "exact"})
    xs = sorted(set(plan.support) | set(law.atoms))
    atoms = [
        AtomRow(
            x=x,
            probability=_number(Fraction(law.probability(x))) if law.mode == "exact" else float(law.probability(x)),
            target=format_rational(plan.measure.mass(x)),
            psi=plan.psi_of(x),
            stderr=law.stderr.get(x) if law.mode != "exact" else None,
        )
        for x in xs
    ]
    return EmbedReport(
        header=head,
        passed=verdict.passed,
        mode=law.mode,
        C=plan.C,
        atoms=atoms,
        expected_T=_number(law.expected_T),
        expected_T_stderr=law.expected_T_stderr,
        n_runs=law.n_runs,
        n_capped=law.n_capped,
        truncation_budget=format_rational(law.truncation_budget),
        residual_mass=None if law.residual_mass is None else format_rational(law.residual_mass),
        methods=list(law.methods),
        warnings=list(law.warnings),
        failures=list(verdict.failures),
    )


def render(report: Report, fmt: Literal["json", "csv"] = "json") -> str:
    """Serialise ``report``; identical reports give identical text."""
    if fmt == "json":
        return report.model_dump_json(indent=2, by_alias=True) + "\n"
    buffer = io.StringIO()
    head = report.header
    for key, value in head.model_dump().items():
        text = value if isinstance(value, str) else json.dumps(value, sort_keys=True)
        buffer.write(f"# {key}: {text}\n")
    buffer.write(f"# passed: {json.dumps(report.passed)}\n")
    rows = report.csv_rows()
    if rows:
        writer = csv.DictWriter(buffer, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return buffer.getvalue()
