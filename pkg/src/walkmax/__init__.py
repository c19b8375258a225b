"""Martingales of a simple random walk and its running maximum."""

__version__ = "1.0.0"

from .azema_yor import AzemaYorSpec, azema_yor_H, g_pq, verify_martingale_H  # noqa: E402
from .difference import TimeSpaceFunction, check_sufficient_condition  # noqa: E402
from .embedding import (  # noqa: E402
    EmbeddingPlan,
    StoppedLaw,
    build_plan,
    stopped_law_exact,
    stopped_law_mc,
    verify_embedding,
)
from .inequalities import doob_lp, doob_maximal  # noqa: E402
from .kennedy import KennedyParams, kennedy_build, kennedy_pgf  # noqa: E402
from .measures import CenteredMeasure, centered_geometric, from_atoms  # noqa: E402
from .walk import JointDist, PathSample, WalkParams, enumerate_paths, joint_dist, simulate  # noqa: E402

__all__ = [
    "AzemaYorSpec",
    "CenteredMeasure",
    "EmbeddingPlan",
    "JointDist",
    "KennedyParams",
    "PathSample",
    "StoppedLaw",
    "TimeSpaceFunction",
    "WalkParams",
    "__version__",
    "azema_yor_H",
    "build_plan",
    "centered_geometric",
    "check_sufficient_condition",
    "doob_lp",
    "doob_maximal",
    "enumerate_paths",
    "from_atoms",
    "g_pq",
    "joint_dist",
    "kennedy_build",
    "kennedy_pgf",
    "simulate",
    "stopped_law_exact",
    "stopped_law_mc",
    "verify_embedding",
    "verify_martingale_H",
]
