"""FastAPI service exposing walkmax reports over HTTP."""

import logging
from typing import Any, Callable, Dict, Literal, Optional

from fastapi import FastAPI, HTTPException, Query
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from . import __version__
from .cli import RunConfig, build_report, run_embedding
from .errors import WalkmaxError
from .measures import measure_from_payload
from .reports import Report

logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
)
logger = logging.getLogger(__name__)

app = FastAPI(
    title="Walkmax Report API",
    description="Exact laws, martingale checks and Skorokhod embeddings for a simple random walk",
    version=__version__,
)


class EmbedRequest(BaseModel):
    """Measure-file document plus the step law and Monte Carlo settings."""

    model_config = ConfigDict(extra="forbid")

    measure: Dict[str, Any]
    p: str
    q: str
    r: Optional[str] = None
    mode: Literal["auto", "exact", "mc"] = "auto"
    runs: Optional[int] = Field(None, ge=1, le=1_000_000)
    seed: int = Field(0, ge=0)
    threads: int = Field(1, ge=1, le=16)
    sigmas: float = Field(3.0, gt=0)


def _respond(produce: Callable[[], Report], what: str) -> Dict[str, Any]:
    try:
        report = produce()
    except (WalkmaxError, ValidationError) as e:
        logger.info("Rejected %s request: %s", what, e)
        raise HTTPException(status_code=422, detail=str(e))
    except Exception as e:
        logger.exception("Failed to build %s report", what)
        raise HTTPException(status_code=500, detail=f"Failed to build {what} report: {str(e)}")
    return report.model_dump(mode="json", by_alias=True)


@app.get("/", tags=["Health"])
async def root():
    """Root endpoint providing API information."""
    return {
        "service": "Walkmax Report API",
        "version": __version__,
        "status": "operational",
    }


@app.get("/health", tags=["Health"])
async def health_check():
    """Health check endpoint."""
    return {"status": "healthy"}


@app.get("/joint", tags=["Laws"])
def get_joint(
    p: str,
    q: str,
    t: int = Query(..., ge=0, le=200),
    r: Optional[str] = None,
):
    """Exact joint law of (Z_t, M_t)."""
    return _respond(lambda: build_report(RunConfig(subcommand="joint", p=p, q=q, r=r, t=t)), "joint")


@app.get("/doob", tags=["Inequalities"])
def get_doob(
    p: str,
    q: str,
    t: int = Query(..., ge=0, le=200),
    lam: Optional[str] = Query(None, alias="lambda"),
    r: Optional[str] = None,
):
    """
    Doob maximal inequality at time t.

    Args:
        lam: Level lambda as a rational string; every half-integer up to t when omitted
    """
    lambdas = [lam] if lam is not None else []
    return _respond(
        lambda: build_report(RunConfig(subcommand="doob", p=p, q=q, r=r, t=t, lambdas=lambdas)), "doob"
    )


@app.get("/kennedy", tags=["Martingales"])
def get_kennedy(
    p: str,
    q: str,
    a: str,
    b: str,
    n: int = Query(..., ge=1, le=50),
    r: Optional[str] = None,
):
    """Kennedy martingale coefficients, residuals and generating function."""
    return _respond(
        lambda: build_report(RunConfig(subcommand="kennedy", p=p, q=q, r=r, a=a, b=b, n=n)), "kennedy"
    )


@app.post("/embed", tags=["Embedding"])
def post_embed(request: EmbedRequest):
    """Stopped law of the Azema-Yor embedding and its verdict."""

    def produce() -> Report:
        config = RunConfig(
            subcommand="embed",
            p=request.p,
            q=request.q,
            r=request.r,
            mode=request.mode,
            runs=request.runs,
            seed=request.seed,
            threads=request.threads,
            sigmas=request.sigmas,
        )
        return run_embedding(config, measure_from_payload(request.measure))

    return _respond(produce, "embed")


if __name__ == "__main__":
    import uvicorn

    uvicorn.run("walkmax.report_api:app", host="0.0.0.0", port=8000, reload=False)
