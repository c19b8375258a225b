"""Celery tasks for Monte Carlo embedding batches."""

from __future__ import annotations

import logging
import time
from typing import Any, Dict

from .celery_app import celery_app
from .embedding import run_batch_payload

logger = logging.getLogger(__name__)


@celery_app.task(name="walkmax.simulate_embedding_batch")
def simulate_embedding_batch(payload: Dict[str, Any]) -> Dict[str, Any]:
    """
    Run one batch of Azema-Yor stopped walks.

    Args:
        payload: Batch description from ``embedding.batch_payload``: measure document,
            step law, run count, seed entropy and spawn key, step cap.

    Returns:
        Batch tallies as produced by ``BatchResult.to_payload``.
    """
    started_at = time.time()
    try:
        result = run_batch_payload(payload)
    except Exception:  # pylint: disable=broad-except
        logger.exception("Embedding batch %s failed", payload.get("spawn_key"))
        raise
    logger.info(
        "Embedding batch %s: %s runs, %s capped in %.2fs",
        payload.get("spawn_key"),
        result["completed"],
        result["capped"],
        time.time() - started_at,
    )
    return result
