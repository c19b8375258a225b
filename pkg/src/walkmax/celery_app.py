from celery import Celery

from .config import get_settings


def _build_app() -> Celery:
    """Return the Celery app, with broker and result backend taken from the settings."""
    settings = get_settings()
    app = Celery("walkmax", broker=settings.celery_broker_url, backend=settings.celery_backend_url)
    app.conf.task_default_queue = "walkmax-embedding"
    app.conf.task_default_routing_key = "walkmax-embedding"
    app.conf.task_serializer = "json"
    app.conf.result_serializer = "json"
    return app


celery_app = _build_app()
celery_app.autodiscover_tasks(["walkmax"])
