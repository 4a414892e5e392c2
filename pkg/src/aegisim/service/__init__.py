from .api import ApiServer, RunWorker, scenario_config_from_doc, serve
from .checkpoints import (
    load_bank,
    load_memory,
    load_policy,
    save_bank,
    save_memory,
    save_policy,
    stores_from_payload,
    stores_payload,
)
from .report import ReportError, write_report
from .state import AlertRecord, RunRecord, ServiceState
from .store import CHECKPOINT_SCHEMA_VERSION, JsonlStore, StoreError, load_checkpoint, save_checkpoint

__all__ = [
    "ApiServer",
    "AlertRecord",
    "CHECKPOINT_SCHEMA_VERSION",
    "JsonlStore",
    "ReportError",
    "RunRecord",
    "RunWorker",
    "ServiceState",
    "StoreError",
    "load_bank",
    "load_checkpoint",
    "load_memory",
    "load_policy",
    "save_bank",
    "save_checkpoint",
    "save_memory",
    "save_policy",
    "scenario_config_from_doc",
    "serve",
    "stores_from_payload",
    "stores_payload",
    "write_report",
]
