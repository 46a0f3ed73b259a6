from .scoring import (
    AdapterError,
    LoadedModel,
    ScoredToken,
    Window,
    load_model,
    plan_windows,
    read_documents,
    score_document,
    score_documents_to_files,
    write_scores,
    write_sidecar,
)

__version__ = "0.1.0"
