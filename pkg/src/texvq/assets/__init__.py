"""Bundled reference model and forward-pass parity vectors."""

from importlib import resources
from pathlib import Path


def _asset_path(name: str) -> Path:
    with resources.as_file(resources.files(__name__) / name) as path:
        return Path(path)


def reference_model_path() -> Path:
    return _asset_path("reference_model.json")


def reference_vectors_path() -> Path:
    return _asset_path("reference_vectors.json")
