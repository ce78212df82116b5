"""Bundled example graphs and policy files, plus experiment configurations.

Graphs are stored as ``<name>.json``, policy sets as ``<name>.policy.json``
and experiment configurations as ``<name>.config.json``.
"""

from __future__ import annotations

import json
from importlib import resources
from typing import Any

from ..graph_core import MixedGraph, graph_from_dict
from ..intervention import PolicySet, policy_set_from_json

__all__ = ["corpus_names", "corpus_path", "load_corpus_graph", "load_corpus_policy", "load_corpus_config"]

_KINDS = {"graph": ".json", "policy": ".policy.json", "config": ".config.json"}


def _files():
    return resources.files(__name__)


def _kind_of(filename: str) -> str | None:
    for kind in ("policy", "config"):
        if filename.endswith(_KINDS[kind]):
            return kind
    return "graph" if filename.endswith(".json") else None


def corpus_names(kind: str = "graph") -> list[str]:
    """Sorted names of the bundled items of ``kind`` (graph, policy or config)."""
    if kind not in _KINDS:
        raise ValueError(f"unknown corpus kind {kind!r}")
    suffix = _KINDS[kind]
    return sorted(
        f.name[: -len(suffix)] for f in _files().iterdir() if _kind_of(f.name) == kind
    )


def corpus_path(name: str, kind: str = "graph"):
    """A traversable handle on a bundled file."""
    path = _files() / f"{name}{_KINDS[kind]}"
    if not path.is_file():
        raise KeyError(f"no bundled {kind} named {name!r}; have {corpus_names(kind)}")
    return path


def _read(name: str, kind: str) -> Any:
    return json.loads(corpus_path(name, kind).read_text(encoding="utf-8"))


def load_corpus_graph(name: str) -> MixedGraph:
    return graph_from_dict(_read(name, "graph"))


def load_corpus_policy(name: str) -> PolicySet:
    return policy_set_from_json(_read(name, "policy"))


def load_corpus_config(name: str) -> dict[str, Any]:
    return _read(name, "config")
