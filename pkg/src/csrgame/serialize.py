"""Instance files (JSON, version ``csr-v1``), trace CSVs and DOT export."""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Sequence, TextIO

from .dynamics import Trace
from .errors import ValidationError
from .game import Allocation, Instance, make_allocation
from .graph import Graph

VERSION = "csr-v1"
TRACE_HEADER = ["step", "player", "old_resource", "new_resource", "old_radius",
                "new_radius", "potential", "social_cost"]


@dataclass(frozen=True)
class InstanceFile:
    n: int
    edges: tuple[tuple[int, int], ...]
    k: int
    allocation: Optional[Allocation] = None
    metadata: dict = field(default_factory=dict, compare=True)

    @classmethod
    def from_instance(cls, inst: Instance, allocation: Optional[Sequence[int]] = None,
                      metadata: Optional[dict] = None) -> "InstanceFile":
        alloc = make_allocation(inst, allocation) if allocation is not None else None
        return cls(inst.n, inst.graph.edges, inst.k, alloc, dict(metadata or {}))

    def instance(self) -> Instance:
        return Instance(Graph(self.n, self.edges), self.k)

    def to_json(self) -> str:
        doc: dict[str, Any] = {
            "version": VERSION,
            "n": self.n,
            "k": self.k,
            "edges": [list(e) for e in sorted(self.edges)],
        }
        if self.allocation is not None:
            doc["allocation"] = format_allocation(self.allocation)
        if self.metadata:
            doc["metadata"] = self.metadata
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "InstanceFile":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"instance file is not valid JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise ValidationError("instance file must be a JSON object")
        if doc.get("version") != VERSION:
            raise ValidationError(f"field 'version': expected {VERSION!r}, got {doc.get('version')!r}")
        n = _int_field(doc, "n")
        k = _int_field(doc, "k")
        raw_edges = doc.get("edges")
        if not isinstance(raw_edges, list):
            raise ValidationError("field 'edges': expected a list of [u, v] pairs")
        edges = []
        for idx, e in enumerate(raw_edges):
            if (not isinstance(e, list) or len(e) != 2
                    or not all(isinstance(x, int) and not isinstance(x, bool) for x in e)):
                raise ValidationError(f"field 'edges[{idx}]': expected [u, v] integers, got {e!r}")
            edges.append((min(e), max(e)))
        meta = doc.get("metadata", {})
        if not isinstance(meta, dict):
            raise ValidationError("field 'metadata': expected an object")
        try:
            inst = Instance(Graph(n, edges), k)
        except ValidationError as exc:
            raise ValidationError(f"field 'edges'/'n'/'k': {exc}") from None
        alloc = None
        if doc.get("allocation") is not None:
            try:
                alloc = make_allocation(inst, parse_allocation(doc["allocation"]))
            except ValidationError as exc:
                raise ValidationError(f"field 'allocation': {exc}") from None
        return cls(n, inst.graph.edges, k, alloc, meta)


def _int_field(doc: dict, name: str) -> int:
    v = doc.get(name)
    if not isinstance(v, int) or isinstance(v, bool):
        raise ValidationError(f"field {name!r}: expected an integer, got {v!r}")
    return v


def parse_allocation(text) -> tuple[int, ...]:
    if isinstance(text, list):
        items = text
    else:
        items = [s for s in str(text).split(",") if s.strip() != ""]
    try:
        return tuple(int(x) for x in items)
    except (TypeError, ValueError):
        raise ValidationError(f"allocation must be a comma list of integers, got {text!r}") from None


def format_allocation(P: Sequence[int]) -> str:
    return ",".join(str(int(x)) for x in P)


def read_instance(path) -> InstanceFile:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    return InstanceFile.from_json(text)


def write_instance(f: InstanceFile, path) -> None:
    Path(path).write_text(f.to_json())


def write_trace(trace: Trace, dest) -> None:
    """Write one CSV row per step; ``dest`` is a path or an open text stream."""
    if hasattr(dest, "write"):
        _write_trace_rows(trace, dest)
    else:
        with open(dest, "w", newline="") as fh:
            _write_trace_rows(trace, fh)


def _write_trace_rows(trace: Trace, fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(TRACE_HEADER)
    for s in trace.steps:
        m = s.move
        w.writerow([s.step, m.player, m.old_resource, m.new_resource, m.old_radius,
                    m.new_radius, f"{s.potential:.12g}", s.social_cost])


def read_trace(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


_PALETTE = ["#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00",
            "#ffff33", "#a65628", "#f781bf", "#999999", "#66c2a5"]


def to_dot(inst: Instance, P: Optional[Sequence[int]] = None) -> str:
    """Graphviz source with nodes filled by the colour of their resource."""
    lines = ["graph csr {", "  node [style=filled];"]
    for i in range(inst.n):
        if P is None:
            lines.append(f"  {i};")
        else:
            colour = _PALETTE[P[i] % len(_PALETTE)]
            lines.append(f'  {i} [label="{i}:o{P[i]}", fillcolor="{colour}"];')
    for u, v in inst.graph.edges:
        lines.append(f"  {u} -- {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"
