"""Instance loading: JSON config plus one CSV file per relation.

Config schema::

    {
      "relations": [{"name": "R1", "file": "r1.csv", "attrs": ["A", "B"]}, ...],
      "join_tree_edges": [["R1", "R2"], ...],
      "projection": ["A", "B"] | null
    }

CSV files carry a header row of attribute names; every declared attribute
must be present and every cell must parse as a finite number.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import ParseError, SchemaError
from .relational import DatabaseInstance, Relation, build_join_tree


def load_config(path: str | Path) -> dict:
    path = Path(path)
    try:
        cfg = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"config {path}: invalid JSON ({exc})") from exc
    for key in ("relations", "join_tree_edges"):
        if key not in cfg:
            raise SchemaError(f"config {path}: missing key {key!r}")
    return cfg


def load_relation_csv(name: str, attrs: Sequence[str], path: str | Path) -> Relation:
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{name}: CSV {path} has no header row") from None
        header = [h.strip() for h in header]
        missing = [a for a in attrs if a not in header]
        if missing:
            raise SchemaError(f"{name}: CSV {path} is missing columns {missing}")
        extra = [h for h in header if h not in attrs]
        if extra:
            raise SchemaError(f"{name}: CSV {path} has undeclared columns {extra}")
        col_of = {a: header.index(a) for a in attrs}
        rows = []
        for rownum, rec in enumerate(reader, start=1):
            if not rec or all(not c.strip() for c in rec):
                continue
            vals = []
            for a in attrs:
                cell = rec[col_of[a]].strip() if col_of[a] < len(rec) else ""
                try:
                    v = float(cell)
                except ValueError:
                    raise ParseError(f"{name} row {rownum} col {a}: cannot parse {cell!r}") from None
                if not math.isfinite(v):
                    raise ParseError(f"{name} row {rownum} col {a}: non-finite value {cell!r}")
                vals.append(v)
            rows.append(vals)
    return Relation(name, attrs, np.array(rows, dtype=np.float64).reshape(len(rows), len(attrs)))


def load_instance(config: dict | str | Path, base_dir: Optional[Path] = None) -> DatabaseInstance:
    """Build an unreduced instance from a config dict or config file path.

    Acyclicity is validated here via the join-tree construction; semi-join
    reduction is a separate step.
    """
    if isinstance(config, (str, Path)):
        base_dir = base_dir or Path(config).parent
        config = load_config(config)
    base_dir = Path(base_dir) if base_dir is not None else Path(".")
    relations = []
    for spec in config["relations"]:
        for key in ("name", "attrs"):
            if key not in spec:
                raise SchemaError(f"relation entry missing {key!r}: {spec}")
        if "rows" in spec:
            rel = Relation(spec["name"], spec["attrs"], np.array(spec["rows"], dtype=np.float64))
        elif "file" in spec:
            fp = Path(spec["file"])
            if not fp.is_absolute():
                fp = base_dir / fp
            rel = load_relation_csv(spec["name"], spec["attrs"], fp)
        else:
            raise SchemaError(f"relation {spec['name']!r} has neither 'file' nor 'rows'")
        relations.append(rel)
    edges = [tuple(e) for e in config["join_tree_edges"]]
    tree = build_join_tree(relations, edges)
    return DatabaseInstance(relations, tree, reduced=False, projection=config.get("projection"))
