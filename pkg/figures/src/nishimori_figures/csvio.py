"""Reading of the versioned sweep CSV artifacts.

Files carry ``# key=value`` metadata lines (including ``schema``) before a
header row.  Rendering is a pure view of the columns: this module parses,
validates, and converts, and nothing downstream recomputes statistics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

KNOWN_SCHEMAS = {
    "nishimori-sweep-v1",
    "nishimori-grid-v1",
    "nishimori-sitemap-v1",
    "nishimori-hist-v1",
    "nishimori-fidelity-v1",
}


@dataclass
class Table:
    schema: str
    meta: dict
    columns: list
    rows: list  # list of dicts (str values)

    def require(self, *columns):
        missing = [c for c in columns if c not in self.columns]
        if missing:
            raise ValueError(f"missing columns {missing} in {self.schema} file")

    def floats(self, column, rows=None):
        return np.array([float(r[column]) for r in (rows if rows is not None else self.rows)])

    def distinct(self, column):
        seen = []
        for r in self.rows:
            if r[column] not in seen:
                seen.append(r[column])
        return seen

    def where(self, **kw):
        return [r for r in self.rows if all(r[k] == v for k, v in kw.items())]


def read_table(path, expect_schema=None) -> Table:
    schema = None
    meta = {}
    header = None
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    k, v = body.split("=", 1)
                    meta[k.strip()] = v.strip()
                    if k.strip() == "schema":
                        schema = v.strip()
                continue
            cells = line.split(",")
            if header is None:
                header = cells
            else:
                rows.append(dict(zip(header, cells)))
    if schema is None or schema not in KNOWN_SCHEMAS:
        raise ValueError(f"{path}: missing or unknown schema header ({schema!r})")
    if expect_schema and schema != expect_schema:
        raise ValueError(f"{path}: schema {schema!r}, expected {expect_schema!r}")
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return Table(schema=schema, meta=meta, columns=header, rows=rows)
