"""Reading the engine's CSV result files.

A result file is a leading `# key=value ...` provenance comment, one header
row, and data rows.  Each figure kind expects one of the fixed schemas below;
any header deviation is reported by column name rather than silently
reinterpreted.
"""

from __future__ import annotations

from dataclasses import dataclass


SCHEMAS = {
    "estimates": ("n", "observable", "mean", "stderr", "trials", "aborted"),
    "rate": ("observable", "eta_hat", "c_hat", "r2", "eta_lo", "eta_hi",
             "n_min", "n_max"),
    "tails": ("n", "prob", "lo", "hi", "trials"),
    "density": ("bin_lo", "bin_hi", "hist_mass", "analytic_mass", "density"),
}

_TEXT_COLUMNS = {"observable"}


class SchemaError(ValueError):
    """Header does not match the expected schema; names the offending column."""


@dataclass(frozen=True)
class ResultTable:
    kind: str
    meta: dict
    columns: tuple
    rows: tuple                 # tuples of parsed values

    def column(self, name):
        i = self.columns.index(name)
        return [r[i] for r in self.rows]


def _check_header(header, kind):
    expected = SCHEMAS[kind]
    for i, want in enumerate(expected):
        if i >= len(header):
            raise SchemaError(f"missing column {want!r} (position {i + 1})")
        if header[i] != want:
            raise SchemaError(
                f"column {i + 1} is {header[i]!r}, expected {want!r}")
    if len(header) > len(expected):
        raise SchemaError(f"unexpected extra column {header[len(expected)]!r}")


def read_result_csv(path, kind) -> ResultTable:
    """Parse one result file and validate its header against the schema of
    the given kind."""
    if kind not in SCHEMAS:
        raise ValueError(f"unknown result kind {kind!r}")
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    meta = {}
    while lines and lines[0].startswith("#"):
        for tok in lines.pop(0).lstrip("# ").split():
            if "=" in tok:
                key, val = tok.split("=", 1)
                meta[key] = val
    if not lines:
        raise SchemaError("file has no header row")
    header = lines.pop(0).split(",")
    _check_header(header, kind)
    rows = []
    for ln in lines:
        parts = ln.split(",")
        if len(parts) != len(header):
            raise SchemaError(
                f"row has {len(parts)} fields, header has {len(header)}")
        rows.append(tuple(p if c in _TEXT_COLUMNS else float(p)
                          for c, p in zip(header, parts)))
    return ResultTable(kind=kind, meta=meta, columns=tuple(header),
                       rows=tuple(rows))
