"""CSV -> figure rendering and the ``render`` command-line entry point.

Expected column schemas per figure kind:

* ``eigen_panels``: an axis column, E1_mhz..E4_mhz, and sixteen
  coefficients a00_1..a11_4 (four per eigenstate),
* ``spectrum``: an axis column plus the populations p00, p01, p10, p11,
* ``gate_traces``: t_ns plus p00..p11, optionally a fidelity column.

Rendering is a pure function of CSV content and recipe; identical inputs
produce an identical PNG byte stream on a pinned toolchain.  Exit codes:
0 success, 1 usage/input error, 2 schema mismatch.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

KINDS = ("eigen_panels", "spectrum", "gate_traces")

_POPULATION_COLUMNS = ("p00", "p01", "p10", "p11")
_EIGEN_COLUMNS = tuple(f"E{k}_mhz" for k in range(1, 5)) + tuple(
    f"a{i}{j}_{k}" for k in range(1, 5) for i in (0, 1) for j in (0, 1))


class SchemaError(ValueError):
    """CSV columns do not match the figure kind."""


class InputError(ValueError):
    pass


@dataclass(frozen=True)
class Table:
    columns: tuple[str, ...]
    rows: np.ndarray
    provenance: dict[str, str]

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, self.columns.index(name)]


@dataclass(frozen=True)
class FigureRecipe:
    """What to draw: input CSV, figure kind, output path, reference marks."""

    path: str
    kind: str
    output: str
    vline: float | None = None
    bar: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"kind must be one of {KINDS}, got {self.kind!r}")


def read_table(path: str) -> Table:
    provenance: dict[str, str] = {}
    header: list[str] | None = None
    rows: list[list[float]] = []
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    with fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                body = line.lstrip("#").strip()
                if "=" in body:
                    key, _, value = body.partition("=")
                    provenance[key.strip()] = value.strip()
                continue
            if header is None:
                header = [c.strip() for c in line.split(",")]
                continue
            try:
                rows.append([float(v) for v in line.split(",")])
            except ValueError as exc:
                raise InputError(f"{path}: non-numeric data row {line!r}") from exc
    if header is None or not rows:
        raise InputError(f"{path}: no header or no data rows")
    data = np.asarray(rows, dtype=float)
    if data.shape[1] != len(header):
        raise InputError(f"{path}: ragged rows")
    return Table(columns=tuple(header), rows=data, provenance=provenance)


def _require_columns(table: Table, needed, kind: str) -> None:
    missing = [c for c in needed if c not in table.columns]
    if missing:
        raise SchemaError(
            f"columns do not match kind {kind!r}: expected {list(needed)}, "
            f"found {list(table.columns)}, missing {missing}")


def _render_eigen_panels(table: Table, recipe: FigureRecipe, summary: dict):
    _require_columns(table, _EIGEN_COLUMNS, recipe.kind)
    axis = table.columns[0]
    x = table.rows[:, 0]
    fig, axes = plt.subplots(2, 2, figsize=(9.0, 6.0), sharex=True)
    for k, ax in enumerate(axes.flat, start=1):
        for i in (0, 1):
            for j in (0, 1):
                ax.plot(x, table.column(f"a{i}{j}_{k}"), label=f"a{i}{j}")
        ax.set_title(f"eigenstate {k} (E{k} in MHz)", fontsize=9)
        if recipe.vline is not None:
            ax.axvline(recipe.vline, color="gray", lw=0.9)
        ax.set_ylabel("coefficient", fontsize=8)
    for ax in axes[1]:
        ax.set_xlabel(f"{axis}", fontsize=8)
    axes[0, 0].legend(fontsize=7)
    if recipe.vline is not None:
        summary["vline"] = recipe.vline
    return fig


def _render_spectrum(table: Table, recipe: FigureRecipe, summary: dict):
    _require_columns(table, _POPULATION_COLUMNS, recipe.kind)
    axis = table.columns[0]
    x = table.rows[:, 0]
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for name in _POPULATION_COLUMNS:
        ax.plot(x, table.column(name), label=name)
    if recipe.vline is not None:
        ax.axvline(recipe.vline, color="k", ls="--", lw=1.0)
        summary["vline"] = recipe.vline
    ax.set_xlabel(f"{axis}")
    ax.set_ylabel("steady-state occupation")
    ax.legend(fontsize=8)
    return fig


def _render_gate_traces(table: Table, recipe: FigureRecipe, summary: dict):
    _require_columns(table, ("t_ns",) + _POPULATION_COLUMNS, recipe.kind)
    t = table.column("t_ns")
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for name in _POPULATION_COLUMNS:
        ax.plot(t, table.column(name), label=name)
    if "fidelity" in table.columns:
        ax.plot(t, table.column("fidelity"), "k-", lw=1.2, label="fidelity")
    bar = recipe.bar
    if bar is None and "pulse_end_ns" in table.provenance:
        bar = float(table.provenance["pulse_end_ns"])
    if bar is not None:
        # the bar marks the end of the applied pulse sequence
        ax.axvline(bar, color="0.3", lw=3.0, alpha=0.7)
        summary["bar"] = bar
    ax.set_xlabel("t (ns)")
    ax.set_ylabel("population / fidelity")
    ax.legend(fontsize=8)
    return fig


_RENDERERS = {
    "eigen_panels": _render_eigen_panels,
    "spectrum": _render_spectrum,
    "gate_traces": _render_gate_traces,
}


def render(recipe: FigureRecipe) -> dict:
    """Render one figure; returns a summary of what was drawn."""
    table = read_table(recipe.path)
    summary: dict = {"kind": recipe.kind, "rows": int(table.rows.shape[0]),
                     "output": recipe.output}
    fig = _RENDERERS[recipe.kind](table, recipe, summary)
    fig.savefig(recipe.output, dpi=140,
                metadata={"Software": "dimerplot"})
    plt.close(fig)
    return summary


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, schema mismatches 2
        raise InputError(message)


def main(argv: list[str] | None = None) -> int:
    parser = _Parser(
        prog="render", description="render dimergate CSV output as a figure")
    parser.add_argument("--kind", choices=KINDS, required=True)
    parser.add_argument("--in", dest="path", required=True, help="input CSV")
    parser.add_argument("--out", dest="output", required=True, help="output image")
    parser.add_argument("--vline", type=float, default=None,
                        help="vertical reference line position")
    parser.add_argument("--bar", type=float, default=None,
                        help="end-of-pulse bar position (gate_traces)")
    try:
        args = parser.parse_args(argv)
        summary = render(FigureRecipe(path=args.path, kind=args.kind,
                                      output=args.output, vline=args.vline,
                                      bar=args.bar))
    except SchemaError as exc:
        print(f"render: schema mismatch: {exc}", file=sys.stderr)
        return 2
    except (InputError, OSError) as exc:
        print(f"render: error: {exc}", file=sys.stderr)
        return 1
    print(f"render: wrote {summary['output']} ({summary['kind']}, "
          f"{summary['rows']} rows)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
