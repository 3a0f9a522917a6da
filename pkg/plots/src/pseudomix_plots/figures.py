"""Figure construction from the experiment CSV schemas.

Extraction is a pure function of the CSV text: every plotted series carries
exactly the parsed column values, so identical files always yield identical
series (the self-test compares them field by field; images are never pixel
compared). The stair-step vertical markers are recomputed here from (q, k)
with exact rational floors - deliberately not imported from the producer
package - and cross-checked against the n_err_l1 column when present.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

FIGURE_IDS = ("error-vs-k", "l1-contribution", "lmax-sweep")


class SchemaError(ValueError):
    """An input CSV lacks a column the figure needs."""


@dataclass(frozen=True)
class FigureSpec:
    figure_id: str
    inputs: tuple[str, ...]
    output: str

    def __post_init__(self):
        if self.figure_id not in FIGURE_IDS:
            raise ValueError(
                f"unknown figure id {self.figure_id!r}; expected one of {FIGURE_IDS}"
            )
        if len(self.inputs) != 1:
            raise ValueError(f"{self.figure_id} takes exactly one input CSV")


def _read_rows(path: str, required: list[str]) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for column in required:
            if column not in header:
                raise SchemaError(f"{path} is missing required column {column!r}")
        return list(reader)


def _float(cell: str) -> float | None:
    return float(cell) if cell not in ("", None) else None


def max_flips_allowed(q: Fraction, k: int, length: int) -> int:
    """floor(q*k*length), exact; local reimplementation of the producer rule."""
    return math.floor(q * k * length)


def stair_jump_positions(q: Fraction, ks: list[int]) -> list[int]:
    """The k values where the unit-length flip allowance increments."""
    jumps = []
    for prev, k in zip(ks, ks[1:]):
        if max_flips_allowed(q, k, 1) > max_flips_allowed(q, prev, 1):
            jumps.append(k)
    return jumps


def extract_series(spec: FigureSpec, q: Fraction | None = None) -> dict:
    """Parse the figure's data series from its input CSV."""
    path = spec.inputs[0]
    if spec.figure_id == "error-vs-k":
        rows = _read_rows(
            path,
            ["k", "error_rate", "wilson_lo", "wilson_hi", "bound_noiseless", "bound_noisy"],
        )
        return {
            "k": [int(r["k"]) for r in rows],
            "error_rate": [float(r["error_rate"]) for r in rows],
            "wilson_lo": [float(r["wilson_lo"]) for r in rows],
            "wilson_hi": [float(r["wilson_hi"]) for r in rows],
            "bound_noiseless": [_float(r["bound_noiseless"]) for r in rows],
            "bound_noisy": [_float(r["bound_noisy"]) for r in rows],
        }
    if spec.figure_id == "l1-contribution":
        rows = _read_rows(
            path,
            ["k", "reps", "error_rate", "errors_from_l1", "q_eff_l1", "n_err_l1"],
        )
        if q is None:
            raise SchemaError("the l1-contribution figure needs the tolerance q")
        ks = [int(r["k"]) for r in rows]
        jumps = stair_jump_positions(q, ks)
        for r in rows:
            expected = max_flips_allowed(q, int(r["k"]), 1)
            if int(r["n_err_l1"]) != expected:
                raise SchemaError(
                    f"{path}: n_err_l1={r['n_err_l1']} at k={r['k']} disagrees "
                    f"with floor({q}*k) = {expected}; wrong q?"
                )
        return {
            "k": ks,
            "error_rate": [float(r["error_rate"]) for r in rows],
            "l1_rate": [int(r["errors_from_l1"]) / int(r["reps"]) for r in rows],
            "q_eff_l1": [float(r["q_eff_l1"]) for r in rows],
            "jumps": jumps,
        }
    rows = _read_rows(path, ["lmax", "reps", "errors", "error_rate"])
    return {
        "lmax": [int(r["lmax"]) for r in rows],
        "error_rate": [float(r["error_rate"]) for r in rows],
    }


def _positive_or_nan(values):
    return [v if v is not None and v > 0 else float("nan") for v in values]


def render(spec: FigureSpec, q: Fraction | None = None) -> dict:
    """Write the figure image and return the plotted series."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    series = extract_series(spec, q)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    if spec.figure_id == "error-vs-k":
        ks = series["k"]
        err = series["error_rate"]
        yerr_lo = [e - lo for e, lo in zip(err, series["wilson_lo"])]
        yerr_hi = [hi - e for e, hi in zip(err, series["wilson_hi"])]
        ax.errorbar(
            ks, _positive_or_nan(err), yerr=[yerr_lo, yerr_hi],
            fmt="o-", capsize=3, label="observed wrong-guess rate (Wilson 95%)",
        )
        ax.plot(ks, _positive_or_nan(series["bound_noiseless"]), "s--",
                label="noiseless bound")
        ax.plot(ks, _positive_or_nan(series["bound_noisy"]), "^--",
                label="noise-tolerant bound")
        ax.set_yscale("log")
        ax.set_xlabel("k")
        ax.set_ylabel("error rate")
        ax.legend()
    elif spec.figure_id == "l1-contribution":
        ks = series["k"]
        ax.plot(ks, _positive_or_nan(series["error_rate"]), "o-", label="total error rate")
        ax.plot(ks, _positive_or_nan(series["l1_rate"]), "s-",
                label="errors from length-1 programs")
        ax.set_yscale("log")
        ax.set_xlabel("k")
        ax.set_ylabel("error rate")
        twin = ax.twinx()
        twin.step(ks, series["q_eff_l1"], where="post", color="darkred", alpha=0.6,
                  label="unit-length allowance")
        twin.set_ylabel("flips allowed at length 1")
        for k_jump in series["jumps"]:
            ax.axvline(k_jump, linestyle="--", color="gray", alpha=0.8)
        ax.legend(loc="lower left")
    else:
        ax.plot(series["lmax"], series["error_rate"], "o-")
        ax.set_xlabel("maximum program length")
        ax.set_ylabel("error rate")
        ax.set_title("wrong-guess rate vs search-list size")
    fig.tight_layout()
    Path(spec.output).parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(spec.output, dpi=150)
    plt.close(fig)
    return series
