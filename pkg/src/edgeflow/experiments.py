"""Synthetic flows, accuracy metrics and the label-ratio sweep."""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .active import select
from .graph import FlowNetwork
from .spectral import SpectralBasis
from .ssl import LabelSet, SSLConfig, infer

CSV_FIELDS = ("method", "selection", "ratio", "seed", "rho", "runtime_ms")


@dataclass(frozen=True)
class SynthConfig:
    b: float = 0.02
    eps: float = 0.1

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")


def synth_flow(basis: SpectralBasis, cfg: SynthConfig = SynthConfig()) -> np.ndarray:
    """Flow whose spectral coefficients are ``b / (sigma + eps)``."""
    p = cfg.b / (basis.sigma + cfg.eps)
    return basis.V @ p


def pearson(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1 or a.size < 2:
        raise ValueError("need two equal-length vectors of length >= 2")
    da = a - a.mean()
    db = b - b.mean()
    na, nb = np.linalg.norm(da), np.linalg.norm(db)
    if na == 0 or nb == 0:
        raise ValueError("Pearson correlation undefined for a constant vector")
    return float(np.clip((da @ db) / (na * nb), -1.0, 1.0))


def relative_l2(pred, truth) -> float:
    """``||pred - truth|| / ||truth||``."""
    pred = np.asarray(pred, dtype=float)
    truth = np.asarray(truth, dtype=float)
    return float(np.linalg.norm(pred - truth) / np.linalg.norm(truth))


def label_count(m: int, ratio: float) -> int:
    if not 0 < ratio <= 1:
        raise ValueError("ratio must lie in (0, 1]")
    return math.floor(ratio * m + 1e-9)


def random_labels(m: int, ratio: float, seed=None) -> np.ndarray:
    """``floor(ratio * m)`` distinct edge indices, uniform without replacement."""
    k = label_count(m, ratio)
    return np.random.default_rng(seed).choice(m, size=k, replace=False)


def parse_ratios(text: str) -> list[float]:
    """``"0.1:0.1:0.9"`` (start:step:stop, inclusive) or ``"0.2,0.4"``."""
    if ":" in text:
        start, step, stop = (float(x) for x in text.split(":"))
        if step <= 0:
            raise ValueError("ratio step must be positive")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + k * step, 10) for k in range(count)]
    return [float(x) for x in text.split(",") if x.strip()]


@dataclass
class ExperimentResult:
    rows: list[dict] = field(default_factory=list)

    def cell(self, method, selection, ratio):
        return [r["rho"] for r in self.rows
                if r["method"] == method and r["selection"] == selection
                and r["ratio"] == ratio]

    def summary(self):
        """``{(method, selection, ratio): (mean, stderr, n_ok)}`` over finite rho."""
        keys = sorted({(r["method"], r["selection"], r["ratio"]) for r in self.rows})
        out = {}
        for key in keys:
            vals = np.array([v for v in self.cell(*key) if np.isfinite(v)])
            if vals.size == 0:
                out[key] = (math.nan, math.nan, 0)
                continue
            se = vals.std(ddof=1) / math.sqrt(vals.size) if vals.size > 1 else 0.0
            out[key] = (float(vals.mean()), float(se), int(vals.size))
        return out

    def write_csv(self, path_or_fh, timing: bool = True):
        own = isinstance(path_or_fh, (str, bytes)) or hasattr(path_or_fh, "__fspath__")
        fh = open(path_or_fh, "w", newline="") if own else path_or_fh
        try:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_FIELDS)
            for r in self.rows:
                rt = f"{r['runtime_ms']:.3f}" if timing else "NA"
                w.writerow([r["method"], r["selection"], repr(r["ratio"]), r["seed"],
                            repr(r["rho"]), rt])
        finally:
            if own:
                fh.close()


def run_sweep(net: FlowNetwork, ground_truth, methods=("flowssl",),
              selections=("random",), ratios=(0.1,), trials=20,
              cfg: SSLConfig = SSLConfig(), seeds=None, embed_dim: int = 2,
              on_error=None) -> ExperimentResult:
    """Infer flows for every (method, selection, ratio, seed) cell.

    Seeds default to ``1..trials``. A cell that fails (for instance a
    constant prediction, whose correlation is undefined) is recorded with
    ``rho = nan`` and the sweep continues; ``on_error(cell, exc)`` is
    called if given. Runtime covers selection plus inference.
    """
    truth = np.asarray(ground_truth, dtype=float)
    if truth.shape != (net.m,):
        raise ValueError(f"ground truth has shape {truth.shape}, expected ({net.m},)")
    seeds = list(range(1, trials + 1)) if seeds is None else list(seeds)
    result = ExperimentResult()
    for method in methods:
        for selection in selections:
            for ratio in ratios:
                k = label_count(net.m, ratio)
                for seed in seeds:
                    t0 = time.perf_counter()
                    try:
                        sel = select(selection, net, k, seed=seed, embed_dim=embed_dim)
                        labels = LabelSet.from_truth(truth, sel.indices)
                        pred = infer(method, net, labels, cfg)
                        rho = pearson(pred, truth)
                    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
                        rho = math.nan
                        if on_error is not None:
                            on_error((method, selection, ratio, seed), exc)
                    ms = 1000.0 * (time.perf_counter() - t0)
                    result.rows.append(dict(method=method, selection=selection,
                                            ratio=ratio, seed=seed, rho=rho,
                                            runtime_ms=ms))
    return result
