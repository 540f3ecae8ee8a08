"""Summary ROC analysis of multi-reader binary diagnostic studies."""

import json

from ._core import (
    BivariateFit,
    ContingencyTable,
    PhmFit,
    ReaderTheta,
    SimConfig,
    SrocError,
    auc_numeric,
    compare_auc,
    confidence_region,
    generate,
    read_csv,
    reader_theta,
    sroc_curve,
    summary_curve,
)
from . import _core

__all__ = [
    "BivariateFit",
    "ContingencyTable",
    "PhmFit",
    "ReaderTheta",
    "SimConfig",
    "SrocError",
    "analyze",
    "auc_numeric",
    "compare_auc",
    "confidence_region",
    "coverage",
    "fit_bivariate",
    "fit_phm",
    "generate",
    "pooled_point",
    "read_csv",
    "reader_theta",
    "sroc_curve",
    "summary_curve",
    "simulate",
]


def _rows(rows):
    out = []
    for r in rows:
        r = tuple(r)
        if len(r) == 5:
            r = r + (None,)
        out.append(r)
    return out


def analyze(rows, *, svg=False, **options):
    """Run the full analysis on (reader_id, tp, fp, fn, tn[, group]) rows.

    Returns the report as a dict, or (report, svg_text) when svg is true.
    """
    text, figure = _core.analyze(_rows(rows), svg=svg, **options)
    report = json.loads(text)
    return (report, figure) if svg else report


def fit_phm(rows, effects="random", correction="affected", level=0.95):
    """Lehmann (proportional hazards) SROC fit."""
    return _core.fit_phm(_rows(rows), effects, correction, level)


def fit_bivariate(rows, effects="random", correction="affected"):
    """Bivariate logit-normal REML fit."""
    return _core.fit_bivariate(_rows(rows), effects, correction)


def pooled_point(rows, weight_by_cases=False):
    """Naive mean (FPR, Se) across readers."""
    return _core.pooled_point(_rows(rows), weight_by_cases)


def simulate(**fields):
    """Generate a synthetic study; keyword arguments are SimConfig fields."""
    return generate(_config(fields))


def coverage(n_sims, *, engine="phm", effects="random", level=0.95, bootstrap_b=200, threads=1, **fields):
    """Monte Carlo coverage of the SROC intervals; returns the report dict."""
    return json.loads(_core.coverage(_config(fields), n_sims, engine, effects, level, bootstrap_b, threads))


def _config(fields):
    c = SimConfig()
    for key, value in fields.items():
        if not hasattr(c, key):
            raise TypeError(f"unknown simulation field {key!r}")
        setattr(c, key, value)
    return c
