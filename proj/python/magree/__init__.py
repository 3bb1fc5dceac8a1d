"""Overall agreement among multiple raters: OCP, OTDI and RAUOCPC."""

import json

from ._magree import (
    Dataset,
    MagreeError,
    bhsp_tau,
    classify_curve,
    cp_curve,
    dataset_from_values,
    distances,
    load_csv,
    mpd,
    parse_csv,
    preset_names,
    raucpc_ec,
    rmspd,
)
from . import _magree

__all__ = [
    "Dataset",
    "MagreeError",
    "analyze",
    "bhsp_tau",
    "classify_curve",
    "cp_curve",
    "dataset_from_values",
    "distances",
    "estimate",
    "load_csv",
    "mpd",
    "parse_csv",
    "preset_names",
    "raucpc_ec",
    "rmspd",
    "simulate",
]


def estimate(distances, index, *, delta0=None, pi0=None, tau0=None, delta_max=None, confidence=0.95):
    """Estimate one index from an N x M distance matrix (or a 1-D vector, M = 1)."""
    return json.loads(
        _magree.estimate_json(distances, index, delta0, pi0, tau0, delta_max, confidence)
    )


def analyze(dataset, *, indices=("ocp", "otdi", "rauocpc"), scope="overall", delta0=15.0,
            pi0=0.85, tau0=0.5875, delta_max=20.0, confidence=0.95):
    """Full report over the requested scopes, as a dict."""
    return json.loads(
        _magree.analyze_json(dataset, list(indices), scope, delta0, pi0, tau0, delta_max, confidence)
    )


def simulate(preset, *, index="ocp", n=100, replications=1000, replicates=3, seed=20240101,
             delta0=None, pi0=None, delta_max=None, oracle_n=100000, threads=0):
    """Monte Carlo summary (true value, bias, SD_t, SE_ind, SE_t, MSE, CR, nmiss) for a preset.

    Unset thresholds default to delta0 = 4 (3.5), pi0 = 0.8, delta_max = 5 (4) for
    normal (log-normal) presets.
    """
    return json.loads(
        _magree.simulate_json(preset, replicates, index, n, replications, seed, delta0, pi0,
                              delta_max, oracle_n, threads)
    )
