"""Quantitative drug-likeness estimate.

Geometric mean of eight asymmetric-double-sigmoid desirability functions
over (mw, logp, hba, hbd, tpsa, rotb, arom, alerts), using the published
parameter table shipped in ``data/qed_ads.tsv`` and the unweighted-mean
variant.  Desirabilities are clamped into (0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from ..descriptors import DescriptorSet

_PROPERTY_ORDER = ("mw", "logp", "hba", "hbd", "tpsa", "rotb", "arom", "alerts")
_CLAMP_MIN = 1e-9


@dataclass(frozen=True)
class AdsParams:
    a: float
    b: float
    c: float
    d: float
    e: float
    f: float
    dmax: float


@lru_cache(maxsize=1)
def ads_table() -> dict[str, AdsParams]:
    text = resources.files("molpilot.data").joinpath("qed_ads.tsv").read_text()
    table = {}
    for line in text.splitlines():
        if not line or line.startswith("#"):
            continue
        name, *vals = line.split("\t")
        table[name] = AdsParams(*(float(v) for v in vals))
    return table


def ads(x: float, p: AdsParams) -> float:
    exp1 = 1.0 + math.exp(-(x - p.c + p.d / 2.0) / p.e)
    exp2 = 1.0 + math.exp(-(x - p.c - p.d / 2.0) / p.f)
    dx = p.a + p.b / exp1 * (1.0 - 1.0 / exp2)
    return dx / p.dmax


def desirabilities(d: DescriptorSet) -> dict[str, float]:
    table = ads_table()
    inputs = {
        "mw": d.mw, "logp": d.logp, "hba": d.qed_hba, "hbd": d.qed_hbd,
        "tpsa": d.tpsa, "rotb": d.rotb, "arom": d.arom, "alerts": d.alerts,
    }
    return {name: min(1.0, max(_CLAMP_MIN, ads(inputs[name], table[name])))
            for name in _PROPERTY_ORDER}


def qed(d: DescriptorSet) -> float:
    values = desirabilities(d)
    log_sum = sum(math.log(values[name]) for name in _PROPERTY_ORDER)
    return math.exp(log_sum / len(_PROPERTY_ORDER))
