"""Session-wide cache of synthesized benchmarks (they take seconds each)."""
from __future__ import annotations

import functools

from gr1forge.amba import ArbiterParams, MasterParams, SlaveParams, gen_arbiter, gen_master, gen_slave
from gr1forge.pipeline import PipelineResult, run_pipeline


def doc_for(kind: str, k: int, htrans_assumed: bool = True):
    if kind == "arbiter":
        return gen_arbiter(ArbiterParams(k, htrans_assumed=htrans_assumed))
    if kind == "master":
        return gen_master(MasterParams(k))
    if kind == "slave":
        return gen_slave(SlaveParams(k))
    raise ValueError(kind)


@functools.lru_cache(maxsize=None)
def synthesized(kind: str, k: int, htrans_assumed: bool = True) -> PipelineResult:
    res = run_pipeline(doc_for(kind, k, htrans_assumed))
    assert res.realizable, f"{kind} {k} is not realizable"
    return res
