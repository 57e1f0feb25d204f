"""Single-target run orchestration: wire the configured backends, derive
per-target thresholds from the known drugs, and drive the agent loop to a
definite outcome with a complete run log.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Optional

from .agent.core import AgentState, Backends, FallbackPolicy, LlmPolicy, MAX_BUDGET, step
from .agent.llm import HttpChatClient, LlmConfig
from .agent.memory import Memory, Requirements
from .config import TargetSpec
from .descriptors import data_checksum
from .docking import AdapterConfig, dock_external
from .evaluate import PropertyEvaluator
from .generate import GenerationRequest, generate_builtin, generate_external
from .optimize import GAConfig
from .runlog import RunLog, config_checksum, new_log
from .scoring.metrics import (
    FingerprintParams,
    MoleculeRecord,
    MoleculeSet,
    TargetThresholds,
    target_thresholds,
)

DATA_FILES = ("crippen.tsv", "tpsa.tsv", "alerts.tsv", "qed_ads.tsv",
              "hbond.tsv", "sa_fragment_scores.tsv", "fragments.smi")


@dataclass(frozen=True)
class RunConfig:
    policy: str = "fallback"            # fallback | llm
    seed: int = 0
    budget: int = MAX_BUDGET
    docker: str = "surrogate"           # surrogate | external
    generator: str = "builtin"          # builtin | external
    generation_count: int = 100
    ga: GAConfig = GAConfig()
    fp_params: FingerprintParams = FingerprintParams()
    min_count: int = 5
    dvs_min: float = 0.8
    docking_adapter: Optional[AdapterConfig] = None
    generator_adapter: Optional[AdapterConfig] = None
    llm: Optional[LlmConfig] = None

    def __post_init__(self):
        if self.policy not in ("fallback", "llm"):
            raise ValueError("policy must be 'fallback' or 'llm'")
        if not (1 <= self.budget <= MAX_BUDGET):
            raise ValueError(f"budget must be within 1..{MAX_BUDGET}")
        if self.docker == "external" and self.docking_adapter is None:
            raise ValueError("external docking requires an adapter config")
        if self.generator == "external" and self.generator_adapter is None:
            raise ValueError("external generation requires an adapter config")
        if self.policy == "llm" and self.llm is None:
            raise ValueError("llm policy requires an llm client config")


@dataclass
class RunResult:
    outcome: str
    pool_ids: tuple[str, ...]
    memory: Memory
    log: RunLog
    target_name: str


def data_checksums() -> dict[str, str]:
    return {name: data_checksum(name) for name in DATA_FILES}


def build_evaluator(target: TargetSpec, cfg: RunConfig) -> PropertyEvaluator:
    docking = None
    if cfg.docker == "external":
        adapter = cfg.docking_adapter
        docking = lambda g: dock_external(g, target.pocket, adapter)  # noqa: E731
    evaluator = PropertyEvaluator(pocket=target.pocket, fp_params=cfg.fp_params,
                                  docking=docking)
    evaluator.reference_fingerprints = [
        evaluator.fingerprint(g) for g in target.known_drugs]
    return evaluator


def derive_requirements(target: TargetSpec, evaluator: PropertyEvaluator,
                        cfg: RunConfig) -> Requirements:
    if target.known_drugs:
        drug_set = MoleculeSet(records=[
            MoleculeRecord(graph=g, profile=evaluator.profile(g), mol_id=f"DRUG{i:03d}")
            for i, g in enumerate(target.known_drugs)])
        thresholds = target_thresholds(drug_set)
    else:
        thresholds = TargetThresholds(qed_min=0.0, lrf_min=0.0, sas_max=10.0,
                                      vna_max=0.0)
    if target.threshold_overrides:
        thresholds = dataclasses.replace(thresholds, **target.threshold_overrides)
    return Requirements(thresholds=thresholds, min_count=cfg.min_count,
                        dvs_min=cfg.dvs_min)


def run_target(target: TargetSpec, cfg: RunConfig, run_id: str = "run",
               clock=None) -> RunResult:
    log = new_log(run_id=run_id, seed=cfg.seed, policy=cfg.policy,
                  budget=cfg.budget, config_digest=config_checksum(target.raw_text),
                  data_digests=data_checksums(), clock=clock)
    try:
        evaluator = build_evaluator(target, cfg)
        requirements = derive_requirements(target, evaluator, cfg)
        memory = Memory()
        memory.requirements = requirements
        pocket_id = memory.register_pocket(target.pocket)
        log.append("target", name=target.name, pocket_id=pocket_id,
                   heavy_atoms=target.pocket.heavy_atom_count,
                   capacity=target.pocket.capacity,
                   known_drugs=list(target.known_drug_smiles),
                   thresholds={
                       "qed_min": requirements.thresholds.qed_min,
                       "lrf_min": requirements.thresholds.lrf_min,
                       "sas_max": requirements.thresholds.sas_max,
                       "vna_max": requirements.thresholds.vna_max,
                       "nvt_min": requirements.thresholds.nvt_min,
                   })

        if cfg.generator == "external":
            adapter = cfg.generator_adapter
            generate = lambda req: generate_external(req, adapter)  # noqa: E731
        else:
            generate = generate_builtin
        client = None
        if cfg.policy == "llm":
            client = HttpChatClient(cfg.llm)
        backends = Backends(evaluator=evaluator, generate=generate,
                            ga_config=cfg.ga, generation_count=cfg.generation_count,
                            seed_ligand=target.reference_ligand, client=client)
        policy = LlmPolicy(client) if cfg.policy == "llm" else FallbackPolicy()
        state = AgentState(memory=memory, budget_remaining=cfg.budget, seed=cfg.seed)
        while not state.terminated:
            state = step(state, policy, backends, log)
        pool = state.screen_pool if state.screen_pool is not None \
            else tuple(memory.molecules)
        log.append("final", outcome=state.outcome, pool=list(pool))
        return RunResult(outcome=state.outcome, pool_ids=pool, memory=memory,
                         log=log, target_name=target.name)
    except Exception as exc:  # unrecoverable backend failure: partial log
        log.append("final", outcome="error", pool=[], error=f"{type(exc).__name__}: {exc}")
        memory = Memory()
        return RunResult(outcome="error", pool_ids=(), memory=memory, log=log,
                         target_name=target.name)
