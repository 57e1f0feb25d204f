"""The plan/execute/evaluate loop.

One step: obtain an action (model-driven policy with bounded reprompts,
or the deterministic fallback policy), dispatch it to the matching
executor, profile any new molecules, append the records, decrement the
budget, and run the rule-based gate on the current candidate pool (the
latest screen output, else the whole inventory).  The rule-based gate is
authoritative; the model verdict, when a client is configured, is logged
as advisory telemetry only.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Optional

from ..chem.graph import MolecularGraph
from ..evaluate import PropertyEvaluator
from ..generate import GenerationRequest, GenerationResult
from ..optimize import GAConfig, GaTrace, Objective, fitness, ga_optimize
from ..runlog import RunLog
from ..scoring.metrics import (
    MoleculeRecord,
    MoleculeSet,
    diversity,
    ge,
    is_high_quality,
    le,
    target_success,
)
from ..screen import MoleculeTable, PlanError, TableRow, execute_plan, parse_plan
from .llm import ChatClient, LlmError
from .memory import (
    ActionRecord,
    EvaluationRecord,
    GateVerdict,
    Memory,
    MoleculeEntry,
    Requirements,
)
from .parse import ActionParseError, ActionRequest, parse_action, parse_gate_reply
from .prompts import build_evaluator_prompt, build_reasoner_prompt

MAX_BUDGET = 10
_BALANCED = Objective(weights={"QED": 1.0, "SAS": 1.0, "VNA": 1.0})
_OPTIMIZABLE = ("QED", "SAS", "VNA")


@dataclass
class Backends:
    evaluator: PropertyEvaluator
    generate: Callable[[GenerationRequest], GenerationResult]
    ga_config: GAConfig
    generation_count: int = 100
    seed_ligand: MolecularGraph | None = None
    client: ChatClient | None = None


@dataclass
class AgentState:
    memory: Memory
    budget_remaining: int
    seed: int
    iteration: int = 0
    terminated: bool = False
    outcome: Optional[str] = None    # success | budget_exhausted | error
    screen_pool: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        if not (0 <= self.budget_remaining <= MAX_BUDGET):
            raise ValueError(f"budget must be within 0..{MAX_BUDGET}")


def derive_seed(seed: int, iteration: int) -> int:
    return (seed * 1000003 + iteration * 7919 + 1) & 0x7FFFFFFF


def candidate_pool(state: AgentState) -> tuple[str, ...]:
    if state.screen_pool is not None:
        return state.screen_pool
    return tuple(state.memory.molecules)


def evaluator_gate(entries: list[MoleculeEntry], req: Requirements) -> GateVerdict:
    """Rule-based satisfaction check with per-clause failure reasons."""
    n = len(entries)
    t = req.thresholds
    reasons: list[str] = []
    counts = {prop: 0 for prop in ("QED", "LRF", "SAS", "VNA", "NVT")}
    if n < req.min_count:
        reasons.append(f"count {n} < {req.min_count}")
    if n == 0:
        reasons.extend([
            "QED threshold unmet (no molecules)",
            "Lipinski threshold unmet (no molecules)",
            "SAScore threshold unmet (no molecules)",
            "VinaScore threshold unmet (no molecules)",
            "Novelty threshold unmet (no molecules)",
            "diversity undefined (no molecules)",
        ])
        return GateVerdict(satisfied=False, reasons=tuple(reasons),
                           failure_counts=counts)
    checks = (
        ("QED", lambda p: ge(p.qed, t.qed_min), f"QED >= {t.qed_min:.3f}"),
        ("LRF", lambda p: ge(p.lrf, t.lrf_min), f"Lipinski >= {t.lrf_min:.3f}"),
        ("SAS", lambda p: le(p.sas, t.sas_max), f"SAScore <= {t.sas_max:.3f}"),
        ("VNA", lambda p: le(p.vna, t.vna_max), f"VinaScore <= {t.vna_max:.3f}"),
        ("NVT", lambda p: ge(p.nvt, t.nvt_min), f"Novelty >= {t.nvt_min:.2f}"),
    )
    for prop, passes, label in checks:
        failing = sum(1 for e in entries if not passes(e.profile))
        if failing:
            counts[prop] = failing
            reasons.append(f"{failing} of {n} below requirement {label}"
                           if prop in ("QED", "LRF", "NVT")
                           else f"{failing} of {n} above requirement {label}")
    if n >= 2:
        dvs = diversity([e.fingerprint for e in entries])
        if not ge(dvs, req.dvs_min):
            reasons.append(f"diversity {dvs:.3f} < {req.dvs_min:.2f}")
    else:
        reasons.append("diversity undefined (fewer than 2 molecules)")
    return GateVerdict(satisfied=not reasons, reasons=tuple(reasons),
                       failure_counts=counts)


def llm_gate(mem: Memory, pool_ids, client: ChatClient) -> tuple[Optional[bool], str]:
    """Advisory model verdict; abstains (None) after 2 failed retries."""
    prompt = build_evaluator_prompt(mem, pool_ids)
    for _ in range(3):
        try:
            reply = client.complete([{"role": "user", "content": prompt}])
            answer, reason = parse_gate_reply(reply)
            return answer, reason
        except (ActionParseError, LlmError):
            continue
    return None, "abstain: unparseable verdict"


class FallbackPolicy:
    """Deterministic loop: one GENERATE, then alternating OPTIMIZE (on the
    worst-failing optimizable property) and SCREEN (canonical plan over
    every threshold, cluster 0.6, top min_count)."""

    def decide(self, state: AgentState, backends: Backends) -> ActionRequest:
        mem = state.memory
        if not any(rec.action == "GENERATE" for rec in mem.history):
            pocket_id = next(iter(mem.pockets))
            return ActionRequest(action="GENERATE", input_ids=(pocket_id,))
        non_generate = sum(1 for rec in mem.history if rec.action != "GENERATE")
        if non_generate % 2 == 0:
            return ActionRequest(action="OPTIMIZE",
                                 input_ids=self._optimize_inputs(state),
                                 desc=self._worst_failing(mem))
        return ActionRequest(action="SCREEN",
                             input_ids=tuple(mem.molecules),
                             desc=canonical_plan(mem.requirements))

    def _optimize_inputs(self, state: AgentState) -> tuple[str, ...]:
        mem = state.memory
        ids = state.screen_pool if state.screen_pool else tuple(mem.molecules)
        entries = mem.entries(ids)
        entries.sort(key=lambda e: (-fitness(_BALANCED, e.profile), e.mol_id))
        return tuple(e.mol_id for e in entries)

    @staticmethod
    def _worst_failing(mem: Memory) -> str:
        if not mem.evaluations:
            return "QED"
        counts = mem.evaluations[-1].verdict.failure_counts
        best = max(_OPTIMIZABLE, key=lambda prop: counts.get(prop, 0))
        return best if counts.get(best, 0) > 0 else "QED"


def canonical_plan(req: Requirements) -> str:
    t = req.thresholds
    return (f"filter QED >= {t.qed_min:.6f} | filter Lipinski >= {t.lrf_min:.6f} | "
            f"filter SAScore <= {t.sas_max:.6f} | filter VinaScore <= {t.vna_max:.6f} | "
            f"filter Novelty >= {t.nvt_min:.2f} | "
            f"cluster 0.6 best VinaScore asc | top {req.min_count}")


class LlmPolicy:
    """Prompt the model, parse its reply, reprompt at most twice naming the
    parse error, then fall back to the deterministic policy for the step."""

    def __init__(self, client: ChatClient):
        self.client = client
        self.fallback = FallbackPolicy()
        self.last_source = "llm"

    def decide(self, state: AgentState, backends: Backends) -> ActionRequest:
        base = build_reasoner_prompt(state.memory, state.budget_remaining)
        prompt = base
        for _ in range(3):
            try:
                reply = self.client.complete([{"role": "user", "content": prompt}])
            except LlmError as exc:
                prompt = base + f"\nYour previous answer could not be used ({exc}). Answer again following the required format exactly.\n"
                continue
            try:
                request = parse_action(reply, state.memory)
                self.last_source = "llm"
                return request
            except ActionParseError as exc:
                prompt = base + f"\nYour previous answer could not be used ({exc}). Answer again following the required format exactly.\n"
        self.last_source = "llm-fallback"
        return self.fallback.decide(state, backends)


def _profile_new(mem: Memory, backends: Backends, ids: list[str]) -> None:
    for mol_id in ids:
        entry = mem.molecules[mol_id]
        if entry.profile is None:
            entry.profile = backends.evaluator.profile(entry.graph, key=entry.smiles)
            entry.fingerprint = backends.evaluator.fingerprint(entry.graph)


def _execute(request: ActionRequest, state: AgentState, backends: Backends,
             log: RunLog) -> tuple[tuple[str, ...], Optional[str]]:
    """Run one action; returns (produced ids, error message or None)."""
    mem = state.memory
    action_seed = derive_seed(state.seed, state.iteration)
    if request.action == "GENERATE":
        pocket = mem.pockets[request.input_ids[0]]
        req = GenerationRequest(pocket=pocket, count=backends.generation_count,
                                seed_ligand=backends.seed_ligand,
                                rng_seed=action_seed)
        result = backends.generate(req)
        if not result.complete:
            log.append("warning", action_index=state.iteration,
                       message=f"partial batch: {len(result.molecules)} of {req.count}")
        for message in result.warnings:
            log.append("warning", action_index=state.iteration, message=message)
        produced = []
        for mol in result.molecules:
            mol_id = mem.register_molecule(mol, provenance=state.iteration)
            produced.append(mol_id)
        _profile_new(mem, backends, produced)
        return tuple(dict.fromkeys(produced)), None
    if request.action == "OPTIMIZE":
        objective = Objective.single(request.desc) if request.desc in _OPTIMIZABLE \
            else Objective.single("QED")
        population = [mem.molecules[i].graph for i in request.input_ids]
        cfg = GAConfig(population_size=backends.ga_config.population_size,
                       generations=backends.ga_config.generations,
                       mutation_prob=backends.ga_config.mutation_prob,
                       elitism=backends.ga_config.elitism,
                       rng_seed=action_seed)
        trace = GaTrace()
        final = ga_optimize(population, objective, cfg,
                            scorer=backends.evaluator.profile, trace=trace)
        for point in trace.generations:
            log.append("ga_generation", action_index=state.iteration, **point)
        produced = []
        for graph, _, _ in final:
            mol_id = mem.register_molecule(graph, provenance=state.iteration)
            produced.append(mol_id)
        produced = list(dict.fromkeys(produced))
        _profile_new(mem, backends, produced)
        return tuple(produced), None
    # SCREEN
    plan = parse_plan(request.desc)
    rows = [TableRow(mol_id=i, smiles=mem.molecules[i].smiles,
                     profile=mem.molecules[i].profile,
                     graph=mem.molecules[i].graph)
            for i in request.input_ids]
    table = MoleculeTable(rows=rows, fp_params=backends.evaluator.fp_params)
    result = execute_plan(plan, table)
    produced = tuple(r.mol_id for r in result.rows)
    state.screen_pool = produced
    return produced, None


def step(state: AgentState, policy, backends: Backends, log: RunLog) -> AgentState:
    """Advance the loop by one action; see module docstring."""
    if state.terminated:
        raise RuntimeError("agent already terminated")
    if state.budget_remaining <= 0:
        raise RuntimeError("no budget remaining")
    mem = state.memory
    request = policy.decide(state, backends)
    source = getattr(policy, "last_source", "policy")
    produced: tuple[str, ...] = ()
    error: Optional[str] = None
    try:
        produced, error = _execute(request, state, backends, log)
    except (PlanError, ActionParseError, ValueError, RuntimeError) as exc:
        error = f"{type(exc).__name__}: {exc}"
    record = ActionRecord(index=state.iteration, action=request.action,
                          inputs=request.input_ids, desc=request.desc,
                          produced=produced, ok=error is None, error=error,
                          source=source)
    mem.commit_action(record)
    log.append("action", index=record.index, action=record.action,
               inputs=list(record.inputs), desc=record.desc,
               produced=list(record.produced), ok=record.ok, error=record.error,
               source=record.source)
    new_items = [
        {"id": mol_id, "smiles": mem.molecules[mol_id].smiles,
         **_profile_fields(mem.molecules[mol_id].profile)}
        for mol_id in produced
        if mem.molecules.get(mol_id) is not None
        and mem.molecules[mol_id].provenance == state.iteration
    ] if request.action != "SCREEN" else []
    if new_items:
        log.append("molecules", action_index=state.iteration, items=new_items)

    pool = candidate_pool(state)
    verdict = evaluator_gate(mem.entries(pool), mem.requirements)
    llm_answer: Optional[bool] = None
    llm_reason: Optional[str] = None
    if backends.client is not None:
        llm_answer, llm_reason = llm_gate(mem, pool, backends.client)
        if llm_answer is not None and llm_answer != verdict.satisfied:
            log.append("warning", action_index=state.iteration,
                       message=f"advisory verdict {llm_answer} disagrees with rule gate "
                               f"{verdict.satisfied}")
    evaluation = EvaluationRecord(action_index=state.iteration, pool=pool,
                                  verdict=verdict, llm_answer=llm_answer,
                                  llm_reason=llm_reason)
    mem.commit_evaluation(evaluation)
    log.append("evaluation", action_index=state.iteration, pool=list(pool),
               satisfied=verdict.satisfied, reasons=list(verdict.reasons),
               llm_answer=llm_answer, llm_reason=llm_reason)

    state.iteration += 1
    state.budget_remaining -= 1
    if verdict.satisfied:
        state.terminated = True
        state.outcome = "success"
    elif state.budget_remaining == 0:
        state.terminated = True
        state.outcome = "budget_exhausted"
    return state


def _profile_fields(profile) -> dict:
    if profile is None:
        return {}
    return {"qed": round(profile.qed, 6), "lrf": profile.lrf,
            "sas": round(profile.sas, 6), "vna": round(profile.vna, 6),
            "nvt": round(profile.nvt, 6)}


def verify_success(state: AgentState) -> bool:
    """Cross-module check: outcome=success implies the scoring module's
    set-level predicate holds on the final pool."""
    if state.outcome != "success":
        return True
    mem = state.memory
    entries = mem.entries(candidate_pool(state))
    ms = MoleculeSet(records=[
        MoleculeRecord(graph=e.graph, profile=e.profile, mol_id=e.mol_id,
                       smiles=e.smiles) for e in entries])
    return target_success(ms, mem.requirements.thresholds,
                          min_count=mem.requirements.min_count,
                          dvs_min=mem.requirements.dvs_min,
                          fingerprints=[e.fingerprint for e in entries])
