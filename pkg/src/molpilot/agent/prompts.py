"""Prompt assembly for the planning and verdict calls.

Both templates are filled slot-for-slot and are byte-stable for a given
memory state.  The molecule listing is truncated to the top K entries by
balanced fitness with an explicit note, so prompts stay bounded as the
inventory grows.
"""

from __future__ import annotations

from ..optimize import Objective, fitness
from .memory import Memory, Requirements

MOL_LISTING_CAP = 25

_BALANCED = Objective(weights={"QED": 1.0, "SAS": 1.0, "VNA": 1.0})

REASONER_TEMPLATE = """You have access to the following molecules and pockets:
{pocket_str}{mol_str}
You also have access to a set of actions:
{action_str}
Your job is to find molecules that satisfy these requirements:
{req_str}
Here is a history of actions you have taken and the results:
{history_str}
Here is the evaluation result from previous iteration:
{eval_str}

Let's think step by step and take your time before you answer the question. What is the best action to take and what is the input of the action?

Remember that you currently have {resource_str} left to solve the task.
Remember that you can only use one action.

Your answer must follow this format:

Action: [name of action]
Input: [input of the action, should be the identifier like ['MOL001'] or ['POCKET001']]

If you plan to use "CODE" action, you need to include this additional format:

Desc: [explain what you want to do with the input of the action. Be as verbose and descriptive as possible but at most three sentences. Always refer to the identifier of the action input.]
"""

EVALUATOR_TEMPLATE = """You have access to the following pool of molecules:
{mol_str}
Your job is to find molecules that satisfy these requirements:
{req_str}
Does this pool of molecules satisfy the requirements?
Remember that all molecules in the pool must satisfy the requirements.

Let's think step by step and answer with the following format:
Reason: (a compact and brief one-sentence reasoning)
Answer: (YES or NO)
"""

ACTION_GUIDE = """GENERATE: generate new molecules for a pocket. Input: one pocket identifier.
OPTIMIZE: optimize existing molecules with a genetic algorithm. Input: molecule identifiers. Optional Desc: one of QED, SAS, VNA to pick the property to improve.
SCREEN (alias CODE): process the current molecules with a screening plan. Input: molecule identifiers. Desc: a plan in the form `stage | stage | ...` with stages `filter COL OP VALUE`, `sort COL asc|desc`, `top N`, `cluster T best COL asc|desc`; columns are SMILES, QED, SAScore, Lipinski, Novelty, VinaScore.
"""


def describe_requirements(req: Requirements) -> str:
    t = req.thresholds
    return (f"at least {req.min_count} molecules, each with "
            f"QED >= {t.qed_min:.3f}, Lipinski >= {t.lrf_min:.3f}, "
            f"SAScore <= {t.sas_max:.3f}, VinaScore <= {t.vna_max:.3f}, "
            f"Novelty >= {t.nvt_min:.2f}, and set diversity >= {req.dvs_min:.2f}")


def _mol_line(entry) -> str:
    p = entry.profile
    if p is None:
        return f"{entry.mol_id}: {entry.smiles}"
    return (f"{entry.mol_id}: {entry.smiles} | QED {p.qed:.3f}, Lipinski {p.lrf}, "
            f"SAScore {p.sas:.2f}, VinaScore {p.vna:.2f}, Novelty {p.nvt:.3f}")


def molecule_listing(mem: Memory, cap: int = MOL_LISTING_CAP) -> str:
    entries = list(mem.molecules.values())
    if not entries:
        return "(no molecules yet)\n"
    def sort_key(e):
        if e.profile is None:
            return (1, 0.0, e.mol_id)
        return (0, -fitness(_BALANCED, e.profile), e.mol_id)
    entries.sort(key=sort_key)
    lines = [_mol_line(e) for e in entries[:cap]]
    if len(entries) > cap:
        lines.append(f"... ({len(entries) - cap} more molecules truncated; "
                     f"showing the top {cap} by current fitness)")
    return "\n".join(lines) + "\n"


def pocket_listing(mem: Memory) -> str:
    lines = []
    for pid, pocket in mem.pockets.items():
        lines.append(f"{pid}: binding pocket, {pocket.heavy_atom_count} heavy atoms, "
                     f"ligand capacity ~{pocket.capacity}")
    return "\n".join(lines) + "\n"


def history_listing(mem: Memory) -> str:
    if not mem.history:
        return "(no actions taken yet)\n"
    lines = []
    for rec in mem.history:
        status = "ok" if rec.ok else f"failed: {rec.error}"
        produced = f" -> {len(rec.produced)} molecules" if rec.produced else ""
        lines.append(f"{rec.index + 1}. {rec.action} on {list(rec.inputs)}{produced} ({status})")
    return "\n".join(lines) + "\n"


def evaluation_listing(mem: Memory) -> str:
    if not mem.evaluations:
        return "(no evaluation yet)\n"
    last = mem.evaluations[-1]
    if last.verdict.satisfied:
        return "requirements satisfied\n"
    return "unsatisfied: " + "; ".join(last.verdict.reasons) + "\n"


def build_reasoner_prompt(mem: Memory, budget_remaining: int) -> str:
    assert mem.requirements is not None
    return REASONER_TEMPLATE.format(
        pocket_str=pocket_listing(mem),
        mol_str=molecule_listing(mem),
        action_str=ACTION_GUIDE,
        req_str=describe_requirements(mem.requirements) + "\n",
        history_str=history_listing(mem),
        eval_str=evaluation_listing(mem),
        resource_str=f"{budget_remaining} actions",
    )


def build_evaluator_prompt(mem: Memory, pool_ids) -> str:
    assert mem.requirements is not None
    lines = [_mol_line(mem.molecules[i]) for i in pool_ids] or ["(empty pool)"]
    return EVALUATOR_TEMPLATE.format(
        mol_str="\n".join(lines) + "\n",
        req_str=describe_requirements(mem.requirements) + "\n",
    )
