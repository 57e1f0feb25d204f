"""Graph-based genetic algorithm for property optimization.

Fitness-proportional (roulette) selection over rank-normalized fitness,
acyclic single-bond crossover, a five-operator mutation set, elitism, and
per-population deduplication by canonical form.  Fully deterministic for
a fixed seed and a deterministic scorer.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Optional

from .chem import canonical_smiles
from .chem.edit import (
    add_atom,
    cut_single_bond,
    cuttable_bonds,
    join,
    open_attachment_atoms,
    remove_atom,
    set_bond_order,
    set_element,
)
from .chem.graph import GraphError, MolecularGraph
from .scoring.metrics import PropertyProfile

Scorer = Callable[[MolecularGraph], PropertyProfile]

QED = "QED"
SAS = "SAS"
VNA = "VNA"
_PROPERTIES = (QED, SAS, VNA)


class OptimizeError(RuntimeError):
    pass


class GaAborted(OptimizeError):
    """Scorer failure mid-run; ``trace`` holds the generations completed."""

    def __init__(self, message: str, trace: list[dict]):
        super().__init__(message)
        self.trace = trace


@dataclass(frozen=True)
class GAConfig:
    population_size: int = 100
    generations: int = 50
    mutation_prob: float = 0.1
    elitism: int = 2
    rng_seed: int = 0

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if not (0 <= self.elitism < self.population_size):
            raise ValueError("elitism must be < population_size")
        if not (0.0 <= self.mutation_prob <= 1.0):
            raise ValueError("mutation_prob must be in [0,1]")


@dataclass(frozen=True)
class Objective:
    """Single property or weighted combination; directions are fixed
    (QED maximized, SAS and VNA minimized, all mapped onto [0,1])."""

    weights: dict[str, float]

    def __post_init__(self):
        unknown = set(self.weights) - set(_PROPERTIES)
        if unknown:
            raise ValueError(f"unknown objective properties: {sorted(unknown)}")
        if any(w < 0 for w in self.weights.values()):
            raise ValueError("objective weights must be >= 0")
        if not any(w > 0 for w in self.weights.values()):
            raise ValueError("objective weights must not all be zero")

    @classmethod
    def single(cls, prop: str) -> "Objective":
        return cls(weights={prop: 1.0})


def fitness(obj: Objective, p: PropertyProfile) -> float:
    """Normalized objective value in [0,1]."""
    parts = {
        QED: p.qed,
        SAS: (10.0 - p.sas) / 9.0,
        VNA: min(1.0, max(0.0, -p.vna / 12.0)),
    }
    total_weight = sum(obj.weights.values())
    return sum(w * parts[prop] for prop, w in obj.weights.items()) / total_weight


def crossover(a: MolecularGraph, b: MolecularGraph,
              rng: random.Random) -> Optional[MolecularGraph]:
    """Cut one random non-ring single bond per parent and join one
    fragment from each at the cut points; None when nothing valid is
    found within 20 attempts."""
    for _ in range(20):
        bonds_a = cuttable_bonds(a)
        bonds_b = cuttable_bonds(b)
        if not bonds_a or not bonds_b:
            return None
        try:
            fa1, ia1, fa2, ia2 = cut_single_bond(a, rng.choice(bonds_a))
            fb1, ib1, fb2, ib2 = cut_single_bond(b, rng.choice(bonds_b))
            frag_a, attach_a = (fa1, ia1) if rng.random() < 0.5 else (fa2, ia2)
            frag_b, attach_b = (fb1, ib1) if rng.random() < 0.5 else (fb2, ib2)
            return join(frag_a, attach_a, frag_b, attach_b)
        except GraphError:
            continue
    return None


_ELEMENT_SWAPS = {
    "C": ("N", "O", "S"),
    "N": ("C", "O"),
    "O": ("N", "S", "C"),
    "S": ("O", "C"),
    "F": ("Cl",),
    "Cl": ("F", "Br"),
    "Br": ("Cl",),
}


def _op_append_atom(g: MolecularGraph, rng: random.Random) -> MolecularGraph:
    sites = open_attachment_atoms(g)
    if not sites:
        raise GraphError("no attachment sites")
    return add_atom(g, rng.choice(sites), rng.choice(("C", "C", "N", "O", "F")))


def _op_delete_terminal(g: MolecularGraph, rng: random.Random) -> MolecularGraph:
    terminals = [i for i in range(len(g.atoms)) if g.degree(i) <= 1]
    if not terminals or len(g.atoms) < 2:
        raise GraphError("no deletable terminal atom")
    return remove_atom(g, rng.choice(terminals))


def _op_change_bond_order(g: MolecularGraph, rng: random.Random) -> MolecularGraph:
    candidates = [i for i, b in enumerate(g.bonds) if b.order in (1, 2, 3)]
    if not candidates:
        raise GraphError("no editable bonds")
    bidx = rng.choice(candidates)
    order = g.bonds[bidx].order
    delta = rng.choice((-1, 1))
    new_order = order + delta
    if not (1 <= new_order <= 3):
        new_order = order - delta
    return set_bond_order(g, bidx, new_order)


def _op_substitute_element(g: MolecularGraph, rng: random.Random) -> MolecularGraph:
    candidates = [i for i, a in enumerate(g.atoms)
                  if not a.explicit_h and a.symbol in _ELEMENT_SWAPS]
    if not candidates:
        raise GraphError("no substitutable atoms")
    idx = rng.choice(candidates)
    return set_element(g, idx, rng.choice(_ELEMENT_SWAPS[g.atoms[idx].symbol]))


def _op_insert_ring_fragment(g: MolecularGraph, rng: random.Random) -> MolecularGraph:
    from .generate import default_library

    ring_frags = [f for f in default_library().fragments if f.rings]
    sites = open_attachment_atoms(g)
    if not sites or not ring_frags:
        raise GraphError("no ring insertion possible")
    frag = rng.choice(ring_frags)
    frag_sites = open_attachment_atoms(frag)
    if not frag_sites:
        raise GraphError("fragment has no attachment sites")
    return join(g, rng.choice(sites), frag, rng.choice(frag_sites))


_MUTATIONS = (
    _op_append_atom,
    _op_delete_terminal,
    _op_change_bond_order,
    _op_substitute_element,
    _op_insert_ring_fragment,
)


def mutate(g: MolecularGraph, rng: random.Random,
           mutation_prob: float) -> MolecularGraph:
    """With probability ``mutation_prob`` apply one uniformly chosen
    operator; invalid outcomes are retried up to 10 times, then the input
    is returned unchanged.  Output is always valence-valid."""
    if rng.random() >= mutation_prob:
        return g
    for _ in range(10):
        op = rng.choice(_MUTATIONS)
        try:
            return op(g, rng)
        except GraphError:
            continue
    return g


@dataclass
class GaTrace:
    generations: list[dict] = field(default_factory=list)

    def record(self, generation: int, best: float, median: float) -> None:
        self.generations.append(
            {"generation": generation, "best": best, "median": median})


def _median(values: list[float]) -> float:
    ordered = sorted(values)
    mid = len(ordered) // 2
    if len(ordered) % 2:
        return ordered[mid]
    return (ordered[mid - 1] + ordered[mid]) / 2.0


def ga_optimize(population: list[MolecularGraph], obj: Objective, cfg: GAConfig,
                scorer: Scorer, trace: GaTrace | None = None) -> list[tuple[MolecularGraph, PropertyProfile, float]]:
    """Run the GA and return the final population sorted by fitness
    descending, as (molecule, profile, fitness) triples."""
    if not population:
        raise OptimizeError("initial population must not be empty")
    rng = random.Random(cfg.rng_seed)
    trace = trace if trace is not None else GaTrace()

    profile_cache: dict[str, PropertyProfile] = {}

    def evaluate(g: MolecularGraph, key: str) -> PropertyProfile:
        profile = profile_cache.get(key)
        if profile is None:
            try:
                profile = scorer(g)
            except Exception as exc:
                raise GaAborted(f"scorer failed on {key}: {exc}", trace.generations) from exc
            profile_cache[key] = profile
        return profile

    # seed population: dedupe, then pad by mutating random members
    pool: dict[str, MolecularGraph] = {}
    for g in population:
        pool.setdefault(canonical_smiles(g), g)
    base = list(pool.items())
    attempts = 0
    while len(pool) < cfg.population_size and attempts < 50 * cfg.population_size:
        attempts += 1
        _, parent = base[rng.randrange(len(base))]
        child = mutate(parent, rng, mutation_prob=1.0)
        key = canonical_smiles(child)
        if key not in pool:
            pool[key] = child
    members = list(pool.items())[:cfg.population_size]

    def rank_and_sort(items):
        scored = []
        for key, g in items:
            profile = evaluate(g, key)
            scored.append((g, profile, fitness(obj, profile), key))
        scored.sort(key=lambda t: (-t[2], t[3]))
        return scored

    scored = rank_and_sort(members)
    for generation in range(cfg.generations):
        fits = [t[2] for t in scored]
        trace.record(generation, best=max(fits), median=_median(fits))
        # rank-normalized roulette weights: best gets n, worst gets 1
        n = len(scored)
        weights = [n - i for i in range(n)]
        next_pool: dict[str, MolecularGraph] = {
            key: g for g, _, _, key in scored[:cfg.elitism]}
        fill_attempts = 0
        while len(next_pool) < cfg.population_size and fill_attempts < 100 * cfg.population_size:
            fill_attempts += 1
            pa = rng.choices(scored, weights=weights, k=1)[0][0]
            pb = rng.choices(scored, weights=weights, k=1)[0][0]
            child = crossover(pa, pb, rng) or pa
            child = mutate(child, rng, cfg.mutation_prob)
            key = canonical_smiles(child)
            if key in next_pool:
                forced = mutate(child, rng, mutation_prob=1.0)
                key = canonical_smiles(forced)
                if key in next_pool:
                    continue
                child = forced
            next_pool[key] = child
        scored = rank_and_sort(list(next_pool.items()))
    fits = [t[2] for t in scored]
    trace.record(cfg.generations, best=max(fits), median=_median(fits))
    return [(g, profile, fit) for g, profile, fit, _ in scored]
