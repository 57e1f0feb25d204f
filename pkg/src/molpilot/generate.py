"""Candidate generation for a pocket: built-in seeded sampler or an
external generator adapter.

The built-in sampler composes library fragments at open attachment points
and mutates the reference ligand when one is supplied, growing candidates
toward the pocket's preferred size and capping them at 1.5x capacity
(documented, arbitrary).  Output is deduplicated by canonical form and
fully deterministic for a given request seed.
"""

from __future__ import annotations

import random
import re
import shlex
import subprocess
import tempfile
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .chem import canonical_smiles, parse_smiles
from .chem.edit import join, open_attachment_atoms
from .chem.graph import GraphError, MolecularGraph
from .chem.smiles import SmilesError
from .docking import AdapterConfig, ExternalToolError, PocketDescriptor

_MAX_ATTEMPT_FACTOR = 50
_SIZE_CAP_FACTOR = 1.5


class GenerationError(ValueError):
    pass


class EmptyBatchError(GenerationError):
    """External generator produced zero valid molecules."""


@dataclass(frozen=True)
class FragmentLibrary:
    fragments: tuple[MolecularGraph, ...]

    @classmethod
    def from_lines(cls, lines) -> "FragmentLibrary":
        graphs = []
        for line in lines:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            graphs.append(parse_smiles(line.split("\t")[0]))
        return cls(fragments=tuple(graphs))

    def __len__(self) -> int:
        return len(self.fragments)


@lru_cache(maxsize=1)
def default_library() -> FragmentLibrary:
    text = resources.files("molpilot.data").joinpath("fragments.smi").read_text()
    return FragmentLibrary.from_lines(text.splitlines())


@dataclass(frozen=True)
class GenerationRequest:
    pocket: PocketDescriptor
    count: int = 100
    seed_ligand: MolecularGraph | None = None
    rng_seed: int = 0

    def __post_init__(self):
        if self.count < 1:
            raise GenerationError("count must be >= 1")


@dataclass
class GenerationResult:
    molecules: list[MolecularGraph]
    complete: bool
    warnings: list[str] = field(default_factory=list)


def _grow(rng: random.Random, library: FragmentLibrary, target_heavy: int,
          size_cap: int) -> MolecularGraph | None:
    mol = rng.choice(library.fragments)
    for _ in range(8):
        if mol.heavy_atom_count >= target_heavy:
            break
        frag = rng.choice(library.fragments)
        if mol.heavy_atom_count + frag.heavy_atom_count > size_cap:
            break
        ours = open_attachment_atoms(mol)
        theirs = open_attachment_atoms(frag)
        if not ours or not theirs:
            break
        try:
            mol = join(mol, rng.choice(ours), frag, rng.choice(theirs))
        except GraphError:
            continue
    if mol.heavy_atom_count > size_cap:
        return None
    return mol


def generate_builtin(req: GenerationRequest,
                     library: FragmentLibrary | None = None) -> GenerationResult:
    """Produce ``req.count`` unique valid molecules for the pocket.

    Falls back to a flagged partial batch when the attempt budget
    (50x count) runs out before the target is reached.
    """
    if library is None:
        library = default_library()
    if len(library) == 0 and req.seed_ligand is None:
        raise GenerationError("empty fragment library and no seed ligand")
    from .optimize import mutate  # mutation operators are shared with the GA

    rng = random.Random(req.rng_seed)
    size_cap = max(3, int(_SIZE_CAP_FACTOR * req.pocket.capacity))
    target = max(3, min(size_cap, round(0.8 * req.pocket.capacity)))
    out: list[MolecularGraph] = []
    seen: set[str] = set()
    attempts = 0
    max_attempts = _MAX_ATTEMPT_FACTOR * req.count
    while len(out) < req.count and attempts < max_attempts:
        attempts += 1
        mol: MolecularGraph | None
        if req.seed_ligand is not None and (len(library) == 0 or rng.random() < 0.3):
            mol = mutate(req.seed_ligand, rng, mutation_prob=1.0)
            for _ in range(rng.randrange(0, 4)):
                mol = mutate(mol, rng, mutation_prob=1.0)
        else:
            jitter = rng.randrange(-max(1, target // 3), max(2, target // 3))
            mol = _grow(rng, library, max(3, target + jitter), size_cap)
        if mol is None or mol.heavy_atom_count > size_cap:
            continue
        key = canonical_smiles(mol)
        if key in seen:
            continue
        seen.add(key)
        out.append(mol)
    return GenerationResult(molecules=out, complete=len(out) >= req.count)


def generate_external(req: GenerationRequest, adapter: AdapterConfig) -> GenerationResult:
    """Run the external generator command and collect its SMILES output.

    Placeholders: {pocket} {count} {out}.  Invalid output lines are
    skipped with warnings; zero valid molecules is an error.
    """
    import os

    warnings: list[str] = []
    with tempfile.TemporaryDirectory(prefix="molpilot-gen-") as tmp:
        out_path = Path(tmp) / "generated.smi"
        argv = [
            token.replace("{pocket}", req.pocket.source_path)
                 .replace("{count}", str(req.count))
                 .replace("{out}", str(out_path))
            for token in shlex.split(adapter.command_template)
        ]
        env = {name: os.environ[name] for name in adapter.env_passthrough
               if name in os.environ}
        try:
            proc = subprocess.run(argv, capture_output=True, text=True,
                                  timeout=adapter.timeout_s, env=env)
        except FileNotFoundError as exc:
            raise ExternalToolError("launch", f"cannot launch {argv[0]!r}: {exc}") from exc
        except subprocess.TimeoutExpired as exc:
            raise ExternalToolError(
                "timeout", f"generator timed out after {adapter.timeout_s}s") from exc
        if proc.returncode != 0:
            raise ExternalToolError(
                "exit", f"generator exited with status {proc.returncode}",
                proc.stdout + "\n" + proc.stderr)
        text = out_path.read_text() if out_path.exists() else proc.stdout
    molecules: list[MolecularGraph] = []
    seen: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        smi = line.split("\t")[0].strip()
        if not smi:
            continue
        try:
            mol = parse_smiles(smi)
        except SmilesError as exc:
            warnings.append(f"line {lineno}: skipped invalid SMILES {smi!r}: {exc}")
            continue
        key = canonical_smiles(mol)
        if key not in seen:
            seen.add(key)
            molecules.append(mol)
    if not molecules:
        raise EmptyBatchError("external generator produced no valid molecules")
    return GenerationResult(molecules=molecules, complete=len(molecules) >= req.count,
                            warnings=warnings)
