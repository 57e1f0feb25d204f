"""Binding-pocket ingestion and binding-score backends.

Two backends produce the binding score (kcal/mol, lower is better): a
deterministic built-in surrogate for desk-scale runs, and an adapter that
shells out to an external docking tool via a configurable command
template.  The surrogate is documented as non-physical: it rewards
filling the pocket up to ~80% of its heavy-atom capacity and penalizes
overstuffing and heavy polarity.
"""

from __future__ import annotations

import math
import re
import shlex
import subprocess
import tempfile
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .chem.graph import MolecularGraph
from .chem.smiles import write_smiles
from .descriptors import hbond_acceptors, hbond_donors


class PdbError(ValueError):
    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"{message} (line {line_number})"
        super().__init__(message)
        self.line_number = line_number


class ExternalToolError(RuntimeError):
    """External process failure; ``raw_output`` carries captured output."""

    def __init__(self, kind: str, message: str, raw_output: str = ""):
        super().__init__(message)
        self.kind = kind  # launch | exit | timeout | pattern
        self.raw_output = raw_output


class Engine(str, Enum):
    SURROGATE = "surrogate"
    EXTERNAL = "external"


@dataclass(frozen=True)
class PocketDescriptor:
    id: str
    heavy_atom_count: int
    bounding_box: tuple[tuple[float, float], tuple[float, float], tuple[float, float]]
    center: tuple[float, float, float]
    capacity: int
    source_path: str = ""

    def __post_init__(self):
        for lo, hi in self.bounding_box:
            if lo >= hi:
                raise ValueError("bounding box min must be below max on every axis")
        if self.capacity < 1:
            raise ValueError("capacity must be >= 1")


@dataclass(frozen=True)
class DockingResult:
    vna: float
    engine: Engine
    raw_output: str = ""

    def __post_init__(self):
        if not math.isfinite(self.vna):
            raise ValueError("vna must be finite")


@dataclass(frozen=True)
class AdapterConfig:
    """External tool contract: placeholders {ligand} {pocket} {out} in the
    command template; ``affinity_pattern`` must contain one capture group."""

    command_template: str
    affinity_pattern: str = r"Affinity:\s*(-?\d+(?:\.\d+)?)"
    timeout_s: float = 120.0
    max_concurrency: int = 1
    env_passthrough: tuple[str, ...] = ("PATH",)


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def parse_pocket(pdb_text: str, pocket_id: str = "POCKET001",
                 source_path: str = "") -> PocketDescriptor:
    """Read ATOM/HETATM records (fixed-width PDB columns) into a pocket.

    Capacity is a documented desk-scale heuristic: heavy atoms / 4,
    rounded half-up, floor 1.
    """
    coords: list[tuple[float, float, float]] = []
    heavy = 0
    for lineno, line in enumerate(pdb_text.splitlines(), start=1):
        record = line[:6].strip()
        if record not in ("ATOM", "HETATM"):
            continue
        if len(line) < 54:
            raise PdbError("truncated ATOM/HETATM record", lineno)
        try:
            x = float(line[30:38])
            y = float(line[38:46])
            z = float(line[46:54])
        except ValueError as exc:
            raise PdbError(f"malformed coordinate field: {exc}", lineno) from exc
        element = line[76:78].strip() if len(line) >= 78 else ""
        if not element:
            name = line[12:16].strip()
            element = next((c for c in name if c.isalpha()), "")
        element = element.capitalize()
        coords.append((x, y, z))
        if element != "H":
            heavy += 1
    if not coords:
        raise PdbError("no ATOM/HETATM records found")
    xs, ys, zs = zip(*coords)
    box = ((min(xs), max(xs)), (min(ys), max(ys)), (min(zs), max(zs)))
    box = tuple((lo, hi if hi > lo else lo + 1e-6) for lo, hi in box)
    center = (sum(xs) / len(xs), sum(ys) / len(ys), sum(zs) / len(zs))
    return PocketDescriptor(
        id=pocket_id,
        heavy_atom_count=heavy,
        bounding_box=box,  # type: ignore[arg-type]
        center=center,
        capacity=max(1, _round_half_up(heavy / 4)),
        source_path=source_path,
    )


def surrogate_score(g: MolecularGraph, p: PocketDescriptor) -> DockingResult:
    """Deterministic stand-in score.

    vna = -0.4*min(n, n_opt) + 0.6*max(0, n - n_opt)
          + 0.1*max(0, hbd + hba - 8)
    with n the ligand heavy-atom count and n_opt = max(1, round(0.8 *
    capacity)).  Improves with size up to the pocket optimum, then
    degrades; mildly penalizes very polar ligands.
    """
    if len(g.atoms) == 0:
        raise ValueError("empty molecule")
    n = g.heavy_atom_count
    n_opt = max(1, _round_half_up(0.8 * p.capacity))
    polar = hbond_donors(g) + hbond_acceptors(g)
    vna = (-0.4 * min(n, n_opt)
           + 0.6 * max(0, n - n_opt)
           + 0.1 * max(0, polar - 8))
    return DockingResult(vna=vna, engine=Engine.SURROGATE)


def dock_external(g: MolecularGraph, p: PocketDescriptor,
                  adapter: AdapterConfig) -> DockingResult:
    """Run the configured external docking command on one molecule.

    The molecule is written as SMILES to a temp file substituted for
    {ligand}; {pocket} receives the pocket source path and {out} a temp
    output path.  The first float captured by ``affinity_pattern`` in
    stdout + output-file text becomes the score.  Temp files never
    outlive the call.
    """
    import os

    with tempfile.TemporaryDirectory(prefix="molpilot-dock-") as tmp:
        ligand_path = Path(tmp) / "ligand.smi"
        out_path = Path(tmp) / "dock.out"
        ligand_path.write_text(write_smiles(g) + "\n")
        argv = [
            token.replace("{ligand}", str(ligand_path))
                 .replace("{pocket}", p.source_path)
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
            raw = (exc.stdout or "") if isinstance(exc.stdout, str) else ""
            raise ExternalToolError(
                "timeout", f"docking timed out after {adapter.timeout_s}s", raw) from exc
        raw = proc.stdout + ("\n" + out_path.read_text() if out_path.exists() else "")
        if proc.returncode != 0:
            raise ExternalToolError(
                "exit", f"docking exited with status {proc.returncode}",
                raw + "\n" + proc.stderr)
        match = re.search(adapter.affinity_pattern, raw)
        if not match:
            raise ExternalToolError(
                "pattern", f"affinity pattern {adapter.affinity_pattern!r} not found", raw)
        return DockingResult(vna=float(match.group(1)), engine=Engine.EXTERNAL,
                             raw_output=raw)
