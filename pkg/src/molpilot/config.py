"""Target configuration ingestion.

A target is a JSON object: name, pocket_file (path, relative to the
config file), reference_ligand (SMILES, optional), known_drugs (list of
SMILES), and optional per-property threshold overrides.  All molecules
are parsed eagerly and validation problems are aggregated into a single
error so a bad config is reported in one pass.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .chem.graph import MolecularGraph
from .chem.smiles import SmilesError, parse_smiles
from .docking import PdbError, PocketDescriptor, parse_pocket


class ConfigError(ValueError):
    def __init__(self, path: str, problems: list[str]):
        super().__init__(f"invalid target config {path}: " + "; ".join(problems))
        self.problems = problems


@dataclass
class TargetSpec:
    name: str
    pocket: PocketDescriptor
    pocket_path: str
    reference_ligand: Optional[MolecularGraph]
    known_drugs: list[MolecularGraph]
    known_drug_smiles: list[str]
    threshold_overrides: dict[str, float] = field(default_factory=dict)
    raw_text: str = ""


_OVERRIDE_KEYS = ("qed_min", "lrf_min", "sas_max", "vna_max")


def load_target_config(path: str | Path) -> TargetSpec:
    path = Path(path)
    problems: list[str] = []
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(str(path), [f"cannot read config: {exc}"]) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(str(path), [f"not valid JSON: {exc}"]) from exc
    if not isinstance(data, dict):
        raise ConfigError(str(path), ["top level must be an object"])

    name = data.get("name")
    if not isinstance(name, str) or not name:
        problems.append("missing or empty 'name'")
        name = path.stem

    pocket = None
    pocket_path = ""
    if "pocket_file" not in data:
        problems.append("missing 'pocket_file'")
    else:
        pocket_path = str((path.parent / data["pocket_file"]).resolve())
        try:
            pocket_text = Path(pocket_path).read_text()
            pocket = parse_pocket(pocket_text, source_path=pocket_path)
        except OSError as exc:
            problems.append(f"cannot read pocket file: {exc}")
        except PdbError as exc:
            problems.append(f"pocket file invalid: {exc}")

    reference = None
    if data.get("reference_ligand"):
        try:
            reference = parse_smiles(data["reference_ligand"])
        except SmilesError as exc:
            problems.append(f"reference_ligand unparseable: {exc}")

    drugs: list[MolecularGraph] = []
    drug_smiles: list[str] = []
    raw_drugs = data.get("known_drugs", [])
    if not isinstance(raw_drugs, list):
        problems.append("'known_drugs' must be a list of SMILES")
        raw_drugs = []
    for idx, smi in enumerate(raw_drugs):
        try:
            drugs.append(parse_smiles(smi))
            drug_smiles.append(smi)
        except (SmilesError, TypeError) as exc:
            problems.append(f"known_drugs[{idx}] unparseable: {exc}")

    overrides: dict[str, float] = {}
    raw_overrides = data.get("thresholds", {})
    if not isinstance(raw_overrides, dict):
        problems.append("'thresholds' must be an object")
        raw_overrides = {}
    for key, value in raw_overrides.items():
        if key not in _OVERRIDE_KEYS:
            problems.append(f"unknown threshold override {key!r}")
            continue
        try:
            overrides[key] = float(value)
        except (TypeError, ValueError):
            problems.append(f"threshold override {key!r} is not a number")

    if not drugs and len(overrides) < len(_OVERRIDE_KEYS):
        problems.append("at least one known drug is required unless every "
                        "threshold override is supplied")

    if problems:
        raise ConfigError(str(path), problems)
    return TargetSpec(name=name, pocket=pocket, pocket_path=pocket_path,
                      reference_ligand=reference, known_drugs=drugs,
                      known_drug_smiles=drug_smiles,
                      threshold_overrides=overrides, raw_text=text)
