"""Screening-plan language and executor.

The screen action runs a small, safe, parseable plan over the molecule
table instead of executing model-emitted code.  Grammar::

    plan   := stage ('|' stage)*
    stage  := 'filter' COL OP NUMBER      OP in < <= > >= ==
            | 'sort' COL ('asc'|'desc')
            | 'top' N
            | 'cluster' T 'best' COL ('asc'|'desc')

Columns: SMILES QED SAScore Lipinski Novelty VinaScore.  Filters keep
matching rows, sorts are stable, ``top`` truncates, ``cluster`` groups by
single-linkage Tanimoto >= T and keeps the best row per cluster.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Sequence, Union

from .chem.fingerprint import Fingerprint, morgan_fingerprint, tanimoto
from .chem.graph import MolecularGraph
from .scoring.metrics import FingerprintParams, PropertyProfile

COLUMNS = ("SMILES", "QED", "SAScore", "Lipinski", "Novelty", "VinaScore")
#: Exact CSV header names used by the table serialization.
CSV_COLUMNS = ("SMILES", "QED", "SAScore", "Lipinski", "Novelty", "Vina Score")
_OPS = ("<=", ">=", "==", "<", ">")


class PlanError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


@dataclass(frozen=True)
class FilterStage:
    column: str
    op: str
    value: Union[float, str]


@dataclass(frozen=True)
class SortStage:
    column: str
    ascending: bool


@dataclass(frozen=True)
class TopStage:
    n: int


@dataclass(frozen=True)
class ClusterStage:
    threshold: float
    best_column: str
    ascending: bool


Stage = Union[FilterStage, SortStage, TopStage, ClusterStage]


@dataclass(frozen=True)
class ScreenPlan:
    stages: tuple[Stage, ...]


@dataclass
class TableRow:
    mol_id: str
    smiles: str
    profile: PropertyProfile
    graph: MolecularGraph | None = None


@dataclass
class MoleculeTable:
    rows: list[TableRow] = field(default_factory=list)
    fp_params: FingerprintParams = FingerprintParams()

    def __post_init__(self):
        ids = [r.mol_id for r in self.rows]
        if len(ids) != len(set(ids)):
            raise ValueError("duplicate molecule ids in table")

    def __len__(self) -> int:
        return len(self.rows)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in self.rows:
            writer.writerow([
                r.smiles,
                f"{r.profile.qed:.4f}",
                f"{r.profile.sas:.4f}",
                r.profile.lrf,
                f"{r.profile.nvt:.4f}",
                f"{r.profile.vna:.4f}",
            ])
        return buf.getvalue()


def _column_value(row: TableRow, column: str) -> Union[float, str]:
    return {
        "SMILES": row.smiles,
        "QED": row.profile.qed,
        "SAScore": row.profile.sas,
        "Lipinski": float(row.profile.lrf),
        "Novelty": row.profile.nvt,
        "VinaScore": row.profile.vna,
    }[column]


class _Tokens:
    def __init__(self, text: str, base: int = 0):
        import re

        self.items = [(m.group(0), base + m.start())
                      for m in re.finditer(r"\S+", text)]
        self.i = 0

    def next(self, expected: str | None = None) -> tuple[str, int]:
        if self.i >= len(self.items):
            last = self.items[-1][1] if self.items else 0
            raise PlanError(f"unexpected end of plan (expected {expected or 'token'})", last)
        tok = self.items[self.i]
        self.i += 1
        return tok

    def done(self) -> bool:
        return self.i >= len(self.items)


def _parse_number(token: str, offset: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise PlanError(f"malformed number {token!r}", offset) from None


def _parse_column(token: str, offset: int) -> str:
    if token not in COLUMNS:
        raise PlanError(f"unknown column {token!r}", offset)
    return token


def _parse_direction(token: str, offset: int) -> bool:
    if token == "asc":
        return True
    if token == "desc":
        return False
    raise PlanError(f"expected 'asc' or 'desc', got {token!r}", offset)


def parse_plan(text: str) -> ScreenPlan:
    """Parse plan text; whitespace-insensitive; errors carry offsets."""
    stages: list[Stage] = []
    offset = 0
    for piece in text.split("|"):
        if not piece.strip():
            raise PlanError("empty stage", offset)
        tokens = _Tokens(piece, base=offset)
        keyword, kw_off = tokens.next("stage keyword")
        if keyword == "filter":
            col_tok, col_off = tokens.next("column")
            column = _parse_column(col_tok, col_off)
            op_tok, op_off = tokens.next("operator")
            if op_tok not in _OPS:
                raise PlanError(f"unknown operator {op_tok!r}", op_off)
            val_tok, val_off = tokens.next("value")
            value: Union[float, str]
            if column == "SMILES":
                if op_tok != "==":
                    raise PlanError("SMILES only supports '=='", op_off)
                value = val_tok
            else:
                value = _parse_number(val_tok, val_off)
            stages.append(FilterStage(column=column, op=op_tok, value=value))
        elif keyword == "sort":
            col_tok, col_off = tokens.next("column")
            dir_tok, dir_off = tokens.next("direction")
            stages.append(SortStage(column=_parse_column(col_tok, col_off),
                                    ascending=_parse_direction(dir_tok, dir_off)))
        elif keyword == "top":
            n_tok, n_off = tokens.next("count")
            n = _parse_number(n_tok, n_off)
            if n != int(n) or n < 1:
                raise PlanError(f"top requires a positive integer, got {n_tok!r}", n_off)
            stages.append(TopStage(n=int(n)))
        elif keyword == "cluster":
            t_tok, t_off = tokens.next("threshold")
            threshold = _parse_number(t_tok, t_off)
            if not (0.0 <= threshold <= 1.0):
                raise PlanError(f"cluster threshold must be in [0,1], got {t_tok}", t_off)
            best_tok, best_off = tokens.next("'best'")
            if best_tok != "best":
                raise PlanError(f"expected 'best', got {best_tok!r}", best_off)
            col_tok, col_off = tokens.next("column")
            dir_tok, dir_off = tokens.next("direction")
            stages.append(ClusterStage(threshold=threshold,
                                       best_column=_parse_column(col_tok, col_off),
                                       ascending=_parse_direction(dir_tok, dir_off)))
        else:
            raise PlanError(f"unknown stage {keyword!r}", kw_off)
        if not tokens.done():
            tok, tok_off = tokens.next()
            raise PlanError(f"unexpected token {tok!r}", tok_off)
        offset += len(piece) + 1
    if not stages:
        raise PlanError("empty plan", 0)
    return ScreenPlan(stages=tuple(stages))


def cluster(fps: Sequence[Fingerprint], threshold: float) -> list[list[int]]:
    """Single-linkage connected components at Tanimoto >= threshold,
    ordered by smallest member index."""
    if not (0.0 <= threshold <= 1.0):
        raise ValueError("cluster threshold must be in [0,1]")
    n = len(fps)
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(n):
        for j in range(i + 1, n):
            if tanimoto(fps[i], fps[j]) >= threshold:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: min(g))


def _apply_filter(rows: list[TableRow], stage: FilterStage) -> list[TableRow]:
    import operator

    ops = {"<": operator.lt, "<=": operator.le, ">": operator.gt,
           ">=": operator.ge, "==": operator.eq}
    op = ops[stage.op]
    return [r for r in rows if op(_column_value(r, stage.column), stage.value)]


def execute_plan(plan: ScreenPlan, table: MoleculeTable) -> MoleculeTable:
    """Apply stages in order; output rows are always a subset of input."""
    rows = list(table.rows)
    for stage in plan.stages:
        if isinstance(stage, FilterStage):
            rows = _apply_filter(rows, stage)
        elif isinstance(stage, SortStage):
            rows = sorted(rows, key=lambda r: _column_value(r, stage.column),
                          reverse=not stage.ascending)
        elif isinstance(stage, TopStage):
            rows = rows[:stage.n]
        elif isinstance(stage, ClusterStage):
            if not rows:
                continue
            fps = []
            for r in rows:
                if r.graph is None:
                    from .chem.smiles import parse_smiles
                    r.graph = parse_smiles(r.smiles)
                fps.append(morgan_fingerprint(r.graph, table.fp_params.radius,
                                              table.fp_params.nbits))
            kept: list[TableRow] = []
            for group in cluster(fps, stage.threshold):
                ordered = sorted(
                    group,
                    key=lambda i: (_column_value(rows[i], stage.best_column), i),
                    reverse=not stage.ascending)
                kept.append(rows[ordered[0]])
            rows = kept
    return MoleculeTable(rows=rows, fp_params=table.fp_params)
