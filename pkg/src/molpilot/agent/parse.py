"""Reply grammar: extract the Action / Input / Desc block from model
output.  Surrounding chatter is ignored; the first well-formed block
wins.  CODE is an alias for SCREEN.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .memory import Memory

ACTIONS = ("GENERATE", "OPTIMIZE", "SCREEN")
_ALIASES = {"CODE": "SCREEN"}

_ACTION_RE = re.compile(r"^\s*action\s*:\s*\[?\s*([A-Za-z_]+)\s*\]?\s*$",
                        re.IGNORECASE | re.MULTILINE)
_INPUT_RE = re.compile(r"^\s*input\s*:\s*(.+)$", re.IGNORECASE | re.MULTILINE)
_DESC_RE = re.compile(r"^\s*desc\s*:\s*(.+)$", re.IGNORECASE | re.MULTILINE)
_ID_RE = re.compile(r"(MOL\d+|POCKET\d+)", re.IGNORECASE)


class ActionParseError(ValueError):
    """Base for reply-grammar failures; ``kind`` feeds the reprompt text."""

    kind = "parse"


class NoActionError(ActionParseError):
    kind = "no-action"


class UnknownActionError(ActionParseError):
    kind = "unknown-action"


class MissingInputError(ActionParseError):
    kind = "missing-input"


class UnknownIdError(ActionParseError):
    kind = "unknown-id"


class WrongInputKindError(ActionParseError):
    kind = "wrong-input-kind"


class MissingDescError(ActionParseError):
    kind = "missing-desc"


@dataclass(frozen=True)
class ActionRequest:
    action: str
    input_ids: tuple[str, ...]
    desc: Optional[str] = None


def parse_action(reply: str, mem: Memory) -> ActionRequest:
    """Parse the first well-formed Action/Input(/Desc) block in a reply."""
    matches = list(_ACTION_RE.finditer(reply))
    if not matches:
        raise NoActionError("no 'Action:' line found in the reply")
    errors: list[ActionParseError] = []
    for pos, match in enumerate(matches):
        block_end = matches[pos + 1].start() if pos + 1 < len(matches) else len(reply)
        block = reply[match.start():block_end]
        try:
            return _parse_block(match.group(1), block, mem)
        except ActionParseError as exc:
            errors.append(exc)
    raise errors[0]


def _parse_block(action_name: str, block: str, mem: Memory) -> ActionRequest:
    name = action_name.upper()
    name = _ALIASES.get(name, name)
    if name not in ACTIONS:
        raise UnknownActionError(f"unknown action name {action_name!r}")
    input_match = _INPUT_RE.search(block)
    if not input_match:
        raise MissingInputError(f"no 'Input:' line found for action {name}")
    ids = tuple(i.upper() for i in _ID_RE.findall(input_match.group(1)))
    if not ids:
        raise MissingInputError("the 'Input:' line carries no MOL/POCKET identifiers")
    unknown = [i for i in ids if not mem.has_id(i)]
    if unknown:
        raise UnknownIdError(f"identifiers not present in memory: {unknown}")
    desc_match = _DESC_RE.search(block)
    desc = desc_match.group(1).strip() if desc_match else None
    if name == "GENERATE":
        if any(not i.startswith("POCKET") for i in ids):
            raise WrongInputKindError("GENERATE takes pocket identifiers only")
    else:
        if any(not i.startswith("MOL") for i in ids):
            raise WrongInputKindError(f"{name} takes molecule identifiers only")
    if name == "SCREEN" and not desc:
        raise MissingDescError("SCREEN requires a Desc: line with a screening plan")
    return ActionRequest(action=name, input_ids=ids, desc=desc)


_ANSWER_RE = re.compile(r"^\s*answer\s*:\s*\(?\s*(yes|no)\b", re.IGNORECASE | re.MULTILINE)
_REASON_RE = re.compile(r"^\s*reason\s*:\s*(.+)$", re.IGNORECASE | re.MULTILINE)


def parse_gate_reply(reply: str) -> tuple[bool, str]:
    """Parse the YES/NO verdict reply; raises ActionParseError otherwise."""
    match = _ANSWER_RE.search(reply)
    if not match:
        raise ActionParseError("no 'Answer: YES/NO' line found")
    reason_match = _REASON_RE.search(reply)
    reason = reason_match.group(1).strip() if reason_match else ""
    return match.group(1).upper() == "YES", reason
