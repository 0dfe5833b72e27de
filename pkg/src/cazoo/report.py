from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

VERDICTS = ("yes", "no", "unknown")


@dataclass
class DecisionReport:
    """Verdict plus whatever evidence the procedure produced."""

    verdict: str
    witness_time: int | None = None
    note: str = ""
    transient: int | None = None
    cycle: int | None = None
    counterexample: Any = field(default=None, compare=False)

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"bad verdict {self.verdict!r}")

    def __bool__(self):
        return self.verdict == "yes"

    def to_text(self) -> str:
        lines = [f"verdict: {self.verdict}"]
        if self.witness_time is not None:
            lines.append(f"witness_time: {self.witness_time}")
        if self.transient is not None:
            lines.append(f"transient: {self.transient}")
        if self.cycle is not None:
            lines.append(f"cycle: {self.cycle}")
        if self.note:
            lines.append(f"note: {self.note}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "DecisionReport":
        fields = {}
        for line in text.splitlines():
            if not line.strip():
                continue
            key, _, value = line.partition(":")
            fields[key.strip()] = value.strip()
        ints = {k: int(fields[k]) for k in ("witness_time", "transient", "cycle") if k in fields}
        return cls(fields["verdict"], note=fields.get("note", ""), **ints)
