"""VerdictReport: the JSON record every check produces."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

VERDICTS = ("pass", "fail", "inconclusive")
METHODS = ("exact", "probabilistic", "enumeration")


@dataclass
class VerdictReport:
    claim: str
    params: dict
    method: str
    verdict: str
    seed: int | None = None
    witness: Any = None
    details: dict = field(default_factory=dict)
    elapsed: float = 0.0

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"bad verdict {self.verdict!r}")
        if self.method not in METHODS:
            raise ValueError(f"bad method {self.method!r}")
        if self.verdict == "fail" and self.method != "exact" and self.witness is None:
            raise ValueError("a failing enumeration/probabilistic report needs a witness")

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self, include_elapsed: bool = False) -> dict:
        # elapsed is left out by default so reruns are byte-identical
        out = {
            "claim": self.claim,
            "params": self.params,
            "method": self.method,
            "verdict": self.verdict,
            "seed": self.seed,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        if self.details:
            out["details"] = self.details
        if include_elapsed:
            out["elapsed"] = round(self.elapsed, 6)
        return out

    def to_json(self, include_elapsed: bool = False) -> str:
        return json.dumps(self.to_dict(include_elapsed), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> VerdictReport:
        return cls(
            claim=d["claim"],
            params=d.get("params", {}),
            method=d["method"],
            verdict=d["verdict"],
            seed=d.get("seed"),
            witness=d.get("witness"),
            details=d.get("details", {}),
            elapsed=d.get("elapsed", 0.0),
        )


def combine(verdicts) -> str:
    """Aggregate: any fail wins, then any inconclusive, else pass."""
    verdicts = list(verdicts)
    if "fail" in verdicts:
        return "fail"
    if "inconclusive" in verdicts:
        return "inconclusive"
    return "pass"
