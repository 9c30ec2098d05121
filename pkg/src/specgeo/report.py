"""Check records and suite reports shared by the command line and the tests."""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

PASS, FAIL, SKIP = "pass", "fail", "skip"


def tolerance_scale() -> float:
    """Multiplier from SPECGEO_TOL (default 1.0) applied to every nonzero tolerance."""
    raw = os.environ.get("SPECGEO_TOL", "1.0")
    try:
        val = float(raw)
    except ValueError:
        raise ValueError(f"SPECGEO_TOL must be a number, got {raw!r}") from None
    if not val > 0 or math.isinf(val):
        raise ValueError("SPECGEO_TOL must be positive and finite")
    return val


def _clean(x):
    if isinstance(x, float):
        if math.isnan(x) or math.isinf(x):
            return str(x)
        return float(f"{x:.6e}")
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (str, int, bool)) or x is None:
        return x
    return str(x)


@dataclass
class CheckRecord:
    id: str
    status: str
    deviation: float | None
    tolerance: float | None
    provenance: str
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"id": self.id, "status": self.status, "deviation": _clean(self.deviation),
               "tolerance": _clean(self.tolerance), "provenance": self.provenance}
        if self.detail:
            out["detail"] = _clean(self.detail)
        return out


@dataclass
class SuiteReport:
    name: str
    records: list = field(default_factory=list)
    wall_time: float = 0.0

    def measure(self, id: str, deviation, tolerance: float, provenance: str, **detail) -> CheckRecord:
        """Pass when deviation <= tolerance (tolerance 0 means exact equality)."""
        tol = tolerance * tolerance_scale() if tolerance else 0.0
        dev = float(deviation)
        ok = dev == 0.0 if tol == 0.0 else dev <= tol
        rec = CheckRecord(id, PASS if ok else FAIL, dev, tol, provenance, detail)
        self.records.append(rec)
        return rec

    def expect(self, id: str, ok: bool, provenance: str, **detail) -> CheckRecord:
        """Boolean or exact-equality check; recorded with tolerance 0."""
        rec = CheckRecord(id, PASS if ok else FAIL, None, 0.0, provenance, detail)
        self.records.append(rec)
        return rec

    def skip(self, id: str, reason: str, provenance: str = "n/a") -> CheckRecord:
        rec = CheckRecord(id, SKIP, None, None, provenance, {"reason": reason})
        self.records.append(rec)
        return rec

    @property
    def failed(self) -> list:
        return [r for r in self.records if r.status == FAIL]

    @property
    def status(self) -> str:
        return FAIL if self.failed else PASS

    def to_json(self) -> dict:
        return {"suite": self.name, "status": self.status,
                "counts": {s: sum(r.status == s for r in self.records) for s in (PASS, FAIL, SKIP)},
                "records": [r.to_json() for r in self.records]}

    def summary(self) -> str:
        lines = [f"[{self.status.upper()}] {self.name}: "
                 f"{sum(r.status == PASS for r in self.records)} passed, {len(self.failed)} failed, "
                 f"{sum(r.status == SKIP for r in self.records)} skipped ({self.wall_time:.2f}s)"]
        for r in self.failed:
            dev = "" if r.deviation is None else f" deviation={r.deviation:.3e} tol={r.tolerance:.1e}"
            lines.append(f"    FAIL {r.id}{dev}")
        return "\n".join(lines)


def dump(reports: list, extra: dict | None = None) -> str:
    doc = dict(extra or {})
    doc["status"] = FAIL if any(r.status == FAIL for r in reports) else PASS
    doc["reports"] = [r.to_json() for r in reports]
    return json.dumps(doc, indent=2, sort_keys=False)
