"""Verification reports: check records with verdicts, metadata, timings and CSV traces."""

import logging
import math
import time
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

logger = logging.getLogger("steen-lab")

SCHEMA_VERSION = 1
PLUMBING = "plumbing"


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    REPORTED_ONLY = "reported-only"
    ERROR = "error"


def to_jsonable(value: Any) -> Any:
    """Converts numpy and complex values into JSON-compatible ones.

    Complex numbers become [re, im]; non-finite floats become None so that the document stays
    strict JSON.
    """
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(item) for item in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [to_jsonable(float(value.real)), to_jsonable(float(value.imag))]
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


@dataclass
class CheckRecord:
    """One named check.

    Attributes:
        check_id (str): Identifier, unique within a report.
        reference (str): The identity or relation the check exercises, or "plumbing".
        value (Any): Measured residual or quantity.
        tolerance (Optional[float]): Threshold for pass/fail checks.
        verdict (Verdict): Outcome.
        detail (dict): Extra measurements or the error diagnostic.
    """
    check_id: str
    reference: str
    value: Any
    tolerance: Optional[float]
    verdict: Verdict
    detail: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return to_jsonable({
            "check_id": self.check_id,
            "reference": self.reference,
            "value": self.value,
            "tolerance": self.tolerance,
            "verdict": self.verdict,
            "detail": self.detail,
        })


@dataclass
class Trace:
    """Named columns of equal length; complex columns are split into re_/im_ pairs on output."""
    name: str
    columns: Dict[str, np.ndarray]

    def to_frame(self) -> pd.DataFrame:
        data = {}
        for column, values in self.columns.items():
            values = np.asarray(values)
            if np.iscomplexobj(values):
                data[f"re_{column}"] = values.real
                data[f"im_{column}"] = values.imag
            else:
                data[column] = values
        return pd.DataFrame(data)

    def write_csv(self, path: str):
        self.to_frame().to_csv(path, index=False, float_format="%.17g")


@dataclass
class VerificationReport:
    """Records of one scenario run.

    Attributes:
        scenario (str): Scenario name.
        records (List[CheckRecord]): Checks in execution order.
        metadata (dict): Grid size, integrator, version and scenario parameters.
        timings (Dict[str, float]): Wall-clock seconds per stage.
        traces (Dict[str, Trace]): Sampled data for CSV emission.
        tolerances (Dict[str, float]): Per-check tolerance overrides the pipelines were run with.
    """
    scenario: str
    records: List[CheckRecord] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)
    timings: Dict[str, float] = field(default_factory=dict)
    traces: Dict[str, Trace] = field(default_factory=dict)
    tolerances: Dict[str, float] = field(default_factory=dict)

    def _append(self, record: CheckRecord) -> CheckRecord:
        if any(existing.check_id == record.check_id for existing in self.records):
            raise ValueError(f"Check '{record.check_id}' recorded twice in scenario '{self.scenario}'.")
        self.records.append(record)
        logger.debug(f"[{self.scenario}] {record.check_id}: {record.verdict.value} (value={record.value})")
        return record

    def check(self, check_id: str, reference: str, value: float, tolerance: float,
              detail: Optional[dict] = None) -> CheckRecord:
        """Asserted check: passes when value is finite and value <= tolerance."""
        value = float(value)
        verdict = Verdict.PASS if math.isfinite(value) and value <= tolerance else Verdict.FAIL
        return self._append(CheckRecord(check_id, reference, value, tolerance, verdict, dict(detail or {})))

    def measure(self, check_id: str, reference: str, value: Any, tolerance: Optional[float] = None,
                detail: Optional[dict] = None) -> CheckRecord:
        """Measurement that never affects the exit status."""
        return self._append(CheckRecord(check_id, reference, value, tolerance, Verdict.REPORTED_ONLY, dict(detail or {})))

    def error(self, check_id: str, reference: str, exc: Exception) -> CheckRecord:
        """Records an exception as an `error` verdict, keeping its diagnostic attributes."""
        detail = {"error": type(exc).__name__, "message": str(exc)}
        for attribute in ("abscissa", "component", "state", "pointer"):
            if getattr(exc, attribute, None) is not None:
                detail[attribute] = getattr(exc, attribute)
        return self._append(CheckRecord(check_id, reference, None, None, Verdict.ERROR, detail))

    def add_trace(self, name: str, **columns):
        self.traces[name] = Trace(name, {column: np.asarray(values) for column, values in columns.items()})

    def extend(self, other: "VerificationReport", prefix: str = ""):
        """Appends the records, traces and timings of a sub-report, prefixing check and trace names."""
        for record in other.records:
            self._append(replace(record, check_id=prefix + record.check_id))
        for name, trace in other.traces.items():
            self.traces[prefix + name] = Trace(prefix + name, trace.columns)
        for stage, seconds in other.timings.items():
            self.timings[prefix + stage] = self.timings.get(prefix + stage, 0.0) + seconds

    def record(self, check_id: str) -> CheckRecord:
        for record in self.records:
            if record.check_id == check_id:
                return record
        raise KeyError(check_id)

    @property
    def passed(self) -> bool:
        return all(record.verdict not in (Verdict.FAIL, Verdict.ERROR) for record in self.records)

    @contextmanager
    def timed(self, stage: str):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timings[stage] = self.timings.get(stage, 0.0) + time.perf_counter() - start

    def to_dict(self, include_timings: bool = True) -> dict:
        document = {
            "scenario": self.scenario,
            "passed": self.passed,
            "metadata": to_jsonable(self.metadata),
            "records": [record.to_dict() for record in self.records],
            "traces": sorted(self.traces),
        }
        if include_timings:
            document["timings"] = to_jsonable(self.timings)
        return document
