import json

import numpy as np
import pytest

from steen_lab.errors import BranchAmbiguityError, ConfigError
from steen_lab.report import PLUMBING, Trace, Verdict, VerificationReport, to_jsonable


@pytest.fixture
def report():
    return VerificationReport("sample")


@pytest.mark.parametrize("value,tolerance,verdict", [
    (1e-9, 1e-8, Verdict.PASS),
    (1e-8, 1e-8, Verdict.PASS),
    (2e-8, 1e-8, Verdict.FAIL),
    (float("nan"), 1e-8, Verdict.FAIL),
    (float("inf"), 1e300, Verdict.FAIL),
])
def test_check_verdicts(report, value, tolerance, verdict):
    assert report.check("x.residual", "x = y", value, tolerance).verdict is verdict
    assert report.passed is (verdict is Verdict.PASS)


def test_measurements_never_fail(report):
    report.measure("x.implied", "k", 3 + 1j)
    assert report.record("x.implied").verdict is Verdict.REPORTED_ONLY
    assert report.passed


def test_duplicate_ids_are_rejected(report):
    report.check("x.residual", "x = y", 0.0, 1.0)
    with pytest.raises(ValueError, match="recorded twice"):
        report.measure("x.residual", "x = y", 0.0)
    with pytest.raises(KeyError):
        report.record("x.missing")


def test_errors_keep_their_diagnostics(report):
    record = report.error("deform.partial_solution", PLUMBING, BranchAmbiguityError("ambiguous", 0.25, "f2"))
    assert record.verdict is Verdict.ERROR
    assert record.detail == {"error": "BranchAmbiguityError", "message": "ambiguous", "abscissa": 0.25,
                             "component": "f2"}
    pointer = report.error("config", PLUMBING, ConfigError("bad", "/scenarios/0"))
    assert pointer.detail["pointer"] == "/scenarios/0"
    assert not report.passed


def test_extend_prefixes_records_and_traces(report):
    sub = VerificationReport("sample")
    sub.check("dirac.det_S", "det S = 1", 0.0, 1e-9)
    sub.add_trace("scan", x=[0.0, 1.0])
    sub.timings["dirac"] = 0.5
    report.extend(sub, "lambda0.")
    report.extend(sub, "lambda1.")
    assert [r.check_id for r in report.records] == ["lambda0.dirac.det_S", "lambda1.dirac.det_S"]
    assert set(report.traces) == {"lambda0.scan", "lambda1.scan"}
    assert report.timings == {"lambda0.dirac": 0.5, "lambda1.dirac": 0.5}


def test_to_jsonable():
    converted = to_jsonable({"z": 1 - 2j, "a": np.array([1.5, np.nan]), "n": np.int64(3), "f": np.float64(np.inf),
                             "v": Verdict.PASS, "b": np.bool_(True), 1: (0.5j,)})
    assert converted == {"z": [1.0, -2.0], "a": [1.5, None], "n": 3, "f": None, "v": "pass", "b": True,
                         "1": [[0.0, 0.5]]}
    json.dumps(converted, allow_nan=False)


def test_trace_splits_complex_columns(tmp_path):
    trace = Trace("flow", {"x": np.array([0.0, 0.5]), "f1": np.array([1 + 1j, 2 - 0.5j])})
    assert list(trace.to_frame().columns) == ["x", "re_f1", "im_f1"]
    path = tmp_path / "flow.csv"
    trace.write_csv(str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == "x,re_f1,im_f1"
    assert lines[2] == "0.5,2,-0.5"


def test_empty_trace_writes_a_header(tmp_path):
    trace = Trace("lambda_scan", {"lambda": np.array([], dtype=complex), "det_defect": np.array([], dtype=float)})
    path = tmp_path / "empty.csv"
    trace.write_csv(str(path))
    assert path.read_text().strip() == "re_lambda,im_lambda,det_defect"


def test_to_dict(report):
    report.check("x.residual", "x = y", 1e-12, 1e-9)
    report.metadata["lambda"] = 0.5j
    with report.timed("stage"):
        pass
    report.add_trace("scan", x=[0.0])
    document = report.to_dict()
    assert set(document) == {"scenario", "passed", "metadata", "records", "traces", "timings"}
    assert document["metadata"] == {"lambda": [0.0, 0.5]}
    assert document["records"][0]["verdict"] == "pass"
    assert document["traces"] == ["scan"]
    assert document["timings"]["stage"] >= 0
    assert "timings" not in report.to_dict(include_timings=False)
