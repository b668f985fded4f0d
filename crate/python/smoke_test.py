"""Smoke test for the tdss extension module.

Build and install first:

    pip install --no-build-isolation -e crates/python
    python python/smoke_test.py
"""

import tdss

NOW = 1_767_225_600_000

project = tdss.example_project()

text = "If the clock time is implausible or the chip is unreachable, the OBC shall deactivate the timer."
assert tdss.classify(text) == "causal"
assert tdss.classify("The OBC shall offer a timer charging function.") == "non-causal"

cases = tdss.derive_tests("R_1", text)
assert len(cases) == 3, cases
assert sum(c.positive for c in cases) == 2
assert all(dict(c.assignment).keys() == dict(cases[0].assignment).keys() for c in cases)

run = tdss.run_test(project["spec.scn"], project["tests.scn"], "TM_708.1", now=NOW)
assert run.verdict == "pass", (run.verdict, run.message)
assert run.trace, "a passing run selects events"
assert "timerChargingUserCfg" in run.trace[-1]
assert run.diagram("VG_1").startswith("@diagram VG_1")

stub = tdss.run_test(project["spec.scn"], project["tests.scn"], "TM_720.1", now=NOW)
assert stub.verdict == "fail"

try:
    tdss.run_test(project["spec.scn"], "program broken\nscenario X test\n  frobnicate\n", "X")
except ValueError as e:
    assert "frobnicate" in str(e) or "3" in str(e), e
else:
    raise AssertionError("malformed scenarios must raise ValueError")

model = tdss.Model.from_json(project["model.json"])
assert model.to_json() == project["model.json"]
assert model.check() == []
assert len(model.ids("TestCase")) == 10
assert "TM_708" in model.view("validation-concern-overview", "VC_1")

print("smoke test passed")
