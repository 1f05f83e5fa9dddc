import os

from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_criteria: dict[int, list[str]] = {}
_PREFIX = "acceptance_criterion_"


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            item.keywords[f"{_PREFIX}{mark.args[0]}"] = True


def pytest_runtest_logreport(report):
    ids = [int(k[len(_PREFIX):]) for k in report.keywords if k.startswith(_PREFIX)]
    if not ids or (report.when != "call" and report.outcome == "passed"):
        return
    outcome = "xfailed" if hasattr(report, "wasxfail") else report.outcome
    _criteria.setdefault(ids[0], []).append(outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_criteria):
        outcomes = _criteria[cid]
        verdict = "PASS" if all(o == "passed" for o in outcomes) else "FAIL"
        terminalreporter.write_line(f"criterion {cid:2d}: {verdict}  ({', '.join(sorted(set(outcomes)))})")
