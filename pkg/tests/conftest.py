import pytest

CRITERIA = {
    1: "elliptic identities",
    2: "period relations",
    3: "Landen link",
    4: "theta factorization",
    5: "PDE residual",
    6: "static limits",
    7: "time-shift unification",
    8: "Floquet symmetry",
    9: "characteristic identity",
}
_outcomes = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_runtest_logreport(report):
    n = report.user_properties and dict(report.user_properties).get("criterion")
    if not n:
        return
    ok = report.passed and not hasattr(report, "wasxfail")
    if report.when == "call" or not report.passed:
        _outcomes.setdefault(n, []).append((report.nodeid.split("::")[-1], ok))


@pytest.hookimpl(tryfirst=True)
def pytest_runtest_makereport(item, call):
    m = item.get_closest_marker("criterion")
    if m and ("criterion", m.args[0]) not in item.user_properties:
        item.user_properties.append(("criterion", m.args[0]))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n, label in CRITERIA.items():
        rows = _outcomes.get(n)
        if rows is None:
            continue
        failed = [name for name, ok in rows if not ok]
        line = f"criterion {n} ({label}): {'FAIL' if failed else 'PASS'}"
        if failed:
            line += "  [" + ", ".join(failed) + "]"
        terminalreporter.write_line(line)
