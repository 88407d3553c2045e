"""Collects acceptance-criterion outcomes and prints one line per criterion."""

_labels = {}
_outcomes = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark:
            _labels[item.nodeid] = mark.args


def pytest_runtest_logreport(report):
    if report.nodeid not in _labels:
        return
    if report.when == "call" or report.outcome != "passed":
        prev = _outcomes.get(report.nodeid)
        if prev is None or prev[0] == "passed":
            _outcomes[report.nodeid] = (report.outcome, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    rows = sorted((_labels[n], o) for n, o in _outcomes.items())
    for (number, title), (outcome, secs) in rows:
        verdict = "PASS" if outcome == "passed" else "FAIL"
        tr.write_line(f"AC{number:<2} {verdict}  {secs:7.2f}s  {title}")
