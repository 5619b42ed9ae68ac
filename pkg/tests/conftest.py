ACCEPTANCE_FILE = "test_acceptance.py"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion."""
    rows = []
    for status, label in (("passed", "PASS"), ("failed", "FAIL"), ("error", "FAIL")):
        for report in terminalreporter.stats.get(status, []):
            if ACCEPTANCE_FILE in report.nodeid and report.when == "call":
                name = report.nodeid.split("::")[-1]
                rows.append((name, label))
    if rows:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, label in sorted(rows):
            terminalreporter.write_line(f"{label}  {name}")
