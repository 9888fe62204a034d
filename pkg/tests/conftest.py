import re


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed"):
        for report in terminalreporter.stats.get(outcome, []):
            if report.when != "call" or "test_acceptance.py" not in report.nodeid:
                continue
            match = re.search(r"test_criterion_(\d+)", report.nodeid)
            if not match:
                continue
            detail = dict(report.user_properties).get("detail", "")
            lines.append((int(match.group(1)), outcome == "passed", detail))
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, detail in sorted(lines):
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
