def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance") or __import__("sys").modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", {}) if mod else {}
    if lines:
        terminalreporter.section("acceptance criteria")
        for key in sorted(lines, key=lambda k: int(k[2:])):
            terminalreporter.write_line(lines[key])
