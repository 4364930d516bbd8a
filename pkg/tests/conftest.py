def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the acceptance scorecard lines, which per-test capture would
    otherwise hide for passing tests."""
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance scorecard")
    for name, ok in RESULTS:
        terminalreporter.write_line(
            f"[acceptance] {name}: {'PASS' if ok else 'FAIL'}")
