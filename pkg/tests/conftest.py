import pytest

# criterion label -> (passed, detail); filled by test_acceptance
ACCEPTANCE_RESULTS: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(ACCEPTANCE_RESULTS, key=lambda k: (len(k.split()[0]), k)):
        ok, detail = ACCEPTANCE_RESULTS[label]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")


@pytest.fixture
def record_criterion():
    def record(label, ok, detail):
        ACCEPTANCE_RESULTS[label] = (bool(ok), detail)
        print(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
        return ok

    return record
