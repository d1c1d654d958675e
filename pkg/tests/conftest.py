import pytest

_VERDICTS: list[tuple[str, bool, str]] = []


class Verdicts:
    """Collects one line per acceptance criterion for the terminal summary."""

    def record(self, name: str, passed: bool, detail: str = "") -> None:
        _VERDICTS.append((name, passed, detail))
        print(f"{'PASS' if passed else 'FAIL'} {name} {detail}".rstrip())


@pytest.fixture(scope="session")
def verdicts() -> Verdicts:
    return Verdicts()


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _VERDICTS:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} {name} {detail}".rstrip())
