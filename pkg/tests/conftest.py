"""Shared fixtures; collects acceptance verdicts and prints them after the run."""

import pytest

_VERDICTS: list[tuple[str, bool, str]] = []


class Acceptance:
    """Record one criterion verdict, print it, then assert on it."""

    def check(self, criterion: str, title: str, ok: bool, detail: str) -> None:
        ok = bool(ok)
        line = f"{'PASS' if ok else 'FAIL'}  criterion {criterion:<3} {title}: {detail}"
        _VERDICTS.append((criterion, ok, line))
        print(line)
        assert ok, line


@pytest.fixture(scope="session")
def acceptance():
    return Acceptance()


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for _, _, line in sorted(_VERDICTS, key=lambda v: _sort_key(v[0])):
        terminalreporter.write_line(line)
    passed = sum(ok for _, ok, _ in _VERDICTS)
    terminalreporter.write_line(f"{passed}/{len(_VERDICTS)} acceptance checks passed")


def _sort_key(criterion: str):
    digits = "".join(ch for ch in criterion if ch.isdigit())
    return (int(digits or 0), criterion)
