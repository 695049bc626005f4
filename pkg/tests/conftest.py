import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

# verdict lines appended by test_acceptance, echoed once at the end of the run
VERDICTS: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance")
        for line in VERDICTS:
            terminalreporter.write_line(line)
