import _util
from hypothesis import settings

# exact arithmetic is slow on unlucky examples; timing is checked where it matters
settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")


def pytest_terminal_summary(terminalreporter):
    if _util.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_util.RESULTS, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
