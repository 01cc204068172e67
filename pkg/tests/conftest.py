import pytest
from hypothesis import strategies as st

from ppboole.boolfn import BoolFn, IndexMap
from ppboole.clones import GeneratorSet
from ppboole.boolfn import named


def gs(*names: str) -> GeneratorSet:
    return GeneratorSet(tuple(named(n) for n in names), "[" + ",".join(names) + "]")


@st.composite
def boolfns(draw, min_arity=1, max_arity=4):
    n = draw(st.integers(min_arity, max_arity))
    return BoolFn(n, draw(st.integers(0, (1 << (1 << n)) - 1)))


@st.composite
def index_maps(draw, source_arity, max_target=4):
    r = draw(st.integers(1, max_target))
    return IndexMap(r, tuple(draw(st.integers(1, r)) for _ in range(source_arity)))


# -- acceptance ledger: one line per criterion in the terminal summary ---------------

ACCEPTANCE: dict[int, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when != "call" and not (rep.when == "setup" and rep.failed):
        return
    number, title = marker.args
    ACCEPTANCE[number] = (title, "PASS" if rep.passed else "FAIL")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, verdict = ACCEPTANCE[number]
        terminalreporter.write_line(f"{verdict}  criterion {number:>2}: {title}")


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")
