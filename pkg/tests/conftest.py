import pytest

from compactloc.catalog import symmetric_group
from compactloc.fusion import centrics, fusion_from_group
from compactloc.partial_group import from_finite_group
from compactloc.reconstruction import build_partial_group
from compactloc.transporter import transporter_from_locality


def centric_locality(G, p):
    S = G.sylow(p)
    F = fusion_from_group(G, S, p)
    emb = getattr(F.S, "embedding", list(range(G.n)))
    delta = [frozenset(emb[x] for x in P) for P in centrics(F)]
    return from_finite_group(G, S, delta, p)


@pytest.fixture(scope="session")
def s4():
    return symmetric_group(4)


@pytest.fixture(scope="session")
def s4_loc(s4):
    return centric_locality(s4, 2)


@pytest.fixture(scope="session")
def s4_fusion(s4):
    return fusion_from_group(s4, s4.sylow(2), 2)


@pytest.fixture(scope="session")
def s4_T(s4_loc):
    return transporter_from_locality(s4_loc)


@pytest.fixture(scope="session")
def s4_rebuilt(s4_T):
    return build_partial_group(s4_T)


_ACCEPTANCE_KEY = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(n, ok, detail)``."""
    store = request.config.stash.setdefault(_ACCEPTANCE_KEY, {})

    def record(n: int, ok: bool, detail: str = "") -> bool:
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'}" + (f" ({detail})" if detail else "")
        store[n] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = config.stash.get(_ACCEPTANCE_KEY, {})
    if store:
        terminalreporter.write_sep("=", "acceptance criteria")
        for n in sorted(store):
            terminalreporter.write_line(store[n])
