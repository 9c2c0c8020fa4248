import random
from functools import lru_cache

import pytest
from hypothesis import strategies as st

from wgroup.cgroup import PresentedCGroup
from wgroup.classify import build, enumerate_trees
from wgroup.formats import fixture, read_cgp, read_sos
from wgroup.orderspace import SpaceOfOrderings, random_basis_change


def load_space(name):
    return read_sos(fixture(name))


def load_group(name):
    return PresentedCGroup.from_presentation(read_cgp(fixture(name)))


@pytest.fixture(scope="session")
def conn4():
    return load_space("connected4.sos")


@pytest.fixture(scope="session")
def two_comp():
    return load_space("two_components.sos")


@pytest.fixture(scope="session")
def sap2():
    return load_space("sap2.sos")


@pytest.fixture(scope="session")
def leaf():
    return load_space("leaf.sos")


@pytest.fixture(scope="session")
def g_conn4():
    return load_group("connected4.cgp")


@pytest.fixture(scope="session")
def g_two():
    return load_group("two_components.cgp")


@pytest.fixture(scope="session")
def nonrealizable():
    return load_group("nonrealizable.cgp")


def raw_conn4():
    """The smallest connected space before re-basing: classes e1, e2, e3, e1+e2+e3."""
    return SpaceOfOrderings(3, 0b111, (0b100, 0b010, 0b001, 0b111))


def nonrealizable_candidate():
    """Characters e1..e5 and e1+...+e5 of F2^5, with -1 = (1,1,1,1,1)."""
    return SpaceOfOrderings(5, 0b11111, (16, 8, 4, 2, 1, 31))


@lru_cache(maxsize=None)
def trees(max_rank=5):
    return tuple(enumerate_trees(max_rank))


@lru_cache(maxsize=None)
def generated_spaces(count=200, max_rank=6, seed=2024):
    """Builder outputs under random basis changes fixing -1."""
    rng = random.Random(seed)
    pool = trees(max_rank)
    out = []
    for k in range(count):
        t = pool[k % len(pool)]
        space, _ = random_basis_change(build(t), rng)
        out.append((t, space))
    return tuple(out)


@st.composite
def small_valid_spaces(draw, max_rank=4):
    t = draw(st.sampled_from(trees(max_rank)))
    seed = draw(st.integers(0, 2**16))
    space, _ = random_basis_change(build(t), random.Random(seed))
    return space


def vectors(n):
    return st.integers(0, (1 << n) - 1)


ACCEPTANCE: dict[int, list[tuple[str, bool, str]]] = {}


def record(criterion: int, check: str, ok: bool, detail: str = "") -> None:
    ACCEPTANCE.setdefault(criterion, []).append((check, ok, detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        checks = ACCEPTANCE[k]
        verdict = "PASS" if all(ok for _, ok, _ in checks) else "FAIL"
        parts = "; ".join(f"{name}: {'ok' if ok else 'FAIL'}{f' ({d})' if d else ''}" for name, ok, d in checks)
        terminalreporter.write_line(f"criterion {k}: {verdict} - {parts}")
