import sys
import numpy as np
import pytest
from hypothesis import strategies as st

from permstab.perm import PermTuple, Permutation


@st.composite
def perms(draw, n=None, max_n=12):
    if n is None:
        n = draw(st.integers(1, max_n))
    return Permutation(draw(st.permutations(range(n))))


@st.composite
def perm_pairs(draw, count=2, max_n=12):
    n = draw(st.integers(1, max_n))
    return tuple(draw(perms(n=n)) for _ in range(count))


def random_perm(rng: np.random.Generator, n: int) -> Permutation:
    return Permutation(rng.permutation(n))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def transposition(n: int, a: int, b: int) -> Permutation:
    img = list(range(n))
    img[a], img[b] = img[b], img[a]
    return Permutation(img)


def with_transposition(t: PermTuple, gen: int, a: int, b: int) -> PermTuple:
    """Tuple whose generator ``gen`` is composed with the transposition (a b)."""
    from permstab.perm import compose

    perms_ = list(t)
    perms_[gen] = compose(perms_[gen], transposition(t.degree, a, b))
    return PermTuple(perms_)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
