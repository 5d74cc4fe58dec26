import numpy as np
import pytest

from marcwt.core_it import ConditionalPmf, JointPmf

_ACCEPTANCE_LINES: list[str] = []


def random_simplex(rng, shape):
    x = rng.exponential(size=shape)
    return x / x.sum(axis=-1, keepdims=True)


def random_joint(rng, variables) -> JointPmf:
    shape = tuple(s for _, s in variables)
    p = rng.exponential(size=shape)
    # Sprinkle exact zeros to exercise the 0 log 0 convention.
    p[rng.random(shape) < 0.1] = 0.0
    if p.sum() == 0:
        p.flat[0] = 1.0
    return JointPmf(tuple(variables), p / p.sum())


def random_kernel(rng, given, outputs) -> ConditionalPmf:
    variables = tuple(given) + tuple(outputs)
    g_shape = tuple(s for _, s in given)
    o_shape = tuple(s for _, s in outputs)
    rows = random_simplex(rng, g_shape + (int(np.prod(o_shape)),))
    return ConditionalPmf(variables, tuple(n for n, _ in given), rows.reshape(g_shape + o_shape))


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
