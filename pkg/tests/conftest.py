import numpy as np
import pytest

from invgauss.hermite import HermiteExpansion


def expansion(dim, terms, degree=None):
    return HermiteExpansion.from_dict(dim, terms, degree)


def tilde_function(dim, terms):
    """f = sum c_k Ht_k as an EnvelopedFunction (monomial payload)."""
    return expansion(dim, terms).to_enveloped()


def random_expansion(rng, dim, degree, real=True):
    e = HermiteExpansion(dim, degree)
    c = rng.normal(size=len(e.indices))
    if not real:
        c = c + 1j * rng.normal(size=len(e.indices))
    e.coeffs = c.astype(complex)
    return e


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for num in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[num])
