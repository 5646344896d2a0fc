import pytest

from gdimlab.algebra import build_circulant_ring, find_minimal_reduction, trivial_square_ring
from gdimlab.approximation import build_R_from_reduction
from gdimlab.constructions import certified_quotient

P = 101

# criterion number -> (description, passed); filled by test_acceptance.py
ACCEPTANCE: dict = {}


@pytest.fixture(scope="session")
def ring2():
    """Certified quotient of the circulant ring of type 2, with the R/xR certificate."""
    R, f, cert = certified_quotient(build_circulant_ring(2, P), 0)
    return R, cert


@pytest.fixture(scope="session")
def ring3():
    R, f, cert = certified_quotient(build_circulant_ring(3, P), 0)
    return R, cert


@pytest.fixture(scope="session")
def reduction2():
    S = build_circulant_ring(2, P)
    x = find_minimal_reduction(S, 0)
    R = build_R_from_reduction(S, x)
    return S, R, R.element(1, x.coords)


@pytest.fixture(scope="session")
def square_zero():
    return trivial_square_ring(2, P)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        desc, ok = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {desc}")
