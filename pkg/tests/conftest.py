import pytest

from pencil_spectra import DielectricModel, InterfaceProblem


@pytest.fixture(scope="session")
def drude_problem():
    """Drude metal (omega_p=0.8, gamma=1) against a constant dielectric (eta=1)."""
    return InterfaceProblem(DielectricModel.constant(2.0),
                            DielectricModel.drude(0.8, 1.0))


@pytest.fixture(scope="session")
def lossless_problem():
    """Same interface without damping (gamma=0)."""
    return InterfaceProblem(DielectricModel.constant(2.0),
                            DielectricModel.drude(0.8, 0.0))


@pytest.fixture(scope="session")
def guided_2d_problem():
    """The 2D example medium pair: (eta, gamma, omega_p) = (1, 2, 0.6)."""
    return InterfaceProblem(DielectricModel.constant(2.0),
                            DielectricModel.drude(0.6, 2.0))


@pytest.fixture(scope="session")
def equal_problem():
    """Identical constant media on both sides: no interface, no plasmons."""
    return InterfaceProblem(DielectricModel.constant(2.0),
                            DielectricModel.constant(2.0))


# frozen oracle anchors (hand derivations in the module tests)
OMEGA0_RE = 1.9419677125521257        # Re of the W~_- zeros for (0.8, 1)
PLASMON = 1.049810782568871           # biquadratic root passing every filter
QUARTIC_HI = 4.052053296465518        # the rejected biquadratic root
A_WITNESS = 3.419662858177371         # 2D witness at omega=-i for (1, 2, 0.6)
OMEGA_SP = 1.1577620072932282         # sqrt(2 pi wp^2/(2+eta)) asymptote
MPLUS_EDGE_3 = 2.1213203435596424     # sqrt(k^2/(1+eta)) at k=3
MPLUS_EDGE_07 = 0.4949747468305833    # and at k=0.7
