import pytest

from nswave.acceptance import composite_ends
from nswave.composite import CompositeAnsatz
from nswave.contact import ContactWave
from nswave.gas import GasParams, ThermoState
from nswave.riemann import EndStates


@pytest.fixture(scope="session")
def gas():
    return GasParams()


@pytest.fixture(scope="session")
def contact_wave(gas):
    ends = EndStates(ThermoState(1.0, 0.0, 1.0), ThermoState(1.1, 0.0, 1.1))
    return ContactWave.from_ends(gas, ends)


@pytest.fixture(scope="session")
def composite(gas):
    return CompositeAnsatz.from_ends(gas, composite_ends(0.05))
