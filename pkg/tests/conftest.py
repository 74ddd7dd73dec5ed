import copy

import numpy as np
import pytest

from plexsim.cli import PRESETS, build_emitter, build_stack, validate_config
from plexsim.greens import kernel_spectrum
from plexsim.pseudomode import fit_kernel, load_reference_set

KERNEL_GRID = np.arange(2.5, 4.2001, 0.001)
FIT_WINDOW = (2.8, 4.2)


def preset_config(name):
    return validate_config(copy.deepcopy(PRESETS[name]))


@pytest.fixture(scope="session")
def bare_stack():
    return build_stack(preset_config("bare"))


@pytest.fixture(scope="session")
def coated_stack():
    return build_stack(preset_config("coated"))


@pytest.fixture(scope="session")
def emitter():
    return build_emitter(preset_config("coated"))


@pytest.fixture(scope="session")
def bare_kernel(bare_stack, emitter):
    return kernel_spectrum(bare_stack, emitter, KERNEL_GRID)


@pytest.fixture(scope="session")
def coated_kernel(coated_stack, emitter):
    return kernel_spectrum(coated_stack, emitter, KERNEL_GRID)


@pytest.fixture(scope="session")
def bare_fit(bare_kernel):
    return fit_kernel(bare_kernel, 7, weighting="relative", window=FIT_WINDOW)


@pytest.fixture(scope="session")
def coated_fit(coated_kernel):
    return fit_kernel(coated_kernel, 8, weighting="relative", window=FIT_WINDOW)


@pytest.fixture(scope="session")
def bare_table():
    return load_reference_set("bare")


@pytest.fixture(scope="session")
def coated_table():
    return load_reference_set("coated")
