import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_response(rng, scale=0.3):
    """A random effective-response set, small enough to stay well posed."""
    from bianiso.medium import EffectiveResponse

    def tensor():
        return scale * (rng.standard_normal((3, 3))
                        + 1j * rng.standard_normal((3, 3)))

    return EffectiveResponse(pe=tensor(), ph=tensor(), me=tensor(), mh=tensor())


def random_susceptibility_values(rng, scale=0.3):
    from bianiso.medium import SusceptibilityValues

    def tensor():
        return scale * (rng.standard_normal((3, 3))
                        + 1j * rng.standard_normal((3, 3)))

    me = tensor()
    return SusceptibilityValues(ee=tensor(), eb=me.T.copy(), me=me, mb=tensor())
