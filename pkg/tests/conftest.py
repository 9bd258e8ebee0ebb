import numpy as np
import pytest

from gaoval.mortality import CANONICAL_GOMPERTZ, GompertzModel, MortalityModel
from gaoval.valuation import MarketParams, PolicySpec, Preference


class ConstantHazardModel(MortalityModel):
    """Exponential-lifetime law; every factor has an elementary closed form,
    which makes it a convenient independent oracle."""

    def __init__(self, lam: float):
        self.lam = lam
        self.label = f"constant-hazard({lam})"

    def force_of_mortality(self, age):
        age = np.asarray(age, dtype=float)
        out = np.full(age.shape, self.lam)
        return out if out.ndim else float(self.lam)

    def survival_probability(self, age, t):
        t = np.asarray(t, dtype=float)
        out = np.exp(-self.lam * t)
        return out if out.ndim else float(out)


@pytest.fixture(scope="session")
def female_1970():
    return GompertzModel(CANONICAL_GOMPERTZ["ON-female-1970"], "ON-female-1970")


@pytest.fixture(scope="session")
def female_2004():
    return GompertzModel(CANONICAL_GOMPERTZ["ON-female-2004"], "ON-female-2004")


@pytest.fixture(scope="session")
def all_models():
    return {
        label: GompertzModel(params, label)
        for label, params in CANONICAL_GOMPERTZ.items()
    }


@pytest.fixture(scope="session")
def market_1970s():
    return MarketParams(r=0.07, mu=0.08, sigma=0.12)


@pytest.fixture(scope="session")
def crra_14():
    return Preference(gamma=1.4)


@pytest.fixture(scope="session")
def base_policy():
    return PolicySpec(chi=35.0, T=30.0, h=1.0 / 9.0, fund=350000.0)
