import numpy as np
import pytest

import icrar


@pytest.fixture(scope="session")
def table():
    return icrar.bundled_table()


@pytest.fixture(scope="session")
def frozen_series():
    """One fixed n=150 draw used across modules: i.i.d., rho=.5, fixed start."""
    model = icrar.ModelParams(mu=0.0, rho=0.5, n=150)
    series = icrar.simulate_series(
        model,
        icrar.InnovationSpec.iid(),
        icrar.InitialConditionSpec("fixed0"),
        icrar.substream(314159, 0),
    )
    return series.y


def make_series(seed: int, rho: float, n: int = 150, mu: float = 0.0,
                innov: str = "iid", init: str = "fixed0") -> np.ndarray:
    model = icrar.ModelParams(mu=mu, rho=rho, n=n)
    series = icrar.simulate_series(
        model,
        icrar.INNOVATION_PRESETS[innov],
        icrar.InitialConditionSpec(init),
        icrar.substream(seed, 0),
    )
    return series.y
