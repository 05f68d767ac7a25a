"""The four models: metric spaces, differential logical relations, change
structures and a cartesian differential category of polynomial maps."""

from .cdc import CDCBackend
from .change import ChangeBackend
from .dlr import DLRBackend
from .metric import MetricBackend

BACKENDS = {
    "metric": MetricBackend,
    "dlr": DLRBackend,
    "change": ChangeBackend,
    "cdc": CDCBackend,
}


def make_backend(name: str, seed: int = 0, samples: int = 6):
    try:
        return BACKENDS[name](seed=seed, samples=samples)
    except KeyError:
        raise ValueError(f"unknown backend {name!r}; choose from {', '.join(sorted(BACKENDS))}")
