import secrets

import numpy as np


def make_rand_seed() -> int:
    """Make a non-negative 32-bit random seed.

    Returns
    -------
    int
        A 32-bit random seed.
    """
    return secrets.randbits(32)


def process_seed(seed: int | None) -> int:
    """Process a seed before it is used for sampling.

    If the seed is None, a random seed is generated so that it
    can be recorded with the results. Negative seeds are rejected
    because numpy generators do not accept them.

    Parameters
    ----------
    seed : int | None
        The random seed to process.

    Returns
    -------
    int
        The seed to use.
    """
    if seed is None:
        return make_rand_seed()
    if seed < 0:
        msg = f"Seeds must be non-negative, got {seed}"
        raise ValueError(msg)
    return seed


def make_rng(seed: int | None) -> np.random.Generator:
    """Create a numpy generator from a processed seed."""
    return np.random.default_rng(process_seed(seed))
