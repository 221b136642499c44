import pytest

from iwin import PhantomSpec, generate, suppress_background


@pytest.fixture(scope="session")
def phantom_corpus():
    """The twenty default phantoms (seeds 1..20) with their ground truths."""
    return [(seed, *generate(PhantomSpec(seed=seed))) for seed in range(1, 21)]


@pytest.fixture(scope="session")
def phantom_one():
    img, truth = generate(PhantomSpec(seed=1))
    return img, truth


@pytest.fixture(scope="session")
def phantom_one_mask(phantom_one):
    img, _ = phantom_one
    return suppress_background(img)


def random_mask(rng, shape, density=None):
    from iwin import BinaryMask

    density = density if density is not None else float(rng.uniform(0.1, 0.9))
    return BinaryMask(rng.random(shape) < density)
