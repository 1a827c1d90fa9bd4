import os
from functools import lru_cache

import pytest
from hypothesis import HealthCheck, settings

from nullwidth.certify import build_certificate, generate_instance, subdivided_sphere

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("ci", max_examples=15, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@lru_cache(maxsize=None)
def certificate(L, seed):
    return build_certificate(generate_instance(L, seed))


@pytest.fixture(scope="session")
def sphere1():
    return subdivided_sphere(1)


@pytest.fixture(scope="session")
def sphere2():
    return subdivided_sphere(2)
