import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from leafselect import GenConfig  # noqa: E402
from leafselect.io import read_instance  # noqa: E402

settings.register_profile(
    "default", max_examples=150, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile("default")

ROOT = Path(__file__).resolve().parent.parent
WORKED_EXAMPLE = ROOT / "fixtures" / "worked-example.json"


@st.composite
def gen_configs(draw, min_n=2, max_n=300, min_m=1):
    n = draw(st.integers(max(min_n, min_m), max_n))
    m = draw(st.integers(min_m, n))
    marking = draw(st.sampled_from(["uniform", "clustered"]))
    burst = draw(st.integers(1, min(m, 8))) if marking == "clustered" else 1
    return GenConfig(
        n=n, m=m,
        seed=draw(st.integers(0, 2 ** 32)),
        shape=draw(st.sampled_from(["random", "caterpillar", "balanced", "longspine"])),
        marking=marking, burst=burst,
        nh_growth=draw(st.sampled_from([1, 2, 3, 5, 8, 20])),
    )


@pytest.fixture(scope="session")
def worked_example():
    return read_instance(WORKED_EXAMPLE)
