"""
Shared fixtures: small jet spaces, the heat and Liouville systems, and paths
to the bundled corpus.
"""

from pathlib import Path

import pytest

from jetlaw.core.config_helpers import EngineSettings
from jetlaw.corpus import bundled_corpus_dir
from jetlaw.expr import JetSpace, JetVar
from jetlaw.jet import PdeSystem, Ranking
from jetlaw.problem import load_problem

DATA_DIR = Path(__file__).resolve().parent / "data"


@pytest.fixture
def settings():
    """Default engine settings (seed 0, 16 probes)"""
    return EngineSettings()


@pytest.fixture
def xt_space():
    """One dependent u over (x, t)"""
    return JetSpace(["x", "t"], ["u"])


@pytest.fixture
def heat(xt_space):
    """u_t = u_xx solved for u_t under lex t > x"""
    ranking = Ranking(xt_space, "lex", independent=["t", "x"])
    u_t = JetVar("u", xt_space.index("t"))
    component = xt_space.jet("u", "t") - xt_space.jet("u", "xx")
    return PdeSystem.from_components(xt_space, [component], ranking, leads=[u_t])


@pytest.fixture
def corpus_dir():
    return bundled_corpus_dir()


@pytest.fixture
def liouville(corpus_dir):
    """Liouville-type system with its g1(x) family, constraint and lambda"""
    return load_problem(corpus_dir / "liouville_system.clw")


@pytest.fixture
def potential_flow(corpus_dir):
    return load_problem(corpus_dir / "potential_flow.clw")


@pytest.fixture
def corrupted_file():
    return DATA_DIR / "corrupted_liouville.clw"
