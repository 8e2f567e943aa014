import numpy as np
import pytest

from gmrec import Field, Graph, build_graph_matrix, stream


@pytest.fixture
def rng():
    return stream(20240817)


def make_instance(seed, n, m, field=Field.COMPLEX, kind="chain", sigma_n=0.0, mean_re=None):
    """Ground-truth matrix plus synthetic measurements for a named topology."""
    from gmrec import sample_generator, synthesize

    g = Graph.star(n) if kind == "star" else Graph.chain(n)
    Y = build_graph_matrix(g, stream(seed, 0), field_tag=field)
    if mean_re is None:
        mean_re = 1.0 if field is Field.COMPLEX else 0.0
    B = sample_generator(m, n, field, 1.0, stream(seed, 1), mean_re=mean_re)
    ms = synthesize(B, Y, sigma_n, stream(seed, 2))
    return g, Y, ms
