"""Clique immersions and balanced subdivisions in pseudorandom regular graphs.

The package builds embedding certificates (branch-vertex injections plus
explicit connecting paths) inside spectrally certified regular graphs, and
verifies every certificate with an independent checker.
"""

__version__ = "0.1.0"

from .certify import EmbeddingCertificate, VerifyReport, verify  # noqa: F401
from .generators import load_graph, paley, random_regular, save_graph  # noqa: F401
from .graphs import Graph, GraphView, build_graph, view_minus  # noqa: F401
from .immersion_dense import build_dense_immersion  # noqa: F401
from .immersion_medium import build_medium_immersion  # noqa: F401
from .spectral import SpectralReport, adjacency_spectrum  # noqa: F401
from .subdivision import build_balanced_subdivision  # noqa: F401
