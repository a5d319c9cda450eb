"""Graph tokenizations (spectral, random-walk, adjacency) and the gadget
constructions used to check what each tokenization can and cannot expose."""

from .graph import (
    Graph,
    adjacency,
    build_graph,
    closed_walk_diagonal,
    degree_matrix,
    is_connected,
    laplacian,
    parse_graph,
    serialize_graph,
    transition_matrix,
    triangle_count,
)
from .planarity import PlanarityVerdict, is_planar
from .spectra import EigenSystem, compare_spectra, eigendecompose, verify_twin_edge_lemma
from .tokenizers import (
    AdjacencyTokenizer,
    CombinedTokenizer,
    ProjectedAdjacencyTokenizer,
    RandomWalkTokenizer,
    SpectralTokenizer,
    TokenMatrix,
    adjacency_projected_tokens,
    adjacency_tokens,
    combined_tokens,
    pad_tokens,
    rw_tokens,
    spectral_tokens,
)

__version__ = "0.1.0"
