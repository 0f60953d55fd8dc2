"""corand: constrained-permutation randomization for guided exploration
of tabular data.

The engine models what an analyst already knows as tile constraints
over a column-permutation distribution, contrasts two constrained
distributions through their analytically computed covariances, and
serves the linear projection in which they differ most in variance.
"""

from corand.dataset import (
    CenteredData,
    Dataset,
    LoadOptions,
    ParseError,
    center,
    load_csv,
    onehot_encode,
    save_csv,
    zscore,
)
from corand.tiling import (
    PermutationVector,
    Tile,
    Tiling,
    equivalent_bruteforce,
    is_allowed,
    merge_all,
    merge_tile,
    new_tiling,
)
from corand.sampler import SeededRng, apply, apply_to_matrix, sample_permutation
from corand.covariance import CovMatrix, analytical_covariance, montecarlo_covariance
from corand.hypothesis import (
    HypothesisPair,
    HypothesisSpec,
    assemble,
    hypothesis_tilings,
)
from corand.projection import (
    ProjectionBasis,
    ViewResult,
    WhiteningResult,
    gain,
    optimal_directions,
    project,
    whiten,
)
from corand.selection import AttributeSuggestion, suggest_attributes
from corand.session import Session, create_session, restore_session

__version__ = "0.1.0"
