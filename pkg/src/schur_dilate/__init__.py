"""Contraction parametrizations, positive-matrix factorizations, and dilations.

The package splits into:

``linalg``       dense complex kernel (eigendecomposition, PSD roots,
                 pseudoinverse, tensor utilities)
``contraction``  defect operators, the Julia unitary, factor solves
``scparams``     parameter extraction/reconstruction for row, column and
                 block contractions, unitaries, and positive matrices
``maps``         linear maps on matrix algebras, witness catalog,
                 positive-map inequality suite
``families``     structured positive-matrix generators + witness harness
``dilation``     POVM -> PVM completion and unitary channel models
``serialize``    JSON wire formats
``cli``          the ``schur-dilate`` command
"""

__version__ = "0.1.0"

from .contraction import (
    DefectPair,
    PartialIsometryFactor,
    defects,
    julia,
    solve_contraction_factor,
    solve_partial_isometry,
)
from .dilation import (
    DilationResult,
    KrausChannel,
    Povm,
    channel_dilate,
    channel_simulate,
    povm_dilate,
    povm_verify,
)
from .families import FAMILY_NAMES, StateFamilySample, gen_family, witness_check
from .linalg import (
    Tolerances,
    herm_eig,
    is_psd,
    kron,
    pinv,
    ptrace_first,
    sqrt_psd,
)
from .maps import (
    MatrixLinearMap,
    apply_blockwise,
    builtin_witness,
    map_from_kraus_pairs,
    positivity_inequality_suite,
)
from .scparams import (
    BlockShape,
    MatrixContractionParams,
    PositiveSCParams,
    RowColParams,
    col_parametrize,
    col_reconstruct,
    dominated_factor,
    matrix_defects_2x2,
    matrix_parametrize,
    matrix_reconstruct,
    psd_cholesky,
    psd_parametrize,
    psd_reconstruct,
    row_defect_factors,
    row_parametrize,
    row_reconstruct,
    tensor_sc,
    unitary_factorize,
)

__all__ = [name for name in dir() if not name.startswith("_")]
