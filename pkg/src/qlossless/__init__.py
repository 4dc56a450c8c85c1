"""Lossless quantum variable-length coding with exponential length penalization."""

from qlossless.codes import (
    ClassicalCode,
    assign_codewords,
    classical_avg_length,
    exp_huffman,
    huffman,
    kraft_sum,
    oracle_optimal_lengths,
    shannon_lengths,
)
from qlossless.entropy import escort, relative_entropy, renyi, renyi_divergence, von_neumann
from qlossless.linalg import DensityOperator, eigh, mat_fn, validate_density
from qlossless.qcode import (
    FockVector,
    QuantumEncoder,
    SourceEnsemble,
    build_encoder,
    code_induced_state,
    decode,
    encode,
    encode_block,
    quantum_kraft_sum,
    source_base_length,
    source_t_avg_length,
    t_codeword_length,
)

__version__ = "0.1.0"
