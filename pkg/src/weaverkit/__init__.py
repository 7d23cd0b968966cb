"""Interlacing-family partitions, paving and frame tools at desk scale."""

from __future__ import annotations

from .barrier import (BarrierReport, McpCertificate, barrier_gradient, barrier_on_diagonal,
                      barrier_shift_check, barrier_value, mcp_certificate, shifted_barrier)
from .errors import (BudgetExceeded, CertificateUnmet, IllConditioned, InternalError, InvalidInput,
                     NotPSD, NotRealRooted, SingularPoint, WeaverError)
from .frames import (FrameBounds, RieszPartitionCertificate, bessel_riesz_complement_check,
                     bt_partition, dual_riesz_system, feichtinger_partition, fourier_frame_gram,
                     frame_bounds, naimark_complement, parseval_completion, r_epsilon_partition,
                     schur_horn_frame)
from .linalg import char_poly, eigenvalues, frame_operator, gram_matrix, jacobi_eigh, operator_norm
from .mixed import (MatrixTuple, RandomRankOneModel, conditional_expected_char_poly,
                    expected_char_poly, matrix_tuple, mixed_char_poly)
from .partition import (Partition, PartitionCertificate, brute_force_partition, extend_to_parseval,
                        greedy_partition, lift_to_blocks, refine, weaver_bound)
from .paving import (PavingCertificate, pave_bounded, pave_projection_delta, pave_projection_half,
                     pave_reflection, pave_selfadjoint)
from .poly import RealPolynomial, convex_combination, is_real_rooted, maxroot, sturm_real_root_count

__version__ = "0.1.0"
