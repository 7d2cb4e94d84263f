#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "specbox/blackbox.hpp"
#include "specbox/qpe.hpp"
#include "specbox/spectra.hpp"

/// Brute-force ground truth: everything in this namespace may read the
/// hidden box matrix (via detail::BoxAccess) and builds references by dense
/// linear algebra, independent of the stripe kernels it is used to check.
namespace specbox::verify {

struct EigenDecomposition {
    std::vector<double> phases; // ascending, canonicalized to [0, 2 pi)
    Matrix vectors;             // orthonormal columns, vectors.col(a) <-> phases[a]
};

/// Full eigendecomposition of the hidden unitary via Schur reduction (the
/// Schur form of a unitary is diagonal, so the Schur basis is an orthonormal
/// eigenbasis even across degenerate clusters). Throws if the reconstruction
/// residual exceeds 1e-8.
EigenDecomposition exact_eigenphases(const BlackBoxUnitary& box);

/// Same decomposition for an explicit unitary matrix.
EigenDecomposition unitary_eigensystem(const Matrix& u);

/// Weight of a register preparation on each eigenvector (maximally mixed:
/// uniform; basis/explicit: squared projections).
std::vector<double> prep_eigenweights(const qpe::RegisterPrep& prep, const EigenDecomposition& eig);

/// Enumerates all eigenpairs (a, b): support at the wrapped difference
/// phi_a - phi_b in (-pi, pi], weight p1(a) p2(b); equal differences merged.
spectra::SpectralDensity exact_difference_distribution(const BlackBoxUnitary& box,
                                                       const qpe::InitialPreparation& prep);

enum class EquivalenceMode {
    global_phase, ///< A = e^{i theta} B for a single theta
    branchwise,   ///< per-ancilla-block equality up to a per-block phase
};

struct EquivalenceResult {
    bool equivalent = false;
    double max_residual = 0.0;
};

/// Compare two explicit unitaries up to global or per-ancilla-branch phase.
/// Branchwise mode also charges any coupling between different ancilla
/// values to the residual. ancilla_bits is ignored in global_phase mode.
EquivalenceResult circuit_equivalence(const Matrix& a, const Matrix& b, EquivalenceMode mode,
                                      int ancilla_bits = 0, double tolerance = 1e-9);

/// Matrix of an arbitrary protocol-op sequence, built by running the ops on
/// every basis state. Feasible up to 12 total qubits.
Matrix assemble_ops_unitary(const BlackBoxUnitary& box, const RegisterLayout& layout,
                            std::span<const qpe::ProtocolOp> ops);

/// Matrix of the k-step conditional core of the black-box protocol
/// (no Hadamard layer, no inverse QFT).
Matrix assemble_protocol_unitary(const BlackBoxUnitary& box, const qpe::ProtocolConfig& config);

/// Explicit product of the k conditional transformations the protocol is
/// meant to realize, assembled densely from the hidden matrix: for each
/// ancilla branch, U^{2^j} acts on R1 where bit j is set and on R2 where it
/// is clear. The independent reference for branchwise equivalence checks.
Matrix reference_conditional_unitary(const BlackBoxUnitary& box, const qpe::ProtocolConfig& config);

/// Kronecker product with `high` on the high index bits (little-endian
/// convention: index = low_index + dim_low * high_index).
Matrix kron(const Matrix& high, const Matrix& low);

/// Exact outcome distribution of textbook phase estimation run on the
/// explicit pair unitary (box matrix on R1's slot, its adjoint on R2's) with
/// the same product preparation the black-box protocol uses. The white-box
/// reference the protocol's distribution must match.
std::vector<double> whitebox_cross_distribution(const BlackBoxUnitary& box,
                                                const qpe::InitialPreparation& prep, int k);

} // namespace specbox::verify
