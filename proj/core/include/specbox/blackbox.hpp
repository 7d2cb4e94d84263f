#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <mutex>
#include <span>
#include <vector>

#include "specbox/state_vector.hpp"

namespace specbox {

namespace detail {
struct BoxAccess;
}

/// An n-qubit unitary available only as an operation: protocol code can ask
/// for U^p to be applied to the box span of a state, and nothing else. The
/// matrix itself is sealed; only the constructors in this module and the
/// ground-truth oracles in specbox::verify (via detail::BoxAccess) may read
/// it. Powers are produced by repeated squaring inside the box and cached,
/// so the box iterates itself - callers cannot.
class BlackBoxUnitary {
  public:
    int qubit_count() const { return n_; }
    std::uint64_t dimension() const { return std::uint64_t(1) << n_; }

    /// Number of apply_power invocations so far (query accounting).
    std::uint64_t query_count() const { return queries_.load(std::memory_order_relaxed); }

    /// Apply U^p to the state's box span. Counts as one query regardless
    /// of p. Safe to call concurrently on distinct states.
    void apply_power(StateVector& state, std::uint64_t p) const;

  private:
    explicit BlackBoxUnitary(Matrix matrix);

    const Matrix& power(std::uint64_t p) const;

    Matrix matrix_;
    int n_;
    mutable std::atomic<std::uint64_t> queries_{0};
    mutable std::map<std::uint64_t, Matrix> power_cache_;
    mutable std::mutex cache_mutex_;

    friend struct detail::BoxAccess;
};

/// Hermitian matrix generating an evolution U = exp(-iHt).
struct HermitianGenerator {
    Matrix matrix;

    explicit HermitianGenerator(Matrix h);
};

/// Haar-distributed n-qubit unitary (QR of a complex Gaussian matrix with
/// phase-normalized triangular factor). Dense construction, n <= 6.
BlackBoxUnitary haar_random(int n, RngStream& rng);

/// Unitary with exactly the given eigenphase multiset (2^n values in
/// [0, 2 pi)), conjugated by a Haar-random basis.
BlackBoxUnitary from_spectrum(std::span<const double> phases, RngStream& rng);

/// U = exp(-iHt) via eigendecomposition of the Hermitian generator.
BlackBoxUnitary from_hamiltonian(const HermitianGenerator& gen, double t);

/// Box wrapping an explicit unitary matrix (test instances, file input).
BlackBoxUnitary from_matrix(Matrix u);

namespace detail {

/// Privileged read access to the hidden matrix. Reserved for the
/// constructors above and the specbox::verify oracles; protocol code
/// (qpe, spectra) must never touch this.
struct BoxAccess {
    static const Matrix& matrix(const BlackBoxUnitary& box) { return box.matrix_; }
    static BlackBoxUnitary make(Matrix m) { return BlackBoxUnitary(std::move(m)); }
};

} // namespace detail

} // namespace specbox
