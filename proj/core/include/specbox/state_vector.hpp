#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "specbox/layout.hpp"
#include "specbox/rng.hpp"

namespace specbox {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Tolerances used throughout: 1e-10 for unitarity/normalization checks,
/// 1e-12 for elementwise equality.
inline constexpr double kUnitaryTol = 1e-10;
inline constexpr double kElementTol = 1e-12;

/// Dense state vector over a register layout. Qubit q is bit q of the
/// amplitude index (little-endian), so the ancilla register occupies the
/// low bits and ancilla blocks are contiguous in memory.
///
/// All gate methods transform the state in place over amplitude stripes;
/// none of them allocates a second full-size array except where noted.
class StateVector {
  public:
    /// |0...0> over the given layout.
    explicit StateVector(const RegisterLayout& layout);

    const RegisterLayout& layout() const { return layout_; }
    int num_qubits() const { return layout_.total_qubits(); }
    std::uint64_t size() const { return amps_.size(); }

    std::span<const cplx> amplitudes() const { return amps_; }
    std::span<cplx> amplitudes() { return amps_; }
    cplx amplitude(std::uint64_t index) const { return amps_[index]; }

    /// Reset to |0...0> without reallocating.
    void reset();

    /// Reset to the given computational basis state.
    void set_basis_state(std::uint64_t index);

    /// Overwrite with |0> everywhere except the given range, whose qubits
    /// carry the supplied normalized amplitude vector.
    void set_range_state(const QubitRange& range, std::span<const cplx> amps);

    /// Overwrite with a product state: ancilla (and work register) |0...0>,
    /// R1 and R2 set to the given normalized n-qubit amplitude vectors.
    void set_register_product(std::span<const cplx> reg1_amps, std::span<const cplx> reg2_amps);

    double norm() const;

    /// Apply an s-qubit unitary to the listed qubits; qubits[0] is the least
    /// significant bit of the gate's index space. Validates unitarity to
    /// 1e-10 and index sanity. Contiguous ascending spans take a blocked
    /// kernel; anything else goes through a gather/scatter path.
    void apply_unitary(const Matrix& matrix, std::span<const int> qubits);
    void apply_unitary(const Matrix& matrix, std::initializer_list<int> qubits);

    /// matrix applied to targets on the control qubit's |1> branch only.
    void apply_controlled_unitary(int control, const Matrix& matrix, std::span<const int> targets);

    void apply_hadamard(int qubit);

    /// Hadamard on each listed qubit (order irrelevant).
    void apply_hadamard_layer(const QubitRange& qubits);

    void apply_phase(int qubit, double angle);
    void apply_controlled_phase(int control, int target, double angle);
    void swap_qubits(int a, int b);

    /// Qubit-wise exchange of two equal-length disjoint ranges.
    void swap_registers(const QubitRange& a, const QubitRange& b);

    /// Exchange of two ranges on the control qubit's |1> branch only
    /// (a register-wide Fredkin gate). The control must lie outside both.
    void conditional_swap(int control, const QubitRange& a, const QubitRange& b);

    /// |l> -> 2^{-k/2} sum_m exp(-2 pi i l m / 2^k) |m> on the given span.
    void apply_inverse_qft(const QubitRange& qubits);
    /// Adjoint of apply_inverse_qft (kernel exp(+2 pi i l m / 2^k)).
    void apply_qft(const QubitRange& qubits);

    /// Marginal outcome distribution of the ancilla register (length 2^k);
    /// sums to 1 for a normalized state.
    std::vector<double> ancilla_distribution() const;

    /// Sample an ancilla outcome, project onto it and renormalize.
    std::uint64_t measure_ancilla(RngStream& rng);

  private:
    void check_qubits(std::span<const int> qubits) const;
    void apply_qft_dispatch(const QubitRange& qubits, bool inverse);

    RegisterLayout layout_;
    std::vector<cplx> amps_;
    std::vector<cplx> scratch_; // reused by gather kernels; small
};

namespace kernels {

/// In-place C <- C * B over a column-major panel: state columns are the
/// 2^s values of a contiguous qubit span, rows the 2^q0 low bits below it.
/// B is the transposed gate matrix split into real/imag planes, row-major
/// [m][j]. rows and dim must be multiples of 8. Row panels whose inputs
/// are exactly zero are skipped.
void apply_span_block(cplx* data, std::size_t rows, std::size_t lda,
                      const double* b_re, const double* b_im, std::size_t dim);

/// True when the build has a vectorized apply_span_block.
bool span_kernel_available();

} // namespace kernels

} // namespace specbox
