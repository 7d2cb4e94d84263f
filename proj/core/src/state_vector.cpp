#include "specbox/state_vector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace specbox {

namespace {

constexpr double kInvSqrt2 = std::numbers::sqrt2 / 2.0;

bool is_contiguous_ascending(std::span<const int> qubits) {
    for (std::size_t i = 1; i < qubits.size(); ++i)
        if (qubits[i] != qubits[i - 1] + 1) return false;
    return true;
}

void check_unitary(const Matrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("apply_unitary: matrix must be square");
    double residual = (m.adjoint() * m - Matrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
    if (residual > kUnitaryTol)
        throw std::invalid_argument("apply_unitary: matrix is not unitary (residual " +
                                    std::to_string(residual) + ")");
}

std::uint64_t field(std::uint64_t index, const QubitRange& r) {
    return (index >> r.first) & ((std::uint64_t(1) << r.count) - 1);
}

} // namespace

StateVector::StateVector(const RegisterLayout& layout)
    : layout_(layout), amps_(layout.dimension(), cplx{0.0, 0.0}) {
    amps_[0] = 1.0;
}

void StateVector::reset() {
    std::fill(amps_.begin(), amps_.end(), cplx{0.0, 0.0});
    amps_[0] = 1.0;
}

void StateVector::set_basis_state(std::uint64_t index) {
    if (index >= amps_.size()) throw std::out_of_range("set_basis_state: index out of range");
    std::fill(amps_.begin(), amps_.end(), cplx{0.0, 0.0});
    amps_[index] = 1.0;
}

void StateVector::set_range_state(const QubitRange& range, std::span<const cplx> amps) {
    if (range.first < 0 || range.last() > num_qubits())
        throw std::out_of_range("set_range_state: range out of bounds");
    if (amps.size() != std::uint64_t(1) << range.count)
        throw std::invalid_argument("set_range_state: amplitude count must be 2^range");
    std::fill(amps_.begin(), amps_.end(), cplx{0.0, 0.0});
    for (std::uint64_t x = 0; x < amps.size(); ++x) amps_[x << range.first] = amps[x];
}

void StateVector::set_register_product(std::span<const cplx> reg1_amps,
                                       std::span<const cplx> reg2_amps) {
    const std::uint64_t dim_n = std::uint64_t(1) << layout_.register_qubits();
    if (reg1_amps.size() != dim_n || reg2_amps.size() != dim_n)
        throw std::invalid_argument("set_register_product: amplitude count must be 2^n");
    std::fill(amps_.begin(), amps_.end(), cplx{0.0, 0.0});
    const int k = layout_.ancilla_qubits();
    const int n = layout_.register_qubits();
    for (std::uint64_t x2 = 0; x2 < dim_n; ++x2) {
        cplx a2 = reg2_amps[x2];
        if (a2 == cplx{0.0, 0.0}) continue;
        std::uint64_t base = x2 << (k + n);
        for (std::uint64_t x1 = 0; x1 < dim_n; ++x1)
            amps_[base | (x1 << k)] = reg1_amps[x1] * a2;
    }
}

double StateVector::norm() const {
    double s = 0.0;
    for (const cplx& a : amps_) s += std::norm(a);
    return std::sqrt(s);
}

void StateVector::check_qubits(std::span<const int> qubits) const {
    for (std::size_t i = 0; i < qubits.size(); ++i) {
        if (qubits[i] < 0 || qubits[i] >= num_qubits())
            throw std::out_of_range("qubit index out of range");
        for (std::size_t j = i + 1; j < qubits.size(); ++j)
            if (qubits[i] == qubits[j]) throw std::invalid_argument("duplicate qubit index");
    }
}

void StateVector::apply_unitary(const Matrix& matrix, std::initializer_list<int> qubits) {
    apply_unitary(matrix, std::span<const int>(qubits.begin(), qubits.size()));
}

void StateVector::apply_unitary(const Matrix& matrix, std::span<const int> qubits) {
    const int s = static_cast<int>(qubits.size());
    if (s == 0) throw std::invalid_argument("apply_unitary: empty qubit list");
    check_qubits(qubits);
    const std::uint64_t dim = std::uint64_t(1) << s;
    if (static_cast<std::uint64_t>(matrix.rows()) != dim)
        throw std::invalid_argument("apply_unitary: matrix dimension does not match qubit count");
    check_unitary(matrix);

    // Contiguous ascending spans with at least 8 rows below them map onto
    // the blocked panel kernel; everything else goes through gather/scatter.
    const int q0 = qubits[0];
    if (is_contiguous_ascending(qubits) && dim >= 8 && dim <= 256 && q0 >= 3) {
        const std::size_t rows = std::size_t(1) << q0;
        std::vector<double> b_re(dim * dim), b_im(dim * dim);
        for (std::uint64_t m = 0; m < dim; ++m)
            for (std::uint64_t j = 0; j < dim; ++j) {
                b_re[m * dim + j] = matrix(j, m).real();
                b_im[m * dim + j] = matrix(j, m).imag();
            }
        const std::uint64_t block = rows * dim;
        for (std::uint64_t base = 0; base < amps_.size(); base += block)
            kernels::apply_span_block(amps_.data() + base, rows, rows, b_re.data(), b_im.data(),
                                      dim);
        return;
    }

    // gather/scatter over bit-interleaved stripes
    std::vector<int> sorted(qubits.begin(), qubits.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::uint64_t> offsets(dim, 0);
    for (std::uint64_t t = 0; t < dim; ++t)
        for (int i = 0; i < s; ++i)
            if ((t >> i) & 1) offsets[t] |= std::uint64_t(1) << qubits[i];

    if (scratch_.size() < 2 * dim) scratch_.resize(2 * dim);
    cplx* in = scratch_.data();
    cplx* out = scratch_.data() + dim;

    const std::uint64_t outer = amps_.size() >> s;
    for (std::uint64_t r = 0; r < outer; ++r) {
        std::uint64_t base = r;
        for (int p : sorted) {
            std::uint64_t low = base & ((std::uint64_t(1) << p) - 1);
            base = ((base >> p) << (p + 1)) | low;
        }
        for (std::uint64_t t = 0; t < dim; ++t) in[t] = amps_[base + offsets[t]];
        for (std::uint64_t tp = 0; tp < dim; ++tp) {
            cplx acc{0.0, 0.0};
            for (std::uint64_t t = 0; t < dim; ++t) acc += matrix(tp, t) * in[t];
            out[tp] = acc;
        }
        for (std::uint64_t t = 0; t < dim; ++t) amps_[base + offsets[t]] = out[t];
    }
}

void StateVector::apply_controlled_unitary(int control, const Matrix& matrix,
                                           std::span<const int> targets) {
    const std::uint64_t dim = std::uint64_t(1) << targets.size();
    if (static_cast<std::uint64_t>(matrix.rows()) != dim)
        throw std::invalid_argument("apply_controlled_unitary: dimension mismatch");
    Matrix gate = Matrix::Identity(2 * dim, 2 * dim);
    gate.block(dim, dim, dim, dim) = matrix;
    std::vector<int> qubits(targets.begin(), targets.end());
    qubits.push_back(control); // control is the gate's most significant bit
    apply_unitary(gate, qubits);
}

void StateVector::apply_hadamard(int qubit) {
    check_qubits(std::span<const int>(&qubit, 1));
    const std::uint64_t mask = std::uint64_t(1) << qubit;
    for (std::uint64_t base = 0; base < amps_.size(); base += 2 * mask) {
        for (std::uint64_t i = base; i < base + mask; ++i) {
            cplx a0 = amps_[i];
            cplx a1 = amps_[i | mask];
            amps_[i] = kInvSqrt2 * (a0 + a1);
            amps_[i | mask] = kInvSqrt2 * (a0 - a1);
        }
    }
}

void StateVector::apply_hadamard_layer(const QubitRange& qubits) {
    if (qubits.count < 1 || qubits.last() > num_qubits())
        throw std::out_of_range("apply_hadamard_layer: bad qubit range");
    if (qubits.first == 0) {
        // low span: fast Walsh-Hadamard within each contiguous block
        const std::uint64_t block = std::uint64_t(1) << qubits.count;
        for (std::uint64_t base = 0; base < amps_.size(); base += block) {
            for (std::uint64_t half = 1; half < block; half <<= 1) {
                for (std::uint64_t lo = 0; lo < block; lo += 2 * half) {
                    for (std::uint64_t i = base + lo; i < base + lo + half; ++i) {
                        cplx a0 = amps_[i];
                        cplx a1 = amps_[i + half];
                        amps_[i] = kInvSqrt2 * (a0 + a1);
                        amps_[i + half] = kInvSqrt2 * (a0 - a1);
                    }
                }
            }
        }
        return;
    }
    for (int q = qubits.first; q < qubits.last(); ++q) apply_hadamard(q);
}

void StateVector::apply_phase(int qubit, double angle) {
    check_qubits(std::span<const int>(&qubit, 1));
    const cplx factor = std::polar(1.0, angle);
    const std::uint64_t mask = std::uint64_t(1) << qubit;
    for (std::uint64_t base = 0; base < amps_.size(); base += 2 * mask)
        for (std::uint64_t i = base; i < base + mask; ++i) amps_[i | mask] *= factor;
}

void StateVector::apply_controlled_phase(int control, int target, double angle) {
    const int qs[2] = {control, target};
    check_qubits(qs);
    const cplx factor = std::polar(1.0, angle);
    const std::uint64_t both = (std::uint64_t(1) << control) | (std::uint64_t(1) << target);
    for (std::uint64_t i = 0; i < amps_.size(); ++i)
        if ((i & both) == both) amps_[i] *= factor;
}

void StateVector::swap_qubits(int a, int b) {
    const int qs[2] = {a, b};
    check_qubits(qs);
    const std::uint64_t ma = std::uint64_t(1) << a;
    const std::uint64_t mb = std::uint64_t(1) << b;
    for (std::uint64_t i = 0; i < amps_.size(); ++i)
        if ((i & ma) && !(i & mb)) std::swap(amps_[i], amps_[(i ^ ma) | mb]);
}

void StateVector::swap_registers(const QubitRange& a, const QubitRange& b) {
    if (a.count != b.count) throw std::invalid_argument("swap_registers: length mismatch");
    if (a.overlaps(b)) throw std::invalid_argument("swap_registers: ranges overlap");
    if (a.first < 0 || a.last() > num_qubits() || b.first < 0 || b.last() > num_qubits())
        throw std::out_of_range("swap_registers: range out of bounds");
    for (std::uint64_t i = 0; i < amps_.size(); ++i) {
        std::uint64_t va = field(i, a);
        std::uint64_t vb = field(i, b);
        if (va > vb) {
            std::uint64_t x = va ^ vb;
            std::swap(amps_[i], amps_[i ^ (x << a.first) ^ (x << b.first)]);
        }
    }
}

void StateVector::conditional_swap(int control, const QubitRange& a, const QubitRange& b) {
    if (a.count != b.count) throw std::invalid_argument("conditional_swap: length mismatch");
    if (a.overlaps(b)) throw std::invalid_argument("conditional_swap: ranges overlap");
    if (a.contains(control) || b.contains(control))
        throw std::invalid_argument("conditional_swap: control inside a swapped range");
    check_qubits(std::span<const int>(&control, 1));
    const std::uint64_t cmask = std::uint64_t(1) << control;
    for (std::uint64_t i = 0; i < amps_.size(); ++i) {
        if (!(i & cmask)) continue;
        std::uint64_t va = field(i, a);
        std::uint64_t vb = field(i, b);
        if (va > vb) {
            std::uint64_t x = va ^ vb;
            std::swap(amps_[i], amps_[i ^ (x << a.first) ^ (x << b.first)]);
        }
    }
}

namespace {

// QFT circuit on a local contiguous block (the span starts at qubit 0, so
// each block of 2^k amplitudes transforms independently in cache).
void block_qft(cplx* block, int k, bool inverse, const std::vector<cplx>& phase_table) {
    const std::uint64_t dim = std::uint64_t(1) << k;
    auto hadamard = [&](int q) {
        const std::uint64_t mask = std::uint64_t(1) << q;
        for (std::uint64_t base = 0; base < dim; base += 2 * mask)
            for (std::uint64_t i = base; i < base + mask; ++i) {
                cplx a0 = block[i];
                cplx a1 = block[i | mask];
                block[i] = kInvSqrt2 * (a0 + a1);
                block[i | mask] = kInvSqrt2 * (a0 - a1);
            }
    };
    auto cphase = [&](int r, int p, int table_index) {
        const cplx f = phase_table[table_index];
        const std::uint64_t both = (std::uint64_t(1) << r) | (std::uint64_t(1) << p);
        for (std::uint64_t i = 0; i < dim; ++i)
            if ((i & both) == both) block[i] *= f;
    };
    auto reverse_bits = [&] {
        for (int q = 0; q < k / 2; ++q) {
            const std::uint64_t ma = std::uint64_t(1) << q;
            const std::uint64_t mb = std::uint64_t(1) << (k - 1 - q);
            for (std::uint64_t i = 0; i < dim; ++i)
                if ((i & ma) && !(i & mb)) std::swap(block[i], block[(i ^ ma) | mb]);
        }
    };

    if (inverse) {
        reverse_bits();
        for (int p = 0; p < k; ++p) {
            for (int r = 0; r < p; ++r) cphase(r, p, p - r);
            hadamard(p);
        }
    } else {
        for (int p = k - 1; p >= 0; --p) {
            hadamard(p);
            for (int r = p - 1; r >= 0; --r) cphase(r, p, p - r);
        }
        reverse_bits();
    }
}

} // namespace

void StateVector::apply_qft_dispatch(const QubitRange& qubits, bool inverse) {
    if (qubits.count < 1 || qubits.first < 0 || qubits.last() > num_qubits())
        throw std::out_of_range("qft: bad qubit range");
    const int k = qubits.count;

    // phase_table[d] = exp(+-i pi / 2^d); inverse uses the conjugate kernel
    std::vector<cplx> phase_table(k + 1);
    for (int d = 0; d <= k; ++d)
        phase_table[d] = std::polar(1.0, (inverse ? -1.0 : 1.0) * std::numbers::pi / double(std::uint64_t(1) << d));

    if (qubits.first == 0) {
        const std::uint64_t block = std::uint64_t(1) << k;
        for (std::uint64_t base = 0; base < amps_.size(); base += block)
            block_qft(amps_.data() + base, k, inverse, phase_table);
        return;
    }

    // general span: same circuit through the state-wide gates
    auto q = [&](int i) { return qubits.first + i; };
    if (inverse) {
        for (int i = 0; i < k / 2; ++i) swap_qubits(q(i), q(k - 1 - i));
        for (int p = 0; p < k; ++p) {
            for (int r = 0; r < p; ++r)
                apply_controlled_phase(q(r), q(p), -std::numbers::pi / double(std::uint64_t(1) << (p - r)));
            apply_hadamard(q(p));
        }
    } else {
        for (int p = k - 1; p >= 0; --p) {
            apply_hadamard(q(p));
            for (int r = p - 1; r >= 0; --r)
                apply_controlled_phase(q(r), q(p), std::numbers::pi / double(std::uint64_t(1) << (p - r)));
        }
        for (int i = 0; i < k / 2; ++i) swap_qubits(q(i), q(k - 1 - i));
    }
}

void StateVector::apply_inverse_qft(const QubitRange& qubits) { apply_qft_dispatch(qubits, true); }
void StateVector::apply_qft(const QubitRange& qubits) { apply_qft_dispatch(qubits, false); }

std::vector<double> StateVector::ancilla_distribution() const {
    const int k = layout_.ancilla_qubits();
    const std::uint64_t mask = (std::uint64_t(1) << k) - 1;
    std::vector<double> probs(std::uint64_t(1) << k, 0.0);
    for (std::uint64_t i = 0; i < amps_.size(); ++i) probs[i & mask] += std::norm(amps_[i]);
    return probs;
}

std::uint64_t StateVector::measure_ancilla(RngStream& rng) {
    std::vector<double> probs = ancilla_distribution();
    const std::uint64_t m = rng.sample_discrete(probs);
    if (probs[m] < 1e-12)
        throw std::runtime_error("measure_ancilla: degenerate norm after projection");
    const std::uint64_t mask = (std::uint64_t(1) << layout_.ancilla_qubits()) - 1;
    const double scale = 1.0 / std::sqrt(probs[m]);
    for (std::uint64_t i = 0; i < amps_.size(); ++i) {
        if ((i & mask) == m)
            amps_[i] *= scale;
        else
            amps_[i] = cplx{0.0, 0.0};
    }
    return m;
}

} // namespace specbox
