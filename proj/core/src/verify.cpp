#include "specbox/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace specbox::verify {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double canonical_phase(double arg) {
    double phi = std::fmod(arg, kTwoPi);
    if (phi < 0.0) phi += kTwoPi;
    if (phi >= kTwoPi - 1e-10) phi = 0.0; // snap the wrap-around seam
    return phi;
}

double wrap_signed(double d) {
    d = std::fmod(d, kTwoPi);
    if (d > std::numbers::pi) d -= kTwoPi;
    if (d <= -std::numbers::pi) d += kTwoPi; // boundary maps to +pi
    return d;
}

EigenDecomposition unitary_eigensystem_impl(const Matrix& u) {
    const Eigen::Index dim = u.rows();
    Eigen::ComplexSchur<Matrix> schur(u, true);
    if (schur.info() != Eigen::Success)
        throw std::runtime_error("exact_eigenphases: Schur reduction failed");

    std::vector<int> order(dim);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> raw(dim);
    for (Eigen::Index i = 0; i < dim; ++i) raw[i] = canonical_phase(std::arg(schur.matrixT()(i, i)));
    std::sort(order.begin(), order.end(), [&](int a, int b) { return raw[a] < raw[b]; });

    EigenDecomposition eig;
    eig.phases.resize(dim);
    eig.vectors.resize(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        eig.phases[i] = raw[order[i]];
        eig.vectors.col(i) = schur.matrixU().col(order[i]);
    }

    double residual = 0.0;
    for (Eigen::Index i = 0; i < dim; ++i) {
        Vector r = u * eig.vectors.col(i) - std::polar(1.0, eig.phases[i]) * eig.vectors.col(i);
        residual = std::max(residual, r.cwiseAbs().maxCoeff());
    }
    if (residual > 1e-8)
        throw std::runtime_error("exact_eigenphases: decomposition residual " +
                                 std::to_string(residual) + " exceeds 1e-8");
    return eig;
}

} // namespace

EigenDecomposition exact_eigenphases(const BlackBoxUnitary& box) {
    return unitary_eigensystem_impl(detail::BoxAccess::matrix(box));
}

EigenDecomposition unitary_eigensystem(const Matrix& u) { return unitary_eigensystem_impl(u); }

std::vector<double> prep_eigenweights(const qpe::RegisterPrep& prep, const EigenDecomposition& eig) {
    const std::size_t dim = eig.phases.size();
    std::vector<double> w(dim, 0.0);
    if (std::holds_alternative<qpe::MixedPrep>(prep)) {
        std::fill(w.begin(), w.end(), 1.0 / double(dim));
        return w;
    }
    if (const auto* e = std::get_if<qpe::EigenstatePrep>(&prep)) {
        if (e->rank < 0 || std::size_t(e->rank) >= dim)
            throw std::out_of_range("prep_eigenweights: eigenstate rank out of range");
        w[e->rank] = 1.0;
        return w;
    }
    Vector psi(dim);
    if (const auto* b = std::get_if<qpe::BasisPrep>(&prep)) {
        if (b->index >= dim) throw std::out_of_range("prep_eigenweights: basis index out of range");
        psi.setZero();
        psi(b->index) = 1.0;
    } else {
        const auto& amps = std::get<qpe::ExplicitPrep>(prep).amplitudes;
        if (amps.size() != dim)
            throw std::invalid_argument("prep_eigenweights: amplitude count mismatch");
        for (std::size_t i = 0; i < dim; ++i) psi(i) = amps[i];
    }
    for (std::size_t a = 0; a < dim; ++a) w[a] = std::norm(eig.vectors.col(a).dot(psi));
    return w;
}

spectra::SpectralDensity exact_difference_distribution(const BlackBoxUnitary& box,
                                                       const qpe::InitialPreparation& prep) {
    EigenDecomposition eig = exact_eigenphases(box);
    std::vector<double> w1 = prep_eigenweights(prep.reg1, eig);
    std::vector<double> w2 = prep_eigenweights(prep.reg2, eig);

    const std::size_t dim = eig.phases.size();
    std::vector<std::pair<double, double>> terms;
    terms.reserve(dim * dim);
    for (std::size_t a = 0; a < dim; ++a)
        for (std::size_t b = 0; b < dim; ++b) {
            double weight = w1[a] * w2[b];
            if (weight == 0.0) continue;
            terms.emplace_back(wrap_signed(eig.phases[a] - eig.phases[b]), weight);
        }
    std::sort(terms.begin(), terms.end());

    spectra::SpectralDensity density;
    for (const auto& [d, weight] : terms) {
        if (!density.support.empty() && d - density.support.back() < 1e-12) {
            density.weights.back() += weight;
        } else {
            density.support.push_back(d);
            density.weights.push_back(weight);
        }
    }
    return density;
}

EquivalenceResult circuit_equivalence(const Matrix& a, const Matrix& b, EquivalenceMode mode,
                                      int ancilla_bits, double tolerance) {
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
        throw std::invalid_argument("circuit_equivalence: dimension mismatch");
    if (a.rows() > (Eigen::Index(1) << 12))
        throw std::invalid_argument("circuit_equivalence: dimension exceeds 2^12");

    auto aligned_residual = [](const Matrix& x, const Matrix& y) {
        Eigen::Index r = 0, c = 0;
        y.cwiseAbs().maxCoeff(&r, &c);
        cplx phase = x(r, c) / y(r, c);
        phase /= std::abs(phase);
        return (x - phase * y).cwiseAbs().maxCoeff();
    };

    EquivalenceResult result;
    if (mode == EquivalenceMode::global_phase) {
        result.max_residual = aligned_residual(a, b);
        result.equivalent = result.max_residual < tolerance;
        return result;
    }

    if (ancilla_bits < 1) throw std::invalid_argument("circuit_equivalence: need ancilla bits");
    const Eigen::Index branches = Eigen::Index(1) << ancilla_bits;
    const Eigen::Index block = a.rows() >> ancilla_bits;
    if (block << ancilla_bits != a.rows())
        throw std::invalid_argument("circuit_equivalence: ancilla bits exceed matrix size");

    // ancilla bits are the low index bits: entry (l + r*2^k, l' + c*2^k)
    double residual = 0.0;
    for (Eigen::Index l = 0; l < branches; ++l) {
        Matrix ba(block, block), bb(block, block);
        for (Eigen::Index r = 0; r < block; ++r)
            for (Eigen::Index c = 0; c < block; ++c) {
                ba(r, c) = a(l + (r << ancilla_bits), l + (c << ancilla_bits));
                bb(r, c) = b(l + (r << ancilla_bits), l + (c << ancilla_bits));
            }
        residual = std::max(residual, aligned_residual(ba, bb));
    }
    // any coupling between distinct ancilla values counts against both
    const Eigen::Index mask = branches - 1;
    for (Eigen::Index r = 0; r < a.rows(); ++r)
        for (Eigen::Index c = 0; c < a.cols(); ++c)
            if ((r & mask) != (c & mask))
                residual = std::max({residual, std::abs(a(r, c)), std::abs(b(r, c))});

    result.max_residual = residual;
    result.equivalent = residual < tolerance;
    return result;
}

Matrix assemble_ops_unitary(const BlackBoxUnitary& box, const RegisterLayout& layout,
                            std::span<const qpe::ProtocolOp> ops) {
    if (layout.total_qubits() > 12)
        throw std::invalid_argument("assemble_ops_unitary: more than 12 qubits");
    const std::uint64_t dim = layout.dimension();
    Matrix u(dim, dim);
    StateVector state(layout);
    for (std::uint64_t c = 0; c < dim; ++c) {
        state.set_basis_state(c);
        qpe::apply_ops(state, box, ops);
        for (std::uint64_t r = 0; r < dim; ++r) u(r, c) = state.amplitude(r);
    }
    return u;
}

Matrix assemble_protocol_unitary(const BlackBoxUnitary& box, const qpe::ProtocolConfig& config) {
    return assemble_ops_unitary(box, config.layout, qpe::build_protocol_ops(box, config));
}

namespace {

// In-place dense action of "U on the range's bit field" on every column.
void apply_on_range_dense(Matrix& m, const Matrix& u, const QubitRange& range,
                          std::uint64_t branch_mask, std::uint64_t branch_value) {
    const std::uint64_t dim = m.rows();
    const std::uint64_t sub = std::uint64_t(1) << range.count;
    const std::uint64_t fmask = (sub - 1) << range.first;
    Vector fiber(sub), image(sub);
    for (std::uint64_t col = 0; col < dim; ++col) {
        for (std::uint64_t rest = 0; rest < dim; ++rest) {
            if ((rest & fmask) != 0) continue;
            if ((rest & branch_mask) != branch_value) continue;
            for (std::uint64_t x = 0; x < sub; ++x) fiber(x) = m(rest | (x << range.first), col);
            image.noalias() = u * fiber;
            for (std::uint64_t x = 0; x < sub; ++x) m(rest | (x << range.first), col) = image(x);
        }
    }
}

} // namespace

Matrix reference_conditional_unitary(const BlackBoxUnitary& box, const qpe::ProtocolConfig& config) {
    const RegisterLayout& layout = config.layout;
    if (layout.total_qubits() > 12)
        throw std::invalid_argument("reference_conditional_unitary: more than 12 qubits");
    if (box.qubit_count() != layout.register_qubits())
        throw std::invalid_argument("reference_conditional_unitary: box/layout mismatch");

    const Matrix& u = detail::BoxAccess::matrix(box);
    const std::uint64_t dim = layout.dimension();
    Matrix result = Matrix::Identity(dim, dim);
    Matrix upow = u;
    for (int j = 0; j < layout.ancilla_qubits(); ++j) {
        if (j > 0) upow = upow * upow; // U^{2^j}
        const std::uint64_t bit = std::uint64_t(1) << j;
        // bit j set: U^{2^j} on R1; clear: U^{2^j} on R2
        apply_on_range_dense(result, upow, layout.reg1(), bit, bit);
        apply_on_range_dense(result, upow, layout.reg2(), bit, 0);
    }
    return result;
}

Matrix kron(const Matrix& high, const Matrix& low) {
    Matrix out(high.rows() * low.rows(), high.cols() * low.cols());
    for (Eigen::Index hr = 0; hr < high.rows(); ++hr)
        for (Eigen::Index hc = 0; hc < high.cols(); ++hc)
            out.block(hr * low.rows(), hc * low.cols(), low.rows(), low.cols()) = high(hr, hc) * low;
    return out;
}

std::vector<double> whitebox_cross_distribution(const BlackBoxUnitary& box,
                                                const qpe::InitialPreparation& prep, int k) {
    const Matrix& u = detail::BoxAccess::matrix(box);
    Matrix pair_unitary = kron(u.adjoint(), u); // U on the low slot, U^dag on the high slot

    auto terms1 = qpe::prep_ensemble(prep.reg1, box);
    auto terms2 = qpe::prep_ensemble(prep.reg2, box);
    const std::uint64_t dim_n = box.dimension();

    std::vector<double> dist(std::uint64_t(1) << k, 0.0);
    for (const auto& [w1, psi1] : terms1)
        for (const auto& [w2, psi2] : terms2) {
            qpe::ExplicitPrep product;
            product.amplitudes.resize(dim_n * dim_n);
            for (std::uint64_t x2 = 0; x2 < dim_n; ++x2)
                for (std::uint64_t x1 = 0; x1 < dim_n; ++x1)
                    product.amplitudes[(x2 << box.qubit_count()) | x1] = psi1[x1] * psi2[x2];
            std::vector<double> d = qpe::standard_qpe(pair_unitary, product, k);
            for (std::size_t m = 0; m < dist.size(); ++m) dist[m] += w1 * w2 * d[m];
        }
    return dist;
}

} // namespace specbox::verify
