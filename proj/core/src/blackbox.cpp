#include "specbox/blackbox.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace specbox {

namespace {

void require_unitary(const Matrix& u, const char* who) {
    if (u.rows() != u.cols() || u.rows() < 2)
        throw std::invalid_argument(std::string(who) + ": matrix must be square, dimension >= 2");
    if ((u.rows() & (u.rows() - 1)) != 0)
        throw std::invalid_argument(std::string(who) + ": dimension must be a power of two");
    double residual = (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
    if (residual > kUnitaryTol)
        throw std::invalid_argument(std::string(who) + ": matrix is not unitary (residual " +
                                    std::to_string(residual) + ")");
}

int log2_dim(Eigen::Index dim) {
    int n = 0;
    while ((Eigen::Index(1) << n) < dim) ++n;
    return n;
}

constexpr int kMaxDenseQubits = 6; // constructors and oracles diagonalize densely

} // namespace

BlackBoxUnitary::BlackBoxUnitary(Matrix matrix) : matrix_(std::move(matrix)) {
    require_unitary(matrix_, "BlackBoxUnitary");
    n_ = log2_dim(matrix_.rows());
}

const Matrix& BlackBoxUnitary::power(std::uint64_t p) const {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = power_cache_.find(p);
    if (it != power_cache_.end()) return it->second;

    // repeated squaring; the squaring chain itself is cached under 2^i keys
    Matrix result = Matrix::Identity(matrix_.rows(), matrix_.cols());
    std::uint64_t bit = 1;
    Matrix square = matrix_;
    for (std::uint64_t rem = p; rem != 0; rem >>= 1, bit <<= 1) {
        auto chain = power_cache_.find(bit);
        if (chain == power_cache_.end())
            chain = power_cache_.emplace(bit, bit == 1 ? matrix_ : square * square).first;
        square = chain->second;
        if (rem & 1) result = square * result;
    }
    return power_cache_.emplace(p, std::move(result)).first->second;
}

void BlackBoxUnitary::apply_power(StateVector& state, std::uint64_t p) const {
    const QubitRange span = state.layout().box_span();
    if (span.count != n_)
        throw std::invalid_argument("apply_power: box dimension does not match the layout's box span");
    queries_.fetch_add(1, std::memory_order_relaxed);
    if (p == 0) return; // U^0 = identity; still counted as a query
    if (p == 1) {
        std::vector<int> qubits(span.count);
        for (int i = 0; i < span.count; ++i) qubits[i] = span.first + i;
        state.apply_unitary(matrix_, qubits);
        return;
    }
    const Matrix& m = power(p);
    std::vector<int> qubits(span.count);
    for (int i = 0; i < span.count; ++i) qubits[i] = span.first + i;
    state.apply_unitary(m, qubits);
}

HermitianGenerator::HermitianGenerator(Matrix h) : matrix(std::move(h)) {
    if (matrix.rows() != matrix.cols())
        throw std::invalid_argument("HermitianGenerator: matrix must be square");
    double residual = (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
    if (residual > kUnitaryTol)
        throw std::invalid_argument("HermitianGenerator: matrix is not Hermitian (residual " +
                                    std::to_string(residual) + ")");
}

BlackBoxUnitary haar_random(int n, RngStream& rng) {
    if (n < 1 || n > kMaxDenseQubits)
        throw std::invalid_argument("haar_random: need 1 <= n <= 6 for dense construction");
    const Eigen::Index dim = Eigen::Index(1) << n;
    Matrix g(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c)
        for (Eigen::Index r = 0; r < dim; ++r) g(r, c) = cplx{rng.next_gaussian(), rng.next_gaussian()};

    // QR with the triangular factor's diagonal phases absorbed into Q makes
    // the distribution exactly Haar rather than merely orthonormal.
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < dim; ++i) {
        cplx d = r(i, i);
        q.col(i) *= d / std::abs(d);
    }
    return detail::BoxAccess::make(std::move(q));
}

BlackBoxUnitary from_spectrum(std::span<const double> phases, RngStream& rng) {
    const std::size_t dim = phases.size();
    if (dim < 2 || (dim & (dim - 1)) != 0)
        throw std::invalid_argument("from_spectrum: phase list length must be 2^n");
    const int n = log2_dim(Eigen::Index(dim));
    BlackBoxUnitary basis = haar_random(n, rng);
    const Matrix& v = detail::BoxAccess::matrix(basis);
    Vector d(dim);
    for (std::size_t i = 0; i < dim; ++i) d(i) = std::polar(1.0, phases[i]);
    Matrix u = v * d.asDiagonal() * v.adjoint();
    return detail::BoxAccess::make(std::move(u));
}

BlackBoxUnitary from_hamiltonian(const HermitianGenerator& gen, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("from_hamiltonian: t must be positive");
    if (gen.matrix.rows() > (Eigen::Index(1) << kMaxDenseQubits))
        throw std::invalid_argument("from_hamiltonian: dimension exceeds dense cap");
    Eigen::SelfAdjointEigenSolver<Matrix> es(gen.matrix);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("from_hamiltonian: eigendecomposition failed");
    const Eigen::Index dim = gen.matrix.rows();
    Vector d(dim);
    for (Eigen::Index i = 0; i < dim; ++i) d(i) = std::polar(1.0, -es.eigenvalues()(i) * t);
    Matrix u = es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
    return detail::BoxAccess::make(std::move(u));
}

BlackBoxUnitary from_matrix(Matrix u) { return detail::BoxAccess::make(std::move(u)); }

} // namespace specbox
