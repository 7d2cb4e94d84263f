#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "specbox/blackbox.hpp"
#include "specbox/verify.hpp"

using namespace specbox;
namespace orc = oracles;

namespace {

// tests are harness code: they may open the box to check constructor contracts
const Matrix& hidden(const BlackBoxUnitary& box) { return detail::BoxAccess::matrix(box); }

Eigen::VectorXcd to_eigen(const StateVector& s) {
    Eigen::VectorXcd v(s.size());
    for (std::uint64_t i = 0; i < s.size(); ++i) v(i) = s.amplitude(i);
    return v;
}

double canon(double phi) {
    phi = std::fmod(phi, orc::kTwoPi);
    if (phi < 0) phi += orc::kTwoPi;
    if (phi >= orc::kTwoPi - 1e-9) phi = 0.0;
    return phi;
}

} // namespace

// protocol code sees apply_power and the counters, never the matrix
template <typename T>
concept exposes_matrix = requires(const T& t) { t.matrix(); };
template <typename T>
concept exposes_apply = requires(const T& t, StateVector& s) { t.apply_power(s, std::uint64_t{1}); };
static_assert(!exposes_matrix<BlackBoxUnitary>);
static_assert(exposes_apply<BlackBoxUnitary>);

TEST_CASE("apply_power: p = 0 is the identity and still counts as a query") {
    RngStream rng(1);
    auto box = haar_random(1, rng);
    RegisterLayout layout(2, 1);
    StateVector s(layout);
    s.apply_hadamard_layer(layout.ancilla());
    Eigen::VectorXcd before = to_eigen(s);
    auto q0 = box.query_count();
    box.apply_power(s, 0);
    CHECK(box.query_count() == q0 + 1);
    CHECK((to_eigen(s) - before).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("apply_power: p = 2 equals two applications of p = 1") {
    RngStream rng(2);
    auto box = haar_random(2, rng);
    RegisterLayout layout(1, 2);
    std::mt19937_64 gen(3);
    Eigen::VectorXcd psi = orc::random_state(std::uint64_t(1) << layout.total_qubits(), gen);

    StateVector a(layout), b(layout);
    auto amps_a = a.amplitudes();
    auto amps_b = b.amplitudes();
    for (std::uint64_t i = 0; i < a.size(); ++i) amps_a[i] = amps_b[i] = psi(i);

    box.apply_power(a, 2);
    box.apply_power(b, 1);
    box.apply_power(b, 1);
    CHECK((to_eigen(a) - to_eigen(b)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(a.norm() - 1.0) < 1e-10);

    SUBCASE("p = 5 preserves the norm") {
        box.apply_power(a, 5);
        CHECK(std::abs(a.norm() - 1.0) < 1e-10);
    }
}

TEST_CASE("apply_power: additivity U^{p+q} = U^p U^q for p, q <= 8") {
    RngStream rng(4);
    auto box = haar_random(1, rng);
    RegisterLayout layout(1, 1, LayoutMode::compressed);
    std::mt19937_64 gen(5);
    Eigen::VectorXcd psi = orc::random_state(8, gen);
    for (std::uint64_t p : {1ULL, 3ULL, 4ULL}) {
        for (std::uint64_t q : {2ULL, 5ULL}) {
            StateVector a(layout), b(layout);
            auto amps_a = a.amplitudes();
            auto amps_b = b.amplitudes();
            for (std::uint64_t i = 0; i < 8; ++i) amps_a[i] = amps_b[i] = psi(i);
            box.apply_power(a, p + q);
            box.apply_power(b, q);
            box.apply_power(b, p);
            CHECK((to_eigen(a) - to_eigen(b)).cwiseAbs().maxCoeff() < 1e-9);
        }
    }
}

TEST_CASE("apply_power: dimension mismatch is rejected") {
    RngStream rng(6);
    auto box = haar_random(2, rng);
    StateVector s(RegisterLayout(2, 1));
    CHECK_THROWS_AS(box.apply_power(s, 1), std::invalid_argument);
}

TEST_CASE("haar_random: unitary to 1e-10 and seed-deterministic") {
    RngStream rng(7);
    auto box = haar_random(3, rng);
    const Matrix& u = hidden(box);
    CHECK((u.adjoint() * u - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-10);

    RngStream r1(8), r2(8);
    auto b1 = haar_random(2, r1);
    auto b2 = haar_random(2, r2);
    CHECK((hidden(b1) - hidden(b2)).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(haar_random(0, rng), std::invalid_argument);
    CHECK_THROWS_AS(haar_random(7, rng), std::invalid_argument);
}

TEST_CASE("haar_random: eigenphases roughly uniform over 200 draws") {
    RngStream root(1234);
    constexpr int kDraws = 200;
    constexpr int kBins = 8;
    std::vector<int> bins(kBins, 0);
    for (int d = 0; d < kDraws; ++d) {
        RngStream rng = root.derive(d);
        auto box = haar_random(2, rng);
        for (double phi : verify::exact_eigenphases(box).phases)
            bins[std::min<int>(kBins - 1, int(phi / orc::kTwoPi * kBins))] += 1;
    }
    const double n = kDraws * 4.0;
    const double expected = n / kBins;
    const double bound = 5.0 * orc::binomial_sigma(1.0 / kBins, n);
    for (int b = 0; b < kBins; ++b) CHECK(std::abs(bins[b] - expected) < bound);
}

TEST_CASE("from_spectrum: all-zero phases give the identity regardless of basis") {
    RngStream rng(9);
    std::vector<double> phases(4, 0.0);
    auto box = from_spectrum(phases, rng);
    CHECK((hidden(box) - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("from_spectrum: eigenphases recovered through the decomposition") {
    RngStream rng(10);
    SUBCASE("n = 1, {0, pi}") {
        std::vector<double> phases = {0.0, std::numbers::pi};
        auto box = from_spectrum(phases, rng);
        auto eig = verify::exact_eigenphases(box);
        CHECK(std::abs(eig.phases[0] - 0.0) < 1e-9);
        CHECK(std::abs(eig.phases[1] - std::numbers::pi) < 1e-9);
    }
    SUBCASE("n = 2 comb {0, pi/4, pi/2, 3pi/4}") {
        std::vector<double> phases = {0.0, std::numbers::pi / 4, std::numbers::pi / 2,
                                      3 * std::numbers::pi / 4};
        auto box = from_spectrum(phases, rng);
        auto eig = verify::exact_eigenphases(box);
        std::vector<double> got = eig.phases;
        std::sort(got.begin(), got.end());
        for (std::size_t i = 0; i < phases.size(); ++i) CHECK(std::abs(got[i] - phases[i]) < 1e-9);
    }
    SUBCASE("wrong length is rejected") {
        std::vector<double> phases = {0.0, 1.0, 2.0};
        CHECK_THROWS_AS(from_spectrum(phases, rng), std::invalid_argument);
    }
}

TEST_CASE("from_hamiltonian: diagonal and zero generators") {
    Matrix z(2, 2);
    z << 1, 0, 0, -1;
    auto box = from_hamiltonian(HermitianGenerator(z), std::numbers::pi / 2);
    Matrix expected(2, 2);
    expected << cplx{0, -1}, 0, 0, cplx{0, 1};
    CHECK((hidden(box) - expected).cwiseAbs().maxCoeff() < 1e-12);

    auto id_box = from_hamiltonian(HermitianGenerator(Matrix::Zero(2, 2)), 1.0);
    CHECK((hidden(id_box) - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS_AS(from_hamiltonian(HermitianGenerator(z), 0.0), std::invalid_argument);
}

TEST_CASE("from_hamiltonian: eigenphases match -lambda t mod 2 pi") {
    std::mt19937_64 gen(11);
    Matrix h = orc::random_hermitian(4, gen);
    const double t = 0.37;
    auto box = from_hamiltonian(HermitianGenerator(h), t);

    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    std::vector<double> expected;
    for (Eigen::Index i = 0; i < 4; ++i) expected.push_back(canon(-es.eigenvalues()(i) * t));
    std::sort(expected.begin(), expected.end());

    std::vector<double> got = verify::exact_eigenphases(box).phases;
    std::sort(got.begin(), got.end());
    for (int i = 0; i < 4; ++i) CHECK(std::abs(got[i] - expected[i]) < 1e-9);
}

TEST_CASE("non-Hermitian and non-unitary inputs are rejected") {
    Matrix bad(2, 2);
    bad << 0, 1, 0, 0;
    CHECK_THROWS_AS(HermitianGenerator{bad}, std::invalid_argument);
    CHECK_THROWS_AS(from_matrix(bad), std::invalid_argument);
}

TEST_CASE("query log counts every invocation") {
    RngStream rng(12);
    auto box = haar_random(1, rng);
    RegisterLayout layout(1, 1);
    StateVector s(layout);
    CHECK(box.query_count() == 0);
    for (int i = 1; i <= 5; ++i) {
        box.apply_power(s, std::uint64_t(1) << (i % 3));
        CHECK(box.query_count() == std::uint64_t(i));
    }
}
