#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "specbox/verify.hpp"

using namespace specbox;
namespace orc = oracles;

TEST_CASE("exact_eigenphases: fixed small cases") {
    SUBCASE("diag(1, i)") {
        Matrix u(2, 2);
        u << 1, 0, 0, cplx{0, 1};
        auto eig = verify::unitary_eigensystem(u);
        CHECK(std::abs(eig.phases[0] - 0.0) < 1e-12);
        CHECK(std::abs(eig.phases[1] - std::numbers::pi / 2) < 1e-12);
    }
    SUBCASE("Pauli-X") {
        Matrix x(2, 2);
        x << 0, 1, 1, 0;
        auto eig = verify::unitary_eigensystem(x);
        CHECK(std::abs(eig.phases[0] - 0.0) < 1e-9);
        CHECK(std::abs(eig.phases[1] - std::numbers::pi) < 1e-9);
        // eigenvectors are (|0> +- |1>)/sqrt(2) up to phase
        for (int a = 0; a < 2; ++a) {
            double expected_sign = a == 0 ? 1.0 : -1.0;
            cplx ratio = eig.vectors(1, a) / eig.vectors(0, a);
            CHECK(std::abs(ratio - expected_sign) < 1e-9);
            CHECK(std::abs(std::abs(eig.vectors(0, a)) - 1.0 / std::numbers::sqrt2) < 1e-9);
        }
    }
}

TEST_CASE("exact_eigenphases: Haar reconstruction and orthonormality") {
    RngStream rng(21);
    auto box = haar_random(2, rng);
    auto eig = verify::exact_eigenphases(box);

    Matrix d = Matrix::Zero(4, 4);
    for (int i = 0; i < 4; ++i) d(i, i) = std::polar(1.0, eig.phases[i]);
    Matrix rebuilt = eig.vectors * d * eig.vectors.adjoint();
    CHECK((rebuilt - detail::BoxAccess::matrix(box)).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((eig.vectors.adjoint() * eig.vectors - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() <
          1e-9);
}

TEST_CASE("round trip: from_spectrum phases recovered on random grids") {
    RngStream root(22);
    for (int trial = 0; trial < 5; ++trial) {
        RngStream rng = root.derive(trial);
        std::vector<double> phases;
        for (int i = 0; i < 8; ++i)
            phases.push_back(orc::kTwoPi * double(rng.next_below(32)) / 32.0);
        auto box = from_spectrum(phases, rng);
        auto got = verify::exact_eigenphases(box).phases;
        std::sort(phases.begin(), phases.end());
        REQUIRE(got.size() == phases.size());
        for (std::size_t i = 0; i < phases.size(); ++i) CHECK(std::abs(got[i] - phases[i]) < 1e-9);
    }
}

TEST_CASE("exact_difference_distribution: fixed cases") {
    RngStream rng(23);
    SUBCASE("identity box: all mass at zero") {
        std::vector<double> phases(2, 0.0);
        auto box = from_spectrum(phases, rng);
        auto d = verify::exact_difference_distribution(box, qpe::mixed_preparation());
        REQUIRE(d.size() == 1);
        CHECK(std::abs(d.support[0]) < 1e-9);
        CHECK(d.weights[0] == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("phases {0, pi/2}, maximally mixed") {
        std::vector<double> phases = {0.0, std::numbers::pi / 2};
        auto box = from_spectrum(phases, rng);
        auto d = verify::exact_difference_distribution(box, qpe::mixed_preparation());
        REQUIRE(d.size() == 3);
        CHECK(std::abs(d.support[0] + std::numbers::pi / 2) < 1e-9);
        CHECK(std::abs(d.support[1] - 0.0) < 1e-9);
        CHECK(std::abs(d.support[2] - std::numbers::pi / 2) < 1e-9);
        CHECK(d.weights[0] == doctest::Approx(0.25).epsilon(1e-10));
        CHECK(d.weights[1] == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(d.weights[2] == doctest::Approx(0.25).epsilon(1e-10));
    }
    SUBCASE("same eigenstate on both registers: mass 1 at zero") {
        std::vector<double> phases = {0.3, 2.4};
        auto box = from_spectrum(phases, rng);
        qpe::InitialPreparation prep{qpe::EigenstatePrep{1}, qpe::EigenstatePrep{1}};
        auto d = verify::exact_difference_distribution(box, prep);
        REQUIRE(d.size() == 1);
        CHECK(d.support[0] == 0.0);
        CHECK(d.weights[0] == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("exact_difference_distribution: mass one and symmetry for equal preps") {
    RngStream rng(24);
    auto box = haar_random(3, rng);
    std::mt19937_64 gen(25);
    Eigen::VectorXcd psi = orc::random_state(8, gen);
    qpe::ExplicitPrep ep;
    for (int i = 0; i < 8; ++i) ep.amplitudes.push_back(psi(i));
    qpe::InitialPreparation prep{ep, ep};

    auto d = verify::exact_difference_distribution(box, prep);
    double total = 0.0;
    for (double w : d.weights) total += w;
    CHECK(std::abs(total - 1.0) < 1e-10);

    // symmetric under a <-> b: weight at +delta equals weight at -delta
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (std::abs(d.support[i]) < 1e-12 || std::abs(d.support[i] - std::numbers::pi) < 1e-12)
            continue;
        bool found = false;
        for (std::size_t j = 0; j < d.size(); ++j) {
            if (std::abs(d.support[j] + d.support[i]) < 1e-9) {
                CHECK(d.weights[i] == doctest::Approx(d.weights[j]).epsilon(1e-9));
                found = true;
            }
        }
        CHECK(found);
    }
}

TEST_CASE("circuit_equivalence: global phase mode") {
    std::mt19937_64 gen(26);
    Matrix a = orc::random_unitary(8, gen);

    auto same = verify::circuit_equivalence(a, a, verify::EquivalenceMode::global_phase);
    CHECK(same.equivalent);
    CHECK(same.max_residual < 1e-12);

    Matrix b = std::polar(1.0, std::numbers::pi / 7) * a;
    auto phased = verify::circuit_equivalence(a, b, verify::EquivalenceMode::global_phase);
    CHECK(phased.equivalent);
    CHECK(phased.max_residual < 1e-12);

    // symmetry of the relation
    auto reversed = verify::circuit_equivalence(b, a, verify::EquivalenceMode::global_phase);
    CHECK(reversed.equivalent);

    Matrix c = orc::random_unitary(8, gen);
    auto different = verify::circuit_equivalence(a, c, verify::EquivalenceMode::global_phase);
    CHECK_FALSE(different.equivalent);

    Matrix wrong_size = orc::random_unitary(4, gen);
    CHECK_THROWS_AS(
        verify::circuit_equivalence(a, wrong_size, verify::EquivalenceMode::global_phase),
        std::invalid_argument);
}

TEST_CASE("circuit_equivalence: branchwise detects per-branch phases and coupling") {
    std::mt19937_64 gen(27);
    // two ancilla bits, one data qubit: block-diagonal over the low 2 bits
    Matrix a = Matrix::Zero(8, 8);
    std::vector<Matrix> blocks;
    for (int l = 0; l < 4; ++l) blocks.push_back(orc::random_unitary(2, gen));
    for (int l = 0; l < 4; ++l)
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) a(l + 4 * r, l + 4 * c) = blocks[l](r, c);

    Matrix b = a;
    for (int l = 0; l < 4; ++l) {
        cplx phase = std::polar(1.0, 0.3 + 0.7 * l);
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) b(l + 4 * r, l + 4 * c) *= phase;
    }
    auto res = verify::circuit_equivalence(a, b, verify::EquivalenceMode::branchwise, 2);
    CHECK(res.equivalent);
    CHECK(res.max_residual < 1e-12);

    // but not equivalent up to a single global phase
    auto global = verify::circuit_equivalence(a, b, verify::EquivalenceMode::global_phase);
    CHECK_FALSE(global.equivalent);

    // coupling between branches is charged to the residual
    Matrix coupled = b;
    coupled(0, 1) = 0.5;
    auto bad = verify::circuit_equivalence(a, coupled, verify::EquivalenceMode::branchwise, 2);
    CHECK_FALSE(bad.equivalent);
    CHECK(bad.max_residual >= 0.5);
}

TEST_CASE("assemble_protocol_unitary: identity box gives identity blocks") {
    RngStream rng(28);
    std::vector<double> zero_phases(2, 0.0);
    auto box = from_spectrum(zero_phases, rng);
    qpe::ProtocolConfig config(1, 1);
    Matrix u = verify::assemble_protocol_unitary(box, config);
    CHECK((u - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("assemble_protocol_unitary: unitarity and compressed embedding") {
    RngStream rng(29);
    auto box = haar_random(1, rng);
    qpe::ProtocolConfig full(2, 1, LayoutMode::full_swap);
    qpe::ProtocolConfig compressed(2, 1, LayoutMode::compressed);

    Matrix uf = verify::assemble_protocol_unitary(box, full);
    CHECK((uf.adjoint() * uf - Matrix::Identity(uf.rows(), uf.cols())).cwiseAbs().maxCoeff() <
          1e-9);

    // the work register rides along untouched: full = I_work (x) compressed
    Matrix uc = verify::assemble_protocol_unitary(box, compressed);
    Matrix embedded = verify::kron(Matrix::Identity(2, 2), uc);
    CHECK((uf - embedded).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("protocol unitary matches the explicit conditional product branchwise") {
    RngStream rng(30);
    for (int n : {1, 2}) {
        RngStream sub = rng.derive(n);
        auto box = haar_random(n, sub);
        qpe::ProtocolConfig config(2, n);
        Matrix protocol = verify::assemble_protocol_unitary(box, config);
        Matrix reference = verify::reference_conditional_unitary(box, config);
        auto res = verify::circuit_equivalence(protocol, reference,
                                               verify::EquivalenceMode::branchwise, 2);
        CHECK(res.equivalent);
        CHECK(res.max_residual < 1e-9);
    }
}

TEST_CASE("kron follows the little-endian convention") {
    Matrix x(2, 2), id = Matrix::Identity(2, 2);
    x << 0, 1, 1, 0;
    int high_qubit = 1;
    Matrix via_kron = verify::kron(x, id); // X on the high qubit
    Matrix via_embed = orc::embed_gate(2, x, {&high_qubit, 1});
    CHECK((via_kron - via_embed).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("size guards") {
    RngStream rng(31);
    auto box = haar_random(1, rng);
    CHECK_THROWS_AS(qpe::ProtocolConfig(24, 1), std::invalid_argument); // cap
    qpe::ProtocolConfig big(11, 1);                                     // 14 qubits
    CHECK_THROWS_AS(verify::assemble_protocol_unitary(box, big), std::invalid_argument);
}
