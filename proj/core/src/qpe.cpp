#include "specbox/qpe.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "specbox/verify.hpp"

namespace specbox::qpe {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<cplx> basis_vector(std::uint64_t dim, std::uint64_t index) {
    if (index >= dim) throw std::out_of_range("preparation: basis index out of range");
    std::vector<cplx> v(dim, cplx{0.0, 0.0});
    v[index] = 1.0;
    return v;
}

void require_normalized(std::span<const cplx> amps) {
    double s = 0.0;
    for (const cplx& a : amps) s += std::norm(a);
    if (std::abs(s - 1.0) > kUnitaryTol)
        throw std::invalid_argument("preparation: explicit amplitudes are not normalized");
}

std::vector<cplx> eigenvector_of(const verify::EigenDecomposition& eig, int rank) {
    if (rank < 0 || rank >= eig.vectors.cols())
        throw std::out_of_range("preparation: eigenstate rank out of range");
    std::vector<cplx> v(eig.vectors.rows());
    for (Eigen::Index i = 0; i < eig.vectors.rows(); ++i) v[i] = eig.vectors(i, rank);
    return v;
}

} // namespace

std::vector<ProtocolOp> build_blackbox_step(const BlackBoxUnitary& box, int j,
                                            const ProtocolConfig& config) {
    const RegisterLayout& layout = config.layout;
    if (j < 0 || j >= layout.ancilla_qubits())
        throw std::out_of_range("build_blackbox_step: ancilla bit out of range");
    if (box.qubit_count() != layout.register_qubits())
        throw std::invalid_argument("build_blackbox_step: box does not match the layout");

    const std::uint64_t p = std::uint64_t(1) << j;
    const CondSwapOp fredkin{j, layout.reg1(), layout.reg2()};
    if (layout.mode() == LayoutMode::full_swap) {
        return {fredkin, RegSwapOp{layout.work(), layout.reg2()}, BoxPowerOp{p},
                RegSwapOp{layout.work(), layout.reg2()}, fredkin};
    }
    return {fredkin, BoxPowerOp{p}, fredkin};
}

std::vector<ProtocolOp> build_protocol_ops(const BlackBoxUnitary& box, const ProtocolConfig& config) {
    std::vector<ProtocolOp> ops;
    for (int j = 0; j < config.ancilla_qubits(); ++j) {
        auto step = build_blackbox_step(box, j, config);
        ops.insert(ops.end(), step.begin(), step.end());
    }
    return ops;
}

void apply_ops(StateVector& state, const BlackBoxUnitary& box, std::span<const ProtocolOp> ops) {
    for (const ProtocolOp& op : ops) {
        std::visit(
            [&](const auto& o) {
                using T = std::decay_t<decltype(o)>;
                if constexpr (std::is_same_v<T, CondSwapOp>)
                    state.conditional_swap(o.control, o.a, o.b);
                else if constexpr (std::is_same_v<T, RegSwapOp>)
                    state.swap_registers(o.a, o.b);
                else
                    box.apply_power(state, o.power);
            },
            op);
    }
}

double decode_phase(std::uint64_t m, int k) {
    const std::uint64_t bins = std::uint64_t(1) << k;
    if (m >= bins) throw std::out_of_range("decode_phase: outcome out of range");
    // boundary m = 2^{k-1} decodes to +pi
    if (m <= bins / 2) return kTwoPi * double(m) / double(bins);
    return kTwoPi * (double(m) - double(bins)) / double(bins);
}

std::vector<std::pair<double, std::vector<cplx>>> prep_ensemble(const RegisterPrep& prep,
                                                                const BlackBoxUnitary& box) {
    const std::uint64_t dim = box.dimension();
    if (std::holds_alternative<MixedPrep>(prep)) {
        std::vector<std::pair<double, std::vector<cplx>>> terms;
        terms.reserve(dim);
        for (std::uint64_t c = 0; c < dim; ++c)
            terms.emplace_back(1.0 / double(dim), basis_vector(dim, c));
        return terms;
    }
    return {{1.0, resolve_pure_prep(prep, box)}};
}

std::vector<cplx> resolve_pure_prep(const RegisterPrep& prep, const BlackBoxUnitary& box) {
    const std::uint64_t dim = box.dimension();
    if (const auto* b = std::get_if<BasisPrep>(&prep)) return basis_vector(dim, b->index);
    if (const auto* e = std::get_if<ExplicitPrep>(&prep)) {
        if (e->amplitudes.size() != dim)
            throw std::invalid_argument("preparation: explicit amplitude count mismatch");
        require_normalized(e->amplitudes);
        return e->amplitudes;
    }
    if (const auto* e = std::get_if<EigenstatePrep>(&prep)) {
        // harness privilege: eigenstate inputs come from the verify oracle
        return eigenvector_of(verify::exact_eigenphases(box), e->rank);
    }
    throw std::invalid_argument("preparation: maximally mixed state has no single pure form");
}

std::vector<double> blackbox_qpe_pure_distribution(const BlackBoxUnitary& box,
                                                   std::span<const cplx> reg1_amps,
                                                   std::span<const cplx> reg2_amps,
                                                   const ProtocolConfig& config) {
    StateVector state(config.layout);
    state.set_register_product(reg1_amps, reg2_amps);
    state.apply_hadamard_layer(config.layout.ancilla());
    auto ops = build_protocol_ops(box, config);
    apply_ops(state, box, ops);
    state.apply_inverse_qft(config.layout.ancilla());
    return state.ancilla_distribution();
}

namespace {

struct ShotPlan {
    // fixed amplitude vector, or empty when the register draws a fresh
    // uniform basis state every shot (maximally mixed)
    std::vector<cplx> fixed;
    bool mixed = false;
};

ShotPlan make_shot_plan(const RegisterPrep& prep, const BlackBoxUnitary& box) {
    if (std::holds_alternative<MixedPrep>(prep)) return {.fixed = {}, .mixed = true};
    return {.fixed = resolve_pure_prep(prep, box), .mixed = false};
}

void run_shot_range(const BlackBoxUnitary& box, const ProtocolConfig& config,
                    const ShotPlan& plan1, const ShotPlan& plan2,
                    std::span<const ProtocolOp> ops, std::uint64_t first, std::uint64_t count,
                    std::vector<std::uint64_t>& counts) {
    const RegisterLayout& layout = config.layout;
    const std::uint64_t dim = std::uint64_t(1) << layout.register_qubits();
    RngStream root(config.seed);
    StateVector state(layout);
    std::vector<cplx> basis1, basis2;
    for (std::uint64_t s = 0; s < count; ++s) {
        RngStream shot_rng = root.derive(config.shot_offset + first + s);
        std::span<const cplx> psi1 = plan1.fixed;
        std::span<const cplx> psi2 = plan2.fixed;
        if (plan1.mixed) {
            basis1 = basis_vector(dim, shot_rng.next_below(dim));
            psi1 = basis1;
        }
        if (plan2.mixed) {
            basis2 = basis_vector(dim, shot_rng.next_below(dim));
            psi2 = basis2;
        }
        state.set_register_product(psi1, psi2);
        state.apply_hadamard_layer(layout.ancilla());
        apply_ops(state, box, ops);
        state.apply_inverse_qft(layout.ancilla());
        counts[state.measure_ancilla(shot_rng)] += 1;
    }
}

} // namespace

std::vector<double> QpeResult::probabilities() const {
    if (exact_probabilities) return *exact_probabilities;
    if (shots == 0) throw std::domain_error("QpeResult: no shots recorded");
    std::vector<double> p(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) p[i] = double(counts[i]) / double(shots);
    return p;
}

QpeResult blackbox_qpe(const BlackBoxUnitary& box, const InitialPreparation& prep,
                       const ProtocolConfig& config) {
    const int k = config.ancilla_qubits();
    if (box.qubit_count() != config.register_qubits())
        throw std::invalid_argument("blackbox_qpe: box does not match the layout");

    QpeResult result;
    result.k = k;

    if (config.shots.is_exact()) {
        auto terms1 = prep_ensemble(prep.reg1, box);
        auto terms2 = prep_ensemble(prep.reg2, box);
        std::vector<double> dist(std::uint64_t(1) << k, 0.0);
        for (const auto& [w1, psi1] : terms1)
            for (const auto& [w2, psi2] : terms2) {
                std::vector<double> d = blackbox_qpe_pure_distribution(box, psi1, psi2, config);
                for (std::size_t m = 0; m < dist.size(); ++m) dist[m] += w1 * w2 * d[m];
            }
        result.exact_probabilities = std::move(dist);
        return result;
    }

    const std::uint64_t shots = *config.shots.count;
    result.shots = shots;
    result.counts.assign(std::uint64_t(1) << k, 0);

    ShotPlan plan1 = make_shot_plan(prep.reg1, box);
    ShotPlan plan2 = make_shot_plan(prep.reg2, box);
    auto ops = build_protocol_ops(box, config);

    const int threads = std::max(1, config.threads);
    if (threads == 1 || shots < 2) {
        run_shot_range(box, config, plan1, plan2, ops, 0, shots, result.counts);
        return result;
    }

    // shot-level parallelism: per-shot streams are index-derived, so the
    // partition does not affect the outcome sequence
    const int workers = int(std::min<std::uint64_t>(threads, shots));
    std::vector<std::vector<std::uint64_t>> local(workers,
                                                  std::vector<std::uint64_t>(result.counts.size(), 0));
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (shots + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const std::uint64_t first = w * chunk;
        const std::uint64_t count = std::min(chunk, shots - std::min<std::uint64_t>(shots, first));
        if (count == 0) break;
        pool.emplace_back([&, w, first, count] {
            run_shot_range(box, config, plan1, plan2, ops, first, count, local[w]);
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& l : local)
        for (std::size_t m = 0; m < result.counts.size(); ++m) result.counts[m] += l[m];
    return result;
}

std::vector<double> standard_qpe(const Matrix& u, const RegisterPrep& target_prep, int k) {
    if (k < 1) throw std::invalid_argument("standard_qpe: need k >= 1");
    const Eigen::Index dim = u.rows();
    if (dim != u.cols() || dim < 2 || (dim & (dim - 1)) != 0)
        throw std::invalid_argument("standard_qpe: unitary dimension must be a power of two");
    int s = 0;
    while ((Eigen::Index(1) << s) < dim) ++s;

    RegisterLayout layout = RegisterLayout::plain(k, s);
    std::vector<int> targets(s);
    for (int i = 0; i < s; ++i) targets[i] = k + i;

    // weighted pure terms; maximally mixed enumerates the computational basis
    std::vector<std::pair<double, std::vector<cplx>>> terms;
    if (std::holds_alternative<MixedPrep>(target_prep)) {
        for (Eigen::Index c = 0; c < dim; ++c)
            terms.emplace_back(1.0 / double(dim), basis_vector(dim, c));
    } else if (const auto* e = std::get_if<EigenstatePrep>(&target_prep)) {
        terms.emplace_back(1.0, eigenvector_of(verify::unitary_eigensystem(u), e->rank));
    } else if (const auto* b = std::get_if<BasisPrep>(&target_prep)) {
        terms.emplace_back(1.0, basis_vector(dim, b->index));
    } else {
        const auto& amps = std::get<ExplicitPrep>(target_prep).amplitudes;
        if (Eigen::Index(amps.size()) != dim)
            throw std::invalid_argument("standard_qpe: explicit amplitude count mismatch");
        require_normalized(amps);
        terms.emplace_back(1.0, amps);
    }

    // powers by repeated squaring, shared across terms
    std::vector<Matrix> powers(k);
    powers[0] = u;
    for (int j = 1; j < k; ++j) powers[j] = powers[j - 1] * powers[j - 1];

    std::vector<double> dist(std::uint64_t(1) << k, 0.0);
    StateVector state(layout);
    for (const auto& [w, psi] : terms) {
        state.set_range_state(QubitRange{k, s}, psi);
        state.apply_hadamard_layer(layout.ancilla());
        for (int j = 0; j < k; ++j) state.apply_controlled_unitary(j, powers[j], targets);
        state.apply_inverse_qft(layout.ancilla());
        std::vector<double> d = state.ancilla_distribution();
        for (std::size_t m = 0; m < dist.size(); ++m) dist[m] += w * d[m];
    }
    return dist;
}

} // namespace specbox::qpe
