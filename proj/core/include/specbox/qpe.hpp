#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "specbox/blackbox.hpp"
#include "specbox/state_vector.hpp"

namespace specbox::qpe {

/// Initial state of one data register.
struct BasisPrep {
    std::uint64_t index = 0;
};
struct EigenstatePrep {
    int rank = 0; // eigenvectors ordered by ascending eigenphase
};
struct MixedPrep {}; // maximally mixed; realized by sampling basis states
struct ExplicitPrep {
    std::vector<cplx> amplitudes; // normalized to 1e-10
};
using RegisterPrep = std::variant<BasisPrep, EigenstatePrep, MixedPrep, ExplicitPrep>;

struct InitialPreparation {
    RegisterPrep reg1;
    RegisterPrep reg2;
};

inline InitialPreparation mixed_preparation() { return {MixedPrep{}, MixedPrep{}}; }

/// Number of sampled shots, or exact-distribution mode.
struct ShotSpec {
    static ShotSpec exact() { return ShotSpec{}; }
    static ShotSpec sampled(std::uint64_t n) { return ShotSpec{n}; }

    bool is_exact() const { return !count.has_value(); }
    std::optional<std::uint64_t> count;
};

struct ProtocolConfig {
    ProtocolConfig(int ancilla_qubits, int register_qubits,
                   LayoutMode mode = LayoutMode::full_swap,
                   ShotSpec shots = ShotSpec::exact(), std::uint64_t seed = 0,
                   int qubit_cap = RegisterLayout::kDefaultQubitCap)
        : layout(ancilla_qubits, register_qubits, mode, qubit_cap), shots(shots), seed(seed) {
        if (!shots.is_exact() && *shots.count < 1)
            throw std::invalid_argument("ProtocolConfig: shot count must be >= 1");
    }

    RegisterLayout layout;
    ShotSpec shots;
    std::uint64_t seed = 0;
    std::uint64_t shot_offset = 0; // first global shot index; campaigns merge by offset
    int threads = 1;               // shot-level workers; outcomes are partition-independent

    int ancilla_qubits() const { return layout.ancilla_qubits(); }
    int register_qubits() const { return layout.register_qubits(); }
    LayoutMode mode() const { return layout.mode(); }
};

/// One primitive of the conditional-evolution circuit.
struct CondSwapOp {
    int control;
    QubitRange a, b;
};
struct RegSwapOp {
    QubitRange a, b;
};
struct BoxPowerOp {
    std::uint64_t power;
};
using ProtocolOp = std::variant<CondSwapOp, RegSwapOp, BoxPowerOp>;

/// Circuit fragment for ancilla bit j: a conditional-swap sandwich around a
/// box application, realizing "U^{2^j} on R1 when bit j is 1, on R2 when it
/// is 0" without any controlled access to the box. In full-swap mode the box
/// acts on the work register, which is swapped against R2 and restored; in
/// compressed mode it acts on R2's span directly.
std::vector<ProtocolOp> build_blackbox_step(const BlackBoxUnitary& box, int j,
                                            const ProtocolConfig& config);

/// All k fragments in protocol order.
std::vector<ProtocolOp> build_protocol_ops(const BlackBoxUnitary& box, const ProtocolConfig& config);

void apply_ops(StateVector& state, const BlackBoxUnitary& box, std::span<const ProtocolOp> ops);

/// Textbook phase estimation with white-box controlled powers of an explicit
/// unitary; the reference the black-box protocol is checked against.
/// Returns the exact outcome distribution over m in [0, 2^k).
std::vector<double> standard_qpe(const Matrix& u, const RegisterPrep& target_prep, int k);

struct QpeResult {
    int k = 0;
    std::uint64_t shots = 0;                      // 0 in exact mode
    std::vector<std::uint64_t> counts;            // sampled mode
    std::optional<std::vector<double>> exact_probabilities;

    std::vector<double> probabilities() const;
};

/// The black-box protocol: ancilla Hadamard layer, the k conditional
/// fragments, inverse QFT, ancilla readout. Exact mode computes the full
/// outcome distribution (enumerating basis states for mixed preparations);
/// sampled mode draws per-shot preparations and measures.
QpeResult blackbox_qpe(const BlackBoxUnitary& box, const InitialPreparation& prep,
                       const ProtocolConfig& config);

/// Exact outcome distribution for a single pure product preparation.
std::vector<double> blackbox_qpe_pure_distribution(const BlackBoxUnitary& box,
                                                   std::span<const cplx> reg1_amps,
                                                   std::span<const cplx> reg2_amps,
                                                   const ProtocolConfig& config);

/// Signed phase difference in (-pi, pi] for outcome m: 2 pi m / 2^k mapped
/// to the symmetric interval, the boundary m = 2^{k-1} going to +pi.
double decode_phase(std::uint64_t m, int k);

/// Resolve a register preparation to an explicit amplitude vector. Mixed
/// preparations are not resolvable here (they are ensembles); eigenstate
/// preparations use the verify module's decomposition - a harness privilege,
/// not a protocol capability.
std::vector<cplx> resolve_pure_prep(const RegisterPrep& prep, const BlackBoxUnitary& box);

/// Weighted pure-state ensemble equivalent to a preparation (enumerates the
/// computational basis for the maximally mixed case).
std::vector<std::pair<double, std::vector<cplx>>> prep_ensemble(const RegisterPrep& prep,
                                                                const BlackBoxUnitary& box);

} // namespace specbox::qpe
