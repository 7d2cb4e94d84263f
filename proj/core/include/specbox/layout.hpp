#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace specbox {

/// Contiguous run of qubit indices [first, first + count).
struct QubitRange {
    int first = 0;
    int count = 0;

    int last() const { return first + count; } // one past the end

    bool overlaps(const QubitRange& other) const {
        return first < other.last() && other.first < last();
    }
    bool contains(int qubit) const { return qubit >= first && qubit < last(); }

    friend bool operator==(const QubitRange&, const QubitRange&) = default;
};

enum class LayoutMode {
    /// Ancilla | R1 | R2 | work register the box acts on. The work register
    /// is swapped against R2 around every box application, so the box never
    /// touches R1/R2 directly. N = k + 3n.
    full_swap,
    /// Ancilla | R1 | R2, box applied in place on R2's span. N = k + 2n.
    compressed,
    /// Ancilla | single target register (textbook phase-estimation shape).
    plain,
};

inline const char* to_string(LayoutMode m) {
    switch (m) {
        case LayoutMode::full_swap: return "full-swap";
        case LayoutMode::compressed: return "compressed";
        default: return "plain";
    }
}

/// Partition of the simulation qubits into ancilla (low k bits), two data
/// registers of n qubits each, and (in full-swap mode) the work register.
/// Qubit q is bit q of the amplitude index; ancilla outcomes therefore
/// occupy contiguous low index bits.
class RegisterLayout {
  public:
    static constexpr int kDefaultQubitCap = 26;

    RegisterLayout(int ancilla_qubits, int register_qubits,
                   LayoutMode mode = LayoutMode::full_swap,
                   int qubit_cap = kDefaultQubitCap)
        : k_(ancilla_qubits), n_(register_qubits), mode_(mode), cap_(qubit_cap) {
        if (k_ < 1) throw std::invalid_argument("RegisterLayout: ancilla qubit count must be >= 1");
        if (n_ < 1) throw std::invalid_argument("RegisterLayout: register qubit count must be >= 1");
        if (total_qubits() > cap_) {
            throw std::invalid_argument("RegisterLayout: " + std::to_string(total_qubits()) +
                                        " qubits exceeds the cap of " + std::to_string(cap_));
        }
    }

    /// Ancilla plus one target register of arbitrary size.
    static RegisterLayout plain(int ancilla_qubits, int target_qubits,
                                int qubit_cap = kDefaultQubitCap) {
        return RegisterLayout(ancilla_qubits, target_qubits, LayoutMode::plain, qubit_cap);
    }

    int ancilla_qubits() const { return k_; }
    int register_qubits() const { return n_; }
    LayoutMode mode() const { return mode_; }
    int qubit_cap() const { return cap_; }

    int total_qubits() const {
        switch (mode_) {
            case LayoutMode::full_swap: return k_ + 3 * n_;
            case LayoutMode::compressed: return k_ + 2 * n_;
            default: return k_ + n_;
        }
    }
    std::uint64_t dimension() const { return std::uint64_t(1) << total_qubits(); }

    QubitRange ancilla() const { return {0, k_}; }
    QubitRange reg1() const { return {k_, n_}; }
    QubitRange reg2() const {
        if (mode_ == LayoutMode::plain)
            throw std::logic_error("RegisterLayout: plain layout has a single target register");
        return {k_ + n_, n_};
    }

    /// Work register in full-swap mode; not part of the compressed layout.
    QubitRange work() const {
        if (mode_ != LayoutMode::full_swap)
            throw std::logic_error("RegisterLayout: compressed layout has no work register");
        return {k_ + 2 * n_, n_};
    }

    /// Span the black box applies its unitary to: the work register in
    /// full-swap mode, R2's span in compressed mode.
    QubitRange box_span() const {
        if (mode_ == LayoutMode::plain)
            throw std::logic_error("RegisterLayout: plain layout has no box span");
        return mode_ == LayoutMode::full_swap ? work() : reg2();
    }

    friend bool operator==(const RegisterLayout& a, const RegisterLayout& b) {
        return a.k_ == b.k_ && a.n_ == b.n_ && a.mode_ == b.mode_;
    }

  private:
    int k_;
    int n_;
    LayoutMode mode_;
    int cap_;
};

} // namespace specbox
