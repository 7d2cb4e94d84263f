#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "specbox/qpe.hpp"

namespace specbox::spectra {

/// Outcome counts (or exact probabilities) over m in [0, 2^k).
struct PhaseHistogram {
    int k = 0;
    std::vector<std::uint64_t> counts;
    std::uint64_t shots = 0;
    std::optional<std::vector<double>> exact_probabilities;
    std::uint64_t seed = 0;
    std::uint64_t shot_offset = 0;

    bool is_exact() const { return exact_probabilities.has_value(); }
    std::uint64_t bins() const { return std::uint64_t(1) << k; }

    std::vector<double> probabilities() const;

    /// Per-bin binomial standard deviation of the empirical frequency;
    /// zero in exact mode.
    std::vector<double> frequency_stddev() const;

    /// Counts of two campaigns over disjoint shot ranges; exact histograms
    /// do not merge.
    static PhaseHistogram merged(const PhaseHistogram& a, const PhaseHistogram& b);
};

/// Probability measure over signed eigenphase differences.
struct SpectralDensity {
    std::vector<double> support; // phases in (-pi, pi]
    std::vector<double> weights; // non-negative, sum 1

    std::size_t size() const { return support.size(); }
};

struct PeriodCandidate {
    int frequency = 0;   // DFT frequency index over the 2^k phase grid
    double period = 0.0; // 2 pi / frequency
    double magnitude = 0.0;
    bool selected = false; // magnitude >= threshold * max non-DC magnitude
};

struct PeriodReport {
    int k = 0;
    double threshold = 0.0;
    bool degenerate = false; // all mass at difference 0; no period is meaningful
    std::vector<double> magnitudes; // |DFT| for frequencies 1 .. 2^{k-1}
    std::vector<PeriodCandidate> candidates; // every frequency, strongest first

    const PeriodCandidate* top() const {
        for (const auto& c : candidates)
            if (c.selected) return &c;
        return nullptr;
    }
};

/// Largest admissible evolution step t = pi / delta for a spectral-spread
/// bound delta: keeps all eigenphase differences of exp(-iHt) in [-pi, pi],
/// so decoded differences never alias.
double choose_time_step(double delta_bound);

/// Aggregate protocol shots (or the exact distribution) into a histogram.
PhaseHistogram run_campaign(const BlackBoxUnitary& box, const qpe::InitialPreparation& prep,
                            const qpe::ProtocolConfig& config);

/// Decoded-difference distribution on the signed 2^k grid, ordered by
/// outcome m. For identical independent preparations on both registers this
/// estimates the autocorrelation of the box's density of states.
SpectralDensity autocorrelation_estimate(const PhaseHistogram& hist);

/// Bin an arbitrary difference distribution to the 2^k grid (nearest grid
/// point, m-ordered) for comparison against autocorrelation_estimate.
SpectralDensity bin_to_grid(const SpectralDensity& density, int k);

/// DFT of a grid-binned difference distribution; frequencies whose magnitude
/// reaches threshold * (max non-DC magnitude) become period candidates,
/// strongest first, ties resolved toward lower frequency. The DC component
/// is excluded; an all-mass-at-zero density is flagged degenerate instead of
/// producing candidates.
PeriodReport detect_periodicities(const SpectralDensity& density, double threshold);

} // namespace specbox::spectra
