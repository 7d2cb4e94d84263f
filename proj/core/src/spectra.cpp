#include "specbox/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace specbox::spectra {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

std::vector<double> PhaseHistogram::probabilities() const {
    if (exact_probabilities) return *exact_probabilities;
    if (shots == 0) throw std::domain_error("PhaseHistogram: zero shots");
    std::vector<double> p(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) p[i] = double(counts[i]) / double(shots);
    return p;
}

std::vector<double> PhaseHistogram::frequency_stddev() const {
    if (is_exact()) return std::vector<double>(bins(), 0.0);
    std::vector<double> sd(counts.size(), 0.0);
    if (shots == 0) return sd;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        double p = double(counts[i]) / double(shots);
        sd[i] = std::sqrt(p * (1.0 - p) / double(shots));
    }
    return sd;
}

PhaseHistogram PhaseHistogram::merged(const PhaseHistogram& a, const PhaseHistogram& b) {
    if (a.k != b.k) throw std::invalid_argument("PhaseHistogram: resolution mismatch");
    if (a.is_exact() || b.is_exact())
        throw std::invalid_argument("PhaseHistogram: exact histograms do not merge");
    if (a.seed != b.seed)
        throw std::invalid_argument("PhaseHistogram: campaigns with different seeds do not merge");
    PhaseHistogram out;
    out.k = a.k;
    out.seed = a.seed;
    out.shot_offset = std::min(a.shot_offset, b.shot_offset);
    out.shots = a.shots + b.shots;
    out.counts.resize(a.counts.size());
    for (std::size_t i = 0; i < out.counts.size(); ++i) out.counts[i] = a.counts[i] + b.counts[i];
    return out;
}

double choose_time_step(double delta_bound) {
    if (!(delta_bound > 0.0)) throw std::invalid_argument("choose_time_step: bound must be positive");
    return std::numbers::pi / delta_bound;
}

PhaseHistogram run_campaign(const BlackBoxUnitary& box, const qpe::InitialPreparation& prep,
                            const qpe::ProtocolConfig& config) {
    qpe::QpeResult r = qpe::blackbox_qpe(box, prep, config);
    PhaseHistogram hist;
    hist.k = r.k;
    hist.shots = r.shots;
    hist.seed = config.seed;
    hist.shot_offset = config.shot_offset;
    if (r.exact_probabilities) {
        hist.exact_probabilities = std::move(r.exact_probabilities);
        hist.counts.assign(hist.bins(), 0);
    } else {
        hist.counts = std::move(r.counts);
    }
    return hist;
}

SpectralDensity autocorrelation_estimate(const PhaseHistogram& hist) {
    if (!hist.is_exact() && hist.shots == 0)
        throw std::domain_error("autocorrelation_estimate: zero shots");
    std::vector<double> p = hist.probabilities();
    SpectralDensity density;
    density.support.resize(p.size());
    density.weights = std::move(p);
    for (std::size_t m = 0; m < density.support.size(); ++m)
        density.support[m] = qpe::decode_phase(m, hist.k);
    return density;
}

SpectralDensity bin_to_grid(const SpectralDensity& density, int k) {
    if (k < 1) throw std::invalid_argument("bin_to_grid: need k >= 1");
    const std::int64_t bins = std::int64_t(1) << k;
    SpectralDensity out;
    out.support.resize(bins);
    out.weights.assign(bins, 0.0);
    for (std::int64_t m = 0; m < bins; ++m) out.support[m] = qpe::decode_phase(m, k);
    for (std::size_t i = 0; i < density.support.size(); ++i) {
        std::int64_t m = std::llround(density.support[i] * double(bins) / kTwoPi) % bins;
        if (m < 0) m += bins;
        out.weights[m] += density.weights[i];
    }
    return out;
}

PeriodReport detect_periodicities(const SpectralDensity& density, double threshold) {
    if (!(threshold > 0.0) || !(threshold < 1.0))
        throw std::invalid_argument("detect_periodicities: threshold must lie in (0, 1)");
    const std::size_t bins = density.size();
    if (bins < 2 || (bins & (bins - 1)) != 0)
        throw std::invalid_argument("detect_periodicities: density is not on a 2^k grid");
    int k = 0;
    while ((std::size_t(1) << k) < bins) ++k;
    for (std::size_t m = 0; m < bins; ++m)
        if (std::abs(density.support[m] - qpe::decode_phase(m, k)) > 1e-9)
            throw std::invalid_argument("detect_periodicities: density is not on the 2^k grid");

    double total = 0.0;
    for (double w : density.weights) total += w;
    if (total < 1e-12) throw std::domain_error("detect_periodicities: all-zero density");

    PeriodReport report;
    report.k = k;
    report.threshold = threshold;

    // a pure delta at zero difference fits every period; flag, don't guess
    if (density.weights[0] / total > 1.0 - 1e-9) {
        report.degenerate = true;
        return report;
    }

    const std::size_t top_freq = bins / 2; // |C_f| = |C_{bins-f}| for real weights
    report.magnitudes.resize(top_freq);
    double max_mag = 0.0;
    for (std::size_t f = 1; f <= top_freq; ++f) {
        std::complex<double> c{0.0, 0.0};
        for (std::size_t m = 0; m < bins; ++m)
            c += density.weights[m] * std::polar(1.0, -kTwoPi * double(f) * double(m) / double(bins));
        report.magnitudes[f - 1] = std::abs(c);
        max_mag = std::max(max_mag, report.magnitudes[f - 1]);
    }

    if (max_mag < 1e-9) return report; // flat spectrum: nothing to report

    for (std::size_t f = 1; f <= top_freq; ++f) {
        PeriodCandidate cand;
        cand.frequency = int(f);
        cand.period = kTwoPi / double(f);
        cand.magnitude = report.magnitudes[f - 1];
        cand.selected = cand.magnitude >= threshold * max_mag;
        report.candidates.push_back(cand);
    }
    std::sort(report.candidates.begin(), report.candidates.end(),
              [](const PeriodCandidate& a, const PeriodCandidate& b) {
                  if (std::abs(a.magnitude - b.magnitude) > 1e-12) return a.magnitude > b.magnitude;
                  return a.frequency < b.frequency; // ties: prefer the fundamental
              });
    return report;
}

} // namespace specbox::spectra
