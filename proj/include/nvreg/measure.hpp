#pragma once
// Fluorescence readout model and trace analysis: spectra, peak
// interpolation, polarization estimates, cosine modulation fits.

#include <cstdint>
#include <optional>
#include <vector>

#include "nvreg/dynamics.hpp"
#include "nvreg/sequences.hpp"

namespace nvreg {

enum class Normalization { None, SpinFlip };

struct ReadoutModel {
    double contrast = 0.3;                    // relative dip of |±1> vs |0>
    std::optional<double> photon_budget;      // mean photons per point; unset = noiseless
    Normalization normalization = Normalization::None;
};

// Fluorescence level for reading one spin of a two-spin state.
// Noiseless: affine in P(m=0); spin-flip normalization maps P=1 -> 1, P=0 -> 0.
// With a photon budget the value is a Poisson sample, deterministic per seed.
double readout(const QuantumState& state, Spin spin, const ReadoutModel& model,
               std::optional<uint64_t> seed = std::nullopt);

struct Spectrum {
    std::vector<double> frequencies;  // one-sided, Hz, k = 0 .. N/2
    std::vector<double> magnitudes;   // Hann-window amplitude estimates
    std::vector<double> power;        // rectangular one-sided power; sums to the
                                      // mean-removed time-domain mean square
    double df = 0;                    // bin spacing, Hz
};

// Magnitude spectrum of a uniformly sampled trace, mean removed first.
// Throws std::invalid_argument for < 8 points or a non-uniform grid.
Spectrum fft_spectrum(const SignalTrace& trace);

struct Peak {
    double frequency = 0;  // Hz
    double amplitude = 0;
};

struct PeakSet {
    std::vector<Peak> peaks;  // descending amplitude
    bool complete = false;    // found as many local maxima as requested
};

// Top local maxima refined by log-magnitude quadratic interpolation.
PeakSet extract_peaks(const Spectrum& spectrum, int count);

// Multiplet amplitudes ordered by partner level (-1, 0, +1); returns the
// central share, a lower bound on the |0> preparation probability.
double estimate_polarization(const std::vector<double>& amplitudes);

struct ModulationFit {
    double frequency = 0;  // Hz
    double amplitude = 0;
    double phase = 0;      // value = offset + amplitude*cos(2*pi*f*t + phase)
    double offset = 0;
    double residual_rms = 0;
    bool flat = false;
};

// Least-squares cosine fit seeded by the spectral peak, with local
// frequency refinement. A trace without any spectral maximum comes back
// flagged flat (offset = mean).
ModulationFit fit_modulation(const SignalTrace& trace);

}  // namespace nvreg
