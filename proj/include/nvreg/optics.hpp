#pragma once
// Optical companion: synthetic FLIM stacks for a pair of emitters with
// distinct lifetimes, per-pixel double-exponential amplitude separation,
// correlation-based displacement recovery, photon statistics helpers.
// This module works in nanometres and nanoseconds.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nvreg {

struct EmitterModel {
    Eigen::Vector2d position_nm = Eigen::Vector2d::Zero();  // relative to grid center
    double lifetime_ns = 11.0;
    double brightness = 1.0;  // relative rate
};

struct FlimGrid {
    int width = 64, height = 64;
    double pitch_nm = 25.0;
    int bins = 64;
    double bin_ns = 0.4;
};

struct FlimImage {
    FlimGrid grid;
    std::vector<double> counts;  // ((y*width + x)*bins + b)

    double& at(int x, int y, int b) {
        return counts[(static_cast<size_t>(y) * grid.width + x) * grid.bins + b];
    }
    double at(int x, int y, int b) const {
        return counts[(static_cast<size_t>(y) * grid.width + x) * grid.bins + b];
    }
};

void save_flim(const FlimImage& image, const std::string& path);
FlimImage load_flim(const std::string& path);

// Poisson-sampled decay histograms from a Gaussian spot per emitter;
// photons is the mean total per emitter over the whole image. Deterministic
// per seed (independent per-row substreams). photons <= 0 gives the
// noiseless expectation image.
FlimImage synthesize_flim(const std::vector<EmitterModel>& emitters, double psf_fwhm_nm,
                          double photons, uint64_t seed, const FlimGrid& grid = {});

struct AmplitudeImage {
    int width = 0, height = 0;
    double pitch_nm = 0;
    Eigen::MatrixXd values;  // (y, x)
};

void save_amplitude_csv(const AmplitudeImage& image, const std::string& path);

struct AmplitudePair {
    AmplitudeImage a1, a2;
};

// Per-pixel nonnegative least squares on two fixed normalized exponentials;
// amplitudes come out in photons attributed to each lifetime component.
AmplitudePair fit_amplitudes(const FlimImage& image, double tau1_ns, double tau2_ns);

struct DisplacementEstimate {
    Eigen::Vector2d delta_nm = Eigen::Vector2d::Zero();  // img2 relative to img1
    double uncertainty_nm = 0;
    bool ok = false;  // false when the correlation carries no peak
};

// Cross-correlation peak with 3x3 log-parabolic sub-pixel refinement.
DisplacementEstimate correlate_displacement(const AmplitudeImage& img1,
                                            const AmplitudeImage& img2);

// photon autocorrelation floor for n equal independent emitters
double g2_zero(int n_emitters);

// ground-state-depletion spot size: r0 / sqrt(pump_ratio)
double gsd_resolution(double r0_nm, double pump_ratio);

}  // namespace nvreg
