#include "nvreg/measure.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

#include "nvreg/util.hpp"

namespace nvreg {

double readout(const QuantumState& state, Spin spin, const ReadoutModel& model,
               std::optional<uint64_t> seed) {
    if (model.contrast <= 0 || model.contrast > 1)
        throw std::invalid_argument("readout: contrast must be in (0, 1]");
    double p0 = population(state, spin, 0);
    double intensity = (1.0 - model.contrast) + model.contrast * p0;
    if (model.photon_budget) {
        if (*model.photon_budget <= 0)
            throw std::invalid_argument("readout: photon budget must be > 0");
        std::mt19937_64 rng(seed ? *seed : 0x9e3779b9ULL);
        std::poisson_distribution<long> poisson(*model.photon_budget * intensity);
        intensity = static_cast<double>(poisson(rng)) / *model.photon_budget;
    }
    if (model.normalization == Normalization::SpinFlip)
        return (intensity - (1.0 - model.contrast)) / model.contrast;
    return intensity;
}

namespace {

double uniform_step(const std::vector<double>& t) {
    double dt = t[1] - t[0];
    if (dt <= 0) throw std::invalid_argument("trace: abscissa must be increasing");
    for (size_t i = 1; i + 1 < t.size(); ++i) {
        double d = t[i + 1] - t[i];
        if (std::abs(d - dt) > 1e-9 * std::abs(dt) + 1e-18)
            throw std::invalid_argument("trace: non-uniform sampling grid");
    }
    return dt;
}

}  // namespace

Spectrum fft_spectrum(const SignalTrace& trace) {
    const auto& y = trace.values;
    const size_t n = y.size();
    if (n < 8) throw std::invalid_argument("fft_spectrum: need at least 8 points");
    if (trace.abscissa.size() != n)
        throw std::invalid_argument("fft_spectrum: abscissa/value size mismatch");
    double dt = uniform_step(trace.abscissa);

    double mean = 0;
    for (double v : y) mean += v;
    mean /= n;

    std::vector<double> hann(n);
    double wsum = 0;
    for (size_t i = 0; i < n; ++i) {
        hann[i] = 0.5 * (1.0 - std::cos(2.0 * M_PI * i / (n - 1)));
        wsum += hann[i];
    }

    Spectrum spec;
    spec.df = 1.0 / (n * dt);
    const size_t nk = n / 2 + 1;
    spec.frequencies.resize(nk);
    spec.magnitudes.resize(nk);
    spec.power.resize(nk);
    for (size_t k = 0; k < nk; ++k) {
        std::complex<double> xw = 0, xr = 0;
        for (size_t i = 0; i < n; ++i) {
            std::complex<double> ph =
                std::polar(1.0, -2.0 * M_PI * static_cast<double>(k) * i / n);
            double c = y[i] - mean;
            xw += c * hann[i] * ph;
            xr += c * ph;
        }
        spec.frequencies[k] = k * spec.df;
        spec.magnitudes[k] = 2.0 * std::abs(xw) / wsum;
        double fold = (k == 0 || 2 * k == n) ? 1.0 : 2.0;
        spec.power[k] = fold * std::norm(xr) / (static_cast<double>(n) * n);
    }
    return spec;
}

PeakSet extract_peaks(const Spectrum& spectrum, int count) {
    if (count < 1) throw std::invalid_argument("extract_peaks: count must be >= 1");
    const auto& m = spectrum.magnitudes;
    PeakSet out;
    std::vector<size_t> maxima;
    for (size_t k = 1; k + 1 < m.size(); ++k)
        if (m[k] > m[k - 1] && m[k] >= m[k + 1] && m[k] > 0) maxima.push_back(k);
    std::sort(maxima.begin(), maxima.end(),
              [&](size_t a, size_t b) { return m[a] > m[b]; });
    if (maxima.size() > static_cast<size_t>(count)) maxima.resize(count);
    for (size_t k : maxima) {
        // three-point parabola on log magnitude: exact for Gaussian-shaped lines
        double la = std::log(std::max(m[k - 1], 1e-300));
        double lb = std::log(m[k]);
        double lc = std::log(std::max(m[k + 1], 1e-300));
        double denom = la - 2 * lb + lc;
        double delta = std::abs(denom) > 1e-300 ? 0.5 * (la - lc) / denom : 0.0;
        delta = std::clamp(delta, -0.5, 0.5);
        Peak p;
        p.frequency = (k + delta) * spectrum.df;
        p.amplitude = std::exp(lb - 0.25 * (la - lc) * delta);
        out.peaks.push_back(p);
    }
    out.complete = out.peaks.size() == static_cast<size_t>(count);
    return out;
}

double estimate_polarization(const std::vector<double>& amplitudes) {
    if (amplitudes.size() != 3)
        throw std::invalid_argument("estimate_polarization: expected 3 line amplitudes");
    double sum = 0;
    for (double a : amplitudes) {
        if (a < 0) throw std::invalid_argument("estimate_polarization: negative amplitude");
        sum += a;
    }
    if (sum <= 0) throw std::invalid_argument("estimate_polarization: all-zero multiplet");
    return amplitudes[1] / sum;
}

namespace {

struct CosineSolve {
    double offset, a, b, sse;
};

// linear LSQ of y = offset + a*cos(2 pi f t) + b*sin(2 pi f t) at fixed f
CosineSolve solve_at(const std::vector<double>& t, const std::vector<double>& y, double f) {
    const size_t n = t.size();
    double s[3][3] = {{0}}, r[3] = {0};
    for (size_t i = 0; i < n; ++i) {
        double c = std::cos(2 * M_PI * f * t[i]);
        double sn = std::sin(2 * M_PI * f * t[i]);
        double g[3] = {1.0, c, sn};
        for (int p = 0; p < 3; ++p) {
            r[p] += g[p] * y[i];
            for (int q = 0; q < 3; ++q) s[p][q] += g[p] * g[q];
        }
    }
    Eigen::Matrix3d m;
    Eigen::Vector3d v;
    for (int p = 0; p < 3; ++p) {
        v[p] = r[p];
        for (int q = 0; q < 3; ++q) m(p, q) = s[p][q];
    }
    Eigen::Vector3d x = m.ldlt().solve(v);
    double sse = 0;
    for (size_t i = 0; i < n; ++i) {
        double c = std::cos(2 * M_PI * f * t[i]);
        double sn = std::sin(2 * M_PI * f * t[i]);
        double e = y[i] - (x[0] + x[1] * c + x[2] * sn);
        sse += e * e;
    }
    return {x[0], x[1], x[2], sse};
}

}  // namespace

ModulationFit fit_modulation(const SignalTrace& trace) {
    const auto& t = trace.abscissa;
    const auto& y = trace.values;
    ModulationFit fit;
    double mean = 0;
    for (double v : y) mean += v;
    mean /= y.size();
    fit.offset = mean;

    Spectrum spec = fft_spectrum(trace);
    PeakSet seed = extract_peaks(spec, 1);
    double lo = *std::min_element(y.begin(), y.end());
    double hi = *std::max_element(y.begin(), y.end());
    if (seed.peaks.empty() || hi - lo < 1e-12) {
        fit.flat = true;
        double sse = 0;
        for (double v : y) sse += (v - mean) * (v - mean);
        fit.residual_rms = std::sqrt(sse / y.size());
        return fit;
    }

    // scan around the interpolated spectral peak, then a parabolic touch-up
    double f0 = std::max(seed.peaks[0].frequency, 0.25 * spec.df);
    double best_f = f0, best_sse = solve_at(t, y, f0).sse;
    double span = spec.df;
    const int steps = 40;
    for (int i = -steps; i <= steps; ++i) {
        double f = f0 + span * i / steps;
        if (f <= 0) continue;
        double sse = solve_at(t, y, f).sse;
        if (sse < best_sse) {
            best_sse = sse;
            best_f = f;
        }
    }
    double h = span / steps;
    double sm = solve_at(t, y, best_f - h).sse;
    double sp = solve_at(t, y, best_f + h).sse;
    double denom = sm - 2 * best_sse + sp;
    if (denom > 0) {
        double delta = std::clamp(0.5 * (sm - sp) / denom, -1.0, 1.0);
        double f = best_f + delta * h;
        if (f > 0 && solve_at(t, y, f).sse < best_sse) best_f = f;
    }

    CosineSolve sol = solve_at(t, y, best_f);
    fit.frequency = best_f;
    fit.offset = sol.offset;
    fit.amplitude = std::hypot(sol.a, sol.b);
    fit.phase = std::atan2(-sol.b, sol.a);
    fit.residual_rms = std::sqrt(sol.sse / y.size());
    return fit;
}

}  // namespace nvreg
