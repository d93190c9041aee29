#include "nvreg/optics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "nvreg/errors.hpp"
#include "nvreg/util.hpp"

namespace nvreg {

void save_flim(const FlimImage& image, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write image '" + path + "'");
    const FlimGrid& g = image.grid;
    out << "flim " << g.width << ' ' << g.height << ' ' << g.pitch_nm << ' ' << g.bins << ' '
        << g.bin_ns << '\n';
    for (int y = 0; y < g.height; ++y)
        for (int x = 0; x < g.width; ++x) {
            for (int b = 0; b < g.bins; ++b) out << (b ? " " : "") << image.at(x, y, b);
            out << '\n';
        }
}

FlimImage load_flim(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open image '" + path + "'");
    std::string tag;
    FlimImage img;
    FlimGrid& g = img.grid;
    in >> tag >> g.width >> g.height >> g.pitch_nm >> g.bins >> g.bin_ns;
    if (!in || tag != "flim" || g.width < 1 || g.height < 1 || g.bins < 1 || g.pitch_nm <= 0 ||
        g.bin_ns <= 0)
        throw ConfigError("image '" + path + "': bad header");
    size_t n = static_cast<size_t>(g.width) * g.height * g.bins;
    img.counts.resize(n);
    for (size_t i = 0; i < n; ++i) {
        in >> img.counts[i];
        if (!in) throw ConfigError("image '" + path + "': truncated data");
        if (img.counts[i] < 0) throw ConfigError("image '" + path + "': negative count");
    }
    return img;
}

namespace {

// bin-integrated decay fractions, normalized over the recorded window
std::vector<double> decay_fractions(double tau_ns, const FlimGrid& g) {
    std::vector<double> f(g.bins);
    double sum = 0;
    for (int b = 0; b < g.bins; ++b) {
        f[b] = std::exp(-b * g.bin_ns / tau_ns) * (1.0 - std::exp(-g.bin_ns / tau_ns));
        sum += f[b];
    }
    for (double& v : f) v /= sum;
    return f;
}

double pixel_x(const FlimGrid& g, int ix) { return (ix - 0.5 * (g.width - 1)) * g.pitch_nm; }
double pixel_y(const FlimGrid& g, int iy) { return (iy - 0.5 * (g.height - 1)) * g.pitch_nm; }

}  // namespace

FlimImage synthesize_flim(const std::vector<EmitterModel>& emitters, double psf_fwhm_nm,
                          double photons, uint64_t seed, const FlimGrid& grid) {
    if (emitters.empty()) throw std::invalid_argument("synthesize_flim: no emitters");
    if (psf_fwhm_nm <= 0) throw std::invalid_argument("synthesize_flim: psf_fwhm must be > 0");
    for (const auto& e : emitters)
        if (e.lifetime_ns <= 0 || e.brightness <= 0)
            throw std::invalid_argument("synthesize_flim: lifetime and brightness must be > 0");

    const double sigma = psf_fwhm_nm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    const size_t ne = emitters.size();

    // spot weight per pixel, normalized so each emitter lands `photons` total
    std::vector<Eigen::MatrixXd> weight(ne);
    std::vector<std::vector<double>> frac(ne);
    for (size_t e = 0; e < ne; ++e) {
        weight[e].resize(grid.height, grid.width);
        double sum = 0;
        for (int y = 0; y < grid.height; ++y)
            for (int x = 0; x < grid.width; ++x) {
                double dx = pixel_x(grid, x) - emitters[e].position_nm.x();
                double dy = pixel_y(grid, y) - emitters[e].position_nm.y();
                weight[e](y, x) = std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma));
                sum += weight[e](y, x);
            }
        if (sum <= 0) throw std::invalid_argument("synthesize_flim: emitter off the grid");
        double total = std::abs(photons) * emitters[e].brightness;
        weight[e] *= total / sum;
        frac[e] = decay_fractions(emitters[e].lifetime_ns, grid);
    }

    FlimImage img;
    img.grid = grid;
    img.counts.assign(static_cast<size_t>(grid.width) * grid.height * grid.bins, 0.0);
    bool noiseless = photons <= 0;
    parallel_for(grid.height, [&](int y) {
        std::mt19937_64 rng(mix_seed(seed, static_cast<uint64_t>(y)));
        for (int x = 0; x < grid.width; ++x)
            for (int b = 0; b < grid.bins; ++b) {
                double lam = 0;
                for (size_t e = 0; e < ne; ++e) lam += weight[e](y, x) * frac[e][b];
                if (noiseless) {
                    img.at(x, y, b) = lam;
                } else if (lam > 0) {
                    std::poisson_distribution<long> p(lam);
                    img.at(x, y, b) = static_cast<double>(p(rng));
                }
            }
    });
    return img;
}

void save_amplitude_csv(const AmplitudeImage& image, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << "# amplitude image " << image.width << "x" << image.height << ", pitch "
        << image.pitch_nm << " nm\n";
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) out << (x ? "," : "") << image.values(y, x);
        out << '\n';
    }
}

AmplitudePair fit_amplitudes(const FlimImage& image, double tau1_ns, double tau2_ns) {
    if (tau1_ns <= 0 || tau2_ns <= 0)
        throw std::invalid_argument("fit_amplitudes: lifetimes must be > 0");
    if (std::abs(tau1_ns - tau2_ns) < 1e-12 * std::max(tau1_ns, tau2_ns))
        throw std::invalid_argument("fit_amplitudes: lifetimes must differ");
    const FlimGrid& g = image.grid;
    std::vector<double> f1 = decay_fractions(tau1_ns, g);
    std::vector<double> f2 = decay_fractions(tau2_ns, g);

    double s11 = 0, s12 = 0, s22 = 0;
    for (int b = 0; b < g.bins; ++b) {
        s11 += f1[b] * f1[b];
        s12 += f1[b] * f2[b];
        s22 += f2[b] * f2[b];
    }

    AmplitudePair out;
    for (AmplitudeImage* im : {&out.a1, &out.a2}) {
        im->width = g.width;
        im->height = g.height;
        im->pitch_nm = g.pitch_nm;
        im->values = Eigen::MatrixXd::Zero(g.height, g.width);
    }

    parallel_for(g.height, [&](int y) {
        for (int x = 0; x < g.width; ++x) {
            double c1 = 0, c2 = 0;
            for (int b = 0; b < g.bins; ++b) {
                double v = image.at(x, y, b);
                c1 += f1[b] * v;
                c2 += f2[b] * v;
            }
            if (c1 == 0 && c2 == 0) continue;  // empty pixel stays at zero
            double det = s11 * s22 - s12 * s12;
            double a1 = (s22 * c1 - s12 * c2) / det;
            double a2 = (s11 * c2 - s12 * c1) / det;
            if (a1 < 0 || a2 < 0) {
                // active set: best single-component nonnegative fit
                double only1 = std::max(c1 / s11, 0.0);
                double only2 = std::max(c2 / s22, 0.0);
                double sse1 = only1 * only1 * s11 - 2 * only1 * c1;
                double sse2 = only2 * only2 * s22 - 2 * only2 * c2;
                if (sse1 <= sse2) {
                    a1 = only1;
                    a2 = 0;
                } else {
                    a1 = 0;
                    a2 = only2;
                }
            }
            out.a1.values(y, x) = a1;
            out.a2.values(y, x) = a2;
        }
    });
    return out;
}

DisplacementEstimate correlate_displacement(const AmplitudeImage& img1,
                                            const AmplitudeImage& img2) {
    if (img1.width != img2.width || img1.height != img2.height ||
        img1.pitch_nm != img2.pitch_nm)
        throw std::invalid_argument("correlate_displacement: grid mismatch");
    const int w = img1.width, h = img1.height;
    if (w < 2 || h < 2) throw std::invalid_argument("correlate_displacement: image too small");

    Eigen::MatrixXd corr = Eigen::MatrixXd::Zero(2 * h - 1, 2 * w - 1);
    parallel_for(2 * h - 1, [&](int iy) {
        int dy = iy - (h - 1);
        for (int dx = -(w - 1); dx <= w - 1; ++dx) {
            double s = 0;
            int x0 = std::max(0, -dx), x1 = std::min(w, w - dx);
            int y0 = std::max(0, -dy), y1 = std::min(h, h - dy);
            for (int y = y0; y < y1; ++y)
                for (int x = x0; x < x1; ++x)
                    s += img1.values(y, x) * img2.values(y + dy, x + dx);
            corr(iy, dx + (w - 1)) = s;
        }
    });

    DisplacementEstimate est;
    Eigen::Index py, px;
    double peak = corr.maxCoeff(&py, &px);
    if (peak <= 0 || corr.minCoeff() == peak) return est;  // flat, flagged not-ok
    if (px == 0 || px == corr.cols() - 1 || py == 0 || py == corr.rows() - 1) return est;

    auto refine = [](double la, double lb, double lc) {
        double den = la - 2 * lb + lc;
        if (std::abs(den) < 1e-300) return std::pair<double, double>{0.0, 1.0};
        double delta = std::clamp(0.5 * (la - lc) / den, -0.5, 0.5);
        return std::pair<double, double>{delta, std::max(-den, 1e-12)};
    };
    double eps = 1e-12 * peak;
    auto lx = [&](int dx, int dy) { return std::log(std::max(corr(py + dy, px + dx), eps)); };
    auto [ddx, curvx] = refine(lx(-1, 0), lx(0, 0), lx(+1, 0));
    auto [ddy, curvy] = refine(lx(0, -1), lx(0, 0), lx(0, +1));

    est.ok = true;
    est.delta_nm.x() = (static_cast<double>(px) - (w - 1) + ddx) * img1.pitch_nm;
    est.delta_nm.y() = (static_cast<double>(py) - (h - 1) + ddy) * img1.pitch_nm;

    // localization scale: peak width over root photon content
    double wx = 1.0 / std::sqrt(curvx), wy = 1.0 / std::sqrt(curvy);
    double n_eff = std::min(img1.values.sum(), img2.values.sum());
    est.uncertainty_nm =
        img1.pitch_nm * 0.5 * (wx + wy) / std::sqrt(std::max(n_eff, 1.0));
    return est;
}

double g2_zero(int n_emitters) {
    if (n_emitters < 1) throw std::domain_error("g2_zero: need at least one emitter");
    return 1.0 - 1.0 / n_emitters;
}

double gsd_resolution(double r0_nm, double pump_ratio) {
    if (r0_nm <= 0) throw std::domain_error("gsd_resolution: r0 must be > 0");
    if (pump_ratio <= 0) throw std::domain_error("gsd_resolution: pump ratio must be > 0");
    return r0_nm / std::sqrt(pump_ratio);
}

}  // namespace nvreg
