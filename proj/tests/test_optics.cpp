// Synthetic lifetime-imaging stacks, per-pixel two-exponential separation,
// correlation-based displacement recovery, and photon-statistics helpers.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "nvreg/errors.hpp"
#include "nvreg/optics.hpp"

using namespace nvreg;
using doctest::Approx;

namespace {

FlimGrid small_grid() {
    FlimGrid g;
    g.width = 16;
    g.height = 16;
    g.bins = 32;
    return g;
}

EmitterModel emitter(double x_nm, double y_nm, double tau_ns, double brightness = 1.0) {
    EmitterModel e;
    e.position_nm = Eigen::Vector2d(x_nm, y_nm);
    e.lifetime_ns = tau_ns;
    e.brightness = brightness;
    return e;
}

double total_counts(const FlimImage& img) {
    double s = 0;
    for (double v : img.counts) s += v;
    return s;
}

// brightest-pixel histogram of a noiseless stack
std::vector<double> brightest_histogram(const FlimImage& img) {
    const FlimGrid& g = img.grid;
    int bx = 0, by = 0;
    double best = -1;
    for (int y = 0; y < g.height; ++y)
        for (int x = 0; x < g.width; ++x) {
            double s = 0;
            for (int b = 0; b < g.bins; ++b) s += img.at(x, y, b);
            if (s > best) {
                best = s;
                bx = x;
                by = y;
            }
        }
    std::vector<double> h(g.bins);
    for (int b = 0; b < g.bins; ++b) h[b] = img.at(bx, by, b);
    return h;
}

}  // namespace

TEST_CASE("synthesize_flim: noiseless stack decays at the emitter lifetime") {
    FlimGrid g;  // default 64x64x64
    FlimImage img = synthesize_flim({emitter(0, 0, 11.0)}, 100.0, -20000.0, 0, g);
    CHECK(total_counts(img) == Approx(20000.0).epsilon(1e-9));

    std::vector<double> h = brightest_histogram(img);
    // successive bins fall by exactly exp(-bin/tau)
    double ratio = std::exp(-g.bin_ns / 11.0);
    for (int b = 1; b < g.bins; ++b) CHECK(h[b] / h[b - 1] == Approx(ratio).epsilon(1e-9));
    double tau_est = -g.bin_ns / std::log(h[5] / h[4]);
    CHECK(tau_est == Approx(11.0).epsilon(1e-9));

    // brightness scales totals linearly, per emitter
    FlimImage two =
        synthesize_flim({emitter(-30, 0, 11.0, 1.0), emitter(30, 0, 20.0, 0.7)}, 100.0,
                        -20000.0, 0, g);
    CHECK(total_counts(two) == Approx(20000.0 * 1.7).epsilon(1e-9));
}

TEST_CASE("synthesize_flim: Poisson sampling is seeded, thread-stable, unbiased") {
    FlimGrid g = small_grid();
    std::vector<EmitterModel> ems{emitter(0, 0, 11.0)};
    FlimImage a = synthesize_flim(ems, 100.0, 5000.0, 99, g);
    FlimImage b = synthesize_flim(ems, 100.0, 5000.0, 99, g);
    CHECK(a.counts == b.counts);

    setenv("NVREG_THREADS", "3", 1);
    FlimImage c = synthesize_flim(ems, 100.0, 5000.0, 99, g);
    unsetenv("NVREG_THREADS");
    CHECK(c.counts == a.counts);

    FlimImage d = synthesize_flim(ems, 100.0, 5000.0, 100, g);
    CHECK(d.counts != a.counts);

    for (double v : a.counts) CHECK(v == std::floor(v));  // integer photon counts

    double mean = 0;
    const int nseeds = 30;
    for (int s = 0; s < nseeds; ++s)
        mean += total_counts(synthesize_flim(ems, 100.0, 5000.0, 500 + s, g)) / nseeds;
    CHECK(mean == Approx(5000.0).epsilon(1e-2));
}

TEST_CASE("synthesize_flim: argument validation") {
    CHECK_THROWS_AS(synthesize_flim({}, 100.0, 100.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(synthesize_flim({emitter(0, 0, 11.0)}, 0.0, 100.0, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(synthesize_flim({emitter(0, 0, -1.0)}, 100.0, 100.0, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(synthesize_flim({emitter(0, 0, 11.0, 0.0)}, 100.0, 100.0, 0),
                    std::invalid_argument);
    // emitter so far off the grid that its spot underflows everywhere
    CHECK_THROWS_AS(synthesize_flim({emitter(1e7, 1e7, 11.0)}, 100.0, 100.0, 0),
                    std::invalid_argument);
}

TEST_CASE("flim files: integer stacks round-trip exactly, junk is rejected") {
    FlimGrid g = small_grid();
    FlimImage img = synthesize_flim({emitter(10, -20, 11.0)}, 80.0, 800.0, 7, g);
    std::string path = "/tmp/nvreg_optics_roundtrip.flim";
    save_flim(img, path);
    FlimImage back = load_flim(path);
    CHECK(back.grid.width == g.width);
    CHECK(back.grid.height == g.height);
    CHECK(back.grid.pitch_nm == g.pitch_nm);
    CHECK(back.grid.bins == g.bins);
    CHECK(back.grid.bin_ns == g.bin_ns);
    CHECK(back.counts == img.counts);
    std::remove(path.c_str());

    auto reject = [](const char* tag, const char* text) {
        std::string p = std::string("/tmp/nvreg_optics_") + tag + ".flim";
        std::ofstream(p) << text;
        CHECK_THROWS_AS(load_flim(p), ConfigError);
        std::remove(p.c_str());
    };
    CHECK_THROWS_AS(load_flim("/tmp/nvreg_no_such.flim"), ConfigError);
    reject("tag", "blim 2 2 25 4 0.4\n1 1 1 1\n1 1 1 1\n1 1 1 1\n1 1 1 1\n");
    reject("dims", "flim 0 2 25 4 0.4\n");
    reject("trunc", "flim 2 2 25 4 0.4\n1 1 1 1\n1 1 1 1\n1 1\n");
    reject("neg", "flim 1 1 25 4 0.4\n1 1 -1 1\n");
}

TEST_CASE("fit_amplitudes: separates two lifetimes exactly without noise") {
    FlimGrid g;
    std::vector<EmitterModel> ems{emitter(-30, 0, 11.0, 1.0), emitter(30, 0, 20.0, 0.7)};
    FlimImage img = synthesize_flim(ems, 100.0, -20000.0, 0, g);
    AmplitudePair amps = fit_amplitudes(img, 11.0, 20.0);
    CHECK(amps.a1.values.sum() == Approx(20000.0).epsilon(1e-9));
    CHECK(amps.a2.values.sum() == Approx(20000.0 * 0.7).epsilon(1e-9));
    CHECK(amps.a1.values.minCoeff() >= 0);
    CHECK(amps.a2.values.minCoeff() >= 0);
    CHECK(amps.a1.pitch_nm == g.pitch_nm);

    // each component peaks over its own emitter (left vs right half)
    Eigen::Index y1, x1, y2, x2;
    amps.a1.values.maxCoeff(&y1, &x1);
    amps.a2.values.maxCoeff(&y2, &x2);
    CHECK(x1 < g.width / 2);
    CHECK(x2 > g.width / 2);

    CHECK_THROWS_AS(fit_amplitudes(img, 0.0, 20.0), std::invalid_argument);
    CHECK_THROWS_AS(fit_amplitudes(img, 11.0, -3.0), std::invalid_argument);
    CHECK_THROWS_AS(fit_amplitudes(img, 11.0, 11.0), std::invalid_argument);
}

TEST_CASE("fit_amplitudes: photon attribution survives shot noise within 5%") {
    FlimGrid g;
    std::vector<EmitterModel> ems{emitter(-30, 0, 11.0, 1.0), emitter(30, 0, 20.0, 0.7)};
    FlimImage img = synthesize_flim(ems, 100.0, 20000.0, 5, g);
    AmplitudePair amps = fit_amplitudes(img, 11.0, 20.0);
    CHECK(amps.a1.values.sum() == Approx(20000.0).epsilon(5e-2));
    CHECK(amps.a2.values.sum() == Approx(20000.0 * 0.7).epsilon(5e-2));
}

TEST_CASE("fit_amplitudes: amplitudes never go negative") {
    FlimGrid g = small_grid();
    g.width = 8;
    g.height = 1;
    FlimImage img;
    img.grid = g;
    img.counts.assign(static_cast<size_t>(g.width) * g.height * g.bins, 0.0);
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> uni(0, 1);
    for (int b = 0; b < g.bins; ++b) {
        img.at(0, 0, b) = b == g.bins - 1 ? 1.0 : 0.0;  // all-late spike
        img.at(1, 0, b) = b == 0 ? 1.0 : 0.0;           // all-early spike
        for (int x = 2; x < g.width; ++x) img.at(x, 0, b) = uni(rng);
    }
    AmplitudePair amps = fit_amplitudes(img, 11.0, 20.0);
    CHECK(amps.a1.values.minCoeff() >= 0);
    CHECK(amps.a2.values.minCoeff() >= 0);
    // the late spike is carried by the longer-lifetime component
    CHECK(amps.a2.values(0, 0) > amps.a1.values(0, 0));
}

TEST_CASE("correlate_displacement: exact on noiseless shifts, antisymmetric") {
    FlimGrid g;
    auto amp_at = [&](double x_nm, double y_nm) {
        FlimImage img = synthesize_flim({emitter(x_nm, y_nm, 11.0)}, 100.0, -20000.0, 0, g);
        return fit_amplitudes(img, 11.0, 20.0).a1;
    };
    AmplitudeImage base = amp_at(0, 0);

    DisplacementEstimate self = correlate_displacement(base, base);
    REQUIRE(self.ok);
    CHECK(std::abs(self.delta_nm.x()) < 1e-9);
    CHECK(std::abs(self.delta_nm.y()) < 1e-9);

    // whole-pixel move: two pixels right, one up
    DisplacementEstimate shift = correlate_displacement(base, amp_at(50, 25));
    REQUIRE(shift.ok);
    CHECK(shift.delta_nm.x() == Approx(50.0).epsilon(1e-2));
    CHECK(shift.delta_nm.y() == Approx(25.0).epsilon(1e-2));
    CHECK(shift.uncertainty_nm > 0);

    // sub-pixel move: the correlation of two Gaussian spots is Gaussian, so
    // the three-point log-parabola lands on the true offset
    DisplacementEstimate sub = correlate_displacement(base, amp_at(8, -6));
    REQUIRE(sub.ok);
    CHECK(sub.delta_nm.x() == Approx(8.0).epsilon(2e-2));
    CHECK(sub.delta_nm.y() == Approx(-6.0).epsilon(2e-2));

    DisplacementEstimate rev = correlate_displacement(amp_at(8, -6), base);
    REQUIRE(rev.ok);
    CHECK(rev.delta_nm.x() == Approx(-sub.delta_nm.x()).epsilon(1e-6));
    CHECK(rev.delta_nm.y() == Approx(-sub.delta_nm.y()).epsilon(1e-6));
}

TEST_CASE("correlate_displacement: empty frames and mismatched grids are flagged") {
    AmplitudeImage blank;
    blank.width = 8;
    blank.height = 8;
    blank.pitch_nm = 25;
    blank.values = Eigen::MatrixXd::Zero(8, 8);
    DisplacementEstimate est = correlate_displacement(blank, blank);
    CHECK_FALSE(est.ok);

    AmplitudeImage other = blank;
    other.width = 9;
    other.values = Eigen::MatrixXd::Zero(8, 9);
    CHECK_THROWS_AS(correlate_displacement(blank, other), std::invalid_argument);

    AmplitudeImage tiny = blank;
    tiny.width = 1;
    tiny.height = 1;
    tiny.values = Eigen::MatrixXd::Ones(1, 1);
    CHECK_THROWS_AS(correlate_displacement(tiny, tiny), std::invalid_argument);
}

TEST_CASE("correlate_displacement: unbiased through photon noise at 8 nm") {
    FlimGrid g;
    double mean_x = 0, mean_y = 0;
    const int nseeds = 50;
    for (int s = 0; s < nseeds; ++s) {
        FlimImage i1 =
            synthesize_flim({emitter(0, 0, 11.0)}, 100.0, 20000.0, 2 * s, g);
        FlimImage i2 =
            synthesize_flim({emitter(8, 0, 11.0)}, 100.0, 20000.0, 2 * s + 1, g);
        DisplacementEstimate est = correlate_displacement(fit_amplitudes(i1, 11.0, 20.0).a1,
                                                          fit_amplitudes(i2, 11.0, 20.0).a1);
        REQUIRE(est.ok);
        CHECK(std::abs(est.delta_nm.x() - 8.0) < 6.0);
        CHECK(std::abs(est.delta_nm.y()) < 6.0);
        mean_x += est.delta_nm.x() / nseeds;
        mean_y += est.delta_nm.y() / nseeds;
    }
    CHECK(std::abs(mean_x - 8.0) < 0.5);
    CHECK(std::abs(mean_y) < 0.5);
}

TEST_CASE("amplitude CSV: header plus one row per scan line") {
    AmplitudeImage img;
    img.width = 3;
    img.height = 2;
    img.pitch_nm = 25;
    img.values = Eigen::MatrixXd::Zero(2, 3);
    img.values << 1, 2.5, 3, 4, 5, 6.25;
    std::string path = "/tmp/nvreg_optics_amp.csv";
    save_amplitude_csv(img, path);

    std::ifstream in(path);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line[0] == '#');
    CHECK(line.find("3x2") != std::string::npos);
    REQUIRE(std::getline(in, line));
    CHECK(line == "1,2.5,3");
    REQUIRE(std::getline(in, line));
    CHECK(line == "4,5,6.25");
    CHECK_FALSE(std::getline(in, line));
    std::remove(path.c_str());
}

TEST_CASE("g2_zero: photon antibunching floor 1 - 1/n") {
    CHECK(g2_zero(1) == 0.0);
    CHECK(g2_zero(2) == 0.5);
    CHECK(g2_zero(3) == Approx(2.0 / 3).epsilon(1e-15));
    CHECK(g2_zero(1000) == Approx(1.0).epsilon(2e-3));
    CHECK_THROWS_AS(g2_zero(0), std::domain_error);
    CHECK_THROWS_AS(g2_zero(-2), std::domain_error);
}

TEST_CASE("gsd_resolution: square-root pump-ratio narrowing") {
    CHECK(gsd_resolution(250.0, 156.0) == Approx(250.0 / std::sqrt(156.0)).epsilon(1e-15));
    CHECK(gsd_resolution(250.0, 156.0) == Approx(20.016).epsilon(1e-3));
    CHECK(gsd_resolution(250.0, 4.0) == Approx(125.0).epsilon(1e-15));
    CHECK(gsd_resolution(250.0, 100.0) < gsd_resolution(250.0, 10.0));
    CHECK_THROWS_AS(gsd_resolution(0.0, 4.0), std::domain_error);
    CHECK_THROWS_AS(gsd_resolution(250.0, 0.0), std::domain_error);
}
