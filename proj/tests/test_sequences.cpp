// Pulse-program DSL (parser, renderer, validation), named sequence templates,
// and the sweep engine: fringes, echoes, conditional-phase traces, shot-noise
// determinism and error propagation.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>

#include "nvreg/measure.hpp"
#include "oracles.hpp"

using namespace nvreg;
using doctest::Approx;

namespace {

SpinPairSystem tilted_pair() {
    SpinPairSystem sys;
    sys.center_b.axis = Vec3(std::sin(2 * M_PI / 180), 0, std::cos(2 * M_PI / 180));
    sys.center_b.D = 3.87e9;
    sys.displacement = Vec3(10.742231e-9, 0, 0);
    return sys;
}

const FieldSetting kField{Vec3(0, 0, 30e-4)};
const PhysicalConstants kPc{};

ReadoutModel clean_readout() {
    ReadoutModel m;
    m.normalization = Normalization::SpinFlip;
    return m;
}

int parse_error_line(const std::string& text) {
    try {
        parse_program(text);
    } catch (const ParseError& e) {
        return e.line;
    }
    return -1;
}

}  // namespace

TEST_CASE("parser: full statement set round-trips into the expected events") {
    PulseProgram p = parse_program(
        "# conditional-phase scan\n"
        "init\n"
        "pulse A 0:-1 pi/2\n"
        "wait t\n"
        "pulse B 0:+1 pi phase=1.25 rabi=5MHz\n"
        "wait 3.5us\n"
        "pulse A 0:-1 pi/2 phase=-0.5\n"
        "read A\n"
        "sweep t 0ns 20us 101\n");
    REQUIRE(p.events.size() == 7);
    CHECK(std::holds_alternative<InitEvent>(p.events[0]));

    const auto& half = std::get<PulseEvent>(p.events[1]).action;
    CHECK(half.target == Spin::A);
    CHECK(half.m_from == 0);
    CHECK(half.m_to == -1);
    CHECK(half.angle == Approx(M_PI / 2).epsilon(1e-15));
    CHECK(half.mode == PulseMode::Ideal);

    const auto& sym = std::get<WaitEvent>(p.events[2]);
    CHECK(sym.kind == WaitEvent::Kind::Symbol);
    CHECK(sym.symbol == "t");

    const auto& drive = std::get<PulseEvent>(p.events[3]).action;
    CHECK(drive.target == Spin::B);
    CHECK(drive.m_to == +1);
    CHECK(drive.phase == Approx(1.25).epsilon(1e-15));
    CHECK(drive.mode == PulseMode::Rabi);
    CHECK(drive.rabi_hz == Approx(5e6).epsilon(1e-15));

    const auto& lit = std::get<WaitEvent>(p.events[4]);
    CHECK(lit.kind == WaitEvent::Kind::Literal);
    CHECK(lit.seconds == Approx(3.5e-6).epsilon(1e-15));

    CHECK(std::get<PulseEvent>(p.events[5]).action.phase == Approx(-0.5).epsilon(1e-15));
    CHECK(std::get<ReadEvent>(p.events[6]).spin == Spin::A);

    REQUIRE(p.sweep.has_value());
    CHECK(p.sweep->variable == "t");
    CHECK(p.sweep->start == 0.0);
    CHECK(p.sweep->stop == Approx(20e-6).epsilon(1e-15));
    CHECK(p.sweep->points == 101);
    CHECK(p.frame == Frame::PartnerZero);
}

TEST_CASE("parser: duration and angle notations") {
    PulseProgram p = parse_program(
        "init; pulse A 0:-1 -pi/4; wait 250ns; pulse A -1:+1 1.5; wait 2ms; wait 0.25; read B");
    CHECK(std::get<PulseEvent>(p.events[1]).action.angle == Approx(-M_PI / 4).epsilon(1e-15));
    CHECK(std::get<WaitEvent>(p.events[2]).seconds == Approx(250e-9).epsilon(1e-15));
    CHECK(std::get<PulseEvent>(p.events[3]).action.m_from == -1);
    CHECK(std::get<PulseEvent>(p.events[3]).action.angle == Approx(1.5).epsilon(1e-15));
    CHECK(std::get<WaitEvent>(p.events[4]).seconds == Approx(2e-3).epsilon(1e-15));
    CHECK(std::get<WaitEvent>(p.events[5]).seconds == Approx(0.25).epsilon(1e-15));
    CHECK(std::get<ReadEvent>(p.events[6]).spin == Spin::B);
}

TEST_CASE("parser: malformed statements raise positioned errors") {
    // the bad token's position is carried on the exception
    try {
        parse_program("init\npulse C 0:-1 pi\nread A");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
        CHECK(e.col == 7);
        CHECK(std::string(e.what()).find("unknown spin") != std::string::npos);
        CHECK(std::string(e.what()).find("line 2:7") != std::string::npos);
    }

    CHECK(parse_error_line("init\npulse A 0:2 pi\nread A") == 2);        // bad level
    CHECK(parse_error_line("init\npulse A 0 pi\nread A") == 2);          // bad transition
    CHECK(parse_error_line("init\npulse A 0:0 pi\nread A") == 2);        // equal levels
    CHECK(parse_error_line("init\npulse A 0:-1 twopi\nread A") == 2);    // bad angle
    CHECK(parse_error_line("init\npulse A 0:-1 pi/0\nread A") == 2);     // bad divisor
    CHECK(parse_error_line("init\npulse A 0:-1\nread A") == 2);          // missing angle
    CHECK(parse_error_line("init\nwait 5xs\nread A") == 2);              // bad duration
    CHECK(parse_error_line("init\nwait -5us\nread A") == 2);             // negative wait
    CHECK(parse_error_line("init\nread A extra") == 2);                  // trailing garbage
    CHECK(parse_error_line("init\nflip A\nread A") == 2);                // unknown statement
    CHECK(parse_error_line("init\npulse A 0:-1 pi phase=abc\nread A") == 2);
    CHECK(parse_error_line("init\npulse A 0:-1 pi rabi=0Hz\nread A") == 2);
    CHECK(parse_error_line("init\nread A\nsweep t 0 1us 4\nsweep u 0 1us 4") == 4);
    CHECK(parse_error_line("init\nread A\nsweep t 0 1us 2.5") == 3);     // fractional points
    CHECK(parse_error_line("init\nread A\nsweep 2t 0 1us 4") == 3);      // bad variable
}

TEST_CASE("parser: structural validation reports on line 1") {
    CHECK(parse_error_line("init") == 1);                          // no readout
    CHECK(parse_error_line("init\nread A\nread A") == 1);          // readout not last
    CHECK(parse_error_line("init\nwait t\nread A") == 1);          // symbol without sweep
    CHECK(parse_error_line("init\nwait x\nread A\nsweep t 0 1us 4") == 1);  // unknown symbol
    CHECK(parse_error_line("init\nwait t\nread A\nsweep t 1us 1us 4") == 1);  // empty range
    CHECK_THROWS_AS(parse_program("init\nwait t\nread A\nsweep t 0 1us 4\nread B"), ParseError);
}

TEST_CASE("renderer: programs survive a render/parse round trip") {
    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 200; ++trial) {
        PulseProgram p = oracles::random_program(rng);
        PulseProgram back = parse_program(render_program(p));
        CHECK(back == p);
    }
}

TEST_CASE("renderer: template-only constructs are rejected") {
    PulseProgram p = parse_program("init\nwait 1us\nread A");

    PulseProgram framed = p;
    framed.frame = Frame::SymmetricZeroMinus;
    CHECK_THROWS_AS(render_program(framed), std::invalid_argument);

    PulseProgram detuned = p;
    detuned.frame_detuning_a = 1e3;
    CHECK_THROWS_AS(render_program(detuned), std::invalid_argument);

    PulseProgram complement = p;
    complement.events[1] = WaitEvent{WaitEvent::Kind::SymbolComplement, 1e-6, "t"};
    complement.sweep = SweepSpec{"t", 0, 1e-6, 4};
    CHECK_THROWS_AS(render_program(complement), std::invalid_argument);

    PulseProgram off_resonant = p;
    PulseAction a;
    a.mode = PulseMode::Rabi;
    a.rabi_hz = 1e6;
    a.detuning_hz = 1e8;
    off_resonant.events.insert(off_resonant.events.begin() + 1, PulseEvent{a});
    CHECK_THROWS_AS(render_program(off_resonant), std::invalid_argument);
}

TEST_CASE("named templates assemble the documented event sequences") {
    SequenceParams p;
    p.sweep_stop = 20e-6;

    CHECK(build_named("ramsey", p).events.size() == 5);
    CHECK(build_named("hahn", p).events.size() == 7);

    SequenceParams prep = p;
    prep.partner_prep = -1;
    PulseProgram ramsey_prep = build_named("ramsey", prep);
    CHECK(ramsey_prep.events.size() == 6);
    const auto& prep_pulse = std::get<PulseEvent>(ramsey_prep.events[1]).action;
    CHECK(prep_pulse.target == Spin::B);
    CHECK(prep_pulse.m_to == -1);
    prep.partner_prep = 0;  // preparing |0> needs no pulse
    CHECK(build_named("ramsey", prep).events.size() == 5);

    SequenceParams deer = p;
    deer.tau = 40e-6;
    deer.sweep_stop = 0;  // defaults to tau
    PulseProgram dp = build_named("deer", deer);
    CHECK(dp.events.size() == 9);
    CHECK(dp.sweep->stop == Approx(40e-6).epsilon(1e-15));
    CHECK(std::get<WaitEvent>(dp.events[2]).kind == WaitEvent::Kind::Literal);
    CHECK(std::get<WaitEvent>(dp.events[4]).kind == WaitEvent::Kind::Symbol);
    CHECK(std::get<WaitEvent>(dp.events[6]).kind == WaitEvent::Kind::SymbolComplement);

    CHECK(build_named("deer_dq", deer).events.size() == 11);
    CHECK(build_named("deer_ddq", deer).events.size() == 15);

    SequenceParams ent;
    ent.tau = 10e-6;
    PulseProgram phi = build_named("entangle_phi", ent);
    CHECK(phi.events.size() == 8);
    CHECK(phi.frame == Frame::SymmetricZeroMinus);
    CHECK_FALSE(phi.sweep.has_value());
    PulseProgram psi = build_named("entangle_psi", ent);
    CHECK(psi.events.size() == 9);

    SequenceParams swept;
    swept.sweep_tau = true;
    swept.sweep_start = 1e-7;
    swept.sweep_stop = 1e-4;
    swept.sweep_points = 41;
    CHECK(build_named("entangle_phi", swept).sweep->points == 41);

    CHECK_THROWS_AS(build_named("deer", SequenceParams{}), std::invalid_argument);
    CHECK_THROWS_AS(build_named("cpmg", p), std::invalid_argument);
}

TEST_CASE("ramsey fringes oscillate at the programmed frame detuning") {
    SequenceParams p;
    p.detuning_hz = 150e3;
    p.sweep_stop = 160e-6;
    p.sweep_points = 256;
    PulseProgram prog = build_named("ramsey", p);
    SignalTrace trace =
        run_program(prog, tilted_pair(), kField, {}, kPc, clean_readout(), 1);
    REQUIRE(trace.values.size() == 256);
    CHECK(trace.abscissa.front() == 0.0);
    CHECK(trace.abscissa.back() == Approx(160e-6).epsilon(1e-12));
    CHECK(trace.name == "ramsey");

    ModulationFit fit = fit_modulation(trace);
    CHECK_FALSE(fit.flat);
    CHECK(fit.frequency == Approx(150e3).epsilon(1e-2));
    CHECK(fit.amplitude == Approx(0.5).epsilon(2e-2));
    CHECK(fit.offset == Approx(0.5).epsilon(2e-2));
}

TEST_CASE("hahn echo is insensitive to the frame detuning that moves ramsey") {
    SequenceParams p;
    p.sweep_stop = 40e-6;
    p.sweep_points = 96;

    SequenceParams detuned = p;
    detuned.detuning_hz = 150e3;

    SignalTrace echo_ref =
        run_program(build_named("hahn", p), tilted_pair(), kField, {}, kPc, clean_readout(), 1);
    SignalTrace echo_det = run_program(build_named("hahn", detuned), tilted_pair(), kField, {},
                                       kPc, clean_readout(), 1);
    double echo_diff = 0;
    for (size_t i = 0; i < echo_ref.values.size(); ++i)
        echo_diff = std::max(echo_diff, std::abs(echo_ref.values[i] - echo_det.values[i]));
    CHECK(echo_diff < 1e-6);

    SignalTrace ram_ref =
        run_program(build_named("ramsey", p), tilted_pair(), kField, {}, kPc, clean_readout(), 1);
    SignalTrace ram_det = run_program(build_named("ramsey", detuned), tilted_pair(), kField, {},
                                      kPc, clean_readout(), 1);
    double ram_diff = 0;
    for (size_t i = 0; i < ram_ref.values.size(); ++i)
        ram_diff = std::max(ram_diff, std::abs(ram_ref.values[i] - ram_det.values[i]));
    CHECK(ram_diff > 0.5);
}

TEST_CASE("hahn echo refocuses the quasi-static detuning bath") {
    SequenceParams p;
    p.sweep_stop = 8e-6;
    p.sweep_points = 64;
    DecoherenceParams bath;
    bath.t2star_a = 1.5e-6;
    bath.t2star_samples = 101;

    SignalTrace echo_clean =
        run_program(build_named("hahn", p), tilted_pair(), kField, {}, kPc, clean_readout(), 5);
    SignalTrace echo_bath = run_program(build_named("hahn", p), tilted_pair(), kField, bath, kPc,
                                        clean_readout(), 5);
    double echo_diff = 0;
    for (size_t i = 0; i < echo_clean.values.size(); ++i)
        echo_diff = std::max(echo_diff, std::abs(echo_clean.values[i] - echo_bath.values[i]));
    CHECK(echo_diff < 1e-6);

    // the same bath collapses ramsey fringes on the T2* scale
    SequenceParams r = p;
    r.detuning_hz = 400e3;
    SignalTrace ram_clean =
        run_program(build_named("ramsey", r), tilted_pair(), kField, {}, kPc, clean_readout(), 5);
    SignalTrace ram_bath = run_program(build_named("ramsey", r), tilted_pair(), kField, bath, kPc,
                                       clean_readout(), 5);
    double ram_diff = 0;
    for (size_t i = 0; i < ram_clean.values.size(); ++i)
        ram_diff = std::max(ram_diff, std::abs(ram_clean.values[i] - ram_bath.values[i]));
    CHECK(ram_diff > 0.3);
}

TEST_CASE("conditional-phase scan modulates at the partner-flip shift") {
    SpinPairSystem sys = tilted_pair();
    DeerFrequencies nu = deer_frequencies(sys, kField, kPc);

    SequenceParams p;
    p.tau = 2.0 / nu.dnu1;
    p.sweep_points = 256;
    SignalTrace trace =
        run_program(build_named("deer", p), sys, kField, {}, kPc, clean_readout(), 1);

    ModulationFit fit = fit_modulation(trace);
    CHECK_FALSE(fit.flat);
    CHECK(fit.frequency == Approx(nu.dnu1).epsilon(5e-3));
    CHECK(fit.amplitude == Approx(0.5).epsilon(5e-2));
    CHECK(fit.residual_rms < 1e-3);  // the trace is a clean cosine
}

TEST_CASE("a far-detuned control pulse leaves the scan flat") {
    SpinPairSystem sys = tilted_pair();
    DeerFrequencies nu = deer_frequencies(sys, kField, kPc);

    SequenceParams p;
    p.tau = 2.0 / nu.dnu1;
    p.sweep_points = 128;
    p.detuned_control = true;  // drive B 100 MHz off resonance
    SignalTrace trace =
        run_program(build_named("deer", p), sys, kField, {}, kPc, clean_readout(), 1);
    double lo = 1e300, hi = -1e300;
    for (double v : trace.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(hi - lo < 0.01);
}

TEST_CASE("shot noise is reproducible per seed and thread-count independent") {
    SpinPairSystem sys = tilted_pair();
    SequenceParams p;
    p.tau = 40e-6;
    p.sweep_points = 48;
    PulseProgram prog = build_named("deer", p);
    ReadoutModel noisy = clean_readout();
    noisy.photon_budget = 2000;

    SignalTrace a = run_program(prog, sys, kField, {}, kPc, noisy, 99);
    SignalTrace b = run_program(prog, sys, kField, {}, kPc, noisy, 99);
    REQUIRE(a.values.size() == b.values.size());
    for (size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == b.values[i]);

    setenv("NVREG_THREADS", "3", 1);
    SignalTrace c = run_program(prog, sys, kField, {}, kPc, noisy, 99);
    setenv("NVREG_THREADS", "1", 1);
    SignalTrace d = run_program(prog, sys, kField, {}, kPc, noisy, 99);
    unsetenv("NVREG_THREADS");
    for (size_t i = 0; i < a.values.size(); ++i) {
        CHECK(a.values[i] == c.values[i]);
        CHECK(a.values[i] == d.values[i]);
    }

    SignalTrace other = run_program(prog, sys, kField, {}, kPc, noisy, 100);
    bool any_differ = false;
    for (size_t i = 0; i < a.values.size(); ++i)
        if (a.values[i] != other.values[i]) any_differ = true;
    CHECK(any_differ);

    // without a photon budget the seed is irrelevant
    SignalTrace n1 = run_program(prog, sys, kField, {}, kPc, clean_readout(), 1);
    SignalTrace n2 = run_program(prog, sys, kField, {}, kPc, clean_readout(), 2);
    for (size_t i = 0; i < n1.values.size(); ++i) CHECK(n1.values[i] == n2.values[i]);
}

TEST_CASE("trace metadata records the run parameters") {
    SequenceParams p;
    p.sweep_stop = 10e-6;
    p.sweep_points = 16;
    SignalTrace t =
        run_program(build_named("ramsey", p), tilted_pair(), kField, {}, kPc, clean_readout(), 7);
    auto find = [&](const std::string& key) -> std::string {
        for (const auto& [k, v] : t.metadata)
            if (k == key) return v;
        return "";
    };
    CHECK(find("sequence") == "ramsey");
    CHECK(find("points") == "16");
    CHECK(find("seed") == "7");
    CHECK(find("shots") == "1");
}

TEST_CASE("state_probe resolves prefixes and rejects bad input") {
    SequenceParams p;
    p.tau = 20e-6;
    PulseProgram prog = build_named("deer", p);
    SpinPairSystem sys = tilted_pair();

    QuantumState full = state_probe(prog, prog.events.size(), sys, kField, {}, kPc, 5e-6);
    CHECK(full.rho.trace().real() == Approx(1.0).epsilon(1e-9));

    // after init plus the first pi/2, spin A carries a coherent superposition
    QuantumState mid = state_probe(prog, 2, sys, kField, {}, kPc, 5e-6);
    CHECK(population(mid, Spin::A, 0) == Approx(0.5).epsilon(1e-9));
    CHECK(population(mid, Spin::A, -1) == Approx(0.5).epsilon(1e-9));

    CHECK_THROWS_AS(state_probe(prog, prog.events.size() + 1, sys, kField, {}, kPc, 5e-6),
                    std::out_of_range);
    CHECK_THROWS_AS(state_probe(prog, prog.events.size(), sys, kField, {}, kPc, std::nullopt),
                    std::invalid_argument);
}

TEST_CASE("a resonant identical pair propagates LabelingError out of the engine") {
    SpinPairSystem resonant;  // equal D on both centers
    resonant.displacement = Vec3(10.742231e-9, 0, 0);
    SequenceParams p;
    p.sweep_stop = 10e-6;
    p.sweep_points = 8;
    CHECK_THROWS_AS(run_program(build_named("ramsey", p), resonant, kField, {}, kPc,
                                clean_readout(), 1),
                    LabelingError);
}
