// nvreg: simulate pulse sequences on a coupled pair of S=1 centers, fit
// partner geometry from DEER data, and run the optical companion pipeline.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "nvreg/config.hpp"
#include "nvreg/dynamics.hpp"
#include "nvreg/errors.hpp"
#include "nvreg/locate.hpp"
#include "nvreg/measure.hpp"
#include "nvreg/optics.hpp"
#include "nvreg/sequences.hpp"
#include "nvreg/spincore.hpp"
#include "nvreg/util.hpp"

using namespace nvreg;

namespace {

struct Common {
    std::string config, out;
    long long seed = -1;
    bool to_stdout = false;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "configuration (or input) file");
    cmd->add_option("--out", c.out, "output path");
    cmd->add_option("--seed", c.seed, "seed override");
    cmd->add_flag("--stdout", c.to_stdout, "write result data to stdout");
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Config need_config(const Common& c) {
    if (c.config.empty()) throw ConfigError("--config is required");
    return Config::load(c.config);
}

SpinPairSystem system_from(const Config& cfg) {
    SpinPairSystem sys;
    sys.center_a.axis = cfg.has("system", "axis_a") ? cfg.vector3("system", "axis_a").normalized()
                                                    : Vec3(0, 0, 1);
    sys.center_b.axis = cfg.has("system", "axis_b") ? cfg.vector3("system", "axis_b").normalized()
                                                    : Vec3(0, 0, 1);
    sys.center_a.D = cfg.quantity_or("system", "d_a", kDefaultD);
    sys.center_b.D = cfg.quantity_or("system", "d_b", kDefaultD);
    sys.center_a.E = cfg.quantity_or("system", "e_a", 0);
    sys.center_b.E = cfg.quantity_or("system", "e_b", 0);
    sys.displacement = cfg.vector3("system", "displacement");
    return sys;
}

FieldSetting field_from(const Config& cfg) {
    FieldSetting f;
    if (cfg.has("field", "b")) f.B = cfg.vector3("field", "b");
    return f;
}

DecoherenceParams dec_from(const Config& cfg) {
    DecoherenceParams dec;
    if (cfg.has("decoherence", "t2_a")) dec.t2_a = cfg.quantity("decoherence", "t2_a");
    if (cfg.has("decoherence", "t2_b")) dec.t2_b = cfg.quantity("decoherence", "t2_b");
    if (cfg.has("decoherence", "t2star_a")) dec.t2star_a = cfg.quantity("decoherence", "t2star_a");
    if (cfg.has("decoherence", "t2star_b")) dec.t2star_b = cfg.quantity("decoherence", "t2star_b");
    dec.t2star_samples = static_cast<int>(cfg.quantity_or("decoherence", "samples", 201));
    return dec;
}

ReadoutModel readout_from(const Config& cfg) {
    ReadoutModel m;
    m.contrast = cfg.quantity_or("readout", "contrast", 0.3);
    if (cfg.has("readout", "photon_budget"))
        m.photon_budget = cfg.quantity("readout", "photon_budget");
    std::string norm = cfg.get_or("readout", "normalization", "none");
    if (norm == "spinflip" || norm == "spin-flip")
        m.normalization = Normalization::SpinFlip;
    else if (norm != "none")
        throw ConfigError("config [readout] normalization: expected none or spinflip");
    return m;
}

PulseProgram sequence_from(const Config& cfg) {
    if (cfg.has("sequence", "file")) return parse_program(slurp(cfg.get("sequence", "file")));
    SequenceParams p;
    p.tau = cfg.quantity_or("sequence", "tau", 0);
    p.sweep_start = cfg.quantity_or("sequence", "sweep_start", 0);
    p.sweep_stop = cfg.quantity_or("sequence", "sweep_stop", 0);
    p.sweep_points = static_cast<int>(cfg.quantity_or("sequence", "points", 256));
    p.m_from = static_cast<int>(cfg.quantity_or("sequence", "m_from", 0));
    p.m_to = static_cast<int>(cfg.quantity_or("sequence", "m_to", -1));
    p.detuning_hz = cfg.quantity_or("sequence", "detuning", 0);
    if (cfg.has("sequence", "partner_prep"))
        p.partner_prep = static_cast<int>(cfg.quantity("sequence", "partner_prep"));
    p.detuned_control = cfg.flag("sequence", "detuned_control", false);
    p.control_rabi_hz = cfg.quantity_or("sequence", "control_rabi", 5e6);
    p.control_detuning_hz = cfg.quantity_or("sequence", "control_detuning", 1e8);
    p.sweep_tau = cfg.flag("sequence", "sweep_tau", false);
    return build_named(cfg.get("sequence", "name"), p);
}

uint64_t resolve_seed(const Config& cfg, const Common& c, bool noise_on) {
    if (c.seed >= 0) return static_cast<uint64_t>(c.seed);
    if (cfg.has("run", "seed")) return static_cast<uint64_t>(cfg.number("run", "seed"));
    if (noise_on) throw ConfigError("shot noise requires a seed ([run] seed or --seed)");
    return 0;
}

std::vector<std::string> echo_header(const Config& cfg, const std::string& command,
                                     uint64_t seed) {
    std::vector<std::string> lines;
    lines.push_back(std::string("nvreg ") + kVersion);
    lines.push_back("command = " + command);
    lines.push_back("seed = " + std::to_string(seed));
    for (const auto& [s, k, v] : cfg.items()) lines.push_back("config " + s + "." + k + " = " + v);
    return lines;
}

void emit(const Common& c, const std::string& fallback_name, const std::string& payload) {
    std::string path = c.out.empty() ? fallback_name : c.out;
    if (c.to_stdout) {
        std::cout << payload;
    }
    if (!c.to_stdout || !c.out.empty()) {
        std::ofstream out(path);
        if (!out) throw ConfigError("cannot write '" + path + "'");
        out << payload;
    }
}

int cmd_run(const Common& c) {
    Config cfg = need_config(c);
    SpinPairSystem sys = system_from(cfg);
    FieldSetting field = field_from(cfg);
    DecoherenceParams dec = dec_from(cfg);
    ReadoutModel model = readout_from(cfg);
    PulseProgram prog = sequence_from(cfg);
    uint64_t seed = resolve_seed(cfg, c, model.photon_budget.has_value());
    RunOptions opt;
    opt.p0_a = cfg.quantity_or("init", "p0_a", 1.0);
    opt.p0_b = cfg.quantity_or("init", "p0_b", 1.0);
    PhysicalConstants pc;
    SignalTrace trace = run_program(prog, sys, field, dec, pc, model, seed, opt);
    std::ostringstream out;
    write_trace_csv(out, trace, echo_header(cfg, "run", seed));
    emit(c, cfg.get_or("run", "out", "trace.csv"), out.str());
    return 0;
}

int cmd_fidelity(const Common& c) {
    Config cfg = need_config(c);
    SpinPairSystem sys = system_from(cfg);
    FieldSetting field = field_from(cfg);
    PhysicalConstants pc;
    DeerFrequencies df = deer_frequencies(sys, field, pc);
    if (df.dnu1 <= 0) throw ConfigError("fidelity: coupling is not resolvable");
    SequenceParams sp;
    sp.tau = cfg.quantity_or("fidelity", "tau", 1.0 / (2.0 * df.dnu1));
    PulseProgram prog = build_named(cfg.get_or("fidelity", "sequence", "entangle_phi"), sp);

    // target: the decoherence-free output of the same sequence
    QuantumState ideal = state_probe(prog, prog.events.size(), sys, field, {}, pc);
    Eigen::SelfAdjointEigenSolver<Mat9> es(ideal.rho);
    Vec9 target = es.eigenvectors().col(8);

    std::vector<double> t2s;
    for (const auto& tok : split(cfg.get("fidelity", "t2_list"), ','))
        t2s.push_back(parse_quantity(trim(tok)));

    std::ostringstream out;
    for (const auto& line : echo_header(cfg, "fidelity", 0)) out << "# " << line << "\n";
    char buf[80];
    std::snprintf(buf, sizeof buf, "# tau = %.17g\n", sp.tau);
    out << buf << "t2_s,fidelity\n";
    for (double t2 : t2s) {
        if (t2 <= 0) throw ConfigError("fidelity: t2 values must be > 0");
        DecoherenceParams dec;
        dec.t2_a = t2;
        dec.t2_b = t2;
        QuantumState st = state_probe(prog, prog.events.size(), sys, field, dec, pc);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", t2, fidelity(st, target));
        out << buf;
    }
    emit(c, "fidelity.csv", out.str());
    return 0;
}

bool looks_like_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::string line;
    while (std::getline(in, line)) {
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        return s == "bx_T,by_T,bz_T,observable,value_hz,sigma_hz";
    }
    return false;
}

int cmd_fit(const Common& c) {
    if (c.config.empty()) throw ConfigError("--config is required");
    Config cfg;
    std::string dataset_path = c.config;
    if (!looks_like_dataset(c.config)) {
        cfg = Config::load(c.config);
        dataset_path = cfg.get("fit", "dataset");
    }
    DeerDataset data = load_deer_csv(dataset_path);
    if (data.entries.size() < 4)
        throw ConfigError("insufficient data: need at least 4 entries, got " +
                          std::to_string(data.entries.size()));
    FitOptions opt;
    opt.d_a = cfg.quantity_or("fit", "d_a", kDefaultD);
    opt.d_b = cfg.quantity_or("fit", "d_b", kDefaultD);
    opt.e_a = cfg.quantity_or("fit", "e_a", 0);
    opt.e_b = cfg.quantity_or("fit", "e_b", 0);
    double scale = cfg.quantity_or("fit", "site_scale", 1.0);

    GeometryEstimate est = fit_geometry(data, {}, opt);

    std::vector<LatticeSite> sites;
    try {
        Ellipsoid region{est.displacement, est.covariance, scale};
        region.covariance += Eigen::Matrix3d::Identity() * 1e-22;  // (0.01 nm)^2 floor
        sites = enumerate_sites(region);
    } catch (const std::invalid_argument&) {
        // degenerate covariance: leave the site list empty
    }

    std::ostringstream rep;
    for (const auto& line : echo_header(cfg, "fit", 0)) rep << "# " << line << "\n";
    char buf[256];
    Vec3 d = est.displacement;
    std::snprintf(buf, sizeof buf, "displacement_nm = %.6f %.6f %.6f\n", d.x() * 1e9,
                  d.y() * 1e9, d.z() * 1e9);
    rep << buf;
    std::snprintf(buf, sizeof buf, "distance_nm = %.6f\n", d.norm() * 1e9);
    rep << buf;
    std::snprintf(buf, sizeof buf, "sigma_nm = %.6f %.6f %.6f\n",
                  std::sqrt(std::max(est.covariance(0, 0), 0.0)) * 1e9,
                  std::sqrt(std::max(est.covariance(1, 1), 0.0)) * 1e9,
                  std::sqrt(std::max(est.covariance(2, 2), 0.0)) * 1e9);
    rep << buf;
    std::snprintf(buf, sizeof buf, "axis_a = %.6f %.6f %.6f\n", est.axes.axis_a.x(),
                  est.axes.axis_a.y(), est.axes.axis_a.z());
    rep << buf;
    std::snprintf(buf, sizeof buf, "axis_b = %.6f %.6f %.6f\n", est.axes.axis_b.x(),
                  est.axes.axis_b.y(), est.axes.axis_b.z());
    rep << buf;
    std::snprintf(buf, sizeof buf, "residual_chi2 = %.6g\n", est.residual);
    rep << buf;
    std::snprintf(buf, sizeof buf, "axis_margin_chi2 = %.6g\n", est.axis_margin);
    rep << buf;
    std::snprintf(buf, sizeof buf, "mirror_displacement_nm = %.6f %.6f %.6f\n",
                  est.mirror_displacement.x() * 1e9, est.mirror_displacement.y() * 1e9,
                  est.mirror_displacement.z() * 1e9);
    rep << buf;
    std::snprintf(buf, sizeof buf, "candidate_sites = %zu\n", sites.size());
    rep << buf;

    std::string base = c.out.empty() ? "fit_report.txt" : c.out;
    emit(c, base, rep.str());
    std::ofstream sf(base + ".sites.csv");
    sf << "n1,n2,n3,basis,x_nm,y_nm,z_nm,mahalanobis\n";
    for (const auto& s : sites) {
        std::snprintf(buf, sizeof buf, "%d,%d,%d,%d,%.6f,%.6f,%.6f,%.4f\n", s.cell[0], s.cell[1],
                      s.cell[2], s.basis, s.position.x() * 1e9, s.position.y() * 1e9,
                      s.position.z() * 1e9, s.mahalanobis);
        sf << buf;
    }
    return 0;
}

int cmd_flim(const Common& c) {
    Config cfg = need_config(c);
    double tau1 = cfg.quantity_or("flim", "lifetime1", 11e-9) * 1e9;  // ns
    double tau2 = cfg.quantity_or("flim", "lifetime2", 7e-9) * 1e9;
    FlimImage img;
    if (cfg.flag("flim", "synthesize", false)) {
        FlimGrid grid;
        grid.width = static_cast<int>(cfg.quantity_or("flim", "width", 64));
        grid.height = static_cast<int>(cfg.quantity_or("flim", "height", 64));
        grid.pitch_nm = cfg.quantity_or("flim", "pitch", 25e-9) * 1e9;
        grid.bins = static_cast<int>(cfg.quantity_or("flim", "bins", 64));
        grid.bin_ns = cfg.quantity_or("flim", "bin", 0.4e-9) * 1e9;
        double d_nm = cfg.quantity_or("flim", "d", 8e-9) * 1e9;
        double photons = cfg.quantity_or("flim", "photons", 1e5);
        double psf_nm = cfg.quantity_or("flim", "psf_fwhm", 250e-9) * 1e9;
        uint64_t seed = c.seed >= 0 ? static_cast<uint64_t>(c.seed)
                        : cfg.has("flim", "seed")
                            ? static_cast<uint64_t>(cfg.number("flim", "seed"))
                            : (photons > 0 ? throw ConfigError(
                                                 "shot noise requires a seed ([flim] seed or "
                                                 "--seed)")
                                           : 0);
        EmitterModel e1{{-d_nm / 2, 0}, tau1, 1.0};
        EmitterModel e2{{d_nm / 2, 0}, tau2, 1.0};
        img = synthesize_flim({e1, e2}, psf_nm, photons, seed, grid);
    } else {
        img = load_flim(cfg.get("flim", "image"));
    }
    AmplitudePair amp = fit_amplitudes(img, tau1, tau2);
    DisplacementEstimate est = correlate_displacement(amp.a1, amp.a2);

    std::string base = c.out.empty() ? "flim" : c.out;
    save_amplitude_csv(amp.a1, base + "_a1.csv");
    save_amplitude_csv(amp.a2, base + "_a2.csv");
    std::ostringstream rep;
    for (const auto& line : echo_header(cfg, "flim", 0)) rep << "# " << line << "\n";
    char buf[160];
    std::snprintf(buf, sizeof buf, "displacement_nm = %.4f %.4f\n", est.delta_nm.x(),
                  est.delta_nm.y());
    rep << buf;
    std::snprintf(buf, sizeof buf, "magnitude_nm = %.4f\n", est.delta_nm.norm());
    rep << buf;
    std::snprintf(buf, sizeof buf, "uncertainty_nm = %.4f\n", est.uncertainty_nm);
    rep << buf;
    rep << "peak_found = " << (est.ok ? "yes" : "no") << "\n";
    emit(c, base + "_report.txt", rep.str());
    if (!c.to_stdout) std::cerr << rep.str();
    return 0;
}

int cmd_parse(const Common& c) {
    if (c.config.empty()) throw ConfigError("--config is required (DSL program path)");
    PulseProgram prog = parse_program(slurp(c.config));
    std::ostringstream out;
    out << "# nvreg " << kVersion << "\n# events = " << prog.events.size() << "\n"
        << render_program(prog);
    if (c.to_stdout)
        std::cout << out.str();
    else
        std::cerr << "ok: " << prog.events.size() << " events\n";
    if (!c.out.empty()) {
        std::ofstream f(c.out);
        f << out.str();
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coupled S=1 pair simulator and localization toolkit"};
    app.require_subcommand(1);
    Common c;
    auto* run = app.add_subcommand("run", "simulate a pulse sequence, write the trace CSV");
    auto* fit = app.add_subcommand("fit", "fit partner geometry from a DEER dataset");
    auto* flim = app.add_subcommand("flim", "lifetime-image pipeline: amplitudes + displacement");
    auto* fidelity = app.add_subcommand("fidelity", "Bell-state fidelity versus T2");
    auto* parse = app.add_subcommand("parse", "check a pulse-program file");
    for (auto* cmd : {run, fit, flim, fidelity, parse}) add_common(cmd, c);
    CLI11_PARSE(app, argc, argv);
    try {
        if (run->parsed()) return cmd_run(c);
        if (fit->parsed()) return cmd_fit(c);
        if (flim->parsed()) return cmd_flim(c);
        if (fidelity->parsed()) return cmd_fidelity(c);
        if (parse->parsed()) return cmd_parse(c);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const LabelingError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const FitError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
