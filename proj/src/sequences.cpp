#include "nvreg/sequences.hpp"

#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include "nvreg/measure.hpp"
#include "nvreg/util.hpp"

namespace nvreg {

using namespace std::complex_literals;

// ---------------- DSL ----------------

namespace {

struct Tok {
    std::string text;
    int line, col;
};

std::vector<std::vector<Tok>> tokenize(const std::string& text) {
    std::vector<std::vector<Tok>> stmts;
    std::vector<Tok> cur;
    int line = 1, col = 1;
    size_t i = 0;
    auto flush = [&] {
        if (!cur.empty()) {
            stmts.push_back(cur);
            cur.clear();
        }
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == '#') {
            while (i < text.size() && text[i] != '\n') ++i;
            continue;
        }
        if (c == '\n') {
            flush();
            ++line;
            col = 1;
            ++i;
            continue;
        }
        if (c == ';' || c == ' ' || c == '\t' || c == '\r') {
            ++col;
            if (c == ';') flush();
            ++i;
            continue;
        }
        int tcol = col;
        size_t j = i;
        while (j < text.size() && !std::strchr(" \t\r\n;#", text[j])) {
            ++j;
            ++col;
        }
        cur.push_back({text.substr(i, j - i), line, tcol});
        i = j;
    }
    flush();
    return stmts;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

double parse_scaled(const Tok& t, const std::vector<std::pair<std::string, double>>& units,
                    const char* what) {
    for (const auto& [suf, scale] : units) {
        if (t.text.size() > suf.size() && t.text.ends_with(suf)) {
            double v;
            if (parse_double(t.text.substr(0, t.text.size() - suf.size()), v)) return v * scale;
        }
    }
    double v;
    if (parse_double(t.text, v)) return v;
    throw ParseError(t.line, t.col, std::string("bad ") + what + " '" + t.text + "'");
}

double parse_duration(const Tok& t) {
    static const std::vector<std::pair<std::string, double>> units{
        {"ns", 1e-9}, {"us", 1e-6}, {"ms", 1e-3}, {"s", 1.0}};
    return parse_scaled(t, units, "duration");
}

double parse_frequency(const Tok& t) {
    static const std::vector<std::pair<std::string, double>> units{
        {"GHz", 1e9}, {"MHz", 1e6}, {"kHz", 1e3}, {"Hz", 1.0}};
    return parse_scaled(t, units, "frequency");
}

double parse_angle(const Tok& t) {
    std::string s = t.text;
    double sign = 1;
    if (!s.empty() && s[0] == '-') {
        sign = -1;
        s = s.substr(1);
    }
    if (s == "pi") return sign * M_PI;
    if (s.rfind("pi/", 0) == 0) {
        const std::string d = s.substr(3);
        if (!d.empty() && d.find_first_not_of("0123456789") == std::string::npos) {
            long n = std::strtol(d.c_str(), nullptr, 10);
            if (n > 0) return sign * M_PI / static_cast<double>(n);
        }
        throw ParseError(t.line, t.col, "bad angle '" + t.text + "'");
    }
    double v;
    if (parse_double(t.text, v)) return v;
    throw ParseError(t.line, t.col, "bad angle '" + t.text + "'");
}

Spin parse_spin(const Tok& t) {
    if (t.text == "A") return Spin::A;
    if (t.text == "B") return Spin::B;
    throw ParseError(t.line, t.col, "unknown spin '" + t.text + "' (expected A or B)");
}

int parse_m(const Tok& t, const std::string& part) {
    if (part == "-1") return -1;
    if (part == "0") return 0;
    if (part == "+1") return +1;
    throw ParseError(t.line, t.col, "bad level '" + part + "' (expected -1, 0 or +1)");
}

bool is_ident(const std::string& s) {
    if (s.empty() || (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_')) return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

void validate_program(const PulseProgram& p) {
    int reads = 0;
    for (size_t k = 0; k < p.events.size(); ++k) {
        if (std::holds_alternative<ReadEvent>(p.events[k])) {
            ++reads;
            if (k + 1 != p.events.size())
                throw std::invalid_argument("program: readout must be the last event");
        }
        if (const auto* w = std::get_if<WaitEvent>(&p.events[k])) {
            if (w->kind != WaitEvent::Kind::Literal) {
                if (!p.sweep)
                    throw std::invalid_argument("program: symbolic wait without a sweep");
                if (w->symbol != p.sweep->variable)
                    throw std::invalid_argument("program: wait references unknown symbol '" +
                                                w->symbol + "'");
            }
        }
    }
    if (reads != 1) throw std::invalid_argument("program: needs exactly one readout event");
    if (p.sweep) {
        if (p.sweep->points < 1) throw std::invalid_argument("program: sweep needs >= 1 point");
        if (p.sweep->points > 1 && !(p.sweep->stop > p.sweep->start))
            throw std::invalid_argument("program: sweep stop must exceed start");
    }
}

}  // namespace

PulseProgram parse_program(const std::string& text) {
    PulseProgram prog;
    for (const auto& stmt : tokenize(text)) {
        const Tok& head = stmt[0];
        auto want = [&](size_t n) {
            if (stmt.size() < n)
                throw ParseError(head.line, head.col, "'" + head.text + "': missing argument");
        };
        auto done = [&](size_t n) {
            if (stmt.size() > n)
                throw ParseError(stmt[n].line, stmt[n].col,
                                 "trailing garbage '" + stmt[n].text + "'");
        };
        if (head.text == "init") {
            done(1);
            prog.events.emplace_back(InitEvent{});
        } else if (head.text == "pulse") {
            want(4);
            PulseAction a;
            a.target = parse_spin(stmt[1]);
            auto parts = split(stmt[2].text, ':');
            if (parts.size() != 2)
                throw ParseError(stmt[2].line, stmt[2].col,
                                 "bad transition '" + stmt[2].text + "' (expected M:M)");
            a.m_from = parse_m(stmt[2], parts[0]);
            a.m_to = parse_m(stmt[2], parts[1]);
            if (a.m_from == a.m_to)
                throw ParseError(stmt[2].line, stmt[2].col, "transition levels must differ");
            a.angle = parse_angle(stmt[3]);
            size_t k = 4;
            if (k < stmt.size() && starts_with(stmt[k].text, "phase=")) {
                if (!parse_double(stmt[k].text.substr(6), a.phase))
                    throw ParseError(stmt[k].line, stmt[k].col, "bad phase");
                ++k;
            }
            if (k < stmt.size() && starts_with(stmt[k].text, "rabi=")) {
                Tok ft{stmt[k].text.substr(5), stmt[k].line, stmt[k].col};
                a.rabi_hz = parse_frequency(ft);
                if (a.rabi_hz <= 0) throw ParseError(stmt[k].line, stmt[k].col, "rabi must be > 0");
                a.mode = PulseMode::Rabi;
                ++k;
            }
            done(k);
            prog.events.emplace_back(PulseEvent{a});
        } else if (head.text == "wait") {
            want(2);
            done(2);
            WaitEvent w;
            if (is_ident(stmt[1].text)) {
                w.kind = WaitEvent::Kind::Symbol;
                w.symbol = stmt[1].text;
            } else {
                w.kind = WaitEvent::Kind::Literal;
                w.seconds = parse_duration(stmt[1]);
                if (w.seconds < 0)
                    throw ParseError(stmt[1].line, stmt[1].col, "negative duration");
            }
            prog.events.emplace_back(w);
        } else if (head.text == "read") {
            want(2);
            done(2);
            prog.events.emplace_back(ReadEvent{parse_spin(stmt[1])});
        } else if (head.text == "sweep") {
            want(5);
            done(5);
            if (prog.sweep) throw ParseError(head.line, head.col, "multiple sweeps");
            SweepSpec s;
            if (!is_ident(stmt[1].text))
                throw ParseError(stmt[1].line, stmt[1].col, "bad sweep variable");
            s.variable = stmt[1].text;
            s.start = parse_duration(stmt[2]);
            s.stop = parse_duration(stmt[3]);
            double pts;
            if (!parse_double(stmt[4].text, pts) || pts != std::floor(pts) || pts < 1)
                throw ParseError(stmt[4].line, stmt[4].col, "bad point count");
            s.points = static_cast<int>(pts);
            prog.sweep = s;
        } else {
            throw ParseError(head.line, head.col, "unknown statement '" + head.text + "'");
        }
    }
    try {
        validate_program(prog);
    } catch (const std::invalid_argument& e) {
        throw ParseError(1, 1, e.what());
    }
    return prog;
}

namespace {

std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const char* m_token(int m) { return m == -1 ? "-1" : m == 0 ? "0" : "+1"; }

}  // namespace

std::string render_program(const PulseProgram& p) {
    if (p.frame != Frame::PartnerZero || p.frame_detuning_a != 0 || p.frame_detuning_b != 0)
        throw std::invalid_argument("render: template-only frame metadata is not expressible");
    std::ostringstream os;
    for (const auto& ev : p.events) {
        if (std::holds_alternative<InitEvent>(ev)) {
            os << "init\n";
        } else if (const auto* pe = std::get_if<PulseEvent>(&ev)) {
            const PulseAction& a = pe->action;
            if (a.mode == PulseMode::Rabi && a.detuning_hz != 0)
                throw std::invalid_argument("render: pulse detuning is not expressible");
            os << "pulse " << (a.target == Spin::A ? 'A' : 'B') << ' ' << m_token(a.m_from) << ':'
               << m_token(a.m_to) << ' ' << fmt_g(a.angle);
            if (a.phase != 0) os << " phase=" << fmt_g(a.phase);
            if (a.mode == PulseMode::Rabi) os << " rabi=" << fmt_g(a.rabi_hz);
            os << '\n';
        } else if (const auto* w = std::get_if<WaitEvent>(&ev)) {
            if (w->kind == WaitEvent::Kind::SymbolComplement)
                throw std::invalid_argument("render: complement wait is not expressible");
            if (w->kind == WaitEvent::Kind::Symbol)
                os << "wait " << w->symbol << '\n';
            else
                os << "wait " << fmt_g(w->seconds) << '\n';
        } else if (const auto* r = std::get_if<ReadEvent>(&ev)) {
            os << "read " << (r->spin == Spin::A ? 'A' : 'B') << '\n';
        }
    }
    if (p.sweep)
        os << "sweep " << p.sweep->variable << ' ' << fmt_g(p.sweep->start) << ' '
           << fmt_g(p.sweep->stop) << ' ' << p.sweep->points << '\n';
    return os.str();
}

// ---------------- templates ----------------

namespace {

Event pulse(Spin s, int from, int to, double angle, double phase = 0) {
    PulseAction a;
    a.target = s;
    a.m_from = from;
    a.m_to = to;
    a.angle = angle;
    a.phase = phase;
    return PulseEvent{a};
}

Event wait_lit(double sec) { return WaitEvent{WaitEvent::Kind::Literal, sec, ""}; }
Event wait_sym(const std::string& v) { return WaitEvent{WaitEvent::Kind::Symbol, 0, v}; }
Event wait_comp(double total, const std::string& v) {
    return WaitEvent{WaitEvent::Kind::SymbolComplement, total, v};
}

}  // namespace

PulseProgram build_named(const std::string& name, const SequenceParams& p) {
    PulseProgram prog;
    prog.name = name;
    const std::string v = "t";
    const int f = p.m_from, t = p.m_to;
    auto add_prep = [&] {
        if (p.partner_prep && *p.partner_prep != 0)
            prog.events.push_back(pulse(Spin::B, 0, *p.partner_prep, M_PI));
    };
    auto need_tau = [&] {
        if (p.tau <= 0) throw std::invalid_argument(name + ": tau parameter required");
    };
    auto sweep_instant = [&] {
        double stop = p.sweep_stop > 0 ? p.sweep_stop : p.tau;
        prog.sweep = SweepSpec{v, p.sweep_start, stop, p.sweep_points};
    };

    if (name == "ramsey") {
        prog.events = {InitEvent{}};
        add_prep();
        prog.events.push_back(pulse(Spin::A, f, t, M_PI / 2));
        prog.events.push_back(wait_sym(v));
        prog.events.push_back(pulse(Spin::A, f, t, M_PI / 2));
        prog.events.push_back(ReadEvent{Spin::A});
        prog.sweep = SweepSpec{v, p.sweep_start, p.sweep_stop, p.sweep_points};
        prog.frame_detuning_a = p.detuning_hz;
    } else if (name == "hahn") {
        prog.events = {InitEvent{}};
        add_prep();
        prog.events.push_back(pulse(Spin::A, f, t, M_PI / 2));
        prog.events.push_back(wait_sym(v));
        prog.events.push_back(pulse(Spin::A, f, t, M_PI));
        prog.events.push_back(wait_sym(v));
        prog.events.push_back(pulse(Spin::A, f, t, M_PI / 2));
        prog.events.push_back(ReadEvent{Spin::A});
        prog.sweep = SweepSpec{v, p.sweep_start, p.sweep_stop, p.sweep_points};
        prog.frame_detuning_a = p.detuning_hz;
    } else if (name == "deer") {
        need_tau();
        prog.events = {InitEvent{}};
        prog.events.push_back(pulse(Spin::A, f, t, M_PI / 2));
        prog.events.push_back(wait_lit(p.tau));
        prog.events.push_back(pulse(Spin::A, f, t, M_PI));
        prog.events.push_back(wait_sym(v));
        if (p.detuned_control) {
            PulseAction a;
            a.target = Spin::B;
            a.m_from = 0;
            a.m_to = -1;
            a.angle = M_PI;
            a.mode = PulseMode::Rabi;
            a.rabi_hz = p.control_rabi_hz;
            a.detuning_hz = p.control_detuning_hz;
            prog.events.push_back(PulseEvent{a});
        } else {
            prog.events.push_back(pulse(Spin::B, 0, -1, M_PI));
        }
        prog.events.push_back(wait_comp(p.tau, v));
        prog.events.push_back(pulse(Spin::A, f, t, M_PI / 2));
        prog.events.push_back(ReadEvent{Spin::A});
        sweep_instant();
    } else if (name == "deer_dq") {
        need_tau();
        prog.events = {InitEvent{},
                       pulse(Spin::B, 0, -1, M_PI),  // park B in |-1>
                       pulse(Spin::A, f, t, M_PI / 2),
                       wait_lit(p.tau),
                       pulse(Spin::A, f, t, M_PI),
                       wait_sym(v),
                       pulse(Spin::B, -1, 0, M_PI),  // transfer -1 -> +1
                       pulse(Spin::B, 0, +1, M_PI),
                       wait_comp(p.tau, v),
                       pulse(Spin::A, f, t, M_PI / 2),
                       ReadEvent{Spin::A}};
        sweep_instant();
    } else if (name == "deer_ddq") {
        need_tau();
        prog.events = {InitEvent{},
                       pulse(Spin::B, 0, -1, M_PI),
                       pulse(Spin::A, 0, -1, M_PI / 2),  // |-1>+|+1> superposition on A
                       pulse(Spin::A, 0, +1, M_PI),
                       wait_lit(p.tau),
                       pulse(Spin::A, -1, 0, M_PI),  // palindrome echo swap -1 <-> +1
                       pulse(Spin::A, 0, +1, M_PI),
                       pulse(Spin::A, -1, 0, M_PI),
                       wait_sym(v),
                       pulse(Spin::B, -1, 0, M_PI),
                       pulse(Spin::B, 0, +1, M_PI),
                       wait_comp(p.tau, v),
                       pulse(Spin::A, 0, +1, M_PI),  // reverse of the preparation
                       pulse(Spin::A, 0, -1, M_PI / 2),
                       ReadEvent{Spin::A}};
        sweep_instant();
    } else if (name == "entangle_phi" || name == "entangle_psi") {
        prog.frame = Frame::SymmetricZeroMinus;
        prog.events = {InitEvent{}};
        if (name == "entangle_psi") prog.events.push_back(pulse(Spin::A, 0, -1, M_PI));
        Event w = p.sweep_tau ? wait_sym(v) : wait_lit(p.tau);
        if (!p.sweep_tau) need_tau();
        prog.events.push_back(pulse(Spin::A, 0, -1, M_PI / 2));
        prog.events.push_back(w);
        prog.events.push_back(pulse(Spin::A, 0, -1, M_PI));
        prog.events.push_back(pulse(Spin::B, 0, -1, M_PI / 2));
        prog.events.push_back(w);
        prog.events.push_back(pulse(Spin::A, 0, -1, M_PI / 2));
        prog.events.push_back(ReadEvent{Spin::A});
        if (p.sweep_tau) prog.sweep = SweepSpec{v, p.sweep_start, p.sweep_stop, p.sweep_points};
    } else {
        throw std::invalid_argument("unknown sequence template '" + name + "'");
    }
    validate_program(prog);
    return prog;
}

// ---------------- engine ----------------

namespace {

Eigen::Matrix<double, 9, 1> frame_refs(const LevelMap& lm, Frame frame, double det_a,
                                       double det_b) {
    double e00 = lm.energy(0, 0);
    auto fa = [&](int m) -> double {
        if (m == 0) return 0;
        double pz = lm.energy(m, 0) - e00;
        if (frame == Frame::SymmetricZeroMinus && lm.has(m, -1) && lm.has(0, -1))
            return 0.5 * (pz + lm.energy(m, -1) - lm.energy(0, -1));
        return pz;
    };
    auto fb = [&](int m) -> double {
        if (m == 0) return 0;
        double pz = lm.energy(0, m) - e00;
        if (frame == Frame::SymmetricZeroMinus && lm.has(-1, m) && lm.has(-1, 0))
            return 0.5 * (pz + lm.energy(-1, m) - lm.energy(-1, 0));
        return pz;
    };
    Eigen::Matrix<double, 9, 1> ref;
    for (int ma = -1; ma <= 1; ++ma)
        for (int mb = -1; mb <= 1; ++mb)
            ref[basis_index(ma, mb)] = fa(ma) + fb(mb) - (ma != 0 ? det_a : 0.0) -
                                       (mb != 0 ? det_b : 0.0);
    return ref;
}

struct Engine {
    Mat9 h0;
    Eigen::Matrix<double, 9, 1> ref;

    Engine(const PulseProgram& prog, const SpinPairSystem& sys, const FieldSetting& field,
           const PhysicalConstants& pc) {
        PairHamiltonian h = pair_hamiltonian(sys, field, pc);
        h0 = h.matrix;
        LevelMap lm(h);
        ref = frame_refs(lm, prog.frame, prog.frame_detuning_a, prog.frame_detuning_b);
    }

    // quasi-static per-shot detunings enter as own-axis Sz shifts
    Eigensystem shot(double da, double db) const {
        if (da == 0 && db == 0) return eigensystem({h0});
        Mat9 h = h0;
        for (int i = 0; i < 9; ++i) h(i, i) += da * (i / 3 - 1) + db * (i % 3 - 1);
        return eigensystem({h});
    }

    Mat9 u_free(const Eigensystem& es, double t) const {
        Vec9 ph;
        for (int k = 0; k < 9; ++k) ph[k] = std::exp(-2i * M_PI * es.values[k] * t);
        Mat9 u = es.vectors * ph.asDiagonal() * es.vectors.adjoint();
        Vec9 rot;
        for (int k = 0; k < 9; ++k) rot[k] = std::exp(2i * M_PI * ref[k] * t);
        return rot.asDiagonal() * u;
    }
};

double resolve_wait(const WaitEvent& w, std::optional<double> sweep_value) {
    double t;
    switch (w.kind) {
        case WaitEvent::Kind::Literal: t = w.seconds; break;
        case WaitEvent::Kind::Symbol:
            if (!sweep_value) throw std::invalid_argument("wait: unresolved sweep symbol");
            t = *sweep_value;
            break;
        default:
            if (!sweep_value) throw std::invalid_argument("wait: unresolved sweep symbol");
            t = w.seconds - *sweep_value;
    }
    if (t < -1e-12) throw std::invalid_argument("wait: resolved to a negative duration");
    return std::max(t, 0.0);
}

QuantumState execute(const Engine& eng, const Eigensystem& es, const PulseProgram& prog,
                     size_t prefix, std::optional<double> sweep_value,
                     const DecoherenceParams& dec, const RunOptions& opt, double da, double db,
                     Spin* read_spin) {
    QuantumState st = initialize_register(opt.p0_a, opt.p0_b);
    for (size_t k = 0; k < prefix; ++k) {
        const Event& ev = prog.events[k];
        if (std::holds_alternative<InitEvent>(ev)) {
            st = initialize_register(opt.p0_a, opt.p0_b);
        } else if (const auto* pe = std::get_if<PulseEvent>(&ev)) {
            PulseAction a = pe->action;
            if (a.mode == PulseMode::Rabi) {
                // the shot detuning moves the driven line, not the drive
                double shift = (a.target == Spin::A ? da : db) * (a.m_to - a.m_from);
                a.detuning_hz -= shift;
                st = apply_pulse(st, a);
                apply_dephasing(st.rho, a.duration(), dec);
            } else {
                st = apply_pulse(st, a);
            }
        } else if (const auto* w = std::get_if<WaitEvent>(&ev)) {
            double t = resolve_wait(*w, sweep_value);
            Mat9 u = eng.u_free(es, t);
            st.rho = (u * st.rho * u.adjoint()).eval();
            apply_dephasing(st.rho, t, dec);
        } else if (const auto* r = std::get_if<ReadEvent>(&ev)) {
            if (read_spin) *read_spin = r->spin;
        }
    }
    return st;
}

}  // namespace

SignalTrace run_program(const PulseProgram& prog, const SpinPairSystem& sys,
                        const FieldSetting& field, const DecoherenceParams& dec,
                        const PhysicalConstants& pc, const ReadoutModel& model, uint64_t seed,
                        const RunOptions& opt) {
    validate_program(prog);
    Engine eng(prog, sys, field, pc);

    int npts = prog.sweep ? prog.sweep->points : 1;
    SignalTrace trace;
    trace.name = prog.name;
    trace.abscissa.resize(npts);
    trace.values.resize(npts);
    double start = prog.sweep ? prog.sweep->start : 0;
    double stop = prog.sweep ? prog.sweep->stop : 0;
    for (int i = 0; i < npts; ++i)
        trace.abscissa[i] = npts > 1 ? start + (stop - start) * i / (npts - 1) : start;

    bool quasistatic = dec.t2star_a.has_value() || dec.t2star_b.has_value();
    int nshots = quasistatic ? std::max(1, dec.t2star_samples) : 1;
    std::optional<Eigensystem> shared;
    if (!quasistatic) shared = eng.shot(0, 0);

    parallel_for(npts, [&](int ip) {
        Mat9 acc = Mat9::Zero();
        Spin read_spin = Spin::A;
        for (int s = 0; s < nshots; ++s) {
            double da = 0, db = 0;
            if (quasistatic) {
                std::mt19937_64 rng(
                    mix_seed(seed, static_cast<uint64_t>(ip) * nshots + s));
                std::normal_distribution<double> g;
                if (dec.t2star_a) da = g(rng) / (std::sqrt(2.0) * M_PI * *dec.t2star_a);
                if (dec.t2star_b) db = g(rng) / (std::sqrt(2.0) * M_PI * *dec.t2star_b);
            }
            Eigensystem es = shared ? *shared : eng.shot(da, db);
            QuantumState st =
                execute(eng, es, prog, prog.events.size(),
                        prog.sweep ? std::optional<double>(trace.abscissa[ip]) : std::nullopt,
                        dec, opt, da, db, &read_spin);
            acc += st.rho;
        }
        QuantumState avg{acc / static_cast<double>(nshots)};
        trace.values[ip] = readout(avg, read_spin, model, mix_seed(seed ^ 0x5eedfeedULL, ip));
    });

    trace.metadata = {{"sequence", prog.name},
                      {"points", std::to_string(npts)},
                      {"seed", std::to_string(seed)},
                      {"shots", std::to_string(nshots)}};
    return trace;
}

QuantumState state_probe(const PulseProgram& prog, size_t prefix_length,
                         const SpinPairSystem& sys, const FieldSetting& field,
                         const DecoherenceParams& dec, const PhysicalConstants& pc,
                         std::optional<double> sweep_value, const RunOptions& opt) {
    if (prefix_length > prog.events.size())
        throw std::out_of_range("state_probe: prefix exceeds event count");
    Engine eng(prog, sys, field, pc);
    Eigensystem es = eng.shot(0, 0);
    return execute(eng, es, prog, prefix_length, sweep_value, dec, opt, 0, 0, nullptr);
}

}  // namespace nvreg
