#pragma once
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "nvreg/dynamics.hpp"

namespace nvreg {

struct ReadoutModel;  // measure.hpp

struct InitEvent {
    friend bool operator==(const InitEvent&, const InitEvent&) = default;
};
struct PulseEvent {
    PulseAction action;
    friend bool operator==(const PulseEvent&, const PulseEvent&) = default;
};
struct WaitEvent {
    // Literal seconds; Symbol = sweep variable; SymbolComplement = seconds
    // minus the sweep value (templates only -- the DSL cannot express it)
    enum class Kind { Literal, Symbol, SymbolComplement };
    Kind kind = Kind::Literal;
    double seconds = 0;
    std::string symbol;
    friend bool operator==(const WaitEvent&, const WaitEvent&) = default;
};
struct ReadEvent {
    Spin spin = Spin::A;
    friend bool operator==(const ReadEvent&, const ReadEvent&) = default;
};
using Event = std::variant<InitEvent, PulseEvent, WaitEvent, ReadEvent>;

struct SweepSpec {
    std::string variable;
    double start = 0, stop = 0;
    int points = 256;
    friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

// Free evolution runs in per-spin, per-level rotating frames (reference
// frequency per |m>, zero for m=0). PartnerZero references each spin's
// transition with the partner in |0>; SymmetricZeroMinus averages the
// partner-in-|0> and partner-in-|-1> references -- the convention under which
// the entangling sequence produces the textbook Bell-state amplitudes.
enum class Frame { PartnerZero, SymmetricZeroMinus };

struct PulseProgram {
    std::vector<Event> events;
    std::optional<SweepSpec> sweep;
    Frame frame = Frame::PartnerZero;
    double frame_detuning_a = 0, frame_detuning_b = 0;  // Hz, template metadata
    std::string name = "custom";
    friend bool operator==(const PulseProgram&, const PulseProgram&) = default;
};

// grammar (';' or newline separated, '#' comments):
//   stmt := "init"
//         | "pulse" SPIN TRANS ANGLE ["phase=" FLOAT] ["rabi=" FREQ]
//         | "wait" (DURATION | IDENT)
//         | "read" SPIN
//         | "sweep" IDENT DURATION DURATION INT
//   SPIN := "A" | "B" ; TRANS := M ":" M ; M := "-1" | "0" | "+1"
//   ANGLE := "pi" | "pi/N" | float radians (optionally negated)
//   DURATION := float with optional ns/us/ms/s suffix (bare = seconds)
//   FREQ := float with optional Hz/kHz/MHz/GHz suffix (bare = Hz)
PulseProgram parse_program(const std::string& text);
// inverse of parse_program; throws for template-only constructs (complement
// waits, frames, detunings) that the grammar cannot express
std::string render_program(const PulseProgram& p);

struct SequenceParams {
    double tau = 0;  // echo half-interval / entangling wait, seconds
    double sweep_start = 0, sweep_stop = 0;
    int sweep_points = 256;
    int m_from = 0, m_to = -1;                // working transition
    double detuning_hz = 0;                   // ramsey frame offset
    std::optional<int> partner_prep;          // pulse B to this m before the sequence
    bool detuned_control = false;             // deer: drive B far off resonance
    double control_rabi_hz = 5e6;             // finite drive used for the control
    double control_detuning_hz = 1e8;
    bool sweep_tau = false;                   // entangle templates: sweep tau itself
};

// ramsey | hahn | deer | deer_dq | deer_ddq | entangle_phi | entangle_psi
PulseProgram build_named(const std::string& name, const SequenceParams& p);

struct SignalTrace {
    std::vector<double> abscissa;  // seconds (sweep variable)
    std::vector<double> values;    // normalized fluorescence contrast
    std::string name;
    std::vector<std::pair<std::string, std::string>> metadata;
};

struct RunOptions {
    double p0_a = 1.0, p0_b = 1.0;  // initialization polarization per spin
};

SignalTrace run_program(const PulseProgram& prog, const SpinPairSystem& sys,
                        const FieldSetting& field, const DecoherenceParams& dec,
                        const PhysicalConstants& pc, const ReadoutModel& model, uint64_t seed,
                        const RunOptions& opt = {});

// density matrix after the first prefix_length events (single shot, T2*
// channel ignored); sweep_value resolves symbolic waits if present
QuantumState state_probe(const PulseProgram& prog, size_t prefix_length,
                         const SpinPairSystem& sys, const FieldSetting& field,
                         const DecoherenceParams& dec, const PhysicalConstants& pc,
                         std::optional<double> sweep_value = {}, const RunOptions& opt = {});

}  // namespace nvreg
