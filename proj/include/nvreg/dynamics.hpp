#pragma once
#include <optional>

#include "nvreg/spincore.hpp"

namespace nvreg {

struct QuantumState {
    Mat9 rho;  // trace 1, Hermitian, PSD; same basis order as PairHamiltonian
};

// Pure dephasing. T2 here is the Lindblad-Sz dephasing time: an off-diagonal
// element whose basis labels differ by dm on spin q decays at rate
// |dm| / (2*t2_q); a single-quantum coherence thus decays as exp(-t/(2*T2))
// and a double-quantum one twice as fast. t2star is a quasi-static Gaussian
// detuning, sampled per shot by the sequence engine (not applied here) and
// refocused by echoes.
struct DecoherenceParams {
    std::optional<double> t2_a, t2_b;          // seconds; empty = disabled
    std::optional<double> t2star_a, t2star_b;  // seconds; empty = disabled
    int t2star_samples = 201;
};

enum class PulseMode { Ideal, Rabi };

struct PulseAction {
    Spin target = Spin::A;
    int m_from = 0, m_to = -1;  // distinct members of {-1,0,+1}
    double angle = M_PI;        // radians
    double phase = 0.0;         // radians, rotation axis in the x-y plane
    PulseMode mode = PulseMode::Ideal;
    double rabi_hz = 0.0;      // Rabi frequency (rabi mode)
    double detuning_hz = 0.0;  // drive offset from the transition (rabi mode)
    double duration() const { return mode == PulseMode::Rabi ? angle / (2 * M_PI * rabi_hz) : 0.0; }
    friend bool operator==(const PulseAction&, const PulseAction&) = default;
};

QuantumState pure_state(const Vec9& amplitudes);
QuantumState initialize_register(double p0_a, double p0_b);

// U = exp(-i 2 pi H t) via eigendecomposition, then t2 dephasing
QuantumState evolve_free(const QuantumState& s, const PairHamiltonian& h, double t,
                         const DecoherenceParams& dec = {});
// dephasing factor alone (basis-index coherence orders)
void apply_dephasing(Mat9& rho, double t, const DecoherenceParams& dec);

// Ideal: exp(-i angle/2 (cos(phase) sx + sin(phase) sy)) embedded in the
// (m_from, m_to) subspace. Rabi: rotating-wave two-level drive
// H2 = [[-d/2, W e^{-i phase}/2], [W e^{i phase}/2, d/2]] (Hz) for the time
// that gives the requested resonant angle; spectator levels idle.
Mat9 pulse_unitary(const PulseAction& a);
QuantumState apply_pulse(const QuantumState& s, const PulseAction& a);

// |-1> <-> |+1> swap (|0> fixed, up to phase) as the pulse palindrome
// pi(-1,0) pi(0,+1) pi(-1,0); the naive two-pulse chain is a 3-cycle on the
// levels, not a swap.
QuantumState composite_dq_pulse(const QuantumState& s, Spin target);
Mat9 composite_dq_unitary(Spin target);

double fidelity(const QuantumState& s, const Vec9& target_pure);
double population(const QuantumState& s, Spin spin, int m);

}  // namespace nvreg
