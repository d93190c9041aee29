#include "nvreg/dynamics.hpp"

#include <cmath>

namespace nvreg {

using namespace std::complex_literals;

QuantumState pure_state(const Vec9& amplitudes) {
    double n = amplitudes.norm();
    if (n == 0) throw std::invalid_argument("pure_state: zero vector");
    Vec9 psi = amplitudes / n;
    return {psi * psi.adjoint()};
}

QuantumState initialize_register(double p0_a, double p0_b) {
    if (p0_a < 0 || p0_a > 1 || p0_b < 0 || p0_b > 1)
        throw std::invalid_argument("initialize_register: p0 outside [0,1]");
    auto diag = [](double p0) {
        Mat3 d = Mat3::Zero();
        d(0, 0) = (1 - p0) / 2;
        d(1, 1) = p0;
        d(2, 2) = (1 - p0) / 2;
        return d;
    };
    return {kron33(diag(p0_a), diag(p0_b))};
}

void apply_dephasing(Mat9& rho, double t, const DecoherenceParams& dec) {
    if (!dec.t2_a && !dec.t2_b) return;
    if ((dec.t2_a && *dec.t2_a <= 0) || (dec.t2_b && *dec.t2_b <= 0))
        throw std::invalid_argument("dephasing: t2 must be > 0");
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j) {
            if (i == j) continue;
            double rate = 0;
            if (dec.t2_a) rate += std::abs(i / 3 - j / 3) / (2 * *dec.t2_a);
            if (dec.t2_b) rate += std::abs(i % 3 - j % 3) / (2 * *dec.t2_b);
            rho(i, j) *= std::exp(-rate * t);
        }
}

QuantumState evolve_free(const QuantumState& s, const PairHamiltonian& h, double t,
                         const DecoherenceParams& dec) {
    if (t < 0) throw std::invalid_argument("evolve_free: negative time");
    Eigensystem es = eigensystem(h);
    Vec9 phases;
    for (int k = 0; k < 9; ++k) phases[k] = std::exp(-2i * M_PI * es.values[k] * t);
    Mat9 u = es.vectors * phases.asDiagonal() * es.vectors.adjoint();
    QuantumState out{u * s.rho * u.adjoint()};
    apply_dephasing(out.rho, t, dec);
    return out;
}

namespace {

Mat3 two_level(const Eigen::Matrix2cd& u2, int m_from, int m_to) {
    Mat3 u = Mat3::Identity();
    int i = m_from + 1, j = m_to + 1;
    u(i, i) = u2(0, 0);
    u(i, j) = u2(0, 1);
    u(j, i) = u2(1, 0);
    u(j, j) = u2(1, 1);
    return u;
}

}  // namespace

Mat9 pulse_unitary(const PulseAction& a) {
    if (a.m_from == a.m_to || a.m_from < -1 || a.m_from > 1 || a.m_to < -1 || a.m_to > 1)
        throw std::invalid_argument("pulse: invalid transition");
    Eigen::Matrix2cd u2;
    if (a.mode == PulseMode::Ideal) {
        double c = std::cos(a.angle / 2), s = std::sin(a.angle / 2);
        u2 << c, -1i * std::exp(-1i * a.phase) * s, -1i * std::exp(1i * a.phase) * s, c;
    } else {
        if (a.rabi_hz <= 0) throw std::invalid_argument("pulse: rabi mode needs rabi_hz > 0");
        Eigen::Matrix2cd h2;
        h2 << -a.detuning_hz / 2, a.rabi_hz * std::exp(-1i * a.phase) / 2.0,
            a.rabi_hz * std::exp(1i * a.phase) / 2.0, a.detuning_hz / 2;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(h2);
        Eigen::Vector2cd ph;
        double t = a.duration();
        for (int k = 0; k < 2; ++k) ph[k] = std::exp(-2i * M_PI * es.eigenvalues()[k] * t);
        u2 = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
    }
    Mat3 u3 = two_level(u2, a.m_from, a.m_to);
    Mat3 id = Mat3::Identity();
    return a.target == Spin::A ? kron33(u3, id) : kron33(id, u3);
}

QuantumState apply_pulse(const QuantumState& s, const PulseAction& a) {
    Mat9 u = pulse_unitary(a);
    return {u * s.rho * u.adjoint()};
}

Mat9 composite_dq_unitary(Spin target) {
    PulseAction lo{target, -1, 0, M_PI};
    PulseAction hi{target, 0, +1, M_PI};
    Mat9 p = pulse_unitary(lo);
    return p * pulse_unitary(hi) * p;
}

QuantumState composite_dq_pulse(const QuantumState& s, Spin target) {
    Mat9 u = composite_dq_unitary(target);
    return {u * s.rho * u.adjoint()};
}

double fidelity(const QuantumState& s, const Vec9& target_pure) {
    double n = target_pure.norm();
    if (n == 0) throw std::invalid_argument("fidelity: zero target");
    Vec9 psi = target_pure / n;
    return std::real(psi.dot(s.rho * psi));
}

double population(const QuantumState& s, Spin spin, int m) {
    if (m < -1 || m > 1) throw std::invalid_argument("population: m outside {-1,0,+1}");
    double p = 0;
    for (int k = 0; k < 3; ++k) {
        int idx = spin == Spin::A ? (m + 1) * 3 + k : k * 3 + (m + 1);
        p += std::real(s.rho(idx, idx));
    }
    return p;
}

}  // namespace nvreg
