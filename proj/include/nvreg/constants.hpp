#pragma once

namespace nvreg {

// CODATA values; g_e is the NV ground-state electron g-factor.
struct PhysicalConstants {
    double mu0 = 1.25663706212e-6;    // T*m/A
    double muB = 9.2740100783e-24;    // J/T
    double g_e = 2.0028;
    double h = 6.62607015e-34;        // J*s
    double eps0 = 8.8541878128e-12;   // F/m
    double q_e = 1.602176634e-19;     // C
    double eps_r_diamond = 5.7;

    double gamma_e() const { return g_e * muB / h; }  // Hz/T
};

inline constexpr const char* kVersion = "0.1.0";

inline constexpr double kDefaultD = 2.87e9;       // Hz, axial zero-field splitting
inline constexpr double kDiamondLattice = 0.3567e-9;  // m, conventional cubic cell

}  // namespace nvreg
