#pragma once
#include <Eigen/Dense>
#include <array>
#include <complex>
#include <optional>

#include "nvreg/constants.hpp"
#include "nvreg/errors.hpp"

namespace nvreg {

using cd = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3cd;
using Mat9 = Eigen::Matrix<cd, 9, 9>;
using Vec9 = Eigen::Matrix<cd, 9, 1>;

enum class Spin { A, B };

struct NVCenter {
    Vec3 axis = Vec3(0, 0, 1);  // unit vector, lab frame
    double D = kDefaultD;       // axial ZFS, Hz
    double E = 0.0;             // transverse ZFS, Hz
};

struct FieldSetting {
    Vec3 B = Vec3::Zero();  // Tesla, lab frame (z = surface normal)
};

struct SpinPairSystem {
    NVCenter center_a, center_b;
    Vec3 displacement = Vec3(10e-9, 0, 0);  // meters, A -> B
};

// 9x9, Hz. Basis |m_A,m_B> ordered |-1,-1>,|-1,0>,...,|+1,+1>; each spin is
// quantized along its own NV axis (the product basis that makes labeling
// meaningful when the two axes differ).
struct PairHamiltonian {
    Mat9 matrix;
};

inline int basis_index(int ma, int mb) { return (ma + 1) * 3 + (mb + 1); }

inline Mat9 kron33(const Mat3& a, const Mat3& b) {
    Mat9 out;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out.block<3, 3>(3 * i, 3 * j) = a(i, j) * b;
    return out;
}

struct Spin1Ops {
    Mat3 sx, sy, sz;
};
Spin1Ops spin1_operators();

// right-handed orthonormal triad {x', y', axis}; deterministic choice of x'
std::array<Vec3, 3> axis_triad(const Vec3& axis);

// lab-frame components (S_x, S_y, S_z) of the spin, as matrices in the
// center's own |m> basis
std::array<Mat3, 3> lab_spin_ops(const Vec3& axis);

Mat3 single_center_hamiltonian(const NVCenter& c, const FieldSetting& f,
                               const PhysicalConstants& pc = {});

double dipolar_prefactor(double r, const PhysicalConstants& pc = {});  // Hz
Mat9 dipolar_hamiltonian(const SpinPairSystem& sys, const PhysicalConstants& pc = {});
PairHamiltonian pair_hamiltonian(const SpinPairSystem& sys, const FieldSetting& f,
                                 const PhysicalConstants& pc = {});

struct Eigensystem {
    Eigen::Matrix<double, 9, 1> values;  // ascending, Hz
    Mat9 vectors;                        // orthonormal columns
};
Eigensystem eigensystem(const PairHamiltonian& h);

// Eigenlevels labeled |m_A,m_B> by dominant component in a product basis
// (default: the m basis; a custom per-spin basis can be supplied, e.g. the
// strain eigenbasis at zero field). A level with no >0.5 dominant component
// stays unlabeled; only *querying* such a level throws. This laziness matters:
// whenever the two axes are parallel, |-1,+1> and |+1,-1> are exactly
// degenerate and mix 50/50, yet every quantity of interest lives elsewhere.
class LevelMap {
public:
    explicit LevelMap(const PairHamiltonian& h);
    LevelMap(const PairHamiltonian& h, const Mat3& basis_a, const Mat3& basis_b);

    bool has(int ma, int mb) const;
    double energy(int ma, int mb) const;  // Hz
    Vec9 state(int ma, int mb) const;
    const Eigensystem& eig() const { return eig_; }

private:
    void assign(const Mat9& overlap_basis);
    Eigensystem eig_;
    std::array<int, 9> level_of_;  // basis index -> eigencolumn, -1 = unlabeled
};

// |E(label m_to, partner) - E(label m_from, partner)| for the given spin
double transition_frequency(const PairHamiltonian& h, Spin spin, int m_from, int m_to,
                            int partner_state);

struct DeerFrequencies {
    double dnu1, dnu2;  // magnitudes, Hz
    double s1, s2;      // signed shifts of A's |0>->|-1> line for B in -1 / +1
    double sum() const { return dnu1 + dnu2; }
    double dq() const { return std::abs(s2 - s1); }  // B flipped -1 -> +1
};
// shift of A's |0>->|-1> transition when B flips |0>->|-1> (dnu1) or
// |0>->|+1> (dnu2)
DeerFrequencies deer_frequencies(const SpinPairSystem& sys, const FieldSetting& f,
                                 const PhysicalConstants& pc = {});

// expectation of (Sx,Sy,Sz) in the center's own axis frame
Vec3 spin_expectation(const Eigen::Vector3cd& state);
Vec3 spin_expectation(const Vec9& state, Spin spin);  // partial trace first

}  // namespace nvreg
