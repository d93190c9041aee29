#include "nvreg/spincore.hpp"

#include <cmath>

namespace nvreg {

using namespace std::complex_literals;

Spin1Ops spin1_operators() {
    const double s = 1.0 / std::sqrt(2.0);
    Spin1Ops o;
    o.sx << 0, s, 0, s, 0, s, 0, s, 0;
    o.sy << 0, 1i * s, 0, -1i * s, 0, 1i * s, 0, -1i * s, 0;
    o.sz << -1, 0, 0, 0, 0, 0, 0, 0, 1;
    return o;
}

std::array<Vec3, 3> axis_triad(const Vec3& axis) {
    Vec3 z = axis.normalized();
    Vec3 ref = std::abs(z.dot(Vec3::UnitX())) > 0.9 ? Vec3::UnitY() : Vec3::UnitX();
    Vec3 x = (ref - ref.dot(z) * z).normalized();
    Vec3 y = z.cross(x);
    return {x, y, z};
}

std::array<Mat3, 3> lab_spin_ops(const Vec3& axis) {
    auto [x, y, z] = axis_triad(axis);
    auto op = spin1_operators();
    std::array<Mat3, 3> lab;
    for (int i = 0; i < 3; ++i) lab[i] = x[i] * op.sx + y[i] * op.sy + z[i] * op.sz;
    return lab;
}

Mat3 single_center_hamiltonian(const NVCenter& c, const FieldSetting& f,
                               const PhysicalConstants& pc) {
    auto [x, y, z] = axis_triad(c.axis);
    auto op = spin1_operators();
    double g = pc.gamma_e();
    Mat3 h = c.D * op.sz * op.sz + c.E * (op.sx * op.sx - op.sy * op.sy) +
             g * (f.B.dot(x) * op.sx + f.B.dot(y) * op.sy + f.B.dot(z) * op.sz);
    return h;
}

double dipolar_prefactor(double r, const PhysicalConstants& pc) {
    if (r <= 0) throw std::domain_error("dipolar prefactor: r must be > 0");
    double m = pc.g_e * pc.muB;
    return pc.mu0 * m * m / (4 * M_PI * r * r * r * pc.h);
}

Mat9 dipolar_hamiltonian(const SpinPairSystem& sys, const PhysicalConstants& pc) {
    double r = sys.displacement.norm();
    if (r == 0) throw std::domain_error("dipolar hamiltonian: zero displacement");
    Vec3 rhat = sys.displacement / r;
    double pref = dipolar_prefactor(r, pc);
    auto sa = lab_spin_ops(sys.center_a.axis);
    auto sb = lab_spin_ops(sys.center_b.axis);
    Mat9 h = Mat9::Zero();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double c = pref * ((i == j ? 1.0 : 0.0) - 3.0 * rhat[i] * rhat[j]);
            if (c != 0) h += c * kron33(sa[i], sb[j]);
        }
    return h;
}

PairHamiltonian pair_hamiltonian(const SpinPairSystem& sys, const FieldSetting& f,
                                 const PhysicalConstants& pc) {
    Mat3 ha = single_center_hamiltonian(sys.center_a, f, pc);
    Mat3 hb = single_center_hamiltonian(sys.center_b, f, pc);
    Mat3 id = Mat3::Identity();
    Mat9 h = kron33(ha, id) + kron33(id, hb) + dipolar_hamiltonian(sys, pc);
    return {h};
}

Eigensystem eigensystem(const PairHamiltonian& h) {
    double scale = h.matrix.cwiseAbs().maxCoeff();
    double asym = (h.matrix - h.matrix.adjoint()).cwiseAbs().maxCoeff();
    if (scale > 0 && asym > 1e-9 * scale)
        throw std::invalid_argument("eigensystem: matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Mat9> es(h.matrix);
    return {es.eigenvalues(), es.eigenvectors()};
}

LevelMap::LevelMap(const PairHamiltonian& h) : eig_(eigensystem(h)) {
    assign(Mat9::Identity());
}

LevelMap::LevelMap(const PairHamiltonian& h, const Mat3& basis_a, const Mat3& basis_b)
    : eig_(eigensystem(h)) {
    assign(kron33(basis_a, basis_b));
}

void LevelMap::assign(const Mat9& overlap_basis) {
    level_of_.fill(-1);
    Mat9 ov = overlap_basis.adjoint() * eig_.vectors;  // (basis state, eigencolumn)
    for (int k = 0; k < 9; ++k) {
        int best = 0;
        double best_sq = 0;
        for (int b = 0; b < 9; ++b) {
            double sq = std::norm(ov(b, k));
            if (sq > best_sq) { best_sq = sq; best = b; }
        }
        if (best_sq > 0.5) level_of_[best] = k;  // >0.5 implies uniqueness
    }
}

bool LevelMap::has(int ma, int mb) const { return level_of_[basis_index(ma, mb)] >= 0; }

double LevelMap::energy(int ma, int mb) const {
    int k = level_of_[basis_index(ma, mb)];
    if (k < 0)
        throw LabelingError("no eigenlevel with dominant |" + std::to_string(ma) + "," +
                            std::to_string(mb) + "> component (overlap <= 0.5)");
    return eig_.values[k];
}

Vec9 LevelMap::state(int ma, int mb) const {
    int k = level_of_[basis_index(ma, mb)];
    if (k < 0)
        throw LabelingError("no eigenlevel with dominant |" + std::to_string(ma) + "," +
                            std::to_string(mb) + "> component (overlap <= 0.5)");
    return eig_.vectors.col(k);
}

double transition_frequency(const PairHamiltonian& h, Spin spin, int m_from, int m_to,
                            int partner_state) {
    LevelMap lm(h);
    double e0, e1;
    if (spin == Spin::A) {
        e0 = lm.energy(m_from, partner_state);
        e1 = lm.energy(m_to, partner_state);
    } else {
        e0 = lm.energy(partner_state, m_from);
        e1 = lm.energy(partner_state, m_to);
    }
    return std::abs(e1 - e0);
}

namespace {

// single-center eigenbasis with columns labeled m = -1,0,+1. Used for pair
// labeling in the strain-dominated regime where the m basis itself is 50/50
// degenerate: |0> is the column with dominant |0> component, the remaining
// two are ordered by energy (lower -> -1).
Mat3 strain_label_basis(const NVCenter& c, const FieldSetting& f, const PhysicalConstants& pc) {
    Eigen::SelfAdjointEigenSolver<Mat3> es(single_center_hamiltonian(c, f, pc));
    int zero_col = 0;
    double best = 0;
    for (int k = 0; k < 3; ++k) {
        double sq = std::norm(es.eigenvectors()(1, k));
        if (sq > best) { best = sq; zero_col = k; }
    }
    std::array<int, 2> rest{};
    int n = 0;
    for (int k = 0; k < 3; ++k)
        if (k != zero_col) rest[n++] = k;  // eigenvalues ascending already
    Mat3 basis;
    basis.col(0) = es.eigenvectors().col(rest[0]);
    basis.col(1) = es.eigenvectors().col(zero_col);
    basis.col(2) = es.eigenvectors().col(rest[1]);
    return basis;
}

bool strain_dominated(const NVCenter& c, const FieldSetting& f, const PhysicalConstants& pc) {
    double zeeman = pc.gamma_e() * std::abs(f.B.dot(c.axis.normalized()));
    return c.E > 0 && zeeman < c.E;
}

}  // namespace

DeerFrequencies deer_frequencies(const SpinPairSystem& sys, const FieldSetting& f,
                                 const PhysicalConstants& pc) {
    bool zero_field = f.B.norm() == 0;
    if (zero_field && sys.center_a.E == 0 && sys.center_b.E == 0)
        throw std::domain_error(
            "deer_frequencies: |+1>/|-1> degenerate at B = 0 with E = 0; ill-posed");
    PairHamiltonian h = pair_hamiltonian(sys, f, pc);
    Mat3 id = Mat3::Identity();
    Mat3 ba = strain_dominated(sys.center_a, f, pc) ? strain_label_basis(sys.center_a, f, pc) : id;
    Mat3 bb = strain_dominated(sys.center_b, f, pc) ? strain_label_basis(sys.center_b, f, pc) : id;
    LevelMap lm(h, ba, bb);
    auto nu = [&](int mb) { return lm.energy(-1, mb) - lm.energy(0, mb); };
    double nu0 = nu(0);
    DeerFrequencies d;
    d.s1 = nu(-1) - nu0;
    d.s2 = nu(+1) - nu0;
    d.dnu1 = std::abs(d.s1);
    d.dnu2 = std::abs(d.s2);
    return d;
}

Vec3 spin_expectation(const Eigen::Vector3cd& state) {
    auto op = spin1_operators();
    auto ev = [&](const Mat3& m) { return std::real(state.dot(m * state)); };
    return {ev(op.sx), ev(op.sy), ev(op.sz)};
}

Vec3 spin_expectation(const Vec9& state, Spin spin) {
    Mat3 rho = Mat3::Zero();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                rho(i, j) += spin == Spin::A ? state[i * 3 + k] * std::conj(state[j * 3 + k])
                                             : state[k * 3 + i] * std::conj(state[k * 3 + j]);
    auto op = spin1_operators();
    auto ev = [&](const Mat3& m) { return std::real((rho * m).trace()); };
    return {ev(op.sx), ev(op.sy), ev(op.sz)};
}

}  // namespace nvreg
