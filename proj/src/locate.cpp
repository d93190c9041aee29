#include "nvreg/locate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nvreg/errors.hpp"
#include "nvreg/util.hpp"

namespace nvreg {

namespace {

const char* observable_token(DeerObservable o) {
    switch (o) {
        case DeerObservable::Dnu1: return "dnu1";
        case DeerObservable::Dnu2: return "dnu2";
        default: return "sum";
    }
}

DeerObservable parse_observable(const std::string& s) {
    if (s == "dnu1") return DeerObservable::Dnu1;
    if (s == "dnu2") return DeerObservable::Dnu2;
    if (s == "sum") return DeerObservable::Sum;
    throw ConfigError("unknown observable '" + s + "' (expected dnu1, dnu2 or sum)");
}

}  // namespace

DeerDataset load_deer_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open dataset '" + path + "'");
    DeerDataset data;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            if (s != "bx_T,by_T,bz_T,observable,value_hz,sigma_hz")
                throw ConfigError("dataset '" + path + "': unexpected header '" + s + "'");
            continue;
        }
        auto cols = split(s, ',');
        if (cols.size() != 6) throw ConfigError("dataset '" + path + "': bad row '" + s + "'");
        DeerEntry e;
        try {
            e.field.B = Vec3(std::stod(cols[0]), std::stod(cols[1]), std::stod(cols[2]));
            e.observable = parse_observable(trim(cols[3]));
            e.value_hz = std::stod(cols[4]);
            e.sigma_hz = std::stod(cols[5]);
        } catch (const std::logic_error&) {
            throw ConfigError("dataset '" + path + "': bad row '" + s + "'");
        }
        if (e.sigma_hz <= 0) throw ConfigError("dataset '" + path + "': sigma must be > 0");
        data.entries.push_back(e);
    }
    return data;
}

void save_deer_csv(const DeerDataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write dataset '" + path + "'");
    out << "bx_T,by_T,bz_T,observable,value_hz,sigma_hz\n";
    char buf[256];
    for (const auto& e : data.entries) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%s,%.17g,%.17g\n", e.field.B.x(),
                      e.field.B.y(), e.field.B.z(), observable_token(e.observable), e.value_hz,
                      e.sigma_hz);
        out << buf;
    }
}

std::array<Vec3, 4> nv_axes() {
    const double s = 1.0 / std::sqrt(3.0);
    return {Vec3(1, 1, 1) * s, Vec3(1, -1, -1) * s, Vec3(-1, 1, -1) * s, Vec3(-1, -1, 1) * s};
}

namespace {

SpinPairSystem make_system(const Vec3& disp, const AxisAssignment& axes, double d_a, double e_a,
                           double d_b, double e_b) {
    SpinPairSystem sys;
    sys.center_a = {axes.axis_a, d_a, e_a};
    sys.center_b = {axes.axis_b, d_b, e_b};
    sys.displacement = disp;
    return sys;
}

double observable_value(const DeerFrequencies& f, DeerObservable o) {
    switch (o) {
        case DeerObservable::Dnu1: return f.dnu1;
        case DeerObservable::Dnu2: return f.dnu2;
        default: return f.sum();
    }
}

}  // namespace

DeerDataset predict_dataset(const PairGeometry& geometry, const AxisAssignment& axes,
                            const DeerDataset& request, const PhysicalConstants& pc) {
    DeerDataset out = request;
    SpinPairSystem sys =
        make_system(geometry.displacement, axes, geometry.d_a, geometry.e_a, geometry.d_b,
                    geometry.e_b);
    for (auto& e : out.entries) {
        try {
            e.value_hz = observable_value(deer_frequencies(sys, e.field, pc), e.observable);
            e.ok = true;
        } catch (const LabelingError&) {
            e.value_hz = 0;
            e.ok = false;
        }
    }
    return out;
}

namespace {

struct ResidualEval {
    Eigen::VectorXd r;
    bool ok = false;
};

ResidualEval residuals_at(const Vec3& disp, const AxisAssignment& axes,
                          const DeerDataset& data, const FitOptions& opt,
                          const PhysicalConstants& pc) {
    ResidualEval out;
    out.r.resize(static_cast<Eigen::Index>(data.entries.size()));
    SpinPairSystem sys = make_system(disp, axes, opt.d_a, opt.e_a, opt.d_b, opt.e_b);
    for (size_t i = 0; i < data.entries.size(); ++i) {
        const DeerEntry& e = data.entries[i];
        try {
            double v = observable_value(deer_frequencies(sys, e.field, pc), e.observable);
            out.r[static_cast<Eigen::Index>(i)] = (v - e.value_hz) / e.sigma_hz;
        } catch (const LabelingError&) {
            return out;
        }
    }
    out.ok = true;
    return out;
}

struct LmResult {
    Vec3 x = Vec3::Zero();
    double chi2 = std::numeric_limits<double>::infinity();
    Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
    bool converged = false;
};

bool jacobian_at(const Vec3& x, const AxisAssignment& axes, const DeerDataset& data,
                 const FitOptions& opt, const PhysicalConstants& pc, Eigen::MatrixXd& jac) {
    const double scale = std::max(x.norm(), 1e-10);
    jac.resize(static_cast<Eigen::Index>(data.entries.size()), 3);
    for (int j = 0; j < 3; ++j) {
        double h = 1e-3 * std::max(std::abs(x[j]), 0.1 * scale);
        Vec3 xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        ResidualEval rp = residuals_at(xp, axes, data, opt, pc);
        ResidualEval rm = residuals_at(xm, axes, data, opt, pc);
        if (!rp.ok || !rm.ok) return false;
        jac.col(j) = (rp.r - rm.r) / (2 * h);
    }
    return true;
}

LmResult lm_minimize(Vec3 x, const AxisAssignment& axes, const DeerDataset& data,
                     const FitOptions& opt, const PhysicalConstants& pc) {
    LmResult res;
    ResidualEval cur = residuals_at(x, axes, data, opt, pc);
    if (!cur.ok) return res;
    double chi2 = cur.r.squaredNorm();
    double lambda = 1e-3;
    Eigen::MatrixXd jac;
    for (int iter = 0; iter < opt.max_iterations; ++iter) {
        if (!jacobian_at(x, axes, data, opt, pc, jac)) break;
        Eigen::Matrix3d jtj = (jac.transpose() * jac).eval();
        Eigen::Vector3d grad = jac.transpose() * cur.r;
        bool stepped = false;
        for (int tries = 0; tries < 40; ++tries) {
            Eigen::Matrix3d damped = jtj;
            damped.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-300);
            Eigen::Vector3d dx = damped.ldlt().solve(-grad);
            ResidualEval trial = residuals_at(x + dx, axes, data, opt, pc);
            if (trial.ok && trial.r.squaredNorm() < chi2) {
                double new_chi2 = trial.r.squaredNorm();
                bool small_step = dx.norm() < 1e-9 * std::max(x.norm(), 1e-12);
                bool small_gain = chi2 - new_chi2 < opt.tolerance * std::max(chi2, 1e-300);
                x += dx;
                cur = trial;
                chi2 = new_chi2;
                lambda = std::max(lambda / 10, 1e-14);
                stepped = true;
                if (small_step || small_gain) {
                    res.converged = true;
                    iter = opt.max_iterations;
                }
                break;
            }
            lambda *= 10;
            if (lambda > 1e14) break;
        }
        if (!stepped) {
            // no descent direction left: treat as converged at this point
            res.converged = true;
            break;
        }
    }
    if (jacobian_at(x, axes, data, opt, pc, jac))
        res.jtj = (jac.transpose() * jac).eval();
    else
        res.converged = false;
    res.x = x;
    res.chi2 = chi2;
    return res;
}

}  // namespace

GeometryEstimate fit_geometry(const DeerDataset& dataset, const PhysicalConstants& pc,
                              const FitOptions& opt) {
    if (dataset.entries.size() < 4)
        throw std::invalid_argument("fit_geometry: need at least 4 entries for 3 parameters");
    for (const auto& e : dataset.entries)
        if (e.sigma_hz <= 0) throw std::invalid_argument("fit_geometry: sigmas must be > 0");

    Vec3 mean_field = Vec3::Zero();
    double mean_value = 0;
    for (const auto& e : dataset.entries) {
        mean_field += e.field.B;
        mean_value += std::abs(e.value_hz) / (e.observable == DeerObservable::Sum ? 2.0 : 1.0);
    }
    mean_value /= dataset.entries.size();
    if (mean_field.norm() < 1e-12 || mean_value <= 0)
        throw std::invalid_argument("fit_geometry: dataset carries no field/value information");
    Vec3 field_dir = mean_field.normalized();

    auto axes4 = nv_axes();
    Vec3 axis_a = axes4[0];
    double best_align = -1;
    for (const auto& ax : axes4) {
        if (std::abs(ax.dot(field_dir)) > best_align) {
            best_align = std::abs(ax.dot(field_dir));
            axis_a = ax.dot(field_dir) >= 0 ? ax : Vec3(-ax);
        }
    }

    // start radius from the point-dipole coupling scale
    double pref_const = dipolar_prefactor(1.0, pc);  // mu0 (g muB)^2 / (4 pi h)
    double r0 = std::cbrt(pref_const / mean_value);

    std::vector<Vec3> dirs;
    for (int ix = -1; ix <= 1; ++ix)
        for (int iy = -1; iy <= 1; ++iy)
            for (int iz = -1; iz <= 1; ++iz)
                if (ix || iy || iz) dirs.push_back(Vec3(ix, iy, iz).normalized());

    GeometryEstimate best;
    best.residual = std::numeric_limits<double>::infinity();
    double second_axis = std::numeric_limits<double>::infinity();
    double best_any = std::numeric_limits<double>::infinity();
    bool found = false;

    for (const auto& axis_b : axes4) {
        AxisAssignment axes{axis_a, axis_b};
        LmResult axis_best;
        for (const auto& d : dirs) {
            LmResult r = lm_minimize(r0 * d, axes, dataset, opt, pc);
            best_any = std::min(best_any, r.chi2);
            if (r.converged && r.chi2 < axis_best.chi2) axis_best = r;
        }
        if (!axis_best.converged) continue;
        if (axis_best.chi2 < best.residual) {
            second_axis = best.residual;
            best.residual = axis_best.chi2;
            best.displacement = axis_best.x;
            best.mirror_displacement = -axis_best.x;
            best.axes = axes;
            Eigen::Matrix3d jtj = axis_best.jtj;
            jtj += 1e-30 * Eigen::Matrix3d::Identity() * jtj.trace();
            best.covariance = jtj.inverse();
            best.covariance = 0.5 * (best.covariance + best.covariance.transpose()).eval();
            found = true;
        } else {
            second_axis = std::min(second_axis, axis_best.chi2);
        }
    }
    if (!found) {
        std::ostringstream msg;
        msg << "fit_geometry: no start converged (best residual " << best_any << ")";
        throw FitError(msg.str());
    }
    best.axis_margin = std::isfinite(second_axis) ? second_axis - best.residual : 0.0;
    return best;
}

Vec3 lattice_position(const Eigen::Vector3i& cell, int basis) {
    const double a = kDiamondLattice;
    static const Vec3 a1(0, a / 2, a / 2), a2(a / 2, 0, a / 2), a3(a / 2, a / 2, 0);
    Vec3 p = cell[0] * a1 + cell[1] * a2 + cell[2] * a3;
    if (basis) p += Vec3(a / 4, a / 4, a / 4);
    return p;
}

std::vector<LatticeSite> enumerate_sites(const Ellipsoid& region) {
    if (region.scale <= 0) throw std::invalid_argument("enumerate_sites: scale must be > 0");
    Eigen::LLT<Eigen::Matrix3d> llt(region.covariance);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("enumerate_sites: covariance must be positive definite");
    Eigen::Matrix3d prec = llt.solve(Eigen::Matrix3d::Identity());

    // cartesian bounding half-widths of {x : x' prec x <= scale^2}
    Vec3 half;
    for (int i = 0; i < 3; ++i)
        half[i] = region.scale * std::sqrt(std::max(region.covariance(i, i), 0.0));

    const double a = kDiamondLattice;
    Eigen::Matrix3d cell_to_xyz;
    cell_to_xyz.col(0) = Vec3(0, a / 2, a / 2);
    cell_to_xyz.col(1) = Vec3(a / 2, 0, a / 2);
    cell_to_xyz.col(2) = Vec3(a / 2, a / 2, 0);
    Eigen::Matrix3d xyz_to_cell = cell_to_xyz.inverse();

    std::vector<LatticeSite> sites;
    for (int basis = 0; basis < 2; ++basis) {
        Vec3 shift = basis ? Vec3(a / 4, a / 4, a / 4) : Vec3::Zero();
        Vec3 n0 = xyz_to_cell * (region.center - shift);
        Vec3 nw = Vec3::Zero();
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) nw[i] += std::abs(xyz_to_cell(i, j)) * half[j];
        for (int n1 = static_cast<int>(std::floor(n0[0] - nw[0])) - 1;
             n1 <= static_cast<int>(std::ceil(n0[0] + nw[0])) + 1; ++n1)
            for (int n2 = static_cast<int>(std::floor(n0[1] - nw[1])) - 1;
                 n2 <= static_cast<int>(std::ceil(n0[1] + nw[1])) + 1; ++n2)
                for (int n3 = static_cast<int>(std::floor(n0[2] - nw[2])) - 1;
                     n3 <= static_cast<int>(std::ceil(n0[2] + nw[2])) + 1; ++n3) {
                    LatticeSite s;
                    s.cell = Eigen::Vector3i(n1, n2, n3);
                    s.basis = basis;
                    s.position = lattice_position(s.cell, basis);
                    Vec3 d = s.position - region.center;
                    s.mahalanobis = std::sqrt(d.dot(prec * d));
                    if (s.mahalanobis <= region.scale) sites.push_back(s);
                }
    }
    std::sort(sites.begin(), sites.end(),
              [](const LatticeSite& x, const LatticeSite& y) {
                  return x.mahalanobis < y.mahalanobis;
              });
    return sites;
}

double coulomb_field(double r, const PhysicalConstants& pc) {
    if (r <= 0) throw std::domain_error("coulomb_field: r must be > 0");
    return pc.q_e / (4 * M_PI * pc.eps0 * pc.eps_r_diamond * r * r);
}

double stark_splitting(double e_perp) {
    if (e_perp < 0) throw std::domain_error("stark_splitting: field must be >= 0");
    return 0.17 * e_perp;  // 0.17 MHz per MV/m == 0.17 Hz per V/m
}

}  // namespace nvreg
