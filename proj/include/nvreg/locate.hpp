#pragma once
// Inverse problem: recover the partner displacement from DEER frequencies
// measured at several field settings, then enumerate consistent diamond
// lattice sites. Also the Coulomb/Stark side calculations.

#include <string>
#include <vector>

#include "nvreg/spincore.hpp"

namespace nvreg {

enum class DeerObservable { Dnu1, Dnu2, Sum };

struct DeerEntry {
    FieldSetting field;
    DeerObservable observable = DeerObservable::Dnu1;
    double value_hz = 0;
    double sigma_hz = 1;
    bool ok = true;  // cleared by predict_dataset when labeling fails
};

struct DeerDataset {
    std::vector<DeerEntry> entries;
};

DeerDataset load_deer_csv(const std::string& path);
void save_deer_csv(const DeerDataset& data, const std::string& path);

// the four <111> bond directions, unit length
std::array<Vec3, 4> nv_axes();

struct AxisAssignment {
    Vec3 axis_a = Vec3(1, 1, 1).normalized();
    Vec3 axis_b = Vec3(1, 1, 1).normalized();
};

struct PairGeometry {
    Vec3 displacement = Vec3::Zero();  // B relative to A, metres
    double d_a = kDefaultD, e_a = 0;
    double d_b = kDefaultD, e_b = 0;
};

// Forward model: fill in value_hz for each entry of `request` from the
// labeled pair eigensystem; entries where labeling fails come back ok=false.
DeerDataset predict_dataset(const PairGeometry& geometry, const AxisAssignment& axes,
                            const DeerDataset& request, const PhysicalConstants& pc = {});

struct GeometryEstimate {
    Vec3 displacement = Vec3::Zero();
    Vec3 mirror_displacement = Vec3::Zero();  // parity twin, identical residual
    Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
    AxisAssignment axes;
    double residual = 0;     // chi-square at the optimum
    double axis_margin = 0;  // chi-square gap to the best alternative B axis
};

struct FitOptions {
    double d_a = kDefaultD, e_a = 0;
    double d_b = kDefaultD, e_b = 0;
    int max_iterations = 120;
    double tolerance = 1e-10;  // relative chi-square decrease per step
};

// Damped Gauss-Newton over the 3 displacement components, multi-started on a
// spherical grid at the radius implied by the mean coupling; A's axis is the
// <111> direction best aligned with the mean field, B's is searched over all
// four. Throws FitError when no start converges.
GeometryEstimate fit_geometry(const DeerDataset& dataset, const PhysicalConstants& pc = {},
                              const FitOptions& opt = {});

struct Ellipsoid {
    Vec3 center = Vec3::Zero();
    Eigen::Matrix3d covariance = Eigen::Matrix3d::Identity();  // m^2
    double scale = 1.0;                                        // confidence, in sigma
};

struct LatticeSite {
    Eigen::Vector3i cell = Eigen::Vector3i::Zero();  // fcc primitive indices
    int basis = 0;                                   // 0 or 1 (corner / quarter-diagonal)
    Vec3 position = Vec3::Zero();
    double mahalanobis = 0;
};

// All diamond lattice sites inside the scaled ellipsoid, nearest first.
std::vector<LatticeSite> enumerate_sites(const Ellipsoid& region);

// position of a site from its indices (fcc primitive cell + 2-atom basis)
Vec3 lattice_position(const Eigen::Vector3i& cell, int basis);

// Coulomb field of a single elementary charge at distance r inside diamond.
double coulomb_field(double r, const PhysicalConstants& pc = {});

// Transverse-field Stark splitting bound, 0.17 MHz per MV/m.
double stark_splitting(double e_perp);

}  // namespace nvreg
