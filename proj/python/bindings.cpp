// python bindings for the main operations

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nvreg/dynamics.hpp"
#include "nvreg/locate.hpp"
#include "nvreg/measure.hpp"
#include "nvreg/optics.hpp"
#include "nvreg/sequences.hpp"
#include "nvreg/spincore.hpp"

namespace py = pybind11;
using namespace nvreg;

PYBIND11_MODULE(_core, m) {
    m.doc() = "coupled S=1 pair simulator";
    m.attr("__version__") = kVersion;

    py::register_exception<LabelingError>(m, "LabelingError");
    py::register_exception<ParseError>(m, "ParseError");
    py::register_exception<FitError>(m, "FitError");

    py::class_<PhysicalConstants>(m, "PhysicalConstants")
        .def(py::init<>())
        .def_readwrite("mu0", &PhysicalConstants::mu0)
        .def_readwrite("muB", &PhysicalConstants::muB)
        .def_readwrite("g_e", &PhysicalConstants::g_e)
        .def_readwrite("h", &PhysicalConstants::h)
        .def("gamma_e", &PhysicalConstants::gamma_e);

    py::class_<NVCenter>(m, "NVCenter")
        .def(py::init<>())
        .def_readwrite("axis", &NVCenter::axis)
        .def_readwrite("D", &NVCenter::D)
        .def_readwrite("E", &NVCenter::E);

    py::class_<FieldSetting>(m, "FieldSetting")
        .def(py::init<>())
        .def_readwrite("B", &FieldSetting::B);

    py::class_<SpinPairSystem>(m, "SpinPairSystem")
        .def(py::init<>())
        .def_readwrite("center_a", &SpinPairSystem::center_a)
        .def_readwrite("center_b", &SpinPairSystem::center_b)
        .def_readwrite("displacement", &SpinPairSystem::displacement);

    py::enum_<Spin>(m, "Spin").value("A", Spin::A).value("B", Spin::B);

    py::class_<PairHamiltonian>(m, "PairHamiltonian")
        .def_readonly("matrix", &PairHamiltonian::matrix);

    py::class_<Eigensystem>(m, "Eigensystem")
        .def_readonly("values", &Eigensystem::values)
        .def_readonly("vectors", &Eigensystem::vectors);

    py::class_<DeerFrequencies>(m, "DeerFrequencies")
        .def_readonly("dnu1", &DeerFrequencies::dnu1)
        .def_readonly("dnu2", &DeerFrequencies::dnu2)
        .def_readonly("s1", &DeerFrequencies::s1)
        .def_readonly("s2", &DeerFrequencies::s2)
        .def("sum", &DeerFrequencies::sum)
        .def("dq", &DeerFrequencies::dq);

    m.def("pair_hamiltonian", &pair_hamiltonian, py::arg("system"), py::arg("field"),
          py::arg("constants") = PhysicalConstants{});
    m.def("dipolar_hamiltonian", &dipolar_hamiltonian, py::arg("system"),
          py::arg("constants") = PhysicalConstants{});
    m.def("single_center_hamiltonian", &single_center_hamiltonian, py::arg("center"),
          py::arg("field"), py::arg("constants") = PhysicalConstants{});
    m.def("eigensystem", &eigensystem);
    m.def("deer_frequencies", &deer_frequencies, py::arg("system"), py::arg("field"),
          py::arg("constants") = PhysicalConstants{});
    m.def("transition_frequency", &transition_frequency, py::arg("h"), py::arg("spin"),
          py::arg("m_from"), py::arg("m_to"), py::arg("partner_state"));
    m.def("dipolar_prefactor", &dipolar_prefactor, py::arg("r"),
          py::arg("constants") = PhysicalConstants{});

    py::class_<QuantumState>(m, "QuantumState")
        .def(py::init<>())
        .def_readwrite("rho", &QuantumState::rho);

    py::class_<DecoherenceParams>(m, "DecoherenceParams")
        .def(py::init<>())
        .def_readwrite("t2_a", &DecoherenceParams::t2_a)
        .def_readwrite("t2_b", &DecoherenceParams::t2_b)
        .def_readwrite("t2star_a", &DecoherenceParams::t2star_a)
        .def_readwrite("t2star_b", &DecoherenceParams::t2star_b)
        .def_readwrite("t2star_samples", &DecoherenceParams::t2star_samples);

    m.def("pure_state", &pure_state);
    m.def("initialize_register", &initialize_register, py::arg("p0_a") = 1.0,
          py::arg("p0_b") = 1.0);
    m.def("evolve_free", &evolve_free, py::arg("state"), py::arg("h"), py::arg("t"),
          py::arg("dec") = DecoherenceParams{});
    m.def("fidelity", &fidelity);
    m.def("population", &population);

    py::class_<SequenceParams>(m, "SequenceParams")
        .def(py::init<>())
        .def_readwrite("tau", &SequenceParams::tau)
        .def_readwrite("sweep_start", &SequenceParams::sweep_start)
        .def_readwrite("sweep_stop", &SequenceParams::sweep_stop)
        .def_readwrite("sweep_points", &SequenceParams::sweep_points)
        .def_readwrite("detuning_hz", &SequenceParams::detuning_hz)
        .def_readwrite("partner_prep", &SequenceParams::partner_prep)
        .def_readwrite("detuned_control", &SequenceParams::detuned_control)
        .def_readwrite("sweep_tau", &SequenceParams::sweep_tau);

    py::class_<PulseProgram>(m, "PulseProgram")
        .def_readonly("name", &PulseProgram::name)
        .def("__len__", [](const PulseProgram& p) { return p.events.size(); })
        .def(py::self == py::self);

    py::class_<SignalTrace>(m, "SignalTrace")
        .def_readonly("abscissa", &SignalTrace::abscissa)
        .def_readonly("values", &SignalTrace::values)
        .def_readonly("name", &SignalTrace::name);

    m.def("parse_program", &parse_program);
    m.def("render_program", &render_program);
    m.def("build_named", &build_named);

    py::enum_<Normalization>(m, "Normalization")
        .value("NONE", Normalization::None)
        .value("SPIN_FLIP", Normalization::SpinFlip);

    py::class_<ReadoutModel>(m, "ReadoutModel")
        .def(py::init<>())
        .def_readwrite("contrast", &ReadoutModel::contrast)
        .def_readwrite("photon_budget", &ReadoutModel::photon_budget)
        .def_readwrite("normalization", &ReadoutModel::normalization);

    m.def(
        "run_program",
        [](const PulseProgram& prog, const SpinPairSystem& sys, const FieldSetting& field,
           const DecoherenceParams& dec, const ReadoutModel& model, uint64_t seed, double p0_a,
           double p0_b) {
            return run_program(prog, sys, field, dec, PhysicalConstants{}, model, seed,
                               RunOptions{p0_a, p0_b});
        },
        py::arg("program"), py::arg("system"), py::arg("field"),
        py::arg("dec") = DecoherenceParams{}, py::arg("readout_model") = ReadoutModel{},
        py::arg("seed") = 0, py::arg("p0_a") = 1.0, py::arg("p0_b") = 1.0);
    m.def(
        "state_probe",
        [](const PulseProgram& prog, size_t prefix, const SpinPairSystem& sys,
           const FieldSetting& field, const DecoherenceParams& dec,
           std::optional<double> sweep_value) {
            return state_probe(prog, prefix, sys, field, dec, PhysicalConstants{}, sweep_value);
        },
        py::arg("program"), py::arg("prefix_length"), py::arg("system"), py::arg("field"),
        py::arg("dec") = DecoherenceParams{}, py::arg("sweep_value") = std::nullopt);

    m.def("readout", &readout, py::arg("state"), py::arg("spin"), py::arg("model"),
          py::arg("seed") = std::nullopt);

    py::class_<Spectrum>(m, "Spectrum")
        .def_readonly("frequencies", &Spectrum::frequencies)
        .def_readonly("magnitudes", &Spectrum::magnitudes)
        .def_readonly("power", &Spectrum::power)
        .def_readonly("df", &Spectrum::df);
    py::class_<Peak>(m, "Peak")
        .def_readonly("frequency", &Peak::frequency)
        .def_readonly("amplitude", &Peak::amplitude);
    py::class_<PeakSet>(m, "PeakSet")
        .def_readonly("peaks", &PeakSet::peaks)
        .def_readonly("complete", &PeakSet::complete);
    py::class_<ModulationFit>(m, "ModulationFit")
        .def_readonly("frequency", &ModulationFit::frequency)
        .def_readonly("amplitude", &ModulationFit::amplitude)
        .def_readonly("phase", &ModulationFit::phase)
        .def_readonly("offset", &ModulationFit::offset)
        .def_readonly("flat", &ModulationFit::flat);

    m.def("fft_spectrum", &fft_spectrum);
    m.def("extract_peaks", &extract_peaks);
    m.def("estimate_polarization", &estimate_polarization);
    m.def("fit_modulation", &fit_modulation);

    py::enum_<DeerObservable>(m, "DeerObservable")
        .value("DNU1", DeerObservable::Dnu1)
        .value("DNU2", DeerObservable::Dnu2)
        .value("SUM", DeerObservable::Sum);
    py::class_<DeerEntry>(m, "DeerEntry")
        .def(py::init<>())
        .def_readwrite("field", &DeerEntry::field)
        .def_readwrite("observable", &DeerEntry::observable)
        .def_readwrite("value_hz", &DeerEntry::value_hz)
        .def_readwrite("sigma_hz", &DeerEntry::sigma_hz)
        .def_readwrite("ok", &DeerEntry::ok);
    py::class_<DeerDataset>(m, "DeerDataset")
        .def(py::init<>())
        .def_readwrite("entries", &DeerDataset::entries);
    py::class_<AxisAssignment>(m, "AxisAssignment")
        .def(py::init<>())
        .def_readwrite("axis_a", &AxisAssignment::axis_a)
        .def_readwrite("axis_b", &AxisAssignment::axis_b);
    py::class_<PairGeometry>(m, "PairGeometry")
        .def(py::init<>())
        .def_readwrite("displacement", &PairGeometry::displacement)
        .def_readwrite("d_a", &PairGeometry::d_a)
        .def_readwrite("e_a", &PairGeometry::e_a)
        .def_readwrite("d_b", &PairGeometry::d_b)
        .def_readwrite("e_b", &PairGeometry::e_b);
    py::class_<GeometryEstimate>(m, "GeometryEstimate")
        .def_readonly("displacement", &GeometryEstimate::displacement)
        .def_readonly("mirror_displacement", &GeometryEstimate::mirror_displacement)
        .def_readonly("covariance", &GeometryEstimate::covariance)
        .def_readonly("axes", &GeometryEstimate::axes)
        .def_readonly("residual", &GeometryEstimate::residual)
        .def_readonly("axis_margin", &GeometryEstimate::axis_margin);
    py::class_<Ellipsoid>(m, "Ellipsoid")
        .def(py::init<>())
        .def_readwrite("center", &Ellipsoid::center)
        .def_readwrite("covariance", &Ellipsoid::covariance)
        .def_readwrite("scale", &Ellipsoid::scale);
    py::class_<LatticeSite>(m, "LatticeSite")
        .def_readonly("cell", &LatticeSite::cell)
        .def_readonly("basis", &LatticeSite::basis)
        .def_readonly("position", &LatticeSite::position)
        .def_readonly("mahalanobis", &LatticeSite::mahalanobis);

    m.def("predict_dataset", &predict_dataset, py::arg("geometry"), py::arg("axes"),
          py::arg("request"), py::arg("constants") = PhysicalConstants{});
    m.def(
        "fit_geometry",
        [](const DeerDataset& data) { return fit_geometry(data); }, py::arg("dataset"));
    m.def("nv_axes", &nv_axes);
    m.def("enumerate_sites", &enumerate_sites);
    m.def("lattice_position", &lattice_position, py::arg("cell"), py::arg("basis"));
    m.def("coulomb_field", &coulomb_field, py::arg("r"),
          py::arg("constants") = PhysicalConstants{});
    m.def("stark_splitting", &stark_splitting);

    py::class_<EmitterModel>(m, "EmitterModel")
        .def(py::init<>())
        .def_readwrite("position_nm", &EmitterModel::position_nm)
        .def_readwrite("lifetime_ns", &EmitterModel::lifetime_ns)
        .def_readwrite("brightness", &EmitterModel::brightness);
    py::class_<FlimGrid>(m, "FlimGrid")
        .def(py::init<>())
        .def_readwrite("width", &FlimGrid::width)
        .def_readwrite("height", &FlimGrid::height)
        .def_readwrite("pitch_nm", &FlimGrid::pitch_nm)
        .def_readwrite("bins", &FlimGrid::bins)
        .def_readwrite("bin_ns", &FlimGrid::bin_ns);
    py::class_<FlimImage>(m, "FlimImage")
        .def_readonly("grid", &FlimImage::grid)
        .def_readonly("counts", &FlimImage::counts);
    py::class_<AmplitudeImage>(m, "AmplitudeImage")
        .def_readonly("width", &AmplitudeImage::width)
        .def_readonly("height", &AmplitudeImage::height)
        .def_readonly("pitch_nm", &AmplitudeImage::pitch_nm)
        .def_readonly("values", &AmplitudeImage::values);
    py::class_<AmplitudePair>(m, "AmplitudePair")
        .def_readonly("a1", &AmplitudePair::a1)
        .def_readonly("a2", &AmplitudePair::a2);
    py::class_<DisplacementEstimate>(m, "DisplacementEstimate")
        .def_readonly("delta_nm", &DisplacementEstimate::delta_nm)
        .def_readonly("uncertainty_nm", &DisplacementEstimate::uncertainty_nm)
        .def_readonly("ok", &DisplacementEstimate::ok);

    m.def("synthesize_flim", &synthesize_flim, py::arg("emitters"), py::arg("psf_fwhm_nm"),
          py::arg("photons"), py::arg("seed"), py::arg("grid") = FlimGrid{});
    m.def("fit_amplitudes", &fit_amplitudes, py::arg("image"), py::arg("tau1_ns"),
          py::arg("tau2_ns"));
    m.def("correlate_displacement", &correlate_displacement, py::arg("img1"), py::arg("img2"));
    m.def("g2_zero", &g2_zero);
    m.def("gsd_resolution", &gsd_resolution);
}
