#include "afcsim/afc.hpp"
#include "afcsim/commensurate.hpp"
#include "afcsim/config.hpp"
#include "afcsim/error.hpp"
#include "afcsim/material.hpp"
#include "afcsim/pipeline.hpp"
#include "afcsim/pumping.hpp"
#include "afcsim/seqcompile.hpp"
#include "afcsim/spectrum.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace afcsim;

namespace {

py::array_t<double> to_array(const std::vector<double>& v)
{
    return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

ScheduleFormat format_of(const std::string& name)
{
    if (name == "csv") {
        return ScheduleFormat::csv;
    }
    if (name == "json") {
        return ScheduleFormat::json;
    }
    throw InvalidArgument("format must be 'csv' or 'json'");
}

std::string run_command(const std::string& command, const std::string& config, const std::string& out,
                        std::optional<std::uint64_t> seed)
{
    std::vector<Override> overrides;
    if (seed) {
        overrides.push_back({"/seed", std::to_string(*seed)});
    }
    const std::string path = resolve_config_path(config);
    const std::string text = read_text_file(path);
    const RunConfig cfg = parse_config(text, path, overrides);
    CommandOutput result;
    if (command == "holeburn") {
        result = cmd_holeburn(cfg);
    } else if (command == "pump") {
        result = cmd_pump(cfg);
    } else if (command == "store") {
        result = cmd_store(cfg);
    } else if (command == "commensurate") {
        result = cmd_commensurate(cfg);
    } else if (command == "compile") {
        result = cmd_compile(cfg);
    } else if (command == "sweep") {
        result = cmd_sweep(text, path, overrides);
    } else {
        throw InvalidArgument("unknown command '" + command + "'");
    }
    result.files.commit(out.empty() ? cfg.output_dir : out);
    return result.summary;
}

} // namespace

PYBIND11_MODULE(_afcsim, m)
{
    m.doc() = "Atomic frequency comb memory simulator";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    auto invalid = py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", invalid.ptr());
    py::register_exception<ResolutionError>(m, "ResolutionError", base.ptr());
    py::register_exception<AliasingError>(m, "AliasingError", base.ptr());
    py::register_exception<CompileError>(m, "CompileError", base.ptr());

    py::enum_<Lineshape>(m, "Lineshape").value("gaussian", Lineshape::gaussian).value("lorentzian", Lineshape::lorentzian);

    py::class_<IonClass>(m, "IonClass")
        .def(py::init<>())
        .def_readwrite("mu_e", &IonClass::mu_e)
        .def_readwrite("mu_g", &IonClass::mu_g)
        .def_readwrite("branching_ratio", &IonClass::branching_ratio)
        .def_readwrite("t_bottleneck_ms", &IonClass::t_bottleneck_ms)
        .def_readwrite("t_ground_ms", &IonClass::t_ground_ms)
        .def_readwrite("t2_opt_us", &IonClass::t2_opt_us)
        .def_readwrite("hole_fwhm_mhz", &IonClass::hole_fwhm_mhz)
        .def_readwrite("rel_crossed", &IonClass::rel_crossed)
        .def_readwrite("lineshape", &IonClass::lineshape)
        .def_readwrite("t_excited_ms", &IonClass::t_excited_ms)
        .def_readwrite("spin_branching", &IonClass::spin_branching)
        .def("validate", &IonClass::validate);

    py::class_<Splittings>(m, "Splittings")
        .def_readonly("excited_mhz", &Splittings::excited_mhz)
        .def_readonly("ground_mhz", &Splittings::ground_mhz);
    m.def("zeeman_splittings",
          [](double gauss, const IonClass& ion) { return zeeman_splittings(ion, FieldConfig{gauss}); },
          py::arg("gauss"), py::arg("ion") = IonClass{});

    py::enum_<FeatureKind>(m, "FeatureKind").value("hole", FeatureKind::hole).value("antihole", FeatureKind::antihole);
    py::class_<SpectralFeature>(m, "SpectralFeature")
        .def_readonly("offset_mhz", &SpectralFeature::offset_mhz)
        .def_readonly("kind", &SpectralFeature::kind)
        .def_readonly("weight", &SpectralFeature::weight)
        .def("__repr__", [](const SpectralFeature& f) {
            return "<SpectralFeature " + std::string(f.kind == FeatureKind::hole ? "hole" : "antihole") + " at " +
                   std::to_string(f.offset_mhz) + " MHz, weight " + std::to_string(f.weight) + ">";
        });
    py::class_<HolePattern>(m, "HolePattern")
        .def_readonly("delta_e_mhz", &HolePattern::delta_e_mhz)
        .def_readonly("delta_g_mhz", &HolePattern::delta_g_mhz)
        .def_readonly("features", &HolePattern::features)
        .def("count", &HolePattern::count);
    m.def(
        "hole_pattern",
        [](double delta_e, double delta_g, const IonClass& ion, bool hole_only_class) {
            HolePatternOptions o;
            o.include_hole_only_class = hole_only_class;
            return hole_pattern(delta_e, delta_g, ion, o);
        },
        py::arg("delta_e_mhz"), py::arg("delta_g_mhz"), py::arg("ion") = IonClass{},
        py::arg("hole_only_class") = false);

    py::class_<Spectrum>(m, "Spectrum")
        .def_property_readonly("detuning_mhz", [](const Spectrum& s) { return to_array(s.grid.values()); })
        .def_property_readonly("od", [](const Spectrum& s) { return to_array(s.od); })
        .def_property_readonly("pop_g1", [](const Spectrum& s) { return to_array(s.pop_g1); })
        .def_property_readonly("pop_g2", [](const Spectrum& s) { return to_array(s.pop_g2); })
        .def_property_readonly("pop_exc", [](const Spectrum& s) { return to_array(s.pop_exc); })
        .def_readonly("baseline_od", &Spectrum::baseline_od)
        .def_readonly("converged", &Spectrum::converged)
        .def("total_population", &Spectrum::total_population)
        .def("__len__", &Spectrum::size);
    m.def(
        "baseline_spectrum",
        [](double peak_od, int passes, double min_mhz, double max_mhz, double step_mhz, const IonClass& ion) {
            return baseline_spectrum(peak_od, passes, GridSpec{min_mhz, max_mhz, step_mhz}, ion);
        },
        py::arg("peak_od"), py::arg("passes"), py::arg("min_mhz"), py::arg("max_mhz"), py::arg("step_mhz"),
        py::arg("ion") = IonClass{});

    py::class_<AFCSpec>(m, "AFCSpec")
        .def(py::init<>())
        .def_readwrite("spacing_mhz", &AFCSpec::spacing_mhz)
        .def_readwrite("finesse", &AFCSpec::finesse)
        .def_readwrite("depth", &AFCSpec::depth)
        .def_readwrite("background", &AFCSpec::background)
        .def_readwrite("bandwidth_mhz", &AFCSpec::bandwidth_mhz)
        .def_readwrite("centers_mhz", &AFCSpec::centers_mhz);
    m.def(
        "square_comb",
        [](const AFCSpec& spec, double min_mhz, double max_mhz, double step_mhz) {
            return square_comb(spec, GridSpec{min_mhz, max_mhz, step_mhz});
        },
        py::arg("spec"), py::arg("min_mhz"), py::arg("max_mhz"), py::arg("step_mhz"));
    m.def("efficiency_analytic", &efficiency_analytic, py::arg("depth"), py::arg("finesse"), py::arg("background"));
    m.def("optimal_depth", &optimal_depth, py::arg("finesse"), py::arg("background") = 0.0);

    py::class_<EchoWindow>(m, "EchoWindow")
        .def_readonly("order", &EchoWindow::order)
        .def_readonly("efficiency", &EchoWindow::efficiency)
        .def_readonly("peak_time_ns", &EchoWindow::peak_time_ns)
        .def_readonly("delay_ns", &EchoWindow::delay_ns);
    py::class_<EchoTrace>(m, "EchoTrace")
        .def_property_readonly("time_ns", [](const EchoTrace& t) { return to_array(t.time_ns); })
        .def_property_readonly("input", [](const EchoTrace& t) { return to_array(t.input); })
        .def_property_readonly("output", [](const EchoTrace& t) { return to_array(t.output); })
        .def_readonly("echoes", &EchoTrace::echoes)
        .def_readonly("output_energy", &EchoTrace::output_energy)
        .def_readonly("precursor_ratio", &EchoTrace::precursor_ratio)
        .def("efficiency", &EchoTrace::efficiency, py::arg("order"));
    m.def(
        "propagate",
        [](const Spectrum& s, double fwhm_ns, double center_mhz, double comb_spacing_mhz, int max_echo_order,
           double max_dt_ns, double alias_tolerance) {
            PropagateOptions o;
            o.comb_spacing_mhz = comb_spacing_mhz;
            o.max_echo_order = max_echo_order;
            o.max_dt_ns = max_dt_ns;
            o.alias_tolerance = alias_tolerance;
            py::gil_scoped_release release;
            return propagate(s, InputPulse{fwhm_ns, center_mhz}, o);
        },
        py::arg("spectrum"), py::arg("fwhm_ns"), py::arg("center_mhz") = 0.0, py::arg("comb_spacing_mhz") = 0.0,
        py::arg("max_echo_order") = 5, py::arg("max_dt_ns") = 1.0, py::arg("alias_tolerance") = 1e-3);

    py::class_<CombMetrics>(m, "CombMetrics")
        .def_readonly("peak_od", &CombMetrics::peak_od)
        .def_readonly("background", &CombMetrics::background)
        .def_readonly("depth", &CombMetrics::depth)
        .def_readonly("finesse", &CombMetrics::finesse);
    m.def("comb_metrics", &comb_metrics, py::arg("spectrum"), py::arg("spacing_mhz"), py::arg("center_mhz"),
          py::arg("bandwidth_mhz"));

    py::class_<CountStats>(m, "CountStats")
        .def_readonly("events", &CountStats::events)
        .def_readonly("mean_photon", &CountStats::mean_photon)
        .def_readonly("signal_counts", &CountStats::signal_counts)
        .def_readonly("noise_counts", &CountStats::noise_counts)
        .def_readonly("snr", &CountStats::snr);
    m.def("count_statistics", &count_statistics, py::arg("eta"), py::arg("mean_photon"), py::arg("events"),
          py::arg("noise_per_window"), py::arg("seed"), py::arg("threads") = 1,
          py::call_guard<py::gil_scoped_release>());

    py::class_<PumpWindow>(m, "PumpWindow")
        .def(py::init([](double center, double bandwidth, double spacing, double delta_p) {
                 return PumpWindow{center, bandwidth, spacing, delta_p};
             }),
             py::arg("center_mhz"), py::arg("bandwidth_mhz"), py::arg("spacing_mhz") = 0.0,
             py::arg("delta_p_mhz") = 0.0)
        .def_readwrite("center_mhz", &PumpWindow::center_mhz)
        .def_readwrite("bandwidth_mhz", &PumpWindow::bandwidth_mhz)
        .def_readwrite("spacing_mhz", &PumpWindow::spacing_mhz)
        .def_readwrite("delta_p_mhz", &PumpWindow::delta_p_mhz);
    py::class_<PumpTarget>(m, "PumpTarget")
        .def(py::init<>())
        .def_readwrite("comb_spacing_mhz", &PumpTarget::comb_spacing_mhz)
        .def_readwrite("tooth_width_mhz", &PumpTarget::tooth_width_mhz)
        .def_readwrite("windows", &PumpTarget::windows)
        .def_readwrite("wait_ms", &PumpTarget::wait_ms);
    py::class_<PulseTrain>(m, "PulseTrain")
        .def(py::init<>())
        .def_readwrite("t0_ms", &PulseTrain::t0_ms)
        .def_readwrite("repetitions", &PulseTrain::repetitions)
        .def_readwrite("delta_p_mhz", &PulseTrain::delta_p_mhz)
        .def_readwrite("peak_rate_per_ms", &PulseTrain::peak_rate_per_ms);
    m.def(
        "simulate_pumping",
        [](const Spectrum& input, const PumpTarget& target, const PulseTrain& train, double gauss,
           const IonClass& ion) {
            const Splittings z = zeeman_splittings(ion, FieldConfig{gauss});
            const HolePattern p = hole_pattern(z.excited_mhz, z.ground_mhz, ion);
            py::gil_scoped_release release;
            return simulate_pumping(input, target, train, p, ion);
        },
        py::arg("input"), py::arg("target"), py::arg("train"), py::arg("gauss"), py::arg("ion") = IonClass{});
    m.def("hole_decay", &hole_decay, py::arg("depth_fast"), py::arg("depth_slow"), py::arg("t_ms"),
          py::arg("ion") = IonClass{});

    m.def("mismatch", &mismatch, py::arg("field_g"), py::arg("spacing_mhz"), py::arg("ion") = IonClass{});
    m.def(
        "residues",
        [](double field_g, double spacing_mhz, const IonClass& ion) {
            const CommensurateResidues r = residues(field_g, spacing_mhz, ion);
            return py::make_tuple(r.quotients, r.distances);
        },
        py::arg("field_g"), py::arg("spacing_mhz"), py::arg("ion") = IonClass{});
    m.def(
        "mismatch_map",
        [](std::tuple<double, double, double> field, std::tuple<double, double, double> second,
           const std::string& axis, const IonClass& ion, int threads) {
            if (axis != "storage_time_ns" && axis != "spacing_mhz") {
                throw InvalidArgument("axis must be 'storage_time_ns' or 'spacing_mhz'");
            }
            const MismatchMap map = [&] {
                py::gil_scoped_release release;
                return mismatch_map({std::get<0>(field), std::get<1>(field), std::get<2>(field)},
                                    {std::get<0>(second), std::get<1>(second), std::get<2>(second)},
                                    axis == "spacing_mhz" ? SpacingAxis::spacing_mhz : SpacingAxis::storage_time_ns,
                                    ion, threads);
            }();
            py::array_t<double> values({map.field_g.size(), map.second.size()});
            std::copy(map.values.begin(), map.values.end(), values.mutable_data());
            return py::make_tuple(to_array(map.field_g), to_array(map.second), values);
        },
        py::arg("field"), py::arg("second"), py::arg("axis") = "storage_time_ns", py::arg("ion") = IonClass{},
        py::arg("threads") = 1);
    m.def(
        "search_field",
        [](double spacing_mhz, std::tuple<double, double, double> field, const IonClass& ion, std::size_t top_k) {
            py::list out;
            for (const auto& c : search_field(spacing_mhz, {std::get<0>(field), std::get<1>(field), std::get<2>(field)},
                                              ion, top_k)) {
                out.append(py::make_tuple(c.field_g, c.mismatch));
            }
            return out;
        },
        py::arg("spacing_mhz"), py::arg("field"), py::arg("ion") = IonClass{}, py::arg("top_k") = 5);
    m.def("intrinsic_delta", &intrinsic_delta, py::arg("field_g"), py::arg("ion") = IonClass{});

    py::class_<HardwareLimits>(m, "HardwareLimits")
        .def(py::init<>())
        .def_readwrite("aom_bandwidth_mhz", &HardwareLimits::aom_bandwidth_mhz)
        .def_readwrite("aom_double_pass", &HardwareLimits::aom_double_pass)
        .def_readwrite("aom_center_mhz", &HardwareLimits::aom_center_mhz)
        .def_readwrite("eom_max_tones", &HardwareLimits::eom_max_tones)
        .def_readwrite("eom_extinction", &HardwareLimits::eom_extinction)
        .def_readwrite("etalon_enabled", &HardwareLimits::etalon_enabled)
        .def_readwrite("etalon_bandwidth_mhz", &HardwareLimits::etalon_bandwidth_mhz)
        .def_readwrite("etalon_center_mhz", &HardwareLimits::etalon_center_mhz);
    py::class_<RFSchedule>(m, "RFSchedule")
        .def_readonly("repetitions", &RFSchedule::repetitions)
        .def_readonly("period_ms", &RFSchedule::period_ms)
        .def_property_readonly("segments", [](const RFSchedule& s) { return s.aom_segments.size(); })
        .def_property_readonly("eom_tones_mhz",
                               [](const RFSchedule& s) {
                                   std::vector<double> f;
                                   for (const auto& t : s.eom_tones) {
                                       f.push_back(t.freq_mhz);
                                   }
                                   return f;
                               })
        .def_property_readonly("optical_tones_mhz",
                               [](const RFSchedule& s) {
                                   std::vector<std::pair<int, double>> f;
                                   for (const auto& t : s.optical_tones) {
                                       f.emplace_back(t.gate, t.offset_mhz);
                                   }
                                   return f;
                               })
        .def("total_ms", &RFSchedule::total_ms)
        .def("__eq__", [](const RFSchedule& a, const RFSchedule& b) { return a == b; });
    py::class_<LeakageWarning>(m, "LeakageWarning")
        .def_readonly("gate", &LeakageWarning::gate)
        .def_readonly("tone_offset_mhz", &LeakageWarning::tone_offset_mhz)
        .def_readonly("amplitude", &LeakageWarning::amplitude)
        .def_readonly("window", &LeakageWarning::window)
        .def_readonly("reason", &LeakageWarning::reason);
    py::class_<CoverageReport>(m, "CoverageReport")
        .def_readonly("comb_lines", &CoverageReport::comb_lines)
        .def_readonly("bandwidth_mhz", &CoverageReport::bandwidth_mhz)
        .def_readonly("optical_tones", &CoverageReport::optical_tones)
        .def_readonly("warnings", &CoverageReport::warnings);
    m.def("compile", &compile, py::arg("target"), py::arg("train"), py::arg("limits") = HardwareLimits{});
    m.def("coverage", &coverage, py::arg("schedule"), py::arg("target"), py::arg("limits") = HardwareLimits{});
    m.def(
        "emit", [](const RFSchedule& s, const std::string& fmt) { return emit(s, format_of(fmt)); },
        py::arg("schedule"), py::arg("format") = "csv");
    m.def("parse_json", &parse_json, py::arg("text"));
    m.def("parse_csv", &parse_csv, py::arg("text"));

    m.def("run", &run_command, py::arg("command"), py::arg("config"), py::arg("out") = "",
          py::arg("seed") = std::nullopt, py::call_guard<py::gil_scoped_release>(),
          "Runs a CLI command on a config file and writes its outputs; returns the summary text.");
}
