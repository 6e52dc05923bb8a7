#include "afcsim/pipeline.hpp"

#include "afcsim/error.hpp"
#include "afcsim/plot.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

namespace afcsim {

namespace {

using ojson = nlohmann::ordered_json;

std::string fmt(const char* pattern, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

HolePattern pattern_for(const RunConfig& cfg)
{
    const Splittings s = zeeman_splittings(cfg.ion, cfg.field);
    return hole_pattern(s.excited_mhz, s.ground_mhz, cfg.ion, cfg.pattern);
}

Spectrum baseline_for(const RunConfig& cfg)
{
    return baseline_spectrum(cfg.medium.peak_od, cfg.medium.passes, cfg.grid, cfg.ion, cfg.medium.profile);
}

ojson metrics_json(const CombMetrics& m)
{
    return {{"peak_od", m.peak_od}, {"background_od", m.background}, {"depth_od", m.depth}, {"finesse", m.finesse}};
}

ojson versioned(const char* format)
{
    ojson j;
    j["format"] = format;
    j["version"] = 1;
    return j;
}

ojson pump_json(const PumpResult& r, const RunConfig& cfg)
{
    ojson j = versioned("afcsim.pump");
    j["field_g"] = cfg.field.gauss;
    j["repetitions"] = cfg.train.repetitions;
    j["wait_ms"] = cfg.target.wait_ms;
    j["driver"] = cfg.driver == PumpDriver::schedule ? "schedule" : "direct";
    j["converged"] = r.run.prepared.converged;
    j["population_conservation_error"] = r.conservation_error;
    j["final_floor_od"] = r.run.floor_od_history.empty() ? 0.0 : r.run.floor_od_history.back();
    j["windows"] = ojson::array();
    for (const auto& w : r.windows) {
        ojson wj = metrics_json(w.comb);
        wj["center_mhz"] = w.window.center_mhz;
        wj["bandwidth_mhz"] = w.window.bandwidth_mhz;
        wj["spacing_mhz"] = w.spacing_mhz;
        j["windows"].push_back(wj);
    }
    return j;
}

std::string spectrum_plot(const Spectrum& before, const Spectrum& after, const std::string& title)
{
    Series a{"before pumping", before.grid.values(), before.od};
    Series b{"after pumping", after.grid.values(), after.od};
    return svg_line_plot({a, b}, {title, "detuning (MHz)", "optical depth"});
}

// Trace rows up to the end of the last echo window.
EchoTrace cropped(const EchoTrace& t, double spacing_mhz, int orders)
{
    const double end = spacing_mhz > 0.0 ? (orders + 0.5) * 1e3 / spacing_mhz : t.time_ns.back();
    EchoTrace out = t;
    std::size_t n = 0;
    while (n < t.time_ns.size() && t.time_ns[n] <= end) {
        ++n;
    }
    out.time_ns.resize(n);
    out.input.resize(n);
    out.output.resize(n);
    return out;
}

void add_pump_files(OutputSet& files, const PumpResult& r, const RunConfig& cfg)
{
    files.add("pump_spectrum.csv", spectrum_csv(r.run.prepared));
    files.add("pump_spectrum.svg", spectrum_plot(r.baseline, r.run.prepared, "Tailored absorption"));
    files.add("pump_summary.json", pump_json(r, cfg).dump(2) + "\n");
    if (r.schedule) {
        files.add("schedule.csv", emit(*r.schedule, ScheduleFormat::csv));
        files.add("schedule.json", emit(*r.schedule, ScheduleFormat::json));
    }
}

std::string pump_summary_text(const PumpResult& r)
{
    std::ostringstream s;
    s << "population conservation error " << fmt("%.3g", r.conservation_error)
      << (r.run.prepared.converged ? "" : "  (warning: trough floor rose between repetitions)") << "\n";
    for (const auto& w : r.windows) {
        s << "window " << fmt("%g", w.window.center_mhz) << " MHz: spacing " << fmt("%g", w.spacing_mhz)
          << " MHz, d " << fmt("%.3f", w.comb.depth) << ", d0 " << fmt("%.3f", w.comb.background) << ", F "
          << fmt("%.3f", w.comb.finesse) << "\n";
    }
    return s.str();
}

} // namespace

HoleburnResult run_holeburn(const RunConfig& cfg)
{
    HoleburnResult r;
    r.splittings = zeeman_splittings(cfg.ion, cfg.field);
    r.pattern = pattern_for(cfg);
    r.baseline = baseline_for(cfg);
    const Grid& g = r.baseline.grid;
    const double center = g.at(g.nearest(0.5 * (cfg.grid.min_mhz + cfg.grid.max_mhz)));
    PumpProgram program;
    program.repetitions = cfg.train.repetitions;
    program.wait_ms = cfg.target.wait_ms;
    program.steps = {PumpStep{center, 0.0, cfg.train.t0_ms, {OpticalTone{}}}};
    r.burned = run_pumping(r.baseline, program, cfg.train.peak_rate_per_ms, r.pattern, cfg.ion).prepared;
    return r;
}

PumpResult run_pump(const RunConfig& cfg)
{
    PumpResult r;
    r.pattern = pattern_for(cfg);
    r.baseline = baseline_for(cfg);
    PumpProgram program;
    if (cfg.driver == PumpDriver::schedule) {
        r.schedule = compile(cfg.target, cfg.train, cfg.hardware);
        const double leak = cfg.simulate_leakage ? 1.0 / cfg.hardware.eom_extinction : 0.0;
        program = to_program(*r.schedule, cfg.target.wait_ms, leak);
    } else {
        program = plan_pumping(cfg.target, cfg.train);
    }
    for (const auto& step : program.steps) {
        for (const auto& tone : step.tones) {
            if (!r.baseline.grid.contains(step.center_mhz + tone.offset_mhz)) {
                throw InvalidArgument("pump step at " + fmt("%g", step.center_mhz + tone.offset_mhz) +
                                      " MHz lies outside the spectral grid");
            }
        }
    }
    r.run = run_pumping(r.baseline, program, cfg.train.peak_rate_per_ms, r.pattern, cfg.ion);
    r.conservation_error = r.run.initial_population > 0.0
                               ? std::abs(r.run.final_population - r.run.initial_population) / r.run.initial_population
                               : 0.0;
    for (const auto& w : cfg.target.windows) {
        const double spacing = cfg.target.spacing(w);
        r.windows.push_back({w, spacing, comb_metrics(r.run.prepared, spacing, w.center_mhz, w.bandwidth_mhz)});
    }
    return r;
}

StoreResult run_store(const RunConfig& cfg)
{
    StoreResult r;
    r.pump = run_pump(cfg);
    const StorageConfig& st = cfg.storage;
    r.noise = st.noise;
    if (st.noise_total_counts > 0.0) {
        r.noise = calibrate_emission(r.pump.run.end_of_pump, cfg.target.wait_ms, st.window_ns, st.noise,
                                     st.noise_total_counts);
    }
    r.noise_per_window = noise_counts(r.pump.run.end_of_pump, cfg.target.wait_ms, st.window_ns, r.noise);

    std::vector<std::pair<double, double>> points;  // centre, spacing
    for (const auto& w : r.pump.windows) {
        points.emplace_back(w.window.center_mhz + st.pulse.center_mhz, w.spacing_mhz);
    }
    if (points.empty()) {
        points.emplace_back(st.pulse.center_mhz, cfg.target.comb_spacing_mhz);
    }
    for (std::size_t k = 0; k < points.size(); ++k) {
        WindowStorage ws;
        ws.center_mhz = points[k].first;
        ws.spacing_mhz = points[k].second;
        PropagateOptions opt;
        opt.comb_spacing_mhz = ws.spacing_mhz;
        opt.max_echo_order = st.max_echo_order;
        opt.max_dt_ns = st.max_dt_ns;
        ws.trace = propagate(r.pump.run.prepared, InputPulse{st.pulse.fwhm_ns, ws.center_mhz}, opt);
        if (k < r.pump.windows.size()) {
            const CombMetrics& m = r.pump.windows[k].comb;
            ws.analytic = m.finesse > 1.0 ? efficiency_analytic(std::max(0.0, m.depth), m.finesse,
                                                                std::max(0.0, m.background))
                                          : 0.0;
        }
        const double eta = std::clamp(ws.trace.efficiency(1), 0.0, 1.0);
        ws.counts = count_statistics(eta, st.mean_photon, st.events, r.noise_per_window, cfg.seed + k, cfg.threads);
        ws.counts.window_ns = st.window_ns;
        r.windows.push_back(std::move(ws));
    }
    return r;
}

CommensurateResult run_commensurate(const RunConfig& cfg)
{
    const CommensurateConfig& c = cfg.commensurate;
    CommensurateResult r;
    r.map = mismatch_map(c.field, c.second, c.axis, cfg.ion, cfg.threads);
    for (double spacing : c.search_spacings_mhz) {
        r.searches.push_back(
            {spacing, search_field(spacing, c.search_field, cfg.ion, c.top_k), hole_width_limited(spacing, cfg.ion)});
    }
    for (const auto& p : c.audit) {
        AuditRow row;
        row.point = p;
        row.spacing_mhz = 1e3 / p.storage_time_ns;
        row.residues = residues(p.field_g, row.spacing_mhz, cfg.ion);
        row.mismatch = 0.5 * row.residues.sum();
        r.audit.push_back(row);
    }
    return r;
}

CompileResult run_compile(const RunConfig& cfg)
{
    CompileResult r;
    r.schedule = compile(cfg.target, cfg.train, cfg.hardware);
    r.coverage = coverage(r.schedule, cfg.target, cfg.hardware);
    return r;
}

std::string coverage_json(const CoverageReport& report)
{
    ojson j = versioned("afcsim.coverage");
    j["comb_lines"] = report.comb_lines;
    j["bandwidth_mhz"] = report.bandwidth_mhz;
    j["optical_tones"] = report.optical_tones;
    j["warnings"] = ojson::array();
    for (const auto& w : report.warnings) {
        j["warnings"].push_back({{"gate", w.gate},
                                 {"tone_offset_mhz", w.tone_offset_mhz},
                                 {"amplitude", w.amplitude},
                                 {"window", w.window},
                                 {"reason", w.reason}});
    }
    return j.dump(2) + "\n";
}

CommandOutput cmd_holeburn(const RunConfig& cfg)
{
    const HoleburnResult r = run_holeburn(cfg);
    CommandOutput out;

    std::string csv = "detuning_mhz,od,delta_od\n";
    std::vector<double> delta(r.burned.size());
    for (std::size_t i = 0; i < r.burned.size(); ++i) {
        delta[i] = r.burned.od[i] - r.baseline.od[i];
        csv += format_number(r.burned.grid.at(i)) + ',' + format_number(r.burned.od[i]) + ',' +
               format_number(delta[i]) + '\n';
    }
    out.files.add("holeburn_spectrum.csv", csv);
    out.files.add("holeburn_features.csv", pattern_csv(r.pattern));
    out.files.add("holeburn.svg", svg_line_plot({Series{"", r.burned.grid.values(), delta}},
                                                {"Single-frequency burn at " + fmt("%g", cfg.field.gauss) + " G",
                                                 "detuning (MHz)", "change in optical depth"}));
    ojson j = versioned("afcsim.holeburn");
    j["field_g"] = cfg.field.gauss;
    j["delta_e_mhz"] = r.splittings.excited_mhz;
    j["delta_g_mhz"] = r.splittings.ground_mhz;
    j["holes"] = r.pattern.count(FeatureKind::hole);
    j["antiholes"] = r.pattern.count(FeatureKind::antihole);
    j["features"] = ojson::array();
    for (const auto& f : r.pattern.features) {
        j["features"].push_back({{"offset_mhz", f.offset_mhz},
                                 {"kind", f.kind == FeatureKind::hole ? "hole" : "antihole"},
                                 {"weight", f.weight}});
    }
    out.files.add("holeburn.json", j.dump(2) + "\n");

    std::ostringstream s;
    s << "splittings at " << fmt("%g", cfg.field.gauss) << " G: excited " << fmt("%.4g", r.splittings.excited_mhz)
      << " MHz, ground " << fmt("%.4g", r.splittings.ground_mhz) << " MHz\n";
    for (const auto& f : r.pattern.features) {
        s << "  " << (f.kind == FeatureKind::hole ? "hole     " : "anti-hole") << fmt(" %+9.3f MHz", f.offset_mhz)
          << fmt("  weight %.4g", f.weight) << "\n";
    }
    out.summary = s.str();
    return out;
}

CommandOutput cmd_pump(const RunConfig& cfg)
{
    const PumpResult r = run_pump(cfg);
    CommandOutput out;
    add_pump_files(out.files, r, cfg);
    out.summary = pump_summary_text(r);
    return out;
}

CommandOutput cmd_store(const RunConfig& cfg)
{
    const StoreResult r = run_store(cfg);
    CommandOutput out;
    add_pump_files(out.files, r.pump, cfg);

    ojson j = versioned("afcsim.store");
    j["noise_per_window"] = r.noise_per_window;
    j["emission_per_ns"] = r.noise.emission_per_ns;
    j["pulse_fwhm_ns"] = cfg.storage.pulse.fwhm_ns;
    j["seed"] = cfg.seed;
    j["windows"] = ojson::array();
    std::ostringstream s;
    s << pump_summary_text(r.pump);
    s << "noise " << fmt("%.4g", r.noise_per_window) << " counts per " << fmt("%g", cfg.storage.window_ns)
      << " ns window\n";
    std::vector<Series> plot;
    for (std::size_t k = 0; k < r.windows.size(); ++k) {
        const WindowStorage& w = r.windows[k];
        const EchoTrace t = cropped(w.trace, w.spacing_mhz, cfg.storage.max_echo_order);
        const std::string name = r.windows.size() == 1 ? "store_trace.csv" : "store_trace_" + std::to_string(k) + ".csv";
        out.files.add(name, trace_csv(t));
        if (k == 0) {
            plot.push_back({"input", t.time_ns, t.input});
        }
        plot.push_back({"output " + fmt("%g MHz", w.center_mhz), t.time_ns, t.output});

        ojson wj;
        wj["center_mhz"] = w.center_mhz;
        wj["spacing_mhz"] = w.spacing_mhz;
        wj["transmission"] = w.trace.efficiency(0);
        wj["efficiency"] = w.trace.efficiency(1);
        wj["efficiency_analytic"] = w.analytic;
        wj["output_energy"] = w.trace.output_energy;
        wj["precursor_ratio"] = w.trace.precursor_ratio;
        wj["echoes"] = ojson::array();
        for (const auto& e : w.trace.echoes) {
            wj["echoes"].push_back({{"order", e.order},
                                    {"efficiency", e.efficiency},
                                    {"peak_time_ns", e.peak_time_ns},
                                    {"delay_ns", e.delay_ns}});
        }
        wj["counts"] = {{"events", w.counts.events},
                        {"mean_photon", w.counts.mean_photon},
                        {"window_ns", w.counts.window_ns},
                        {"signal_counts", w.counts.signal_counts},
                        {"noise_counts", w.counts.noise_counts},
                        {"snr", w.counts.snr}};
        j["windows"].push_back(wj);

        s << "window " << fmt("%g", w.center_mhz) << " MHz: efficiency " << fmt("%.4f", w.trace.efficiency(1))
          << " (comb estimate " << fmt("%.4f", w.analytic) << "), echo delay "
          << fmt("%.2f ns", w.trace.echoes.size() > 1 ? w.trace.echoes[1].delay_ns : 0.0) << ", transmission "
          << fmt("%.4g", w.trace.efficiency(0)) << ", SNR " << fmt("%.1f", w.counts.snr) << "\n";
    }
    out.files.add("store_summary.json", j.dump(2) + "\n");
    out.files.add("store_trace.svg", svg_line_plot(plot, {"Storage trace", "time (ns)", "intensity (input peak = 1)"}));
    out.summary = s.str();
    return out;
}

CommandOutput cmd_commensurate(const RunConfig& cfg)
{
    const CommensurateResult r = run_commensurate(cfg);
    CommandOutput out;
    out.files.add("mismatch_map.csv", map_csv(r.map));
    // Rows follow the second axis so the image has field horizontally.
    std::vector<double> image(r.map.values.size());
    const std::size_t nf = r.map.field_g.size();
    const std::size_t ns = r.map.second.size();
    for (std::size_t i = 0; i < nf; ++i) {
        for (std::size_t j = 0; j < ns; ++j) {
            image[j * nf + i] = r.map.at(i, j);
        }
    }
    out.files.add("mismatch_map.png", png_heatmap(image, ns, nf, 0.0, 1.0));

    ojson j = versioned("afcsim.commensurate");
    j["searches"] = ojson::array();
    std::ostringstream s;
    s << "mismatch map " << nf << " x " << ns << " points\n";
    for (const auto& q : r.searches) {
        ojson qj;
        qj["spacing_mhz"] = q.spacing_mhz;
        qj["storage_time_ns"] = 1e3 / q.spacing_mhz;
        qj["hole_width_limited"] = q.hole_width_limited;
        qj["candidates"] = ojson::array();
        s << "spacing " << fmt("%g", q.spacing_mhz) << " MHz"
          << (q.hole_width_limited ? " (warning: half period below twice the hole width)" : "") << ":\n";
        for (const auto& c : q.candidates) {
            qj["candidates"].push_back({{"field_g", c.field_g}, {"mismatch", c.mismatch}});
            s << "  " << fmt("%10.3f G", c.field_g) << fmt("  mismatch %.6f", c.mismatch) << "\n";
        }
        j["searches"].push_back(qj);
    }
    j["audit"] = ojson::array();
    std::string csv = "field_g,storage_time_ns,spacing_mhz,dist1,dist2,dist3,dist4,mismatch,match,reported_match\n";
    for (const auto& a : r.audit) {
        ojson aj;
        aj["field_g"] = a.point.field_g;
        aj["storage_time_ns"] = a.point.storage_time_ns;
        aj["spacing_mhz"] = a.spacing_mhz;
        aj["quotients"] = a.residues.quotients;
        aj["distances"] = a.residues.distances;
        aj["mismatch"] = a.mismatch;
        aj["match"] = 1.0 - a.mismatch;
        aj["reported_match"] = a.point.reported_match;
        j["audit"].push_back(aj);
        csv += format_number(a.point.field_g) + ',' + format_number(a.point.storage_time_ns) + ',' +
               format_number(a.spacing_mhz);
        for (double d : a.residues.distances) {
            csv += ',' + format_number(d);
        }
        csv += ',' + format_number(a.mismatch) + ',' + format_number(1.0 - a.mismatch) + ',' +
               format_number(a.point.reported_match) + '\n';
        s << "audit " << fmt("%g G", a.point.field_g) << ", " << fmt("%g ns", a.point.storage_time_ns) << ": match "
          << fmt("%.2f%%", 100.0 * (1.0 - a.mismatch)) << " (reported " << fmt("%.1f%%", 100.0 * a.point.reported_match)
          << ")\n";
    }
    if (cfg.field.gauss > 0.0) {
        const Splittings sp = zeeman_splittings(cfg.ion, cfg.field);
        if (sp.ground_mhz > sp.excited_mhz) {
            j["intrinsic_spacing_mhz"] = intrinsic_delta(cfg.field.gauss, cfg.ion);
            s << "intrinsic pumping spacing at " << fmt("%g G", cfg.field.gauss) << ": "
              << fmt("%.4g MHz", intrinsic_delta(cfg.field.gauss, cfg.ion)) << "\n";
        }
    }
    out.files.add("commensurate.json", j.dump(2) + "\n");
    out.files.add("audit.csv", csv);
    out.summary = s.str();
    return out;
}

CommandOutput cmd_compile(const RunConfig& cfg)
{
    const CompileResult r = run_compile(cfg);
    CommandOutput out;
    out.files.add("schedule.csv", emit(r.schedule, ScheduleFormat::csv));
    out.files.add("schedule.json", emit(r.schedule, ScheduleFormat::json));
    out.files.add("coverage.json", coverage_json(r.coverage));
    std::ostringstream s;
    s << r.schedule.aom_segments.size() << " AOM segments, " << r.schedule.eom_tones.size() << " EOM tones, "
      << r.coverage.optical_tones << " optical tones, " << r.schedule.repetitions << " repetitions of "
      << fmt("%g ms", r.schedule.period_ms) << "\n";
    s << "coverage: " << r.coverage.comb_lines << " comb lines, " << fmt("%g MHz", r.coverage.bandwidth_mhz) << "\n";
    for (const auto& w : r.coverage.warnings) {
        s << "warning: gate " << w.gate << " tone " << fmt("%g MHz", w.tone_offset_mhz) << " at amplitude "
          << fmt("%.3g", w.amplitude) << ": " << w.reason << "\n";
    }
    out.summary = s.str();
    return out;
}

CommandOutput cmd_sweep(const std::string& text, const std::string& source, const std::vector<Override>& base)
{
    const RunConfig cfg = parse_config(text, source, base);
    const auto& params = cfg.sweep.parameters;
    if (params.empty()) {
        throw ConfigError(source + ": /sweep/parameters: no parameters to sweep");
    }
    std::vector<std::vector<std::size_t>> combos{{}};
    for (const auto& p : params) {
        std::vector<std::vector<std::size_t>> next;
        for (const auto& c : combos) {
            for (std::size_t v = 0; v < p.second.size(); ++v) {
                auto e = c;
                e.push_back(v);
                next.push_back(std::move(e));
            }
        }
        combos = std::move(next);
    }

    // Validate every combination before running any of them.
    std::vector<RunConfig> runs;
    for (const auto& c : combos) {
        auto overrides = base;
        for (std::size_t k = 0; k < params.size(); ++k) {
            overrides.push_back({params[k].first, params[k].second[c[k]]});
        }
        RunConfig rc = parse_config(text, source, overrides);
        rc.threads = 1;
        runs.push_back(std::move(rc));
    }

    std::vector<ojson> rows(runs.size());
    auto work = [&](std::size_t i) {
        const RunConfig& rc = runs[i];
        ojson row;
        if (cfg.sweep.command == "store") {
            const StoreResult st = run_store(rc);
            const auto& w = st.windows.front();
            row["efficiency"] = w.trace.efficiency(1);
            row["delay_ns"] = w.trace.echoes.size() > 1 ? w.trace.echoes[1].delay_ns : 0.0;
            row["snr"] = w.counts.snr;
            if (!st.pump.windows.empty()) {
                row["finesse"] = st.pump.windows.front().comb.finesse;
                row["background_od"] = st.pump.windows.front().comb.background;
            }
        } else {
            const PumpResult pump = run_pump(rc);
            if (!pump.windows.empty()) {
                row["finesse"] = pump.windows.front().comb.finesse;
                row["background_od"] = pump.windows.front().comb.background;
                row["depth_od"] = pump.windows.front().comb.depth;
            }
        }
        rows[i] = row;
    };
    const auto workers = static_cast<std::size_t>(std::clamp(cfg.threads, 1, 64));
    std::vector<std::string> failure(runs.size());
    auto guarded = [&](std::size_t i) {
        try {
            work(i);
        } catch (const std::exception& e) {
            failure[i] = e.what();
        }
    };
    if (workers == 1) {
        for (std::size_t i = 0; i < runs.size(); ++i) {
            guarded(i);
        }
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < runs.size(); i += workers) {
                    guarded(i);
                }
            });
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    for (std::size_t i = 0; i < runs.size(); ++i) {
        if (!failure[i].empty()) {
            throw Error("sweep point " + std::to_string(i) + " failed: " + failure[i]);
        }
    }

    std::vector<std::string> metric_names;
    for (const auto& r : rows) {
        for (auto it = r.begin(); it != r.end(); ++it) {
            if (std::find(metric_names.begin(), metric_names.end(), it.key()) == metric_names.end()) {
                metric_names.push_back(it.key());
            }
        }
    }
    std::string csv;
    for (const auto& p : params) {
        csv += p.first + ',';
    }
    for (std::size_t m = 0; m < metric_names.size(); ++m) {
        csv += metric_names[m] + (m + 1 < metric_names.size() ? "," : "");
    }
    csv += '\n';
    ojson doc = versioned("afcsim.sweep");
    doc["command"] = cfg.sweep.command;
    doc["points"] = ojson::array();
    std::ostringstream s;
    for (std::size_t i = 0; i < combos.size(); ++i) {
        ojson point;
        point["parameters"] = ojson::object();
        for (std::size_t k = 0; k < params.size(); ++k) {
            const std::string& v = params[k].second[combos[i][k]];
            csv += v + ',';
            point["parameters"][params[k].first] = ojson::parse(v);
            s << params[k].first << '=' << v << ' ';
        }
        for (std::size_t m = 0; m < metric_names.size(); ++m) {
            const bool has = rows[i].contains(metric_names[m]);
            csv += has ? format_number(rows[i][metric_names[m]].get<double>()) : "";
            csv += m + 1 < metric_names.size() ? "," : "";
            if (has) {
                s << metric_names[m] << '=' << fmt("%.4g", rows[i][metric_names[m]].get<double>()) << ' ';
            }
        }
        csv += '\n';
        s << '\n';
        point["metrics"] = rows[i];
        doc["points"].push_back(point);
    }
    CommandOutput out;
    out.files.add("sweep.csv", csv);
    out.files.add("sweep.json", doc.dump(2) + "\n");
    out.summary = s.str();
    return out;
}

} // namespace afcsim
