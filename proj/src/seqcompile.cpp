#include "afcsim/seqcompile.hpp"

#include "afcsim/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace afcsim {

namespace {

constexpr double kTol = 1e-6;

std::string mhz(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g MHz", v);
    return buf;
}

struct Gate {
    std::vector<std::size_t> windows;
    double bandwidth = 0.0;
    double spacing = 0.0;
    double delta_p = 0.0;
    double first_center = 0.0;
};

std::vector<Gate> group_windows(const PumpTarget& target, const PulseTrain& train)
{
    std::vector<Gate> gates;
    for (std::size_t i = 0; i < target.windows.size(); ++i) {
        const auto& w = target.windows[i];
        const double spacing = target.spacing(w);
        const double dp = w.delta_p_mhz > 0.0 ? w.delta_p_mhz : train.delta_p_mhz;
        auto it = std::find_if(gates.begin(), gates.end(), [&](const Gate& g) {
            return std::abs(g.bandwidth - w.bandwidth_mhz) < kTol && std::abs(g.spacing - spacing) < kTol &&
                   std::abs(g.delta_p - dp) < kTol;
        });
        if (it == gates.end()) {
            gates.push_back({{i}, w.bandwidth_mhz, spacing, dp, w.center_mhz});
        } else {
            it->windows.push_back(i);
            it->first_center = std::min(it->first_center, w.center_mhz);
        }
    }
    std::stable_sort(gates.begin(), gates.end(),
                     [](const Gate& a, const Gate& b) { return a.first_center < b.first_center; });
    return gates;
}

bool in_etalon(const HardwareLimits& hw, double lo, double hi)
{
    const double a = hw.etalon_center_mhz - 0.5 * hw.etalon_bandwidth_mhz;
    const double b = hw.etalon_center_mhz + 0.5 * hw.etalon_bandwidth_mhz;
    return lo >= a - kTol && hi <= b + kTol;
}

const char* envelope_name(Envelope e)
{
    return e == Envelope::sech ? "sech" : "cw";
}

Envelope envelope_from(const std::string& s)
{
    if (s == "sech") {
        return Envelope::sech;
    }
    if (s == "cw") {
        return Envelope::cw;
    }
    throw InvalidArgument("unknown envelope '" + s + "'");
}

struct Row {
    int channel_rank;  // 0 eom, 1 aom
    double start;
    double stop;
    double f0;
    double f1;
    Envelope env;
    double amp;
};

std::vector<Row> one_repetition(const RFSchedule& s)
{
    std::vector<Row> rows;
    for (const auto& t : s.eom_tones) {
        rows.push_back({0, t.start_ms, t.stop_ms, t.freq_mhz, t.freq_mhz, Envelope::cw, t.amplitude});
    }
    for (const auto& a : s.aom_segments) {
        rows.push_back({1, a.start_ms, a.start_ms + a.duration_ms, a.f_start_mhz, a.f_stop_mhz, a.envelope,
                        a.amplitude});
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return a.start != b.start ? a.start < b.start : a.channel_rank < b.channel_rank;
    });
    return rows;
}

} // namespace

void HardwareLimits::validate() const
{
    if (!(aom_bandwidth_mhz > 0.0) || !(aom_center_mhz > 0.0)) {
        throw InvalidArgument("AOM bandwidth and centre frequency must be positive");
    }
    if (eom_max_tones < 1 || !(eom_extinction > 0.0)) {
        throw InvalidArgument("EOM tone count and extinction must be positive");
    }
    if (etalon_enabled && !(etalon_bandwidth_mhz > 0.0)) {
        throw InvalidArgument("etalon bandwidth must be positive");
    }
}

int RFSchedule::gate_count() const
{
    int n = 0;
    for (const auto& s : aom_segments) {
        n = std::max(n, s.gate + 1);
    }
    return n;
}

double RFSchedule::detuning_mhz(const AomSegment& s) const
{
    const double mult = aom_double_pass ? 2.0 : 1.0;
    return (0.5 * (s.f_start_mhz + s.f_stop_mhz) - aom_center_mhz) * mult;
}

double RFSchedule::sweep_width_mhz(const AomSegment& s) const
{
    const double mult = aom_double_pass ? 2.0 : 1.0;
    return std::abs(s.f_stop_mhz - s.f_start_mhz) * mult;
}

RFSchedule compile(const PumpTarget& target, const PulseTrain& train, const HardwareLimits& limits)
{
    target.validate();
    train.validate();
    limits.validate();

    RFSchedule out;
    out.repetitions = train.repetitions;
    out.aom_center_mhz = limits.aom_center_mhz;
    out.aom_double_pass = limits.aom_double_pass;
    const double mult = limits.aom_double_pass ? 2.0 : 1.0;

    double clock = 0.0;
    int gate_id = 0;
    for (const Gate& g : group_windows(target, train)) {
        std::set<double> rf;
        for (std::size_t wi : g.windows) {
            const auto& w = target.windows[wi];
            if (limits.etalon_enabled &&
                !in_etalon(limits, w.center_mhz - 0.5 * w.bandwidth_mhz, w.center_mhz + 0.5 * w.bandwidth_mhz)) {
                throw CompileError("window at " + mhz(w.center_mhz) + " lies outside the etalon passband");
            }
            if (std::abs(w.center_mhz) > kTol) {
                rf.insert(std::abs(w.center_mhz));
            }
        }
        if (static_cast<int>(rf.size()) > limits.eom_max_tones) {
            throw CompileError("window at " + mhz(target.windows[g.windows.back()].center_mhz) +
                               " needs more EOM tones than the hardware provides");
        }

        PumpWindow local;
        local.bandwidth_mhz = g.bandwidth;
        local.spacing_mhz = g.spacing;
        PumpTarget shape = target;
        shape.windows = {local};
        const auto troughs = trough_centers(shape, local);
        const double gate_start = clock;
        for (double det : troughs) {
            if (std::abs(det) + 0.5 * g.delta_p > limits.optical_half_span() + kTol) {
                throw CompileError("window at " + mhz(target.windows[g.windows.front()].center_mhz) +
                                   " needs a sweep beyond the AOM range");
            }
            AomSegment seg;
            seg.start_ms = clock;
            seg.duration_ms = train.t0_ms;
            seg.f_start_mhz = limits.aom_center_mhz + (det - 0.5 * g.delta_p) / mult;
            seg.f_stop_mhz = limits.aom_center_mhz + (det + 0.5 * g.delta_p) / mult;
            seg.gate = gate_id;
            out.aom_segments.push_back(seg);
            clock = train.t0_ms * static_cast<double>(out.aom_segments.size());
        }

        const double drive = rf.empty() ? 0.0 : 1.0 / static_cast<double>(rf.size());
        for (double f : rf) {
            out.eom_tones.push_back({f, drive, gate_id, gate_start, clock});
        }
        std::set<double> optical{0.0};
        for (double f : rf) {
            optical.insert(f);
            optical.insert(-f);
        }
        for (double o : optical) {
            if (!limits.etalon_enabled || in_etalon(limits, o, o)) {
                out.optical_tones.push_back({gate_id, o, 1.0});
            }
        }
        ++gate_id;
    }
    out.period_ms = clock;
    return out;
}

CoverageReport coverage(const RFSchedule& schedule, const PumpTarget& target, const HardwareLimits& limits)
{
    CoverageReport rep;
    const int gates = schedule.gate_count();
    std::set<double> distinct;

    auto window_at = [&](double offset) -> int {
        for (std::size_t i = 0; i < target.windows.size(); ++i) {
            if (std::abs(target.windows[i].center_mhz - offset) < kTol) {
                return static_cast<int>(i);
            }
        }
        return -1;
    };

    for (int g = 0; g < gates; ++g) {
        std::vector<const AomSegment*> segs;
        for (const auto& s : schedule.aom_segments) {
            if (s.gate == g) {
                segs.push_back(&s);
            }
        }
        std::vector<GateTone> active;
        std::vector<GateTone> idle;
        for (const auto& t : schedule.optical_tones) {
            (t.gate == g ? active : idle).push_back(t);
        }
        for (const auto& t : active) {
            distinct.insert(t.offset_mhz);
            const int w = window_at(t.offset_mhz);
            if (w < 0) {
                rep.warnings.push_back({g, t.offset_mhz, t.amplitude, -1, "optical tone pumps outside every window"});
                continue;
            }
            rep.comb_lines += static_cast<int>(segs.size());
            rep.bandwidth_mhz += static_cast<double>(segs.size()) * target.spacing(target.windows[static_cast<std::size_t>(w)]);
        }

        // Tones of other gates are only attenuated, not removed.
        const double leak = 1.0 / limits.eom_extinction;
        for (const auto& t : idle) {
            const bool shared = std::any_of(active.begin(), active.end(), [&](const GateTone& a) {
                return std::abs(a.offset_mhz - t.offset_mhz) < kTol;
            });
            if (shared) {
                continue;
            }
            for (std::size_t wi = 0; wi < target.windows.size(); ++wi) {
                const auto& w = target.windows[wi];
                bool hit = false;
                for (const auto* s : segs) {
                    const double c = t.offset_mhz + schedule.detuning_mhz(*s);
                    const double half = 0.5 * schedule.sweep_width_mhz(*s);
                    for (double tooth : tooth_centers(target, w)) {
                        if (std::abs(c - tooth) < half + 0.5 * target.tooth_width_mhz) {
                            hit = true;
                        }
                    }
                }
                if (hit) {
                    rep.warnings.push_back(
                        {g, t.offset_mhz, leak * t.amplitude, static_cast<int>(wi), "finite EOM extinction"});
                }
            }
        }
    }
    rep.optical_tones = distinct.size();
    return rep;
}

PumpProgram to_program(const RFSchedule& schedule, double wait_ms, double leak_amplitude)
{
    if (leak_amplitude < 0.0) {
        throw InvalidArgument("leak amplitude must be non-negative");
    }
    PumpProgram p;
    p.repetitions = schedule.repetitions;
    p.wait_ms = wait_ms;
    for (const auto& s : schedule.aom_segments) {
        PumpStep step;
        step.center_mhz = schedule.detuning_mhz(s);
        step.width_mhz = schedule.sweep_width_mhz(s);
        step.duration_ms = s.duration_ms;
        step.tones.clear();
        for (const auto& t : schedule.optical_tones) {
            const double a = t.amplitude * s.amplitude * (t.gate == s.gate ? 1.0 : leak_amplitude);
            if (a <= 0.0) {
                continue;
            }
            auto same = std::find_if(step.tones.begin(), step.tones.end(),
                                     [&](const OpticalTone& o) { return std::abs(o.offset_mhz - t.offset_mhz) < kTol; });
            if (same == step.tones.end()) {
                step.tones.push_back({t.offset_mhz, a * a});
            } else {
                same->power = std::max(same->power, a * a);
            }
        }
        p.steps.push_back(step);
    }
    return p;
}

std::string emit(const RFSchedule& s, ScheduleFormat format)
{
    if (format == ScheduleFormat::json) {
        nlohmann::ordered_json j;
        j["format"] = "afcsim.rfschedule";
        j["version"] = 1;
        j["repetitions"] = s.repetitions;
        j["period_ms"] = s.period_ms;
        j["aom_center_mhz"] = s.aom_center_mhz;
        j["aom_double_pass"] = s.aom_double_pass;
        j["aom_segments"] = nlohmann::ordered_json::array();
        for (const auto& a : s.aom_segments) {
            j["aom_segments"].push_back({{"start_ms", a.start_ms},
                                         {"duration_ms", a.duration_ms},
                                         {"f_start_mhz", a.f_start_mhz},
                                         {"f_stop_mhz", a.f_stop_mhz},
                                         {"envelope", envelope_name(a.envelope)},
                                         {"amplitude", a.amplitude},
                                         {"gate", a.gate}});
        }
        j["eom_tones"] = nlohmann::ordered_json::array();
        for (const auto& t : s.eom_tones) {
            j["eom_tones"].push_back({{"freq_mhz", t.freq_mhz},
                                      {"amplitude", t.amplitude},
                                      {"gate", t.gate},
                                      {"start_ms", t.start_ms},
                                      {"stop_ms", t.stop_ms}});
        }
        j["optical_tones"] = nlohmann::ordered_json::array();
        for (const auto& t : s.optical_tones) {
            j["optical_tones"].push_back({{"gate", t.gate}, {"offset_mhz", t.offset_mhz}, {"amplitude", t.amplitude}});
        }
        return j.dump(2) + "\n";
    }

    std::string out = "channel,t_start_ms,t_stop_ms,f_start_MHz,f_stop_MHz,envelope,amplitude\n";
    const auto rows = one_repetition(s);
    char buf[256];
    for (int rep = 0; rep < s.repetitions; ++rep) {
        const double base = s.period_ms * rep;
        for (const auto& r : rows) {
            std::snprintf(buf, sizeof buf, "%s,%.6f,%.6f,%.6f,%.6f,%s,%.6f\n", r.channel_rank == 0 ? "eom" : "aom",
                          base + r.start, base + r.stop, r.f0, r.f1, envelope_name(r.env), r.amp);
            out += buf;
        }
    }
    return out;
}

void emit_file(const RFSchedule& schedule, ScheduleFormat format, const std::string& path)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw Error("cannot open '" + path + "' for writing");
    }
    f << emit(schedule, format);
    if (!f) {
        throw Error("failed writing '" + path + "'");
    }
}

RFSchedule parse_json(const std::string& text)
{
    const auto j = nlohmann::json::parse(text);
    if (j.value("format", "") != "afcsim.rfschedule") {
        throw InvalidArgument("not an RF schedule document");
    }
    RFSchedule s;
    s.repetitions = j.at("repetitions").get<int>();
    s.period_ms = j.at("period_ms").get<double>();
    s.aom_center_mhz = j.at("aom_center_mhz").get<double>();
    s.aom_double_pass = j.at("aom_double_pass").get<bool>();
    for (const auto& a : j.at("aom_segments")) {
        s.aom_segments.push_back({a.at("start_ms").get<double>(), a.at("duration_ms").get<double>(),
                                  a.at("f_start_mhz").get<double>(), a.at("f_stop_mhz").get<double>(),
                                  envelope_from(a.at("envelope").get<std::string>()), a.at("amplitude").get<double>(),
                                  a.at("gate").get<int>()});
    }
    for (const auto& t : j.at("eom_tones")) {
        s.eom_tones.push_back({t.at("freq_mhz").get<double>(), t.at("amplitude").get<double>(),
                               t.at("gate").get<int>(), t.at("start_ms").get<double>(), t.at("stop_ms").get<double>()});
    }
    for (const auto& t : j.at("optical_tones")) {
        s.optical_tones.push_back({t.at("gate").get<int>(), t.at("offset_mhz").get<double>(), t.at("amplitude").get<double>()});
    }
    return s;
}

RFSchedule parse_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("channel,", 0) != 0) {
        throw InvalidArgument("missing RF schedule CSV header");
    }
    RFSchedule s;
    s.repetitions = 1;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            cells.push_back(cell);
        }
        if (cells.size() != 7) {
            throw InvalidArgument("line " + std::to_string(lineno) + ": expected 7 columns");
        }
        const double t0 = std::stod(cells[1]);
        const double t1 = std::stod(cells[2]);
        const double f0 = std::stod(cells[3]);
        const double f1 = std::stod(cells[4]);
        const double amp = std::stod(cells[6]);
        if (cells[0] == "eom") {
            s.eom_tones.push_back({f0, amp, 0, t0, t1});
        } else if (cells[0] == "aom") {
            s.aom_segments.push_back({t0, t1 - t0, f0, f1, envelope_from(cells[5]), amp, 0});
        } else {
            throw InvalidArgument("line " + std::to_string(lineno) + ": unknown channel '" + cells[0] + "'");
        }
        s.period_ms = std::max(s.period_ms, t1);
    }
    return s;
}

} // namespace afcsim
