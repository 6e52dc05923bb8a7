#include "afcsim/config.hpp"

#include "afcsim/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace afcsim {

namespace {

using json = nlohmann::json;

constexpr const char* kSchema = "afcsim.run/1";

std::string escape_pointer_token(const std::string& key)
{
    std::string out;
    for (char c : key) {
        if (c == '~') {
            out += "~0";
        } else if (c == '/') {
            out += "~1";
        } else {
            out += c;
        }
    }
    return out;
}

// Line number of every value in a JSON text, keyed by JSON pointer. The
// document is assumed to be valid JSON (nlohmann parses it first).
class Locator {
public:
    explicit Locator(const std::string& text) : text_(text) { value(""); }

    int line(std::string pointer) const
    {
        for (;;) {
            auto it = lines_.find(pointer);
            if (it != lines_.end()) {
                return it->second;
            }
            if (pointer.empty()) {
                return 0;
            }
            pointer.erase(pointer.rfind('/'));
        }
    }

private:
    void skip()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            if (text_[pos_] == '\n') {
                ++line_;
            }
            ++pos_;
        }
    }

    std::string string_token()
    {
        std::string out;
        ++pos_;
        while (pos_ < text_.size() && text_[pos_] != '"') {
            if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) {
                ++pos_;
            }
            out += text_[pos_++];
        }
        ++pos_;
        return out;
    }

    void value(const std::string& pointer)
    {
        skip();
        if (pos_ >= text_.size()) {
            return;
        }
        lines_.emplace(pointer, line_);
        const char c = text_[pos_];
        if (c == '{') {
            ++pos_;
            for (;;) {
                skip();
                if (pos_ >= text_.size() || text_[pos_] == '}') {
                    ++pos_;
                    return;
                }
                if (text_[pos_] == ',') {
                    ++pos_;
                    continue;
                }
                const int key_line = line_;
                const std::string child = pointer + "/" + escape_pointer_token(string_token());
                skip();
                ++pos_;  // ':'
                value(child);
                lines_[child] = std::min(lines_[child], key_line);
            }
        }
        if (c == '[') {
            ++pos_;
            std::size_t index = 0;
            for (;;) {
                skip();
                if (pos_ >= text_.size() || text_[pos_] == ']') {
                    ++pos_;
                    return;
                }
                if (text_[pos_] == ',') {
                    ++pos_;
                    continue;
                }
                value(pointer + "/" + std::to_string(index++));
            }
        }
        if (c == '"') {
            string_token();
            return;
        }
        while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != '}' && text_[pos_] != ']' &&
               !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    std::map<std::string, int> lines_;
};

enum class Bound { any, positive, non_negative, unit };

class Reader {
public:
    Reader(const Locator& locator, std::string source) : loc_(locator), source_(std::move(source)) {}

    [[noreturn]] void fail(const std::string& pointer, const std::string& reason) const
    {
        std::ostringstream msg;
        msg << source_ << ':' << loc_.line(pointer) << ": " << (pointer.empty() ? "/" : pointer) << ": " << reason;
        throw ConfigError(msg.str());
    }

    const json* section(const json& parent, const std::string& pointer, const char* key,
                        std::initializer_list<const char*> allowed) const
    {
        if (!parent.contains(key)) {
            return nullptr;
        }
        const json& obj = parent.at(key);
        const std::string here = pointer + "/" + key;
        if (!obj.is_object()) {
            fail(here, "expected an object");
        }
        check_keys(obj, here, allowed);
        return &obj;
    }

    void check_keys(const json& obj, const std::string& pointer, std::initializer_list<const char*> allowed) const
    {
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            bool ok = false;
            for (const char* a : allowed) {
                ok = ok || it.key() == a;
            }
            if (!ok) {
                fail(pointer + "/" + escape_pointer_token(it.key()), "unknown key '" + it.key() + "'");
            }
        }
    }

    void number(const json& obj, const std::string& pointer, const char* key, double& out,
                Bound bound = Bound::any) const
    {
        if (!obj.contains(key)) {
            return;
        }
        const std::string here = pointer + "/" + key;
        const json& v = obj.at(key);
        if (!v.is_number()) {
            fail(here, "expected a number");
        }
        const double x = v.get<double>();
        switch (bound) {
        case Bound::positive:
            if (!(x > 0.0)) {
                fail(here, "must be positive");
            }
            break;
        case Bound::non_negative:
            if (!(x >= 0.0)) {
                fail(here, "must be non-negative");
            }
            break;
        case Bound::unit:
            if (!(x >= 0.0 && x <= 1.0)) {
                fail(here, "must lie in [0, 1]");
            }
            break;
        case Bound::any:
            break;
        }
        out = x;
    }

    template <class Int>
    void integer(const json& obj, const std::string& pointer, const char* key, Int& out, long long min_value) const
    {
        if (!obj.contains(key)) {
            return;
        }
        const std::string here = pointer + "/" + key;
        const json& v = obj.at(key);
        if (!v.is_number_integer()) {
            fail(here, "expected an integer");
        }
        const auto x = v.get<long long>();
        if (x < min_value) {
            fail(here, "must be at least " + std::to_string(min_value));
        }
        out = static_cast<Int>(x);
    }

    void boolean(const json& obj, const std::string& pointer, const char* key, bool& out) const
    {
        if (!obj.contains(key)) {
            return;
        }
        if (!obj.at(key).is_boolean()) {
            fail(pointer + "/" + key, "expected true or false");
        }
        out = obj.at(key).get<bool>();
    }

    void string(const json& obj, const std::string& pointer, const char* key, std::string& out) const
    {
        if (!obj.contains(key)) {
            return;
        }
        if (!obj.at(key).is_string()) {
            fail(pointer + "/" + key, "expected a string");
        }
        out = obj.at(key).get<std::string>();
    }

    AxisRange range(const json& obj, const std::string& pointer, const char* key, AxisRange out) const
    {
        const json* r = section(obj, pointer, key, {"start", "stop", "step"});
        if (r == nullptr) {
            return out;
        }
        const std::string here = pointer + "/" + key;
        number(*r, here, "start", out.start, Bound::positive);
        number(*r, here, "stop", out.stop, Bound::positive);
        number(*r, here, "step", out.step, Bound::positive);
        if (out.stop < out.start) {
            fail(here, "stop must not be below start");
        }
        return out;
    }

    // Runs a library validator and re-throws its message at `pointer`.
    template <class F>
    void validated(const std::string& pointer, F&& check) const
    {
        try {
            check();
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            fail(pointer, e.what());
        }
    }

private:
    const Locator& loc_;
    std::string source_;
};

void read_ion(const Reader& r, const json& root, RunConfig& cfg)
{
    const json* s = r.section(root, "", "ion",
                              {"mu_e", "mu_g", "branching_ratio", "t_bottleneck_ms", "t_ground_ms", "t2_opt_us",
                               "hole_fwhm_mhz", "rel_crossed", "lineshape", "t_excited_ms", "spin_branching",
                               "hole_only_class"});
    if (s == nullptr) {
        return;
    }
    const std::string p = "/ion";
    IonClass& ion = cfg.ion;
    r.number(*s, p, "mu_e", ion.mu_e, Bound::positive);
    r.number(*s, p, "mu_g", ion.mu_g, Bound::positive);
    r.number(*s, p, "branching_ratio", ion.branching_ratio, Bound::unit);
    r.number(*s, p, "t_bottleneck_ms", ion.t_bottleneck_ms, Bound::positive);
    r.number(*s, p, "t_ground_ms", ion.t_ground_ms, Bound::positive);
    r.number(*s, p, "t2_opt_us", ion.t2_opt_us, Bound::positive);
    r.number(*s, p, "hole_fwhm_mhz", ion.hole_fwhm_mhz, Bound::positive);
    r.number(*s, p, "rel_crossed", ion.rel_crossed, Bound::unit);
    r.number(*s, p, "t_excited_ms", ion.t_excited_ms, Bound::positive);
    r.number(*s, p, "spin_branching", ion.spin_branching, Bound::unit);
    std::string shape = ion.lineshape == Lineshape::gaussian ? "gaussian" : "lorentzian";
    r.string(*s, p, "lineshape", shape);
    if (shape == "gaussian") {
        ion.lineshape = Lineshape::gaussian;
    } else if (shape == "lorentzian") {
        ion.lineshape = Lineshape::lorentzian;
    } else {
        r.fail(p + "/lineshape", "expected \"gaussian\" or \"lorentzian\"");
    }
    if (const json* h = r.section(*s, p, "hole_only_class", {"enabled", "splitting_mhz", "weight"})) {
        const std::string hp = p + "/hole_only_class";
        r.boolean(*h, hp, "enabled", cfg.pattern.include_hole_only_class);
        r.number(*h, hp, "splitting_mhz", cfg.pattern.hole_only_splitting_mhz, Bound::positive);
        r.number(*h, hp, "weight", cfg.pattern.hole_only_weight, Bound::non_negative);
    }
    r.validated(p, [&] { ion.validate(); });
}

void read_target(const Reader& r, const json& root, RunConfig& cfg)
{
    const json* s = r.section(root, "", "target", {"comb_spacing_mhz", "tooth_width_mhz", "wait_ms", "windows"});
    if (s == nullptr) {
        return;
    }
    const std::string p = "/target";
    PumpTarget& t = cfg.target;
    r.number(*s, p, "comb_spacing_mhz", t.comb_spacing_mhz, Bound::positive);
    r.number(*s, p, "tooth_width_mhz", t.tooth_width_mhz, Bound::positive);
    r.number(*s, p, "wait_ms", t.wait_ms, Bound::non_negative);
    if (s->contains("windows")) {
        const json& ws = s->at("windows");
        if (!ws.is_array()) {
            r.fail(p + "/windows", "expected an array");
        }
        t.windows.clear();
        for (std::size_t i = 0; i < ws.size(); ++i) {
            const std::string wp = p + "/windows/" + std::to_string(i);
            if (!ws[i].is_object()) {
                r.fail(wp, "expected an object");
            }
            r.check_keys(ws[i], wp, {"center_mhz", "bandwidth_mhz", "spacing_mhz", "delta_p_mhz"});
            PumpWindow w;
            r.number(ws[i], wp, "center_mhz", w.center_mhz);
            r.number(ws[i], wp, "bandwidth_mhz", w.bandwidth_mhz, Bound::positive);
            r.number(ws[i], wp, "spacing_mhz", w.spacing_mhz, Bound::non_negative);
            r.number(ws[i], wp, "delta_p_mhz", w.delta_p_mhz, Bound::non_negative);
            r.validated(wp, [&] {
                PumpTarget one = t;
                one.windows = {w};
                one.validate();
            });
            t.windows.push_back(w);
        }
    }
    r.validated(p, [&] { t.validate(); });
}

void read_storage(const Reader& r, const json& root, RunConfig& cfg)
{
    const json* s = r.section(root, "", "storage",
                              {"pulse_fwhm_ns", "pulse_center_mhz", "max_echo_order", "max_dt_ns", "events",
                               "mean_photon", "window_ns", "leak_counts", "dark_counts", "emission_per_ns",
                               "radiative_lifetime_ms", "noise_total_counts"});
    if (s == nullptr) {
        return;
    }
    const std::string p = "/storage";
    StorageConfig& st = cfg.storage;
    r.number(*s, p, "pulse_fwhm_ns", st.pulse.fwhm_ns, Bound::positive);
    r.number(*s, p, "pulse_center_mhz", st.pulse.center_mhz);
    r.integer(*s, p, "max_echo_order", st.max_echo_order, 0);
    r.number(*s, p, "max_dt_ns", st.max_dt_ns, Bound::positive);
    r.integer(*s, p, "events", st.events, 1);
    r.number(*s, p, "mean_photon", st.mean_photon, Bound::non_negative);
    r.number(*s, p, "window_ns", st.window_ns, Bound::positive);
    r.number(*s, p, "leak_counts", st.noise.leak_counts, Bound::non_negative);
    r.number(*s, p, "dark_counts", st.noise.dark_counts, Bound::non_negative);
    r.number(*s, p, "emission_per_ns", st.noise.emission_per_ns, Bound::non_negative);
    r.number(*s, p, "radiative_lifetime_ms", st.noise.radiative_lifetime_ms, Bound::positive);
    r.number(*s, p, "noise_total_counts", st.noise_total_counts, Bound::non_negative);
    if (st.noise_total_counts > 0.0 && st.noise_total_counts < st.noise.leak_counts + st.noise.dark_counts) {
        r.fail(p + "/noise_total_counts", "is below leak_counts + dark_counts");
    }
}

void read_commensurate(const Reader& r, const json& root, RunConfig& cfg)
{
    const json* s =
        r.section(root, "", "commensurate", {"field_g", "storage_time_ns", "spacing_mhz", "search", "audit"});
    if (s == nullptr) {
        return;
    }
    const std::string p = "/commensurate";
    CommensurateConfig& c = cfg.commensurate;
    c.field = r.range(*s, p, "field_g", c.field);
    if (s->contains("storage_time_ns") && s->contains("spacing_mhz")) {
        r.fail(p + "/spacing_mhz", "give either storage_time_ns or spacing_mhz, not both");
    }
    if (s->contains("spacing_mhz")) {
        c.axis = SpacingAxis::spacing_mhz;
        c.second = r.range(*s, p, "spacing_mhz", c.second);
    } else {
        c.second = r.range(*s, p, "storage_time_ns", c.second);
    }
    if (const json* q = r.section(*s, p, "search", {"spacings_mhz", "field_g", "top_k"})) {
        const std::string qp = p + "/search";
        if (q->contains("spacings_mhz")) {
            const json& a = q->at("spacings_mhz");
            if (!a.is_array()) {
                r.fail(qp + "/spacings_mhz", "expected an array of numbers");
            }
            c.search_spacings_mhz.clear();
            for (std::size_t i = 0; i < a.size(); ++i) {
                if (!a[i].is_number() || !(a[i].get<double>() > 0.0)) {
                    r.fail(qp + "/spacings_mhz/" + std::to_string(i), "must be a positive number");
                }
                c.search_spacings_mhz.push_back(a[i].get<double>());
            }
        }
        c.search_field = r.range(*q, qp, "field_g", c.search_field);
        r.integer(*q, qp, "top_k", c.top_k, 0);
    }
    if (s->contains("audit")) {
        const json& a = s->at("audit");
        if (!a.is_array()) {
            r.fail(p + "/audit", "expected an array");
        }
        c.audit.clear();
        for (std::size_t i = 0; i < a.size(); ++i) {
            const std::string ap = p + "/audit/" + std::to_string(i);
            if (!a[i].is_object()) {
                r.fail(ap, "expected an object");
            }
            r.check_keys(a[i], ap, {"field_g", "storage_time_ns", "reported_match"});
            AuditPoint pt;
            r.number(a[i], ap, "field_g", pt.field_g, Bound::positive);
            r.number(a[i], ap, "storage_time_ns", pt.storage_time_ns, Bound::positive);
            r.number(a[i], ap, "reported_match", pt.reported_match, Bound::unit);
            if (pt.field_g <= 0.0 || pt.storage_time_ns <= 0.0) {
                r.fail(ap, "field_g and storage_time_ns are required");
            }
            c.audit.push_back(pt);
        }
    }
}

void read_sweep(const Reader& r, const json& root, RunConfig& cfg)
{
    const json* s = r.section(root, "", "sweep", {"command", "parameters"});
    if (s == nullptr) {
        return;
    }
    const std::string p = "/sweep";
    r.string(*s, p, "command", cfg.sweep.command);
    if (cfg.sweep.command != "store" && cfg.sweep.command != "pump") {
        r.fail(p + "/command", "sweeps run \"store\" or \"pump\"");
    }
    if (s->contains("parameters")) {
        const json& params = s->at("parameters");
        if (!params.is_object()) {
            r.fail(p + "/parameters", "expected an object of JSON pointer -> value list");
        }
        cfg.sweep.parameters.clear();
        for (auto it = params.begin(); it != params.end(); ++it) {
            const std::string here = p + "/parameters/" + escape_pointer_token(it.key());
            if (it.key().empty() || it.key()[0] != '/') {
                r.fail(here, "parameter names must be JSON pointers such as /train/t0_ms");
            }
            if (!it.value().is_array() || it.value().empty()) {
                r.fail(here, "expected a non-empty array of values");
            }
            std::vector<std::string> values;
            for (const auto& v : it.value()) {
                values.push_back(v.dump());
            }
            cfg.sweep.parameters.emplace_back(it.key(), std::move(values));
        }
    }
}

} // namespace

RunConfig parse_config(const std::string& text, const std::string& source, const std::vector<Override>& overrides)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        // Byte offset -> line.
        const auto upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
        throw ConfigError(source + ":" + std::to_string(line) + ": invalid JSON");
    }
    const Locator locator(text);
    const Reader r(locator, source);
    if (!root.is_object()) {
        r.fail("", "the configuration must be a JSON object");
    }
    for (const auto& o : overrides) {
        json value;
        try {
            value = json::parse(o.value_json);
        } catch (const json::parse_error&) {
            r.fail(o.pointer, "override value is not valid JSON: " + o.value_json);
        }
        try {
            root[json::json_pointer(o.pointer)] = value;
        } catch (const json::exception& e) {
            r.fail(o.pointer, std::string("cannot apply override: ") + e.what());
        }
    }

    r.check_keys(root, "",
                 {"schema", "description", "ion", "field", "grid", "medium", "target", "train", "hardware", "pumping",
                  "storage", "commensurate", "sweep", "seed", "threads", "output_dir"});

    RunConfig cfg;
    cfg.source = source;
    if (root.contains("schema")) {
        std::string schema;
        r.string(root, "", "schema", schema);
        if (schema != kSchema) {
            r.fail("/schema", "unsupported schema '" + schema + "' (expected " + kSchema + ")");
        }
    }

    read_ion(r, root, cfg);

    if (const json* s = r.section(root, "", "field", {"gauss"})) {
        r.number(*s, "/field", "gauss", cfg.field.gauss, Bound::non_negative);
    }
    if (const json* s = r.section(root, "", "grid", {"min_mhz", "max_mhz", "step_mhz"})) {
        r.number(*s, "/grid", "min_mhz", cfg.grid.min_mhz);
        r.number(*s, "/grid", "max_mhz", cfg.grid.max_mhz);
        r.number(*s, "/grid", "step_mhz", cfg.grid.step_mhz, Bound::positive);
        if (!(cfg.grid.max_mhz > cfg.grid.min_mhz)) {
            r.fail("/grid/max_mhz", "must exceed min_mhz");
        }
        if (cfg.grid.step_mhz > 0.25 * cfg.ion.hole_fwhm_mhz) {
            r.fail("/grid/step_mhz", "exceeds hole_fwhm / 4; the grid cannot resolve a spectral hole");
        }
    }
    if (const json* s =
            r.section(root, "", "medium", {"peak_od", "passes", "profile_center_mhz", "profile_fwhm_mhz"})) {
        r.number(*s, "/medium", "peak_od", cfg.medium.peak_od, Bound::positive);
        r.integer(*s, "/medium", "passes", cfg.medium.passes, 1);
        r.number(*s, "/medium", "profile_center_mhz", cfg.medium.profile.center_mhz);
        r.number(*s, "/medium", "profile_fwhm_mhz", cfg.medium.profile.fwhm_mhz, Bound::non_negative);
    }
    read_target(r, root, cfg);
    if (const json* s = r.section(root, "", "train",
                                  {"t0_ms", "repetitions", "delta_p_mhz", "peak_rate_per_ms", "sech_amplitude",
                                   "tanh_chirp"})) {
        r.number(*s, "/train", "t0_ms", cfg.train.t0_ms, Bound::positive);
        r.integer(*s, "/train", "repetitions", cfg.train.repetitions, 0);
        r.number(*s, "/train", "delta_p_mhz", cfg.train.delta_p_mhz, Bound::positive);
        r.number(*s, "/train", "peak_rate_per_ms", cfg.train.peak_rate_per_ms, Bound::non_negative);
        r.boolean(*s, "/train", "sech_amplitude", cfg.train.sech_amplitude);
        r.boolean(*s, "/train", "tanh_chirp", cfg.train.tanh_chirp);
    }
    if (const json* s = r.section(root, "", "hardware",
                                  {"aom_bandwidth_mhz", "aom_double_pass", "aom_center_mhz", "eom_max_tones",
                                   "eom_extinction", "etalon_enabled", "etalon_bandwidth_mhz", "etalon_center_mhz"})) {
        HardwareLimits& hw = cfg.hardware;
        r.number(*s, "/hardware", "aom_bandwidth_mhz", hw.aom_bandwidth_mhz, Bound::positive);
        r.boolean(*s, "/hardware", "aom_double_pass", hw.aom_double_pass);
        r.number(*s, "/hardware", "aom_center_mhz", hw.aom_center_mhz, Bound::positive);
        r.integer(*s, "/hardware", "eom_max_tones", hw.eom_max_tones, 1);
        r.number(*s, "/hardware", "eom_extinction", hw.eom_extinction, Bound::positive);
        r.boolean(*s, "/hardware", "etalon_enabled", hw.etalon_enabled);
        r.number(*s, "/hardware", "etalon_bandwidth_mhz", hw.etalon_bandwidth_mhz, Bound::positive);
        r.number(*s, "/hardware", "etalon_center_mhz", hw.etalon_center_mhz);
        r.validated("/hardware", [&] { hw.validate(); });
    }
    if (const json* s = r.section(root, "", "pumping", {"driver", "simulate_leakage"})) {
        std::string driver = "direct";
        r.string(*s, "/pumping", "driver", driver);
        if (driver == "direct") {
            cfg.driver = PumpDriver::direct;
        } else if (driver == "schedule") {
            cfg.driver = PumpDriver::schedule;
        } else {
            r.fail("/pumping/driver", "expected \"direct\" or \"schedule\"");
        }
        r.boolean(*s, "/pumping", "simulate_leakage", cfg.simulate_leakage);
    }
    read_storage(r, root, cfg);
    read_commensurate(r, root, cfg);
    read_sweep(r, root, cfg);

    if (root.contains("seed")) {
        if (!root.at("seed").is_number_unsigned()) {
            r.fail("/seed", "expected a non-negative integer");
        }
        cfg.seed = root.at("seed").get<std::uint64_t>();
    }
    r.integer(root, "", "threads", cfg.threads, 1);
    r.string(root, "", "output_dir", cfg.output_dir);

    r.validated("/train", [&] { cfg.train.validate(); });
    for (std::size_t i = 0; i < cfg.target.windows.size(); ++i) {
        const auto& w = cfg.target.windows[i];
        const double lo = w.center_mhz - 0.5 * w.bandwidth_mhz;
        const double hi = w.center_mhz + 0.5 * w.bandwidth_mhz;
        if (lo < cfg.grid.min_mhz || hi > cfg.grid.max_mhz) {
            r.fail("/target/windows/" + std::to_string(i), "window extends beyond the spectral grid");
        }
    }
    return cfg;
}

std::string read_text_file(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw Error("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string resolve_config_path(const std::string& path)
{
    namespace fs = std::filesystem;
    if (fs::exists(path) || fs::path(path).is_absolute()) {
        return path;
    }
    if (const char* dir = std::getenv("AFCSIM_CONFIG_DIR")) {
        const fs::path candidate = fs::path(dir) / path;
        if (fs::exists(candidate)) {
            return candidate.string();
        }
    }
    return path;
}

RunConfig load_config(const std::string& path, const std::vector<Override>& overrides)
{
    const std::string resolved = resolve_config_path(path);
    return parse_config(read_text_file(resolved), resolved, overrides);
}

} // namespace afcsim
