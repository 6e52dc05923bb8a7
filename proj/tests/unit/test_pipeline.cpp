#include "afcsim/error.hpp"
#include "afcsim/io.hpp"
#include "afcsim/pipeline.hpp"
#include "afcsim/plot.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace afcsim;
namespace fs = std::filesystem;

namespace {

RunConfig efficient()
{
    return parse_config(R"({
  "field": { "gauss": 4500 },
  "medium": { "peak_od": 2.0, "passes": 6 },
  "target": { "comb_spacing_mhz": 6, "tooth_width_mhz": 1.33, "windows": [ { "center_mhz": 0, "bandwidth_mhz": 30 } ] },
  "train": { "t0_ms": 0.15, "repetitions": 600, "delta_p_mhz": 4.0 },
  "storage": { "pulse_fwhm_ns": 80, "noise_total_counts": 1.055e-3 }
})",
                        "efficient.json");
}

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("afcsim_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("single burn shows side holes and anti-holes where the splittings put them")
{
    RunConfig cfg = parse_config(R"({"field": {"gauss": 4500}, "grid": {"min_mhz": -200, "max_mhz": 200, "step_mhz": 0.1},
                                     "train": {"repetitions": 50}})",
                                 "hb.json");
    const HoleburnResult r = run_holeburn(cfg);
    const Spectrum& s = r.burned;
    const double base = r.baseline.od[0];
    auto od = [&](double f) { return s.od[s.grid.nearest(f)]; };
    CHECK(od(0.0) < 0.5 * base);
    CHECK(od(27.0) < base - 0.01);
    CHECK(od(-27.0) < base - 0.01);
    for (double f : {101.25, 128.25, 155.25}) {
        CHECK(od(f) > base + 0.01);
        CHECK(od(-f) > base + 0.01);
    }
    CHECK(od(60.0) == doctest::Approx(base).epsilon(1e-6));

    // Without a Zeeman splitting there is no shelving level; only the
    // bottleneck keeps a (shallower) hole open.
    cfg.field.gauss = 0.0;
    const HoleburnResult z = run_holeburn(cfg);
    CHECK(z.pattern.features.size() == 1);
    CHECK(z.burned.od[z.burned.grid.nearest(0.0)] < base - 0.1);
    CHECK(z.burned.od[z.burned.grid.nearest(0.0)] > od(0.0));
    CHECK(z.burned.od[z.burned.grid.nearest(27.0)] == doctest::Approx(base).epsilon(1e-6));
}

TEST_CASE("store pipeline on the efficient comb")
{
    const StoreResult r = run_store(efficient());
    REQUIRE(r.windows.size() == 1);
    CHECK(r.pump.conservation_error < 1e-6);
    CHECK(r.noise_per_window == doctest::Approx(1.055e-3));
    const auto& w = r.windows[0];
    CHECK(w.trace.efficiency(1) > 0.2);
    CHECK(w.trace.efficiency(1) < 0.35);
    CHECK(w.trace.echoes[1].delay_ns == doctest::Approx(1e3 / 6.0).epsilon(0.02));
    CHECK(w.counts.events == 10000);
}

TEST_CASE("without pumping nothing is stored and the pulse sees exp(-d)")
{
    RunConfig cfg = efficient();
    cfg.train.repetitions = 0;
    cfg.target.windows.clear();
    cfg.storage.noise_total_counts = 0.0;
    cfg.storage.pulse.fwhm_ns = 20.0;
    const StoreResult r = run_store(cfg);
    REQUIRE(r.windows.size() == 1);
    CHECK(r.windows[0].trace.efficiency(1) < 1e-9);
    CHECK(r.windows[0].trace.efficiency(0) == doctest::Approx(std::exp(-12.0)).epsilon(1e-4));
}

TEST_CASE("commands are byte-for-byte reproducible")
{
    const RunConfig cfg = efficient();
    const CommandOutput a = cmd_store(cfg);
    const CommandOutput b = cmd_store(cfg);
    REQUIRE(a.files.files().size() == b.files.files().size());
    for (std::size_t i = 0; i < a.files.files().size(); ++i) {
        CHECK(a.files.files()[i].first == b.files.files()[i].first);
        CHECK(a.files.files()[i].second == b.files.files()[i].second);
    }
    CHECK(a.files.find("store_summary.json") != nullptr);
    CHECK(a.files.find("pump_spectrum.csv") != nullptr);
}

TEST_CASE("output set writes everything or nothing")
{
    const fs::path dir = scratch("commit");
    OutputSet set;
    set.add("a.csv", "x,y\n1,2\n");
    set.add("b.json", "{}\n");
    set.commit(dir.string());
    CHECK(slurp(dir / "a.csv") == "x,y\n1,2\n");
    CHECK(slurp(dir / "b.json") == "{}\n");
    std::size_t n = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        (void)e;
        ++n;
    }
    CHECK(n == 2);

    // A directory in the way of the second file makes the commit fail.
    const fs::path dir2 = scratch("commit_fail");
    fs::create_directories(dir2 / "b.json");
    CHECK_THROWS_AS(set.commit(dir2.string()), Error);
    CHECK_FALSE(fs::exists(dir2 / "a.csv"));
    CHECK_FALSE(fs::exists(dir2 / ".a.csv.partial"));

    // A fresh directory is removed again when nothing could be written.
    const fs::path dir3 = scratch("commit_fresh");
    OutputSet blocked;
    blocked.add("x", "1");
    blocked.add("sub/y", "2");
    CHECK_THROWS_AS(blocked.commit(dir3.string()), Error);
    CHECK_FALSE(fs::exists(dir3));
    fs::remove_all(dir);
    fs::remove_all(dir2);
}

TEST_CASE("CSV writers")
{
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1.0 / 3.0) == "0.3333333333");
    CHECK(format_number(-2.5e-7) == "-2.5e-07");

    const MismatchMap one = mismatch_map({100.0, 100.0, 1.0}, {250.0, 250.0, 5.0}, SpacingAxis::storage_time_ns, IonClass{});
    const std::string csv = map_csv(one);
    CHECK(csv.rfind("field_g,storage_time_ns,mismatch\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);

    const HolePattern p = hole_pattern(27.0, 128.25, IonClass{});
    const std::string pc = pattern_csv(p);
    CHECK(pc.rfind("offset_mhz,kind,weight\n", 0) == 0);
    CHECK(std::count(pc.begin(), pc.end(), '\n') == 10);
}

TEST_CASE("plots are deterministic and well formed")
{
    const Series s{"od", {0.0, 1.0, 2.0}, {1.0, 0.5, 2.0}};
    const std::string a = svg_line_plot({s}, {"t", "x", "y"});
    CHECK(a == svg_line_plot({s}, {"t", "x", "y"}));
    CHECK(a.rfind("<svg", 0) == 0);
    CHECK(a.find("</svg>") != std::string::npos);

    const std::string png = png_heatmap({0.0, 0.5, 1.0, 0.25}, 2, 2, 0.0, 1.0);
    REQUIRE(png.size() > 8);
    CHECK(png.substr(1, 3) == "PNG");
    CHECK(png.substr(png.size() - 8, 4) == "IEND");
}

TEST_CASE("sweep runs the product of parameter values")
{
    const std::string text = R"({
  "field": { "gauss": 4500 },
  "grid": { "min_mhz": -20, "max_mhz": 20, "step_mhz": 0.1 },
  "target": { "comb_spacing_mhz": 6, "tooth_width_mhz": 2, "windows": [ { "center_mhz": 0, "bandwidth_mhz": 12 } ] },
  "train": { "t0_ms": 0.1, "repetitions": 20, "delta_p_mhz": 3.0 },
  "sweep": { "command": "pump", "parameters": { "/train/repetitions": [10, 20], "/train/delta_p_mhz": [2.0, 3.0, 4.0] } },
  "threads": 2
})";
    const CommandOutput out = cmd_sweep(text, "sweep.json", {});
    const std::string* csv = out.files.find("sweep.csv");
    REQUIRE(csv != nullptr);
    CHECK(std::count(csv->begin(), csv->end(), '\n') == 1 + 6);
    CHECK(*csv == *cmd_sweep(text, "sweep.json", {}).files.find("sweep.csv"));

    std::string bad = text;
    bad.replace(bad.find("[2.0, 3.0, 4.0]"), 15, "[2.0, -3.0]");
    CHECK_THROWS_AS(cmd_sweep(bad, "sweep.json", {}), ConfigError);
}
