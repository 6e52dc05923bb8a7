#pragma once

#include "afcsim/afc.hpp"
#include "afcsim/commensurate.hpp"
#include "afcsim/config.hpp"
#include "afcsim/io.hpp"
#include "afcsim/pumping.hpp"
#include "afcsim/seqcompile.hpp"

#include <optional>
#include <string>
#include <vector>

namespace afcsim {

struct HoleburnResult {
    Splittings splittings;
    HolePattern pattern;
    Spectrum baseline;
    Spectrum burned;
};

// Single monochromatic burn at the grid centre, read out after the wait time.
HoleburnResult run_holeburn(const RunConfig& cfg);

struct WindowMetrics {
    PumpWindow window;
    double spacing_mhz = 0.0;
    CombMetrics comb;
};

struct PumpResult {
    HolePattern pattern;
    Spectrum baseline;
    PumpRun run;
    std::optional<RFSchedule> schedule;
    std::vector<WindowMetrics> windows;
    double conservation_error = 0.0;  // relative
};

PumpResult run_pump(const RunConfig& cfg);

struct WindowStorage {
    double center_mhz = 0.0;
    double spacing_mhz = 0.0;
    EchoTrace trace;
    double analytic = 0.0;  // efficiency_analytic of the fitted comb
    CountStats counts;
};

struct StoreResult {
    PumpResult pump;
    NoiseModel noise;
    double noise_per_window = 0.0;
    std::vector<WindowStorage> windows;
};

StoreResult run_store(const RunConfig& cfg);

struct AuditRow {
    AuditPoint point;
    double spacing_mhz = 0.0;
    CommensurateResidues residues;
    double mismatch = 0.0;
};

struct SearchResult {
    double spacing_mhz = 0.0;
    std::vector<FieldCandidate> candidates;
    bool hole_width_limited = false;
};

struct CommensurateResult {
    MismatchMap map;
    std::vector<SearchResult> searches;
    std::vector<AuditRow> audit;
};

CommensurateResult run_commensurate(const RunConfig& cfg);

struct CompileResult {
    RFSchedule schedule;
    CoverageReport coverage;
};

CompileResult run_compile(const RunConfig& cfg);

// Files written by a command plus a human-readable summary for stdout.
struct CommandOutput {
    OutputSet files;
    std::string summary;
};

CommandOutput cmd_holeburn(const RunConfig& cfg);
CommandOutput cmd_pump(const RunConfig& cfg);
CommandOutput cmd_store(const RunConfig& cfg);
CommandOutput cmd_commensurate(const RunConfig& cfg);
CommandOutput cmd_compile(const RunConfig& cfg);
// Runs cfg.sweep.command over the cartesian product of the sweep parameters,
// re-parsing `text` with each combination applied as overrides.
CommandOutput cmd_sweep(const std::string& text, const std::string& source, const std::vector<Override>& base);

// Schedule and coverage as JSON documents.
std::string coverage_json(const CoverageReport& report);

} // namespace afcsim
