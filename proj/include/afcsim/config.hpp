#pragma once

#include "afcsim/afc.hpp"
#include "afcsim/commensurate.hpp"
#include "afcsim/material.hpp"
#include "afcsim/pumping.hpp"
#include "afcsim/seqcompile.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace afcsim {

// Unpumped medium.
struct MediumConfig {
    double peak_od = 2.0;
    int passes = 1;
    InhomogeneousProfile profile;
};

enum class PumpDriver {
    direct,    // plan_pumping: one step per trough on the bare laser
    schedule,  // compile the target and simulate the RF schedule
};

struct StorageConfig {
    InputPulse pulse;
    int max_echo_order = 5;
    double max_dt_ns = 1.0;
    long events = 10000;
    double mean_photon = 1.0;
    double window_ns = 100.0;
    NoiseModel noise;
    // > 0: fit the spontaneous-emission coefficient so the total noise at
    // the wait time equals this many counts per window.
    double noise_total_counts = 0.0;
};

struct AuditPoint {
    double field_g = 0.0;
    double storage_time_ns = 0.0;
    double reported_match = 0.0;  // fraction quoted for comparison
};

struct CommensurateConfig {
    AxisRange field{50.0, 700.0, 1.0};
    AxisRange second{50.0, 1000.0, 5.0};
    SpacingAxis axis = SpacingAxis::storage_time_ns;
    std::vector<double> search_spacings_mhz;
    AxisRange search_field{100.0, 1500.0, 1.0};
    std::size_t top_k = 5;
    std::vector<AuditPoint> audit;
};

struct SweepConfig {
    std::string command = "store";
    // JSON pointer -> list of values, each stored as JSON text.
    std::vector<std::pair<std::string, std::vector<std::string>>> parameters;
};

struct RunConfig {
    std::string source;  // file name used in messages
    IonClass ion;
    HolePatternOptions pattern;
    FieldConfig field;
    GridSpec grid;
    MediumConfig medium;
    PumpTarget target;
    PulseTrain train;
    HardwareLimits hardware;
    PumpDriver driver = PumpDriver::direct;
    bool simulate_leakage = false;
    StorageConfig storage;
    CommensurateConfig commensurate;
    SweepConfig sweep;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string output_dir = "out";
};

// JSON pointer value replacement applied before validation.
struct Override {
    std::string pointer;
    std::string value_json;
};

// Parses and validates a run configuration. Every problem is reported as
// ConfigError "<source>:<line>: <pointer>: <reason>". Unknown keys are errors.
RunConfig parse_config(const std::string& text, const std::string& source,
                       const std::vector<Override>& overrides = {});
RunConfig load_config(const std::string& path, const std::vector<Override>& overrides = {});

// Relative config paths that do not exist are looked up in $AFCSIM_CONFIG_DIR.
std::string resolve_config_path(const std::string& path);

// Reads a whole file; throws Error if it cannot be opened.
std::string read_text_file(const std::string& path);

} // namespace afcsim
