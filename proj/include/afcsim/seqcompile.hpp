#pragma once

#include "afcsim/pumping.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace afcsim {

struct HardwareLimits {
    double aom_bandwidth_mhz = 50.0;   // RF modulation range
    bool aom_double_pass = true;       // optical shift = 2 x RF shift
    double aom_center_mhz = 80.0;      // RF frequency mapped to zero optical detuning
    int eom_max_tones = 3;
    double eom_extinction = 20.0;      // on/off amplitude ratio of a gated tone
    bool etalon_enabled = false;
    double etalon_bandwidth_mhz = 500.0;
    double etalon_center_mhz = 0.0;    // optical offset from the laser carrier

    // Largest optical detuning a single AOM sweep can reach from its tone.
    double optical_half_span() const { return (aom_double_pass ? 2.0 : 1.0) * 0.5 * aom_bandwidth_mhz; }
    void validate() const;
};

enum class Envelope { sech, cw };

struct AomSegment {
    double start_ms = 0.0;     // within one repetition
    double duration_ms = 0.0;
    double f_start_mhz = 0.0;  // RF
    double f_stop_mhz = 0.0;
    Envelope envelope = Envelope::sech;
    double amplitude = 1.0;
    int gate = 0;              // time slot sharing one EOM tone set

    bool operator==(const AomSegment&) const = default;
};

struct EomTone {
    double freq_mhz = 0.0;     // RF drive frequency
    double amplitude = 0.0;
    int gate = 0;
    double start_ms = 0.0;     // on-interval within one repetition
    double stop_ms = 0.0;

    bool operator==(const EomTone&) const = default;
};

struct GateTone {
    int gate = 0;
    double offset_mhz = 0.0;   // optical offset from the carrier
    double amplitude = 1.0;

    bool operator==(const GateTone&) const = default;
};

struct RFSchedule {
    std::vector<AomSegment> aom_segments;  // one repetition, time ordered
    std::vector<EomTone> eom_tones;
    std::vector<GateTone> optical_tones;   // after EOM and etalon, per gate
    int repetitions = 0;
    double period_ms = 0.0;
    double aom_center_mhz = 80.0;
    bool aom_double_pass = true;

    double total_ms() const { return period_ms * repetitions; }
    int gate_count() const;
    // Optical detuning and width of a segment relative to its tone.
    double detuning_mhz(const AomSegment& s) const;
    double sweep_width_mhz(const AomSegment& s) const;

    bool operator==(const RFSchedule&) const = default;
};

// One chirped sech segment per comb period, ascending in frequency, grouped
// in gates of windows that share the same comb; EOM sidebands carry a gate's
// sweep to every window centre of that gate.
// Throws CompileError naming the offending window if the target cannot be
// reached.
RFSchedule compile(const PumpTarget& target, const PulseTrain& train, const HardwareLimits& limits);

struct LeakageWarning {
    int gate = 0;
    double tone_offset_mhz = 0.0;
    double amplitude = 0.0;
    int window = -1;
    std::string reason;
};

struct CoverageReport {
    int comb_lines = 0;
    double bandwidth_mhz = 0.0;
    std::size_t optical_tones = 0;  // distinct optical tones across gates
    std::vector<LeakageWarning> warnings;
};

CoverageReport coverage(const RFSchedule& schedule, const PumpTarget& target, const HardwareLimits& limits);

// Inverse of compile for the simulator: each segment becomes a pump step
// carried by the gate's optical tones. Tones of idle gates ride along at
// amplitude `leak_amplitude` (1 / eom_extinction; 0 drops them).
PumpProgram to_program(const RFSchedule& schedule, double wait_ms, double leak_amplitude = 0.0);

enum class ScheduleFormat { csv, json };

// Byte-stable serialisation. CSV columns:
// channel,t_start_ms,t_stop_ms,f_start_MHz,f_stop_MHz,envelope,amplitude
std::string emit(const RFSchedule& schedule, ScheduleFormat format);
void emit_file(const RFSchedule& schedule, ScheduleFormat format, const std::string& path);

RFSchedule parse_json(const std::string& text);
// The CSV carries expanded rows only; the parsed schedule has one repetition
// holding every row, so emit(parse_csv(x), csv) == x.
RFSchedule parse_csv(const std::string& text);

} // namespace afcsim
