#pragma once

#include "afcsim/grid.hpp"
#include "afcsim/material.hpp"
#include "afcsim/spectrum.hpp"

#include <vector>

namespace afcsim {

// Train of adiabatic (sech amplitude, tanh chirp) pump pulses. Each pulse
// burns a square spectral footprint of width delta_p; the footprint is
// treated as a piecewise-constant pump rate.
struct PulseTrain {
    double t0_ms = 0.15;
    int repetitions = 600;
    double delta_p_mhz = 4.2;
    bool sech_amplitude = true;
    bool tanh_chirp = true;
    double peak_rate_per_ms = 40.0;  // fitted to the OD 12, 6 MHz comb

    void validate() const;
};

struct PumpWindow {
    double center_mhz = 0.0;
    double bandwidth_mhz = 30.0;
    double spacing_mhz = 0.0;  // 0: use PumpTarget::comb_spacing_mhz
    double delta_p_mhz = 0.0;  // 0: use PulseTrain::delta_p_mhz
};

struct PumpTarget {
    double comb_spacing_mhz = 6.0;
    double tooth_width_mhz = 1.8;
    std::vector<PumpWindow> windows;
    double wait_ms = 5.0;

    double spacing(const PumpWindow& w) const { return w.spacing_mhz > 0.0 ? w.spacing_mhz : comb_spacing_mhz; }
    void validate() const;
};

// Number of comb periods in a window and the centres of the pumped troughs:
// one trough in the middle of every period, so the teeth sit on the period
// boundaries and the layout is symmetric about the window centre.
int comb_periods(const PumpTarget& target, const PumpWindow& window);
std::vector<double> trough_centers(const PumpTarget& target, const PumpWindow& window);
std::vector<double> tooth_centers(const PumpTarget& target, const PumpWindow& window);

struct OpticalTone {
    double offset_mhz = 0.0;  // relative to the laser carrier
    double power = 1.0;       // relative pump rate multiplier
};

// One pulse of the repeated sequence. The sweep is centred at center_mhz
// relative to every tone it is carried on.
struct PumpStep {
    double center_mhz = 0.0;
    double width_mhz = 0.0;
    double duration_ms = 0.0;
    std::vector<OpticalTone> tones{OpticalTone{}};
};

struct PumpProgram {
    std::vector<PumpStep> steps;  // one repetition, in time order
    int repetitions = 0;
    double wait_ms = 0.0;
};

// Steps in ascending frequency, one per comb tooth, carried by the bare laser.
PumpProgram plan_pumping(const PumpTarget& target, const PulseTrain& train);

// Pump rate (1/ms) seen by a line at each grid frequency during one pulse
// centred at tooth_center_mhz. Throws InvalidArgument if the centre is off
// the grid.
std::vector<double> pump_weight(const PulseTrain& train, double tooth_center_mhz, const Grid& grid,
                                const IonClass& ion);

struct PumpRun {
    Spectrum prepared;     // after the wait time
    Spectrum end_of_pump;  // immediately after the last pulse
    std::vector<double> floor_od_history;  // mean trough OD after each repetition
    double initial_population = 0.0;  // padded ion lattice, density weighted
    double final_population = 0.0;
};

PumpRun run_pumping(const Spectrum& input, const PumpProgram& program, double peak_rate_per_ms,
                    const HolePattern& pattern, const IonClass& ion);

// Pumps every comb tooth of `target`, then lets the ensemble relax for
// target.wait_ms. `converged` is cleared on the result if the trough floor
// OD ever rose between repetitions.
Spectrum simulate_pumping(const Spectrum& input, const PumpTarget& target, const PulseTrain& train,
                          const HolePattern& pattern, const IonClass& ion);

// Two-component hole recovery: bottleneck refill plus ground relaxation.
double hole_decay(double depth_fast, double depth_slow, double t_ms, const IonClass& ion);

struct NoiseModel {
    double leak_counts = 5.5e-4;   // per window
    double dark_counts = 1e-5;     // per window
    double emission_per_ns = 0.0;  // counts per ns per unit mean excited fraction
    double radiative_lifetime_ms = 0.8;
};

// Expected noise counts per detection window, t_w after the end of pumping.
double noise_counts(const Spectrum& end_of_pump, double t_w_ms, double window_ns,
                    const NoiseModel& model);

// Returns `model` with emission_per_ns chosen so noise_counts(...) equals
// target_counts at t_w. Throws if the target is below leak + dark.
NoiseModel calibrate_emission(const Spectrum& end_of_pump, double t_w_ms, double window_ns,
                              NoiseModel model, double target_counts);

} // namespace afcsim
