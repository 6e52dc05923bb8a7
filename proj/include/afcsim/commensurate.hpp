#pragma once

#include "afcsim/material.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace afcsim {

// Quotients of the four splittings (De, Dg, |Dg - De|, Dg + De) by the comb
// spacing. The first must be an integer, the other three half-integers, for
// every hole to land in a trough and every anti-hole on a tooth.
struct CommensurateResidues {
    std::array<double, 4> quotients{};  // raw split / spacing
    std::array<double, 4> distances{};  // to the nearest admissible value, in [0, 0.5]

    double sum() const { return distances[0] + distances[1] + distances[2] + distances[3]; }
};

CommensurateResidues residues(double field_g, double spacing_mhz, const IonClass& ion);

// Sum of the four distances divided by 2: 0 is a perfect match, 1 the worst.
double mismatch(double field_g, double spacing_mhz, const IonClass& ion);

// Inclusive axis: start, start + step, ... up to stop (within step / 2).
struct AxisRange {
    double start = 0.0;
    double stop = 0.0;
    double step = 1.0;

    std::vector<double> values() const;
};

enum class SpacingAxis { storage_time_ns, spacing_mhz };

struct MismatchMap {
    std::vector<double> field_g;
    std::vector<double> second;   // storage time (ns) or spacing (MHz)
    SpacingAxis axis = SpacingAxis::storage_time_ns;
    std::vector<double> values;   // row-major: field index outer

    double at(std::size_t i_field, std::size_t j) const { return values[i_field * second.size() + j]; }
    double spacing_mhz(std::size_t j) const { return axis == SpacingAxis::spacing_mhz ? second[j] : 1e3 / second[j]; }
};

MismatchMap mismatch_map(const AxisRange& field, const AxisRange& second, SpacingAxis axis,
                         const IonClass& ion, int threads = 1);

struct FieldCandidate {
    double field_g = 0.0;
    double mismatch = 0.0;
};

// Scans the field range at its step, refines every local minimum
// (golden section to 0.01 G, then the nearest exact kinks of the piecewise
// linear metric) and returns the best top_k, lowest mismatch first.
std::vector<FieldCandidate> search_field(double spacing_mhz, const AxisRange& field, const IonClass& ion,
                                         std::size_t top_k);

// Comb spacing for intrinsic pumping at this field: 2 (Dg - De).
double intrinsic_delta(double field_g, const IonClass& ion);

// True when the pumped half-period is narrower than twice the hole width.
bool hole_width_limited(double spacing_mhz, const IonClass& ion);

} // namespace afcsim
