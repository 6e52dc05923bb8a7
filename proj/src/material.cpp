#include "afcsim/material.hpp"

#include "afcsim/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace afcsim {

namespace {

void require_positive(double v, const char* name)
{
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw InvalidArgument(std::string("ion constant '") + name + "' must be positive");
    }
}

void require_fraction(double v, const char* name, bool open)
{
    const bool ok = open ? (v > 0.0 && v < 1.0) : (v >= 0.0 && v <= 1.0);
    if (!ok) {
        throw InvalidArgument(std::string("ion constant '") + name + "' is outside its range");
    }
}

} // namespace

void IonClass::validate() const
{
    require_positive(mu_e, "mu_e");
    require_positive(mu_g, "mu_g");
    require_positive(t_bottleneck_ms, "t_bottleneck_ms");
    require_positive(t_ground_ms, "t_ground_ms");
    require_positive(t2_opt_us, "t2_opt_us");
    require_positive(hole_fwhm_mhz, "hole_fwhm_mhz");
    require_positive(t_excited_ms, "t_excited_ms");
    require_fraction(branching_ratio, "branching_ratio", false);
    require_fraction(spin_branching, "spin_branching", false);
    require_fraction(rel_crossed, "rel_crossed", true);
}

Splittings zeeman_splittings(const IonClass& ion, FieldConfig field)
{
    if (field.gauss < 0.0) {
        throw InvalidArgument("magnetic field must be non-negative");
    }
    return {ion.mu_e * field.gauss, ion.mu_g * field.gauss};
}

std::size_t HolePattern::count(FeatureKind kind) const
{
    return static_cast<std::size_t>(std::count_if(features.begin(), features.end(),
                                                   [kind](const auto& f) { return f.kind == kind; }));
}

double HolePattern::profile(double offset_mhz, Lineshape shape, double fwhm_mhz) const
{
    double sum = 0.0;
    for (const auto& f : features) {
        const double sign = f.kind == FeatureKind::hole ? -1.0 : 1.0;
        sum += sign * f.weight * lineshape(shape, fwhm_mhz, offset_mhz - f.offset_mhz);
    }
    return sum;
}

HolePattern hole_pattern(double delta_e_mhz, double delta_g_mhz, const IonClass& ion,
                         const HolePatternOptions& options)
{
    if (delta_e_mhz < 0.0 || delta_g_mhz < 0.0) {
        throw InvalidArgument("splittings must be non-negative");
    }
    const double r = ion.rel_crossed;
    const double de = delta_e_mhz;
    const double dg = delta_g_mhz;

    std::vector<SpectralFeature> raw;
    auto add_pair = [&raw](double offset, FeatureKind kind, double weight) {
        raw.push_back({offset, kind, weight});
        raw.push_back({-offset, kind, weight});
    };
    raw.push_back({0.0, FeatureKind::hole, 2.0 * (1.0 + r * r)});
    add_pair(de, FeatureKind::hole, 2.0 * r);
    add_pair(dg - de, FeatureKind::antihole, 1.0);
    add_pair(dg, FeatureKind::antihole, 2.0 * r);
    add_pair(dg + de, FeatureKind::antihole, r * r);
    if (options.include_hole_only_class) {
        const double w = options.hole_only_weight;
        raw.push_back({0.0, FeatureKind::hole, w});
        add_pair(options.hole_only_splitting_mhz, FeatureKind::hole, 0.5 * w);
    }

    std::sort(raw.begin(), raw.end(),
              [](const auto& a, const auto& b) { return a.offset_mhz < b.offset_mhz; });

    HolePattern out{de, dg, r, {}};
    for (const auto& f : raw) {
        if (!out.features.empty() && std::abs(f.offset_mhz - out.features.back().offset_mhz) < 1e-9) {
            auto& merged = out.features.back();
            merged.weight += f.weight;
            if (f.kind == FeatureKind::hole) {
                merged.kind = FeatureKind::hole;
            }
            continue;
        }
        out.features.push_back(f);
    }
    // -0.0 and merge residue at the origin.
    for (auto& f : out.features) {
        if (std::abs(f.offset_mhz) < 1e-9) {
            f.offset_mhz = 0.0;
        }
    }
    return out;
}

} // namespace afcsim
