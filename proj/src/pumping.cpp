#include "afcsim/pumping.hpp"

#include "afcsim/error.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace afcsim {

namespace {

// Per-channel state order.
enum : int { kG1 = 0, kG2, kE1, kE2, kB1, kB2, kStates };

using Matrix6 = Eigen::Matrix<double, kStates, kStates>;
using Vector6 = Eigen::Matrix<double, kStates, 1>;

// Generator of the free (unpumped) relaxation. Excited ions decay either
// directly or through the bottleneck; on reaching the ground doublet a
// fraction spin_branching lands in the doublet level they did not start from.
Matrix6 relaxation_generator(const IonClass& ion)
{
    Matrix6 a = Matrix6::Zero();
    const double ke = 1.0 / ion.t_excited_ms;
    const double kb = 1.0 / ion.t_bottleneck_ms;
    const double kg = 0.5 / ion.t_ground_ms;
    const double fb = ion.branching_ratio;
    const double sb = ion.spin_branching;

    a(kG1, kG1) -= kg;
    a(kG2, kG1) += kg;
    a(kG2, kG2) -= kg;
    a(kG1, kG2) += kg;

    for (int origin = 0; origin < 2; ++origin) {
        const int e = kE1 + origin;
        const int b = kB1 + origin;
        const int same = kG1 + origin;
        const int other = kG1 + (1 - origin);
        a(e, e) -= ke;
        a(b, e) += ke * fb;
        a(same, e) += ke * (1.0 - fb) * (1.0 - sb);
        a(other, e) += ke * (1.0 - fb) * sb;
        a(b, b) -= kb;
        a(same, b) += kb * (1.0 - sb);
        a(other, b) += kb * sb;
    }
    return a;
}

double footprint(Lineshape shape, double fwhm, double width, double x)
{
    if (width <= 0.0) {
        return lineshape(shape, fwhm, x) / lineshape(shape, fwhm, 0.0);
    }
    return rect_convolved(shape, fwhm, width, x) / rect_convolved(shape, fwhm, width, 0.0);
}

struct Lattice {
    double start = 0.0;
    double step = 1.0;
    std::size_t pad = 0;
    std::size_t size = 0;
    double at(std::size_t j) const { return start + static_cast<double>(j) * step; }
};

struct State {
    std::vector<double> density;
    std::array<std::vector<double>, kStates> pop;

    double total() const
    {
        double sum = 0.0;
        for (std::size_t j = 0; j < density.size(); ++j) {
            double c = 0.0;
            for (const auto& p : pop) {
                c += p[j];
            }
            sum += density[j] * c;
        }
        return sum;
    }
};

void relax(State& s, const Matrix6& m)
{
    const std::size_t n = s.density.size();
    for (std::size_t j = 0; j < n; ++j) {
        Vector6 v;
        for (int k = 0; k < kStates; ++k) {
            v[k] = s.pop[k][j];
        }
        const Vector6 w = m * v;
        for (int k = 0; k < kStates; ++k) {
            s.pop[k][j] = w[k];
        }
    }
}

Spectrum crop(const Spectrum& input, const Lattice& lat, const State& s, const AbsorptionModel& model)
{
    Spectrum out = input;
    const auto od = model.od(s.density, s.pop[kG1], s.pop[kG2]);
    for (std::size_t i = 0; i < input.size(); ++i) {
        const std::size_t j = i + lat.pad;
        out.od[i] = od[j];
        out.pop_g1[i] = s.pop[kG1][j];
        out.pop_g2[i] = s.pop[kG2][j];
        out.pop_exc[i] = s.pop[kE1][j] + s.pop[kE2][j] + s.pop[kB1][j] + s.pop[kB2][j];
    }
    return out;
}

} // namespace

void PulseTrain::validate() const
{
    if (!(t0_ms > 0.0)) {
        throw InvalidArgument("pulse duration t0 must be positive");
    }
    if (repetitions < 0) {
        throw InvalidArgument("repetition count must be non-negative");
    }
    if (!(delta_p_mhz > 0.0)) {
        throw InvalidArgument("chirp bandwidth delta_p must be positive");
    }
    if (!(peak_rate_per_ms >= 0.0)) {
        throw InvalidArgument("peak pump rate must be non-negative");
    }
}

void PumpTarget::validate() const
{
    if (!(comb_spacing_mhz > 0.0)) {
        throw InvalidArgument("comb spacing must be positive");
    }
    if (!(tooth_width_mhz > 0.0) || !(tooth_width_mhz < comb_spacing_mhz)) {
        throw InvalidArgument("tooth width must be positive and below the comb spacing");
    }
    if (wait_ms < 0.0) {
        throw InvalidArgument("wait time must be non-negative");
    }
    std::vector<std::pair<double, double>> spans;
    for (const auto& w : windows) {
        if (!(w.bandwidth_mhz > 0.0)) {
            throw InvalidArgument("window bandwidth must be positive");
        }
        if (w.spacing_mhz < 0.0 || w.delta_p_mhz < 0.0) {
            throw InvalidArgument("window overrides must be non-negative");
        }
        if (w.bandwidth_mhz < spacing(w) - 1e-9) {
            throw InvalidArgument("window narrower than one comb period");
        }
        spans.emplace_back(w.center_mhz - 0.5 * w.bandwidth_mhz, w.center_mhz + 0.5 * w.bandwidth_mhz);
    }
    std::sort(spans.begin(), spans.end());
    for (std::size_t i = 1; i < spans.size(); ++i) {
        if (spans[i].first < spans[i - 1].second - 1e-9) {
            throw InvalidArgument("pump windows overlap");
        }
    }
}

int comb_periods(const PumpTarget& target, const PumpWindow& window)
{
    return static_cast<int>(std::lround(window.bandwidth_mhz / target.spacing(window)));
}

std::vector<double> trough_centers(const PumpTarget& target, const PumpWindow& window)
{
    const double spacing = target.spacing(window);
    const int n = comb_periods(target, window);
    const double lo = window.center_mhz - 0.5 * spacing * n;
    std::vector<double> c(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        c[static_cast<std::size_t>(k)] = lo + (k + 0.5) * spacing;
    }
    return c;
}

std::vector<double> tooth_centers(const PumpTarget& target, const PumpWindow& window)
{
    const double spacing = target.spacing(window);
    const int n = comb_periods(target, window);
    const double lo = window.center_mhz - 0.5 * spacing * n;
    std::vector<double> c;
    for (int k = 0; k <= n; ++k) {
        c.push_back(lo + k * spacing);
    }
    return c;
}

PumpProgram plan_pumping(const PumpTarget& target, const PulseTrain& train)
{
    target.validate();
    train.validate();
    PumpProgram p;
    p.repetitions = train.repetitions;
    p.wait_ms = target.wait_ms;
    for (const auto& w : target.windows) {
        const double width = w.delta_p_mhz > 0.0 ? w.delta_p_mhz : train.delta_p_mhz;
        for (double c : trough_centers(target, w)) {
            p.steps.push_back(PumpStep{c, width, train.t0_ms, {OpticalTone{}}});
        }
    }
    std::stable_sort(p.steps.begin(), p.steps.end(),
                     [](const auto& a, const auto& b) { return a.center_mhz < b.center_mhz; });
    return p;
}

std::vector<double> pump_weight(const PulseTrain& train, double tooth_center_mhz, const Grid& grid,
                                const IonClass& ion)
{
    if (!grid.contains(tooth_center_mhz)) {
        throw InvalidArgument("tooth centre lies outside the spectral grid");
    }
    const AbsorptionModel model(hole_pattern(0.0, 0.0, ion), ion, grid.step, 1.0);
    // Below one grid step the sweep is indistinguishable from a monochromatic burn.
    const double width = train.delta_p_mhz <= grid.step ? 0.0 : train.delta_p_mhz;
    std::vector<double> w(grid.size);
    for (std::size_t i = 0; i < grid.size; ++i) {
        w[i] = train.peak_rate_per_ms *
               footprint(model.shape(), model.kernel_fwhm(), width, grid.at(i) - tooth_center_mhz);
    }
    return w;
}

PumpRun run_pumping(const Spectrum& input, const PumpProgram& program, double peak_rate_per_ms,
                    const HolePattern& pattern, const IonClass& ion)
{
    ion.validate();
    if (input.size() == 0) {
        throw InvalidArgument("empty spectrum");
    }
    if (input.normalization_error() > 1e-9) {
        throw InvalidArgument("input spectrum populations are not normalised");
    }
    if (program.repetitions < 0 || program.wait_ms < 0.0) {
        throw InvalidArgument("invalid pump program");
    }
    if (program.repetitions == 0 || program.steps.empty()) {
        PumpRun run{input, input, {}, input.total_population(), input.total_population()};
        return run;
    }
    for (const auto& step : program.steps) {
        if (!(step.duration_ms > 0.0)) {
            throw InvalidArgument("pump step duration must be positive");
        }
    }

    const AbsorptionModel model(pattern, ion, input.grid.step, input.baseline_od);
    Lattice lat;
    lat.step = input.grid.step;
    lat.pad = model.padding_channels();
    lat.size = input.size() + 2 * lat.pad;
    lat.start = input.grid.start - static_cast<double>(lat.pad) * lat.step;

    State s;
    s.density.resize(lat.size);
    for (auto& p : s.pop) {
        p.assign(lat.size, 0.0);
    }
    for (std::size_t j = 0; j < lat.size; ++j) {
        s.density[j] = input.profile.density(lat.at(j));
        s.pop[kG1][j] = 0.5;
        s.pop[kG2][j] = 0.5;
    }
    for (std::size_t i = 0; i < input.size(); ++i) {
        const std::size_t j = i + lat.pad;
        s.pop[kG1][j] = input.pop_g1[i];
        s.pop[kG2][j] = input.pop_g2[i];
        s.pop[kE1][j] = 0.5 * input.pop_exc[i];
        s.pop[kE2][j] = 0.5 * input.pop_exc[i];
    }

    // Survival factors exp(-R t0) for both ground levels, per step.
    const auto& lines = model.lines();
    const double reach = kernel_half_width(model.shape(), model.kernel_fwhm());
    std::vector<std::array<std::vector<double>, 2>> survive(program.steps.size());
    for (std::size_t k = 0; k < program.steps.size(); ++k) {
        const auto& step = program.steps[k];
        const double width = step.width_mhz <= lat.step ? 0.0 : step.width_mhz;
        const double half = 0.5 * width + reach;
        for (int g = 0; g < 2; ++g) {
            auto& f = survive[k][static_cast<std::size_t>(g)];
            f.assign(lat.size, 1.0);
            for (std::size_t j = 0; j < lat.size; ++j) {
                double rate = 0.0;
                for (const auto& line : lines) {
                    if (line.ground != g) {
                        continue;
                    }
                    for (const auto& tone : step.tones) {
                        const double x = lat.at(j) + line.offset_mhz - tone.offset_mhz - step.center_mhz;
                        if (std::abs(x) < half) {
                            rate += tone.power * line.strength *
                                    footprint(model.shape(), model.kernel_fwhm(), width, x);
                        }
                    }
                }
                f[j] = std::exp(-peak_rate_per_ms * rate * step.duration_ms);
            }
        }
    }

    const Matrix6 gen = relaxation_generator(ion);
    std::map<double, Matrix6> relax_cache;
    auto relaxation = [&](double t) -> const Matrix6& {
        auto it = relax_cache.find(t);
        if (it == relax_cache.end()) {
            it = relax_cache.emplace(t, (gen * t).exp()).first;
        }
        return it->second;
    };

    std::vector<std::size_t> floor_idx;
    for (const auto& step : program.steps) {
        for (const auto& tone : step.tones) {
            const double f = step.center_mhz + tone.offset_mhz;
            if (input.grid.contains(f)) {
                floor_idx.push_back(input.grid.nearest(f) + lat.pad);
            }
        }
    }
    std::sort(floor_idx.begin(), floor_idx.end());
    floor_idx.erase(std::unique(floor_idx.begin(), floor_idx.end()), floor_idx.end());

    PumpRun run;
    run.initial_population = s.total();
    bool converged = true;
    double last_floor = std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < program.repetitions; ++rep) {
        for (std::size_t k = 0; k < program.steps.size(); ++k) {
            const auto& f1 = survive[k][0];
            const auto& f2 = survive[k][1];
            for (std::size_t j = 0; j < lat.size; ++j) {
                const double moved1 = s.pop[kG1][j] * (1.0 - f1[j]);
                const double moved2 = s.pop[kG2][j] * (1.0 - f2[j]);
                s.pop[kG1][j] -= moved1;
                s.pop[kE1][j] += moved1;
                s.pop[kG2][j] -= moved2;
                s.pop[kE2][j] += moved2;
            }
            relax(s, relaxation(program.steps[k].duration_ms));
        }
        if (!floor_idx.empty()) {
            double floor = 0.0;
            for (std::size_t j : floor_idx) {
                floor += model.od_at(j, s.density, s.pop[kG1], s.pop[kG2]);
            }
            floor /= static_cast<double>(floor_idx.size());
            if (floor > last_floor + 1e-9 * std::max(1.0, input.baseline_od)) {
                converged = false;
            }
            last_floor = floor;
            run.floor_od_history.push_back(floor);
        }
    }

    run.end_of_pump = crop(input, lat, s, model);
    if (program.wait_ms > 0.0) {
        relax(s, relaxation(program.wait_ms));
    }
    run.prepared = crop(input, lat, s, model);
    run.prepared.converged = converged;
    run.end_of_pump.converged = converged;
    run.final_population = s.total();
    return run;
}

Spectrum simulate_pumping(const Spectrum& input, const PumpTarget& target, const PulseTrain& train,
                          const HolePattern& pattern, const IonClass& ion)
{
    const PumpProgram program = plan_pumping(target, train);
    for (const auto& step : program.steps) {
        if (!input.grid.contains(step.center_mhz)) {
            throw InvalidArgument("pump target tooth lies outside the spectral grid");
        }
    }
    return run_pumping(input, program, train.peak_rate_per_ms, pattern, ion).prepared;
}

double hole_decay(double depth_fast, double depth_slow, double t_ms, const IonClass& ion)
{
    if (t_ms < 0.0 || depth_fast < 0.0 || depth_slow < 0.0) {
        throw InvalidArgument("hole_decay needs t >= 0 and non-negative depths");
    }
    return depth_fast * std::exp(-t_ms / ion.t_bottleneck_ms) + depth_slow * std::exp(-t_ms / ion.t_ground_ms);
}

double noise_counts(const Spectrum& end_of_pump, double t_w_ms, double window_ns, const NoiseModel& model)
{
    if (!(window_ns > 0.0)) {
        throw InvalidArgument("detection window must be positive");
    }
    if (t_w_ms < 0.0) {
        throw InvalidArgument("wait time must be non-negative");
    }
    double mean_exc = 0.0;
    if (end_of_pump.size() > 0) {
        mean_exc = std::accumulate(end_of_pump.pop_exc.begin(), end_of_pump.pop_exc.end(), 0.0) /
                   static_cast<double>(end_of_pump.size());
    }
    const double spont = model.emission_per_ns * window_ns * mean_exc *
                         std::exp(-t_w_ms / model.radiative_lifetime_ms);
    return spont + model.leak_counts + model.dark_counts;
}

NoiseModel calibrate_emission(const Spectrum& end_of_pump, double t_w_ms, double window_ns,
                              NoiseModel model, double target_counts)
{
    const double floor = model.leak_counts + model.dark_counts;
    if (target_counts < floor) {
        throw InvalidArgument("target noise is below the constant leak + dark floor");
    }
    model.emission_per_ns = 1.0;
    const double unit = noise_counts(end_of_pump, t_w_ms, window_ns, model) - floor;
    if (!(unit > 0.0)) {
        throw InvalidArgument("no excited population to calibrate against");
    }
    model.emission_per_ns = (target_counts - floor) / unit;
    return model;
}

} // namespace afcsim
