#include "afcsim/afc.hpp"

#include "afcsim/error.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>

namespace afcsim {

namespace {

using cplx = std::complex<double>;

// FFTW planning is not thread-safe; execution is.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

class FftPlan {
public:
    FftPlan(std::vector<cplx>& buffer, int sign)
    {
        std::lock_guard lock(planner_mutex());
        auto* data = reinterpret_cast<fftw_complex*>(buffer.data());
        plan_ = fftw_plan_dft_1d(static_cast<int>(buffer.size()), data, data, sign, FFTW_ESTIMATE);
    }
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;
    ~FftPlan()
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan_);
    }
    void run() const { fftw_execute(plan_); }

private:
    fftw_plan plan_ = nullptr;
};

// Sizes with only small prime factors keep FFTW on its fast paths.
std::size_t smooth_size(std::size_t n)
{
    for (;; ++n) {
        if (n % 2 != 0) {
            continue;
        }
        std::size_t m = n;
        for (std::size_t p : {2u, 3u, 5u, 7u}) {
            while (m % p == 0) {
                m /= p;
            }
        }
        if (m == 1) {
            return n;
        }
    }
}

double od_at(const Spectrum& s, double f)
{
    const double x = (f - s.grid.start) / s.grid.step;
    if (x <= 0.0) {
        return s.od.front();
    }
    const double last = static_cast<double>(s.size() - 1);
    if (x >= last) {
        return s.od.back();
    }
    const auto i = static_cast<std::size_t>(x);
    const double t = x - static_cast<double>(i);
    return (1.0 - t) * s.od[i] + t * s.od[i + 1];
}

} // namespace

double EchoTrace::efficiency(int order) const
{
    for (const auto& e : echoes) {
        if (e.order == order) {
            return e.efficiency;
        }
    }
    return 0.0;
}

EchoTrace propagate(const Spectrum& spectrum, const InputPulse& pulse, const PropagateOptions& options)
{
    if (spectrum.size() < 2) {
        throw InvalidArgument("spectrum must have at least two channels");
    }
    if (!(pulse.fwhm_ns > 0.0)) {
        throw InvalidArgument("pulse duration must be positive");
    }
    if (!(options.max_dt_ns > 0.0) || !(options.alias_tolerance > 0.0) || options.max_echo_order < 0 ||
        options.comb_spacing_mhz < 0.0) {
        throw InvalidArgument("invalid propagation options");
    }
    const double df = spectrum.grid.step;
    // Transform-limited Gaussian: intensity FWHM product 2 ln2 / pi.
    const double pulse_bw_mhz = 1e3 * 2.0 * std::numbers::ln2 / (std::numbers::pi * pulse.fwhm_ns);
    if (pulse_bw_mhz >= 0.5 * spectrum.grid.span()) {
        throw ResolutionError("pulse bandwidth exceeds half of the spectrum span");
    }
    if (df > 0.25 * pulse_bw_mhz) {
        throw ResolutionError("spectrum grid does not resolve the pulse spectrum");
    }

    const double dt_target = std::min(options.max_dt_ns, pulse.fwhm_ns / 20.0);
    const auto n_time = static_cast<std::size_t>(std::ceil(1e3 / (df * dt_target)));
    const std::size_t n = smooth_size(std::max(n_time, spectrum.size()));
    const double window_ns = 1e3 / df;
    const double dt = window_ns / static_cast<double>(n);

    const double t_in = 5.0 * pulse.fwhm_ns;
    const double echo_span = options.comb_spacing_mhz > 0.0
                                 ? (options.max_echo_order + 0.5) * 1e3 / options.comb_spacing_mhz
                                 : 0.0;
    if (t_in + echo_span + 5.0 * pulse.fwhm_ns > window_ns) {
        throw AliasingError("echo windows do not fit in the FFT time window; refine the grid step");
    }

    // Frequency bins in FFT order relative to the pulse carrier.
    std::vector<cplx> logh(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double fk = (k < n / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n)) * df;
        logh[k] = -0.5 * od_at(spectrum, pulse.center_mhz + fk);
    }

    // Real cepstrum of the log magnitude, folded onto positive quefrency.
    FftPlan backward_log(logh, FFTW_BACKWARD);
    FftPlan forward_log(logh, FFTW_FORWARD);
    backward_log.run();
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        double w = 0.0;
        if (k == 0 || k == n / 2) {
            w = 1.0;
        } else if (k < n / 2) {
            w = 2.0;
        }
        logh[k] = cplx(logh[k].real() * inv_n * w, 0.0);
    }
    forward_log.run();

    std::vector<cplx> field(n);
    std::vector<double> input(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double x = (static_cast<double>(j) * dt - t_in) / pulse.fwhm_ns;
        const double amp = std::exp(-2.0 * std::numbers::ln2 * x * x);
        field[j] = amp;
        input[j] = amp * amp;
    }
    FftPlan forward(field, FFTW_FORWARD);
    FftPlan backward(field, FFTW_BACKWARD);
    forward.run();
    for (std::size_t k = 0; k < n; ++k) {
        field[k] *= std::exp(logh[k]);
    }
    backward.run();

    EchoTrace trace;
    trace.time_ns.resize(n);
    trace.output.resize(n);
    trace.input = std::move(input);
    double e_in = 0.0;
    double e_out = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        trace.time_ns[j] = static_cast<double>(j) * dt - t_in;
        trace.output[j] = std::norm(field[j] * inv_n);
        e_in += trace.input[j];
        e_out += trace.output[j];
    }
    trace.output_energy = e_out / e_in;

    // Energy in the last 5% of the window would wrap onto the pre-pulse region.
    double tail = 0.0;
    for (std::size_t j = n - n / 20; j < n; ++j) {
        tail += trace.output[j];
    }
    if (tail > options.alias_tolerance * e_in) {
        throw AliasingError("echo energy wraps past the FFT time window; refine the grid step");
    }

    double precursor = 0.0;
    for (std::size_t j = 0; j < n && trace.time_ns[j] < -3.0 * pulse.fwhm_ns; ++j) {
        precursor = std::max(precursor, trace.output[j]);
    }
    trace.precursor_ratio = precursor;

    const int orders = options.comb_spacing_mhz > 0.0 ? options.max_echo_order : 0;
    const double period = options.comb_spacing_mhz > 0.0 ? 1e3 / options.comb_spacing_mhz : window_ns;
    for (int m = 0; m <= orders; ++m) {
        const double a = m == 0 ? -t_in : (m - 0.5) * period;
        const double b = orders == 0 ? window_ns : (m + 0.5) * period;
        double energy = 0.0;
        std::size_t best = 0;
        double best_val = -1.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double t = trace.time_ns[j];
            if (t >= a && t < b) {
                energy += trace.output[j];
                if (trace.output[j] > best_val) {
                    best_val = trace.output[j];
                    best = j;
                }
            }
        }
        double peak = trace.time_ns[best];
        if (best > 0 && best + 1 < n) {
            const double y0 = trace.output[best - 1];
            const double y1 = trace.output[best];
            const double y2 = trace.output[best + 1];
            const double denom = y0 - 2.0 * y1 + y2;
            if (denom < 0.0) {
                peak += 0.5 * dt * (y0 - y2) / denom;
            }
        }
        const double reference = m == 0 ? peak : trace.echoes.front().peak_time_ns;
        trace.echoes.push_back({m, energy / e_in, peak, peak - reference});
    }
    return trace;
}

} // namespace afcsim
