#include "hpl/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <string>

#include "hpl/errors.hpp"

namespace hpl::spectral {

namespace {

using cplx = std::complex<double>;

// FFTW planning is not thread-safe; execution on distinct buffers is.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwBuffer {
    explicit FftwBuffer(std::size_t n)
        : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))), size(n) {
        if (!data) throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(data); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;

    cplx& operator[](std::size_t i) noexcept { return reinterpret_cast<cplx*>(data)[i]; }

    fftw_complex* data;
    std::size_t size;
};

// In-place complex DFT; sign = FFTW_FORWARD (-1) or FFTW_BACKWARD (+1), unnormalized.
void dft_in_place(FftwBuffer& buf, int sign) {
    fftw_plan plan;
    {
        std::scoped_lock lock(fftw_planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(buf.size), buf.data, buf.data, sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::scoped_lock lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
}

cplx frequency_response(const FilterSpec& f, double freq) {
    const cplx jf(0.0, freq / f.hwhm_or_cutoff);
    switch (f.kind) {
        case FilterKind::lorentzian_cavity:
        case FilterKind::fbg:
        case FilterKind::electrical_lpf:
            return 1.0 / (1.0 + jf);
        case FilterKind::electrical_hpf:
            return jf / (1.0 + jf);
    }
    return 1.0;
}

bool is_high_pass(FilterKind k) { return k == FilterKind::electrical_hpf; }

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace

void FilterSpec::validate() const {
    if (!(hwhm_or_cutoff > 0.0) || !std::isfinite(hwhm_or_cutoff))
        throw DomainError("filter bandwidth must be positive, got " + std::to_string(hwhm_or_cutoff));
    if (center_offset != 0.0)
        throw DomainError("only baseband filters (center_offset = 0) are supported");
}

bool TimeGrid::same_as(const TimeGrid& other) const noexcept {
    return size == other.size && std::abs(dt - other.dt) <= 1e-12 * std::max(std::abs(dt), std::abs(other.dt));
}

TemporalMode TemporalMode::from_samples(std::vector<double> samples, double dt, std::size_t t0_index) {
    const double norm = std::sqrt(std::inner_product(samples.begin(), samples.end(), samples.begin(), 0.0));
    if (!(norm > 0.0) || !std::isfinite(norm)) throw NumericalError("cannot normalize a zero or non-finite mode");
    const auto peak = std::max_element(samples.begin(), samples.end(),
                                       [](double a, double b) { return std::abs(a) < std::abs(b); });
    const double scale = (*peak < 0.0 ? -1.0 : 1.0) / norm;
    for (double& v : samples) v *= scale;
    return TemporalMode{std::move(samples), dt, t0_index};
}

double CorrelationFunction::at_lag(std::ptrdiff_t lag) const noexcept {
    const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(center) + lag;
    if (idx < 0 || idx >= static_cast<std::ptrdiff_t>(samples.size())) return 0.0;
    return samples[static_cast<std::size_t>(idx)];
}

CorrelationFunction opo_correlation(double hwhm, const TimeGrid& grid) {
    if (!(hwhm > 0.0)) throw DomainError("OPO HWHM must be positive");
    if (!(grid.dt > 0.0) || grid.size < 3) throw InvalidGridError("time grid needs dt > 0 and at least 3 samples");
    const double gamma = 2.0 * std::numbers::pi * hwhm;
    const std::size_t center = grid.size / 2;
    // The shorter side of the window is the right one for even sizes.
    const double half_span = static_cast<double>(grid.size - 1 - center) * grid.dt;
    const double outside = std::exp(-2.0 * gamma * half_span);
    if (outside > 1e-4)
        throw TruncationError("correlation window too short: " + std::to_string(outside) +
                              " of the r12 energy lies outside the grid");
    CorrelationFunction r{std::vector<double>(grid.size), grid.dt, gamma, center};
    for (std::size_t k = 0; k < grid.size; ++k) {
        const double lag = std::abs(static_cast<double>(k) - static_cast<double>(center)) * grid.dt;
        r.samples[k] = std::exp(-gamma * lag);
    }
    return r;
}

namespace {

// The cascade is evaluated on a grid kOversample times finer than the
// output and each output sample integrates one output interval, so filters
// faster than the sampling rate still carry their full DC gain.
constexpr std::size_t kOversample = 32;

std::vector<double> sampled_response(std::span<const FilterSpec> chain, std::size_t n, double dt) {
    const std::size_t fine = n * kOversample;
    FftwBuffer buf(fine);
    const double df = 1.0 / (static_cast<double>(n) * dt);
    for (std::size_t k = 0; k < fine; ++k) {
        // Nyquist bin (k = fine/2) is evaluated at +f_N; only the real part survives.
        const double idx =
            (k <= fine / 2) ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(fine);
        cplx h = 1.0;
        for (const auto& f : chain) h *= frequency_response(f, idx * df);
        buf[k] = h;
    }
    dft_in_place(buf, FFTW_BACKWARD);
    std::vector<double> g(n, 0.0);
    for (std::size_t k = 0; k < fine; ++k) g[k / kOversample] += buf[k].real();
    for (double& v : g) v /= static_cast<double>(fine);
    return g;
}

}  // namespace

ImpulseResponse filter_impulse_response(std::span<const FilterSpec> chain, const TimeGrid& grid) {
    if (chain.empty()) throw DomainError("filter chain is empty");
    if (!(grid.dt > 0.0) || grid.size < 2) throw InvalidGridError("time grid needs dt > 0 and at least 2 samples");
    for (const auto& f : chain) f.validate();

    const std::size_t n = grid.size;
    ImpulseResponse g{sampled_response(chain, n, grid.dt), grid.dt};
    double peak = 0.0;
    for (double v : g.samples) peak = std::max(peak, std::abs(v));

    // Circular wrap-around: the same chain on a grid twice as long (same dt,
    // so identical band limiting) differs from this one by the response
    // folded in from one window length away.
    const auto wide = sampled_response(chain, 2 * n, grid.dt);
    double wrap = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t k2 = (k < n / 2) ? k : k + n;
        wrap = std::max(wrap, std::abs(g.samples[k] - wide[k2]));
    }
    if (wrap > 1e-3 * peak)
        throw AliasingError("filter response has not decayed within the window (wrap-around/peak = " +
                            std::to_string(wrap / peak) + "); lengthen the grid");
    return g;
}

void filter_signal(std::span<double> signal, std::span<const FilterSpec> chain, double dt) {
    for (const auto& f : chain) {
        f.validate();
        const double a = std::exp(-2.0 * std::numbers::pi * f.hwhm_or_cutoff * dt);
        double state = 0.0;
        if (is_high_pass(f.kind)) {
            for (double& v : signal) {
                state = a * state + (1.0 - a) * v;
                v -= state;
            }
        } else {
            for (double& v : signal) {
                state = a * state + (1.0 - a) * v;
                v = state;
            }
        }
    }
}

TemporalMode heralded_mode(const CorrelationFunction& r12, const ImpulseResponse& g, std::size_t t0_index,
                           std::span<const FilterSpec> post_filters) {
    const std::size_t n = r12.samples.size();
    if (g.samples.size() != n || !TimeGrid{r12.dt, n}.same_as(TimeGrid{g.dt, g.samples.size()}))
        throw GridMismatchError("correlation function and impulse response are on different grids");
    if (t0_index >= n) throw TruncationError("herald time lies outside the grid");
    const double margin = 5.0 / (r12.decay_rate * r12.dt);
    if (static_cast<double>(t0_index) < margin || static_cast<double>(n - 1 - t0_index) < margin)
        throw TruncationError("herald time needs at least 5 decay constants of margin on both sides");

    // h[k] = sum_j r12(lag = k - t0 + j) g[j]; lag index into r12 is
    // i + j with i = k - t0 + center. That is the cross-correlation
    // q[i] = sum_j r[i + j] g[j], evaluated by FFT on a 2n zero-padded grid.
    const std::size_t m = next_pow2(2 * n);
    FftwBuffer rf(m);
    FftwBuffer gf(m);
    for (std::size_t k = 0; k < m; ++k) {
        rf[k] = k < n ? r12.samples[k] : 0.0;
        gf[k] = k < n ? g.samples[k] : 0.0;
    }
    dft_in_place(rf, FFTW_FORWARD);
    dft_in_place(gf, FFTW_FORWARD);
    for (std::size_t k = 0; k < m; ++k) rf[k] *= std::conj(gf[k]);
    dft_in_place(rf, FFTW_BACKWARD);

    std::vector<double> h(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::ptrdiff_t i = static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(t0_index) +
                                 static_cast<std::ptrdiff_t>(r12.center);
        const std::size_t wrapped = static_cast<std::size_t>((i % static_cast<std::ptrdiff_t>(m) + m) % m);
        h[k] = rf[wrapped].real() / static_cast<double>(m);
    }
    if (!post_filters.empty()) {
        auto mode = TemporalMode::from_samples(std::move(h), r12.dt, t0_index);
        filter_signal(mode.samples, post_filters, r12.dt);
        return TemporalMode::from_samples(std::move(mode.samples), r12.dt, t0_index);
    }
    return TemporalMode::from_samples(std::move(h), r12.dt, t0_index);
}

double mode_overlap(const TemporalMode& a, const TemporalMode& b) {
    if (!a.grid().same_as(b.grid())) throw GridMismatchError("modes are on different time grids");
    return std::inner_product(a.samples.begin(), a.samples.end(), b.samples.begin(), 0.0);
}

double mode_match(const TemporalMode& a, const TemporalMode& b) {
    const double o = mode_overlap(a, b);
    return std::min(1.0, o * o);
}

void write_mode_csv(const std::filesystem::path& path, const TemporalMode& mode) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.precision(17);
    out << "t_seconds,amplitude\n";
    for (std::size_t k = 0; k < mode.samples.size(); ++k)
        out << static_cast<double>(k) * mode.dt << ',' << mode.samples[k] << '\n';
    if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace hpl::spectral
