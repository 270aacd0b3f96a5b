#pragma once

// Heralded temporal mode: OPO pair correlation, idler filter chain and the
// homodyne electrical filters. Frequencies in Hz, times in seconds.

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace hpl::spectral {

enum class FilterKind { lorentzian_cavity, fbg, electrical_hpf, electrical_lpf };

struct FilterSpec {
    FilterKind kind = FilterKind::lorentzian_cavity;
    double hwhm_or_cutoff = 0.0;  // Hz, > 0
    double center_offset = 0.0;   // Hz; only baseband (0) is supported

    void validate() const;
};

/// Uniform sampling grid shared by modes, correlation functions and frames.
struct TimeGrid {
    double dt = 1e-9;
    std::size_t size = 1024;

    double duration() const noexcept { return dt * static_cast<double>(size); }
    bool same_as(const TimeGrid& other) const noexcept;
};

// Unit-norm (discrete l2) real mode function; the sample of largest magnitude
// is positive.
struct TemporalMode {
    std::vector<double> samples;
    double dt = 0.0;
    std::size_t t0_index = 0;

    TimeGrid grid() const noexcept { return {dt, samples.size()}; }

    /// Normalizes and fixes the sign convention. Throws NumericalError for an
    /// all-zero input.
    static TemporalMode from_samples(std::vector<double> samples, double dt, std::size_t t0_index);
};

// r12 sampled at lags (k - center) * dt, k = 0..size-1, center = size/2.
struct CorrelationFunction {
    std::vector<double> samples;
    double dt = 0.0;
    double decay_rate = 0.0;  // rad/s
    std::size_t center = 0;

    double at_lag(std::ptrdiff_t lag) const noexcept;
};

/// Discrete causal impulse response: samples[k] is the integral of g(t) over
/// [k dt, (k+1) dt), so the samples sum to the DC gain.
struct ImpulseResponse {
    std::vector<double> samples;
    double dt = 0.0;
};

/// r12(t) = exp(-2 pi hwhm |t|). Throws TruncationError when more than 1e-4
/// of the |r12|^2 energy falls outside the window.
CorrelationFunction opo_correlation(double hwhm, const TimeGrid& grid);

/// Real impulse response of the cascade: the single-pole baseband frequency
/// responses are multiplied on the FFT grid and transformed back. Throws
/// DomainError for an empty chain and AliasingError when the response has not
/// decayed below 1e-3 of its peak before wrapping around the window.
ImpulseResponse filter_impulse_response(std::span<const FilterSpec> chain, const TimeGrid& grid);

/// Causal single-pole recursions for each filter in `chain`, applied in order,
/// in place, from a zero initial state. Low-pass kinds (cavity, FBG, LPF) use
/// y[n] = a y[n-1] + (1-a) x[n], a = exp(-2 pi f_c dt); the HPF is x - lowpass(x).
void filter_signal(std::span<double> signal, std::span<const FilterSpec> chain, double dt);

/// h = N[(r12 * g^r)(t - t0)], then post_filters, then renormalized.
/// Throws GridMismatchError if r12 and g disagree on dt, and TruncationError
/// when t0 is closer than 5 decay constants to either edge.
TemporalMode heralded_mode(const CorrelationFunction& r12, const ImpulseResponse& g, std::size_t t0_index,
                           std::span<const FilterSpec> post_filters = {});

/// Squared inner product (sum a_k b_k)^2 of two unit-norm modes on one grid.
double mode_match(const TemporalMode& a, const TemporalMode& b);

/// Signed amplitude overlap sum a_k b_k.
double mode_overlap(const TemporalMode& a, const TemporalMode& b);

/// Two-column CSV: t_seconds, amplitude.
void write_mode_csv(const std::filesystem::path& path, const TemporalMode& mode);

}  // namespace hpl::spectral
