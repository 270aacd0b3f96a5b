#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hpl/analysis.hpp"
#include "hpl/errors.hpp"
#include "hpl/parallel.hpp"

namespace hpl::analysis {

namespace {

constexpr std::size_t kMinSamples = 100;
constexpr std::size_t kChunk = 512;
constexpr double kFlushBelow = 1e-200;

// psi_n(x_k)^2 for the used samples in blocks of kChunk rows; within a block
// each order's kChunk values are contiguous, so one block stays in cache
// across both passes of an E-step.
struct DesignMatrix {
    std::vector<double> values;
    std::vector<double> weights;  // multiplicity of each used sample
    std::size_t rows = 0;
    int orders = 0;
    double total_weight = 0.0;
    bool unit_weights = true;

    const double* block(std::size_t start, int n) const noexcept {
        return values.data() + start * static_cast<std::size_t>(orders) + static_cast<std::size_t>(n) * kChunk;
    }
};

DesignMatrix build_design(std::span<const double> x, std::span<const std::uint32_t> counts, int n_max) {
    DesignMatrix d;
    d.orders = n_max + 1;
    for (std::size_t k = 0; k < x.size(); ++k)
        if (counts.empty() || counts[k] > 0) ++d.rows;
    const std::size_t padded = (d.rows + kChunk - 1) / kChunk * kChunk;
    d.values.resize(padded * static_cast<std::size_t>(d.orders));
    d.weights.resize(d.rows);
    std::vector<double> psi(static_cast<std::size_t>(d.orders));
    std::size_t row = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double w = counts.empty() ? 1.0 : static_cast<double>(counts[k]);
        if (w == 0.0) continue;
        fock::fock_wavefunctions(n_max, x[k], psi);
        const std::size_t base = (row / kChunk) * kChunk * static_cast<std::size_t>(d.orders) + row % kChunk;
        for (int n = 0; n < d.orders; ++n) d.values[base + static_cast<std::size_t>(n) * kChunk] = psi[n] * psi[n];
        d.weights[row] = w;
        if (w != 1.0) d.unit_weights = false;
        d.total_weight += w;
        ++row;
    }
    return d;
}

// w-th power for the small integer multiplicities a bootstrap draws.
double int_power(double f, double w) noexcept {
    if (w == 1.0) return f;
    if (w == 2.0) return f * f;
    return std::pow(f, w);
}

// Eight independent partial sums so the reduction vectorizes without
// reassociation flags.
double dot(const double* a, const double* b, std::size_t len) noexcept {
    double acc[8] = {};
    std::size_t k = 0;
    for (; k + 8 <= len; k += 8)
        for (std::size_t l = 0; l < 8; ++l) acc[l] += a[k + l] * b[k + l];
    double tail = 0.0;
    for (; k < len; ++k) tail += a[k] * b[k];
    return ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail;
}

// One E-step: returns the log-likelihood of p and fills ratio_n =
// (1/K) sum_k w_k A_nk / f_k, the multiplicative EM update.
double expectation(const DesignMatrix& d, std::span<const double> p, std::span<double> ratio) {
    constexpr std::size_t kGroup = 8;
    constexpr std::size_t kStride = kChunk / kGroup;
    std::fill(ratio.begin(), ratio.end(), 0.0);
    double loglik = 0.0;
    alignas(64) double f[kChunk];
    alignas(64) double inv[kChunk];
    alignas(64) double prod[kStride];
    for (std::size_t start = 0; start < d.rows; start += kChunk) {
        const std::size_t len = std::min(kChunk, d.rows - start);
        std::fill_n(f, len, 0.0);
        for (int n = 0; n < d.orders; ++n) {
            const double pn = p[n];
            const double* a = d.block(start, n);
            for (std::size_t k = 0; k < len; ++k) f[k] += pn * a[k];
        }
        const double* w = d.weights.data() + start;

        // Logs are taken on products of 8 likelihood factors (samples j,
        // j + 64, ...); the densities are far from the double range limits,
        // the fallback covers the exceptions.
        if (len == kChunk) {
            std::fill_n(prod, kStride, 1.0);
            for (std::size_t g = 0; g < kGroup; ++g) {
                const double* fg = f + g * kStride;
                const double* wg = w + g * kStride;
                if (d.unit_weights) {
                    for (std::size_t j = 0; j < kStride; ++j) prod[j] *= fg[j];
                } else {
                    for (std::size_t j = 0; j < kStride; ++j) prod[j] *= int_power(fg[j], wg[j]);
                }
            }
            for (std::size_t j = 0; j < kStride; ++j) {
                if (prod[j] > 1e-290 && prod[j] < 1e290) {
                    loglik += std::log(prod[j]);
                } else {
                    for (std::size_t g = 0; g < kGroup; ++g)
                        loglik += w[g * kStride + j] * std::log(f[g * kStride + j]);
                }
            }
        } else {
            for (std::size_t k = 0; k < len; ++k) loglik += w[k] * std::log(f[k]);
        }

        for (std::size_t k = 0; k < len; ++k) inv[k] = w[k] / f[k];
        for (int n = 0; n < d.orders; ++n) {
            const double* a = d.block(start, n);
            ratio[n] += dot(a, inv, len);
        }
    }
    for (double& r : ratio) r /= d.total_weight;
    return loglik;
}

void check_inputs(std::span<const double> x, std::span<const std::uint32_t> counts, const TomographyOptions& opt) {
    if (opt.n_max < 1) throw DomainError("tomography needs n_max >= 1");
    if (opt.n_max > fock::kMaxOrder) throw UnsupportedOrderError("tomography n_max above the recurrence cap");
    if (opt.max_iter < 1) throw DomainError("tomography needs max_iter >= 1");
    if (!counts.empty() && counts.size() != x.size()) throw DomainError("counts and samples differ in length");
    const std::size_t effective =
        counts.empty() ? x.size() : static_cast<std::size_t>(std::accumulate(counts.begin(), counts.end(), 0ULL));
    if (effective < kMinSamples)
        throw InsufficientDataError("tomography needs at least " + std::to_string(kMinSamples) + " samples, got " +
                                    std::to_string(effective));
    for (std::size_t k = 0; k < x.size(); ++k)
        if (!std::isfinite(x[k])) throw DataError("quadrature sample " + std::to_string(k) + " is not finite");
}

TomographyResult run_em(const DesignMatrix& d, const TomographyOptions& opt) {
    const auto orders = static_cast<std::size_t>(d.orders);
    std::vector<double> p(orders, 1.0 / static_cast<double>(orders));
    std::vector<double> ratio(orders);
    TomographyResult result;
    result.log_likelihood_trace.reserve(static_cast<std::size_t>(opt.max_iter) + 1);

    for (int it = 0; it < opt.max_iter; ++it) {
        const double ll = expectation(d, p, ratio);
        if (!result.log_likelihood_trace.empty()) {
            const double prev = result.log_likelihood_trace.back();
            if (ll < prev - 1e-10 * std::max(1.0, std::abs(prev))) result.monotone = false;
        }
        result.log_likelihood_trace.push_back(ll);

        double sum = 0.0;
        for (std::size_t n = 0; n < orders; ++n) sum += p[n] * ratio[n];
        double max_step = 0.0;
        for (std::size_t n = 0; n < orders; ++n) {
            double next = p[n] * ratio[n] / sum;
            // Components this small are zero for every purpose, and left alone
            // they decay into subnormals that slow the E-step severalfold.
            if (next < kFlushBelow) next = 0.0;
            max_step = std::max(max_step, std::abs(next - p[n]));
            p[n] = next;
        }
        result.iterations = it + 1;
        if (max_step < opt.tol) {
            result.converged = true;
            break;
        }
    }
    const double final_ll = expectation(d, p, ratio);
    if (final_ll < result.log_likelihood_trace.back() - 1e-10 * std::max(1.0, std::abs(final_ll)))
        result.monotone = false;
    result.log_likelihood_trace.push_back(final_ll);
    result.log_likelihood = final_ll;

    for (double& v : p) v = std::clamp(v, 0.0, 1.0);
    result.photon_dist = fock::PhotonDistribution(std::move(p));
    result.wigner_origin = fock::wigner_origin(result.photon_dist);
    return result;
}

double sample_sd(std::span<const double> v) {
    // Deviations are taken from v[0] first so identical replicates give exactly 0.
    const double n = static_cast<double>(v.size());
    double shift_sum = 0.0;
    for (double x : v) shift_sum += x - v[0];
    const double mean_shift = shift_sum / n;
    double ss = 0.0;
    for (double x : v) ss += (x - v[0] - mean_shift) * (x - v[0] - mean_shift);
    return std::sqrt(ss / (n - 1.0));
}

}  // namespace

TomographyResult mle_tomography(std::span<const double> x_samples, const TomographyOptions& options) {
    check_inputs(x_samples, {}, options);
    return run_em(build_design(x_samples, {}, options.n_max), options);
}

TomographyResult mle_tomography_weighted(std::span<const double> x_samples, std::span<const std::uint32_t> counts,
                                         const TomographyOptions& options) {
    check_inputs(x_samples, counts, options);
    return run_em(build_design(x_samples, counts, options.n_max), options);
}

BootstrapResult bootstrap(std::span<const double> x_samples, const BootstrapOptions& options) {
    if (options.replicates < 50) throw DomainError("bootstrap needs at least 50 replicates");
    check_inputs(x_samples, {}, options.tomography);
    const std::size_t replicates = static_cast<std::size_t>(options.replicates);
    const std::size_t k = x_samples.size();
    const auto orders = static_cast<std::size_t>(options.tomography.n_max) + 1;

    std::vector<std::vector<double>> probs(replicates);
    std::vector<double> wigner(replicates);
    std::vector<char> converged(replicates);
    parallel_for(replicates, [&](std::size_t b) {
        std::vector<std::uint32_t> counts(k, 1);
        if (options.resample) {
            std::fill(counts.begin(), counts.end(), 0);
            Rng rng = make_stream(options.seed, stream_domain::bootstrap, b);
            std::uniform_int_distribution<std::size_t> pick(0, k - 1);
            for (std::size_t i = 0; i < k; ++i) ++counts[pick(rng)];
        }
        const auto fit = run_em(build_design(x_samples, counts, options.tomography.n_max), options.tomography);
        probs[b].assign(fit.photon_dist.probs().begin(), fit.photon_dist.probs().end());
        wigner[b] = fit.wigner_origin;
        converged[b] = fit.converged;
    });

    BootstrapResult result;
    result.replicate_wigner_origin = wigner;
    result.se.wigner_origin = sample_sd(wigner);
    result.se.photon_dist.resize(orders);
    std::vector<double> column(replicates);
    for (std::size_t n = 0; n < orders; ++n) {
        for (std::size_t b = 0; b < replicates; ++b) column[b] = probs[b][n];
        result.se.photon_dist[n] = sample_sd(column);
    }
    result.non_converged = static_cast<int>(std::count(converged.begin(), converged.end(), 0));
    return result;
}

}  // namespace hpl::analysis
