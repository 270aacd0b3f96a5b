#pragma once

// Estimation chain: PCA temporal mode, quadrature projection, diagonal
// maximum-likelihood tomography and bootstrap errors.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "hpl/fock.hpp"
#include "hpl/herald.hpp"
#include "hpl/spectral.hpp"

namespace hpl::analysis {

struct PcaResult {
    /// Descending modal variances (shot-noise units), strictly positive.
    std::vector<double> eigenvalues;
    spectral::TemporalMode principal_mode;
    std::size_t component_count = 0;
    /// Fewer than 10 x frame_len frames went into the covariance.
    bool undersampled = false;
};

/// Eigen-decomposition of the covariance of mean-subtracted traces.
/// Throws InsufficientDataError for fewer than 2 frames.
PcaResult pca_modes(const herald::FrameEnsemble& frames);

/// x_k = sum_j h_j trace_kj. Throws GridMismatchError.
std::vector<double> project_quadratures(const herald::FrameEnsemble& frames, const spectral::TemporalMode& mode);

/// Factor that maps u . trace to shot-noise units (vacuum variance 1/2),
/// given the detector's filters and electronic noise.
double shot_noise_scale(const spectral::TemporalMode& mode, const herald::DetectorModel& detector);

struct TomographyOptions {
    int n_max = fock::kDefaultNMax;
    int max_iter = 5000;
    double tol = 1e-9;
};

struct BootstrapSe {
    std::vector<double> photon_dist;
    double wigner_origin = 0.0;
};

struct TomographyResult {
    fock::PhotonDistribution photon_dist = fock::PhotonDistribution::vacuum();
    /// sum_n p_n (-1)^n / pi of photon_dist.
    double wigner_origin = 0.0;
    double log_likelihood = 0.0;
    int iterations = 0;
    bool converged = false;
    /// Log-likelihood never decreased between iterations.
    bool monotone = true;
    /// Log-likelihood of the starting point and after every update.
    std::vector<double> log_likelihood_trace;
    std::optional<BootstrapSe> bootstrap_se;
};

/// Expectation-maximization over the probability simplex from a uniform start:
///   p_n <- p_n (1/K) sum_k psi_n(x_k)^2 / sum_m p_m psi_m(x_k)^2
/// until max_n |dp_n| < tol or max_iter. Non-convergence is flagged, not fatal.
/// Throws InsufficientDataError below 100 samples, DataError on non-finite
/// samples and DomainError for n_max < 1.
TomographyResult mle_tomography(std::span<const double> x_samples, const TomographyOptions& options = {});

/// Same estimator with an integer multiplicity per sample (bootstrap counts).
TomographyResult mle_tomography_weighted(std::span<const double> x_samples, std::span<const std::uint32_t> counts,
                                         const TomographyOptions& options = {});

struct BootstrapOptions {
    int replicates = 100;
    TomographyOptions tomography{};
    std::uint64_t seed = 0;
    /// When false every replicate reuses the original sample (test hook).
    bool resample = true;
};

struct BootstrapResult {
    BootstrapSe se;
    std::vector<double> replicate_wigner_origin;
    int non_converged = 0;
};

/// Resamples x with replacement, refits, and reports sample standard
/// deviations. Replicate b draws from make_stream(seed, bootstrap, b).
/// Throws DomainError for fewer than 50 replicates.
BootstrapResult bootstrap(std::span<const double> x_samples, const BootstrapOptions& options);

struct KsResult {
    double statistic = 0.0;
    double p_value = 0.0;
};

/// One-sample Kolmogorov-Smirnov test against a continuous CDF.
KsResult ks_test(std::span<const double> samples, const std::function<double(double)>& cdf);

/// Asymptotic Kolmogorov survival function Q(lambda) = 2 sum (-1)^(j-1) exp(-2 j^2 lambda^2).
double kolmogorov_survival(double lambda);

struct Histogram {
    std::vector<double> bin_centers;
    std::vector<std::size_t> counts;
    double bin_width = 0.0;
};

/// Equal-width bins over [-range, range]; samples outside are dropped.
Histogram histogram(std::span<const double> samples, std::size_t bins, double range);

struct PipelineSettings {
    TomographyOptions tomography{};
    int bootstrap_replicates = 100;
    std::uint64_t bootstrap_seed = 0;
};

// Everything the report needs from one pass over a frame ensemble.
struct PipelineResult {
    PcaResult pca;
    std::vector<double> quadratures;  // shot-noise units
    double shot_noise_scale = 1.0;
    TomographyResult tomography;
    BootstrapResult bootstrap;
    double mode_match = 0.0;          // squared overlap with the theory mode
    double mode_overlap_amplitude = 0.0;
};

/// PCA -> projection on the principal mode -> shot-noise normalization ->
/// tomography -> bootstrap, with the theory mode used only for mode_match.
PipelineResult run_pipeline(const herald::FrameEnsemble& frames, const spectral::TemporalMode& theory,
                            const herald::DetectorModel& detector, const PipelineSettings& settings);

}  // namespace hpl::analysis
