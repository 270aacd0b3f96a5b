#include "hpl/analysis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hpl/errors.hpp"

namespace hpl::analysis {

PcaResult pca_modes(const herald::FrameEnsemble& frames) {
    const std::size_t k = frames.n_frames();
    const std::size_t d = frames.frame_len;
    if (k < 2) throw InsufficientDataError("PCA needs at least 2 frames, got " + std::to_string(k));

    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const Eigen::Map<const RowMajor> traces(frames.data.data(), static_cast<Eigen::Index>(k),
                                            static_cast<Eigen::Index>(d));
    const Eigen::RowVectorXd mean = traces.colwise().mean();

    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    constexpr Eigen::Index kBlock = 512;
    for (Eigen::Index start = 0; start < static_cast<Eigen::Index>(k); start += kBlock) {
        const Eigen::Index rows = std::min(kBlock, static_cast<Eigen::Index>(k) - start);
        const Eigen::MatrixXd centred = traces.middleRows(start, rows).rowwise() - mean;
        cov.selfadjointView<Eigen::Lower>().rankUpdate(centred.transpose());
    }
    cov = cov.selfadjointView<Eigen::Lower>();
    cov /= static_cast<double>(k - 1);

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) throw NumericalError("covariance eigendecomposition failed");

    const auto& values = solver.eigenvalues();  // ascending
    PcaResult result;
    const double top = values(values.size() - 1);
    for (Eigen::Index i = values.size() - 1; i >= 0; --i) {
        if (!(values(i) > 1e-12 * top)) break;
        result.eigenvalues.push_back(values(i));
    }
    if (result.eigenvalues.empty()) throw InsufficientDataError("frames carry no variance");
    result.component_count = result.eigenvalues.size();
    result.undersampled = k < 10 * d;

    const Eigen::VectorXd top_vector = solver.eigenvectors().col(values.size() - 1);
    std::vector<double> samples(top_vector.data(), top_vector.data() + top_vector.size());
    auto mode = spectral::TemporalMode::from_samples(std::move(samples), frames.dt, 0);
    mode.t0_index = static_cast<std::size_t>(
        std::max_element(mode.samples.begin(), mode.samples.end()) - mode.samples.begin());
    result.principal_mode = std::move(mode);
    return result;
}

std::vector<double> project_quadratures(const herald::FrameEnsemble& frames, const spectral::TemporalMode& mode) {
    if (!frames.grid().same_as(mode.grid()))
        throw GridMismatchError("projection mode is not on the frame grid");
    std::vector<double> x(frames.n_frames());
    for (std::size_t k = 0; k < x.size(); ++k) {
        const auto trace = frames.trace(k);
        x[k] = std::inner_product(trace.begin(), trace.end(), mode.samples.begin(), 0.0);
    }
    return x;
}

double shot_noise_scale(const spectral::TemporalMode& mode, const herald::DetectorModel& detector) {
    const double variance = detector.vacuum_projection_variance(mode.samples);
    if (!(variance > 0.0)) throw NumericalError("detector passes no vacuum noise into the mode");
    return std::sqrt(0.5 / variance);
}

double kolmogorov_survival(double lambda) {
    if (lambda < 1e-3) return 1.0;
    double sum = 0.0;
    for (int j = 1; j <= 200; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += (j % 2 == 1 ? term : -term);
        if (term < 1e-17) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test(std::span<const double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw InsufficientDataError("KS test needs samples");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    const double root = std::sqrt(n);
    return {d, kolmogorov_survival((root + 0.12 + 0.11 / root) * d)};
}

Histogram histogram(std::span<const double> samples, std::size_t bins, double range) {
    if (bins == 0 || !(range > 0.0)) throw DomainError("histogram needs bins > 0 and range > 0");
    Histogram h;
    h.bin_width = 2.0 * range / static_cast<double>(bins);
    h.counts.assign(bins, 0);
    h.bin_centers.resize(bins);
    for (std::size_t b = 0; b < bins; ++b) h.bin_centers[b] = -range + (static_cast<double>(b) + 0.5) * h.bin_width;
    for (double x : samples) {
        if (!(x >= -range && x < range)) continue;
        const auto b = static_cast<std::size_t>((x + range) / h.bin_width);
        ++h.counts[std::min(b, bins - 1)];
    }
    return h;
}

PipelineResult run_pipeline(const herald::FrameEnsemble& frames, const spectral::TemporalMode& theory,
                            const herald::DetectorModel& detector, const PipelineSettings& settings) {
    PipelineResult out;
    out.pca = pca_modes(frames);
    out.quadratures = project_quadratures(frames, out.pca.principal_mode);
    out.shot_noise_scale = shot_noise_scale(out.pca.principal_mode, detector);
    for (double& x : out.quadratures) x *= out.shot_noise_scale;

    out.tomography = mle_tomography(out.quadratures, settings.tomography);
    out.bootstrap = bootstrap(out.quadratures, BootstrapOptions{settings.bootstrap_replicates, settings.tomography,
                                                                settings.bootstrap_seed, true});
    out.tomography.bootstrap_se = out.bootstrap.se;
    out.mode_overlap_amplitude = spectral::mode_overlap(out.pca.principal_mode, theory);
    out.mode_match = spectral::mode_match(out.pca.principal_mode, theory);
    return out;
}

}  // namespace hpl::analysis
