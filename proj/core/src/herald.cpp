#include "hpl/herald.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>

#include "hpl/errors.hpp"
#include "hpl/parallel.hpp"

namespace hpl::herald {

using fock::PhotonDistribution;
using spectral::FilterKind;
using spectral::FilterSpec;
using spectral::TemporalMode;

void ExperimentConfig::validate() const {
    std::vector<std::string> bad;
    std::ostringstream why;
    auto require = [&](bool ok, const char* key, const char* rule) {
        if (!ok) {
            bad.emplace_back(key);
            why << "\n  " << key << ": " << rule;
        }
    };
    auto fraction = [](double v) { return v >= 0.0 && v <= 1.0; };
    require(opo_hwhm > 0.0 && std::isfinite(opo_hwhm), "opo_hwhm", "must be > 0 Hz");
    require(fc_hwhm > 0.0 && std::isfinite(fc_hwhm), "fc_hwhm", "must be > 0 Hz");
    require(fbg_hwhm > 0.0 && std::isfinite(fbg_hwhm), "fbg_hwhm", "must be > 0 Hz");
    require(hpf_cutoff >= 0.0 && std::isfinite(hpf_cutoff), "hpf_cutoff", "must be >= 0 Hz (0 disables)");
    require(lpf_cutoff >= 0.0 && std::isfinite(lpf_cutoff), "lpf_cutoff", "must be >= 0 Hz (0 disables)");
    require(dt > 0.0 && std::isfinite(dt), "dt", "must be > 0 s");
    require(frame_len >= 2, "frame_len", "must be >= 2 samples");
    require(total_cps > 0.0 && std::isfinite(total_cps), "total_cps", "must be > 0");
    require(dark_cps >= 0.0, "dark_cps", "must be >= 0");
    require(stray_cps >= 0.0, "stray_cps", "must be >= 0");
    if (dark_cps >= 0.0 && stray_cps >= 0.0 && total_cps > 0.0 && dark_cps + stray_cps > total_cps) {
        bad.emplace_back("dark_cps");
        bad.emplace_back("stray_cps");
        why << "\n  dark_cps + stray_cps: must not exceed total_cps";
    }
    require(fraction(optical_loss), "optical_loss", "must be in [0, 1]");
    require(fraction(two_photon_weight), "two_photon_weight", "must be in [0, 1]");
    require(fraction(three_photon_weight), "three_photon_weight", "must be in [0, 1]");
    if (fraction(two_photon_weight) && fraction(three_photon_weight) && two_photon_weight + three_photon_weight >= 1.0) {
        bad.emplace_back("two_photon_weight");
        bad.emplace_back("three_photon_weight");
        why << "\n  two_photon_weight + three_photon_weight: must be < 1";
    }
    require(electronic_noise_rel >= 0.0 && std::isfinite(electronic_noise_rel), "electronic_noise_rel",
            "must be >= 0");
    if (!bad.empty()) throw ConfigError(std::move(bad), "invalid experiment configuration:" + why.str());
}

std::vector<FilterSpec> ExperimentConfig::idler_filters() const {
    return {FilterSpec{FilterKind::lorentzian_cavity, fc_hwhm, 0.0}, FilterSpec{FilterKind::fbg, fbg_hwhm, 0.0}};
}

std::vector<FilterSpec> ExperimentConfig::detector_filters() const {
    std::vector<FilterSpec> chain;
    if (hpf_cutoff > 0.0) chain.push_back({FilterKind::electrical_hpf, hpf_cutoff, 0.0});
    if (lpf_cutoff > 0.0) chain.push_back({FilterKind::electrical_lpf, lpf_cutoff, 0.0});
    return chain;
}

const char* to_string(HeraldClass c) noexcept {
    switch (c) {
        case HeraldClass::true_herald: return "true";
        case HeraldClass::dark: return "dark";
        case HeraldClass::stray: return "stray";
    }
    return "unknown";
}

HeraldProbabilities herald_probabilities(const ExperimentConfig& config) {
    const double dark = config.dark_cps / config.total_cps;
    const double stray = config.stray_cps / config.total_cps;
    return {(config.total_cps - config.dark_cps - config.stray_cps) / config.total_cps, dark, stray};
}

HeraldClass herald_class_sampler(const ExperimentConfig& config, Rng& rng) {
    const auto probs = herald_probabilities(config);
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    if (u < probs.true_herald) return HeraldClass::true_herald;
    if (u < probs.true_herald + probs.dark) return HeraldClass::dark;
    return HeraldClass::stray;
}

PhotonDistribution heralded_state(const ExperimentConfig& config, HeraldClass herald, int n_max) {
    if (herald != HeraldClass::true_herald) return PhotonDistribution::vacuum(n_max);
    if (n_max < 3) throw DomainError("heralded state needs n_max >= 3");
    std::vector<double> p(static_cast<std::size_t>(n_max) + 1, 0.0);
    p[1] = 1.0 - config.two_photon_weight - config.three_photon_weight;
    p[2] = config.two_photon_weight;
    p[3] = config.three_photon_weight;
    return fock::apply_loss(PhotonDistribution(std::move(p)), config.optical_loss);
}

PhotonDistribution ensemble_state(const ExperimentConfig& config, int n_max) {
    const auto probs = herald_probabilities(config);
    return PhotonDistribution::mix(heralded_state(config, HeraldClass::true_herald, n_max),
                                   PhotonDistribution::vacuum(n_max), probs.true_herald);
}

double electronic_loss_equivalent(double electronic_noise_rel) {
    return electronic_noise_rel / (1.0 + electronic_noise_rel);
}

PhotonDistribution detection_referred_state(const ExperimentConfig& config, int n_max) {
    return fock::apply_loss(ensemble_state(config, n_max), electronic_loss_equivalent(config.electronic_noise_rel));
}

DetectorModel DetectorModel::from_config(const ExperimentConfig& config) {
    DetectorModel model{config.dt, config.detector_filters(), config.electronic_noise_rel, 0};
    if (config.lpf_cutoff > 0.0) {
        const double tau = 1.0 / (2.0 * std::numbers::pi * config.lpf_cutoff);
        model.pre_roll = static_cast<std::size_t>(std::ceil(12.0 * tau / config.dt));
    }
    return model;
}

void DetectorModel::apply(std::span<double> extended) const {
    if (!filters.empty()) spectral::filter_signal(extended, filters, dt);
}

double DetectorModel::vacuum_projection_variance(std::span<const double> unit_mode) const {
    // Var(u . G z) = 0.5 (1 + eps) |G^T u|^2 for white z; G is lower-triangular
    // Toeplitz, so G^T u = reverse(G reverse(u)) on the extended grid.
    std::vector<double> v(pre_roll + unit_mode.size(), 0.0);
    std::reverse_copy(unit_mode.begin(), unit_mode.end(), v.begin());
    apply(v);
    const double norm2 = std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
    return 0.5 * (1.0 + electronic_noise_rel) * norm2;
}

double DetectorModel::vacuum_sample_variance() const {
    std::vector<double> impulse(pre_roll + 4096, 0.0);
    impulse[0] = 1.0;
    apply(impulse);
    const double norm2 = std::inner_product(impulse.begin(), impulse.end(), impulse.begin(), 0.0);
    return 0.5 * (1.0 + electronic_noise_rel) * norm2;
}

namespace {

void check_mode_grid(const TemporalMode& mode, const ExperimentConfig& config) {
    if (!mode.grid().same_as(config.grid()))
        throw GridMismatchError("temporal mode grid does not match the configured frame grid");
}

Frame synthesize_with(const TemporalMode& mode, const fock::QuadratureSampler& state, const ExperimentConfig& config,
                      const DetectorModel& detector, Rng& rng) {
    const std::size_t n = config.frame_len;
    const std::size_t pre = detector.pre_roll;
    std::vector<double> ext(pre + n);

    const double x_h = state(rng);
    std::normal_distribution<double> vacuum(0.0, std::sqrt(0.5));
    for (double& v : ext) v = vacuum(rng);

    const std::span<double> frame(ext.data() + pre, n);
    const double along = std::inner_product(frame.begin(), frame.end(), mode.samples.begin(), 0.0);
    for (std::size_t k = 0; k < n; ++k) frame[k] += (x_h - along) * mode.samples[k];

    if (config.electronic_noise_rel > 0.0) {
        std::normal_distribution<double> electronic(0.0, std::sqrt(0.5 * config.electronic_noise_rel));
        for (double& v : ext) v += electronic(rng);
    }
    detector.apply(ext);
    return Frame{std::vector<double>(frame.begin(), frame.end()), HeraldClass::true_herald, 0};
}

}  // namespace

Frame synthesize_frame(const TemporalMode& mode, const fock::QuadratureSampler& state, const ExperimentConfig& config,
                       Rng& rng) {
    check_mode_grid(mode, config);
    return synthesize_with(mode, state, config, DetectorModel::from_config(config), rng);
}

Frame synthesize_frame(const TemporalMode& mode, const PhotonDistribution& state, const ExperimentConfig& config,
                       Rng& rng) {
    return synthesize_frame(mode, fock::QuadratureSampler(state), config, rng);
}

FrameEnsemble run_simulation(const ExperimentConfig& config, const TemporalMode& mode) {
    config.validate();
    check_mode_grid(mode, config);
    const DetectorModel detector = DetectorModel::from_config(config);
    const fock::QuadratureSampler heralded(heralded_state(config, HeraldClass::true_herald));
    const fock::QuadratureSampler vacuum(PhotonDistribution::vacuum());

    FrameEnsemble ensemble{config.dt, config.frame_len, std::vector<double>(config.n_frames * config.frame_len),
                           std::vector<HeraldClass>(config.n_frames)};
    parallel_for(config.n_frames, [&](std::size_t k) {
        Rng rng = make_stream(config.seed, stream_domain::frames, k);
        const HeraldClass herald = herald_class_sampler(config, rng);
        const auto& sampler = herald == HeraldClass::true_herald ? heralded : vacuum;
        Frame frame = synthesize_with(mode, sampler, config, detector, rng);
        std::copy(frame.trace.begin(), frame.trace.end(), ensemble.trace(k).begin());
        ensemble.herald_classes[k] = herald;
    });
    return ensemble;
}

TemporalMode optical_mode(const ExperimentConfig& config) {
    const auto grid = config.grid();
    const auto r12 = spectral::opo_correlation(config.opo_hwhm, grid);
    const auto idler = config.idler_filters();
    const auto g = spectral::filter_impulse_response(idler, grid);
    return spectral::heralded_mode(r12, g, config.frame_len / 2);
}

TemporalMode theory_mode(const ExperimentConfig& config) {
    const auto grid = config.grid();
    const auto r12 = spectral::opo_correlation(config.opo_hwhm, grid);
    const auto idler = config.idler_filters();
    const auto g = spectral::filter_impulse_response(idler, grid);
    const auto post = config.detector_filters();
    return spectral::heralded_mode(r12, g, config.frame_len / 2, post);
}

}  // namespace hpl::herald
