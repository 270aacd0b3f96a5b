#pragma once

// Synthetic heralded homodyne data: herald events, heralded-state photon
// content and filtered quadrature traces in shot-noise units.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hpl/fock.hpp"
#include "hpl/random.hpp"
#include "hpl/spectral.hpp"

namespace hpl::herald {

// Physical and numerical parameters of one run. Frequencies in Hz, times in
// seconds, losses as fractions, counts in cps. Defaults reproduce the
// telecom-band single-photon experiment (state content fitted to its
// reported photon-number distribution).
struct ExperimentConfig {
    double opo_hwhm = 3.7e6;
    double fc_hwhm = 8.2e6;
    double fbg_hwhm = 3.6e9;
    double hpf_cutoff = 10e3;  // 0 disables the filter
    double lpf_cutoff = 50e6;  // 0 disables the filter
    double dt = 1e-9;
    std::size_t frame_len = 1024;
    double total_cps = 3000.0;
    double dark_cps = 30.0;
    double stray_cps = 60.0;
    double optical_loss = 0.09938733377415832;
    double two_photon_weight = 0.010809508776956979;
    double three_photon_weight = 0.007633743071995565;
    double electronic_noise_rel = 0.01;
    std::size_t n_frames = 20000;
    std::uint64_t seed = 20220815;

    /// Throws ConfigError naming every violated field.
    void validate() const;

    spectral::TimeGrid grid() const noexcept { return {dt, frame_len}; }
    /// Filter cavity followed by the FBG.
    std::vector<spectral::FilterSpec> idler_filters() const;
    /// Enabled homodyne electrical filters (HPF then LPF).
    std::vector<spectral::FilterSpec> detector_filters() const;
};

enum class HeraldClass : std::uint8_t { true_herald = 0, dark = 1, stray = 2 };

const char* to_string(HeraldClass c) noexcept;

struct HeraldProbabilities {
    double true_herald = 1.0;
    double dark = 0.0;
    double stray = 0.0;

    double false_herald() const noexcept { return dark + stray; }
};

HeraldProbabilities herald_probabilities(const ExperimentConfig& config);

HeraldClass herald_class_sampler(const ExperimentConfig& config, Rng& rng);

/// True herald: {1-w2-w3, w2, w3} on n = 1, 2, 3, then the optical loss.
/// Dark and stray heralds leave the signal in vacuum.
fock::PhotonDistribution heralded_state(const ExperimentConfig& config, HeraldClass herald,
                                        int n_max = fock::kDefaultNMax);

/// Herald-averaged state of the ensemble at the optical output.
fock::PhotonDistribution ensemble_state(const ExperimentConfig& config, int n_max = fock::kDefaultNMax);

/// Loss equivalent of white electronic noise once quadratures are normalized
/// to the total (shot + electronic) vacuum floor: eps / (1 + eps).
double electronic_loss_equivalent(double electronic_noise_rel);

/// ensemble_state damped by the electronic-noise loss equivalent: the state a
/// shot-noise-calibrated tomography should recover.
fock::PhotonDistribution detection_referred_state(const ExperimentConfig& config, int n_max = fock::kDefaultNMax);

// Electrical side of the homodyne detector as seen by the analysis: white
// electronic noise added before the HPF/LPF chain, which runs from a noise
// pre-roll so it is in steady state when the frame starts.
struct DetectorModel {
    double dt = 1e-9;
    std::vector<spectral::FilterSpec> filters;
    double electronic_noise_rel = 0.0;
    std::size_t pre_roll = 0;

    static DetectorModel from_config(const ExperimentConfig& config);

    /// Filters `extended` (pre_roll + frame_len samples) in place.
    void apply(std::span<double> extended) const;

    /// Vacuum (+ electronic noise) variance of the projection u . trace.
    double vacuum_projection_variance(std::span<const double> unit_mode) const;

    /// Per-sample vacuum variance of a filtered trace far from the frame edge.
    double vacuum_sample_variance() const;
};

struct Frame {
    std::vector<double> trace;
    HeraldClass herald_class = HeraldClass::true_herald;
    std::uint64_t rng_tag = 0;
};

// n_frames traces of frame_len samples, stored contiguously frame-major.
struct FrameEnsemble {
    double dt = 1e-9;
    std::size_t frame_len = 0;
    std::vector<double> data;
    std::vector<HeraldClass> herald_classes;  // empty when loaded from disk

    std::size_t n_frames() const noexcept { return frame_len == 0 ? 0 : data.size() / frame_len; }
    std::span<const double> trace(std::size_t k) const noexcept {
        return {data.data() + k * frame_len, frame_len};
    }
    std::span<double> trace(std::size_t k) noexcept { return {data.data() + k * frame_len, frame_len}; }
    spectral::TimeGrid grid() const noexcept { return {dt, frame_len}; }
};

/// trace = x_h h + (w - (h.w) h) + e, then the detector filters. w is white
/// vacuum noise of per-sample variance 1/2, e white electronic noise of
/// variance electronic_noise_rel / 2, x_h ~ fock_marginal(state).
Frame synthesize_frame(const spectral::TemporalMode& mode, const fock::QuadratureSampler& state,
                       const ExperimentConfig& config, Rng& rng);
Frame synthesize_frame(const spectral::TemporalMode& mode, const fock::PhotonDistribution& state,
                       const ExperimentConfig& config, Rng& rng);

/// n_frames independent frames; frame k draws from make_stream(seed, frames, k),
/// so the ensemble is bit-identical for a fixed seed regardless of threading.
FrameEnsemble run_simulation(const ExperimentConfig& config, const spectral::TemporalMode& mode);

/// Optical heralded mode of the configuration (OPO + idler filters, no
/// electrical filters); this is the wave packet synthesize_frame excites.
spectral::TemporalMode optical_mode(const ExperimentConfig& config);

/// Theory mode: the optical mode passed through the detector filters.
spectral::TemporalMode theory_mode(const ExperimentConfig& config);

}  // namespace hpl::herald
