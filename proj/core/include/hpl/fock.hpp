#pragma once

// Exact Fock-space quantities for phase-insensitive single-mode states.
//
// Convention: hbar = 1, [x, p] = i, a = (x + ip)/sqrt(2). The vacuum quadrature
// variance is 1/2 and every quadrature in the library is in these units.

#include <cstddef>
#include <span>
#include <vector>

#include "hpl/random.hpp"

namespace hpl::fock {

/// Highest Fock order supported by the Hermite / Laguerre recurrences.
inline constexpr int kMaxOrder = 60;
inline constexpr int kDefaultNMax = 10;

// Diagonal density matrix: probability of each photon number 0..n_max.
class PhotonDistribution {
public:
    /// Throws DomainError unless every entry is in [0, 1] and the entries sum
    /// to 1 within 1e-9.
    explicit PhotonDistribution(std::vector<double> probs);

    static PhotonDistribution fock(int n, int n_max = kDefaultNMax);
    static PhotonDistribution vacuum(int n_max = kDefaultNMax) { return fock(0, n_max); }

    int n_max() const noexcept { return static_cast<int>(probs_.size()) - 1; }
    std::span<const double> probs() const noexcept { return probs_; }
    double operator[](std::size_t n) const noexcept { return n < probs_.size() ? probs_[n] : 0.0; }

    /// Highest n with a non-zero probability.
    int support_max() const noexcept;
    double mean_photon_number() const noexcept;

    /// Same distribution padded with zeros (or truncated, if the dropped tail
    /// is exactly zero) to a new n_max.
    PhotonDistribution resized(int n_max) const;

    /// Convex combination w*a + (1-w)*b over the larger of the two supports.
    static PhotonDistribution mix(const PhotonDistribution& a, const PhotonDistribution& b, double w);

private:
    std::vector<double> probs_;
};

/// psi_n(x) = pi^(-1/4) (2^n n!)^(-1/2) H_n(x) exp(-x^2/2), by upward recurrence.
/// Throws UnsupportedOrderError for n > kMaxOrder and DomainError for n < 0.
double fock_wavefunction(int n, double x);

/// psi_0(x) .. psi_{n_max}(x) written into `out` (size n_max + 1).
void fock_wavefunctions(int n_max, double x, std::span<double> out);

/// Quadrature density sum_n p_n psi_n(x)^2.
double fock_marginal(const PhotonDistribution& dist, double x);

/// Cumulative distribution of fock_marginal, in closed form:
/// F_n(x) = F_{n-1}(x) - psi_n(x) psi_{n-1}(x) / sqrt(2n), F_0(x) = (1 + erf x)/2.
double fock_marginal_cdf(const PhotonDistribution& dist, double x);

/// Laguerre polynomial L_n(y) by three-term recurrence.
double laguerre(int n, double y);

/// Wigner function of a diagonal state at (x, p).
double wigner_value(const PhotonDistribution& dist, double x, double p);

/// W(0,0) = sum_n p_n (-1)^n / pi, closed form.
double wigner_origin(const PhotonDistribution& dist) noexcept;

struct GridSpec {
    double x_min = -5.0;
    double x_max = 5.0;
    double p_min = -5.0;
    double p_max = 5.0;
    std::size_t nx = 101;
    std::size_t np = 101;
};

// Wigner values sampled at cell centres of an nx x np lattice; values are
// stored row-major with x as the outer index.
struct WignerGrid {
    GridSpec spec;
    std::vector<double> values;

    double dx() const noexcept { return (spec.x_max - spec.x_min) / static_cast<double>(spec.nx); }
    double dp() const noexcept { return (spec.p_max - spec.p_min) / static_cast<double>(spec.np); }
    double x_at(std::size_t i) const noexcept { return spec.x_min + (static_cast<double>(i) + 0.5) * dx(); }
    double p_at(std::size_t j) const noexcept { return spec.p_min + (static_cast<double>(j) + 0.5) * dp(); }
    double at(std::size_t i, std::size_t j) const noexcept { return values[i * spec.np + j]; }

    /// Riemann sum of the values times the cell area.
    double integral() const noexcept;
    double min_value() const noexcept;
};

/// Throws InvalidGridError for non-positive extent or zero counts.
WignerGrid wigner_of(const PhotonDistribution& dist, const GridSpec& spec);

/// Binomial damping: p'_m = sum_{n>=m} C(n,m) (1-L)^m L^(n-m) p_n.
/// Throws DomainError unless 0 <= loss <= 1.
PhotonDistribution apply_loss(const PhotonDistribution& dist, double loss);

// Draws quadratures distributed as fock_marginal(dist, .) by rejection from a
// centred Gaussian of variance support_max + 1/2. The envelope constant is
// found once, at construction.
class QuadratureSampler {
public:
    explicit QuadratureSampler(const PhotonDistribution& dist);

    double operator()(Rng& rng) const;

    const PhotonDistribution& distribution() const noexcept { return dist_; }
    double proposal_sigma() const noexcept { return sigma_; }
    /// Expected fraction of accepted proposals, 1 / envelope.
    double acceptance_rate() const noexcept { return 1.0 / envelope_; }

private:
    PhotonDistribution dist_;
    double sigma_;
    double envelope_;
};

/// One draw; builds a sampler per call, so prefer QuadratureSampler in loops.
double sample_quadrature(const PhotonDistribution& dist, Rng& rng);

}  // namespace hpl::fock
