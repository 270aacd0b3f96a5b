#include "hpl/fock.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "hpl/errors.hpp"

namespace hpl::fock {

namespace {

constexpr double kSumTolerance = 1e-9;

void check_order(int n) {
    if (n < 0) throw DomainError("Fock order must be non-negative, got " + std::to_string(n));
    if (n > kMaxOrder)
        throw UnsupportedOrderError("Fock order " + std::to_string(n) + " exceeds the recurrence cap " +
                                    std::to_string(kMaxOrder));
}

// Pascal's triangle up to kMaxOrder, built once.
const std::array<std::array<double, kMaxOrder + 1>, kMaxOrder + 1>& binomials() {
    static const auto table = [] {
        std::array<std::array<double, kMaxOrder + 1>, kMaxOrder + 1> t{};
        for (int n = 0; n <= kMaxOrder; ++n) {
            t[n][0] = 1.0;
            for (int m = 1; m <= n; ++m) t[n][m] = t[n - 1][m - 1] + (m <= n - 1 ? t[n - 1][m] : 0.0);
        }
        return t;
    }();
    return table;
}

}  // namespace

PhotonDistribution::PhotonDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw DomainError("photon distribution needs at least one entry");
    if (static_cast<int>(probs_.size()) - 1 > kMaxOrder)
        throw UnsupportedOrderError("photon distribution longer than n_max = " + std::to_string(kMaxOrder));
    double sum = 0.0;
    for (std::size_t n = 0; n < probs_.size(); ++n) {
        const double p = probs_[n];
        if (!(p >= 0.0 && p <= 1.0))
            throw DomainError("photon probability p_" + std::to_string(n) + " = " + std::to_string(p) +
                              " is outside [0, 1]");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kSumTolerance)
        throw DomainError("photon probabilities sum to " + std::to_string(sum) + ", not 1");
}

PhotonDistribution PhotonDistribution::fock(int n, int n_max) {
    check_order(n);
    check_order(n_max);
    if (n > n_max) throw DomainError("Fock state |" + std::to_string(n) + "> does not fit in n_max");
    std::vector<double> p(static_cast<std::size_t>(n_max) + 1, 0.0);
    p[static_cast<std::size_t>(n)] = 1.0;
    return PhotonDistribution(std::move(p));
}

int PhotonDistribution::support_max() const noexcept {
    for (int n = n_max(); n > 0; --n)
        if (probs_[static_cast<std::size_t>(n)] > 0.0) return n;
    return 0;
}

double PhotonDistribution::mean_photon_number() const noexcept {
    double mean = 0.0;
    for (std::size_t n = 0; n < probs_.size(); ++n) mean += static_cast<double>(n) * probs_[n];
    return mean;
}

PhotonDistribution PhotonDistribution::resized(int new_n_max) const {
    check_order(new_n_max);
    if (new_n_max < support_max())
        throw DomainError("resizing would drop non-zero photon probabilities");
    std::vector<double> p(probs_.begin(), probs_.begin() + std::min<std::size_t>(probs_.size(), new_n_max + 1));
    p.resize(static_cast<std::size_t>(new_n_max) + 1, 0.0);
    return PhotonDistribution(std::move(p));
}

PhotonDistribution PhotonDistribution::mix(const PhotonDistribution& a, const PhotonDistribution& b, double w) {
    if (!(w >= 0.0 && w <= 1.0)) throw DomainError("mixing weight must be in [0, 1]");
    const std::size_t size = std::max(a.probs_.size(), b.probs_.size());
    std::vector<double> p(size, 0.0);
    for (std::size_t n = 0; n < size; ++n) p[n] = w * a[n] + (1.0 - w) * b[n];
    return PhotonDistribution(std::move(p));
}

void fock_wavefunctions(int n_max, double x, std::span<double> out) {
    check_order(n_max);
    if (out.size() < static_cast<std::size_t>(n_max) + 1)
        throw DomainError("output span too short for fock_wavefunctions");
    // pi^(-1/4)
    constexpr double kNorm0 = 0.75112554446494248286;
    out[0] = kNorm0 * std::exp(-0.5 * x * x);
    if (n_max == 0) return;
    out[1] = std::numbers::sqrt2 * x * out[0];
    for (int n = 1; n < n_max; ++n) {
        const double np1 = static_cast<double>(n + 1);
        out[n + 1] = std::sqrt(2.0 / np1) * x * out[n] - std::sqrt(static_cast<double>(n) / np1) * out[n - 1];
    }
}

double fock_wavefunction(int n, double x) {
    check_order(n);
    std::array<double, kMaxOrder + 1> psi{};
    fock_wavefunctions(n, x, psi);
    return psi[static_cast<std::size_t>(n)];
}

double fock_marginal(const PhotonDistribution& dist, double x) {
    const int top = dist.support_max();
    std::array<double, kMaxOrder + 1> psi{};
    fock_wavefunctions(top, x, psi);
    double density = 0.0;
    for (int n = 0; n <= top; ++n) density += dist[n] * psi[n] * psi[n];
    return density;
}

double fock_marginal_cdf(const PhotonDistribution& dist, double x) {
    const int top = dist.support_max();
    std::array<double, kMaxOrder + 1> psi{};
    fock_wavefunctions(top, x, psi);
    double cdf_n = 0.5 * (1.0 + std::erf(x));
    double total = dist[0] * cdf_n;
    for (int n = 1; n <= top; ++n) {
        cdf_n -= psi[n] * psi[n - 1] / std::sqrt(2.0 * n);
        total += dist[n] * cdf_n;
    }
    return std::clamp(total, 0.0, 1.0);
}

double laguerre(int n, double y) {
    check_order(n);
    if (n == 0) return 1.0;
    double prev = 1.0;
    double cur = 1.0 - y;
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0 - y) * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

double wigner_value(const PhotonDistribution& dist, double x, double p) {
    const double r2 = x * x + p * p;
    const double y = 2.0 * r2;
    const int top = dist.support_max();
    double prev = 1.0;      // L_0
    double cur = 1.0 - y;   // L_1
    double acc = dist[0];
    for (int n = 1; n <= top; ++n) {
        if (n > 1) {
            const double next = ((2.0 * (n - 1) + 1.0 - y) * cur - (n - 1) * prev) / n;
            prev = cur;
            cur = next;
        }
        acc += (n % 2 == 0 ? 1.0 : -1.0) * dist[n] * cur;
    }
    return acc * std::exp(-r2) * std::numbers::inv_pi;
}

double wigner_origin(const PhotonDistribution& dist) noexcept {
    double acc = 0.0;
    const auto probs = dist.probs();
    for (std::size_t n = 0; n < probs.size(); ++n) acc += (n % 2 == 0 ? probs[n] : -probs[n]);
    return acc * std::numbers::inv_pi;
}

double WignerGrid::integral() const noexcept {
    return std::accumulate(values.begin(), values.end(), 0.0) * dx() * dp();
}

double WignerGrid::min_value() const noexcept {
    return values.empty() ? 0.0 : *std::min_element(values.begin(), values.end());
}

WignerGrid wigner_of(const PhotonDistribution& dist, const GridSpec& spec) {
    if (!(spec.x_max > spec.x_min) || !(spec.p_max > spec.p_min))
        throw InvalidGridError("Wigner grid needs positive extent in x and p");
    if (spec.nx == 0 || spec.np == 0) throw InvalidGridError("Wigner grid needs positive point counts");
    WignerGrid grid{spec, std::vector<double>(spec.nx * spec.np)};
    for (std::size_t i = 0; i < spec.nx; ++i) {
        const double x = grid.x_at(i);
        for (std::size_t j = 0; j < spec.np; ++j) grid.values[i * spec.np + j] = wigner_value(dist, x, grid.p_at(j));
    }
    return grid;
}

PhotonDistribution apply_loss(const PhotonDistribution& dist, double loss) {
    if (!(loss >= 0.0 && loss <= 1.0))
        throw DomainError("loss fraction must be in [0, 1], got " + std::to_string(loss));
    const double eta = 1.0 - loss;
    const auto& binom = binomials();
    const auto probs = dist.probs();
    std::vector<double> out(probs.size(), 0.0);
    for (std::size_t n = 0; n < probs.size(); ++n) {
        if (probs[n] == 0.0) continue;
        for (std::size_t m = 0; m <= n; ++m)
            out[m] += binom[n][m] * std::pow(eta, static_cast<double>(m)) *
                      std::pow(loss, static_cast<double>(n - m)) * probs[n];
    }
    // Rounding can leave the sum a few ulps off; renormalize so the result
    // satisfies the type invariant exactly.
    const double sum = std::accumulate(out.begin(), out.end(), 0.0);
    for (double& v : out) v = std::clamp(v / sum, 0.0, 1.0);
    return PhotonDistribution(std::move(out));
}

QuadratureSampler::QuadratureSampler(const PhotonDistribution& dist)
    : dist_(dist), sigma_(std::sqrt(dist.support_max() + 0.5)), envelope_(1.0) {
    const double reach = std::max(8.0, 6.0 * sigma_);
    const double step = 2e-3;
    const double norm = 1.0 / (sigma_ * std::sqrt(2.0 * std::numbers::pi));
    double worst = 0.0;
    for (double x = -reach; x <= reach; x += step) {
        const double proposal = norm * std::exp(-0.5 * x * x / (sigma_ * sigma_));
        if (proposal <= 0.0) continue;
        worst = std::max(worst, fock_marginal(dist_, x) / proposal);
    }
    // Grid maximum of a smooth ratio; 2% headroom covers the between-point peak.
    envelope_ = 1.02 * worst;
}

double QuadratureSampler::operator()(Rng& rng) const {
    std::normal_distribution<double> gauss(0.0, sigma_);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double norm = 1.0 / (sigma_ * std::sqrt(2.0 * std::numbers::pi));
    for (;;) {
        const double x = gauss(rng);
        const double proposal = norm * std::exp(-0.5 * x * x / (sigma_ * sigma_));
        if (unit(rng) * envelope_ * proposal <= fock_marginal(dist_, x)) return x;
    }
}

double sample_quadrature(const PhotonDistribution& dist, Rng& rng) { return QuadratureSampler(dist)(rng); }

}  // namespace hpl::fock
