#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <vector>

#include "hpl/analysis.hpp"
#include "hpl/errors.hpp"
#include "hpl/fock.hpp"
#include "hpl/random.hpp"

using namespace hpl;
using fock::PhotonDistribution;

namespace {

constexpr double kPi = std::numbers::pi;

PhotonDistribution dist(std::vector<double> p) { return PhotonDistribution(std::move(p)); }

// Brute-force beamsplitter: each photon independently survives with 1 - L.
// Enumerates all 2^n survival patterns instead of using binomials.
std::vector<double> beamsplitter_oracle(const std::vector<double>& p, double loss) {
    std::vector<double> out(p.size(), 0.0);
    for (std::size_t n = 0; n < p.size(); ++n) {
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            const int kept = std::popcount(mask);
            out[static_cast<std::size_t>(kept)] +=
                p[n] * std::pow(1.0 - loss, kept) * std::pow(loss, static_cast<int>(n) - kept);
        }
    }
    return out;
}

double simpson(const std::function<double(double)>& f, double a, double b, int steps) {
    const double h = (b - a) / steps;
    double s = f(a) + f(b);
    for (int i = 1; i < steps; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

}  // namespace

TEST(PhotonDistribution, RejectsBadEntries) {
    EXPECT_THROW(dist({0.5, 0.6}), DomainError);
    EXPECT_THROW(dist({-0.1, 1.1}), DomainError);
    EXPECT_THROW(dist({0.5, 0.5 - 1e-8}), DomainError);
    EXPECT_NO_THROW(dist({0.5, 0.5 - 1e-10}));
}

TEST(PhotonDistribution, FockAndResize) {
    const auto one = PhotonDistribution::fock(1, 4);
    EXPECT_EQ(one.n_max(), 4);
    EXPECT_EQ(one[1], 1.0);
    EXPECT_EQ(one.support_max(), 1);
    EXPECT_EQ(one.resized(1).n_max(), 1);
    EXPECT_THROW(PhotonDistribution::fock(3, 4).resized(2), DomainError);
    EXPECT_DOUBLE_EQ(dist({0.25, 0.5, 0.25}).mean_photon_number(), 1.0);
}

TEST(FockWavefunction, Examples) {
    EXPECT_NEAR(fock::fock_wavefunction(0, 0.0), std::pow(kPi, -0.25), 1e-15);
    EXPECT_NEAR(fock::fock_wavefunction(0, 0.0), 0.7511, 1e-4);
    EXPECT_EQ(fock::fock_wavefunction(1, 0.0), 0.0);
}

TEST(FockWavefunction, MatchesArbitraryPrecisionOracle) {
    EXPECT_NEAR(fock::fock_wavefunction(5, 1.3), -0.39939146281375073457, 1e-10);
    EXPECT_NEAR(fock::fock_wavefunction(10, -2.7), -0.2442275382899648019, 1e-10);
    EXPECT_NEAR(fock::fock_wavefunction(40, 3.1), -0.16298901898871296615, 1e-10);
    EXPECT_NEAR(fock::fock_wavefunction(60, 0.45), 0.056345967044184836823, 1e-10);
}

TEST(FockWavefunction, OrderLimits) {
    EXPECT_THROW(fock::fock_wavefunction(61, 0.0), UnsupportedOrderError);
    EXPECT_THROW(fock::fock_wavefunction(-1, 0.0), DomainError);
    std::vector<double> psi(61);
    fock::fock_wavefunctions(60, 0.7, psi);
    for (int n = 0; n <= 60; n += 7) EXPECT_DOUBLE_EQ(psi[static_cast<std::size_t>(n)], fock::fock_wavefunction(n, 0.7));
}

TEST(FockWavefunction, Orthonormality) {
    std::vector<double> psi(21);
    const int steps = 24000;
    const double a = -12.0;
    const double h = 24.0 / steps;
    std::vector<std::vector<double>> table(static_cast<std::size_t>(steps + 1), std::vector<double>(21));
    for (int i = 0; i <= steps; ++i) fock::fock_wavefunctions(20, a + i * h, table[static_cast<std::size_t>(i)]);
    for (int m = 0; m <= 20; ++m) {
        for (int n = m; n <= 20; ++n) {
            double s = 0.0;
            for (int i = 0; i <= steps; ++i) {
                const auto& row = table[static_cast<std::size_t>(i)];
                const double w = (i == 0 || i == steps) ? 0.5 : 1.0;
                s += w * row[static_cast<std::size_t>(m)] * row[static_cast<std::size_t>(n)];
            }
            EXPECT_NEAR(s * h, m == n ? 1.0 : 0.0, 1e-8) << "m=" << m << " n=" << n;
        }
    }
}

TEST(FockMarginal, Examples) {
    EXPECT_NEAR(fock::fock_marginal(PhotonDistribution::vacuum(), 0.0), 1.0 / std::sqrt(kPi), 1e-15);
    EXPECT_NEAR(fock::fock_marginal(PhotonDistribution::vacuum(), 0.0), 0.5642, 1e-4);
    EXPECT_EQ(fock::fock_marginal(PhotonDistribution::fock(1), 0.0), 0.0);
    EXPECT_NEAR(fock::fock_marginal(dist({0.13, 0.87}), 0.0), 0.13 / std::sqrt(kPi), 1e-15);
    EXPECT_NEAR(fock::fock_marginal(dist({0.13, 0.87}), 0.0), 0.0733, 1e-4);
}

TEST(FockMarginal, CdfMatchesIntegratedDensity) {
    const auto d = dist({0.1, 0.5, 0.2, 0.1, 0.05, 0.05});
    for (double x : {-3.0, -1.2, 0.0, 0.4, 2.5}) {
        const double integral = simpson([&](double t) { return fock::fock_marginal(d, t); }, -12.0, x, 40000);
        EXPECT_NEAR(fock::fock_marginal_cdf(d, x), integral, 1e-9) << "x=" << x;
    }
    EXPECT_NEAR(fock::fock_marginal_cdf(d, 12.0), 1.0, 1e-14);
    EXPECT_NEAR(fock::fock_marginal_cdf(d, -12.0), 0.0, 1e-14);
}

TEST(Laguerre, LowOrders) {
    for (double y : {0.0, 0.3, 2.0, 7.5}) {
        EXPECT_DOUBLE_EQ(fock::laguerre(0, y), 1.0);
        EXPECT_NEAR(fock::laguerre(1, y), 1.0 - y, 1e-14);
        EXPECT_NEAR(fock::laguerre(2, y), 0.5 * (y * y - 4.0 * y + 2.0), 1e-13);
        EXPECT_NEAR(fock::laguerre(3, y), (-y * y * y + 9.0 * y * y - 18.0 * y + 6.0) / 6.0, 1e-12);
    }
}

TEST(Wigner, OriginExamples) {
    EXPECT_NEAR(fock::wigner_value(PhotonDistribution::fock(1), 0.0, 0.0), -1.0 / kPi, 1e-15);
    EXPECT_NEAR(fock::wigner_value(PhotonDistribution::vacuum(), 0.0, 0.0), 1.0 / kPi, 1e-15);
    const auto lossy = dist({0.13, 0.87});
    EXPECT_NEAR(fock::wigner_value(lossy, 0.0, 0.0), (2 * 0.13 - 1.0) / kPi, 1e-15);
    EXPECT_NEAR(fock::wigner_origin(lossy), -0.2356, 1e-4);
}

TEST(Wigner, ParityIdentityAtOrigin) {
    const auto d = dist({0.2, 0.3, 0.1, 0.15, 0.05, 0.1, 0.1});
    double expected = 0.0;
    for (int n = 0; n <= d.n_max(); ++n) expected += d[static_cast<std::size_t>(n)] * (n % 2 ? -1.0 : 1.0) / kPi;
    EXPECT_DOUBLE_EQ(fock::wigner_origin(d), expected);
    EXPECT_DOUBLE_EQ(fock::wigner_value(d, 0.0, 0.0), expected);
}

TEST(Wigner, GridTraceAndLowerBound) {
    Rng rng = make_stream(7, stream_domain::sampling, 0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 6; ++trial) {
        std::vector<double> p(11);
        for (auto& v : p) v = u(rng);
        const double s = std::accumulate(p.begin(), p.end(), 0.0);
        for (auto& v : p) v /= s;
        const auto grid = fock::wigner_of(dist(p), {-6.0, 6.0, -6.0, 6.0, 241, 241});
        EXPECT_NEAR(grid.integral(), 1.0, 2e-3);
        EXPECT_GE(grid.min_value(), -1.0 / kPi - 1e-9);
    }
    for (int n = 0; n <= 10; ++n) {
        const auto grid = fock::wigner_of(PhotonDistribution::fock(n), {-6.0, 6.0, -6.0, 6.0, 241, 241});
        EXPECT_NEAR(grid.integral(), 1.0, 2e-3) << "n=" << n;
        EXPECT_GE(grid.min_value(), -1.0 / kPi - 1e-9);
    }
}

TEST(Wigner, DefaultGridCoversFiveVacuumWidths) {
    const auto grid = fock::wigner_of(dist({0.13, 0.87}), fock::GridSpec{});
    EXPECT_EQ(grid.values.size(), 101u * 101u);
    EXPECT_NEAR(grid.integral(), 1.0, 2e-3);
}

TEST(Wigner, RotationallySymmetric) {
    const auto d = dist({0.1, 0.6, 0.2, 0.1});
    for (double r : {0.3, 1.1, 2.4}) {
        const double ref = fock::wigner_value(d, r, 0.0);
        for (double phi : {0.4, 1.3, 2.9}) EXPECT_NEAR(fock::wigner_value(d, r * std::cos(phi), r * std::sin(phi)), ref, 1e-14);
    }
}

TEST(Wigner, InvalidGrid) {
    const auto d = PhotonDistribution::vacuum();
    EXPECT_THROW(fock::wigner_of(d, {1.0, 1.0, -1.0, 1.0, 10, 10}), InvalidGridError);
    EXPECT_THROW(fock::wigner_of(d, {-1.0, 1.0, 2.0, 1.0, 10, 10}), InvalidGridError);
    EXPECT_THROW(fock::wigner_of(d, {-1.0, 1.0, -1.0, 1.0, 0, 10}), InvalidGridError);
}

TEST(ApplyLoss, Examples) {
    const auto same = fock::apply_loss(PhotonDistribution::fock(1, 1), 0.0);
    EXPECT_DOUBLE_EQ(same[0], 0.0);
    EXPECT_DOUBLE_EQ(same[1], 1.0);

    const auto l13 = fock::apply_loss(PhotonDistribution::fock(1, 1), 0.13);
    EXPECT_NEAR(l13[0], 0.13, 1e-15);
    EXPECT_NEAR(l13[1], 0.87, 1e-15);

    const auto two = fock::apply_loss(PhotonDistribution::fock(2, 2), 0.2);
    EXPECT_NEAR(two[0], 0.04, 1e-15);
    EXPECT_NEAR(two[1], 0.32, 1e-15);
    EXPECT_NEAR(two[2], 0.64, 1e-15);
}

TEST(ApplyLoss, MatchesBeamsplitterOracle) {
    const std::vector<double> p = {0.05, 0.3, 0.2, 0.15, 0.1, 0.1, 0.05, 0.05};
    for (double loss : {0.0, 0.07, 0.13, 0.5, 0.81, 1.0}) {
        const auto got = fock::apply_loss(dist(p), loss);
        const auto want = beamsplitter_oracle(p, loss);
        for (std::size_t m = 0; m < p.size(); ++m) EXPECT_NEAR(got[m], want[m], 1e-14) << "L=" << loss << " m=" << m;
    }
}

TEST(ApplyLoss, DomainErrors) {
    EXPECT_THROW(fock::apply_loss(PhotonDistribution::vacuum(), -0.01), DomainError);
    EXPECT_THROW(fock::apply_loss(PhotonDistribution::vacuum(), 1.01), DomainError);
}

TEST(ApplyLoss, ChannelComposition) {
    const auto d = dist({0.1, 0.4, 0.2, 0.1, 0.1, 0.05, 0.05});
    for (double l1 : {0.05, 0.3, 0.6}) {
        for (double l2 : {0.1, 0.45, 0.9}) {
            const auto twice = fock::apply_loss(fock::apply_loss(d, l1), l2);
            const auto once = fock::apply_loss(d, 1.0 - (1.0 - l1) * (1.0 - l2));
            for (std::size_t m = 0; m <= 6; ++m) EXPECT_NEAR(twice[m], once[m], 1e-10);
        }
    }
}

TEST(ApplyLoss, OriginMonotoneAndCrossesZeroAtHalf) {
    const auto one = PhotonDistribution::fock(1);
    double prev = -1.0;
    for (int i = 0; i <= 100; ++i) {
        const double loss = i / 100.0;
        const double w = fock::wigner_origin(fock::apply_loss(one, loss));
        if (i > 0) EXPECT_GT(w, prev);
        prev = w;
    }
    EXPECT_NEAR(fock::wigner_origin(fock::apply_loss(one, 0.5)), 0.0, 1e-12);
    EXPECT_LT(fock::wigner_origin(fock::apply_loss(one, 0.5 - 1e-9)), 0.0);
    EXPECT_GT(fock::wigner_origin(fock::apply_loss(one, 0.5 + 1e-9)), 0.0);
}

namespace {

struct Moments {
    double mean;
    double variance;
};

Moments sample_moments(const PhotonDistribution& d, std::size_t count, std::uint64_t seed) {
    const fock::QuadratureSampler sampler(d);
    Rng rng = make_stream(seed, stream_domain::sampling, 0);
    double s = 0.0;
    double ss = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const double x = sampler(rng);
        s += x;
        ss += x * x;
    }
    const double n = static_cast<double>(count);
    return {s / n, (ss - s * s / n) / (n - 1.0)};
}

}  // namespace

TEST(SampleQuadrature, VacuumVariance) {
    const auto m = sample_moments(PhotonDistribution::vacuum(), 1'000'000, 1);
    EXPECT_NEAR(m.variance, 0.5, 0.002);
    EXPECT_NEAR(m.mean, 0.0, 0.003);
}

TEST(SampleQuadrature, SinglePhotonVariance) {
    EXPECT_NEAR(sample_moments(PhotonDistribution::fock(1), 1'000'000, 2).variance, 1.5, 0.005);
}

TEST(SampleQuadrature, MixtureVariance) {
    EXPECT_NEAR(sample_moments(dist({0.13, 0.87}), 1'000'000, 3).variance, 1.37, 0.005);
}

TEST(SampleQuadrature, KsAgainstAnalyticCdf) {
    for (const auto& d : {dist({0.13, 0.87}), PhotonDistribution::fock(3), dist({0.2, 0.3, 0.2, 0.1, 0.1, 0.1})}) {
        const fock::QuadratureSampler sampler(d);
        Rng rng = make_stream(11, stream_domain::sampling, static_cast<std::uint64_t>(d.support_max()));
        std::vector<double> x(50000);
        for (auto& v : x) v = sampler(rng);
        const auto ks = analysis::ks_test(x, [&](double t) { return fock::fock_marginal_cdf(d, t); });
        EXPECT_GT(ks.p_value, 0.01);
    }
}

TEST(SampleQuadrature, AcceptanceRateIsPractical) {
    for (int n = 0; n <= 10; ++n) {
        const fock::QuadratureSampler sampler(PhotonDistribution::fock(n));
        EXPECT_GT(sampler.acceptance_rate(), 0.15) << "n=" << n;
        EXPECT_NEAR(sampler.proposal_sigma(), std::sqrt(n + 0.5), 1e-12);
    }
}

TEST(SampleQuadrature, DeterministicPerStream) {
    const auto d = dist({0.3, 0.7});
    Rng a = make_stream(5, stream_domain::sampling, 9);
    Rng b = make_stream(5, stream_domain::sampling, 9);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(fock::sample_quadrature(d, a), fock::sample_quadrature(d, b));
}
