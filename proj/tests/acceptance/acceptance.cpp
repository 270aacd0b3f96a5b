// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hpl/analysis.hpp"
#include "hpl/budget.hpp"
#include "hpl/fock.hpp"
#include "hpl/herald.hpp"

using namespace hpl;
namespace fs = std::filesystem;
using fock::PhotonDistribution;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string without_timestamp(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::string out;
    while (std::getline(in, line))
        if (line.find("\"timestamp\"") == std::string::npos) out += line + '\n';
    return out;
}

std::vector<double> draw(const PhotonDistribution& dist, std::size_t count, std::uint64_t seed) {
    const fock::QuadratureSampler sampler(dist);
    Rng rng = make_stream(seed, stream_domain::sampling, 0);
    std::vector<double> x(count);
    for (double& v : x) v = sampler(rng);
    return x;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const std::vector<PhotonDistribution>& lattice() {
    static const std::vector<PhotonDistribution> points = {
        PhotonDistribution({1.0, 0.0, 0.0, 0.0}),     PhotonDistribution({0.0, 1.0, 0.0, 0.0}),
        PhotonDistribution({0.0, 0.0, 1.0, 0.0}),     PhotonDistribution({0.0, 0.0, 0.0, 1.0}),
        PhotonDistribution({0.5, 0.5, 0.0, 0.0}),     PhotonDistribution({0.13, 0.87, 0.0, 0.0}),
        PhotonDistribution({0.25, 0.25, 0.25, 0.25}), PhotonDistribution({0.2, 0.3, 0.5, 0.0}),
        PhotonDistribution({0.1, 0.6, 0.1, 0.2}),     PhotonDistribution({0.133, 0.851, 0.010, 0.006}),
    };
    return points;
}

// Pure loss on a single photon, no false heralds, no electronic noise.
herald::ExperimentConfig pure_loss_config(double loss) {
    herald::ExperimentConfig c;
    c.optical_loss = loss;
    c.two_photon_weight = 0.0;
    c.three_photon_weight = 0.0;
    c.dark_cps = 0.0;
    c.stray_cps = 0.0;
    c.electronic_noise_rel = 0.0;
    return c;
}

struct PureLossRun {
    double loss = 0.0;
    double w = 0.0;
    double se = 0.0;
    double mode_match = 0.0;
    std::vector<double> quadratures;
};

PureLossRun run_pure_loss(double loss) {
    const auto c = pure_loss_config(loss);
    const auto frames = herald::run_simulation(c, herald::optical_mode(c));
    analysis::PipelineSettings settings;
    settings.bootstrap_replicates = 50;
    settings.bootstrap_seed = c.seed;
    auto r = analysis::run_pipeline(frames, herald::theory_mode(c), herald::DetectorModel::from_config(c), settings);
    return {loss, r.tomography.wigner_origin, r.bootstrap.se.wigner_origin, r.mode_match, std::move(r.quadratures)};
}

struct CliRun {
    int exit_code = -1;
    double seconds = 0.0;
    fs::path dir;
};

CliRun run_full(const fs::path& dir) {
    fs::remove_all(dir);
    const std::string cmd = std::string(HPL_CLI_PATH) + " full --config " + HPL_DEFAULT_CONFIG + " --out " +
                            dir.string() + " > " + (dir.string() + ".log") + " 2>&1";
    const auto t0 = std::chrono::steady_clock::now();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, seconds_since(t0), dir};
}

Outcome criterion_budget() {
    const double total = budget::compose_losses(budget::reference_loss_budget());
    const auto escape = budget::opo_escape_efficiency(0.142, 0.0022);
    const bool ok = std::abs(total - 0.132) < 5e-4 && std::abs(total - 0.13) <= 0.005 && escape.loss <= 0.02;
    return {ok, fmt("composed total %.1f%% (%.6f), naive sum %.1f%%, OPO escape loss %.2f%%", 100.0 * total, total,
                    100.0 * budget::naive_loss_sum(budget::reference_loss_budget()), 100.0 * escape.loss)};
}

Outcome criterion_estimator() {
    double worst_p = 0.0;
    double worst_trace = 0.0;
    double worst_composition = 0.0;
    bool monotone = true;
    const fock::GridSpec grid{-6.0, 6.0, -6.0, 6.0, 241, 241};
    for (std::size_t i = 0; i < lattice().size(); ++i) {
        const auto& truth = lattice()[i];
        const auto fit = analysis::mle_tomography(draw(truth, 1000000, 1000 + i), {fock::kDefaultNMax, 500, 1e-9});
        for (int n = 0; n <= fock::kDefaultNMax; ++n)
            worst_p = std::max(worst_p, std::abs(fit.photon_dist[n] - truth[n]));
        const auto& ll = fit.log_likelihood_trace;
        for (std::size_t k = 1; k < ll.size(); ++k) monotone = monotone && ll[k] >= ll[k - 1];
        for (const auto* d : {&truth, &fit.photon_dist})
            worst_trace = std::max(worst_trace, std::abs(fock::wigner_of(*d, grid).integral() - 1.0));
        for (double l1 : {0.0, 0.13, 0.5, 0.9}) {
            for (double l2 : {0.02, 0.3, 0.77, 1.0}) {
                const auto twice = fock::apply_loss(fock::apply_loss(truth, l1), l2);
                const auto once = fock::apply_loss(truth, 1.0 - (1.0 - l1) * (1.0 - l2));
                for (int n = 0; n <= truth.n_max(); ++n)
                    worst_composition = std::max(worst_composition, std::abs(twice[n] - once[n]));
            }
        }
    }
    const bool ok = worst_p < 0.005 && monotone && worst_trace <= 2e-3 && worst_composition <= 1e-10;
    return {ok, fmt("max |p - p_true| %.5f over %zu lattice points, LL monotone %s, max |grid integral - 1| %.2e, "
                    "loss composition error %.1e",
                    worst_p, lattice().size(), monotone ? "yes" : "no", worst_trace, worst_composition)};
}

}  // namespace

int main() {
    std::vector<Outcome> results(8);
    const fs::path work = fs::temp_directory_path() / ("hpl_acceptance_" + std::to_string(getpid()));
    fs::create_directories(work);

    results[5] = criterion_budget();
    std::fprintf(stderr, "[budget done]\n");
    results[6] = criterion_estimator();
    std::fprintf(stderr, "[estimator done]\n");

    // Pure-loss sweep; the L = 0.13 run also feeds the marginal check.
    std::vector<PureLossRun> sweep;
    for (double loss : {0.0, 0.13, 0.3, 0.5, 0.7}) {
        sweep.push_back(run_pure_loss(loss));
        std::fprintf(stderr, "[pure loss %.2f done]\n", loss);
    }
    {
        bool ok = true;
        std::string detail;
        for (const auto& r : sweep) {
            const double oracle = (2.0 * r.loss - 1.0) / std::numbers::pi;
            const bool within = std::abs(r.w - oracle) <= 3.0 * r.se;
            const bool sign = r.loss < 0.5 ? r.w < 0.0 : (r.loss > 0.5 ? r.w > 0.0 : true);
            ok = ok && within && sign;
            detail += fmt("L=%.2f W=%+.4f+/-%.4f oracle %+.4f; ", r.loss, r.w, r.se, oracle);
        }
        const double eps = 1e-12;
        const double below = fock::wigner_origin(fock::apply_loss(PhotonDistribution::fock(1), 0.5 - eps));
        const double above = fock::wigner_origin(fock::apply_loss(PhotonDistribution::fock(1), 0.5 + eps));
        ok = ok && below < 0.0 && above > 0.0;
        results[2] = {ok, detail + fmt("closed form at 0.5-/+1e-12: %+.1e / %+.1e", below, above)};
    }
    {
        const PhotonDistribution target({0.13, 0.87});
        const auto& x = sweep[1].quadratures;
        const auto ks = analysis::ks_test(x, [&](double v) { return fock::fock_marginal_cdf(target, v); });
        results[4] = {ks.p_value > 0.01, fmt("KS D=%.4f p=%.3f over %zu quadratures at L=0.13", ks.statistic,
                                             ks.p_value, x.size())};
    }

    // Two end-to-end runs of the shipped configuration.
    const auto first = run_full(work / "run1");
    std::fprintf(stderr, "[full run 1 done in %.0f s]\n", first.seconds);
    const auto second = run_full(work / "run2");
    std::fprintf(stderr, "[full run 2 done in %.0f s]\n", second.seconds);
    const bool cli_ok = first.exit_code == 0 && second.exit_code == 0;
    {
        bool identical = cli_ok;
        std::string differing;
        for (const char* name : {"report.json", "frames.hplf", "frames.meta", "mode.csv", "histogram.csv", "wigner.csv",
                                 "eigenvalues.csv", "budget.csv"}) {
            std::string a = slurp(first.dir / name);
            std::string b = slurp(second.dir / name);
            if (std::string(name) == "report.json") {
                a = without_timestamp(a);
                b = without_timestamp(b);
            }
            if (a.empty() || a != b) {
                identical = false;
                differing += std::string(" ") + name;
            }
        }
        results[7] = {identical, identical ? "report.json (timestamp excluded) and all other outputs byte-identical"
                                           : fmt("exit codes %d/%d, differing:%s", first.exit_code, second.exit_code,
                                                 differing.c_str())};
    }
    if (cli_ok) {
        const auto doc = nlohmann::json::parse(slurp(first.dir / "report.json"));
        const double w = doc.at("wigner_origin").get<double>();
        const double se = doc.at("se").at("wigner_origin").get<double>();
        const double truth = doc.at("ground_truth").at("wigner_origin").get<double>();
        const double reference_truth = (0.133 - 0.851 + 0.010 - 0.005) / std::numbers::pi;
        const bool ok = std::abs(w - truth) <= 0.012 && std::abs(w - reference_truth) <= 0.012 &&
                        doc.at("n_frames").get<int>() == 20000 && first.seconds < 300.0;
        results[1] = {ok, fmt("W(0,0)=%.4f+/-%.4f, simulated truth %.4f, reference %.4f, %d frames, %.0f s", w, se,
                              truth, reference_truth, doc.at("n_frames").get<int>(), first.seconds)};

        std::vector<double> eig;
        std::istringstream csv(slurp(first.dir / "eigenvalues.csv"));
        std::string line;
        std::getline(csv, line);
        while (std::getline(csv, line)) eig.push_back(std::stod(line.substr(line.find(',') + 1)));
        std::vector<double> sorted = eig;
        std::sort(sorted.begin(), sorted.end());
        const double median = sorted.empty() ? 0.0 : sorted[sorted.size() / 2];
        const double match = doc.at("mode_match").get<double>();
        const double gap = eig.empty() ? 0.0 : eig.front() - median;
        results[3] = {match >= 0.99 && gap >= 0.7,
                      fmt("mode match %.5f, top eigenvalue %.4f, median %.4f, gap %.4f", match,
                          eig.empty() ? 0.0 : eig.front(), median, gap)};
    } else {
        results[1] = {false, fmt("full run exited with %d", first.exit_code)};
        results[3] = results[1];
    }

    const char* names[8] = {"",
                            "Wigner negativity reproduction",
                            "Pure-loss oracle",
                            "Temporal-mode recovery",
                            "Marginal dip",
                            "Loss budget",
                            "Estimator unit suite",
                            "Reproducibility"};
    bool all = true;
    for (int i = 1; i <= 7; ++i) {
        std::printf("%s criterion %d (%s): %s\n", results[i].pass ? "PASS" : "FAIL", i, names[i],
                    results[i].detail.c_str());
        all = all && results[i].pass;
    }
    fs::remove_all(work);
    return all ? 0 : 1;
}
