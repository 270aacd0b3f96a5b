#include "hpl/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include "hpl/budget.hpp"
#include "hpl/errors.hpp"
#include "hpl/frame_io.hpp"
#include "hpl/report.hpp"

namespace hpl::experiment {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kReportedEigenvalues = 20;

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::ofstream open_for_write(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.precision(17);
    return out;
}

void finish(std::ofstream& out, const fs::path& path) {
    out.flush();
    if (!out) throw IoError("failed writing " + path.string());
}

analysis::PipelineSettings pipeline_settings(const config::RunConfig& config) {
    analysis::PipelineSettings s;
    s.tomography = {config.analysis.n_max, config.analysis.max_iter, config.analysis.tol};
    s.bootstrap_replicates = config.analysis.bootstrap_replicates;
    s.bootstrap_seed = config.experiment.seed;
    return s;
}

}  // namespace

config::RunConfig apply_overrides(config::RunConfig config, const Overrides& overrides) {
    if (overrides.seed) config.experiment.seed = *overrides.seed;
    if (overrides.n_frames) config.experiment.n_frames = *overrides.n_frames;
    return config;
}

OutputTransaction::OutputTransaction(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    if (!fs::exists(dir_, ec)) {
        if (!fs::create_directories(dir_, ec) || ec)
            throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
        created_dir_ = true;
    } else if (!fs::is_directory(dir_, ec)) {
        throw IoError(dir_.string() + " is not a directory");
    }
}

OutputTransaction::~OutputTransaction() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& p : created_) fs::remove(p, ec);
    if (created_dir_ && fs::is_empty(dir_, ec)) fs::remove(dir_, ec);
}

fs::path OutputTransaction::track(const std::string& name) {
    fs::path p = dir_ / name;
    if (std::find(created_.begin(), created_.end(), p) == created_.end()) created_.push_back(p);
    return p;
}

SimulationSummary simulate(const config::RunConfig& config, OutputTransaction& out, bool csv_export) {
    const auto& exp = config.experiment;
    const auto mode = herald::optical_mode(exp);
    const auto frames = herald::run_simulation(exp, mode);

    SimulationSummary summary{frames.n_frames(), 0, 0, 0};
    for (const auto c : frames.herald_classes) {
        switch (c) {
            case herald::HeraldClass::true_herald: ++summary.true_heralds; break;
            case herald::HeraldClass::dark: ++summary.dark_heralds; break;
            case herald::HeraldClass::stray: ++summary.stray_heralds; break;
        }
    }

    io::write_frames_binary(out.track(files::frames), frames);
    const auto meta_path = out.track(files::frames_meta);
    auto meta = open_for_write(meta_path);
    meta << "# Sidecar for " << files::frames << "; readable as an hpl config.\n"
         << "# herald_true = " << summary.true_heralds << "\n"
         << "# herald_dark = " << summary.dark_heralds << "\n"
         << "# herald_stray = " << summary.stray_heralds << "\n"
         << config::format_config(config);
    finish(meta, meta_path);
    if (csv_export) io::write_frames_csv(out.track(files::frames_csv), frames);
    return summary;
}

std::string build_report_json(const config::RunConfig& config, const analysis::PipelineResult& result,
                              const std::string& timestamp) {
    const auto& exp = config.experiment;
    const auto& tomo = result.tomography;
    const auto truth = herald::detection_referred_state(exp, config.analysis.n_max);
    const auto budget_total = budget::compose_losses(config.budget);
    const auto escape = budget::opo_escape_efficiency(config.opo.output_coupler, config.opo.round_trip_loss);

    report::JsonWriter j;
    j.begin_object();
    j.key("schema_version").value(std::int64_t{1});
    j.key("photon_dist").numbers(tomo.photon_dist.probs());
    j.key("wigner_origin").value(tomo.wigner_origin);
    j.key("se").begin_object();
    j.key("photon_dist").numbers(result.bootstrap.se.photon_dist);
    j.key("wigner_origin").value(result.bootstrap.se.wigner_origin);
    j.end_object();
    const auto& eig = result.pca.eigenvalues;
    j.key("eigenvalues").numbers(std::span(eig.data(), std::min(eig.size(), kReportedEigenvalues)));
    j.key("mode_match").value(result.mode_match);
    j.key("mode_overlap_amplitude").value(std::abs(result.mode_overlap_amplitude));
    j.key("iterations").value(std::int64_t{tomo.iterations});
    j.key("converged").value(tomo.converged);
    j.key("log_likelihood").value(tomo.log_likelihood);
    j.key("log_likelihood_monotone").value(tomo.monotone);
    j.key("n_frames").value(static_cast<std::int64_t>(result.quadratures.size()));
    j.key("shot_noise_scale").value(result.shot_noise_scale);
    j.key("pca").begin_object();
    j.key("component_count").value(static_cast<std::int64_t>(result.pca.component_count));
    j.key("undersampled").value(result.pca.undersampled);
    j.end_object();
    j.key("bootstrap").begin_object();
    j.key("replicates").value(std::int64_t{config.analysis.bootstrap_replicates});
    j.key("non_converged").value(std::int64_t{result.bootstrap.non_converged});
    j.end_object();
    j.key("ground_truth").begin_object();
    j.key("reference").value("detection-referred ensemble state of the configured simulation");
    j.key("photon_dist").numbers(truth.probs());
    j.key("wigner_origin").value(fock::wigner_origin(truth));
    j.key("electronic_loss_equivalent").value(herald::electronic_loss_equivalent(exp.electronic_noise_rel));
    j.end_object();
    j.key("loss_budget").begin_object();
    j.key("entries").begin_array();
    for (const auto& e : config.budget.entries) {
        j.begin_object();
        j.key("label").value(e.label);
        j.key("loss").value(e.loss);
        j.end_object();
    }
    j.end_array();
    j.key("naive_sum").value(budget::naive_loss_sum(config.budget));
    j.key("composed_total").value(budget_total);
    j.key("opo_escape_efficiency").value(escape.efficiency);
    j.key("opo_escape_loss").value(escape.loss);
    j.end_object();
    j.key("metadata").begin_object();
    j.key("units").value("quadratures in shot-noise units, vacuum variance 1/2 (hbar = 1)");
    j.key("eigenvalue_units").value("modal quadrature variance of the raw traces, shot-noise units");
    j.key("mode_match_definition").value("squared overlap of unit-norm modes");
    j.key("seed").value(static_cast<std::int64_t>(exp.seed));
    j.key("timestamp").value(timestamp);
    j.end_object();
    j.end_object();
    return j.str();
}

std::string analyze(const config::RunConfig& config, const fs::path& frames_path, OutputTransaction& out) {
    const auto& exp = config.experiment;
    const auto frames = io::read_frames(frames_path, exp.dt);
    if (!frames.grid().same_as(exp.grid()))
        throw GridMismatchError("frames in " + frames_path.string() + " (frame_len " +
                                std::to_string(frames.frame_len) + ") do not match the configured grid (frame_len " +
                                std::to_string(exp.frame_len) + ")");

    const auto theory = herald::theory_mode(exp);
    const auto detector = herald::DetectorModel::from_config(exp);
    const auto result = analysis::run_pipeline(frames, theory, detector, pipeline_settings(config));
    const auto& dist = result.tomography.photon_dist;

    const auto eig_path = out.track(files::eigenvalues);
    auto eig = open_for_write(eig_path);
    eig << "index,variance\n";
    for (std::size_t i = 0; i < result.pca.eigenvalues.size(); ++i) eig << i << ',' << result.pca.eigenvalues[i] << '\n';
    finish(eig, eig_path);

    const auto mode_path = out.track(files::mode);
    auto mode = open_for_write(mode_path);
    mode << "t_seconds,h_theory,h_estimated\n";
    for (std::size_t k = 0; k < theory.samples.size(); ++k)
        mode << static_cast<double>(k) * theory.dt << ',' << theory.samples[k] << ','
             << result.pca.principal_mode.samples[k] << '\n';
    finish(mode, mode_path);

    const auto hist = analysis::histogram(result.quadratures, config.analysis.histogram_bins,
                                          config.analysis.histogram_range);
    const auto hist_path = out.track(files::histogram);
    auto hcsv = open_for_write(hist_path);
    hcsv << "bin_center,count,analytic_density\n";
    for (std::size_t b = 0; b < hist.counts.size(); ++b)
        hcsv << hist.bin_centers[b] << ',' << hist.counts[b] << ',' << fock::fock_marginal(dist, hist.bin_centers[b])
             << '\n';
    finish(hcsv, hist_path);

    const double extent = config.analysis.wigner_extent;
    const auto grid = fock::wigner_of(dist, fock::GridSpec{-extent, extent, -extent, extent,
                                                           config.analysis.wigner_points,
                                                           config.analysis.wigner_points});
    const auto wig_path = out.track(files::wigner);
    auto wig = open_for_write(wig_path);
    wig << "x,p,w\n";
    for (std::size_t i = 0; i < grid.spec.nx; ++i)
        for (std::size_t jp = 0; jp < grid.spec.np; ++jp)
            wig << grid.x_at(i) << ',' << grid.p_at(jp) << ',' << grid.at(i, jp) << '\n';
    finish(wig, wig_path);

    const std::string json = build_report_json(config, result, utc_timestamp());
    const auto report_path = out.track(files::report);
    auto rep = open_for_write(report_path);
    rep << json;
    finish(rep, report_path);
    return json;
}

std::string report(const config::RunConfig& config, OutputTransaction& out) {
    const double total = budget::compose_losses(config.budget);
    const double naive = budget::naive_loss_sum(config.budget);
    const auto escape = budget::opo_escape_efficiency(config.opo.output_coupler, config.opo.round_trip_loss);

    const auto budget_path = out.track(files::budget);
    auto csv = open_for_write(budget_path);
    csv << "label,loss\n";
    for (const auto& e : config.budget.entries) csv << e.label << ',' << e.loss << '\n';
    csv << "total_naive_sum," << naive << '\n' << "total_multiplicative," << total << '\n';
    finish(csv, budget_path);

    std::ostringstream text;
    text.setf(std::ios::fixed);
    text.precision(1);
    text << "Loss budget\n";
    for (const auto& e : config.budget.entries) text << "  " << e.label << ": " << 100.0 * e.loss << "%\n";
    text << "  total (naive sum): " << 100.0 * naive << "%\n"
         << "  total (multiplicative): " << 100.0 * total << "%\n";
    text.precision(2);
    text << "OPO escape efficiency: " << 100.0 * escape.efficiency << "% (loss " << 100.0 * escape.loss << "%)\n";

    const fs::path report_path = out.dir() / files::report;
    if (fs::exists(report_path)) {
        std::ifstream in(report_path);
        const auto doc = nlohmann::json::parse(in, nullptr, false);
        if (doc.is_discarded()) throw IoError("cannot parse " + report_path.string());
        text.precision(4);
        text << "Tomography\n"
             << "  W(0,0) = " << doc.at("wigner_origin").get<double>() << " +/- "
             << doc.at("se").at("wigner_origin").get<double>() << "\n"
             << "  ground truth W(0,0) = " << doc.at("ground_truth").at("wigner_origin").get<double>() << "\n";
        const auto& p = doc.at("photon_dist");
        const auto& se = doc.at("se").at("photon_dist");
        for (std::size_t n = 0; n < std::min<std::size_t>(4, p.size()); ++n)
            text << "  p" << n << " = " << 100.0 * p[n].get<double>() << "% +/- " << 100.0 * se[n].get<double>()
                 << "%\n";
        text << "  mode match (squared overlap) = " << 100.0 * doc.at("mode_match").get<double>() << "%\n";
        if (doc.at("pca").at("undersampled").get<bool>())
            text << "warning: fewer than 10 x frame_len frames, the PCA covariance is undersampled\n";
        if (!doc.at("converged").get<bool>()) text << "warning: tomography did not reach tol within max_iter\n";
    }
    return text.str();
}

std::string run_experiment(const fs::path& config_path, const fs::path& out_dir, const Overrides& overrides) {
    const auto config = apply_overrides(config::load_config(config_path), overrides);
    config.experiment.validate();
    OutputTransaction out(out_dir);
    simulate(config, out);
    analyze(config, out.dir() / files::frames, out);
    std::string summary = report(config, out);
    out.commit();
    return summary;
}

}  // namespace hpl::experiment
