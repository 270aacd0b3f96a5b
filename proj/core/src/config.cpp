#include "hpl/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "hpl/errors.hpp"

namespace hpl::config {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
    const char* begin = text.data();
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

using Setter = std::function<bool(RunConfig&, std::string_view)>;

template <typename T, typename Field>
Setter number_setter(Field field) {
    return [field](RunConfig& c, std::string_view v) {
        T value{};
        if (!parse_number(v, value)) return false;
        field(c) = value;
        return true;
    };
}

struct KeySpec {
    const char* name;
    bool required;
    Setter set;
    std::function<std::string(const RunConfig&)> get;
};

#define HPL_DOUBLE(key, req, expr)                                                             \
    KeySpec {                                                                                  \
        key, req, number_setter<double>([](RunConfig& c) -> double& { return c.expr; }),      \
            [](const RunConfig& c) { return format_double(c.expr); }                           \
    }
#define HPL_INT(key, req, type, expr)                                                          \
    KeySpec {                                                                                  \
        key, req, number_setter<type>([](RunConfig& c) -> type& { return c.expr; }),          \
            [](const RunConfig& c) { return std::to_string(c.expr); }                          \
    }

const std::vector<KeySpec>& key_specs() {
    static const std::vector<KeySpec> specs = {
        HPL_DOUBLE("opo_hwhm", true, experiment.opo_hwhm),
        HPL_DOUBLE("fc_hwhm", true, experiment.fc_hwhm),
        HPL_DOUBLE("fbg_hwhm", true, experiment.fbg_hwhm),
        HPL_DOUBLE("hpf_cutoff", true, experiment.hpf_cutoff),
        HPL_DOUBLE("lpf_cutoff", true, experiment.lpf_cutoff),
        HPL_DOUBLE("dt", true, experiment.dt),
        HPL_INT("frame_len", true, std::size_t, experiment.frame_len),
        HPL_DOUBLE("total_cps", true, experiment.total_cps),
        HPL_DOUBLE("dark_cps", true, experiment.dark_cps),
        HPL_DOUBLE("stray_cps", true, experiment.stray_cps),
        HPL_DOUBLE("optical_loss", true, experiment.optical_loss),
        HPL_DOUBLE("two_photon_weight", true, experiment.two_photon_weight),
        HPL_DOUBLE("three_photon_weight", true, experiment.three_photon_weight),
        HPL_DOUBLE("electronic_noise_rel", true, experiment.electronic_noise_rel),
        HPL_INT("n_frames", true, std::size_t, experiment.n_frames),
        HPL_INT("seed", true, std::uint64_t, experiment.seed),
        HPL_INT("n_max", false, int, analysis.n_max),
        HPL_INT("max_iter", false, int, analysis.max_iter),
        HPL_DOUBLE("tol", false, analysis.tol),
        HPL_INT("bootstrap_replicates", false, int, analysis.bootstrap_replicates),
        HPL_INT("histogram_bins", false, std::size_t, analysis.histogram_bins),
        HPL_DOUBLE("histogram_range", false, analysis.histogram_range),
        HPL_DOUBLE("wigner_extent", false, analysis.wigner_extent),
        HPL_INT("wigner_points", false, std::size_t, analysis.wigner_points),
        HPL_DOUBLE("opo_output_coupler", false, opo.output_coupler),
        HPL_DOUBLE("opo_round_trip_loss", false, opo.round_trip_loss),
    };
    return specs;
}

#undef HPL_DOUBLE
#undef HPL_INT

constexpr std::string_view kLossPrefix = "loss.";

void validate_analysis(const RunConfig& c, std::vector<std::string>& bad, std::ostringstream& why) {
    auto require = [&](bool ok, const char* key, const char* rule) {
        if (!ok) {
            bad.emplace_back(key);
            why << "\n  " << key << ": " << rule;
        }
    };
    const auto& a = c.analysis;
    require(a.n_max >= 3 && a.n_max <= fock::kMaxOrder, "n_max", "must be in [3, 60]");
    require(a.max_iter >= 1, "max_iter", "must be >= 1");
    require(a.tol > 0.0, "tol", "must be > 0");
    require(a.bootstrap_replicates >= 50, "bootstrap_replicates", "must be >= 50");
    require(a.histogram_bins >= 1, "histogram_bins", "must be >= 1");
    require(a.histogram_range > 0.0, "histogram_range", "must be > 0");
    require(a.wigner_extent > 0.0, "wigner_extent", "must be > 0");
    require(a.wigner_points >= 1, "wigner_points", "must be >= 1");
    require(c.opo.output_coupler > 0.0 && c.opo.output_coupler < 1.0, "opo_output_coupler", "must be in (0, 1)");
    require(c.opo.round_trip_loss >= 0.0 && c.opo.round_trip_loss < 1.0, "opo_round_trip_loss", "must be in [0, 1)");
    for (const auto& e : c.budget.entries) {
        if (!(e.loss >= 0.0 && e.loss < 1.0)) {
            bad.push_back(std::string(kLossPrefix) + e.label);
            why << "\n  " << kLossPrefix << e.label << ": must be in [0, 1)";
        }
    }
}

}  // namespace

const std::vector<std::string>& required_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        for (const auto& k : key_specs())
            if (k.required) out.emplace_back(k.name);
        return out;
    }();
    return keys;
}

RunConfig parse_config(std::string_view text) {
    RunConfig config;
    std::vector<std::string> bad;
    std::ostringstream why;
    std::set<std::string> seen;
    budget::LossBudget file_budget;

    std::map<std::string_view, const KeySpec*> by_name;
    for (const auto& k : key_specs()) by_name.emplace(k.name, &k);

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            bad.push_back("line " + std::to_string(line_no));
            why << "\n  line " << line_no << ": expected 'key = value'";
            continue;
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (!seen.insert(key).second) {
            bad.push_back(key);
            why << "\n  " << key << ": duplicated on line " << line_no;
            continue;
        }
        if (key.starts_with(kLossPrefix) && key.size() > kLossPrefix.size()) {
            double loss = 0.0;
            if (!parse_number(value, loss)) {
                bad.push_back(key);
                why << "\n  " << key << ": '" << value << "' is not a number";
                continue;
            }
            file_budget.entries.push_back({key.substr(kLossPrefix.size()), loss});
            continue;
        }
        const auto it = by_name.find(key);
        if (it == by_name.end()) {
            bad.push_back(key);
            why << "\n  " << key << ": unknown key";
            continue;
        }
        if (!it->second->set(config, value)) {
            bad.push_back(key);
            why << "\n  " << key << ": '" << value << "' is not a plain number in base units";
        }
    }
    for (const auto& k : key_specs()) {
        if (k.required && !seen.contains(k.name)) {
            bad.emplace_back(k.name);
            why << "\n  " << k.name << ": required key missing";
        }
    }
    if (!file_budget.entries.empty()) config.budget = std::move(file_budget);
    if (bad.empty()) {
        try {
            config.experiment.validate();
        } catch (const ConfigError& e) {
            bad = e.keys();
            const std::string_view detail(e.what());
            why << detail.substr(detail.find(':') + 1);
        }
        validate_analysis(config, bad, why);
    }
    if (!bad.empty()) throw ConfigError(std::move(bad), "configuration errors:" + why.str());
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({}, "cannot read config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string format_config(const RunConfig& config) {
    std::ostringstream out;
    for (const auto& k : key_specs()) out << k.name << " = " << k.get(config) << '\n';
    for (const auto& e : config.budget.entries) out << kLossPrefix << e.label << " = " << format_double(e.loss) << '\n';
    return out.str();
}

}  // namespace hpl::config
