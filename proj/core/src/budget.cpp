#include "hpl/budget.hpp"

#include <cmath>

#include "hpl/errors.hpp"

namespace hpl::budget {

LossBudget reference_loss_budget() {
    return LossBudget{{
        {"dark_count", 0.01},
        {"stray_count", 0.02},
        {"aopo_optical", 0.02},
        {"propagation", 0.03},
        {"hd_mode_mismatch", 0.02},
        {"hd_photodiode", 0.03},
        {"hd_circuit_noise", 0.01},
    }};
}

double compose_losses(const LossBudget& budget) {
    double transmission = 1.0;
    for (const auto& e : budget.entries) {
        if (!(e.loss >= 0.0 && e.loss < 1.0))
            throw DomainError("loss entry '" + e.label + "' = " + std::to_string(e.loss) + " is outside [0, 1)");
        transmission *= 1.0 - e.loss;
    }
    return 1.0 - transmission;
}

double naive_loss_sum(const LossBudget& budget) {
    double sum = 0.0;
    for (const auto& e : budget.entries) sum += e.loss;
    return sum;
}

EscapeEfficiency opo_escape_efficiency(double t_coupler, double round_trip_loss) {
    if (t_coupler == 0.0 && round_trip_loss == 0.0)
        throw DomainError("escape efficiency undefined for a lossless, closed cavity");
    if (!(t_coupler > 0.0 && t_coupler < 1.0)) throw DomainError("output coupler transmission must be in (0, 1)");
    if (!(round_trip_loss >= 0.0 && round_trip_loss < 1.0)) throw DomainError("round-trip loss must be in [0, 1)");
    const double eta = t_coupler / (t_coupler + round_trip_loss);
    return {eta, 1.0 - eta};
}

}  // namespace hpl::budget
