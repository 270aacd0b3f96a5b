#pragma once

#include <string>
#include <vector>

namespace hpl::budget {

struct LossEntry {
    std::string label;
    double loss = 0.0;  // fraction in [0, 1)
};

enum class Composition { multiplicative };

struct LossBudget {
    std::vector<LossEntry> entries;
    Composition composition = Composition::multiplicative;
};

/// The seven-row loss budget of the telecom single-photon experiment
/// (dark and stray counts as loss equivalents, AOPO, propagation, HD).
LossBudget reference_loss_budget();

/// 1 - prod_i (1 - L_i). Throws DomainError for an entry outside [0, 1).
double compose_losses(const LossBudget& budget);

/// Plain sum of the entries, the small-loss approximation.
double naive_loss_sum(const LossBudget& budget);

struct EscapeEfficiency {
    double efficiency = 0.0;
    double loss = 0.0;
};

/// eta = T / (T + l) for output-coupler transmission T and round-trip loss l.
/// Throws DomainError for T outside (0, 1), l outside [0, 1).
EscapeEfficiency opo_escape_efficiency(double t_coupler, double round_trip_loss);

}  // namespace hpl::budget
