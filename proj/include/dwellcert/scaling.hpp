#pragma once

// Search for diagonal rescalings D_i of the eigenvector matrices and dwell
// witnesses eta such that ||D_s^-1 P_(r,s) D_r e^{J_r eta}|| < 1 on every edge.

#include "dwellcert/certify.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace dwellcert {

/// D_i = diag(exp(log_diagonals[i-1])). Entries belonging to one complex or
/// defective block must be equal so that P_i D_i is still a Jordan basis.
struct ScalingAssignment {
    std::vector<Vector> log_diagonals;
    EtaMap etas;
};

[[nodiscard]] ScalingAssignment identity_assignment(const SwitchedSystem& system, double eta);

struct SearchConfig {
    int restarts = 64;
    int max_iterations = 2000;
    Interval eta_range{1e-3, 40.0};  // kept below the default certify tMax
    double log_diag_range = 12.0;  // symmetric bound on every log-diagonal entry
    double margin = 1e-3;
    std::uint64_t seed = 0;
};

enum class SearchStatus { Feasible, InfeasibleWithinBudget };

[[nodiscard]] const char* to_string(SearchStatus s) noexcept;

struct SearchResult {
    SearchStatus status = SearchStatus::InfeasibleWithinBudget;
    /// Relative to normalized(system); present whenever a finite objective was reached.
    std::optional<ScalingAssignment> assignment;
    double objective = 0.0;     // max over edges of ln of the scaled edge norm
    std::vector<double> trace;  // best objective per restart
    /// fold(normalized(system), assignment) for Feasible results.
    std::optional<SwitchedSystem> folded;
};

/// Copy of `system` with unit-norm eigenvector columns (per block).
[[nodiscard]] SwitchedSystem normalized(const SwitchedSystem& system);

/// max over edges of ln ||D_s^-1 P_(r,s) D_r e^{J_r eta}||; negative iff every
/// inequality holds strictly.
[[nodiscard]] double scaled_objective(const SwitchedSystem& system, const ScalingAssignment& assignment);

/// Seeded multi-start Nelder-Mead over log-diagonals and log-etas with the
/// first log-diagonal entry of vertex 1 fixed at zero. InfeasibleWithinBudget
/// does not prove infeasibility.
[[nodiscard]] SearchResult search(const SwitchedSystem& system, const SearchConfig& config = {});

/// Replaces every P_i by P_i D_i. Throws InfeasibleAssignment unless the
/// assignment's objective is negative.
[[nodiscard]] SwitchedSystem fold(const SwitchedSystem& system, const ScalingAssignment& assignment);

}  // namespace dwellcert
