#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "perimax/theory.hpp"

namespace perimax {

// Anti-clustering quantities traced over an n-grid. All levels u_n are the
// normalized levels for the supplied tau_x; k_n = floor(sqrt(n)); r_n =
// floor(n / (k_n T)).
//
//   dts_local      n (1/T) sum_i P(Y_i > u >= max Y_{i+1..i+s-1},
//                                  max Y_{i+s .. r_n T} > u),
//                  the local condition sum for the imputed sequence
//   gap_separated  n P(max X_0..X_T > u >= X_{T+1}, max X_{T+2..r_n T+T} > u),
//                  an early exceedance of the underlying sequence, a
//                  separating drop, then a far exceedance; its vanishing
//                  certifies the s = T+1 local condition for Y
//   gap_joint      n P(max X_0..X_T > u, max X_{T+1..r_n T+T} > u), the same
//                  without the separating drop; certifies s = T
//   d22_counter    n P(Y_1 > u >= Y_2, max Y_3 .. r_n T > u), the quantity
//                  quoted against the s = 2 condition for moving maxima
enum class ConditionKind { dts_local, gap_separated, gap_joint, d22_counter };

std::string to_string(ConditionKind kind);
ConditionKind condition_kind_from_string(const std::string& name);

struct ConditionPoint {
    std::size_t n = 0;
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t k_n = 0;
    std::size_t reps = 0;
    // True when the event never fired; estimate is 0 and std_error then
    // carries the rule-of-three 95% upper bound n * 3 / reps.
    bool zero_events = false;
};

struct ConditionTrace {
    ConditionKind condition = ConditionKind::gap_separated;
    ModelConfig model;
    double tau_x = 20.0;
    int s = 0; // dts_local only
    std::string k_rule = "floor(sqrt(n))";
    std::vector<ConditionPoint> points;
};

struct ConditionOptions {
    double tau_x = 20.0;
    int s = 0; // dts_local: 0 means T+1
    std::uint64_t seed = 1;
    int threads = 0;
    // reps(n) = max(min_reps, ceil(reps_per_n * n)); the per-point cost stays
    // roughly flat because the event prefix almost always fails early.
    double reps_per_n = 150.0;
    std::size_t min_reps = 200'000;
};

ConditionPoint estimate_condition_point(ConditionKind kind, const ModelConfig& model,
                                        std::size_t n, std::size_t reps, double tau_x, int s,
                                        std::uint64_t seed, int threads);

ConditionTrace condition_trace(ConditionKind kind, const ModelConfig& model,
                               std::span<const std::size_t> n_grid,
                               const ConditionOptions& options);

enum class Verdict { vanishing, non_vanishing, inconclusive };

std::string to_string(Verdict verdict);

// Heuristic trend classification of a trace:
//   vanishing      last < 0.1 * first and monotone non-increasing within 2 se
//   non-vanishing  last > 0.5 * tau with last se < 0.1 * tau
//   inconclusive   otherwise
// The 0.1x and 0.5 tau thresholds are toolkit conventions, not limits proved
// anywhere; the trace itself is always exported for inspection.
Verdict trend_report(const ConditionTrace& trace, double tau);

// CSV with columns: n, estimate, std_error, k_n, tau, condition, s.
void write_trace_csv(std::ostream& out, const ConditionTrace& trace);

// Both sides of the block-tail identity
//   P(Y_T > u, max Y_{T+1..2T} <= u) = p^(T-1) P(X_T > u, max X_{T+1..2T} <= u),
// estimated on coupled replications (same X, same U). The identity is exact
// at every level, not only asymptotically.
struct TailIdentityResult {
    double lhs = 0.0;        // P(Y_T > u, max Y <= u)
    double rhs = 0.0;        // P(X_T > u, max X <= u)
    double rhs_scaled = 0.0; // p^(T-1) * rhs
    double gap = 0.0;        // lhs - rhs_scaled
    double std_error = 0.0;  // of the gap, from the coupled counts
    double studentized = 0.0;
    std::size_t reps = 0;
};

TailIdentityResult tail_identity_check(const ModelConfig& model, double level, std::size_t reps,
                            std::uint64_t seed, int threads = 0);

} // namespace perimax
