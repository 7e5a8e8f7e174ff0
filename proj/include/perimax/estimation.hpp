#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "perimax/imputation.hpp"
#include "perimax/theory.hpp"

namespace perimax {

// How the per-block stagnation event is detected when estimating p.
//
//   value_equality   the estimator's literal definition: exact equality of
//                    Y_{sT+j} with Y_{sT} across the block
//   imputation_mask  the all-imputed event U_{sT+j} = 0 for all j; identical
//                    almost surely for processes without structural value
//                    repeats, robust for those with them (moving maxima)
enum class StagnationRule { value_equality, imputation_mask };

std::string to_string(StagnationRule rule);
StagnationRule stagnation_rule_from_string(const std::string& name);

// p estimated from the stagnation frequency:
//   p_hat = 1 - (indicator_sum / m)^(1/(T-1)),  m = floor((n+1)/T) - 1.
// Boundary values 0 and 1 are possible on finite samples and returned as-is.
struct PHatResult {
    std::size_t block_count = 0;
    std::size_t indicator_sum = 0;
    double p_hat = 0.0;
};

PHatResult estimate_p(const ImputedSeries& series,
                      StagnationRule rule = StagnationRule::value_equality);

struct FrequencyResult {
    double frequency = 0.0;
    double std_error = 0.0;
    std::size_t blocks = 0;
};

// Raw stagnation frequency with its binomial standard error.
FrequencyResult stagnation_frequency(const ImputedSeries& series,
                                     StagnationRule rule = StagnationRule::value_equality);

// Right-continuous empirical distribution function built only from the
// control-time observations { Y_{sT} = X_{sT} : s >= 1 }.
class EmpiricalCdf {
  public:
    explicit EmpiricalCdf(std::vector<double> data);

    double operator()(double x) const;
    std::size_t size() const { return data_.size(); }
    const std::vector<double>& sorted_data() const { return data_; }

  private:
    std::vector<double> data_;
};

EmpiricalCdf ecdf_from_controls(const ImputedSeries& series);

enum class ThetaMethod { runs, plugin, closed_form };

std::string to_string(ThetaMethod method);

struct ThetaEstimate {
    ThetaMethod method = ThetaMethod::runs;
    double level = 0.0;
    int run_length_or_s = 0;
    double value = 0.0;
    double std_error = 0.0;
    std::size_t exceedance_count = 0;
    std::size_t cluster_count = 0;
};

// Runs declustering: theta_hat = (#clusters) / (#exceedances), where a new
// cluster starts when an exceedance is preceded by at least `run_length`
// consecutive non-exceedances. The default run length elsewhere is T+1.
ThetaEstimate runs_extremal_index(std::span<const double> values, double level, int run_length);

// Accumulates cluster/exceedance counts over replicated paths; the pooled
// ratio is the estimate, with a ratio-estimator standard error.
class RunsAccumulator {
  public:
    explicit RunsAccumulator(int run_length) : run_length_(run_length) {}

    void add_path(std::span<const double> values, double level);
    ThetaEstimate result(double level) const;
    std::size_t exceedances() const { return total_exceedances_; }

  private:
    int run_length_;
    std::size_t total_exceedances_ = 0;
    std::size_t total_clusters_ = 0;
    std::vector<std::size_t> per_path_exceedances_;
    std::vector<std::size_t> per_path_clusters_;
};

// Monte Carlo plug-in estimate of the extremal index at a fixed large n:
//
//   theta_hat = (n / (tau T)) * sum_{i=1..T} P(Y_i > u_n >= max Y_{i+1..i+s-1})
//
// with u_n the normalized level for tau_x and tau the combined rate of the
// periodic marginals. Replications simulate only the first T+s-1 values.
struct PluginOptions {
    std::size_t n = 10'000;
    double tau_x = 20.0;
    int s = 0; // 0 means T+1
    std::size_t reps = 2'000'000;
    std::uint64_t seed = 0; // 0 lets theta_compare derive one from its master seed
    int threads = 0;
};

ThetaEstimate plugin_theta(const ModelConfig& model, const PluginOptions& options);

} // namespace perimax
