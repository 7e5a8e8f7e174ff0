#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "perimax/process.hpp"

namespace perimax {

// A fully specified imputation model: underlying process, control period T,
// availability probability p.
struct ModelConfig {
    ProcessConfig process;
    int period = 2;
    double p = 0.5;

    void validate() const;
};

// Probability that an entire control block stagnates, i.e. all T-1
// observations after a control index equal the control value: (1-p)^(T-1).
double stagnation_probability(double p, int period);

// Joint cdf P(X_i <= x for all i in `indices`) at a common level x.
// Indices must be non-negative and strictly increasing.
//   iid            F(x)^m
//   moving maxima  F_Z(2x)^(# distinct innovations touched)
//   armax          backward recursion over the Markov chain: the bound at
//                  index k propagates to index k-1 and to W_k as bound/t
double joint_cdf_common_level(const ProcessConfig& config, std::span<const std::size_t> indices,
                              double x);

// G_j of the marginal mixture: the law of the imputation window maximum
// max{ U_i X_i : floor((j-1)/T)T <= i <= j-1 } for 2 <= j <= T-1, evaluated
// by enumerating the availability subsets S of {1..j-1} with weight
// p^|S| (1-p)^(j-1-|S|) times the joint cdf on {0} union S.
double imputation_window_cdf(const ModelConfig& model, int j, double x);

// Marginal cdf of Y_{kT+j}: F(x) for j in {0,1}, p F(x) + (1-p) G_j(x) for
// j in {2..T-1}.
double marginal_cdf_fj(const ModelConfig& model, int j, double x);

// tau bookkeeping: with n(1 - F(u_n)) -> tau_x and n(1 - G_j(u_n)) -> tau_j,
// the combined rate is
//   tau = [((T-2)p + 2) tau_x + (1-p) sum_j tau_j] / T,
// and tau = tau_x when T = 2.
struct TauDecomposition {
    double tau_x = 0.0;
    std::vector<double> tau_j; // entries for j = 2 .. T-1 (empty when T = 2)
    double tau = 0.0;
};

TauDecomposition tau_combined(double p, int period, double tau_x, std::span<const double> tau_j);

// Worked-example limits of n(1 - G_2(u_n)).
double tau_j2_armax_t3(double tau_x, double p, double theta_x); // tau_x (1 + p theta_x)
double tau_j2_iid_t3(double tau_x, double p);                   // tau_x (1 + p)

// Limit tau_j values computed from the exact G_j cdfs on an n-grid
// extrapolation-free: evaluated at a single large n (the limits are
// approached at rate O(1/n)).
TauDecomposition tau_for_model(const ModelConfig& model, double tau_x,
                               std::size_t n = 1'000'000);

// Extremal index of the imputed sequence, in closed form, for the supported
// (process, T) pairs:
//   moving maxima, T=2   1/2 for every p
//   armax,         T=2   theta_x + theta_x^2 (p-1)/2
//   armax,         T=3   [3 th + th^2 (-3+4p-p^2) + th^3 (1-p)^2] / [3 + p(1-p) th]
//   iid,           T=3   (1+2p) / (3 + p(1-p))
// Throws unsupported_error naming the Monte Carlo fallback otherwise.
double theta_y_closed_form(const ModelConfig& model);
bool theta_y_closed_form_supported(const ModelConfig& model);

// Recombination of the moving-maxima T=2 extremal index from its block-tail
// pieces: theta = (p^2+p)/4 + (1/(2 tau)) P_12 with
//   P_12 = (tau/2) p(1-p) + tau (1-p)^2 + tau p(1-p).
// Algebraically identical to 1/2 for every p; kept as a self-check of the
// three tail limits feeding P_12.
double theta_y_mm_t2_recombined(double p);

// Tail limits of the armax example (theta_x = 1 - t^alpha):
//   h_gap(j):   lim n (H(u/t^{j+1}) - H(u))      = tau_x theta_x (1 + t^a + ... + t^{ja})
//   l_power(j): lim n (1 - L(u/t^j))             = t^{(j-1)a} tau_x theta_x
//   l_mixed(j): lim n (1 - L^j(u/t) L(u/t^2))    = tau_x theta_x (j + t^a)
enum class ArmaxTailKind { h_gap, l_power, l_mixed };

double armax_tail_limit(ArmaxTailKind kind, int j, double tau_x, double theta_x, double alpha,
                        double t);

// Finite-n evaluation of the same tail quantities from the exact H and L
// cdfs, for numeric convergence checks against armax_tail_limit.
double armax_tail_finite_n(ArmaxTailKind kind, int j, std::size_t n, double tau_x, double alpha,
                           double t);

} // namespace perimax
