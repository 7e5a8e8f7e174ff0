#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "perimax/frechet.hpp"

namespace perimax {

enum class ProcessKind { iid, moving_maxima, armax };

std::string to_string(ProcessKind kind);
ProcessKind process_kind_from_string(const std::string& name);

// Which stationary underlying sequence {X_n} to simulate.
//
//   iid            independent draws from `dist`
//   moving_maxima  X_n = max(Z_n, Z_{n-1}) / 2 with Z i.i.d. unit Frechet;
//                  the two 1/2 coefficients are fixed
//   armax          X_n = t * max(X_{n-1}, W_n) with stationary marginal
//                  H = `dist` and innovation law L(x) = H(tx)/H(x)
struct ProcessConfig {
    ProcessKind kind = ProcessKind::iid;
    FrechetDist dist = unit_frechet();
    double t = 0.0; // armax only, in (0,1)

    void validate() const;

    // Exact marginal law of X_n.
    FrechetDist marginal() const;

    // Innovation law of the armax recursion: Frechet(alpha, scale*(t^-a - 1)^(1/a)).
    FrechetDist armax_innovation() const;

    // Extremal index of {X_n}: 1 (iid), 1/2 (moving maxima), 1 - t^alpha (armax).
    double theta_x() const;
};

inline ProcessConfig iid_process(FrechetDist dist = unit_frechet()) {
    return ProcessConfig{ProcessKind::iid, dist, 0.0};
}
inline ProcessConfig moving_maxima_process() {
    return ProcessConfig{ProcessKind::moving_maxima, unit_frechet(), 0.0};
}
inline ProcessConfig armax_process(double t, double alpha, double scale = 1.0) {
    return ProcessConfig{ProcessKind::armax, FrechetDist{alpha, scale}, t};
}

// One realised sample path X_0 .. X_n. Index 0 exists because the imputed
// model reads back to the first controlled observation.
struct ProcessPath {
    std::vector<double> values;
    ProcessConfig config;
    std::uint64_t seed = 0;

    std::size_t n() const { return values.size() - 1; }
};

ProcessPath generate_iid(std::size_t n, const FrechetDist& dist, std::uint64_t seed);
ProcessPath generate_moving_maxima(std::size_t n, std::uint64_t seed);
ProcessPath generate_armax(std::size_t n, double t, double alpha, std::uint64_t seed,
                           double scale = 1.0);
ProcessPath generate_path(const ProcessConfig& config, std::size_t n, std::uint64_t seed);

// Fills out[0..len] with X_0 .. X_len drawn from `rng`, without allocating.
// Draw order matches generate_path for a generator seeded the same way.
void generate_into(const ProcessConfig& config, std::span<double> out, Xoshiro256pp& rng);

// Appends X_{k+1} .. X_{target} to a partially generated path, consuming the
// same generator. Lets tail-heavy Monte Carlo events extend a short prefix
// only when the prefix already qualifies.
class PathGenerator {
  public:
    PathGenerator(const ProcessConfig& config, std::uint64_t seed);

    // Extends the internal path so that values 0..m are defined; returns the
    // full buffer (indices 0..m at least).
    const std::vector<double>& extend(std::size_t m);

    const std::vector<double>& values() const { return values_; }

  private:
    ProcessConfig config_;
    Xoshiro256pp rng_;
    std::vector<double> values_;
    double prev_innovation_ = 0.0; // Z_{k} for moving maxima
    FrechetDist innovation_{};
};

// Normalized level u_n with n * (1 - F_marg(u_n)) = tau_x exactly, through
// the closed-form marginal quantile.
double normalized_level(const ProcessConfig& config, std::size_t n, double tau_x);

} // namespace perimax
