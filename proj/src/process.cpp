#include "perimax/process.hpp"

#include <cmath>

#include "perimax/errors.hpp"

namespace perimax {

std::string to_string(ProcessKind kind) {
    switch (kind) {
        case ProcessKind::iid: return "iid";
        case ProcessKind::moving_maxima: return "mm";
        case ProcessKind::armax: return "armax";
    }
    return "?";
}

ProcessKind process_kind_from_string(const std::string& name) {
    if (name == "iid") return ProcessKind::iid;
    if (name == "mm" || name == "moving_maxima") return ProcessKind::moving_maxima;
    if (name == "armax") return ProcessKind::armax;
    throw config_error("unknown process kind '" + name + "' (expected iid|mm|armax)");
}

void ProcessConfig::validate() const {
    dist.validate();
    if (kind == ProcessKind::armax && !(t > 0.0 && t < 1.0))
        throw config_error("armax requires t in (0,1), got " + std::to_string(t));
    if (kind == ProcessKind::moving_maxima && (dist.alpha != 1.0 || dist.scale != 1.0))
        throw config_error("moving maxima innovations are fixed to unit Frechet");
}

FrechetDist ProcessConfig::marginal() const {
    switch (kind) {
        case ProcessKind::iid: return dist;
        // max(Z_n, Z_{n-1})/2 of unit Frechet innovations is unit Frechet:
        // F_Z(2x)^2 = exp(-2/(2x)) = exp(-1/x).
        case ProcessKind::moving_maxima: return unit_frechet();
        case ProcessKind::armax: return dist; // stationary marginal H by construction
    }
    return dist;
}

FrechetDist ProcessConfig::armax_innovation() const {
    if (kind != ProcessKind::armax) throw config_error("innovation law is armax-only");
    // L(x) = H(tx)/H(x) = exp(-(t^-a - 1)(x/scale)^-a).
    const double a = dist.alpha;
    const double w_scale = dist.scale * std::pow(std::pow(t, -a) - 1.0, 1.0 / a);
    return FrechetDist{a, w_scale};
}

double ProcessConfig::theta_x() const {
    switch (kind) {
        case ProcessKind::iid: return 1.0;
        case ProcessKind::moving_maxima: return 0.5;
        case ProcessKind::armax: return 1.0 - std::pow(t, dist.alpha);
    }
    return 1.0;
}

namespace {

void require_positive_length(std::size_t n) {
    if (n < 1) throw config_error("path length n must be at least 1");
}

} // namespace

ProcessPath generate_iid(std::size_t n, const FrechetDist& dist, std::uint64_t seed) {
    require_positive_length(n);
    dist.validate();
    ProcessPath path{{}, iid_process(dist), seed};
    path.values.resize(n + 1);
    Xoshiro256pp rng(seed);
    for (auto& v : path.values) v = dist.sample(rng);
    return path;
}

ProcessPath generate_moving_maxima(std::size_t n, std::uint64_t seed) {
    require_positive_length(n);
    ProcessPath path{{}, moving_maxima_process(), seed};
    path.values.resize(n + 1);
    Xoshiro256pp rng(seed);
    const FrechetDist z = unit_frechet();
    double prev = z.sample(rng); // Z_{-1}, kept internal
    for (auto& v : path.values) {
        const double cur = z.sample(rng);
        v = 0.5 * std::max(cur, prev);
        prev = cur;
    }
    return path;
}

ProcessPath generate_armax(std::size_t n, double t, double alpha, std::uint64_t seed,
                           double scale) {
    require_positive_length(n);
    ProcessConfig config = armax_process(t, alpha, scale);
    config.validate();
    ProcessPath path{{}, config, seed};
    path.values.resize(n + 1);
    Xoshiro256pp rng(seed);
    const FrechetDist innovation = config.armax_innovation();
    // X_0 drawn exactly from H, so the chain is stationary from index 0.
    path.values[0] = config.dist.sample(rng);
    for (std::size_t k = 1; k <= n; ++k) {
        const double w = innovation.sample(rng);
        path.values[k] = t * std::max(path.values[k - 1], w);
    }
    return path;
}

ProcessPath generate_path(const ProcessConfig& config, std::size_t n, std::uint64_t seed) {
    config.validate();
    switch (config.kind) {
        case ProcessKind::iid: return generate_iid(n, config.dist, seed);
        case ProcessKind::moving_maxima: return generate_moving_maxima(n, seed);
        case ProcessKind::armax:
            return generate_armax(n, config.t, config.dist.alpha, seed, config.dist.scale);
    }
    throw config_error("invalid process kind");
}

void generate_into(const ProcessConfig& config, std::span<double> out, Xoshiro256pp& rng) {
    switch (config.kind) {
        case ProcessKind::iid:
            for (auto& v : out) v = config.dist.sample(rng);
            return;
        case ProcessKind::moving_maxima: {
            const FrechetDist z = unit_frechet();
            double prev = z.sample(rng);
            for (auto& v : out) {
                const double cur = z.sample(rng);
                v = 0.5 * std::max(cur, prev);
                prev = cur;
            }
            return;
        }
        case ProcessKind::armax: {
            const FrechetDist innovation = config.armax_innovation();
            out[0] = config.dist.sample(rng);
            for (std::size_t k = 1; k < out.size(); ++k)
                out[k] = config.t * std::max(out[k - 1], innovation.sample(rng));
            return;
        }
    }
    throw config_error("invalid process kind");
}

PathGenerator::PathGenerator(const ProcessConfig& config, std::uint64_t seed)
    : config_(config), rng_(seed) {
    config_.validate();
    if (config_.kind == ProcessKind::armax) innovation_ = config_.armax_innovation();
    values_.reserve(64);
    switch (config_.kind) {
        case ProcessKind::iid:
            values_.push_back(config_.dist.sample(rng_));
            break;
        case ProcessKind::moving_maxima: {
            prev_innovation_ = unit_frechet().sample(rng_); // Z_{-1}
            const double z0 = unit_frechet().sample(rng_);
            values_.push_back(0.5 * std::max(z0, prev_innovation_));
            prev_innovation_ = z0;
            break;
        }
        case ProcessKind::armax:
            values_.push_back(config_.dist.sample(rng_));
            break;
    }
}

const std::vector<double>& PathGenerator::extend(std::size_t m) {
    while (values_.size() <= m) {
        switch (config_.kind) {
            case ProcessKind::iid:
                values_.push_back(config_.dist.sample(rng_));
                break;
            case ProcessKind::moving_maxima: {
                const double z = unit_frechet().sample(rng_);
                values_.push_back(0.5 * std::max(z, prev_innovation_));
                prev_innovation_ = z;
                break;
            }
            case ProcessKind::armax: {
                const double w = innovation_.sample(rng_);
                values_.push_back(config_.t * std::max(values_.back(), w));
                break;
            }
        }
    }
    return values_;
}

double normalized_level(const ProcessConfig& config, std::size_t n, double tau_x) {
    config.validate();
    if (!(tau_x > 0.0) || tau_x >= static_cast<double>(n))
        throw config_error("normalized level requires 0 < tau_x < n");
    return config.marginal().quantile(1.0 - tau_x / static_cast<double>(n));
}

} // namespace perimax
