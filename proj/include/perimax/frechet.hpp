#pragma once

#include <cmath>
#include <string>

#include "perimax/errors.hpp"
#include "perimax/rng.hpp"

namespace perimax {

// Frechet distribution: cdf(x) = exp(-(x/scale)^-alpha) for x > 0.
// The only marginal family the toolkit ships; everything in the worked
// examples is Frechet or a power of one.
struct FrechetDist {
    double alpha = 1.0;
    double scale = 1.0;

    double cdf(double x) const {
        if (x <= 0.0) return 0.0;
        return std::exp(-tail_base(x));
    }

    // Survival function 1 - cdf, with expm1 for accuracy deep in the tail.
    double sf(double x) const {
        if (x <= 0.0) return 1.0;
        return -std::expm1(-tail_base(x));
    }

    // Closed-form inverse: Q(q) = scale * (-log q)^(-1/alpha), q in (0,1).
    double quantile(double q) const {
        if (!(q > 0.0 && q < 1.0))
            throw config_error("Frechet quantile requires q in (0,1), got " + std::to_string(q));
        const double l = -std::log(q);
        if (alpha == 1.0) return scale / l;
        return scale * std::pow(l, -1.0 / alpha);
    }

    double sample(Xoshiro256pp& rng) const { return quantile(rng.next_unit()); }

    void validate() const {
        if (!(alpha > 0.0)) throw config_error("Frechet shape alpha must be positive");
        if (!(scale > 0.0)) throw config_error("Frechet scale must be positive");
    }

  private:
    double tail_base(double x) const {
        if (alpha == 1.0) return scale / x;
        return std::pow(x / scale, -alpha);
    }
};

inline FrechetDist unit_frechet() { return FrechetDist{1.0, 1.0}; }

} // namespace perimax
