#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace perimax {

// Mean / sample sd / bias / rmse of a replication batch, accumulated in
// index order so results are identical no matter how the batch was produced.
struct SummaryStats {
    double mean = 0.0;
    double bias = 0.0;
    double sd = 0.0;
    double rmse = 0.0;
    std::size_t reps = 0;
};

inline SummaryStats summarize(std::span<const double> xs, double target) {
    SummaryStats s;
    s.reps = xs.size();
    if (xs.empty()) return s;
    double sum = 0.0;
    for (double x : xs) sum += x;
    s.mean = sum / static_cast<double>(xs.size());
    double ss = 0.0, se2 = 0.0;
    for (double x : xs) {
        const double d = x - s.mean;
        ss += d * d;
        const double e = x - target;
        se2 += e * e;
    }
    s.bias = s.mean - target;
    s.sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
    s.rmse = std::sqrt(se2 / static_cast<double>(xs.size()));
    return s;
}

// Standard error of a binomial proportion.
inline double binomial_se(double freq, std::size_t trials) {
    if (trials == 0) return 0.0;
    return std::sqrt(freq * (1.0 - freq) / static_cast<double>(trials));
}

// One-sample Kolmogorov-Smirnov statistic against a reference cdf.
// Sorts a copy of the data.
inline double ks_statistic(std::span<const double> sample,
                           const std::function<double(double)>& cdf) {
    std::vector<double> xs(sample.begin(), sample.end());
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max(d, std::max((static_cast<double>(i) + 1.0) / n - f,
                                 f - static_cast<double>(i) / n));
    }
    return d;
}

// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic_two_sample(std::span<const double> a, std::span<const double> b) {
    std::vector<double> xs(a.begin(), a.end());
    std::vector<double> ys(b.begin(), b.end());
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    const double na = static_cast<double>(xs.size());
    const double nb = static_cast<double>(ys.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < xs.size() && j < ys.size()) {
        const double x = std::min(xs[i], ys[j]);
        while (i < xs.size() && xs[i] <= x) ++i;
        while (j < ys.size() && ys[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

// Asymptotic one-sample KS critical value at the 1% level: 1.628 / sqrt(n).
inline double ks_critical_1pct(std::size_t n) {
    return 1.628 / std::sqrt(static_cast<double>(n));
}

// Two-sample analogue at the 1% level.
inline double ks_critical_1pct_two_sample(std::size_t na, std::size_t nb) {
    const double m = static_cast<double>(na), n = static_cast<double>(nb);
    return 1.628 * std::sqrt((m + n) / (m * n));
}

// Pearson correlation of two equal-length samples.
inline double correlation(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = std::min(a.size(), b.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    return sab / std::sqrt(saa * sbb);
}

} // namespace perimax
