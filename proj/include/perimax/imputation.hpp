#pragma once

#include <cstdint>
#include <vector>

#include "perimax/process.hpp"

namespace perimax {

// Availability mask U_0 .. U_n: U_{kT} = 1 always (the periodic control),
// every other entry an independent Bernoulli(p) draw.
struct ControlMask {
    std::vector<std::uint8_t> u;
    int period = 2;
    double p = 0.5;
    std::uint64_t seed = 0;

    std::size_t n() const { return u.size() - 1; }
};

// T = 1 would mean no data can ever be missing and is rejected.
ControlMask generate_mask(std::size_t n, int period, double p, std::uint64_t seed);

// All-available mask of the same shape (the p -> 1 degenerate case).
ControlMask full_mask(std::size_t n, int period);

// The imputed sequence Y_1 .. Y_n:
//
//   Y_k = X_k                                      if U_k = 1
//   Y_k = max{ X_i : lo <= i <= k-1, U_i = 1 }     if U_k = 0,
//
// with lo = floor((k-1)/T) * T, the latest controlled index. The window is
// never empty because U_lo = 1. Index 0 belongs to X and U only.
struct ImputedSeries {
    ProcessPath x;
    ControlMask mask;
    std::vector<double> y;              // y[0] unused
    std::vector<std::uint8_t> imputed;  // imputed[k] = 1 - U_k, imputed[0] unused

    std::size_t n() const { return y.size() - 1; }
    int period() const { return mask.period; }
    double p() const { return mask.p; }
};

ImputedSeries impute(const ProcessPath& x, const ControlMask& mask);

// Number of whole blocks usable by the block estimators: floor((n+1)/T) - 1.
std::size_t block_count(std::size_t n, int period);

// Stagnation indicator for block s >= 1: all of Y_{sT+1} .. Y_{sT+T-1}
// exactly equal to Y_{sT}. Imputed values are bitwise copies of stored X
// values, so equality comparison is exact by construction.
bool stagnation_indicator(const ImputedSeries& series, std::size_t s);

// The block-s event "every non-control observation was imputed", i.e.
// U_{sT+j} = 0 for all j = 1..T-1. Coincides with the value-equality event
// almost surely whenever distinct indices of X never tie; differs for
// processes with structural repeats (moving maxima repeats the shared
// innovation with probability 1/3 at adjacent indices).
bool stagnation_indicator_mask(const ImputedSeries& series, std::size_t s);

} // namespace perimax
