#include <doctest.h>

#include <cmath>
#include <vector>

#include "perimax/errors.hpp"
#include "perimax/rng.hpp"
#include "perimax/theory.hpp"

using namespace perimax;

namespace {

// Monte Carlo oracle for joint cdfs at a common level.
double mc_joint_cdf(const ProcessConfig& config, const std::vector<std::size_t>& indices,
                    double x, std::size_t reps, std::uint64_t seed) {
    const std::size_t top = indices.back();
    std::size_t hits = 0;
    for (std::size_t rep = 0; rep < reps; ++rep) {
        const ProcessPath path = generate_path(config, std::max<std::size_t>(top, 1),
                                               mix_seed(seed, rep));
        bool all = true;
        for (std::size_t i : indices) all = all && path.values[i] <= x;
        hits += all ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(reps);
}

void check_joint_against_mc(const ProcessConfig& config, const std::vector<std::size_t>& indices,
                            double x, std::uint64_t seed) {
    const std::size_t reps = 200'000;
    const double exact = joint_cdf_common_level(config, indices, x);
    const double est = mc_joint_cdf(config, indices, x, reps, seed);
    const double se = std::sqrt(exact * (1.0 - exact) / static_cast<double>(reps));
    CHECK(std::abs(est - exact) <= 4.0 * se + 1e-12);
}

} // namespace

TEST_CASE("stagnation probability closed form") {
    CHECK(stagnation_probability(0.5, 2) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(stagnation_probability(0.25, 3) == doctest::Approx(0.5625).epsilon(1e-14));
    CHECK(stagnation_probability(0.999, 4) < 1e-8);
    CHECK_THROWS_AS(stagnation_probability(0.5, 1), config_error);
}

TEST_CASE("joint cdf at a common level: closed forms") {
    // iid: product of marginals.
    CHECK(joint_cdf_common_level(iid_process(), std::vector<std::size_t>{0, 2, 5}, 2.0) ==
          doctest::Approx(std::pow(std::exp(-0.5), 3)).epsilon(1e-12));

    // moving maxima: one shared innovation between adjacent indices.
    const double fz = std::exp(-1.0 / 4.0); // F_Z(2x) at x = 2
    CHECK(joint_cdf_common_level(moving_maxima_process(), std::vector<std::size_t>{0, 1}, 2.0) ==
          doctest::Approx(std::pow(fz, 3)).epsilon(1e-12));
    CHECK(joint_cdf_common_level(moving_maxima_process(), std::vector<std::size_t>{0, 2}, 2.0) ==
          doctest::Approx(std::pow(fz, 4)).epsilon(1e-12));

    // armax: the chain bound walks through the recursion. Stationarity makes
    // P(X_1 <= x) equal H(x) even though index 0 is unconstrained.
    const ProcessConfig ar = armax_process(0.5, 1.0);
    CHECK(joint_cdf_common_level(ar, std::vector<std::size_t>{1}, 2.0) ==
          doctest::Approx(ar.dist.cdf(2.0)).epsilon(1e-12));
    const double expected01 = ar.dist.cdf(2.0) * ar.armax_innovation().cdf(4.0);
    CHECK(joint_cdf_common_level(ar, std::vector<std::size_t>{0, 1}, 2.0) ==
          doctest::Approx(expected01).epsilon(1e-12));
    const double expected02 =
        ar.dist.cdf(2.0) * ar.armax_innovation().cdf(8.0) * ar.armax_innovation().cdf(4.0);
    CHECK(joint_cdf_common_level(ar, std::vector<std::size_t>{0, 2}, 2.0) ==
          doctest::Approx(expected02).epsilon(1e-12));

    CHECK_THROWS_AS(
        joint_cdf_common_level(ar, std::vector<std::size_t>{2, 1}, 2.0), structural_error);
}

TEST_CASE("joint cdf at a common level: Monte Carlo cross-check") {
    check_joint_against_mc(iid_process(), {0, 1, 3}, 1.5, 51);
    check_joint_against_mc(moving_maxima_process(), {0, 2}, 1.5, 52);
    check_joint_against_mc(moving_maxima_process(), {0, 1, 2}, 2.5, 53);
    check_joint_against_mc(armax_process(0.5, 1.0), {0, 2}, 2.0, 54);
    check_joint_against_mc(armax_process(0.7, 2.0), {0, 1, 3}, 1.2, 55);
}

TEST_CASE("imputation window law G_j") {
    // iid, T=3, j=2: G_2 = (1-p) F + p F^2.
    const ModelConfig iid3{iid_process(), 3, 0.4};
    for (double x : {0.5, 1.0, 3.0}) {
        const double f = std::exp(-1.0 / x);
        CHECK(imputation_window_cdf(iid3, 2, x) ==
              doctest::Approx(0.6 * f + 0.4 * f * f).epsilon(1e-12));
        CHECK(marginal_cdf_fj(iid3, 2, x) ==
              doctest::Approx(0.4 * f + 0.36 * f + 0.24 * f * f).epsilon(1e-12));
        // j in {0,1} is the plain marginal for every process.
        CHECK(marginal_cdf_fj(iid3, 0, x) == doctest::Approx(f).epsilon(1e-12));
        CHECK(marginal_cdf_fj(iid3, 1, x) == doctest::Approx(f).epsilon(1e-12));
    }
    CHECK_THROWS_AS(marginal_cdf_fj(iid3, 3, 1.0), structural_error);
}

TEST_CASE("imputation window subset weights sum to one") {
    // At a level where every cdf factor rounds to 1, G_j collapses to the
    // bare subset-weight sum.
    for (int T : {3, 4, 6}) {
        for (double p : {0.1, 0.5, 0.9}) {
            const ModelConfig model{iid_process(), T, p};
            for (int j = 2; j < T; ++j)
                CHECK(imputation_window_cdf(model, j, 1e300) ==
                      doctest::Approx(1.0).epsilon(1e-14));
        }
    }
}

TEST_CASE("marginal mixture collapses to F when p -> 1") {
    const ModelConfig model{iid_process(), 4, 0.999999};
    for (int j = 0; j < 4; ++j)
        for (double x : {0.5, 2.0})
            CHECK(marginal_cdf_fj(model, j, x) ==
                  doctest::Approx(std::exp(-1.0 / x)).epsilon(1e-5));
}

TEST_CASE("combined tau rate") {
    // T = 2 collapses to tau_x for every p.
    for (double p : {0.1, 0.5, 0.9})
        CHECK(tau_combined(p, 2, 7.5, {}).tau == doctest::Approx(7.5).epsilon(1e-14));

    // armax T=3 with tau_2 = tau_x (1 + p theta_x).
    {
        const double tau_x = 20.0, p = 0.5, theta_x = 0.5;
        const std::vector<double> tj{tau_j2_armax_t3(tau_x, p, theta_x)};
        const double tau = tau_combined(p, 3, tau_x, tj).tau;
        CHECK(tau == doctest::Approx(tau_x * (1.0 + p * (1.0 - p) * theta_x / 3.0))
                         .epsilon(1e-12));
    }

    // iid T=3 with tau_2 = tau_x (1 + p).
    {
        const double tau_x = 20.0, p = 0.3;
        const std::vector<double> tj{tau_j2_iid_t3(tau_x, p)};
        const double tau = tau_combined(p, 3, tau_x, tj).tau;
        CHECK(tau == doctest::Approx(tau_x * (3.0 + p - p * p) / 3.0).epsilon(1e-12));
    }

    CHECK_THROWS_AS(tau_combined(0.5, 3, 20.0, {}), structural_error);
}

TEST_CASE("tau_j from the exact window law converges to the named constants") {
    const double tau_x = 20.0;
    {
        const ModelConfig model{armax_process(0.5, 1.0), 3, 0.5};
        const TauDecomposition d = tau_for_model(model, tau_x);
        CHECK(d.tau_j.size() == 1);
        CHECK(d.tau_j[0] ==
              doctest::Approx(tau_j2_armax_t3(tau_x, 0.5, 0.5)).epsilon(1e-3));
    }
    {
        const ModelConfig model{iid_process(), 3, 0.7};
        const TauDecomposition d = tau_for_model(model, tau_x);
        CHECK(d.tau_j[0] == doctest::Approx(tau_j2_iid_t3(tau_x, 0.7)).epsilon(1e-3));
    }
}

TEST_CASE("extremal index closed forms") {
    for (double p : {0.1, 0.5, 0.9})
        CHECK(theta_y_closed_form({moving_maxima_process(), 2, p}) == 0.5);

    CHECK(theta_y_closed_form({armax_process(0.5, 1.0), 2, 0.5}) ==
          doctest::Approx(0.4375).epsilon(1e-14));

    CHECK(theta_y_closed_form({armax_process(0.5, 1.0), 3, 0.5}) ==
          doctest::Approx(0.39).epsilon(1e-12));

    // p = 1 restores the underlying index exactly.
    CHECK(theta_y_closed_form({armax_process(0.5, 1.0), 3, 1.0}) ==
          doctest::Approx(0.5).epsilon(1e-12));

    // theta_x = 1, p -> 0: clusters of imputed copies of size T = 3.
    {
        ModelConfig model{armax_process(0.001, 1.0), 3, 0.001};
        // theta_x = 1 - t is close to 1 here; evaluate the limit shape.
        const double v = theta_y_closed_form(model);
        CHECK(std::abs(v - 1.0 / 3.0) < 5e-3);
    }

    CHECK(theta_y_closed_form({iid_process(), 3, 0.5}) ==
          doctest::Approx((1.0 + 1.0) / 3.25).epsilon(1e-12));
    CHECK(theta_y_closed_form({iid_process(), 3, 0.9}) ==
          doctest::Approx(2.8 / 3.09).epsilon(1e-12));

    CHECK_THROWS_AS(theta_y_closed_form({iid_process(), 4, 0.5}), unsupported_error);
    CHECK_THROWS_AS(theta_y_closed_form({moving_maxima_process(), 3, 0.5}), unsupported_error);
    try {
        theta_y_closed_form({moving_maxima_process(), 3, 0.5});
    } catch (const unsupported_error& e) {
        CHECK(std::string(e.what()).find("plug-in") != std::string::npos);
    }
}

TEST_CASE("closed forms stay inside (0,1] and join continuously in p") {
    for (const ModelConfig base : {ModelConfig{moving_maxima_process(), 2, 0.5},
                                   ModelConfig{armax_process(0.5, 1.0), 2, 0.5},
                                   ModelConfig{armax_process(0.3, 1.5), 3, 0.5},
                                   ModelConfig{iid_process(), 3, 0.5}}) {
        double prev = 0.0;
        for (int k = 1; k <= 99; ++k) {
            ModelConfig model = base;
            model.p = 0.01 * k;
            const double v = theta_y_closed_form(model);
            CHECK(v > 0.0);
            CHECK(v <= 1.0);
            if (k > 1) CHECK(std::abs(v - prev) < 0.05);
            prev = v;
        }
    }

    // theta_x = 1 and p = 1: no clustering at all.
    CHECK((1.0 + 2.0) / (3.0 + 0.0) == 1.0); // iid shape at p = 1
}

TEST_CASE("moving-maxima T=2 recombination is identically one half") {
    for (int k = 1; k <= 99; ++k)
        CHECK(std::abs(theta_y_mm_t2_recombined(0.01 * k) - 0.5) <= 1e-12);
}

TEST_CASE("armax tail limits: closed forms and numeric convergence") {
    const double tau_x = 1.0, t = 0.5, alpha = 1.0;
    const double theta_x = 1.0 - std::pow(t, alpha);

    CHECK(armax_tail_limit(ArmaxTailKind::l_power, 1, tau_x, theta_x, alpha, t) ==
          doctest::Approx(tau_x * theta_x).epsilon(1e-14));
    CHECK(armax_tail_limit(ArmaxTailKind::h_gap, 0, tau_x, theta_x, alpha, t) ==
          doctest::Approx(tau_x * theta_x).epsilon(1e-14));
    CHECK(armax_tail_limit(ArmaxTailKind::l_mixed, 2, tau_x, theta_x, alpha, t) ==
          doctest::Approx(1.25).epsilon(1e-14));

    CHECK_THROWS_AS(armax_tail_limit(ArmaxTailKind::l_power, 0, 1, 0.5, 1, 0.5),
                    structural_error);
    CHECK_THROWS_AS(armax_tail_limit(ArmaxTailKind::h_gap, -1, 1, 0.5, 1, 0.5),
                    structural_error);

    // Finite-n evaluation approaches each limit; within 1% at n = 10^6 and
    // monotone-ish improvement across the grid.
    for (double a : {1.0, 2.0}) {
        const double th = 1.0 - std::pow(t, a);
        for (int j : {0, 1, 2, 3}) {
            for (ArmaxTailKind kind :
                 {ArmaxTailKind::h_gap, ArmaxTailKind::l_power, ArmaxTailKind::l_mixed}) {
                if (kind != ArmaxTailKind::h_gap && j == 0) continue;
                const double limit = armax_tail_limit(kind, j, tau_x, th, a, t);
                const double at_largest = armax_tail_finite_n(kind, j, 1'000'000, tau_x, a, t);
                CHECK(std::abs(at_largest - limit) <= 0.01 * std::abs(limit));
                const double at_small = armax_tail_finite_n(kind, j, 1'000, tau_x, a, t);
                CHECK(std::abs(at_small - limit) < 0.5 * std::abs(limit));
            }
        }
    }
}
