#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "gridwalk/gbm.hpp"
#include "gridwalk/heat.hpp"

using gridwalk::CoefficientSchedule;
using gridwalk::expected_price;
using gridwalk::gbm_kernel_probs;
using gridwalk::gbm_spec;
using gridwalk::GbmParams;
using gridwalk::Grid;
using gridwalk::log_return_law;
using gridwalk::price_paths;
using gridwalk::schedule_log_return_moments;
using gridwalk::simulate;
using gridwalk::simulate_schedule;
using gridwalk::TransitionKernel;

namespace {
// Reference experiment parameters: mu=2, sigma2=0.25, tau=2e-4.
const GbmParams kRef{2.0, 0.25, 1.0, 2e-4};
}  // namespace

TEST_CASE("log-return moment spec") {
    const auto spec = gbm_spec(kRef);
    CHECK(spec.mean_step == doctest::Approx(3.75e-4).epsilon(1e-14));
    CHECK(spec.var_step == doctest::Approx(5e-5).epsilon(1e-14));

    // Drift equal to half the squared volatility kills the log drift.
    CHECK(gbm_spec({0.125, 0.25, 1.0, 0.01}).mean_step ==
          doctest::Approx(0.0).epsilon(1e-18));

    CHECK_THROWS_AS(gbm_spec({1.0, 0.25, 1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(gbm_spec({1.0, 0.0, 1.0, 0.01}), std::invalid_argument);
    CHECK_THROWS_AS(gbm_spec({1.0, 0.25, 0.0, 0.01}), std::invalid_argument);
}

TEST_CASE("log-return law is normal with linear moments") {
    const auto law = log_return_law(kRef, 10000);
    CHECK(law.mean == doctest::Approx(3.75).epsilon(1e-12));
    CHECK(law.variance == doctest::Approx(0.5).epsilon(1e-12));

    const auto zero = log_return_law(kRef, 0);
    CHECK(zero.mean == 0.0);
    CHECK(zero.variance == 0.0);

    CHECK(log_return_law({0.125, 0.25, 1.0, 0.01}, 500).mean ==
          doctest::Approx(0.0).epsilon(1e-15));
    CHECK_THROWS_AS(log_return_law(kRef, -1), std::invalid_argument);
}

TEST_CASE("kernel probabilities defer to the shared transition formulas") {
    const Grid g = Grid::two_sided(0.1, 0.01);
    const auto via_gbm = gbm_kernel_probs(g, kRef, 3);
    const auto via_kernel = gridwalk::transition_probs(g, gbm_spec(kRef), 3);
    CHECK(via_gbm.left == via_kernel.left);
    CHECK(via_gbm.center == via_kernel.center);
    CHECK(via_gbm.right == via_kernel.right);
}

TEST_CASE("driftless log-return matches the diffusion kernel") {
    // mu = sigma2/2 makes eta vanish; the kernel then coincides with the
    // diffusion kernel whose 2*alpha*tau equals sigma2*tau.
    const GbmParams driftless{0.125, 0.25, 1.0, 0.01};
    const gridwalk::HeatParams diffusion{0.125, 0.01, {}};
    const Grid g = Grid::two_sided(0.3, 0.2);
    for (std::int64_t i : {-2, 0, 1}) {
        const auto a = gbm_kernel_probs(g, driftless, i);
        const auto b = gridwalk::heat_kernel_probs(g, diffusion, i);
        CHECK(a.left == b.left);
        CHECK(a.center == b.center);
        CHECK(a.right == b.right);
        if (i != 0) {
            CHECK(a.left == a.right);  // equal gaps away from the origin
        }
    }
}

TEST_CASE("price paths exponentiate the grid coordinates") {
    SUBCASE("motionless batch prices stay at s0") {
        const TransitionKernel kernel(Grid::uniform(1.0), {0.0, 0.0});
        const auto batch = simulate(kernel, 10, 5, 3);
        const auto prices = price_paths(batch, {2.0, 0.25, 7.0, 2e-4});
        for (std::int64_t k = 0; k <= 10; ++k) {
            CHECK(prices.mean_price[static_cast<std::size_t>(k)] ==
                  doctest::Approx(7.0).epsilon(1e-15));
            CHECK(prices.sample(0, k) == doctest::Approx(7.0).epsilon(1e-15));
        }
    }

    SUBCASE("one step onto the fine side") {
        gridwalk::TrajectoryBatch batch;
        batch.grid = Grid::two_sided(0.1, 0.01);
        batch.num_paths = 1;
        batch.num_steps = 1;
        batch.states = {0, 1};
        const auto prices = price_paths(batch, {2.0, 0.25, 1.0, 2e-4});
        CHECK(prices.sample(0, 1) == doctest::Approx(std::exp(0.01)).epsilon(1e-14));
        CHECK(prices.expected_price[0] == doctest::Approx(1.0).epsilon(1e-15));
    }

    SUBCASE("analytic expectation column") {
        CHECK(expected_price(kRef, 10000) ==
              doctest::Approx(std::exp(4.0)).epsilon(1e-12));
        CHECK(expected_price(kRef, 0) == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("schedule validation") {
    using Segment = CoefficientSchedule::Segment;
    CHECK_THROWS_AS(CoefficientSchedule({}), std::invalid_argument);
    CHECK_THROWS_AS(CoefficientSchedule({Segment{5, kRef}}), std::invalid_argument);
    CHECK_THROWS_AS(
        CoefficientSchedule({Segment{0, kRef}, Segment{0, kRef}}),
        std::invalid_argument);
    const GbmParams other_s0{2.0, 0.25, 2.0, 2e-4};
    CHECK_THROWS_AS(
        CoefficientSchedule({Segment{0, kRef}, Segment{10, other_s0}}),
        std::invalid_argument);
    const GbmParams other_tau{2.0, 0.25, 1.0, 1e-4};
    CHECK_THROWS_AS(
        CoefficientSchedule({Segment{0, kRef}, Segment{10, other_tau}}),
        std::invalid_argument);
}

TEST_CASE("schedule runs are consistent with homogeneous runs") {
    const Grid g = Grid::two_sided(0.1, 0.01);
    using Segment = CoefficientSchedule::Segment;

    SUBCASE("one segment equals the plain simulation bit for bit") {
        const CoefficientSchedule sched({Segment{0, kRef}});
        const auto via_schedule = simulate_schedule(g, sched, 400, 25, 77);
        const TransitionKernel kernel(g, gbm_spec(kRef));
        const auto plain = simulate(kernel, 400, 25, 77);
        CHECK(via_schedule.states == plain.states);
    }

    SUBCASE("identical segments equal one segment bit for bit") {
        const CoefficientSchedule one({Segment{0, kRef}});
        const CoefficientSchedule two({Segment{0, kRef}, Segment{200, kRef}});
        const auto a = simulate_schedule(g, one, 400, 25, 123);
        const auto b = simulate_schedule(g, two, 400, 25, 123);
        CHECK(a.states == b.states);
    }
}

TEST_CASE("schedule moments add segment contributions") {
    using Segment = CoefficientSchedule::Segment;
    const GbmParams second{1.0, 0.1, 1.0, 2e-4};
    const CoefficientSchedule sched({Segment{0, kRef}, Segment{600, second}});

    const auto [mean, variance] = schedule_log_return_moments(sched, 1000);
    const auto s1 = gbm_spec(kRef);
    const auto s2 = gbm_spec(second);
    CHECK(mean == doctest::Approx(600.0 * s1.mean_step + 400.0 * s2.mean_step)
                      .epsilon(1e-13));
    CHECK(variance == doctest::Approx(600.0 * s1.var_step + 400.0 * s2.var_step)
                          .epsilon(1e-13));

    // Before the switch only the first segment contributes.
    const auto [m_early, v_early] = schedule_log_return_moments(sched, 500);
    CHECK(m_early == doctest::Approx(500.0 * s1.mean_step).epsilon(1e-13));
    CHECK(v_early == doctest::Approx(500.0 * s1.var_step).epsilon(1e-13));

    CHECK(expected_price(sched, 1000) ==
          doctest::Approx(std::exp(2.0 * 600.0 * 2e-4 + 1.0 * 400.0 * 2e-4))
              .epsilon(1e-12));
}

TEST_CASE("two-regime sample mean tracks the summed segment means") {
    using Segment = CoefficientSchedule::Segment;
    const GbmParams second{0.5, 0.1, 1.0, 2e-4};
    const CoefficientSchedule sched({Segment{0, kRef}, Segment{500, second}});
    const Grid g = Grid::two_sided(0.1, 0.01);
    const std::int64_t k_max = 1000;
    const std::int64_t n_paths = 4000;
    const auto batch = simulate_schedule(g, sched, k_max, n_paths, 4242, 2);

    double sum = 0.0;
    for (std::int64_t p = 0; p < n_paths; ++p) {
        sum += g.point(batch.state(p, k_max));
    }
    const double mean = sum / static_cast<double>(n_paths);
    const auto [target_mean, target_var] = schedule_log_return_moments(sched, k_max);
    const double band =
        4.0 * std::sqrt(target_var / static_cast<double>(n_paths));
    CHECK(std::abs(mean - target_mean) <= band);
}
