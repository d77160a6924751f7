#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <vector>

#include "jamdof/errors.hpp"
#include "jamdof/estimator.hpp"
#include "jamdof/jammer.hpp"
#include "jamdof/regions.hpp"
#include "jamdof/rng.hpp"
#include "jamdof/schemes.hpp"

using namespace jamdof;

namespace {

JammerDistribution square_dist() {
    return JammerDistribution::from_probs(2, {0.3, 0.3, 0.3, 0.1});
}

SchemeRunner pp_runner(const JammerDistribution& d, std::vector<long long> budgets) {
    return [d, budgets](std::uint64_t seed) { return run_pp(d, budgets, seed); };
}

}  // namespace

TEST_CASE("estimate reduces per-trial runs into means and errors") {
    JammerDistribution d = square_dist();
    EmpiricalDof est = estimate(pp_runner(d, {2000, 2000}), Config::PP, 2, 16, 5);
    CHECK(est.trials == 16);
    CHECK(est.mean[0] == doctest::Approx(0.6).epsilon(0.03));
    CHECK(est.mean[1] == doctest::Approx(0.6).epsilon(0.03));
    CHECK(est.sum_mean == doctest::Approx(est.mean[0] + est.mean[1]).epsilon(1e-12));
    CHECK(est.std_error[0] > 0.0);
    CHECK(est.std_error[0] < 0.01);
    CHECK(est.mean_slots > 2000.0 / 0.6);
}

TEST_CASE("trial i consumes the stream derived for i") {
    JammerDistribution d = square_dist();
    EmpiricalDof one = estimate(pp_runner(d, {500, 500}), Config::PP, 2, 1, 77);
    SchemeRun direct = run_pp(d, {500, 500}, Rng::derive(77, 0));
    std::vector<double> dof = direct.dof_estimate();
    CHECK(one.mean[0] == dof[0]);
    CHECK(one.mean[1] == dof[1]);
    CHECK(one.std_error[0] == 0.0);  // single trial has no spread estimate
}

TEST_CASE("serial and parallel estimates are bit-identical") {
    JammerDistribution d = square_dist();
    SchemeRunner runner = pp_runner(d, {1500, 1500});
    EmpiricalDof serial = estimate(runner, Config::PP, 2, 24, 9, Parallelism::serial);
    EmpiricalDof parallel = estimate(runner, Config::PP, 2, 24, 9, Parallelism::openmp);
    CHECK(serial.mean[0] == parallel.mean[0]);
    CHECK(serial.mean[1] == parallel.mean[1]);
    CHECK(serial.std_error[0] == parallel.std_error[0]);
    CHECK(serial.std_error[1] == parallel.std_error[1]);
    CHECK(serial.sum_mean == parallel.sum_mean);
    CHECK(serial.sum_std_error == parallel.sum_std_error);
    CHECK(serial.mean_slots == parallel.mean_slots);
}

TEST_CASE("standard error shrinks like the square root of the trial count") {
    JammerDistribution d = square_dist();
    SchemeRunner runner = pp_runner(d, {800, 800});
    double se10 = estimate(runner, Config::PP, 2, 10, 123).sum_std_error;
    double se160 = estimate(runner, Config::PP, 2, 160, 123).sum_std_error;
    // 16x the trials should shave the error by about 4; the estimate of the
    // error itself is noisy, so accept a wide band around that
    double ratio = se10 / se160;
    CHECK(ratio > 2.0);
    CHECK(ratio < 8.0);
}

TEST_CASE("JAMDOF_THREADS overrides the thread choice") {
    setenv("JAMDOF_THREADS", "3", 1);
    CHECK(effective_threads() == 3);
    setenv("JAMDOF_THREADS", "0", 1);  // nonsense values fall through
    CHECK(effective_threads() >= 1);
    unsetenv("JAMDOF_THREADS");
    CHECK(effective_threads() >= 1);
}

TEST_CASE("exceptions inside trials surface to the caller") {
    SchemeRunner boom = [](std::uint64_t seed) -> SchemeRun {
        if (seed == Rng::derive(4, 3)) throw NumericalError("trial blew up");
        return run_pp(square_dist(), {50, 50}, seed);
    };
    CHECK_THROWS_AS(estimate(boom, Config::PP, 2, 8, 4, Parallelism::serial), NumericalError);
    CHECK_THROWS_AS(estimate(boom, Config::PP, 2, 8, 4, Parallelism::automatic), NumericalError);
}

TEST_CASE("argument validation") {
    SchemeRunner runner = pp_runner(square_dist(), {50, 50});
    CHECK_THROWS_AS(estimate(runner, Config::PP, 2, 0, 1), ArgumentError);
    CHECK_THROWS_AS(estimate(runner, Config::PP, 0, 4, 1), ArgumentError);
    // receiver-count mismatch between runner output and declaration
    CHECK_THROWS_AS(estimate(runner, Config::PP, 3, 4, 1), ArgumentError);
}

TEST_CASE("region verdicts") {
    DofRegion box = region_perfect_csit(square_dist());
    CHECK(check_against_region({0.3, 0.3}, box, 1e-6) == RegionVerdict::inside);
    CHECK(check_against_region({0.6, 0.3}, box, 1e-6) == RegionVerdict::boundary);
    CHECK(check_against_region({0.7, 0.3}, box, 1e-6) == RegionVerdict::outside);
    // tolerance widens both calls
    CHECK(check_against_region({0.7, 0.3}, box, 0.2) == RegionVerdict::boundary);
    CHECK(verdict_to_string(RegionVerdict::inside) == std::string("inside"));
    CHECK(verdict_to_string(RegionVerdict::outside) == std::string("outside"));
}
