#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "jamdof/errors.hpp"
#include "jamdof/jammer.hpp"
#include "jamdof/regions.hpp"
#include "jamdof/schemes.hpp"

using namespace jamdof;

namespace {

JammerDistribution square_dist() {
    return JammerDistribution::from_probs(2, {0.3, 0.3, 0.3, 0.1});
}

JammerDistribution independent_dist(double l1, double l2) {
    return JammerDistribution::from_probs(
        2, {l1 * l2, (1 - l1) * l2, l1 * (1 - l2), (1 - l1) * (1 - l2)});
}

JammerDistribution always_clean() {
    return JammerDistribution::from_probs(2, {1.0, 0.0, 0.0, 0.0});
}

bool runs_equal(const SchemeRun& a, const SchemeRun& b) {
    return a.delivered == b.delivered && a.slots == b.slots &&
           a.completion_slot == b.completion_slot && a.state_slots == b.state_slots;
}

}  // namespace

TEST_CASE("runs are reproducible per seed") {
    JammerDistribution d = square_dist();
    CHECK(runs_equal(run_pp(d, {500, 500}, 7), run_pp(d, {500, 500}, 7)));
    CHECK_FALSE(runs_equal(run_pp(d, {500, 500}, 7), run_pp(d, {500, 500}, 8)));
    CHECK(runs_equal(run_dd(d, {400, 400}, 3), run_dd(d, {400, 400}, 3)));
    CHECK(runs_equal(run_dp(d, {400, 400}, DpMode::mat_corner, 3),
                     run_dp(d, {400, 400}, DpMode::mat_corner, 3)));
}

TEST_CASE("zero forcing under perfect knowledge delivers the marginals") {
    JammerDistribution d = square_dist();
    for (auto runner : {run_pp, run_pd}) {
        SchemeRun run = runner(d, {6000, 6000}, 11, RunOptions{});
        CHECK(run.delivered == std::vector<long long>{6000, 6000});
        std::vector<double> dof = run.dof_estimate();
        CHECK(dof[0] == doctest::Approx(0.6).epsilon(0.04));
        CHECK(dof[1] == doctest::Approx(0.6).epsilon(0.04));
        CHECK(run.completion_slot[0] > 0);
        CHECK(run.completion_slot[1] > 0);
        CHECK(run.stages.size() == 1);
    }
}

TEST_CASE("PP supports more than two receivers") {
    std::vector<double> eta = {0.125, 0.375, 0.375, 0.125};
    JammerDistribution d = JammerDistribution::symmetric(3, eta);
    SchemeRun run = run_pp(d, {3000, 3000, 3000}, 5);
    CHECK(run.delivered == std::vector<long long>{3000, 3000, 3000});
    for (double v : run.dof_estimate()) CHECK(v == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("blind retransmission decodes a block after enough clean slots") {
    JammerDistribution d = square_dist();
    SchemeRun run = run_pn(d, {6000, 6000}, 21);
    CHECK(run.delivered == std::vector<long long>{6000, 6000});
    // block of 6000 at lambda = 0.6 decodes near slot 10000
    CHECK(run.completion_slot[0] > 9600);
    CHECK(run.completion_slot[0] < 10400);
    CHECK(run.completion_slot[1] > 9600);
    CHECK(run.completion_slot[1] < 10400);
    std::vector<double> dof = run.dof_estimate();
    CHECK(dof[0] + dof[1] == doctest::Approx(1.2).epsilon(0.04));
}

TEST_CASE("DP mat-corner hits the corner point and is state-separable") {
    JammerDistribution d = square_dist();
    SchemeRun run = run_dp(d, {5000, 5000}, DpMode::mat_corner, 13);
    CHECK(run.delivered == std::vector<long long>{5000, 5000});
    std::vector<double> dof = run.dof_estimate();
    CHECK(dof[0] == doctest::Approx(0.5).epsilon(0.05));
    CHECK(dof[1] == doctest::Approx(0.5).epsilon(0.05));

    // per-state throughput: both-clean slots run the three-slot machine at
    // 4/3 symbols per slot; single-clean slots serve that receiver directly
    REQUIRE(run.state_slots.size() == 4);
    CHECK(run.state_delivered[0] / static_cast<double>(run.state_slots[0]) ==
          doctest::Approx(4.0 / 3.0).epsilon(0.02));
    CHECK(run.state_delivered[1] / static_cast<double>(run.state_slots[1]) ==
          doctest::Approx(1.0).epsilon(0.02));
    CHECK(run.state_delivered[2] / static_cast<double>(run.state_slots[2]) ==
          doctest::Approx(1.0).epsilon(0.02));
    CHECK(run.state_delivered[3] == 0.0);
}

TEST_CASE("DP with a point mass on both-clean runs the pure alignment machine") {
    JammerDistribution d = always_clean();
    SchemeRun run = run_dp(d, {2000, 2000}, DpMode::mat_corner, 1);
    CHECK(run.slots == 3000);  // three slots per two-symbol pair to each receiver
    CHECK(run.delivered == std::vector<long long>{2000, 2000});
    std::vector<double> dof = run.dof_estimate();
    CHECK(dof[0] + dof[1] == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("DP priority modes trade one receiver for the other") {
    JammerDistribution d = square_dist();
    SchemeRun fav1 = run_dp(d, {6000, 1000}, DpMode::user1_priority, 17, RunOptions{});
    CHECK(fav1.delivered == std::vector<long long>{6000, 1000});
    std::vector<double> dof = fav1.dof_estimate();
    // both-clean slots all serve receiver 1: d1 -> lambda1
    CHECK(dof[0] == doctest::Approx(0.6).epsilon(0.05));
}

TEST_CASE("DD three-stage run completes and concentrates its stage lengths") {
    JammerDistribution d = square_dist();
    SchemeRun run = run_dd(d, {3000, 3000}, 19);
    CHECK(run.delivered == std::vector<long long>{3000, 3000});
    std::vector<double> dof = run.dof_estimate();
    CHECK(dof[0] + dof[1] == doctest::Approx(0.8).epsilon(0.05));

    REQUIRE(run.stages.size() == 3);
    CHECK(run.stages[0].name == "stage1");
    // distribution consumes combinations at rate lambda1 + lambda2
    double expect = 3000.0 / 1.2;
    CHECK(std::abs(run.stages[0].slots - expect) < 100);
    CHECK(std::abs(run.stages[1].slots - expect) < 100);
    CHECK(run.stages[2].slots > 0);
}

TEST_CASE("DD under a both-clean point mass matches the alignment rate exactly") {
    SchemeRun run = run_dd(always_clean(), {2000, 2000}, 1);
    CHECK(run.slots == 3000);
    std::vector<double> dof = run.dof_estimate();
    CHECK(dof[0] + dof[1] == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("DN uses fixed horizons and nets out the nuisance dimensions") {
    JammerDistribution d = independent_dist(0.8, 0.8);
    const long long n = 5000;
    SchemeRun run = run_dn(d, n, 23);
    // stage lengths are committed upfront: n + 2 ceil(max(1/l1,1/l2) n)
    CHECK(run.slots == 5000 + 2 * 6250);
    CHECK(run.budgets == std::vector<long long>{9000, 9000});
    std::vector<double> dof = run.dof_estimate();
    CHECK(dof[0] == doctest::Approx(1.8 / 3.5).epsilon(0.04));
    CHECK(dof[1] == doctest::Approx(1.8 / 3.5).epsilon(0.04));
    CHECK(run.stages.size() == 3);
}

TEST_CASE("NP serves exactly one clean receiver per slot") {
    JammerDistribution d = square_dist();
    SchemeRun run = run_np(d, {6000, 3000}, NpPolicy::corner1, 29, RunOptions{});
    CHECK(run.delivered == std::vector<long long>{6000, 3000});
    std::vector<double> dof = run.dof_estimate();
    CHECK(dof[0] == doctest::Approx(0.6).epsilon(0.05));
    CHECK(dof[1] == doctest::Approx(0.3).epsilon(0.05));
    CHECK(dof[0] + dof[1] == doctest::Approx(0.9).epsilon(0.04));

    SchemeRun tdma = run_np(d, {3000, 0}, NpPolicy::tdma1, 31, RunOptions{});
    CHECK(tdma.delivered[0] == 3000);
    CHECK(tdma.dof_estimate()[0] == doctest::Approx(0.6).epsilon(0.05));
}

TEST_CASE("NP starvation is detected before running forever") {
    // corner-1 sends to receiver 2 only when receiver 1 alone is jammed,
    // which this distribution never does
    JammerDistribution d = JammerDistribution::from_probs(2, {0.5, 0.0, 0.3, 0.2});
    CHECK_THROWS_AS(run_np(d, {100, 100}, NpPolicy::corner1, 1, RunOptions{}),
                    NonTerminationError);
    try {
        run_np(d, {100, 100}, NpPolicy::corner1, 1, RunOptions{});
    } catch (const NonTerminationError& e) {
        CHECK(e.receiver() == 2);
    }
    // with no demand on receiver 2 the same policy is fine
    CHECK_NOTHROW(run_np(d, {100, 0}, NpPolicy::corner1, 1, RunOptions{}));
}

TEST_CASE("ND single-stream run reaches its corner") {
    JammerDistribution d = square_dist();
    SchemeRun run = run_nd(d, {3000, 3000}, 37);
    CHECK(run.delivered == std::vector<long long>{3000, 3000});
    std::vector<double> dof = run.dof_estimate();
    CHECK(dof[0] + dof[1] == doctest::Approx(0.72).epsilon(0.05));
    REQUIRE(run.stages.size() == 3);
}

TEST_CASE("NN time sharing") {
    JammerDistribution d = square_dist();
    SchemeRun solo = run_nn(d, 10000, {1.0, 0.0}, 41);
    CHECK(solo.dof_estimate()[0] == doctest::Approx(0.6).epsilon(0.04));
    CHECK(solo.delivered[1] == 0);
    CHECK(solo.slots == 10000);  // idle tail still counts

    std::vector<double> eta3 = {0.125, 0.375, 0.375, 0.125};
    JammerDistribution d3 = JammerDistribution::symmetric(3, eta3);
    SchemeRun shared = run_nn(d3, 9000, {1.0 / 3, 1.0 / 3, 1.0 / 3}, 43);
    std::vector<double> dof = shared.dof_estimate();
    for (int r = 0; r < 3; ++r) CHECK(dof[static_cast<std::size_t>(r)] ==
                                      doctest::Approx(1.0 / 6.0).epsilon(0.1));
    CHECK(shared.stages.size() >= 3);

    CHECK_THROWS_AS(run_nn(d, 100, {0.8, 0.8}, 1), ArgumentError);
    CHECK_THROWS_AS(run_nn(d, 100, {-0.1, 0.5}, 1), ArgumentError);
}

TEST_CASE("degenerate marginals with open demand are refused upfront") {
    JammerDistribution d = JammerDistribution::from_probs(2, {0.0, 0.0, 0.6, 0.4});
    CHECK_THROWS_AS(run_pp(d, {10, 10}, 1, RunOptions{}), DegenerateMarginalError);
    CHECK_THROWS_AS(run_dd(d, {10, 10}, 1, RunOptions{}), DegenerateMarginalError);
    // zero budget on the dead receiver is allowed
    CHECK_NOTHROW(run_pp(d, {10, 0}, 1, RunOptions{}));
}

TEST_CASE("budget validation") {
    JammerDistribution d = square_dist();
    CHECK_THROWS_AS(run_pp(d, {10}, 1, RunOptions{}), ArgumentError);
    CHECK_THROWS_AS(run_pp(d, {-1, 10}, 1, RunOptions{}), ArgumentError);
    CHECK_THROWS_AS(run_pp(d, {0, 0}, 1, RunOptions{}), ArgumentError);
    CHECK_THROWS_AS(run_dn(d, 0, 1, RunOptions{}), ArgumentError);
}

TEST_CASE("K-user delayed-CSIT schemes hit their sum rates") {
    std::vector<double> eta = {0.125, 0.375, 0.375, 0.125};
    JammerDistribution d = JammerDistribution::symmetric(3, eta);

    SchemeRun dd = run_dd_k(d, 2000, 47);
    CHECK(dd.delivered == std::vector<long long>{2000, 2000, 2000});
    std::vector<double> dof = dd.dof_estimate();
    double sum = dof[0] + dof[1] + dof[2];
    CHECK(sum == doctest::Approx(9.0 / 11.0).epsilon(0.04));
    CHECK(dd.stages.size() == 3);  // one phase per cardinality

    SchemeRun dp = run_dp_k(d, 2000, 49);
    CHECK(dp.delivered == std::vector<long long>{2000, 2000, 2000});
    std::vector<double> dp_dof = dp.dof_estimate();
    double dp_sum = dp_dof[0] + dp_dof[1] + dp_dof[2];
    CHECK(dp_sum == doctest::Approx(1.0795454545454546).epsilon(0.04));
}

TEST_CASE("two-user K-specializations agree with the general entry points") {
    // run_dd_k on K = 2 should land on the symmetric DD corner sum
    std::vector<double> eta = {0.25, 0.5, 0.25};
    JammerDistribution d = JammerDistribution::symmetric(2, eta);
    SchemeRun run = run_dd_k(d, 3000, 53);
    std::vector<double> dof = run.dof_estimate();
    // lambda_eta = 0.5, sum = 0.5 * dof_mat(2) = 2/3
    CHECK(dof[0] + dof[1] == doctest::Approx(2.0 / 3.0).epsilon(0.04));
}

TEST_CASE("traces record coherent slot-level events") {
    JammerDistribution d = square_dist();
    RunOptions opts;
    opts.record_trace = true;
    SchemeRun run = run_dd(d, {40, 40}, 59, opts);
    REQUIRE_FALSE(run.trace.empty());
    long long last_slot = 0;
    for (const TraceEvent& ev : run.trace) {
        CHECK(ev.slot >= last_slot);
        last_slot = ev.slot;
        CHECK_FALSE(ev.stage.empty());
        CHECK_FALSE(ev.action.empty());
        CHECK(ev.receiver >= 0);
        CHECK(ev.receiver <= 2);
    }
    CHECK(run.trace.back().slot <= run.slots);

    std::ostringstream os;
    write_trace(os, run);
    std::string text = os.str();
    CHECK(text.rfind("slot,state,stage,action,receiver,lc_tag", 0) == 0);
    // one line per event plus the header
    std::size_t lines = 0;
    for (char c : text)
        if (c == '\n') ++lines;
    CHECK(lines == run.trace.size() + 1);

    SchemeRun quiet = run_dd(d, {40, 40}, 59);
    CHECK(quiet.trace.empty());
    CHECK(runs_equal(run, quiet));  // tracing must not change the run
}

TEST_CASE("dof estimates divide by elapsed slots") {
    SchemeRun run = run_pp(always_clean(), {100, 50}, 1);
    CHECK(run.slots == 100);
    std::vector<double> dof = run.dof_estimate();
    CHECK(dof[0] == doctest::Approx(1.0));
    CHECK(dof[1] == doctest::Approx(0.5));
}
