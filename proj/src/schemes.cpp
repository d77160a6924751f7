#include "jamdof/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "jamdof/errors.hpp"
#include "jamdof/rng.hpp"

namespace jamdof {

namespace {

constexpr std::uint32_t kBothClean = 0;   // K=2 mask: no receiver jammed
constexpr std::uint32_t kRx2Jammed = 2;   // bitstring "01": only receiver 1 clean
constexpr std::uint32_t kRx1Jammed = 1;   // bitstring "10": only receiver 2 clean

void check_budgets(const JammerDistribution& dist, const std::vector<long long>& budgets) {
    if (budgets.size() != static_cast<std::size_t>(dist.num_receivers())) {
        throw ArgumentError("expected " + std::to_string(dist.num_receivers()) +
                            " budgets, got " + std::to_string(budgets.size()));
    }
    long long total = 0;
    for (long long b : budgets) {
        if (b < 0) throw ArgumentError("budgets must be non-negative");
        total += b;
    }
    if (total == 0) throw ArgumentError("at least one budget must be positive");
}

void check_two_user(const JammerDistribution& dist, const char* what) {
    if (dist.num_receivers() != 2) {
        throw UnsupportedDimensionError(std::string(what) + " is defined for K=2, got K=" +
                                        std::to_string(dist.num_receivers()));
    }
}

// Demands lambda > 0 for a receiver the scheme must serve.
void check_serveable(double lambda, long long budget, int receiver_number, const char* what) {
    if (budget > 0 && lambda <= 0.0) {
        throw DegenerateMarginalError(
            std::string(what) + " cannot serve receiver " + std::to_string(receiver_number) +
                ": it is jammed with probability 1",
            receiver_number);
    }
}

// Shared per-run machinery: seeded sampling, slot/stage accounting, the
// non-termination guard and optional tracing.
struct Engine {
    const JammerDistribution& dist;
    Rng rng;
    SchemeRun run;
    bool tracing;
    long long cap;
    std::uint64_t next_tag = 0;
    std::string stage;

    Engine(Config config, const JammerDistribution& d, std::uint64_t seed,
           const RunOptions& opts, double expected_slots)
        : dist(d), rng(seed), tracing(opts.record_trace) {
        run.config = config;
        run.num_receivers = d.num_receivers();
        run.seed = seed;
        run.completion_slot.assign(static_cast<std::size_t>(d.num_receivers()), -1);
        run.delivered.assign(static_cast<std::size_t>(d.num_receivers()), 0);
        if (d.dense() && d.num_receivers() <= 8) {
            run.state_slots.assign(std::size_t{1} << d.num_receivers(), 0);
            run.state_delivered.assign(std::size_t{1} << d.num_receivers(), 0.0);
        }
        double guarded = opts.guard_factor * std::max(expected_slots, 1.0);
        cap = static_cast<long long>(std::ceil(guarded)) + 64;
    }

    // Accounts one elapsed slot in the given state, enforcing the guard.
    void account(JammerState s) {
        if (run.slots >= cap) {
            int starving = 1;
            for (std::size_t r = 0; r < run.delivered.size(); ++r) {
                if (run.budgets.size() > r && run.delivered[r] < run.budgets[r]) {
                    starving = static_cast<int>(r) + 1;
                    break;
                }
            }
            throw NonTerminationError(
                "scheme exceeded " + std::to_string(cap) +
                    " slots (the guard multiple of the analytic expectation) in " +
                    std::string(stage) + " while receiver " + std::to_string(starving) +
                    " is still short",
                starving);
        }
        ++run.slots;
        if (!run.state_slots.empty()) ++run.state_slots[s.mask];
    }

    JammerState step() {
        JammerState s = dist.sample_state(rng);
        account(s);
        return s;
    }

    void begin_stage(std::string name) {
        stage = std::move(name);
        run.stages.push_back({stage, 0});
    }
    void count_stage_slot() { ++run.stages.back().slots; }

    std::uint64_t make_tag() { return ++next_tag; }

    void trace(long long slot, JammerState s, const char* action, int receiver_number,
               std::uint64_t tag) {
        if (tracing) run.trace.push_back({slot, s, stage, action, receiver_number, tag});
    }

    // Credits decoded message symbols to a receiver, attributing them to
    // the jammer state active when they completed.
    void credit(int r, long long amount, JammerState s) {
        run.delivered[static_cast<std::size_t>(r)] += amount;
        if (!run.state_delivered.empty()) {
            run.state_delivered[s.mask] += static_cast<double>(amount);
        }
    }

    void mark_complete(int r) {
        auto idx = static_cast<std::size_t>(r);
        if (run.completion_slot[idx] < 0) run.completion_slot[idx] = run.slots;
    }
};

}  // namespace

std::vector<double> SchemeRun::dof_estimate() const {
    std::vector<double> d(delivered.size(), 0.0);
    if (slots <= 0) return d;
    for (std::size_t r = 0; r < delivered.size(); ++r) {
        d[r] = static_cast<double>(delivered[r]) / static_cast<double>(slots);
    }
    return d;
}

DpMode dp_mode_from_string(std::string_view s) {
    if (s == "mat-corner") return DpMode::mat_corner;
    if (s == "user1-priority") return DpMode::user1_priority;
    if (s == "user2-priority") return DpMode::user2_priority;
    throw ArgumentError("unknown DP mode \"" + std::string(s) +
                        "\"; expected mat-corner, user1-priority or user2-priority");
}

std::string dp_mode_to_string(DpMode m) {
    switch (m) {
        case DpMode::mat_corner: return "mat-corner";
        case DpMode::user1_priority: return "user1-priority";
        case DpMode::user2_priority: return "user2-priority";
    }
    return "??";
}

NpPolicy np_policy_from_string(std::string_view s) {
    if (s == "corner-1") return NpPolicy::corner1;
    if (s == "corner-2") return NpPolicy::corner2;
    if (s == "tdma-1") return NpPolicy::tdma1;
    if (s == "tdma-2") return NpPolicy::tdma2;
    throw ArgumentError("unknown NP policy \"" + std::string(s) +
                        "\"; expected corner-1, corner-2, tdma-1 or tdma-2");
}

std::string np_policy_to_string(NpPolicy p) {
    switch (p) {
        case NpPolicy::corner1: return "corner-1";
        case NpPolicy::corner2: return "corner-2";
        case NpPolicy::tdma1: return "tdma-1";
        case NpPolicy::tdma2: return "tdma-2";
    }
    return "??";
}

namespace {

// PP and PD share their accounting: a receiver advances exactly when it is
// clean and still short. They differ in what the transmitter knew, which
// only the trace wording reflects (PP skips jammed receivers up front; PD
// finds out after the slot and retransmits).
SchemeRun run_zero_forcing(Config config, const JammerDistribution& dist,
                           const std::vector<long long>& budgets, std::uint64_t seed,
                           const RunOptions& opts) {
    check_budgets(dist, budgets);
    const int k = dist.num_receivers();
    double expected = 0.0;
    for (int r = 0; r < k; ++r) {
        double lam = dist.marginal(r);
        check_serveable(lam, budgets[static_cast<std::size_t>(r)], r + 1, "zero-forcing");
        if (budgets[static_cast<std::size_t>(r)] > 0) {
            expected = std::max(expected, static_cast<double>(budgets[static_cast<std::size_t>(r)]) / lam);
        }
    }

    Engine e(config, dist, seed, opts, expected);
    e.run.budgets = budgets;
    e.begin_stage(config == Config::PD ? "head-of-line" : "zero-forcing");
    const char* hit = config == Config::PD ? "deliver" : "serve";
    const char* miss = config == Config::PD ? "retransmit" : "skip";

    long long open = 0;
    for (int r = 0; r < k; ++r) {
        if (budgets[static_cast<std::size_t>(r)] > 0) {
            ++open;
        } else {
            e.mark_complete(r);
        }
    }
    while (open > 0) {
        JammerState s = e.step();
        e.count_stage_slot();
        for (int r = 0; r < k; ++r) {
            auto idx = static_cast<std::size_t>(r);
            if (e.run.delivered[idx] >= budgets[idx]) continue;
            if (!s.jammed(r)) {
                e.credit(r, 1, s);
                e.trace(e.run.slots, s, hit, r + 1, e.make_tag());
                if (e.run.delivered[idx] == budgets[idx]) {
                    e.mark_complete(r);
                    --open;
                }
            } else {
                e.trace(e.run.slots, s, miss, r + 1, 0);
            }
        }
    }
    return e.run;
}

}  // namespace

SchemeRun run_pp(const JammerDistribution& dist, const std::vector<long long>& budgets,
                 std::uint64_t seed, const RunOptions& opts) {
    return run_zero_forcing(Config::PP, dist, budgets, seed, opts);
}

SchemeRun run_pd(const JammerDistribution& dist, const std::vector<long long>& budgets,
                 std::uint64_t seed, const RunOptions& opts) {
    return run_zero_forcing(Config::PD, dist, budgets, seed, opts);
}

SchemeRun run_pn(const JammerDistribution& dist, const std::vector<long long>& budgets,
                 std::uint64_t seed, const RunOptions& opts) {
    check_budgets(dist, budgets);
    const int k = dist.num_receivers();
    double expected = 0.0;
    std::vector<ReceiverLedger> ledgers;
    for (int r = 0; r < k; ++r) {
        double lam = dist.marginal(r);
        auto idx = static_cast<std::size_t>(r);
        check_serveable(lam, budgets[idx], r + 1, "the random-combination scheme");
        ledgers.emplace_back(budgets[idx]);
        if (budgets[idx] > 0) {
            expected = std::max(expected, static_cast<double>(budgets[idx]) / lam);
        }
    }

    Engine e(Config::PN, dist, seed, opts, expected);
    e.run.budgets = budgets;
    e.begin_stage("random-combinations");

    long long open = 0;
    for (int r = 0; r < k; ++r) {
        if (budgets[static_cast<std::size_t>(r)] > 0) {
            ++open;
        } else {
            e.mark_complete(r);
        }
    }
    while (open > 0) {
        JammerState s = e.step();
        e.count_stage_slot();
        for (int r = 0; r < k; ++r) {
            auto idx = static_cast<std::size_t>(r);
            if (ledgers[idx].decodable() || budgets[idx] == 0) continue;
            // The stream for r carries one fresh combination of its whole
            // block every slot; only clean slots add information.
            std::uint64_t tag = e.make_tag();
            if (!s.jammed(r)) {
                ledgers[idx].add_intended();
                e.trace(e.run.slots, s, "collect", r + 1, tag);
                if (ledgers[idx].decodable()) {
                    // Block decodes as one unit once budget-many
                    // independent combinations are in hand.
                    e.credit(r, budgets[idx], s);
                    e.mark_complete(r);
                    e.trace(e.run.slots, s, "decode", r + 1, 0);
                    --open;
                }
            } else {
                e.trace(e.run.slots, s, "lost", r + 1, tag);
            }
        }
    }
    return e.run;
}

SchemeRun run_dp(const JammerDistribution& dist, const std::vector<long long>& budgets,
                 DpMode mode, std::uint64_t seed, const RunOptions& opts) {
    check_two_user(dist, "the delayed/perfect scheme");
    check_budgets(dist, budgets);
    const double l00 = dist.prob(JammerState{kBothClean});
    const double l01 = dist.prob(JammerState{kRx2Jammed});
    const double l10 = dist.prob(JammerState{kRx1Jammed});

    double rate1 = l01, rate2 = l10;
    switch (mode) {
        case DpMode::mat_corner:
            rate1 += 2.0 / 3.0 * l00;
            rate2 += 2.0 / 3.0 * l00;
            break;
        case DpMode::user1_priority:
            rate1 += l00;
            break;
        case DpMode::user2_priority:
            rate2 += l00;
            break;
    }
    // Once one receiver finishes, both-clean slots serve the other, so the
    // initial per-receiver rates only underestimate progress.
    check_serveable(dist.marginal(0), budgets[0], 1, "the delayed/perfect scheme");
    check_serveable(dist.marginal(1), budgets[1], 2, "the delayed/perfect scheme");
    double expected = 0.0;
    if (budgets[0] > 0) expected = std::max(expected, budgets[0] / std::max(rate1, 1e-300));
    if (budgets[1] > 0) expected = std::max(expected, budgets[1] / std::max(rate2, 1e-300));

    Engine e(Config::DP, dist, seed, opts, expected);
    e.run.budgets = budgets;
    e.begin_stage("state-separable");

    // Retrospective-alignment machine, advanced only on both-clean slots:
    // slot 0 sends a fresh pair for receiver 1, slot 1 a fresh pair for
    // receiver 2, slot 2 multicasts the two overheard combinations, which
    // completes both pairs at once.
    int mat_phase = 0;
    auto need = [&](int r) {
        return e.run.delivered[static_cast<std::size_t>(r)] < budgets[static_cast<std::size_t>(r)];
    };
    auto finish_if_done = [&](int r) {
        if (!need(r)) e.mark_complete(r);
    };
    finish_if_done(0);
    finish_if_done(1);

    while (need(0) || need(1)) {
        JammerState s = e.step();
        e.count_stage_slot();
        bool clean1 = !s.jammed(0), clean2 = !s.jammed(1);
        if (clean1 && clean2) {
            bool both = need(0) && need(1);
            if (both && mode == DpMode::mat_corner) {
                if (mat_phase == 0) {
                    e.trace(e.run.slots, s, "pair-a", 1, e.make_tag());
                    mat_phase = 1;
                } else if (mat_phase == 1) {
                    e.trace(e.run.slots, s, "pair-b", 2, e.make_tag());
                    mat_phase = 2;
                } else {
                    // Overheard-combination multicast: each receiver cancels
                    // what it already holds and completes its pair.
                    e.trace(e.run.slots, s, "multicast", 0, e.make_tag());
                    e.credit(0, std::min<long long>(2, budgets[0] - e.run.delivered[0]), s);
                    e.credit(1, std::min<long long>(2, budgets[1] - e.run.delivered[1]), s);
                    finish_if_done(0);
                    finish_if_done(1);
                    mat_phase = 0;
                }
            } else {
                // Direct service: either a priority mode, or only one
                // receiver still has demand.
                int r;
                if (both) {
                    r = mode == DpMode::user1_priority ? 0 : 1;
                } else {
                    r = need(0) ? 0 : 1;
                }
                e.credit(r, 1, s);
                e.trace(e.run.slots, s, "serve", r + 1, e.make_tag());
                finish_if_done(r);
            }
        } else if (clean1 && need(0)) {
            e.credit(0, 1, s);
            e.trace(e.run.slots, s, "serve", 1, e.make_tag());
            finish_if_done(0);
        } else if (clean2 && need(1)) {
            e.credit(1, 1, s);
            e.trace(e.run.slots, s, "serve", 2, e.make_tag());
            finish_if_done(1);
        } else {
            e.trace(e.run.slots, s, "idle", 0, 0);
        }
    }
    return e.run;
}

SchemeRun run_dd(const JammerDistribution& dist, const std::vector<long long>& budgets,
                 std::uint64_t seed, const RunOptions& opts) {
    check_two_user(dist, "the delayed/delayed scheme");
    check_budgets(dist, budgets);
    const double l1 = dist.marginal(0), l2 = dist.marginal(1);
    check_serveable(l1, std::max(budgets[0], budgets[1]), 1, "the delayed/delayed scheme");
    check_serveable(l2, std::max(budgets[0], budgets[1]), 2, "the delayed/delayed scheme");
    const double s12 = l1 + l2;
    const auto n1 = budgets[0], n2 = budgets[1];
    double expected = static_cast<double>(n1 + n2) / s12 +
                      std::max(l2 * n1 / (l1 * s12), l1 * n2 / (l2 * s12));

    Engine e(Config::DD, dist, seed, opts, expected);
    e.run.budgets = budgets;
    ReceiverLedger led1(n1), led2(n2);

    // Stage 1: distribute n1 combinations of receiver 1's block so each
    // rests at one of the receivers. Both-clean slots place two distinct
    // combinations (one per receiver); single-clean slots place one; the
    // both-jammed slot repeats with fresh randomness.
    auto distribute = [&](const char* name, ReceiverLedger& own, ReceiverLedger& other,
                          int own_r) {
        e.begin_stage(name);
        long long remaining = own.needed();
        while (remaining > 0) {
            JammerState s = e.step();
            e.count_stage_slot();
            bool own_clean = !s.jammed(own_r);
            bool other_clean = !s.jammed(1 - own_r);
            if (own_clean && other_clean) {
                if (remaining >= 2) {
                    own.add_intended();
                    other.add_side();
                    e.credit(own_r, 1, s);
                    e.trace(e.run.slots, s, "deliver", own_r + 1, e.make_tag());
                    e.trace(e.run.slots, s, "side", (1 - own_r) + 1, e.make_tag());
                    remaining -= 2;
                } else {
                    // Last combination rides alone; both receivers catch the
                    // same one, so nothing is owed for stage 3.
                    own.add_intended();
                    e.credit(own_r, 1, s);
                    e.trace(e.run.slots, s, "deliver", own_r + 1, e.make_tag());
                    remaining -= 1;
                }
            } else if (own_clean) {
                own.add_intended();
                e.credit(own_r, 1, s);
                e.trace(e.run.slots, s, "deliver", own_r + 1, e.make_tag());
                remaining -= 1;
            } else if (other_clean) {
                other.add_side();
                e.trace(e.run.slots, s, "side", (1 - own_r) + 1, e.make_tag());
                remaining -= 1;
            } else {
                e.trace(e.run.slots, s, "retransmit", 0, 0);
            }
        }
    };
    if (n1 > 0) distribute("stage1", led1, led2, 0);
    if (n2 > 0) distribute("stage2", led2, led1, 1);

    // Stage 3: multicast one combination owed to receiver 1 (held by
    // receiver 2) mixed with one owed to receiver 2. A component is
    // replaced as soon as its target was clean; the mix is refreshed with
    // new randomness every slot, so repeats stay independent.
    e.begin_stage("stage3");
    if (led1.decodable()) e.mark_complete(0);
    if (led2.decodable()) e.mark_complete(1);
    while (led2.side_info() > 0 || led1.side_info() > 0) {
        JammerState s = e.step();
        e.count_stage_slot();
        bool clean1 = !s.jammed(0), clean2 = !s.jammed(1);
        if (clean1 && led2.side_info() > 0) {
            led2.consume_side();
            led1.add_intended();
            e.credit(0, 1, s);
            e.trace(e.run.slots, s, "deliver", 1, e.make_tag());
            if (led1.decodable()) {
                e.mark_complete(0);
                e.trace(e.run.slots, s, "decode", 1, 0);
            }
        }
        if (clean2 && led1.side_info() > 0) {
            led1.consume_side();
            led2.add_intended();
            e.credit(1, 1, s);
            e.trace(e.run.slots, s, "deliver", 2, e.make_tag());
            if (led2.decodable()) {
                e.mark_complete(1);
                e.trace(e.run.slots, s, "decode", 2, 0);
            }
        }
        if (!clean1 && !clean2) e.trace(e.run.slots, s, "retransmit", 0, 0);
    }
    return e.run;
}

SchemeRun run_dn(const JammerDistribution& dist, long long n, std::uint64_t seed,
                 const RunOptions& opts) {
    check_two_user(dist, "the delayed/none scheme");
    if (n <= 0) throw ArgumentError("stage length n must be positive");
    const double l1 = dist.marginal(0), l2 = dist.marginal(1);
    check_serveable(l1, n, 1, "the delayed/none scheme");
    check_serveable(l2, n, 2, "the delayed/none scheme");

    const auto m1 = static_cast<long long>(std::llround((1.0 + l1) * static_cast<double>(n)));
    const auto m2 = static_cast<long long>(std::llround((1.0 + l2) * static_cast<double>(n)));
    const auto tau = static_cast<long long>(
        std::ceil(std::max(1.0 / l1, 1.0 / l2) * static_cast<double>(n)));

    // All three stage lengths are fixed up front (the transmitter has no
    // jammer feedback to adapt with), so this run always terminates.
    Engine e(Config::DN, dist, seed, opts,
             static_cast<double>(n) + 2.0 * static_cast<double>(tau));
    e.run.budgets = {m1, m2};

    long long clean1 = 0, clean2 = 0;
    auto fixed_stage = [&](const char* name, long long len, const char* action) {
        e.begin_stage(name);
        for (long long t = 0; t < len; ++t) {
            JammerState s = e.step();
            e.count_stage_slot();
            if (!s.jammed(0)) {
                ++clean1;
                e.trace(e.run.slots, s, action, 1, e.make_tag());
            }
            if (!s.jammed(1)) {
                ++clean2;
                e.trace(e.run.slots, s, action, 2, e.make_tag());
            }
        }
    };
    // Stage 1: n slots of mixed fresh-pair transmissions. Each clean slot
    // leaves the receiver one mixture of its own block plus that slot's
    // cross-block component.
    fixed_stage("stage1-mixtures", n, "mixture");
    // Stages 2 and 3: random combinations of the n reconstructed
    // cross-components for each side.
    fixed_stage("stage2-multicast", tau, "collect");
    fixed_stage("stage3-multicast", tau, "collect");

    // Receiver r's unknowns: its m_r block plus the n cross-components
    // behind its stage-1 mixtures. Every clean slot contributed one
    // equation; the surplus over n is the decodable block dimension, and
    // any shortfall from m_r is counted as lost symbols.
    auto decoded = [&](long long cleans, long long block) {
        return std::clamp<long long>(cleans - n, 0, block);
    };
    long long d1 = decoded(clean1, m1), d2 = decoded(clean2, m2);
    e.credit(0, d1, JammerState{0});
    e.credit(1, d2, JammerState{0});
    if (d1 == m1) e.mark_complete(0);
    if (d2 == m2) e.mark_complete(1);
    return e.run;
}

SchemeRun run_np(const JammerDistribution& dist, const std::vector<long long>& budgets,
                 NpPolicy policy, std::uint64_t seed, const RunOptions& opts) {
    check_two_user(dist, "the none/perfect scheme");
    check_budgets(dist, budgets);
    const double l00 = dist.prob(JammerState{kBothClean});
    const double l01 = dist.prob(JammerState{kRx2Jammed});
    const double l10 = dist.prob(JammerState{kRx1Jammed});

    double rate1 = 0.0, rate2 = 0.0;
    switch (policy) {
        case NpPolicy::corner1: rate1 = l00 + l01; rate2 = l10; break;
        case NpPolicy::corner2: rate1 = l01; rate2 = l00 + l10; break;
        case NpPolicy::tdma1: rate1 = l00 + l01; break;
        case NpPolicy::tdma2: rate2 = l00 + l10; break;
    }
    check_serveable(dist.marginal(0), budgets[0], 1, "the none/perfect scheme");
    check_serveable(dist.marginal(1), budgets[1], 2, "the none/perfect scheme");
    for (int r = 0; r < 2; ++r) {
        double rate = r == 0 ? rate1 : rate2;
        if (budgets[static_cast<std::size_t>(r)] > 0 && rate <= 0.0) {
            throw NonTerminationError("policy " + np_policy_to_string(policy) +
                                          " never serves receiver " + std::to_string(r + 1) +
                                          " under this distribution",
                                      r + 1);
        }
    }
    double expected = 0.0;
    if (budgets[0] > 0) expected = std::max(expected, budgets[0] / rate1);
    if (budgets[1] > 0) expected = std::max(expected, budgets[1] / rate2);

    Engine e(Config::NP, dist, seed, opts, expected);
    e.run.budgets = budgets;
    e.begin_stage("serve-clean");
    auto need = [&](int r) {
        return e.run.delivered[static_cast<std::size_t>(r)] < budgets[static_cast<std::size_t>(r)];
    };
    if (!need(0)) e.mark_complete(0);
    if (!need(1)) e.mark_complete(1);

    while (need(0) || need(1)) {
        JammerState s = e.step();
        e.count_stage_slot();
        bool clean1 = !s.jammed(0), clean2 = !s.jammed(1);
        int serve = -1;
        if (clean1 && clean2) {
            switch (policy) {
                case NpPolicy::corner1: serve = need(0) ? 0 : 1; break;
                case NpPolicy::corner2: serve = need(1) ? 1 : 0; break;
                case NpPolicy::tdma1: serve = 0; break;
                case NpPolicy::tdma2: serve = 1; break;
            }
        } else if (clean1) {
            if (policy != NpPolicy::tdma2) serve = 0;
        } else if (clean2) {
            if (policy != NpPolicy::tdma1) serve = 1;
        }
        if (serve >= 0 && need(serve)) {
            e.credit(serve, 1, s);
            e.trace(e.run.slots, s, "serve", serve + 1, e.make_tag());
            if (!need(serve)) e.mark_complete(serve);
        } else {
            e.trace(e.run.slots, s, "idle", 0, 0);
        }
    }
    return e.run;
}

SchemeRun run_nd(const JammerDistribution& dist, const std::vector<long long>& budgets,
                 std::uint64_t seed, const RunOptions& opts) {
    check_two_user(dist, "the none/delayed scheme");
    check_budgets(dist, budgets);
    const double l00 = dist.prob(JammerState{kBothClean});
    const double l01 = dist.prob(JammerState{kRx2Jammed});
    const double l10 = dist.prob(JammerState{kRx1Jammed});
    const double l1 = l00 + l01, l2 = l00 + l10;
    const double phi = l00 + l01 + l10;
    check_serveable(l1, budgets[0], 1, "the none/delayed scheme");
    check_serveable(l2, budgets[1], 2, "the none/delayed scheme");
    if (budgets[0] + budgets[1] > 0 && phi <= 0.0) {
        throw DegenerateMarginalError(
            "the none/delayed scheme needs some slot with a clean receiver", 1);
    }
    const auto n1 = budgets[0], n2 = budgets[1];
    double expected = static_cast<double>(n1 + n2) / phi +
                      std::max(l10 * n1 / std::max(l1 * phi, 1e-300),
                               l01 * n2 / std::max(l2 * phi, 1e-300));

    Engine e(Config::ND, dist, seed, opts, expected);
    e.run.budgets = budgets;
    ReceiverLedger led1(n1), led2(n2);

    // Stages 1 and 2: one symbol at a time on the single stream. A slot
    // moves the head symbol if anyone heard it; hearing it only at the
    // unintended receiver parks it as side information for stage 3.
    auto distribute = [&](const char* name, ReceiverLedger& own, ReceiverLedger& other,
                          int own_r) {
        e.begin_stage(name);
        long long remaining = own.needed();
        while (remaining > 0) {
            JammerState s = e.step();
            e.count_stage_slot();
            bool own_clean = !s.jammed(own_r);
            bool other_clean = !s.jammed(1 - own_r);
            if (own_clean) {
                // Delivered directly; an overheard copy adds nothing.
                own.add_intended();
                e.credit(own_r, 1, s);
                e.trace(e.run.slots, s, "deliver", own_r + 1, e.make_tag());
                remaining -= 1;
            } else if (other_clean) {
                other.add_side();
                e.trace(e.run.slots, s, "side", (1 - own_r) + 1, e.make_tag());
                remaining -= 1;
            } else {
                e.trace(e.run.slots, s, "retransmit", 0, 0);
            }
        }
    };
    if (n1 > 0) distribute("stage1", led1, led2, 0);
    if (n2 > 0) distribute("stage2", led2, led1, 1);

    e.begin_stage("stage3");
    if (led1.decodable()) e.mark_complete(0);
    if (led2.decodable()) e.mark_complete(1);
    while (led2.side_info() > 0 || led1.side_info() > 0) {
        JammerState s = e.step();
        e.count_stage_slot();
        bool clean1 = !s.jammed(0), clean2 = !s.jammed(1);
        if (clean1 && led2.side_info() > 0) {
            led2.consume_side();
            led1.add_intended();
            e.credit(0, 1, s);
            e.trace(e.run.slots, s, "deliver", 1, e.make_tag());
            if (led1.decodable()) e.mark_complete(0);
        }
        if (clean2 && led1.side_info() > 0) {
            led1.consume_side();
            led2.add_intended();
            e.credit(1, 1, s);
            e.trace(e.run.slots, s, "deliver", 2, e.make_tag());
            if (led2.decodable()) e.mark_complete(1);
        }
        if (!clean1 && !clean2) e.trace(e.run.slots, s, "retransmit", 0, 0);
    }
    return e.run;
}

SchemeRun run_nn(const JammerDistribution& dist, long long horizon,
                 const std::vector<double>& share, std::uint64_t seed,
                 const RunOptions& opts) {
    const int k = dist.num_receivers();
    if (horizon <= 0) throw ArgumentError("horizon must be positive");
    if (share.size() != static_cast<std::size_t>(k)) {
        throw ArgumentError("expected " + std::to_string(k) + " share entries, got " +
                            std::to_string(share.size()));
    }
    double total_share = 0.0;
    for (double f : share) {
        if (f < 0.0) throw ArgumentError("shares must be non-negative");
        total_share += f;
    }
    if (total_share > 1.0 + 1e-9) {
        throw ArgumentError("shares must sum to at most 1");
    }

    Engine e(Config::NN, dist, seed, opts, static_cast<double>(horizon));
    e.run.budgets.assign(static_cast<std::size_t>(k), 0);

    // Phase r: share[r] of the horizon, carrying fresh random combinations
    // of a ceil(lambda_r share_r horizon) block. Clean slots accumulate
    // independent combinations; a shortfall at the phase end means the
    // block cannot be isolated in full and the residual is lost.
    long long used = 0;
    double boundary = 0.0;
    for (int r = 0; r < k; ++r) {
        auto idx = static_cast<std::size_t>(r);
        boundary += share[idx] * static_cast<double>(horizon);
        long long phase_end = std::llround(boundary);
        long long duration = phase_end - used;
        double lam = dist.marginal(r);
        auto block = static_cast<long long>(
            std::ceil(lam * share[idx] * static_cast<double>(horizon) - 1e-9));
        e.run.budgets[idx] = block;
        e.begin_stage("phase" + std::to_string(r + 1));
        long long cleans = 0;
        for (long long t = 0; t < duration; ++t) {
            JammerState s = e.step();
            e.count_stage_slot();
            if (!s.jammed(r)) {
                ++cleans;
                e.trace(e.run.slots, s, "collect", r + 1, e.make_tag());
            }
        }
        long long decoded = std::min(cleans, block);
        e.credit(r, decoded, JammerState{0});
        if (decoded == block) e.mark_complete(r);
        used = phase_end;
    }
    if (used < horizon) {
        e.begin_stage("idle-tail");
        for (long long t = used; t < horizon; ++t) {
            JammerState s = e.step();
            e.count_stage_slot();
            e.trace(e.run.slots, s, "idle", 0, 0);
        }
    }
    return e.run;
}

SchemeRun run_dd_k(const JammerDistribution& dist, long long budget_per_receiver,
                   std::uint64_t seed, const RunOptions& opts) {
    if (!dist.is_symmetric()) {
        throw PreconditionError("the K-user delayed/delayed scheme needs a symmetric "
                                "jammer distribution");
    }
    if (budget_per_receiver <= 0) throw ArgumentError("budget must be positive");
    const int k = dist.num_receivers();
    const double lam = dist.lambda_eta();
    if (lam <= 0.0) {
        throw DegenerateMarginalError(
            "the K-user delayed/delayed scheme cannot run: every receiver is always jammed", 1);
    }

    // One repetition delivers K fresh symbols per receiver through a
    // cascade of K phases. Phase j drains pool_j order-j combinations at
    // (K-j+1) per K collective clean receptions and seeds phase j+1 with
    // pool_j * j(K-j) / ((j+1)(K-j+1)) combinations.
    const long long reps = (budget_per_receiver + k - 1) / k;
    double expected = 0.0;
    {
        double pool = static_cast<double>(reps) * k * k;
        for (int j = 1; j <= k; ++j) {
            expected += pool / ((k - j + 1) * lam);
            pool *= static_cast<double>(j) * (k - j) /
                    (static_cast<double>(j + 1) * (k - j + 1));
        }
    }

    Engine e(Config::DD, dist, seed, opts, expected);
    e.run.config = Config::DD;
    e.run.budgets.assign(static_cast<std::size_t>(k), budget_per_receiver);

    double pool = static_cast<double>(reps) * k * k;
    for (int j = 1; j <= k; ++j) {
        e.begin_stage("phase" + std::to_string(j));
        // K collective clean receptions absorb (K-j+1) combinations, so
        // the phase needs pool * K / (K-j+1) of them in total.
        double quota = pool * k / (k - j + 1);
        double cleans = 0.0;
        while (cleans < quota) {
            // Per-receiver success is Bernoulli(lambda_eta); only the
            // marginal clean rate enters the phase durations.
            std::uint32_t mask = 0;
            int u = 0;
            for (int r = 0; r < k; ++r) {
                if (e.rng.bernoulli(lam)) {
                    ++u;
                } else {
                    mask |= 1u << r;
                }
            }
            JammerState s{mask};
            e.account(s);
            e.count_stage_slot();
            cleans += u;
            e.trace(e.run.slots, s, "absorb", 0, static_cast<std::uint64_t>(u));
        }
        pool *= static_cast<double>(j) * (k - j) / (static_cast<double>(j + 1) * (k - j + 1));
    }
    for (int r = 0; r < k; ++r) {
        e.credit(r, std::min(reps * k, budget_per_receiver), JammerState{0});
        e.mark_complete(r);
    }
    return e.run;
}

namespace {

// Fluid retrospective-alignment tracker for m jamming-free receivers.
// Advancing it one slot yields m clean receptions; completed phase
// cascades deliver m symbols per active receiver.
struct AlignmentMachine {
    int m = 0;
    int phase = 1;
    double pool = 0.0;
    double quota = 0.0;
    double cleans = 0.0;
    long long delivered_total = 0;

    void reset_cycle() {
        phase = 1;
        pool = static_cast<double>(m) * m;
        quota = pool;  // K/(K-j+1) = m/m at phase 1
        cleans = 0.0;
    }

    explicit AlignmentMachine(int receivers) : m(receivers) { reset_cycle(); }

    // One slot with all m receivers clean; returns symbols completed now.
    long long advance() {
        if (m == 1) return 1;  // plain transmission, one symbol per slot
        cleans += m;
        while (cleans >= quota) {
            cleans -= quota;
            if (phase == m) {
                reset_cycle();
                // Cycle complete: m*m order-1 symbols decode, m per receiver.
                return static_cast<long long>(m) * m;
            }
            pool *= static_cast<double>(phase) * (m - phase) /
                    (static_cast<double>(phase + 1) * (m - phase + 1));
            ++phase;
            quota = pool * m / (m - phase + 1);
        }
        return 0;
    }
};

}  // namespace

SchemeRun run_dp_k(const JammerDistribution& dist, long long budget_per_receiver,
                   std::uint64_t seed, const RunOptions& opts) {
    if (!dist.is_symmetric()) {
        throw PreconditionError("the K-user delayed/perfect scheme needs a symmetric "
                                "jammer distribution");
    }
    if (budget_per_receiver <= 0) throw ArgumentError("budget must be positive");
    const int k = dist.num_receivers();
    const double lam = dist.lambda_eta();
    if (lam <= 0.0) {
        throw DegenerateMarginalError(
            "the K-user delayed/perfect scheme cannot run: every receiver is always jammed", 1);
    }
    double sum_rate = 0.0;
    {
        std::vector<double> eta = dist.class_probabilities();
        for (int j = 0; j < k; ++j) {
            double h = 0.0;
            for (int i = 1; i <= k - j; ++i) h += 1.0 / i;
            sum_rate += eta[static_cast<std::size_t>(j)] * (k - j) / h;
        }
    }
    const long long target = budget_per_receiver * k;
    double expected = static_cast<double>(target) / sum_rate;

    Engine e(Config::DP, dist, seed, opts, expected);
    e.run.budgets.assign(static_cast<std::size_t>(k), budget_per_receiver);
    e.begin_stage("per-cardinality");

    // One alignment machine per clean-set cardinality; the slot's observed
    // clean count picks which machine advances.
    std::vector<AlignmentMachine> machines;
    machines.reserve(static_cast<std::size_t>(k));
    for (int m = 1; m <= k; ++m) machines.emplace_back(m);

    long long total = 0;
    while (total < target) {
        JammerState s = e.step();
        e.count_stage_slot();
        int clean = k - s.num_jammed();
        if (clean == 0) {
            e.trace(e.run.slots, s, "idle", 0, 0);
            continue;
        }
        long long done = machines[static_cast<std::size_t>(clean - 1)].advance();
        if (done > 0) {
            total += done;
            if (!e.run.state_delivered.empty()) {
                e.run.state_delivered[s.mask] += static_cast<double>(done);
            }
            e.trace(e.run.slots, s, "decode-batch", 0, static_cast<std::uint64_t>(done));
        } else {
            e.trace(e.run.slots, s, "absorb", 0, 0);
        }
    }
    for (int r = 0; r < k; ++r) {
        e.run.delivered[static_cast<std::size_t>(r)] = budget_per_receiver;
        e.mark_complete(r);
    }
    return e.run;
}

void write_trace(std::ostream& os, const SchemeRun& run) {
    os << "slot,state,stage,action,receiver,lc_tag\n";
    for (const TraceEvent& ev : run.trace) {
        os << ev.slot << ',' << state_to_bitstring(ev.state, run.num_receivers) << ','
           << ev.stage << ',' << ev.action << ',' << ev.receiver << ',' << ev.lc_tag << '\n';
    }
}

}  // namespace jamdof
