// Command-line front end: DoF regions, scheme simulation, SNR slope fits
// and analytic sweeps for the jammed MISO broadcast channel.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "jamdof/baseband.hpp"
#include "jamdof/config.hpp"
#include "jamdof/errors.hpp"
#include "jamdof/estimator.hpp"
#include "jamdof/jammer.hpp"
#include "jamdof/regions.hpp"
#include "jamdof/rng.hpp"
#include "jamdof/schemes.hpp"

using nlohmann::json;
using namespace jamdof;

namespace {

constexpr const char* kVersion = "0.1.0";

// Exit codes, also listed in --help: 0 success, 2 invalid input,
// 3 degenerate marginal, 4 simulated point outside its region,
// 5 scheme failed to terminate.
enum ExitCode { kOk = 0, kInvalidInput = 2, kDegenerate = 3, kOutsideRegion = 4, kNoTermination = 5 };

struct DistOptions {
    std::string dist_text;
    std::vector<double> eta;
};

void add_dist_options(CLI::App* cmd, DistOptions& opt) {
    cmd->add_option("--dist", opt.dist_text,
                    "jammer distribution, inline (\"00:0.3,10:0.2,...\") or @file");
    cmd->add_option("--eta", opt.eta,
                    "symmetric distribution by jammed-count class probabilities")
        ->delimiter(',');
}

JammerDistribution load_dist(const DistOptions& opt) {
    if (!opt.dist_text.empty() && !opt.eta.empty())
        throw ArgumentError("give either --dist or --eta, not both");
    if (!opt.eta.empty()) {
        int K = static_cast<int>(opt.eta.size()) - 1;
        return JammerDistribution::symmetric(K, opt.eta);
    }
    if (opt.dist_text.empty()) throw ArgumentError("a distribution is required (--dist or --eta)");
    if (opt.dist_text.front() == '@') {
        std::ifstream in(opt.dist_text.substr(1));
        if (!in) throw ArgumentError("cannot read distribution file " + opt.dist_text.substr(1));
        std::stringstream buf;
        buf << in.rdbuf();
        return parse_distribution(buf.str());
    }
    return parse_distribution(opt.dist_text);
}

json dist_to_json(const JammerDistribution& dist) {
    json j;
    const int K = dist.num_receivers();
    j["num_receivers"] = K;
    j["marginals"] = dist.marginals();
    if (dist.is_symmetric()) j["eta"] = dist.class_probabilities();
    if (K <= 8) {
        json states = json::object();
        for (std::uint32_t m = 0; m < (1u << K); ++m) {
            double p = dist.prob(JammerState{m});
            if (p > 0.0) states[state_to_bitstring(JammerState{m}, K)] = p;
        }
        j["states"] = states;
    }
    return j;
}

json make_meta(const char* command) {
    json m;
    m["tool"] = "jamdof";
    m["version"] = kVersion;
    m["command"] = command;
    return m;
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        if (text.empty() || text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw ArgumentError("cannot write to " + out_path);
    out << text;
    if (text.empty() || text.back() != '\n') out << '\n';
}

void emit(const std::string& out_path, const json& j) { emit(out_path, j.dump(2)); }

json region_to_json(const DofRegion& region) {
    json j;
    switch (region.kind()) {
        case RegionKind::box: j["kind"] = "box"; break;
        case RegionKind::simplex: j["kind"] = "simplex"; break;
        case RegionKind::general: j["kind"] = "general"; break;
    }
    json hs = json::array();
    for (const HalfSpace& h : region.halfspaces())
        hs.push_back({{"coeffs", h.coeffs}, {"bound", h.bound}});
    j["halfspaces"] = hs;
    if (region.dim() == 2) {
        json verts = json::array();
        for (const DofPoint& v : region.vertices()) verts.push_back(v);
        j["vertices"] = verts;
    }
    std::vector<double> ones(static_cast<std::size_t>(region.dim()), 1.0);
    j["sum_dof"] = max_weighted_sum(region, ones);
    return j;
}

// ---- states ----------------------------------------------------------

int cmd_states(int K, const std::string& out_path) {
    std::ostringstream os;
    os << "state convention: bitstring S1..S" << K << ", leftmost bit is receiver 1, 1 = jammed\n";
    os << "mask bit k (0-based) carries receiver k+1's flag, so \"10\" <-> mask 1\n\n";
    os << std::left << std::setw(6) << "mask" << std::setw(11) << "bitstring" << std::setw(18)
       << "jammed-receivers";
    if (K == 2) os << "symbol";
    os << '\n';
    for (std::uint32_t m = 0; m < (1u << K); ++m) {
        JammerState s{m};
        std::string bits = state_to_bitstring(s, K);
        std::string jammed;
        for (int r = 0; r < K; ++r)
            if (s.jammed(r)) {
                if (!jammed.empty()) jammed += ',';
                jammed += std::to_string(r + 1);
            }
        if (jammed.empty()) jammed = "-";
        os << std::left << std::setw(6) << m << std::setw(11) << bits << std::setw(18) << jammed;
        if (K == 2) os << "l" << bits;
        os << '\n';
    }
    emit(out_path, os.str());
    return kOk;
}

// ---- region ----------------------------------------------------------

int cmd_region(const std::string& config_text, const DistOptions& dopt,
               const std::string& out_path) {
    Config config = config_from_string(config_text);
    JammerDistribution dist = load_dist(dopt);
    DofRegion region = region_for_config(config, dist);

    json j;
    j["meta"] = make_meta("region");
    j["meta"]["config"] = config_to_string(config);
    j["distribution"] = dist_to_json(dist);
    j["region"] = region_to_json(region);

    if (dist.num_receivers() == 2) {
        json pts = json::object();
        switch (config) {
            case Config::DP: pts["mat_corner"] = dp_mat_corner(dist); break;
            case Config::DD: pts["corner"] = dd_corner(dist); break;
            case Config::ND: pts["corner"] = nd_corner(dist); break;
            case Config::DN: pts["scheme_point"] = dn_point(dist); break;
            default: break;
        }
        if (!pts.empty()) j["special_points"] = pts;
    }
    emit(out_path, j);
    return kOk;
}

// ---- simulate --------------------------------------------------------

struct SimulateArgs {
    std::string config_text;
    DistOptions dist;
    std::vector<long long> budgets;
    int trials = 20;
    std::uint64_t seed = 1;
    std::string policy;
    std::vector<double> share;
    double tol = 0.025;
    bool serial = false;
    std::string trace_path;
    std::string out_path;
};

SchemeRunner make_runner(Config config, const JammerDistribution& dist,
                         std::vector<long long> budgets, const std::string& policy,
                         const std::vector<double>& share, const RunOptions& opts = {}) {
    const int K = dist.num_receivers();
    if (budgets.empty()) throw ArgumentError("--budgets is required for simulate");
    const bool single_budget =
        config == Config::DN || (config == Config::NN) ||
        (K > 2 && (config == Config::DD || config == Config::DP));
    if (!single_budget) {
        if (budgets.size() == 1) budgets.assign(static_cast<std::size_t>(K), budgets[0]);
        if (static_cast<int>(budgets.size()) != K)
            throw ArgumentError("--budgets needs one entry per receiver");
    } else if (budgets.size() != 1) {
        throw ArgumentError("this configuration takes a single --budgets value");
    }
    if (!policy.empty() && config != Config::DP && config != Config::NP)
        throw ArgumentError("--policy only applies to DP and NP");
    if (!share.empty() && config != Config::NN)
        throw ArgumentError("--share only applies to NN");

    switch (config) {
        case Config::PP:
            return [=](std::uint64_t s) { return run_pp(dist, budgets, s, opts); };
        case Config::PD:
            return [=](std::uint64_t s) { return run_pd(dist, budgets, s, opts); };
        case Config::PN:
            return [=](std::uint64_t s) { return run_pn(dist, budgets, s, opts); };
        case Config::DP: {
            if (K > 2) {
                if (!policy.empty() && policy != "mat-corner")
                    throw ArgumentError("the K-user DP scheme has no policy choices");
                long long b = budgets[0];
                return [=](std::uint64_t s) { return run_dp_k(dist, b, s, opts); };
            }
            DpMode mode = policy.empty() ? DpMode::mat_corner : dp_mode_from_string(policy);
            return [=](std::uint64_t s) { return run_dp(dist, budgets, mode, s, opts); };
        }
        case Config::DD: {
            if (K > 2) {
                long long b = budgets[0];
                return [=](std::uint64_t s) { return run_dd_k(dist, b, s, opts); };
            }
            return [=](std::uint64_t s) { return run_dd(dist, budgets, s, opts); };
        }
        case Config::DN: {
            long long n = budgets[0];
            return [=](std::uint64_t s) { return run_dn(dist, n, s, opts); };
        }
        case Config::NP: {
            NpPolicy pol = policy.empty() ? NpPolicy::corner1 : np_policy_from_string(policy);
            return [=](std::uint64_t s) { return run_np(dist, budgets, pol, s, opts); };
        }
        case Config::ND:
            return [=](std::uint64_t s) { return run_nd(dist, budgets, s, opts); };
        case Config::NN: {
            long long horizon = budgets[0];
            std::vector<double> sh = share;
            if (sh.empty()) sh.assign(static_cast<std::size_t>(K), 1.0 / K);
            return [=](std::uint64_t s) { return run_nn(dist, horizon, sh, s, opts); };
        }
    }
    throw ArgumentError("unknown configuration");
}

int cmd_simulate(const SimulateArgs& a) {
    Config config = config_from_string(a.config_text);
    JammerDistribution dist = load_dist(a.dist);
    const int K = dist.num_receivers();

    SchemeRunner runner = make_runner(config, dist, a.budgets, a.policy, a.share);
    Parallelism par = a.serial ? Parallelism::serial : Parallelism::automatic;
    EmpiricalDof est = estimate(runner, config, K, a.trials, a.seed, par);

    if (!a.trace_path.empty()) {
        // one traced run on trial 0's stream
        RunOptions topts;
        topts.record_trace = true;
        SchemeRunner traced = make_runner(config, dist, a.budgets, a.policy, a.share, topts);
        std::ofstream tf(a.trace_path);
        if (!tf) throw ArgumentError("cannot write trace to " + a.trace_path);
        write_trace(tf, traced(Rng::derive(a.seed, 0)));
    }

    json j;
    j["meta"] = make_meta("simulate");
    j["meta"]["config"] = config_to_string(config);
    j["meta"]["seed"] = a.seed;
    j["meta"]["trials"] = a.trials;
    j["meta"]["threads"] = a.serial ? 1 : effective_threads();
    j["distribution"] = dist_to_json(dist);
    j["budgets"] = a.budgets;
    if (!a.policy.empty()) j["policy"] = a.policy;
    if (!a.share.empty()) j["share"] = a.share;
    j["per_receiver"] = {{"mean", est.mean}, {"std_error", est.std_error}};
    j["sum"] = {{"mean", est.sum_mean}, {"std_error", est.sum_std_error}};
    j["mean_slots"] = est.mean_slots;

    int code = kOk;
    json check;
    check["tol"] = a.tol;
    if (K == 2 || config == Config::PP || config == Config::PD || config == Config::PN ||
        config == Config::NN) {
        DofRegion region = region_for_config(config, dist);
        RegionVerdict v = check_against_region(est.mean, region, a.tol);
        check["verdict"] = verdict_to_string(v);
        if (v == RegionVerdict::outside) code = kOutsideRegion;
    } else {
        // K-user DD/DP: the analytic yardstick is the sum rate
        double analytic = config == Config::DD ? sum_dof_dd_k(dist) : sum_dof_dp_k(dist);
        check["sum_dof_analytic"] = analytic;
        double slack = analytic - est.sum_mean;
        const char* verdict = slack < -a.tol ? "outside" : (slack <= a.tol ? "boundary" : "inside");
        check["verdict"] = verdict;
        if (slack < -a.tol) code = kOutsideRegion;
    }
    j["region_check"] = check;
    emit(a.out_path, j);
    return code;
}

// ---- sweep -----------------------------------------------------------

int cmd_sweep(const std::string& kind, int max_k, int points, const std::string& out_path) {
    std::ostringstream os;
    if (kind == "k") {
        if (max_k < 1 || max_k > 31) throw ArgumentError("--max-k must be in 1..31");
        os << "K,dof_mat,sum_dp,sum_dd,gap_dp_dd,bound_dp_dd,gap_mat_dp,bound_mat_dp\n";
        for (int K = 1; K <= max_k; ++K) {
            // every receiver jammed independently with probability 1/2
            std::vector<double> eta(static_cast<std::size_t>(K) + 1);
            double scale = std::ldexp(1.0, -K);
            for (int jn = 0; jn <= K; ++jn)
                eta[static_cast<std::size_t>(jn)] = binomial(K, jn) * scale;
            JammerDistribution dist = JammerDistribution::symmetric(K, eta);
            double mat = dof_mat(K);
            double dp = sum_dof_dp_k(dist);
            double dd = sum_dof_dd_k(dist);
            os << K << ',' << mat << ',' << dp << ',' << dd << ',' << (dp - dd) << ','
               << gap_dp_dd_lower_bound(K) << ',' << (mat - dp) << ','
               << gap_mat_dp_lower_bound(K) << '\n';
        }
    } else if (kind == "dn") {
        if (points < 2 || points > 2000) throw ArgumentError("--points must be in 2..2000");
        os << "lambda1,lambda2,dn_sum,nn_sum,condition,dominates\n";
        for (int i = 1; i <= points; ++i) {
            for (int k = 1; k <= points; ++k) {
                double l1 = static_cast<double>(i) / points;
                double l2 = static_cast<double>(k) / points;
                // independent jamming with these marginals
                JammerDistribution dist = JammerDistribution::from_probs(
                    2, {l1 * l2, (1 - l1) * l2, l1 * (1 - l2), (1 - l1) * (1 - l2)});
                DofRegion dn = region_dn_inner(dist);
                DofRegion nn = region_nn(dist);
                double dn_sum = max_weighted_sum(dn, {1.0, 1.0});
                double nn_sum = max_weighted_sum(nn, {1.0, 1.0});
                double condition = std::abs(l1 - l2) / (l1 * l2);
                bool dominates = is_subset(nn, dn) && !is_subset(dn, nn);
                os << l1 << ',' << l2 << ',' << dn_sum << ',' << nn_sum << ',' << condition << ','
                   << (dominates ? 1 : 0) << '\n';
            }
        }
    } else {
        throw ArgumentError("unknown sweep kind '" + kind + "' (expected: k, dn)");
    }
    emit(out_path, os.str());
    return kOk;
}

// ---- slope -----------------------------------------------------------

int cmd_slope(const std::string& config_text, const DistOptions& dopt,
              const std::vector<double>& grid, int slots, std::uint64_t seed,
              const std::vector<double>& share, bool serial, const std::string& out_path) {
    Config config = config_from_string(config_text);
    JammerDistribution dist = load_dist(dopt);
    Parallelism par = serial ? Parallelism::serial : Parallelism::automatic;
    SlopeEstimate est = estimate_slope(config, dist, grid, slots, seed, share, par);

    json j;
    j["meta"] = make_meta("slope");
    j["meta"]["config"] = config_to_string(config);
    j["meta"]["seed"] = seed;
    j["meta"]["slots_per_point"] = slots;
    j["distribution"] = dist_to_json(dist);
    j["grid_db"] = est.grid_db;
    j["slope"] = est.slope;
    j["intercept"] = est.intercept;
    j["r_squared"] = est.r_squared;
    j["mean_rates"] = est.mean_rates;
    emit(out_path, j);
    return kOk;
}

// ---- compare ---------------------------------------------------------

int cmd_compare(const DistOptions& dopt, const std::string& out_path) {
    JammerDistribution dist = load_dist(dopt);
    if (dist.num_receivers() != 2)
        throw ArgumentError("compare covers the two-user configurations");
    std::ostringstream os;
    os << "config,sum_dof\n";
    for (Config c : {Config::PP, Config::PD, Config::PN, Config::DP, Config::DD, Config::DN,
                     Config::NP, Config::ND, Config::NN}) {
        DofRegion region = region_for_config(c, dist);
        os << config_to_string(c) << ',' << max_weighted_sum(region, {1.0, 1.0}) << '\n';
    }
    emit(out_path, os.str());
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "DoF regions and transmission-scheme simulation for the MISO broadcast\n"
        "channel under time-varying jamming.\n"
        "Exit codes: 0 ok, 2 invalid input, 3 degenerate marginal,\n"
        "4 simulated point outside its region, 5 scheme did not terminate."};
    app.require_subcommand(1);

    // states
    auto* states = app.add_subcommand("states", "print the jammer-state mask convention");
    int states_k = 2;
    std::string states_out;
    states->add_option("K", states_k, "number of receivers")->check(CLI::Range(1, 8));
    states->add_option("--out", states_out, "write to file instead of stdout");

    // region
    auto* region = app.add_subcommand("region", "print a DoF region as JSON");
    std::string region_config, region_out;
    DistOptions region_dist;
    region->add_option("--config", region_config, "CSIT/JSIT pair, e.g. PP, DD, nn")->required();
    add_dist_options(region, region_dist);
    region->add_option("--out", region_out, "write to file instead of stdout");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo run of a transmission scheme");
    SimulateArgs sim;
    simulate->add_option("--config", sim.config_text, "CSIT/JSIT pair")->required();
    add_dist_options(simulate, sim.dist);
    simulate->add_option("--budgets", sim.budgets,
                         "per-receiver symbol budgets; single value for DN (stage length), "
                         "NN (horizon) and K-user DD/DP")
        ->delimiter(',');
    simulate->add_option("--trials", sim.trials, "independent runs")->check(CLI::Range(1, 100000));
    simulate->add_option("--seed", sim.seed, "base seed; trial i uses a derived stream");
    simulate->add_option("--policy", sim.policy,
                         "DP: mat-corner|user1-priority|user2-priority; "
                         "NP: corner-1|corner-2|tdma-1|tdma-2");
    simulate->add_option("--share", sim.share, "NN time shares")->delimiter(',');
    simulate->add_option("--tol", sim.tol, "region-check tolerance");
    simulate->add_flag("--serial", sim.serial, "disable the parallel estimator");
    simulate->add_option("--trace", sim.trace_path, "write a slot trace CSV of trial 0");
    simulate->add_option("--out", sim.out_path, "write to file instead of stdout");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "analytic CSV sweeps");
    std::string sweep_kind = "k", sweep_out;
    int sweep_max_k = 12, sweep_points = 50;
    sweep->add_option("--kind", sweep_kind, "k: scaling with receivers; dn: DN vs NN surface");
    sweep->add_option("--max-k", sweep_max_k, "largest K for kind=k");
    sweep->add_option("--points", sweep_points, "grid resolution per axis for kind=dn");
    sweep->add_option("--out", sweep_out, "write to file instead of stdout");

    // slope
    auto* slope = app.add_subcommand("slope", "rate-vs-SNR slope fit (PP, PN, NN)");
    std::string slope_config, slope_out;
    DistOptions slope_dist;
    std::vector<double> slope_grid = {30, 40, 50, 60};
    std::vector<double> slope_share;
    int slope_slots = 3000;
    std::uint64_t slope_seed = 1;
    bool slope_serial = false;
    slope->add_option("--config", slope_config, "PP, PN or NN")->required();
    add_dist_options(slope, slope_dist);
    slope->add_option("--grid", slope_grid, "SNR grid in dB, ascending, span >= 30")
        ->delimiter(',');
    slope->add_option("--slots", slope_slots, "slots per grid point");
    slope->add_option("--seed", slope_seed, "base seed");
    slope->add_option("--share", slope_share, "NN time shares")->delimiter(',');
    slope->add_flag("--serial", slope_serial, "disable grid-point parallelism");
    slope->add_option("--out", slope_out, "write to file instead of stdout");

    // compare
    auto* compare = app.add_subcommand("compare", "sum DoF of all nine configurations (CSV)");
    DistOptions compare_dist;
    std::string compare_out;
    add_dist_options(compare, compare_dist);
    compare->add_option("--out", compare_out, "write to file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kInvalidInput;
    }

    try {
        if (states->parsed()) return cmd_states(states_k, states_out);
        if (region->parsed()) return cmd_region(region_config, region_dist, region_out);
        if (simulate->parsed()) return cmd_simulate(sim);
        if (sweep->parsed()) return cmd_sweep(sweep_kind, sweep_max_k, sweep_points, sweep_out);
        if (slope->parsed())
            return cmd_slope(slope_config, slope_dist, slope_grid, slope_slots, slope_seed,
                             slope_share, slope_serial, slope_out);
        if (compare->parsed()) return cmd_compare(compare_dist, compare_out);
    } catch (const DegenerateMarginalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDegenerate;
    } catch (const NonTerminationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNoTermination;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalidInput;
    }
    return kOk;
}
