#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "jamdof/config.hpp"
#include "jamdof/jammer.hpp"

namespace jamdof {

// One information symbol of a receiver's message block.
struct SymbolId {
    int receiver = 0;  // 0-based
    long long index = 0;

    friend bool operator==(const SymbolId&, const SymbolId&) = default;
};

// Contiguous run of one receiver's symbols, indices [lo, hi).
struct SymbolSpan {
    int receiver = 0;
    long long lo = 0;
    long long hi = 0;
};

// A generic linear combination over message symbols. Under the genericity
// assumption any m distinct-tagged combinations drawn over an m-symbol
// block are linearly independent, so the ledger only needs tags and spans,
// never coefficient values.
struct LinearCombination {
    std::uint64_t tag = 0;  // unique per run, 1-based; 0 means "none"
    int order = 1;          // number of receivers whose symbols appear
    std::vector<SymbolSpan> parts;
};

// Per-receiver decoding state at accounting fidelity.
//
// held counts independent combinations of this receiver's own block
// (clamped at the block size: extra combinations add no information).
// side_info counts combinations this receiver holds that are useful to
// some other receiver and still awaiting delivery there.
class ReceiverLedger {
public:
    explicit ReceiverLedger(long long block_size) : needed_(block_size) {}

    long long needed() const { return needed_; }
    long long held() const { return held_; }
    long long side_info() const { return side_info_; }
    bool decodable() const { return held_ >= needed_; }
    long long missing() const { return needed_ - held_; }

    // Returns true if the combination added information (held < needed).
    bool add_intended() {
        if (held_ >= needed_) return false;
        ++held_;
        return true;
    }
    void add_side() { ++side_info_; }
    void consume_side() { --side_info_; }

private:
    long long needed_;
    long long held_ = 0;
    long long side_info_ = 0;
};

// One slot-level event of a scheme run (recorded only when tracing).
struct TraceEvent {
    long long slot = 0;
    JammerState state;
    std::string stage;
    std::string action;
    int receiver = 0;        // 1-based as printed; 0 = no specific receiver
    std::uint64_t lc_tag = 0;
};

struct StageStat {
    std::string name;
    long long slots = 0;
};

// Result of one seeded scheme run.
struct SchemeRun {
    Config config = Config::NN;
    int num_receivers = 0;
    std::uint64_t seed = 0;
    std::vector<long long> budgets;
    std::vector<long long> delivered;
    long long slots = 0;

    std::vector<StageStat> stages;           // per-stage / per-phase slot counts
    std::vector<long long> completion_slot;  // slot the receiver's block decoded; -1 if never

    // Per-jammer-state accounting, filled for dense distributions with
    // K <= 8: slots observed in each state and message symbols credited
    // while in it.
    std::vector<long long> state_slots;
    std::vector<double> state_delivered;

    std::vector<TraceEvent> trace;

    // delivered_r / slots; zeros if no slot elapsed.
    std::vector<double> dof_estimate() const;
};

struct RunOptions {
    bool record_trace = false;
    // Slot cap as a multiple of the analytic expected duration; exceeding
    // it raises NonTerminationError naming a starved receiver.
    double guard_factor = 50.0;
};

// State-00 policy under delayed CSIT + perfect JSIT.
enum class DpMode { mat_corner, user1_priority, user2_priority };
DpMode dp_mode_from_string(std::string_view s);
std::string dp_mode_to_string(DpMode m);

// Service policy under no CSIT + perfect JSIT (corner-k breaks state-00
// ties toward receiver k; tdma-k serves only receiver k).
enum class NpPolicy { corner1, corner2, tdma1, tdma2 };
NpPolicy np_policy_from_string(std::string_view s);
std::string np_policy_to_string(NpPolicy p);

// ---- 2-user transmission schemes ----
// budgets[r] = message symbols to deliver to receiver r+1 except where
// noted. Every run is deterministic in (dist, parameters, seed).

// Perfect CSIT + perfect JSIT: zero-forcing to every currently clean
// receiver with an unmet budget.
SchemeRun run_pp(const JammerDistribution& dist, const std::vector<long long>& budgets,
                 std::uint64_t seed, const RunOptions& opts = {});

// Perfect CSIT + delayed JSIT: head-of-line retransmission; a symbol
// leaves the queue once a (delayed) clean report confirms it.
SchemeRun run_pd(const JammerDistribution& dist, const std::vector<long long>& budgets,
                 std::uint64_t seed, const RunOptions& opts = {});

// Perfect CSIT + no JSIT: each receiver's stream carries fresh random
// combinations of its whole block; the block decodes when budget-many
// clean slots have accumulated.
SchemeRun run_pn(const JammerDistribution& dist, const std::vector<long long>& budgets,
                 std::uint64_t seed, const RunOptions& opts = {});

// Delayed CSIT + perfect JSIT: state-separable policy; single-clean states
// serve the clean receiver, both-clean states run the selected mode
// (a three-slot retrospective-alignment machine at the mat corner).
SchemeRun run_dp(const JammerDistribution& dist, const std::vector<long long>& budgets,
                 DpMode mode, std::uint64_t seed, const RunOptions& opts = {});

// Delayed CSIT + delayed JSIT: three stages. Stage 1/2 distribute each
// block's combinations to at least one receiver; stage 3 multicasts
// cross-receiver pairs, replacing each component as its target confirms.
SchemeRun run_dd(const JammerDistribution& dist, const std::vector<long long>& budgets,
                 std::uint64_t seed, const RunOptions& opts = {});

// Delayed CSIT + no JSIT: modified-alignment scheme with deterministic
// stage durations. Block sizes are (1+lambda_r) * n; undecoded residuals
// at the fixed horizon count as losses.
SchemeRun run_dn(const JammerDistribution& dist, long long n, std::uint64_t seed,
                 const RunOptions& opts = {});

// No CSIT + perfect JSIT: serve exactly one clean receiver per slot.
SchemeRun run_np(const JammerDistribution& dist, const std::vector<long long>& budgets,
                 NpPolicy policy, std::uint64_t seed, const RunOptions& opts = {});

// No CSIT + delayed JSIT: single-stream three-stage scheme; overheard
// symbols are re-multicast in cross pairs.
SchemeRun run_nd(const JammerDistribution& dist, const std::vector<long long>& budgets,
                 std::uint64_t seed, const RunOptions& opts = {});

// No CSIT + no JSIT: time sharing. Receiver r gets share[r] of `horizon`
// slots carrying random combinations of a ceil(lambda_r share_r horizon)
// block. Works for any K.
SchemeRun run_nn(const JammerDistribution& dist, long long horizon,
                 const std::vector<double>& share, std::uint64_t seed,
                 const RunOptions& opts = {});

// ---- K-user schemes (symmetric distributions) ----

// K-phase delayed/delayed scheme at accounting fidelity: per-slot
// receiver successes are Bernoulli(lambda_eta); phase j drains its pool of
// order-j combinations and seeds phase j+1.
SchemeRun run_dd_k(const JammerDistribution& dist, long long budget_per_receiver,
                   std::uint64_t seed, const RunOptions& opts = {});

// Delayed CSIT + perfect JSIT for K users: each slot advances a
// retrospective-alignment machine for the current clean-set cardinality.
SchemeRun run_dp_k(const JammerDistribution& dist, long long budget_per_receiver,
                   std::uint64_t seed, const RunOptions& opts = {});

// Writes trace events as CSV lines: slot,state,stage,action,receiver,lc_tag.
void write_trace(std::ostream& os, const SchemeRun& run);

}  // namespace jamdof
