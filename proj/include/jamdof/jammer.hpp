#pragma once

#include <bit>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "jamdof/rng.hpp"

namespace jamdof {

// One slot's jammer activity pattern for K receivers.
//
// Bit r (0-based, LSB first) is receiver r+1's flag: 1 = jammed, 0 = clean.
// The canonical bitstring form writes receiver 1 leftmost, so bitstring
// "01" means receiver 1 clean, receiver 2 jammed, i.e. mask 0b10 = 2.
struct JammerState {
    std::uint32_t mask = 0;

    bool jammed(int r) const { return (mask >> r) & 1u; }
    int num_jammed() const { return std::popcount(mask); }

    friend bool operator==(JammerState a, JammerState b) { return a.mask == b.mask; }
};

using StateSequence = std::vector<JammerState>;

// "01" -> JammerState{2}. Throws ArgumentError on non-binary characters
// or length outside [1, 20].
JammerState state_from_bitstring(std::string_view s);

// JammerState{2} with K=2 -> "01".
std::string state_to_bitstring(JammerState s, int num_receivers);

// Joint distribution of the jammer state across K receivers, i.i.d. in time.
//
// Two storage modes share one interface:
//  - dense: one probability per state mask (K <= 20);
//  - symmetric: per-ones-count class probabilities eta_0..eta_K, states
//    within a class equiprobable (supports large K, e.g. K = 30).
//
// Probabilities must sum to 1 within 1e-12; out-of-tolerance input is
// rejected rather than renormalized so upstream generation bugs surface.
// All receiver indices in this API are 0-based; user-facing text layers
// print them 1-based.
class JammerDistribution {
public:
    static constexpr int kMaxDenseReceivers = 20;
    static constexpr double kProbTolerance = 1e-12;

    // probs[mask] = P(state mask), size 2^K.
    static JammerDistribution from_probs(int num_receivers, std::vector<double> probs);

    // eta[j] = P(exactly j receivers jammed), size K+1. Stored compressed;
    // each state with j ones gets probability eta[j] / C(K, j).
    static JammerDistribution symmetric(int num_receivers, std::vector<double> eta);

    int num_receivers() const { return num_receivers_; }
    bool dense() const { return !probs_.empty(); }

    // P(state mask). Works in either storage mode.
    double prob(JammerState s) const;

    // lambda_r = P(receiver r not jammed).
    double marginal(int r) const;
    std::vector<double> marginals() const;

    // eta_j = P(exactly j receivers jammed).
    double class_probability(int j) const;
    std::vector<double> class_probabilities() const;

    // lambda_eta = sum_j ((K - j) / K) * eta_j, the per-receiver average
    // clean probability. Equals every marginal when the distribution is
    // symmetric.
    double lambda_eta() const;

    // True iff all states with the same ones-count carry equal probability
    // within tol.
    bool is_symmetric(double tol = kProbTolerance) const;

    JammerState sample_state(Rng& rng) const;

    // n i.i.d. states from a stream seeded with `seed`. Deterministic:
    // equal (distribution, n, seed) give equal sequences.
    StateSequence sample_sequence(std::size_t n, std::uint64_t seed) const;

private:
    JammerDistribution() = default;

    int num_receivers_ = 0;
    std::vector<double> probs_;        // dense mode; empty in symmetric mode
    std::vector<double> cdf_;          // dense mode sampling table
    std::vector<double> class_probs_;  // symmetric mode; empty in dense mode
    std::vector<double> class_cdf_;    // symmetric mode sampling table
};

// Text format shared by dist files and the CLI --dist flag.
//
//   # comment
//   K: 2
//   00: 0.3
//   01: 0.3
//   10: 0.3
//   11: 0.1
//
// or the symmetric shorthand
//
//   symmetric: [0.25, 0.5, 0.25]
//
// Entries may be separated by newlines or commas (the CLI passes a
// single comma-separated line). Bitstrings use the canonical order
// (receiver 1 leftmost). Unlisted states have probability 0. `K:` is
// optional when it can be inferred. Throws ArgumentError on malformed
// input, duplicate states, or an out-of-tolerance probability sum.
JammerDistribution parse_distribution(std::string_view text);

// Renders a distribution in the same text format (dense mode lists every
// nonzero state; symmetric mode uses the shorthand).
std::string distribution_to_text(const JammerDistribution& dist);

// binomial(n, k) as a double; exact for the ranges used here.
double binomial(int n, int k);

}  // namespace jamdof
