#include "jamdof/jammer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "jamdof/errors.hpp"

namespace jamdof {

namespace {

void check_receiver_count(int num_receivers, int max) {
    if (num_receivers < 1) {
        throw ArgumentError("number of receivers must be at least 1, got " +
                            std::to_string(num_receivers));
    }
    if (num_receivers > max) {
        throw UnsupportedDimensionError(
            "number of receivers " + std::to_string(num_receivers) +
            " exceeds the supported maximum " + std::to_string(max));
    }
}

void check_probability_vector(const std::vector<double>& p, const char* what) {
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(p[i] >= 0.0) || !std::isfinite(p[i])) {
            throw ArgumentError(std::string(what) + " entry " + std::to_string(i) +
                                " is not a finite non-negative number");
        }
        sum += p[i];
    }
    if (std::abs(sum - 1.0) > JammerDistribution::kProbTolerance) {
        std::ostringstream os;
        os.precision(17);
        os << what << " must sum to 1 within " << JammerDistribution::kProbTolerance
           << "; got " << sum << " (input is rejected, not renormalized)";
        throw ArgumentError(os.str());
    }
}

std::vector<double> cumulative(const std::vector<double>& p) {
    std::vector<double> cdf(p.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc += p[i];
        cdf[i] = acc;
    }
    cdf.back() = 1.0;
    return cdf;
}

std::size_t sample_index(const std::vector<double>& cdf, Rng& rng) {
    double u = rng.uniform();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    return static_cast<std::size_t>(it - cdf.begin());
}

}  // namespace

JammerState state_from_bitstring(std::string_view s) {
    if (s.empty() || s.size() > JammerDistribution::kMaxDenseReceivers) {
        throw ArgumentError("state bitstring length must be in [1, 20], got \"" +
                            std::string(s) + "\"");
    }
    std::uint32_t mask = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '1') {
            mask |= 1u << i;
        } else if (s[i] != '0') {
            throw ArgumentError("state bitstring may contain only 0/1, got \"" +
                                std::string(s) + "\"");
        }
    }
    return JammerState{mask};
}

std::string state_to_bitstring(JammerState s, int num_receivers) {
    std::string out(static_cast<std::size_t>(num_receivers), '0');
    for (int r = 0; r < num_receivers; ++r) {
        if (s.jammed(r)) out[static_cast<std::size_t>(r)] = '1';
    }
    return out;
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double c = 1.0;
    for (int i = 1; i <= k; ++i) {
        c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
    }
    // The multiplicative form is exact up to rounding; snap to the integer.
    return std::round(c);
}

JammerDistribution JammerDistribution::from_probs(int num_receivers,
                                                  std::vector<double> probs) {
    check_receiver_count(num_receivers, kMaxDenseReceivers);
    const std::size_t expected = std::size_t{1} << num_receivers;
    if (probs.size() != expected) {
        throw ArgumentError("expected " + std::to_string(expected) +
                            " state probabilities for K=" + std::to_string(num_receivers) +
                            ", got " + std::to_string(probs.size()));
    }
    check_probability_vector(probs, "state probabilities");
    JammerDistribution d;
    d.num_receivers_ = num_receivers;
    d.probs_ = std::move(probs);
    d.cdf_ = cumulative(d.probs_);
    return d;
}

JammerDistribution JammerDistribution::symmetric(int num_receivers,
                                                 std::vector<double> eta) {
    check_receiver_count(num_receivers, 31);
    if (eta.size() != static_cast<std::size_t>(num_receivers) + 1) {
        throw ArgumentError("expected " + std::to_string(num_receivers + 1) +
                            " class probabilities for K=" + std::to_string(num_receivers) +
                            ", got " + std::to_string(eta.size()));
    }
    check_probability_vector(eta, "class probabilities");
    JammerDistribution d;
    d.num_receivers_ = num_receivers;
    d.class_probs_ = std::move(eta);
    d.class_cdf_ = cumulative(d.class_probs_);
    return d;
}

double JammerDistribution::prob(JammerState s) const {
    if (num_receivers_ < 32 && (s.mask >> num_receivers_) != 0) {
        throw ArgumentError("state mask " + std::to_string(s.mask) +
                            " out of range for K=" + std::to_string(num_receivers_));
    }
    if (dense()) return probs_[s.mask];
    int j = s.num_jammed();
    return class_probs_[static_cast<std::size_t>(j)] / binomial(num_receivers_, j);
}

double JammerDistribution::marginal(int r) const {
    if (r < 0 || r >= num_receivers_) {
        throw ArgumentError("receiver index " + std::to_string(r) +
                            " out of range for K=" + std::to_string(num_receivers_));
    }
    if (dense()) {
        double lam = 0.0;
        for (std::size_t mask = 0; mask < probs_.size(); ++mask) {
            if (!(mask >> r & 1u)) lam += probs_[mask];
        }
        return lam;
    }
    return lambda_eta();
}

std::vector<double> JammerDistribution::marginals() const {
    std::vector<double> lam(static_cast<std::size_t>(num_receivers_));
    for (int r = 0; r < num_receivers_; ++r) lam[static_cast<std::size_t>(r)] = marginal(r);
    return lam;
}

double JammerDistribution::class_probability(int j) const {
    if (j < 0 || j > num_receivers_) {
        throw ArgumentError("ones-count " + std::to_string(j) + " out of range for K=" +
                            std::to_string(num_receivers_));
    }
    if (!dense()) return class_probs_[static_cast<std::size_t>(j)];
    double eta = 0.0;
    for (std::size_t mask = 0; mask < probs_.size(); ++mask) {
        if (std::popcount(static_cast<std::uint32_t>(mask)) == j) eta += probs_[mask];
    }
    return eta;
}

std::vector<double> JammerDistribution::class_probabilities() const {
    std::vector<double> eta(static_cast<std::size_t>(num_receivers_) + 1, 0.0);
    if (!dense()) return class_probs_;
    for (std::size_t mask = 0; mask < probs_.size(); ++mask) {
        eta[static_cast<std::size_t>(std::popcount(static_cast<std::uint32_t>(mask)))] +=
            probs_[mask];
    }
    return eta;
}

double JammerDistribution::lambda_eta() const {
    const int k = num_receivers_;
    std::vector<double> eta = class_probabilities();
    double lam = 0.0;
    for (int j = 0; j <= k; ++j) {
        lam += (static_cast<double>(k - j) / k) * eta[static_cast<std::size_t>(j)];
    }
    return lam;
}

bool JammerDistribution::is_symmetric(double tol) const {
    if (!dense()) return true;
    // Within each ones-count class all states must carry equal probability.
    std::vector<double> ref(static_cast<std::size_t>(num_receivers_) + 1, -1.0);
    for (std::size_t mask = 0; mask < probs_.size(); ++mask) {
        auto j = static_cast<std::size_t>(std::popcount(static_cast<std::uint32_t>(mask)));
        if (ref[j] < 0.0) {
            ref[j] = probs_[mask];
        } else if (std::abs(probs_[mask] - ref[j]) > tol) {
            return false;
        }
    }
    return true;
}

JammerState JammerDistribution::sample_state(Rng& rng) const {
    if (dense()) {
        return JammerState{static_cast<std::uint32_t>(sample_index(cdf_, rng))};
    }
    // Class by inverse CDF, then a uniformly random subset of that size:
    // walk the bit positions, setting each with probability
    // (ones still needed) / (positions left).
    int j = static_cast<int>(sample_index(class_cdf_, rng));
    std::uint32_t mask = 0;
    int need = j;
    for (int r = 0; r < num_receivers_ && need > 0; ++r) {
        int left = num_receivers_ - r;
        if (rng.uniform() * left < static_cast<double>(need)) {
            mask |= 1u << r;
            --need;
        }
    }
    return JammerState{mask};
}

StateSequence JammerDistribution::sample_sequence(std::size_t n, std::uint64_t seed) const {
    Rng rng(seed);
    StateSequence seq;
    seq.reserve(n);
    for (std::size_t i = 0; i < n; ++i) seq.push_back(sample_state(rng));
    return seq;
}

namespace {

double parse_prob_token(std::string_view tok, std::string_view context) {
    try {
        std::size_t pos = 0;
        double v = std::stod(std::string(tok), &pos);
        while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
        if (pos != tok.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ArgumentError("cannot parse probability \"" + std::string(tok) + "\" in " +
                            std::string(context));
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Splits on newlines and on commas outside of [...] brackets.
std::vector<std::string> split_entries(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char c : text) {
        if (c == '[') ++depth;
        if (c == ']') --depth;
        if (c == '\n' || (c == ',' && depth == 0)) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

JammerDistribution parse_distribution(std::string_view text) {
    int declared_k = -1;
    std::vector<std::pair<std::string, double>> states;
    std::vector<double> eta;
    bool have_symmetric = false;

    for (const std::string& raw : split_entries(text)) {
        std::string_view entry = trim(raw);
        if (entry.empty() || entry.front() == '#') continue;
        std::size_t colon = entry.find(':');
        if (colon == std::string_view::npos) {
            throw ArgumentError("distribution entry \"" + std::string(entry) +
                                "\" is not of the form key: value");
        }
        std::string_view key = trim(entry.substr(0, colon));
        std::string_view value = trim(entry.substr(colon + 1));
        if (key == "K" || key == "k") {
            double kv = parse_prob_token(value, "K entry");
            declared_k = static_cast<int>(kv);
            if (kv != declared_k || declared_k < 1) {
                throw ArgumentError("K must be a positive integer, got \"" +
                                    std::string(value) + "\"");
            }
        } else if (key == "symmetric") {
            if (have_symmetric) throw ArgumentError("duplicate symmetric entry");
            have_symmetric = true;
            if (value.size() < 2 || value.front() != '[' || value.back() != ']') {
                throw ArgumentError("symmetric shorthand must be a bracketed list, got \"" +
                                    std::string(value) + "\"");
            }
            std::string_view body = value.substr(1, value.size() - 2);
            std::string item;
            for (char c : body) {
                if (c == ',') {
                    eta.push_back(parse_prob_token(trim(item), "symmetric list"));
                    item.clear();
                } else {
                    item += c;
                }
            }
            if (!trim(item).empty()) eta.push_back(parse_prob_token(trim(item), "symmetric list"));
            if (eta.empty()) throw ArgumentError("symmetric list is empty");
        } else {
            // A state bitstring entry; validates characters as a side effect.
            state_from_bitstring(key);
            for (const auto& [seen, p] : states) {
                if (seen == key) {
                    throw ArgumentError("duplicate state entry \"" + std::string(key) + "\"");
                }
            }
            states.emplace_back(std::string(key), parse_prob_token(value, "state entry"));
        }
    }

    if (have_symmetric && !states.empty()) {
        throw ArgumentError("symmetric shorthand cannot be combined with explicit states");
    }
    if (have_symmetric) {
        int k = static_cast<int>(eta.size()) - 1;
        if (declared_k >= 0 && declared_k != k) {
            throw ArgumentError("K: " + std::to_string(declared_k) + " disagrees with a " +
                                std::to_string(eta.size()) + "-entry symmetric list");
        }
        return JammerDistribution::symmetric(k, std::move(eta));
    }
    if (states.empty()) {
        throw ArgumentError("distribution text contains no states");
    }
    int k = declared_k >= 0 ? declared_k : static_cast<int>(states.front().first.size());
    for (const auto& [s, p] : states) {
        if (static_cast<int>(s.size()) != k) {
            throw ArgumentError("state \"" + s + "\" has length " + std::to_string(s.size()) +
                                " but K=" + std::to_string(k));
        }
    }
    if (k > JammerDistribution::kMaxDenseReceivers) {
        throw UnsupportedDimensionError("explicit state lists support K <= 20, got K=" +
                                        std::to_string(k));
    }
    std::vector<double> probs(std::size_t{1} << k, 0.0);
    for (const auto& [s, p] : states) {
        probs[state_from_bitstring(s).mask] = p;
    }
    return JammerDistribution::from_probs(k, std::move(probs));
}

std::string distribution_to_text(const JammerDistribution& dist) {
    std::ostringstream os;
    os.precision(17);
    os << "K: " << dist.num_receivers() << "\n";
    if (!dist.dense()) {
        os << "symmetric: [";
        std::vector<double> eta = dist.class_probabilities();
        for (std::size_t j = 0; j < eta.size(); ++j) {
            if (j) os << ", ";
            os << eta[j];
        }
        os << "]\n";
        return os.str();
    }
    const std::uint32_t n = 1u << dist.num_receivers();
    for (std::uint32_t mask = 0; mask < n; ++mask) {
        double p = dist.prob(JammerState{mask});
        if (p != 0.0) {
            os << state_to_bitstring(JammerState{mask}, dist.num_receivers()) << ": " << p
               << "\n";
        }
    }
    return os.str();
}

}  // namespace jamdof
