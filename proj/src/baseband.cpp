#include "jamdof/baseband.hpp"

#include <cmath>
#include <complex>
#include <exception>

#include <Eigen/SVD>

#include "jamdof/errors.hpp"
#include "jamdof/numeric.hpp"

namespace jamdof {

namespace {

constexpr double kMaxCondition = 1e8;
constexpr int kMaxRedraws = 100;

Eigen::VectorXcd random_unit_beam(int dim, Rng& rng) {
    Eigen::VectorXcd b(dim);
    for (int i = 0; i < dim; ++i) b(i) = rng.complex_gaussian();
    double norm = b.norm();
    if (norm <= 0.0) {
        b.setZero();
        b(0) = 1.0;
        return b;
    }
    return b / norm;
}

}  // namespace

ChannelRealization draw_channel(int num_receivers, double power, Rng& rng) {
    if (num_receivers < 1) throw ArgumentError("receiver count must be positive");
    if (power <= 0.0) throw ArgumentError("transmit power must be positive");
    ChannelRealization chan;
    chan.power = power;
    chan.g.resize(num_receivers);
    for (int r = 0; r < num_receivers; ++r) chan.g(r) = rng.complex_gaussian();

    for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
        chan.h.resize(num_receivers, num_receivers);
        for (int r = 0; r < num_receivers; ++r)
            for (int c = 0; c < num_receivers; ++c) chan.h(r, c) = rng.complex_gaussian();
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(chan.h);
        double smin = svd.singularValues()(num_receivers - 1);
        if (smin > 0.0 && svd.singularValues()(0) / smin <= kMaxCondition) return chan;
    }
    throw NumericalError("could not draw a well-conditioned channel matrix");
}

Eigen::MatrixXcd zero_forcing(const Eigen::MatrixXcd& h) {
    if (h.rows() != h.cols() || h.rows() < 1)
        throw ArgumentError("zero forcing needs a square channel matrix");
    Eigen::MatrixXcd beams = h.inverse();
    for (int c = 0; c < beams.cols(); ++c) {
        double norm = beams.col(c).norm();
        if (!(norm > 0.0) || !std::isfinite(norm))
            throw NumericalError("channel matrix is numerically singular");
        beams.col(c) /= norm;
    }
    return beams;
}

std::vector<double> slot_rates(const ChannelRealization& chan,
                               const Eigen::MatrixXcd& precoder,
                               const JammerState& state,
                               const std::vector<int>& served) {
    const int K = static_cast<int>(chan.h.rows());
    std::vector<double> rates(static_cast<std::size_t>(K), 0.0);
    if (served.empty()) return rates;
    for (int r : served)
        if (r < 0 || r >= K) throw ArgumentError("served receiver index out of range");

    const double beam_power = chan.power / static_cast<double>(served.size());
    for (int r : served) {
        double signal = 0.0;
        double interference = 0.0;
        for (int s : served) {
            std::complex<double> gain = (chan.h.row(r) * precoder.col(s)).value();
            double p = beam_power * std::norm(gain);
            if (s == r)
                signal = p;
            else
                interference += p;
        }
        double jam = state.jammed(r) ? chan.power * std::norm(chan.g(r)) : 0.0;
        rates[static_cast<std::size_t>(r)] =
            std::log2(1.0 + signal / (chan.noise_var + interference + jam));
    }
    return rates;
}

namespace {

// Mean per-receiver rate at one grid point. A jammed receiver's slot
// carries nothing usable, so it contributes zero regardless of SINR.
std::vector<double> simulate_point(Config config, const JammerDistribution& dist,
                                   double power, int slots, std::uint64_t seed,
                                   const std::vector<double>& share) {
    const int K = dist.num_receivers();
    Rng rng(seed);
    std::vector<double> total(static_cast<std::size_t>(K), 0.0);
    std::vector<int> served;
    served.reserve(static_cast<std::size_t>(K));

    for (int t = 0; t < slots; ++t) {
        JammerState state = dist.sample_state(rng);
        ChannelRealization chan = draw_channel(K, power, rng);
        served.clear();
        Eigen::MatrixXcd precoder;
        switch (config) {
            case Config::PP:
                for (int r = 0; r < K; ++r)
                    if (!state.jammed(r)) served.push_back(r);
                if (served.empty()) continue;
                precoder = zero_forcing(chan.h);
                break;
            case Config::PN:
                for (int r = 0; r < K; ++r) served.push_back(r);
                precoder = zero_forcing(chan.h);
                break;
            case Config::NN: {
                double u = rng.uniform();
                double acc = 0.0;
                int pick = -1;
                for (int r = 0; r < K; ++r) {
                    acc += share[static_cast<std::size_t>(r)];
                    if (u < acc) {
                        pick = r;
                        break;
                    }
                }
                if (pick < 0) continue;  // idle slot
                served.push_back(pick);
                precoder = Eigen::MatrixXcd::Zero(K, K);
                precoder.col(pick) = random_unit_beam(K, rng);
                break;
            }
            default:
                throw ArgumentError("slope estimation supports PP, PN and NN only");
        }
        std::vector<double> rates = slot_rates(chan, precoder, state, served);
        for (int r : served)
            if (!state.jammed(r))
                total[static_cast<std::size_t>(r)] += rates[static_cast<std::size_t>(r)];
    }
    for (double& v : total) v /= static_cast<double>(slots);
    return total;
}

}  // namespace

SlopeEstimate estimate_slope(Config config, const JammerDistribution& dist,
                             const std::vector<double>& snr_grid_db,
                             int slots_per_point, std::uint64_t seed,
                             const std::vector<double>& share, Parallelism par) {
    if (config != Config::PP && config != Config::PN && config != Config::NN)
        throw ArgumentError("slope estimation supports PP, PN and NN only");
    if (snr_grid_db.size() < 4)
        throw ArgumentError("SNR grid needs at least 4 points");
    for (std::size_t i = 1; i < snr_grid_db.size(); ++i)
        if (snr_grid_db[i] <= snr_grid_db[i - 1])
            throw ArgumentError("SNR grid must be strictly ascending");
    if (snr_grid_db.back() - snr_grid_db.front() < 30.0 - 1e-9)
        throw ArgumentError("SNR grid must span at least 30 dB");
    if (slots_per_point < 1) throw ArgumentError("slots per point must be positive");

    const int K = dist.num_receivers();
    std::vector<double> shares = share;
    if (config == Config::NN) {
        if (shares.empty()) shares.assign(static_cast<std::size_t>(K), 1.0 / K);
        if (static_cast<int>(shares.size()) != K)
            throw ArgumentError("share needs one entry per receiver");
        double sum = 0.0;
        for (double s : shares) {
            if (s < 0.0) throw ArgumentError("shares must be nonnegative");
            sum += s;
        }
        if (sum > 1.0 + 1e-9) throw ArgumentError("shares must sum to at most 1");
    } else if (!shares.empty()) {
        throw ArgumentError("share only applies to NN");
    }

    const int P = static_cast<int>(snr_grid_db.size());
    SlopeEstimate out;
    out.config = config;
    out.num_receivers = K;
    out.grid_db = snr_grid_db;
    out.mean_rates.assign(static_cast<std::size_t>(P), {});

    bool parallel = par != Parallelism::serial;
#ifndef _OPENMP
    parallel = false;
#endif
    std::exception_ptr error;
    if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(effective_threads())
        for (int p = 0; p < P; ++p) {
            try {
                double power = std::pow(10.0, snr_grid_db[static_cast<std::size_t>(p)] / 10.0);
                out.mean_rates[static_cast<std::size_t>(p)] = simulate_point(
                    config, dist, power, slots_per_point,
                    Rng::derive(seed, static_cast<std::uint64_t>(p)), shares);
            } catch (...) {
#pragma omp critical
                if (!error) error = std::current_exception();
            }
        }
#endif
    } else {
        for (int p = 0; p < P; ++p) {
            double power = std::pow(10.0, snr_grid_db[static_cast<std::size_t>(p)] / 10.0);
            out.mean_rates[static_cast<std::size_t>(p)] = simulate_point(
                config, dist, power, slots_per_point,
                Rng::derive(seed, static_cast<std::uint64_t>(p)), shares);
        }
    }
    if (error) std::rethrow_exception(error);

    // rate vs log2(SNR); the slope is the empirical DoF
    std::vector<double> x(static_cast<std::size_t>(P));
    const double db_to_log2 = std::log2(10.0) / 10.0;
    for (int p = 0; p < P; ++p)
        x[static_cast<std::size_t>(p)] = snr_grid_db[static_cast<std::size_t>(p)] * db_to_log2;
    double xbar = pairwise_sum(x) / P;
    double sxx = 0.0;
    for (double v : x) sxx += (v - xbar) * (v - xbar);

    out.slope.resize(static_cast<std::size_t>(K));
    out.intercept.resize(static_cast<std::size_t>(K));
    out.r_squared.resize(static_cast<std::size_t>(K));
    for (int r = 0; r < K; ++r) {
        std::vector<double> y(static_cast<std::size_t>(P));
        for (int p = 0; p < P; ++p)
            y[static_cast<std::size_t>(p)] =
                out.mean_rates[static_cast<std::size_t>(p)][static_cast<std::size_t>(r)];
        double ybar = pairwise_sum(y) / P;
        double sxy = 0.0, sstot = 0.0;
        for (int p = 0; p < P; ++p) {
            sxy += (x[static_cast<std::size_t>(p)] - xbar) * (y[static_cast<std::size_t>(p)] - ybar);
            sstot += (y[static_cast<std::size_t>(p)] - ybar) * (y[static_cast<std::size_t>(p)] - ybar);
        }
        double slope = sxy / sxx;
        double intercept = ybar - slope * xbar;
        double ssres = 0.0;
        for (int p = 0; p < P; ++p) {
            double e = y[static_cast<std::size_t>(p)] -
                       (intercept + slope * x[static_cast<std::size_t>(p)]);
            ssres += e * e;
        }
        out.slope[static_cast<std::size_t>(r)] = slope;
        out.intercept[static_cast<std::size_t>(r)] = intercept;
        out.r_squared[static_cast<std::size_t>(r)] = sstot <= 0.0 ? 1.0 : 1.0 - ssres / sstot;
    }
    return out;
}

}  // namespace jamdof
