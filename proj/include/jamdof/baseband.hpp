#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "jamdof/config.hpp"
#include "jamdof/estimator.hpp"
#include "jamdof/jammer.hpp"
#include "jamdof/rng.hpp"

namespace jamdof {

// One fading block: row r of h is receiver r's channel, g_r its coupling
// to the jammer. The jammer transmits at `power` too, so a jammed
// receiver's SINR stays bounded as power grows. noise_var stays at 1.
struct ChannelRealization {
    Eigen::MatrixXcd h;  // K x K, rows are receiver channels
    Eigen::VectorXcd g;  // per-receiver jammer coupling
    double power = 1.0;
    double noise_var = 1.0;
};

ChannelRealization draw_channel(int num_receivers, double power, Rng& rng);

// Columns are unit-norm beams; column r lands in the nullspace of every
// other receiver's row.
Eigen::MatrixXcd zero_forcing(const Eigen::MatrixXcd& h);

// Achieved rate (bits/slot) per receiver for one slot. `served` selects the
// active beams; power splits evenly across them. Receivers outside `served`
// report 0. Jammed receivers see the jammer at full transmit power.
std::vector<double> slot_rates(const ChannelRealization& chan,
                               const Eigen::MatrixXcd& precoder,
                               const JammerState& state,
                               const std::vector<int>& served);

struct SlopeEstimate {
    Config config = Config::PP;
    int num_receivers = 0;
    std::vector<double> grid_db;
    // mean_rates[p][r]: average rate of receiver r at grid point p
    std::vector<std::vector<double>> mean_rates;
    std::vector<double> slope;      // per receiver, in DoF (rate per log2 SNR)
    std::vector<double> intercept;
    std::vector<double> r_squared;
};

// Sweeps SNR and fits rate against log2(SNR) per receiver. Supported
// configs: PP (zero-force the clean set), PN (beams for everyone, only
// clean slots count), NN (one receiver per slot picked by `share`).
// Grid must be ascending, at least 4 points, spanning at least 30 dB.
SlopeEstimate estimate_slope(Config config, const JammerDistribution& dist,
                             const std::vector<double>& snr_grid_db,
                             int slots_per_point, std::uint64_t seed,
                             const std::vector<double>& share = {},
                             Parallelism par = Parallelism::automatic);

}  // namespace jamdof
