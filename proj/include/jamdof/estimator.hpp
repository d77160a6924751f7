#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "jamdof/regions.hpp"
#include "jamdof/schemes.hpp"

namespace jamdof {

// Multi-trial Monte-Carlo summary of a scheme's empirical DoF point.
struct EmpiricalDof {
    Config config = Config::NN;
    int num_receivers = 0;
    int trials = 0;
    std::uint64_t base_seed = 0;
    std::vector<double> mean;          // per-receiver mean of delivered/slots
    std::vector<double> std_error;     // standard error of that mean
    double sum_mean = 0.0;             // mean of per-trial DoF sums
    double sum_std_error = 0.0;
    double mean_slots = 0.0;
};

// One seeded scheme execution; trial i runs with Rng::derive(base_seed, i).
using SchemeRunner = std::function<SchemeRun(std::uint64_t seed)>;

enum class Parallelism {
    serial,     // reference implementation, plain loop
    openmp,     // OpenMP over trials (falls back to serial without OpenMP)
    automatic,  // openmp when compiled in, else serial
};

// Number of worker threads the parallel paths use: the JAMDOF_THREADS
// environment variable when set (minimum 1), otherwise the OpenMP default.
int effective_threads();

// Runs `trials` independent trials and aggregates their DoF estimates.
// Per-trial seeds derive from (base_seed, trial index) and results are
// reduced in trial order with pairwise summation, so serial and parallel
// execution produce bit-identical statistics.
EmpiricalDof estimate(const SchemeRunner& runner, Config config, int num_receivers,
                      int trials, std::uint64_t base_seed,
                      Parallelism par = Parallelism::automatic);

enum class RegionVerdict { inside, boundary, outside };
std::string verdict_to_string(RegionVerdict v);

// Compares an empirical mean point against an analytic region: `outside`
// if it violates some halfspace by more than tol, `boundary` if it lies
// within tol of some halfspace boundary, else `inside`.
RegionVerdict check_against_region(const std::vector<double>& point, const DofRegion& region,
                                   double tol);

}  // namespace jamdof
