#include "jamdof/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "jamdof/errors.hpp"
#include "jamdof/numeric.hpp"
#include "jamdof/rng.hpp"

namespace jamdof {

int effective_threads() {
    if (const char* env = std::getenv("JAMDOF_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

namespace {

struct TrialResult {
    std::vector<double> dof;
    double slots = 0.0;
};

// Mean and standard error of column r over all trials, reduced pairwise
// in trial order.
void reduce(const std::vector<double>& series, double& mean, double& stderr_out) {
    const std::size_t n = series.size();
    mean = pairwise_sum(series) / static_cast<double>(n);
    if (n < 2) {
        stderr_out = 0.0;
        return;
    }
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) {
        double d = series[i] - mean;
        sq[i] = d * d;
    }
    double var = pairwise_sum(sq) / static_cast<double>(n - 1);
    stderr_out = std::sqrt(var / static_cast<double>(n));
}

}  // namespace

EmpiricalDof estimate(const SchemeRunner& runner, Config config, int num_receivers,
                      int trials, std::uint64_t base_seed, Parallelism par) {
    if (trials < 1) throw ArgumentError("trial count must be positive");
    if (num_receivers < 1) throw ArgumentError("receiver count must be positive");

    std::vector<TrialResult> results(static_cast<std::size_t>(trials));

    bool parallel = par != Parallelism::serial;
#ifndef _OPENMP
    parallel = false;
#endif

    // Each trial owns an independent counter-derived stream, and results
    // land in their own slots, so scheduling cannot change the outcome.
    std::exception_ptr error;
    if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(effective_threads())
        for (int i = 0; i < trials; ++i) {
            try {
                SchemeRun run = runner(Rng::derive(base_seed, static_cast<std::uint64_t>(i)));
                results[static_cast<std::size_t>(i)] = {run.dof_estimate(),
                                                        static_cast<double>(run.slots)};
            } catch (...) {
#pragma omp critical
                if (!error) error = std::current_exception();
            }
        }
#endif
    } else {
        for (int i = 0; i < trials; ++i) {
            SchemeRun run = runner(Rng::derive(base_seed, static_cast<std::uint64_t>(i)));
            results[static_cast<std::size_t>(i)] = {run.dof_estimate(),
                                                    static_cast<double>(run.slots)};
        }
    }
    if (error) std::rethrow_exception(error);

    for (const TrialResult& r : results) {
        if (static_cast<int>(r.dof.size()) != num_receivers) {
            throw ArgumentError("scheme produced " + std::to_string(r.dof.size()) +
                                " per-receiver estimates, expected " +
                                std::to_string(num_receivers));
        }
    }

    EmpiricalDof out;
    out.config = config;
    out.num_receivers = num_receivers;
    out.trials = trials;
    out.base_seed = base_seed;
    out.mean.resize(static_cast<std::size_t>(num_receivers));
    out.std_error.resize(static_cast<std::size_t>(num_receivers));

    std::vector<double> series(static_cast<std::size_t>(trials));
    for (int r = 0; r < num_receivers; ++r) {
        for (int i = 0; i < trials; ++i) {
            series[static_cast<std::size_t>(i)] =
                results[static_cast<std::size_t>(i)].dof[static_cast<std::size_t>(r)];
        }
        reduce(series, out.mean[static_cast<std::size_t>(r)],
               out.std_error[static_cast<std::size_t>(r)]);
    }
    for (int i = 0; i < trials; ++i) {
        series[static_cast<std::size_t>(i)] =
            pairwise_sum(results[static_cast<std::size_t>(i)].dof);
    }
    reduce(series, out.sum_mean, out.sum_std_error);
    for (int i = 0; i < trials; ++i) {
        series[static_cast<std::size_t>(i)] = results[static_cast<std::size_t>(i)].slots;
    }
    double ignored;
    reduce(series, out.mean_slots, ignored);
    return out;
}

std::string verdict_to_string(RegionVerdict v) {
    switch (v) {
        case RegionVerdict::inside: return "inside";
        case RegionVerdict::boundary: return "boundary";
        case RegionVerdict::outside: return "outside";
    }
    return "??";
}

RegionVerdict check_against_region(const std::vector<double>& point, const DofRegion& region,
                                   double tol) {
    if (!region.contains(point, tol)) return RegionVerdict::outside;
    for (const HalfSpace& h : region.halfspaces()) {
        double lhs = 0.0;
        for (std::size_t i = 0; i < point.size(); ++i) lhs += h.coeffs[i] * point[i];
        if (h.bound - lhs <= tol) return RegionVerdict::boundary;
    }
    return RegionVerdict::inside;
}

}  // namespace jamdof
