#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <vector>

#include "jamdof/config.hpp"
#include "jamdof/jammer.hpp"

namespace jamdof {

// Per-receiver degrees of freedom, index r = receiver r+1.
using DofPoint = std::vector<double>;

// Geometric comparison slack used throughout the region algebra.
inline constexpr double kGeomTol = 1e-9;

// coeffs . d <= bound
struct HalfSpace {
    std::vector<double> coeffs;
    double bound = 0.0;
};

// Structure tag that enables analytic optimization paths in any dimension.
// box: every halfspace bounds a single coordinate. simplex: a single
// halfspace with positive coefficients. general: anything else.
enum class RegionKind { box, simplex, general };

// Convex DoF region: the intersection of halfspaces with the nonnegative
// orthant. Immutable; held halfspace-first, with 2-D vertex enumeration
// performed on demand and cached.
class DofRegion {
public:
    DofRegion(int dim, std::vector<HalfSpace> halfspaces, RegionKind kind);

    int dim() const { return dim_; }
    RegionKind kind() const { return kind_; }
    const std::vector<HalfSpace>& halfspaces() const { return halfspaces_; }

    // True iff every coordinate is >= -tol and every halfspace is satisfied
    // with at most tol of slack.
    bool contains(const DofPoint& p, double tol = kGeomTol) const;

    // Extreme points, 2-D regions only (UnsupportedDimensionError above).
    // Deduplicated within kGeomTol and sorted by angle around the centroid,
    // so the same region always enumerates identically.
    const std::vector<DofPoint>& vertices() const;

private:
    struct VertexCache {
        std::once_flag once;
        std::vector<DofPoint> verts;
    };

    int dim_;
    std::vector<HalfSpace> halfspaces_;
    RegionKind kind_;
    std::shared_ptr<VertexCache> cache_ = std::make_shared<VertexCache>();
};

// a subset-of b, decided by testing a's vertices against b's halfspaces
// (valid because both are convex). 2-D only.
bool is_subset(const DofRegion& a, const DofRegion& b, double tol = kGeomTol);

// max over the region of weights . d. Uses the vertex list in 2-D and
// closed forms for box/simplex regions of any dimension; other high-dim
// regions raise UnsupportedDimensionError.
double max_weighted_sum(const DofRegion& region, const std::vector<double>& weights);

// ---- Region constructors, one per CSIT/JSIT configuration ----
//
// Marginals are taken from the distribution; constructors that divide by a
// marginal throw DegenerateMarginalError when it is zero.

// PP / PD / PN: the box d_r <= lambda_r, any K.
DofRegion region_perfect_csit(const JammerDistribution& dist);

// Delayed CSIT, perfect JSIT (K = 2): box plus
// 2 d_1 + d_2 <= 2 lambda_1 + lambda_10 and d_1 + 2 d_2 <= 2 lambda_2 + lambda_01.
DofRegion region_dp(const JammerDistribution& dist);

// Delayed CSIT, delayed JSIT (K = 2):
// d_1/lambda_1 + d_2/(lambda_1+lambda_2) <= 1 and the mirror.
DofRegion region_dd(const JammerDistribution& dist);

// Delayed CSIT, no JSIT (K = 2). When |l1 - l2| / (l1 l2) <= 1 (the first
// branch is used at equality) the two slanted halfspaces apply; otherwise
// the region collapses to the no-information simplex.
DofRegion region_dn_inner(const JammerDistribution& dist);

// No CSIT, perfect JSIT (K = 2): box plus d_1 + d_2 <= phi where
// phi = 1 - lambda_11 is the probability at least one receiver is clean.
DofRegion region_np(const JammerDistribution& dist);

// No CSIT, delayed JSIT (K = 2): d_1/lambda_1 + d_2/phi <= 1 and mirror.
DofRegion region_nd_inner(const JammerDistribution& dist);

// No CSIT, no JSIT: the simplex sum_r d_r / lambda_r <= 1, any K.
DofRegion region_nn(const JammerDistribution& dist);

// Dispatch by configuration (PP, PD and PN share the perfect-CSIT box).
DofRegion region_for_config(Config config, const JammerDistribution& dist);

// Jamming-free delayed-CSIT region: one halfspace per permutation pi,
// sum_k d_pi(k) / k <= 1. K! halfspaces, supported for K <= 6.
DofRegion region_mat(int num_receivers);

// ---- Scalar DoF quantities ----

// K / H_K, the jamming-free delayed-CSIT sum DoF.
double dof_mat(int num_receivers);

// Corner points used by the transmission schemes. K = 2.
DofPoint dp_mat_corner(const JammerDistribution& dist);  // (2/3 l00 + l01, 2/3 l00 + l10)
DofPoint dd_corner(const JammerDistribution& dist);      // symmetric halfspace intersection
DofPoint nd_corner(const JammerDistribution& dist);      // mirror with phi in place of l1+l2
DofPoint dn_point(const JammerDistribution& dist);       // d_r = (1+l_r)/(1+2 max(1/l1,1/l2))

// Sum DoF of the block split n_1 = eta n, n_2 = (1-eta) n under the
// delayed/delayed or none/delayed three-stage schemes (asymptotic).
double dd_sum_for_eta(const JammerDistribution& dist, double eta);
double nd_sum_for_eta(const JammerDistribution& dist, double eta);

// Golden-section maximizer of a unimodal f over [lo, hi] to interval
// width tol.
double golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                          double tol = 1e-6);

// Block split maximizing the scheme sum DoF, found by golden-section
// search over eta in [0, 1].
double optimal_eta_dd(const JammerDistribution& dist);
double optimal_eta_nd(const JammerDistribution& dist);

// K-user sum DoF under symmetric distributions (PreconditionError if the
// distribution is not symmetric).
double sum_dof_dp_k(const JammerDistribution& dist);  // sum_j eta_j * dof_mat(K - j)
double sum_dof_dd_k(const JammerDistribution& dist);  // lambda_eta * dof_mat(K)

// Backward per-order recursion for the K-user delayed/delayed scheme.
// levels[j-1] = DoF at which order-j symbols drain; levels[0] equals
// sum_dof_dd_k. All zeros when lambda_eta = 0.
std::vector<double> dof_recursion_levels(const JammerDistribution& dist);
double dof_recursion_dd(const JammerDistribution& dist);

// Lower bounds on the sum-DoF gaps at K users:
// first:  DP over DD at lambda_eta = 1/2:   (K-1) / (4 H_K^2)
// second: jamming-free MAT over DP at binomial eta: K/(2 H_K) - K(2^K-1)/(2^K H_K^2)
double gap_dp_dd_lower_bound(int num_receivers);
double gap_mat_dp_lower_bound(int num_receivers);

}  // namespace jamdof
