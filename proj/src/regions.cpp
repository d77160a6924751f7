#include "jamdof/regions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "jamdof/errors.hpp"

namespace jamdof {

namespace {

// State probabilities of a 2-user distribution in canonical order:
// l01 = P(receiver 1 clean, receiver 2 jammed) = bitstring "01" = mask 0b10.
struct TwoUser {
    double l00, l01, l10, l11;
    double l1, l2;   // marginals
    double phi;      // P(at least one receiver clean)
};

TwoUser two_user(const JammerDistribution& dist) {
    if (dist.num_receivers() != 2) {
        throw UnsupportedDimensionError("this region is defined for K=2, got K=" +
                                        std::to_string(dist.num_receivers()));
    }
    TwoUser t;
    t.l00 = dist.prob(JammerState{0});
    t.l10 = dist.prob(JammerState{1});
    t.l01 = dist.prob(JammerState{2});
    t.l11 = dist.prob(JammerState{3});
    t.l1 = t.l00 + t.l01;
    t.l2 = t.l00 + t.l10;
    t.phi = 1.0 - t.l11;
    return t;
}

void require_positive(double lambda, int receiver_number, const char* what) {
    if (lambda <= 0.0) {
        throw DegenerateMarginalError(
            std::string(what) + " requires a positive clean probability, but receiver " +
                std::to_string(receiver_number) + " is always jammed",
            receiver_number);
    }
}

double harmonic(int k) {
    double h = 0.0;
    for (int i = 1; i <= k; ++i) h += 1.0 / i;
    return h;
}

// Solves [[a, b], [c, d]] x = rhs. Throws on a singular system.
DofPoint solve2x2(double a, double b, double c, double d, double r1, double r2) {
    double det = a * d - b * c;
    double scale = std::max({std::abs(a * d), std::abs(b * c), 1e-300});
    if (std::abs(det) <= 1e-14 * scale) {
        throw NumericalError("2x2 system is singular");
    }
    return {(r1 * d - b * r2) / det, (a * r2 - r1 * c) / det};
}

}  // namespace

DofRegion::DofRegion(int dim, std::vector<HalfSpace> halfspaces, RegionKind kind)
    : dim_(dim), halfspaces_(std::move(halfspaces)), kind_(kind) {
    if (dim_ < 1) throw ArgumentError("region dimension must be positive");
    for (const HalfSpace& h : halfspaces_) {
        if (static_cast<int>(h.coeffs.size()) != dim_) {
            throw ArgumentError("halfspace coefficient count " +
                                std::to_string(h.coeffs.size()) + " does not match dimension " +
                                std::to_string(dim_));
        }
    }
}

bool DofRegion::contains(const DofPoint& p, double tol) const {
    if (static_cast<int>(p.size()) != dim_) {
        throw ArgumentError("point dimension " + std::to_string(p.size()) +
                            " does not match region dimension " + std::to_string(dim_));
    }
    for (double x : p) {
        if (x < -tol) return false;
    }
    for (const HalfSpace& h : halfspaces_) {
        double lhs = 0.0;
        for (int i = 0; i < dim_; ++i) lhs += h.coeffs[static_cast<std::size_t>(i)] * p[static_cast<std::size_t>(i)];
        if (lhs > h.bound + tol) return false;
    }
    return true;
}

const std::vector<DofPoint>& DofRegion::vertices() const {
    if (dim_ != 2) {
        throw UnsupportedDimensionError("vertex enumeration is implemented for 2-D regions only");
    }
    std::call_once(cache_->once, [this] {
        // Candidate lines: every halfspace boundary plus the two axes.
        struct Line {
            double a, b, c;  // a x + b y = c
        };
        std::vector<Line> lines;
        for (const HalfSpace& h : halfspaces_) {
            lines.push_back({h.coeffs[0], h.coeffs[1], h.bound});
        }
        lines.push_back({1.0, 0.0, 0.0});
        lines.push_back({0.0, 1.0, 0.0});

        std::vector<DofPoint> found;
        for (std::size_t i = 0; i < lines.size(); ++i) {
            for (std::size_t j = i + 1; j < lines.size(); ++j) {
                double det = lines[i].a * lines[j].b - lines[i].b * lines[j].a;
                double scale = std::max({std::abs(lines[i].a * lines[j].b),
                                         std::abs(lines[i].b * lines[j].a), 1.0});
                if (std::abs(det) <= 1e-12 * scale) continue;  // parallel or coincident
                DofPoint p = {(lines[i].c * lines[j].b - lines[i].b * lines[j].c) / det,
                              (lines[i].a * lines[j].c - lines[i].c * lines[j].a) / det};
                for (double& v : p)
                    if (v == 0.0) v = 0.0;  // normalize -0.0
                if (!contains(p, kGeomTol)) continue;
                bool dup = false;
                for (const DofPoint& q : found) {
                    if (std::abs(p[0] - q[0]) <= kGeomTol && std::abs(p[1] - q[1]) <= kGeomTol) {
                        dup = true;
                        break;
                    }
                }
                if (!dup) found.push_back(std::move(p));
            }
        }
        // Deterministic order: by angle around the centroid, radius on ties.
        double cx = 0.0, cy = 0.0;
        for (const DofPoint& p : found) {
            cx += p[0];
            cy += p[1];
        }
        if (!found.empty()) {
            cx /= static_cast<double>(found.size());
            cy /= static_cast<double>(found.size());
        }
        std::sort(found.begin(), found.end(), [&](const DofPoint& p, const DofPoint& q) {
            double ap = std::atan2(p[1] - cy, p[0] - cx);
            double aq = std::atan2(q[1] - cy, q[0] - cx);
            if (ap != aq) return ap < aq;
            double rp = std::hypot(p[0] - cx, p[1] - cy);
            double rq = std::hypot(q[0] - cx, q[1] - cy);
            return rp < rq;
        });
        cache_->verts = std::move(found);
    });
    return cache_->verts;
}

bool is_subset(const DofRegion& a, const DofRegion& b, double tol) {
    if (a.dim() != b.dim()) {
        throw ArgumentError("cannot compare regions of dimension " + std::to_string(a.dim()) +
                            " and " + std::to_string(b.dim()));
    }
    for (const DofPoint& v : a.vertices()) {
        if (!b.contains(v, tol)) return false;
    }
    return true;
}

double max_weighted_sum(const DofRegion& region, const std::vector<double>& weights) {
    if (static_cast<int>(weights.size()) != region.dim()) {
        throw ArgumentError("weight count does not match region dimension");
    }
    if (region.dim() == 2) {
        double best = 0.0;
        for (const DofPoint& v : region.vertices()) {
            best = std::max(best, weights[0] * v[0] + weights[1] * v[1]);
        }
        return best;
    }
    const auto n = static_cast<std::size_t>(region.dim());
    if (region.kind() == RegionKind::box) {
        // Each coordinate is bounded independently; positive weights take
        // the tightest per-coordinate bound, negative weights take 0.
        std::vector<double> bound(n, std::numeric_limits<double>::infinity());
        for (const HalfSpace& h : region.halfspaces()) {
            for (std::size_t i = 0; i < n; ++i) {
                if (h.coeffs[i] > 0.0) bound[i] = std::min(bound[i], h.bound / h.coeffs[i]);
            }
        }
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (weights[i] > 0.0) {
                if (std::isinf(bound[i])) {
                    throw ArgumentError("region is unbounded in a positively weighted direction");
                }
                total += weights[i] * bound[i];
            }
        }
        return total;
    }
    if (region.kind() == RegionKind::simplex) {
        // One halfspace c . d <= b: the maximum sits on a coordinate axis.
        const HalfSpace& h = region.halfspaces().front();
        double best = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (weights[i] > 0.0 && h.coeffs[i] > 0.0) {
                best = std::max(best, weights[i] * h.bound / h.coeffs[i]);
            }
        }
        return best;
    }
    throw UnsupportedDimensionError(
        "weighted maximisation above 2 dimensions needs a box or simplex region");
}

DofRegion region_perfect_csit(const JammerDistribution& dist) {
    const int k = dist.num_receivers();
    std::vector<HalfSpace> hs;
    for (int r = 0; r < k; ++r) {
        HalfSpace h;
        h.coeffs.assign(static_cast<std::size_t>(k), 0.0);
        h.coeffs[static_cast<std::size_t>(r)] = 1.0;
        h.bound = dist.marginal(r);
        hs.push_back(std::move(h));
    }
    return DofRegion(k, std::move(hs), RegionKind::box);
}

DofRegion region_dp(const JammerDistribution& dist) {
    TwoUser t = two_user(dist);
    std::vector<HalfSpace> hs = {
        {{1.0, 0.0}, t.l1},
        {{0.0, 1.0}, t.l2},
        {{2.0, 1.0}, 2.0 * t.l1 + t.l10},
        {{1.0, 2.0}, 2.0 * t.l2 + t.l01},
    };
    return DofRegion(2, std::move(hs), RegionKind::general);
}

DofRegion region_dd(const JammerDistribution& dist) {
    TwoUser t = two_user(dist);
    require_positive(t.l1, 1, "the delayed/delayed region");
    require_positive(t.l2, 2, "the delayed/delayed region");
    double s = t.l1 + t.l2;
    std::vector<HalfSpace> hs = {
        {{1.0 / t.l1, 1.0 / s}, 1.0},
        {{1.0 / s, 1.0 / t.l2}, 1.0},
    };
    return DofRegion(2, std::move(hs), RegionKind::general);
}

DofRegion region_dn_inner(const JammerDistribution& dist) {
    TwoUser t = two_user(dist);
    require_positive(t.l1, 1, "the delayed/none region");
    require_positive(t.l2, 2, "the delayed/none region");
    double condition = std::abs(t.l1 - t.l2) / (t.l1 * t.l2);
    if (condition <= 1.0) {
        // The boundary case lands on this branch; there the two halfspaces
        // coincide with the no-information simplex.
        double c1 = (2.0 * std::max(1.0, t.l1 / t.l2) - 1.0) / (1.0 + t.l2);
        double c2 = (2.0 * std::max(1.0, t.l2 / t.l1) - 1.0) / (1.0 + t.l1);
        std::vector<HalfSpace> hs = {
            {{1.0, c1}, t.l1},
            {{c2, 1.0}, t.l2},
        };
        return DofRegion(2, std::move(hs), RegionKind::general);
    }
    return region_nn(dist);
}

DofRegion region_np(const JammerDistribution& dist) {
    TwoUser t = two_user(dist);
    std::vector<HalfSpace> hs = {
        {{1.0, 0.0}, t.l1},
        {{0.0, 1.0}, t.l2},
        {{1.0, 1.0}, t.phi},
    };
    return DofRegion(2, std::move(hs), RegionKind::general);
}

DofRegion region_nd_inner(const JammerDistribution& dist) {
    TwoUser t = two_user(dist);
    require_positive(t.l1, 1, "the none/delayed region");
    require_positive(t.l2, 2, "the none/delayed region");
    std::vector<HalfSpace> hs = {
        {{1.0 / t.l1, 1.0 / t.phi}, 1.0},
        {{1.0 / t.phi, 1.0 / t.l2}, 1.0},
    };
    return DofRegion(2, std::move(hs), RegionKind::general);
}

DofRegion region_nn(const JammerDistribution& dist) {
    const int k = dist.num_receivers();
    HalfSpace h;
    h.coeffs.resize(static_cast<std::size_t>(k));
    h.bound = 1.0;
    for (int r = 0; r < k; ++r) {
        double lam = dist.marginal(r);
        require_positive(lam, r + 1, "the no-information region");
        h.coeffs[static_cast<std::size_t>(r)] = 1.0 / lam;
    }
    return DofRegion(k, {std::move(h)}, RegionKind::simplex);
}

DofRegion region_for_config(Config config, const JammerDistribution& dist) {
    switch (config) {
        case Config::PP:
        case Config::PD:
        case Config::PN:
            return region_perfect_csit(dist);
        case Config::DP:
            return region_dp(dist);
        case Config::DD:
            return region_dd(dist);
        case Config::DN:
            return region_dn_inner(dist);
        case Config::NP:
            return region_np(dist);
        case Config::ND:
            return region_nd_inner(dist);
        case Config::NN:
            return region_nn(dist);
    }
    throw ArgumentError("unhandled configuration");
}

DofRegion region_mat(int num_receivers) {
    if (num_receivers < 1 || num_receivers > 6) {
        throw UnsupportedDimensionError(
            "the jamming-free delayed-CSIT region enumerates K! halfspaces and is "
            "supported for K in [1, 6], got K=" +
            std::to_string(num_receivers));
    }
    const auto k = static_cast<std::size_t>(num_receivers);
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<HalfSpace> hs;
    do {
        HalfSpace h;
        h.coeffs.assign(k, 0.0);
        h.bound = 1.0;
        for (std::size_t pos = 0; pos < k; ++pos) {
            h.coeffs[static_cast<std::size_t>(perm[pos])] = 1.0 / static_cast<double>(pos + 1);
        }
        hs.push_back(std::move(h));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return DofRegion(num_receivers, std::move(hs),
                     num_receivers == 1 ? RegionKind::box : RegionKind::general);
}

double dof_mat(int num_receivers) {
    if (num_receivers < 0) throw ArgumentError("negative receiver count");
    if (num_receivers == 0) return 0.0;
    return static_cast<double>(num_receivers) / harmonic(num_receivers);
}

DofPoint dp_mat_corner(const JammerDistribution& dist) {
    TwoUser t = two_user(dist);
    return {2.0 / 3.0 * t.l00 + t.l01, 2.0 / 3.0 * t.l00 + t.l10};
}

DofPoint dd_corner(const JammerDistribution& dist) {
    TwoUser t = two_user(dist);
    require_positive(t.l1, 1, "the delayed/delayed corner");
    require_positive(t.l2, 2, "the delayed/delayed corner");
    double s = t.l1 + t.l2;
    return solve2x2(1.0 / t.l1, 1.0 / s, 1.0 / s, 1.0 / t.l2, 1.0, 1.0);
}

DofPoint nd_corner(const JammerDistribution& dist) {
    TwoUser t = two_user(dist);
    require_positive(t.l1, 1, "the none/delayed corner");
    require_positive(t.l2, 2, "the none/delayed corner");
    double det = 1.0 / (t.l1 * t.l2) - 1.0 / (t.phi * t.phi);
    if (det <= 1e-14 / (t.l1 * t.l2)) {
        // The two boundary lines coincide (no single-jammed states); the
        // natural operating point splits the simplex evenly.
        return {t.phi / 2.0, t.phi / 2.0};
    }
    return solve2x2(1.0 / t.l1, 1.0 / t.phi, 1.0 / t.phi, 1.0 / t.l2, 1.0, 1.0);
}

DofPoint dn_point(const JammerDistribution& dist) {
    TwoUser t = two_user(dist);
    require_positive(t.l1, 1, "the delayed/none operating point");
    require_positive(t.l2, 2, "the delayed/none operating point");
    double denom = 1.0 + 2.0 * std::max(1.0 / t.l1, 1.0 / t.l2);
    return {(1.0 + t.l1) / denom, (1.0 + t.l2) / denom};
}

double dd_sum_for_eta(const JammerDistribution& dist, double eta) {
    if (eta < 0.0 || eta > 1.0) throw ArgumentError("eta must lie in [0, 1]");
    TwoUser t = two_user(dist);
    require_positive(t.l1, 1, "the delayed/delayed split");
    require_positive(t.l2, 2, "the delayed/delayed split");
    double s = t.l1 + t.l2;
    double slots = 1.0 / s + std::max(t.l2 * eta / (t.l1 * s), t.l1 * (1.0 - eta) / (t.l2 * s));
    return 1.0 / slots;
}

double nd_sum_for_eta(const JammerDistribution& dist, double eta) {
    if (eta < 0.0 || eta > 1.0) throw ArgumentError("eta must lie in [0, 1]");
    TwoUser t = two_user(dist);
    require_positive(t.l1, 1, "the none/delayed split");
    require_positive(t.l2, 2, "the none/delayed split");
    double slots =
        1.0 / t.phi +
        std::max(t.l10 * eta / (t.l1 * t.phi), t.l01 * (1.0 - eta) / (t.l2 * t.phi));
    return 1.0 / slots;
}

double golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                          double tol) {
    if (!(hi > lo)) throw ArgumentError("golden-section interval is empty");
    const double invphi = 0.6180339887498948482;
    double a = lo, b = hi;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

double optimal_eta_dd(const JammerDistribution& dist) {
    return golden_section_max([&](double eta) { return dd_sum_for_eta(dist, eta); }, 0.0, 1.0);
}

double optimal_eta_nd(const JammerDistribution& dist) {
    return golden_section_max([&](double eta) { return nd_sum_for_eta(dist, eta); }, 0.0, 1.0);
}

double sum_dof_dp_k(const JammerDistribution& dist) {
    if (!dist.is_symmetric()) {
        throw PreconditionError("the K-user delayed/perfect sum DoF needs a symmetric "
                                "jammer distribution");
    }
    const int k = dist.num_receivers();
    std::vector<double> eta = dist.class_probabilities();
    double sum = 0.0;
    for (int j = 0; j <= k; ++j) {
        sum += eta[static_cast<std::size_t>(j)] * dof_mat(k - j);
    }
    return sum;
}

double sum_dof_dd_k(const JammerDistribution& dist) {
    if (!dist.is_symmetric()) {
        throw PreconditionError("the K-user delayed/delayed sum DoF needs a symmetric "
                                "jammer distribution");
    }
    return dist.lambda_eta() * dof_mat(dist.num_receivers());
}

std::vector<double> dof_recursion_levels(const JammerDistribution& dist) {
    if (!dist.is_symmetric()) {
        throw PreconditionError("the per-order recursion needs a symmetric jammer distribution");
    }
    const int k = dist.num_receivers();
    const double lam = dist.lambda_eta();
    std::vector<double> levels(static_cast<std::size_t>(k), 0.0);
    if (lam <= 0.0) return levels;
    // C(K, K+1) = 0 makes the j = K step reduce to the base value lambda_eta.
    for (int j = k; j >= 1; --j) {
        double penalty = 0.0;
        if (j < k) {
            penalty = j * binomial(k, j + 1) / levels[static_cast<std::size_t>(j)];
        }
        levels[static_cast<std::size_t>(j - 1)] =
            (k - j + 1) * binomial(k, j) / (binomial(k, j) / lam + penalty);
    }
    return levels;
}

double dof_recursion_dd(const JammerDistribution& dist) {
    return dof_recursion_levels(dist).front();
}

double gap_dp_dd_lower_bound(int num_receivers) {
    if (num_receivers < 1) throw ArgumentError("receiver count must be positive");
    double h = harmonic(num_receivers);
    return (num_receivers - 1) / (4.0 * h * h);
}

double gap_mat_dp_lower_bound(int num_receivers) {
    if (num_receivers < 1) throw ArgumentError("receiver count must be positive");
    double h = harmonic(num_receivers);
    double k = num_receivers;
    double pow2 = std::ldexp(1.0, num_receivers);
    return k / (2.0 * h) - k * (pow2 - 1.0) / (pow2 * h * h);
}

}  // namespace jamdof
