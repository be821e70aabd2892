#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lvkit/errors.hpp"
#include "lvkit/rng.hpp"

namespace lvkit {

inline constexpr double kDefaultTauSimplex = 1e-12;
inline constexpr double kDefaultTauTie = 1e-9;
inline constexpr double kInteriorFloor = 1e-6;

/// Numerical knobs shared by every iterative routine. All tolerances are
/// absolute; coordinates live in [0,1] so relative scales buy nothing.
struct ToleranceProfile {
    double tau_simplex = kDefaultTauSimplex; ///< simplex membership tolerance
    double tau_tie = kDefaultTauTie;         ///< argmax/argmin tie tolerance
    double tau_conv = 1e-10;                 ///< trajectory convergence threshold
    double tau_root = 1e-10;                 ///< root-finder residual threshold
    std::size_t max_iter = 1'000'000;        ///< iteration cap

    void validate() const {
        if (tau_simplex <= 0 || tau_tie <= 0 || tau_conv <= 0 || tau_root <= 0)
            throw ConfigError("all tolerances must be strictly positive");
        if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
    }
};

/// A barycentric point of the (m-1)-dimensional standard simplex:
/// m nonnegative coordinates summing to 1, within tau_simplex.
class SimplexPoint {
public:
    SimplexPoint() = default;

    /// Validating constructor; rejects anything a repairing projection
    /// would not accept either.
    explicit SimplexPoint(std::vector<double> coords, double tau = kDefaultTauSimplex)
        : c_(std::move(coords)) {
        if (c_.size() < 2) throw DimensionMismatch("simplex dimension m must be >= 2");
        double sum = 0.0;
        for (double v : c_) {
            if (v < -tau) throw DriftExceeded("coordinate below -tau_simplex");
            sum += v;
        }
        if (std::abs(sum - 1.0) > tau) throw DriftExceeded("coordinate sum off 1 beyond tau_simplex");
    }

    /// Wraps coordinates that are already known to satisfy the invariants
    /// (outputs of project_to_simplex, face centers, ...).
    static SimplexPoint trusted(std::vector<double> coords) {
        SimplexPoint p;
        p.c_ = std::move(coords);
        return p;
    }

    int dim() const { return static_cast<int>(c_.size()); }
    const std::vector<double>& coords() const { return c_; }
    std::span<const double> view() const { return c_; }
    double operator[](int i) const { return c_[static_cast<std::size_t>(i)]; } // 0-based

    friend bool operator==(const SimplexPoint& a, const SimplexPoint& b) {
        return a.c_ == b.c_;
    }

private:
    std::vector<double> c_;
};

/// A nonempty subset of I = {1,...,m} identifying a face of the simplex.
/// Members are 1-based (every external surface of this library is 1-based),
/// strictly sorted, duplicate-free.
class FaceIndexSet {
public:
    FaceIndexSet(std::vector<int> indices, int m) : idx_(std::move(indices)), m_(m) {
        std::sort(idx_.begin(), idx_.end());
        idx_.erase(std::unique(idx_.begin(), idx_.end()), idx_.end());
        if (idx_.empty()) throw Error("face index set must be nonempty");
        if (m_ < 2) throw DimensionMismatch("ambient dimension m must be >= 2");
        if (idx_.front() < 1 || idx_.back() > m_)
            throw Error("face indices must lie in [1, m]");
    }

    static FaceIndexSet full(int m) {
        std::vector<int> all(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) all[static_cast<std::size_t>(i)] = i + 1;
        return FaceIndexSet(std::move(all), m);
    }

    int ambient_dim() const { return m_; }
    int size() const { return static_cast<int>(idx_.size()); }
    const std::vector<int>& indices() const { return idx_; } // 1-based
    bool contains(int one_based) const {
        return std::binary_search(idx_.begin(), idx_.end(), one_based);
    }

    std::string to_string() const {
        std::string s = "{";
        for (std::size_t i = 0; i < idx_.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(idx_[i]);
        }
        return s + "}";
    }

    friend bool operator==(const FaceIndexSet& a, const FaceIndexSet& b) {
        return a.m_ == b.m_ && a.idx_ == b.idx_;
    }

private:
    std::vector<int> idx_;
    int m_ = 0;
};

struct ProjectionResult {
    SimplexPoint point;
    double drift = 0.0; ///< total repair applied: |sum-1| plus clamped negatives
};

/// Repairs float drift: clamps coordinates in [-tau, 0) to zero and
/// renormalizes by the sum. Rejects repairs large enough to indicate a broken
/// operator rather than accumulation noise: any coordinate < -tau, or a sum
/// more than 1e-6 away from 1 before repair.
inline ProjectionResult project_to_simplex(std::vector<double> v, double tau = kDefaultTauSimplex) {
    if (v.size() < 2) throw DimensionMismatch("simplex dimension m must be >= 2");
    double drift = 0.0;
    double sum = 0.0;
    for (double& x : v) {
        if (x < -tau) throw DriftExceeded("coordinate below -tau_simplex before repair");
        if (x < 0.0) {
            drift += -x;
            x = 0.0;
        }
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-6) throw DriftExceeded("coordinate sum drifted beyond 1e-6");
    if (sum <= 0.0) throw DriftExceeded("nonpositive coordinate sum");
    drift += std::abs(sum - 1.0);
    // plain division keeps bitwise-equal coordinates equal, which preserves
    // exact argmax ties across iteration
    for (double& x : v) x /= sum;
    return {SimplexPoint::trusted(std::move(v)), drift};
}

/// M(x): all indices within tau_tie of the maximal coordinate (1-based).
inline FaceIndexSet max_index_set(const SimplexPoint& x, double tau_tie = kDefaultTauTie) {
    const auto& c = x.coords();
    double mx = *std::max_element(c.begin(), c.end());
    std::vector<int> idx;
    for (std::size_t i = 0; i < c.size(); ++i)
        if (c[i] >= mx - tau_tie) idx.push_back(static_cast<int>(i) + 1);
    return FaceIndexSet(std::move(idx), x.dim());
}

/// m(x): all indices within tau_tie of the minimal coordinate (1-based).
inline FaceIndexSet min_index_set(const SimplexPoint& x, double tau_tie = kDefaultTauTie) {
    const auto& c = x.coords();
    double mn = *std::min_element(c.begin(), c.end());
    std::vector<int> idx;
    for (std::size_t i = 0; i < c.size(); ++i)
        if (c[i] <= mn + tau_tie) idx.push_back(static_cast<int>(i) + 1);
    return FaceIndexSet(std::move(idx), x.dim());
}

/// The center of the face: 1/|alpha| on alpha, 0 elsewhere.
inline SimplexPoint face_center(const FaceIndexSet& alpha) {
    std::vector<double> c(static_cast<std::size_t>(alpha.ambient_dim()), 0.0);
    double w = 1.0 / alpha.size();
    for (int i : alpha.indices()) c[static_cast<std::size_t>(i - 1)] = w;
    return SimplexPoint::trusted(std::move(c));
}

/// supp(x) at tolerance tau: indices with coordinate > tau.
inline FaceIndexSet support(const SimplexPoint& x, double tau = 1e-12) {
    std::vector<int> idx;
    const auto& c = x.coords();
    for (std::size_t i = 0; i < c.size(); ++i)
        if (c[i] > tau) idx.push_back(static_cast<int>(i) + 1);
    if (idx.empty()) throw Error("point has empty support at the given tolerance");
    return FaceIndexSet(std::move(idx), x.dim());
}

/// Uniform sample on the face (flat Dirichlet over the face coordinates,
/// exponential-spacings construction). interior=true additionally bounds
/// every face coordinate below by kInteriorFloor. Deterministic given seed.
inline SimplexPoint sample_point(const FaceIndexSet& alpha, bool interior, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> c(static_cast<std::size_t>(alpha.ambient_dim()), 0.0);
    const auto& idx = alpha.indices();
    if (idx.size() == 1) {
        c[static_cast<std::size_t>(idx[0] - 1)] = 1.0;
        return SimplexPoint::trusted(std::move(c));
    }
    std::vector<double> e(idx.size());
    for (int attempt = 0; attempt < 100; ++attempt) {
        double sum = 0.0;
        for (double& v : e) {
            v = rng.exponential();
            sum += v;
        }
        for (double& v : e) v /= sum;
        if (!interior) break;
        if (*std::min_element(e.begin(), e.end()) >= kInteriorFloor) break;
        if (attempt == 99) { // unreachable for sane |alpha|; clamp as last resort
            for (double& v : e) v = std::max(v, kInteriorFloor);
            double s2 = 0.0;
            for (double v : e) s2 += v;
            for (double& v : e) v /= s2;
        }
    }
    for (std::size_t i = 0; i < idx.size(); ++i)
        c[static_cast<std::size_t>(idx[i] - 1)] = e[i];
    return SimplexPoint::trusted(std::move(c));
}

/// sup-norm distance between two points of the same simplex.
inline double sup_distance(const SimplexPoint& x, const SimplexPoint& y) {
    if (x.dim() != y.dim()) throw DimensionMismatch("sup_distance: dimension mismatch");
    double d = 0.0;
    for (int i = 0; i < x.dim(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
    return d;
}

inline double sup_distance(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DimensionMismatch("sup_distance: dimension mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
    return d;
}

/// All 2^m - 1 nonempty faces, ordered by cardinality then lexicographically.
/// Exhaustive enumeration is capped at m <= 12.
inline std::vector<FaceIndexSet> enumerate_faces(int m) {
    if (m > 12) throw Error("exhaustive face enumeration capped at m <= 12");
    std::vector<FaceIndexSet> faces;
    faces.reserve((1u << m) - 1);
    for (unsigned mask = 1; mask < (1u << m); ++mask) {
        std::vector<int> idx;
        for (int i = 0; i < m; ++i)
            if (mask & (1u << i)) idx.push_back(i + 1);
        faces.emplace_back(std::move(idx), m);
    }
    std::sort(faces.begin(), faces.end(), [](const FaceIndexSet& a, const FaceIndexSet& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a.indices() < b.indices();
    });
    return faces;
}

} // namespace lvkit
