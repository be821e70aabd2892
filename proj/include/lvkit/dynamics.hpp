#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lvkit/errors.hpp"
#include "lvkit/operators.hpp"
#include "lvkit/simplex.hpp"

namespace lvkit {

inline constexpr int kConfirmSteps = 10; // consecutive small steps to declare convergence

namespace detail {

/// Gaussian elimination with partial pivoting; false on (near-)singular.
inline bool solve_linear(std::vector<double>& a, std::vector<double>& b, int n) {
    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = std::abs(a[static_cast<std::size_t>(col) * n + col]);
        for (int r = col + 1; r < n; ++r) {
            double v = std::abs(a[static_cast<std::size_t>(r) * n + col]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best < 1e-14) return false;
        if (piv != col) {
            for (int c = col; c < n; ++c)
                std::swap(a[static_cast<std::size_t>(piv) * n + c], a[static_cast<std::size_t>(col) * n + c]);
            std::swap(b[static_cast<std::size_t>(piv)], b[static_cast<std::size_t>(col)]);
        }
        double d = a[static_cast<std::size_t>(col) * n + col];
        for (int r = col + 1; r < n; ++r) {
            double f = a[static_cast<std::size_t>(r) * n + col] / d;
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c)
                a[static_cast<std::size_t>(r) * n + c] -= f * a[static_cast<std::size_t>(col) * n + c];
            b[static_cast<std::size_t>(r)] -= f * b[static_cast<std::size_t>(col)];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        double s = b[static_cast<std::size_t>(r)];
        for (int c = r + 1; c < n; ++c) s -= a[static_cast<std::size_t>(r) * n + c] * b[static_cast<std::size_t>(c)];
        b[static_cast<std::size_t>(r)] = s / a[static_cast<std::size_t>(r) * n + r];
    }
    return true;
}

/// Affine chart on a face: the first |alpha|-1 support coordinates are free,
/// the last support coordinate closes the sum to 1, everything off the face
/// is pinned to zero. Newton operates in these coordinates so the simplex
/// constraint never enters the linear algebra.
class FaceChart {
public:
    explicit FaceChart(const FaceIndexSet& alpha) : m_(alpha.ambient_dim()) {
        for (int i : alpha.indices()) sup_.push_back(i - 1);
    }

    int ambient_dim() const { return m_; }
    int chart_dim() const { return static_cast<int>(sup_.size()) - 1; }
    const std::vector<int>& support0() const { return sup_; }

    void to_point(std::span<const double> y, std::vector<double>& x) const {
        x.assign(static_cast<std::size_t>(m_), 0.0);
        double rest = 1.0;
        for (std::size_t i = 0; i + 1 < sup_.size(); ++i) {
            x[static_cast<std::size_t>(sup_[i])] = y[i];
            rest -= y[i];
        }
        x[static_cast<std::size_t>(sup_.back())] = rest;
    }

    std::vector<double> to_chart(std::span<const double> x) const {
        std::vector<double> y(sup_.size() - 1);
        for (std::size_t i = 0; i + 1 < sup_.size(); ++i) y[i] = x[static_cast<std::size_t>(sup_[i])];
        return y;
    }

    /// All coordinates of x(y) within [-slack, 1+slack]?
    bool feasible(std::span<const double> y, double slack = 1e-9) const {
        double rest = 1.0;
        for (std::size_t i = 0; i + 1 < sup_.size(); ++i) {
            if (y[i] < -slack || y[i] > 1.0 + slack) return false;
            rest -= y[i];
        }
        return rest >= -slack && rest <= 1.0 + slack;
    }

    /// Valid SimplexPoint from chart coordinates, tiny negatives clamped.
    SimplexPoint materialize(std::span<const double> y) const {
        std::vector<double> x;
        to_point(y, x);
        for (double& v : x) v = std::min(1.0, std::max(0.0, v));
        return project_to_simplex(std::move(x)).point;
    }

private:
    int m_;
    std::vector<int> sup_; // 0-based support indices
};

struct NewtonOptions {
    double tol = 1e-11;       // sup-norm residual target
    int max_iter = 60;
    double fd_step = 1e-7;    // forward-difference Jacobian step
    int max_backtracks = 30;
};

struct NewtonOutcome {
    bool converged = false;
    std::vector<double> y;
    double residual = std::numeric_limits<double>::infinity();
    int iterations = 0;
};

/// Damped Newton with a forward-difference Jacobian. g maps chart coords to
/// a residual vector of the same dimension; iterates are kept feasible for
/// the supplied chart.
inline NewtonOutcome newton_solve(const std::function<void(std::span<const double>, std::span<double>)>& g,
                                  std::vector<double> y0, const FaceChart& chart,
                                  const NewtonOptions& opt = {}) {
    const int d = static_cast<int>(y0.size());
    NewtonOutcome out;
    if (d == 0) { // zero-dimensional chart: nothing to solve
        std::vector<double> r0;
        out.y = std::move(y0);
        out.residual = 0.0;
        out.converged = true;
        return out;
    }
    std::vector<double> r(static_cast<std::size_t>(d)), rt(static_cast<std::size_t>(d));
    std::vector<double> jac(static_cast<std::size_t>(d) * d), rhs(static_cast<std::size_t>(d));
    std::vector<double> yt(static_cast<std::size_t>(d)), yp(static_cast<std::size_t>(d));

    auto inf_norm = [](std::span<const double> v) {
        double s = 0.0;
        for (double e : v) s = std::max(s, std::abs(e));
        return s;
    };

    g(y0, r);
    double rn = inf_norm(r);
    for (int it = 0; it < opt.max_iter; ++it) {
        out.iterations = it;
        if (rn <= opt.tol) {
            out.converged = true;
            break;
        }
        for (int j = 0; j < d; ++j) {
            yp = y0;
            yp[static_cast<std::size_t>(j)] += opt.fd_step;
            g(yp, rt);
            for (int i = 0; i < d; ++i)
                jac[static_cast<std::size_t>(i) * d + j] =
                    (rt[static_cast<std::size_t>(i)] - r[static_cast<std::size_t>(i)]) / opt.fd_step;
        }
        for (int i = 0; i < d; ++i) rhs[static_cast<std::size_t>(i)] = -r[static_cast<std::size_t>(i)];
        std::vector<double> jcopy = jac;
        if (!solve_linear(jcopy, rhs, d)) break;

        double t = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < opt.max_backtracks; ++bt, t *= 0.5) {
            for (int i = 0; i < d; ++i)
                yt[static_cast<std::size_t>(i)] = y0[static_cast<std::size_t>(i)] + t * rhs[static_cast<std::size_t>(i)];
            if (!chart.feasible(yt)) continue;
            g(yt, rt);
            double rtn = inf_norm(rt);
            if (rtn < rn || rtn <= opt.tol) {
                y0 = yt;
                r = rt;
                rn = rtn;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    if (rn <= opt.tol) out.converged = true;
    out.y = std::move(y0);
    out.residual = rn;
    return out;
}

/// Lattice of the face with denominator `density` (all compositions), used
/// as the deterministic multistart grid for root searches.
inline std::vector<std::vector<double>> chart_grid(const FaceChart& chart, int density) {
    std::vector<std::vector<double>> out;
    int r = chart.chart_dim() + 1;
    if (chart.chart_dim() == 0) {
        out.push_back({});
        return out;
    }
    std::vector<int> comp(static_cast<std::size_t>(r), 0);
    std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos == r - 1) {
            comp[static_cast<std::size_t>(pos)] = left;
            std::vector<double> y(static_cast<std::size_t>(r - 1));
            for (int i = 0; i + 1 < r; ++i) y[static_cast<std::size_t>(i)] = static_cast<double>(comp[static_cast<std::size_t>(i)]) / density;
            out.push_back(std::move(y));
            return;
        }
        for (int k = 0; k <= left; ++k) {
            comp[static_cast<std::size_t>(pos)] = k;
            rec(pos + 1, left - k);
        }
    };
    rec(0, density);
    return out;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Trajectories
// ---------------------------------------------------------------------------

enum class TrajectoryStatus { Converged, MaxIterReached, DriftAborted };

inline const char* to_string(TrajectoryStatus s) {
    switch (s) {
        case TrajectoryStatus::Converged: return "converged";
        case TrajectoryStatus::MaxIterReached: return "max_iter_reached";
        case TrajectoryStatus::DriftAborted: return "drift_aborted";
    }
    return "?";
}

/// Ordered iterates of one orbit, thinned to a bounded store. Stored entries
/// carry their step index, so consecutive stored points are exactly
/// stride-many applications apart and the whole record replays.
struct Trajectory {
    SimplexPoint start;
    std::vector<std::pair<std::size_t, SimplexPoint>> points;
    TrajectoryStatus status = TrajectoryStatus::MaxIterReached;
    std::optional<SimplexPoint> limit;
    std::size_t converged_at = 0;
    std::size_t total_steps = 0;
    double drift_total = 0.0;
    std::string abort_reason;

    const SimplexPoint& last_point() const { return points.back().second; }
};

/// Iterates V from x0 until the sup-step stays <= tau_conv for kConfirmSteps
/// consecutive steps (a bitwise-stationary step terminates immediately), the
/// iteration cap is hit, or the drift guard trips. Stores every stride-th
/// iterate, with the stride doubling whenever the store would exceed
/// store_cap, plus the final confirmation window.
inline Trajectory iterate(const LVOperator& v, const SimplexPoint& x0,
                          const ToleranceProfile& profile, std::size_t store_cap = 10000) {
    if (x0.dim() != v.dim()) throw DimensionMismatch("iterate: start dimension mismatch");
    Trajectory tr;
    tr.start = x0;
    tr.points.emplace_back(0, x0);

    const std::size_t m = static_cast<std::size_t>(v.dim());
    std::vector<double> cur(x0.coords()), nxt(m), fbuf(m);
    std::size_t stride = 1;

    // ring of the last kConfirmSteps+1 iterates for the confirmation window
    std::vector<std::pair<std::size_t, SimplexPoint>> tail;
    auto push_tail = [&tail](std::size_t step, const std::vector<double>& p) {
        tail.emplace_back(step, SimplexPoint::trusted(std::vector<double>(p)));
        if (tail.size() > kConfirmSteps + 1) tail.erase(tail.begin());
    };
    push_tail(0, cur);

    int quiet = 0;
    for (std::size_t step = 1; step <= profile.max_iter; ++step) {
        double drift;
        try {
            drift = v.step(cur, nxt, fbuf);
        } catch (const DriftExceeded& e) {
            tr.status = TrajectoryStatus::DriftAborted;
            tr.abort_reason = e.what();
            tr.total_steps = step - 1;
            break;
        }
        tr.drift_total += drift;
        double d = sup_distance(std::span<const double>(cur), std::span<const double>(nxt));
        cur.swap(nxt);
        tr.total_steps = step;
        push_tail(step, cur);

        if (step % stride == 0) {
            tr.points.emplace_back(step, SimplexPoint::trusted(std::vector<double>(cur)));
            if (tr.points.size() > store_cap) {
                std::vector<std::pair<std::size_t, SimplexPoint>> thinned;
                thinned.reserve(tr.points.size() / 2 + 1);
                for (auto& e : tr.points)
                    if (e.first % (stride * 2) == 0) thinned.push_back(std::move(e));
                tr.points = std::move(thinned);
                stride *= 2;
            }
        }

        if (d == 0.0) { // bitwise fixed point: nothing can move again
            tr.status = TrajectoryStatus::Converged;
            tr.converged_at = step;
            tr.limit = SimplexPoint::trusted(std::vector<double>(cur));
            break;
        }
        quiet = (d <= profile.tau_conv) ? quiet + 1 : 0;
        if (quiet >= kConfirmSteps) {
            tr.status = TrajectoryStatus::Converged;
            tr.converged_at = step;
            tr.limit = SimplexPoint::trusted(std::vector<double>(cur));
            break;
        }
    }

    // merge the confirmation tail into the store
    for (auto& e : tail) {
        if (e.first > tr.points.back().first) tr.points.push_back(std::move(e));
    }
    return tr;
}

struct OmegaCluster {
    SimplexPoint representative;
    std::size_t visits = 0;
};

/// Burns in, then clusters `window` further iterates by dedup radius.
/// Cluster representatives are returned with visit counts, most-visited
/// first.
inline std::vector<OmegaCluster> omega_limit(const LVOperator& v, const SimplexPoint& x0,
                                             const ToleranceProfile& profile, std::size_t burn_in,
                                             std::size_t window, double dedup_radius = 1e-6) {
    if (window < 1) throw ConfigError("omega_limit: window must be >= 1");
    const std::size_t m = static_cast<std::size_t>(v.dim());
    std::vector<double> cur(x0.coords()), nxt(m), fbuf(m);
    for (std::size_t i = 0; i < burn_in; ++i) {
        v.step(cur, nxt, fbuf);
        cur.swap(nxt);
    }
    std::vector<OmegaCluster> clusters;
    for (std::size_t i = 0; i < window; ++i) {
        SimplexPoint p = SimplexPoint::trusted(std::vector<double>(cur));
        bool placed = false;
        for (auto& c : clusters) {
            if (sup_distance(c.representative, p) <= dedup_radius) {
                ++c.visits;
                placed = true;
                break;
            }
        }
        if (!placed) clusters.push_back({std::move(p), 1});
        v.step(cur, nxt, fbuf);
        cur.swap(nxt);
    }
    std::sort(clusters.begin(), clusters.end(), [](const OmegaCluster& a, const OmegaCluster& b) {
        if (a.visits != b.visits) return a.visits > b.visits;
        return a.representative.coords() < b.representative.coords();
    });
    return clusters;
}

// ---------------------------------------------------------------------------
// Fixed points and periodic orbits
// ---------------------------------------------------------------------------

struct FixedPointSet {
    struct Entry {
        SimplexPoint point;
        double residual = 0.0;
        FaceIndexSet face; // support face of the point
    };
    std::vector<Entry> points;
    double dedup_radius = 1e-6;
};

/// Face-by-face damped-Newton search for roots of V(x) - x. Every face of
/// the simplex is swept from a lattice of grid_density plus the face center;
/// residual-qualified roots are deduplicated across faces.
inline FixedPointSet find_fixed_points(const LVOperator& v, int grid_density,
                                       const ToleranceProfile& profile, double dedup_radius = 1e-6) {
    const int m = v.dim();
    FixedPointSet out;
    out.dedup_radius = dedup_radius;

    struct Candidate {
        SimplexPoint point;
        double residual;
    };
    std::vector<Candidate> candidates;

    auto try_candidate = [&](const SimplexPoint& p) {
        double res = sup_distance(v.apply(p), p);
        if (res <= profile.tau_root) candidates.push_back({p, res});
    };

    for (const auto& alpha : enumerate_faces(m)) {
        detail::FaceChart chart(alpha);
        if (chart.chart_dim() == 0) {
            try_candidate(face_center(alpha)); // vertex
            continue;
        }
        auto g = [&](std::span<const double> y, std::span<double> r) {
            std::vector<double> x, fx(static_cast<std::size_t>(m));
            chart.to_point(y, x);
            v.map().eval(x, fx);
            const auto& sup = chart.support0();
            for (int i = 0; i < chart.chart_dim(); ++i) {
                std::size_t k = static_cast<std::size_t>(sup[static_cast<std::size_t>(i)]);
                r[static_cast<std::size_t>(i)] = x[k] * fx[k]; // (Vx - x)_k
            }
        };
        detail::NewtonOptions opt;
        // the chart drops one support coordinate whose residual is the sum of
        // the others, so aim well below tau_root
        opt.tol = std::max(profile.tau_root / (2.0 * m), 1e-14);
        auto starts = detail::chart_grid(chart, grid_density);
        starts.push_back(chart.to_chart(face_center(alpha).view()));
        for (auto& y0 : starts) {
            SimplexPoint p0 = chart.materialize(y0);
            double res0 = sup_distance(v.apply(p0), p0);
            if (res0 <= profile.tau_root) {
                candidates.push_back({p0, res0});
                continue;
            }
            auto sol = detail::newton_solve(g, y0, chart, opt);
            if (!sol.converged) continue;
            SimplexPoint p = chart.materialize(sol.y);
            try_candidate(p);
        }
    }

    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.residual != b.residual) return a.residual < b.residual;
        return a.point.coords() < b.point.coords();
    });
    for (const auto& c : candidates) {
        bool dup = false;
        for (const auto& e : out.points)
            if (sup_distance(e.point, c.point) < dedup_radius) {
                dup = true;
                break;
            }
        if (dup) continue;
        out.points.push_back({c.point, c.residual, support(c.point, 1e-7)});
    }
    std::sort(out.points.begin(), out.points.end(), [](const FixedPointSet::Entry& a, const FixedPointSet::Entry& b) {
        return a.point.coords() < b.point.coords();
    });
    return out;
}

struct PeriodicOrbit {
    int period = 0;
    std::vector<SimplexPoint> orbit;
    double residual = 0.0;
};

/// Newton search for minimal-period orbits of period 2..r_max on the full
/// simplex. Roots of V^r - Id that revisit themselves within 10*tau_root at
/// some smaller power are discarded (fixed points and lower periods show up
/// there too).
inline std::vector<PeriodicOrbit> find_periodic(const LVOperator& v, int r_max, int grid_density,
                                                const ToleranceProfile& profile,
                                                double dedup_radius = 1e-6) {
    if (r_max < 2) throw ConfigError("find_periodic: r_max must be >= 2");
    const int m = v.dim();
    detail::FaceChart chart(FaceIndexSet::full(m));
    std::vector<PeriodicOrbit> found;

    auto minimality_ok = [&](const SimplexPoint& p, int r) {
        SimplexPoint cur = p;
        for (int i = 1; i < r; ++i) {
            cur = v.apply(cur);
            if (sup_distance(cur, p) <= 10.0 * profile.tau_root) return false;
        }
        return true;
    };

    for (int r = 2; r <= r_max; ++r) {
        auto g = [&](std::span<const double> y, std::span<double> res) {
            std::vector<double> x, nxt(static_cast<std::size_t>(m)), fbuf(static_cast<std::size_t>(m));
            chart.to_point(y, x);
            std::vector<double> x0 = x;
            for (int i = 0; i < r; ++i) {
                v.map().eval(x, fbuf);
                for (int k = 0; k < m; ++k)
                    nxt[static_cast<std::size_t>(k)] =
                        x[static_cast<std::size_t>(k)] * (1.0 + fbuf[static_cast<std::size_t>(k)]);
                x.swap(nxt);
            }
            for (int i = 0; i < chart.chart_dim(); ++i) {
                std::size_t k = static_cast<std::size_t>(chart.support0()[static_cast<std::size_t>(i)]);
                res[static_cast<std::size_t>(i)] = x[k] - x0[k];
            }
        };
        detail::NewtonOptions opt;
        opt.tol = std::max(profile.tau_root / (2.0 * m), 1e-14);
        for (auto& y0 : detail::chart_grid(chart, grid_density)) {
            SimplexPoint p0 = chart.materialize(y0);
            double res0 = sup_distance(v.apply_n(p0, static_cast<std::size_t>(r)), p0);
            SimplexPoint root = p0;
            if (res0 > profile.tau_root) {
                auto sol = detail::newton_solve(g, y0, chart, opt);
                if (!sol.converged) continue;
                root = chart.materialize(sol.y);
            }
            double res = sup_distance(v.apply_n(root, static_cast<std::size_t>(r)), root);
            if (res > profile.tau_root) continue;
            if (!minimality_ok(root, r)) continue;

            PeriodicOrbit orb;
            orb.period = r;
            orb.residual = res;
            SimplexPoint cur = root;
            for (int i = 0; i < r; ++i) {
                orb.orbit.push_back(cur);
                cur = v.apply(cur);
            }
            // canonical rotation: lexicographically smallest point first
            std::size_t best = 0;
            for (std::size_t i = 1; i < orb.orbit.size(); ++i)
                if (orb.orbit[i].coords() < orb.orbit[best].coords()) best = i;
            std::rotate(orb.orbit.begin(), orb.orbit.begin() + static_cast<std::ptrdiff_t>(best),
                        orb.orbit.end());

            bool dup = false;
            for (const auto& o : found)
                if (o.period == r && sup_distance(o.orbit.front(), orb.orbit.front()) < dedup_radius)
                    dup = true;
            if (!dup) found.push_back(std::move(orb));
        }
    }
    std::sort(found.begin(), found.end(), [](const PeriodicOrbit& a, const PeriodicOrbit& b) {
        if (a.period != b.period) return a.period < b.period;
        return a.orbit.front().coords() < b.orbit.front().coords();
    });
    return found;
}

// ---------------------------------------------------------------------------
// Preimages via homotopy continuation
// ---------------------------------------------------------------------------

/// Continuation record for solving V(x) = y through the homotopy
/// x_k(1 + eps f_k(x)) from eps=0 (identity, solution x=y) to eps=1.
struct PreimageResult {
    SimplexPoint target;
    std::optional<SimplexPoint> x;
    double residual = std::numeric_limits<double>::infinity();
    std::vector<std::pair<double, SimplexPoint>> path; // accepted (eps, point)
    bool stalled = false;

    bool ok(double tau_root) const { return x.has_value() && residual <= tau_root; }
};

inline PreimageResult preimage(const LVOperator& v, const SimplexPoint& y, std::size_t n_steps,
                               const ToleranceProfile& profile) {
    if (y.dim() != v.dim()) throw DimensionMismatch("preimage: target dimension mismatch");
    if (n_steps < 1) throw ConfigError("preimage: n_steps must be >= 1");
    PreimageResult out;
    out.target = y;

    const int m = v.dim();
    FaceIndexSet alpha = support(y, 1e-12);
    detail::FaceChart chart(alpha);
    out.path.emplace_back(0.0, y);

    if (chart.chart_dim() == 0) { // vertex target: the homotopy is constant
        out.x = y;
        out.residual = sup_distance(v.apply(y), y);
        out.path.emplace_back(1.0, y);
        return out;
    }

    double eps = 0.0;
    std::vector<double> ycur = chart.to_chart(y.view());
    const double h0 = 1.0 / static_cast<double>(n_steps);
    double h = h0;
    const double h_min = h0 / 1048576.0; // 20 halvings

    detail::NewtonOptions opt;
    opt.tol = profile.tau_root * 0.5;

    std::vector<double> fx(static_cast<std::size_t>(m));
    while (eps < 1.0) {
        double eps_next = std::min(1.0, eps + h);
        auto g = [&](std::span<const double> yc, std::span<double> r) {
            std::vector<double> x;
            chart.to_point(yc, x);
            v.map().eval(x, fx);
            const auto& sup = chart.support0();
            for (int i = 0; i < chart.chart_dim(); ++i) {
                std::size_t k = static_cast<std::size_t>(sup[static_cast<std::size_t>(i)]);
                r[static_cast<std::size_t>(i)] = x[k] * (1.0 + eps_next * fx[k]) - y[static_cast<int>(k)];
            }
        };
        auto sol = detail::newton_solve(g, ycur, chart, opt);
        if (sol.converged) {
            eps = eps_next;
            ycur = sol.y;
            out.path.emplace_back(eps, chart.materialize(ycur));
            h = std::min(h0, 1.0 - eps > 0.0 ? 1.0 - eps : h0);
            if (h == 0.0) h = h0;
        } else {
            h *= 0.5;
            if (h < h_min) {
                out.stalled = true;
                return out;
            }
        }
    }

    SimplexPoint xfinal = chart.materialize(ycur);
    out.x = xfinal;
    out.residual = sup_distance(v.apply(xfinal), y);
    return out;
}

struct SurjectivityReport {
    struct TargetOutcome {
        SimplexPoint target;
        bool ok = false;
        bool stalled = false;
        double residual = std::numeric_limits<double>::infinity();
    };
    std::uint64_t n_targets = 0;
    std::uint64_t n_success = 0;
    double success_rate = 0.0;
    double worst_residual = 0.0; // over successes
    std::vector<TargetOutcome> outcomes;

    bool all_stalled() const {
        if (outcomes.empty()) return false;
        for (const auto& o : outcomes)
            if (!o.stalled) return false;
        return true;
    }
};

/// Samples targets over faces of every dimension (round-robin) and attempts
/// a continuation preimage for each.
inline SurjectivityReport surjectivity_probe(const LVOperator& v, std::uint64_t n_targets,
                                             std::uint64_t seed, const ToleranceProfile& profile,
                                             std::size_t n_steps = 50) {
    if (n_targets < 1) throw ConfigError("surjectivity_probe: n_targets must be >= 1");
    SurjectivityReport rep;
    rep.n_targets = n_targets;
    auto faces = enumerate_faces(v.dim());
    for (std::uint64_t t = 0; t < n_targets; ++t) {
        const auto& alpha = faces[static_cast<std::size_t>(t % faces.size())];
        SimplexPoint y = sample_point(alpha, true, Rng::derive(seed, t));
        PreimageResult pr = preimage(v, y, n_steps, profile);
        SurjectivityReport::TargetOutcome o;
        o.target = y;
        o.stalled = pr.stalled;
        o.residual = pr.residual;
        o.ok = pr.ok(profile.tau_root);
        if (o.ok) {
            ++rep.n_success;
            rep.worst_residual = std::max(rep.worst_residual, o.residual);
        }
        rep.outcomes.push_back(std::move(o));
    }
    rep.success_rate = static_cast<double>(rep.n_success) / static_cast<double>(rep.n_targets);
    return rep;
}

} // namespace lvkit
