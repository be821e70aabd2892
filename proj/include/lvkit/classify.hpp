#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lvkit/dynamics.hpp"
#include "lvkit/operators.hpp"
#include "lvkit/rng.hpp"
#include "lvkit/simplex.hpp"

namespace lvkit {

inline constexpr double kPhiSlack = 1e-12;       // slack for monotone difference checks
inline constexpr double kMonotoneTol = 1e-10;    // inner-product negativity threshold
inline constexpr double kFormAgreement = 1e-12;  // two algebraic routes must agree this well
inline constexpr double kCollisionSep = 1e-4;    // minimum sup-separation of a collision pair

/// A reproducible counterexample: everything needed to recompute the
/// violating quantity is stored at full precision.
struct Witness {
    std::vector<SimplexPoint> points;  // one or two
    std::string quantity_name;         // phi_decrease | phi_increase | inner_product | image_gap | form_disagreement
    double quantity = 0.0;
    std::optional<std::size_t> step;
    int k = 0; // 1-based tracked index, 0 if n/a
    int j = 0;
};

enum class VerdictStatus { PassSampled, Fail, Skipped };

inline const char* to_string(VerdictStatus s) {
    switch (s) {
        case VerdictStatus::PassSampled: return "pass_sampled";
        case VerdictStatus::Fail: return "fail";
        case VerdictStatus::Skipped: return "skipped";
    }
    return "?";
}

/// Probes can only refute a universally quantified property, never prove it,
/// hence the verdict is "pass (sampled)" rather than "pass".
struct Verdict {
    VerdictStatus status = VerdictStatus::Skipped;
    std::uint64_t samples = 0;
    std::optional<Witness> witness;
    std::string reason;
    double worst_margin = 0.0; // probe-specific extremal quantity over the sample

    static Verdict pass(std::uint64_t n, double margin) {
        Verdict v;
        v.status = VerdictStatus::PassSampled;
        v.samples = n;
        v.worst_margin = margin;
        return v;
    }
    static Verdict fail(Witness w, std::uint64_t n, double margin) {
        Verdict v;
        v.status = VerdictStatus::Fail;
        v.samples = n;
        v.witness = std::move(w);
        v.worst_margin = margin;
        return v;
    }
    static Verdict skipped(std::string why) {
        Verdict v;
        v.status = VerdictStatus::Skipped;
        v.reason = std::move(why);
        return v;
    }

    bool passed() const { return status == VerdictStatus::PassSampled; }
    bool failed() const { return status == VerdictStatus::Fail; }
};

namespace detail {

/// Deterministic start schedule for the max-difference probes: centers of
/// the two-index faces first (the construction that witnesses quadratic
/// rigidity), then the remaining face centers, then seeded samples spread
/// over faces.
inline std::vector<SimplexPoint> probe_starts(int m, std::uint64_t n_random, std::uint64_t seed) {
    std::vector<SimplexPoint> starts;
    if (m <= 12) {
        auto faces = enumerate_faces(m);
        for (const auto& a : faces)
            if (a.size() == 2) starts.push_back(face_center(a));
        for (const auto& a : faces)
            if (a.size() != 2) starts.push_back(face_center(a));
        for (std::uint64_t i = 0; i < n_random; ++i) {
            const auto& a = faces[static_cast<std::size_t>(i % faces.size())];
            starts.push_back(sample_point(a, false, Rng::derive(seed, i)));
        }
    } else {
        for (std::uint64_t i = 0; i < n_random; ++i)
            starts.push_back(sample_point(FaceIndexSet::full(m), false, Rng::derive(seed, i)));
    }
    return starts;
}

/// Shared body of check_m1/check_m0. direction +1 demands nondecreasing
/// differences (x_k - x_j for k in M(x0)), -1 demands nonincreasing.
inline Verdict check_max_difference(const LVOperator& v, std::uint64_t n_starts, std::size_t horizon,
                                    std::uint64_t seed, const ToleranceProfile& profile, int direction) {
    if (horizon < 1) throw ConfigError("max-difference probe: horizon must be >= 1");
    const int m = v.dim();
    auto starts = probe_starts(m, n_starts, seed);
    double worst = 0.0; // most violating signed change seen
    std::uint64_t examined = 0;

    for (const auto& x0 : starts) {
        ++examined;
        auto mset = max_index_set(x0, profile.tau_tie).indices();
        SimplexPoint cur = x0;
        for (std::size_t t = 0; t < horizon; ++t) {
            SimplexPoint nxt = v.apply(cur);
            for (int k : mset) {
                for (int j = 1; j <= m; ++j) {
                    double before = cur[k - 1] - cur[j - 1];
                    double after = nxt[k - 1] - nxt[j - 1];
                    double change = direction * (after - before);
                    worst = std::min(worst, change);
                    if (change < -kPhiSlack) {
                        Witness w;
                        w.points = {x0, cur};
                        w.quantity_name = direction > 0 ? "phi_decrease" : "phi_increase";
                        w.quantity = after - before;
                        w.step = t;
                        w.k = k;
                        w.j = j;
                        return Verdict::fail(std::move(w), examined, worst);
                    }
                }
            }
            cur = std::move(nxt);
        }
    }
    return Verdict::pass(examined, worst);
}

} // namespace detail

/// Does x_k - x_j (k maximal at the start) ever strictly decrease along the
/// trajectory? The tracked index set is frozen at the start point.
inline Verdict check_m1(const LVOperator& v, std::uint64_t n_starts, std::size_t horizon,
                        std::uint64_t seed, const ToleranceProfile& profile = {}) {
    return detail::check_max_difference(v, n_starts, horizon, seed, profile, +1);
}

/// Mirror probe: does x_k - x_j ever strictly increase?
inline Verdict check_m0(const LVOperator& v, std::uint64_t n_starts, std::size_t horizon,
                        std::uint64_t seed, const ToleranceProfile& profile = {}) {
    return detail::check_max_difference(v, n_starts, horizon, seed, profile, -1);
}

/// Samples <f(x)-f(y), x-y> over pairs across faces, vertex pairs first, and
/// cross-checks against the equivalent form <f(x),y> + <x,f(y)> <= 0.
inline Verdict check_f_monotone(const LVOperator& v, std::uint64_t n_pairs, std::uint64_t seed,
                                const ToleranceProfile& profile = {}) {
    (void)profile;
    if (n_pairs < 1) throw ConfigError("check_f_monotone: n_pairs must be >= 1");
    const int m = v.dim();
    double worst = std::numeric_limits<double>::infinity();
    std::uint64_t examined = 0;

    std::vector<std::pair<SimplexPoint, SimplexPoint>> pairs;
    for (int i = 1; i <= m; ++i)
        for (int j = i + 1; j <= m; ++j)
            pairs.emplace_back(face_center(FaceIndexSet({i}, m)), face_center(FaceIndexSet({j}, m)));
    if (m <= 12) {
        auto faces = enumerate_faces(m);
        for (std::uint64_t p = 0; p < n_pairs; ++p) {
            const auto& fa = faces[static_cast<std::size_t>(p % faces.size())];
            const auto& fb = faces[static_cast<std::size_t>((p / faces.size() + p) % faces.size())];
            pairs.emplace_back(sample_point(fa, false, Rng::derive(seed, 2 * p)),
                               sample_point(fb, false, Rng::derive(seed, 2 * p + 1)));
        }
    } else {
        for (std::uint64_t p = 0; p < n_pairs; ++p)
            pairs.emplace_back(sample_point(FaceIndexSet::full(m), false, Rng::derive(seed, 2 * p)),
                               sample_point(FaceIndexSet::full(m), false, Rng::derive(seed, 2 * p + 1)));
    }

    for (const auto& [x, y] : pairs) {
        ++examined;
        auto fx = v.map().eval(x);
        auto fy = v.map().eval(y);
        double ip = 0.0, cross = 0.0;
        for (int i = 0; i < m; ++i) {
            ip += (fx[static_cast<std::size_t>(i)] - fy[static_cast<std::size_t>(i)]) * (x[i] - y[i]);
            cross += fx[static_cast<std::size_t>(i)] * y[i] + x[i] * fy[static_cast<std::size_t>(i)];
        }
        if (std::abs(ip + cross) > kFormAgreement) {
            Witness w;
            w.points = {x, y};
            w.quantity_name = "form_disagreement";
            w.quantity = ip + cross;
            return Verdict::fail(std::move(w), examined, std::min(worst, ip));
        }
        worst = std::min(worst, ip);
        if (ip < -kMonotoneTol) {
            Witness w;
            w.points = {x, y};
            w.quantity_name = "inner_product";
            w.quantity = ip;
            return Verdict::fail(std::move(w), examined, worst);
        }
    }
    return Verdict::pass(examined, worst);
}

namespace detail {

/// Dense scan of the one-dimensional simplex at fixed resolution, followed
/// by bisection refinement of image collisions.
inline Verdict injective_scan_1d(const LVOperator& v, const ToleranceProfile& profile) {
    constexpr double kRes = 1e-4;
    const int n = 10000;
    std::vector<double> u(static_cast<std::size_t>(n) + 1), xs(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        double x1 = static_cast<double>(i) * kRes;
        xs[static_cast<std::size_t>(i)] = x1;
        u[static_cast<std::size_t>(i)] = v.apply(SimplexPoint::trusted({x1, 1.0 - x1}))[0];
    }
    std::vector<int> order(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (u[static_cast<std::size_t>(a)] != u[static_cast<std::size_t>(b)])
            return u[static_cast<std::size_t>(a)] < u[static_cast<std::size_t>(b)];
        return xs[static_cast<std::size_t>(a)] < xs[static_cast<std::size_t>(b)];
    });

    auto image1 = [&](double x1) { return v.apply(SimplexPoint::trusted({x1, 1.0 - x1}))[0]; };

    struct Collision {
        double xa, xb, gap;
    };
    std::vector<Collision> hits;
    for (std::size_t s = 0; s + 1 < order.size(); ++s) {
        int a = order[s], b = order[s + 1];
        double du = u[static_cast<std::size_t>(b)] - u[static_cast<std::size_t>(a)];
        if (du > 1e-3) continue;
        double xa = xs[static_cast<std::size_t>(a)], xb = xs[static_cast<std::size_t>(b)];
        if (std::abs(xa - xb) < 0.99 * kCollisionSep) continue;

        // refine x near xb on its own branch until the images match
        double target = u[static_cast<std::size_t>(a)];
        double refined = xb;
        double fb = u[static_cast<std::size_t>(b)] - target;
        if (std::abs(fb) > 1e-13) {
            double lo = std::max(0.0, xb - 1.5 * kRes), hi = std::min(1.0, xb + 1.5 * kRes);
            double flo = image1(lo) - target, fhi = image1(hi) - target;
            double l = lo, h = hi, fl = flo;
            if (flo == 0.0) refined = lo;
            else if (fhi == 0.0) refined = hi;
            else if (flo * fhi < 0.0) {
                for (int it = 0; it < 200; ++it) {
                    double mid = 0.5 * (l + h);
                    double fm = image1(mid) - target;
                    if (fm == 0.0) {
                        l = h = mid;
                        break;
                    }
                    if (fl * fm < 0.0) h = mid;
                    else {
                        l = mid;
                        fl = fm;
                    }
                }
                refined = 0.5 * (l + h);
            } else {
                continue; // no bracket: not a genuine collision
            }
        }
        if (std::abs(xa - refined) < kCollisionSep) continue;
        SimplexPoint pa = SimplexPoint::trusted({xa, 1.0 - xa});
        SimplexPoint pb = SimplexPoint::trusted({refined, 1.0 - refined});
        double gap = sup_distance(v.apply(pa), v.apply(pb));
        if (gap <= profile.tau_root) hits.push_back({xa, refined, gap});
    }

    if (!hits.empty()) {
        std::sort(hits.begin(), hits.end(), [](const Collision& a, const Collision& b) {
            if (a.gap != b.gap) return a.gap < b.gap;
            if (a.xa != b.xa) return a.xa < b.xa;
            return a.xb < b.xb;
        });
        const auto& best = hits.front();
        Witness w;
        w.points = {SimplexPoint::trusted({best.xa, 1.0 - best.xa}),
                    SimplexPoint::trusted({best.xb, 1.0 - best.xb})};
        w.quantity_name = "image_gap";
        w.quantity = best.gap;
        return Verdict::fail(std::move(w), static_cast<std::uint64_t>(n) + 1, best.gap);
    }
    return Verdict::pass(static_cast<std::uint64_t>(n) + 1, 0.0);
}

/// Gauss-Newton descent on |V(x) - V(y)|^2 over pairs, rejecting minima
/// where the pair has merged.
inline Verdict injective_search(const LVOperator& v, std::uint64_t n_pairs, std::uint64_t seed,
                                const ToleranceProfile& profile) {
    const int m = v.dim();
    FaceChart chart(FaceIndexSet::full(m));
    const int d = m - 1;
    std::uint64_t examined = 0;

    for (std::uint64_t p = 0; p < n_pairs; ++p) {
        SimplexPoint x = sample_point(FaceIndexSet::full(m), false, Rng::derive(seed, 2 * p));
        SimplexPoint y = sample_point(FaceIndexSet::full(m), false, Rng::derive(seed, 2 * p + 1));
        ++examined;

        std::vector<double> z(static_cast<std::size_t>(2 * d));
        auto zx = chart.to_chart(x.view());
        auto zy = chart.to_chart(y.view());
        std::copy(zx.begin(), zx.end(), z.begin());
        std::copy(zy.begin(), zy.end(), z.begin() + d);

        auto eval_gap = [&](std::span<const double> zz, std::vector<double>& r) {
            std::vector<double> xa, xb, fa(static_cast<std::size_t>(m)), fb(static_cast<std::size_t>(m));
            chart.to_point(zz.subspan(0, static_cast<std::size_t>(d)), xa);
            chart.to_point(zz.subspan(static_cast<std::size_t>(d)), xb);
            v.map().eval(xa, fa);
            v.map().eval(xb, fb);
            r.resize(static_cast<std::size_t>(m));
            for (int k = 0; k < m; ++k)
                r[static_cast<std::size_t>(k)] = xa[static_cast<std::size_t>(k)] * (1.0 + fa[static_cast<std::size_t>(k)]) -
                                                 xb[static_cast<std::size_t>(k)] * (1.0 + fb[static_cast<std::size_t>(k)]);
        };

        std::vector<double> r, rp, jt(static_cast<std::size_t>(m) * 2 * d);
        eval_gap(z, r);
        for (int it = 0; it < 80; ++it) {
            double rn = 0.0;
            for (double e : r) rn = std::max(rn, std::abs(e));
            if (rn <= profile.tau_root * 0.5) break;
            const double h = 1e-7;
            for (int col = 0; col < 2 * d; ++col) {
                auto zp = z;
                zp[static_cast<std::size_t>(col)] += h;
                eval_gap(zp, rp);
                for (int row = 0; row < m; ++row)
                    jt[static_cast<std::size_t>(row) * 2 * d + col] =
                        (rp[static_cast<std::size_t>(row)] - r[static_cast<std::size_t>(row)]) / h;
            }
            // normal equations with light damping
            int nn = 2 * d;
            std::vector<double> a(static_cast<std::size_t>(nn) * nn, 0.0), b(static_cast<std::size_t>(nn), 0.0);
            for (int i = 0; i < nn; ++i) {
                for (int j2 = 0; j2 < nn; ++j2) {
                    double s = 0.0;
                    for (int row = 0; row < m; ++row)
                        s += jt[static_cast<std::size_t>(row) * nn + i] * jt[static_cast<std::size_t>(row) * nn + j2];
                    a[static_cast<std::size_t>(i) * nn + j2] = s + (i == j2 ? 1e-10 : 0.0);
                }
                double s = 0.0;
                for (int row = 0; row < m; ++row)
                    s -= jt[static_cast<std::size_t>(row) * nn + i] * r[static_cast<std::size_t>(row)];
                b[static_cast<std::size_t>(i)] = s;
            }
            if (!solve_linear(a, b, nn)) break;
            double t = 1.0;
            bool ok = false;
            for (int bt = 0; bt < 25; ++bt, t *= 0.5) {
                auto zt = z;
                for (int i = 0; i < nn; ++i) zt[static_cast<std::size_t>(i)] += t * b[static_cast<std::size_t>(i)];
                if (!chart.feasible(std::span<const double>(zt).subspan(0, static_cast<std::size_t>(d))) ||
                    !chart.feasible(std::span<const double>(zt).subspan(static_cast<std::size_t>(d))))
                    continue;
                eval_gap(zt, rp);
                double rtn = 0.0;
                for (double e : rp) rtn = std::max(rtn, std::abs(e));
                if (rtn < rn) {
                    z = zt;
                    r = rp;
                    ok = true;
                    break;
                }
            }
            if (!ok) break;
        }

        SimplexPoint xa = chart.materialize(std::span<const double>(z).subspan(0, static_cast<std::size_t>(d)));
        SimplexPoint xb = chart.materialize(std::span<const double>(z).subspan(static_cast<std::size_t>(d)));
        if (sup_distance(xa, xb) >= kCollisionSep) {
            double gap = sup_distance(v.apply(xa), v.apply(xb));
            if (gap <= profile.tau_root) {
                Witness w;
                w.points = {xa, xb};
                w.quantity_name = "image_gap";
                w.quantity = gap;
                return Verdict::fail(std::move(w), examined, gap);
            }
        }
    }
    return Verdict::pass(examined, 0.0);
}

} // namespace detail

/// Collision search: m=2 runs the exhaustive scan, higher dimensions use
/// random pairs pushed together by Gauss-Newton.
inline Verdict check_injective(const LVOperator& v, std::uint64_t n_pairs, int grid_density,
                               std::uint64_t seed, const ToleranceProfile& profile = {}) {
    (void)grid_density;
    if (v.dim() == 2) return detail::injective_scan_1d(v, profile);
    return detail::injective_search(v, n_pairs, seed, profile);
}

/// Recomputes a witness's violating quantity from its stored points; used to
/// confirm that failures replay.
inline double reevaluate_witness(const LVOperator& v, const Witness& w) {
    if (w.quantity_name == "phi_decrease" || w.quantity_name == "phi_increase") {
        const SimplexPoint& xt = w.points.back();
        SimplexPoint nxt = v.apply(xt);
        return (nxt[w.k - 1] - nxt[w.j - 1]) - (xt[w.k - 1] - xt[w.j - 1]);
    }
    if (w.quantity_name == "inner_product" || w.quantity_name == "form_disagreement") {
        const SimplexPoint& x = w.points[0];
        const SimplexPoint& y = w.points[1];
        auto fx = v.map().eval(x);
        auto fy = v.map().eval(y);
        double ip = 0.0, cross = 0.0;
        for (int i = 0; i < v.dim(); ++i) {
            ip += (fx[static_cast<std::size_t>(i)] - fy[static_cast<std::size_t>(i)]) * (x[i] - y[i]);
            cross += fx[static_cast<std::size_t>(i)] * y[i] + x[i] * fy[static_cast<std::size_t>(i)];
        }
        return w.quantity_name == "inner_product" ? ip : ip + cross;
    }
    if (w.quantity_name == "image_gap")
        return sup_distance(v.apply(w.points[0]), v.apply(w.points[1]));
    throw Error("reevaluate_witness: unknown quantity " + w.quantity_name);
}

struct ClassificationReport {
    std::string operator_id;
    Verdict m1;
    Verdict m0;
    Verdict f_monotone;
    Verdict injective;
    std::uint64_t budget = 0;
    std::uint64_t seed = 0;
};

/// Runs all four probes with budget-derived sample counts. Deterministic
/// under (operator, budget, seed).
inline ClassificationReport classify(const LVOperator& v, std::uint64_t budget, std::uint64_t seed,
                                     const ToleranceProfile& profile = {}) {
    if (budget < 1) throw ConfigError("classify: budget must be positive");
    ClassificationReport rep;
    rep.operator_id = v.describe();
    rep.budget = budget;
    rep.seed = seed;
    rep.m1 = check_m1(v, budget, 50, Rng::derive(seed, 1), profile);
    rep.m0 = check_m0(v, budget, 50, Rng::derive(seed, 2), profile);
    rep.f_monotone = check_f_monotone(v, budget * 10, Rng::derive(seed, 3), profile);
    rep.injective = check_injective(v, budget, 32, Rng::derive(seed, 4), profile);
    return rep;
}

} // namespace lvkit
