#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lvkit/errors.hpp"
#include "lvkit/rng.hpp"
#include "lvkit/simplex.hpp"

namespace lvkit {

namespace detail {

inline double ipow(double x, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= x;
    return r;
}

} // namespace detail

/// Skew-symmetric interaction matrix with entries bounded by 1. Skew-symmetry
/// is exact by construction: the strict lower triangle is derived from the
/// upper one rather than double-entered.
class SkewMatrix {
public:
    /// Builds from the strict upper triangle in row-major order:
    /// a12, a13, ..., a1m, a23, ..., a(m-1)m.
    static SkewMatrix from_upper_triangle(int m, std::span<const double> upper) {
        if (m < 2) throw DimensionMismatch("SkewMatrix: m must be >= 2");
        std::size_t need = static_cast<std::size_t>(m) * (m - 1) / 2;
        if (upper.size() != need)
            throw DimensionMismatch("SkewMatrix: upper triangle needs m(m-1)/2 entries");
        SkewMatrix a;
        a.m_ = m;
        a.e_.assign(static_cast<std::size_t>(m) * m, 0.0);
        std::size_t p = 0;
        for (int k = 0; k < m; ++k) {
            for (int i = k + 1; i < m; ++i) {
                double v = upper[p++];
                if (std::abs(v) > 1.0) throw EntryOutOfRange("SkewMatrix: |a_ki| must be <= 1");
                a.at(k, i) = v;
                a.at(i, k) = -v;
            }
        }
        return a;
    }

    /// Builds from a full dense matrix; entries must be exactly skew-symmetric.
    static SkewMatrix from_dense(int m, std::span<const double> entries) {
        if (m < 2) throw DimensionMismatch("SkewMatrix: m must be >= 2");
        if (entries.size() != static_cast<std::size_t>(m) * m)
            throw DimensionMismatch("SkewMatrix: dense matrix needs m*m entries");
        for (int k = 0; k < m; ++k)
            for (int i = 0; i < m; ++i) {
                double v = entries[static_cast<std::size_t>(k) * m + i];
                if (v != -entries[static_cast<std::size_t>(i) * m + k])
                    throw NotSkewSymmetric("SkewMatrix: a_ki != -a_ik");
                if (std::abs(v) > 1.0) throw EntryOutOfRange("SkewMatrix: |a_ki| must be <= 1");
            }
        SkewMatrix a;
        a.m_ = m;
        a.e_.assign(entries.begin(), entries.end());
        return a;
    }

    static SkewMatrix zero(int m) {
        std::vector<double> upper(static_cast<std::size_t>(m) * (m - 1) / 2, 0.0);
        return from_upper_triangle(m, upper);
    }

    int dim() const { return m_; }
    double operator()(int k, int i) const { return e_[static_cast<std::size_t>(k) * m_ + i]; }
    double max_abs_entry() const {
        double v = 0.0;
        for (double x : e_) v = std::max(v, std::abs(x));
        return v;
    }
    const std::vector<double>& entries() const { return e_; }

private:
    SkewMatrix() = default;
    double& at(int k, int i) { return e_[static_cast<std::size_t>(k) * m_ + i]; }
    int m_ = 0;
    std::vector<double> e_;
};

/// The mapping f = (f_1,...,f_m) that generates an operator via
/// x_k(1 + f_k(x)). Built-ins are closed formula families; custom() is the
/// extension point for user maps, which should pass validate_lv before being
/// iterated (continuity is the caller's obligation; it is not decidable from
/// samples).
class GeneratingMap {
public:
    using EvalFn = std::function<void(std::span<const double>, std::span<double>)>;

    static GeneratingMap identity(int m) {
        return GeneratingMap(m, "identity(m=" + std::to_string(m) + ")",
                             [](std::span<const double>, std::span<double> f) {
                                 for (double& v : f) v = 0.0;
                             });
    }

    /// f_k = sum_i a_ki x_i
    static GeneratingMap quadratic(SkewMatrix a) {
        int m = a.dim();
        auto shared = std::make_shared<SkewMatrix>(std::move(a));
        return GeneratingMap(m, "quadratic(m=" + std::to_string(m) + ")",
                             [shared, m](std::span<const double> x, std::span<double> f) {
                                 for (int k = 0; k < m; ++k) {
                                     double s = 0.0;
                                     for (int i = 0; i < m; ++i) s += (*shared)(k, i) * x[static_cast<std::size_t>(i)];
                                     f[static_cast<std::size_t>(k)] = s;
                                 }
                             });
    }

    /// f_k = eps * (x_k^ell - sum_i x_i^(ell+1)); amplifies leading
    /// coordinates, trajectories run toward the max-face center.
    static GeneratingMap power_attract(int m, double eps, int ell) {
        check_power_params(eps, ell);
        return GeneratingMap(m, power_name("power_attract", m, eps, ell),
                             [m, eps, ell](std::span<const double> x, std::span<double> f) {
                                 double s = 0.0;
                                 for (int i = 0; i < m; ++i) {
                                     double p = detail::ipow(x[static_cast<std::size_t>(i)], ell);
                                     f[static_cast<std::size_t>(i)] = p;
                                     s += p * x[static_cast<std::size_t>(i)];
                                 }
                                 for (int k = 0; k < m; ++k)
                                     f[static_cast<std::size_t>(k)] = eps * (f[static_cast<std::size_t>(k)] - s);
                             });
    }

    /// f_k = eps * (sum_i x_i^(ell+1) - x_k^ell); the mirror family, pushes
    /// toward the uniform point of the occupied face.
    static GeneratingMap power_repel(int m, double eps, int ell) {
        check_power_params(eps, ell);
        return GeneratingMap(m, power_name("power_repel", m, eps, ell),
                             [m, eps, ell](std::span<const double> x, std::span<double> f) {
                                 double s = 0.0;
                                 for (int i = 0; i < m; ++i) {
                                     double p = detail::ipow(x[static_cast<std::size_t>(i)], ell);
                                     f[static_cast<std::size_t>(i)] = p;
                                     s += p * x[static_cast<std::size_t>(i)];
                                 }
                                 for (int k = 0; k < m; ++k)
                                     f[static_cast<std::size_t>(k)] = eps * (s - f[static_cast<std::size_t>(k)]);
                             });
    }

    /// f_k = x_k^2 + 3*sum_{i<k} x_i - 3*sum_{i<j<k} x_i x_j - 1. Cubic map
    /// that cascades mass toward higher indices; injective but not monotone.
    static GeneratingMap cubic_cascade(int m) {
        return GeneratingMap(m, "cubic_cascade(m=" + std::to_string(m) + ")",
                             [m](std::span<const double> x, std::span<double> f) {
                                 double prefix = 0.0;   // sum_{i<k} x_i
                                 double pairsum = 0.0;  // sum_{i<j<k} x_i x_j
                                 for (int k = 0; k < m; ++k) {
                                     double xk = x[static_cast<std::size_t>(k)];
                                     f[static_cast<std::size_t>(k)] = xk * xk + 3.0 * prefix - 3.0 * pairsum - 1.0;
                                     pairsum += prefix * xk;
                                     prefix += xk;
                                 }
                             });
    }

    /// Two-coordinate piecewise map with a repelling 2-cycle; collapses two
    /// bands to the points (9/10,1/10) and (1/10,9/10), so it is surjective
    /// but not injective. Regions are half-open on the right except the last;
    /// adjacent branch formulas agree at the seams.
    static GeneratingMap piecewise_cycle() {
        return GeneratingMap(2, "piecewise_cycle(m=2)",
                             [](std::span<const double> x, std::span<double> f) {
                                 double x1 = x[0], x2 = x[1];
                                 if (x1 < 9.0 / 30.0) {
                                     f[0] = 2.0;
                                     f[1] = -2.0 * x1 / x2;
                                 } else if (x1 < 11.0 / 30.0) {
                                     f[0] = 9.0 / (10.0 * x1) - 1.0;
                                     f[1] = 1.0 / (10.0 * x2) - 1.0;
                                 } else if (x1 < 19.0 / 30.0) {
                                     f[0] = (4.0 * x2 - 2.0) / x1;
                                     f[1] = (4.0 * x1 - 2.0) / x2;
                                 } else if (x1 < 21.0 / 30.0) {
                                     f[0] = 1.0 / (10.0 * x1) - 1.0;
                                     f[1] = 9.0 / (10.0 * x2) - 1.0;
                                 } else {
                                     f[0] = -2.0 * x2 / x1;
                                     f[1] = 2.0;
                                 }
                             });
    }

    /// Two-coordinate piecewise map that collapses the band [1/3, 5/12) to
    /// the plateau point (1/3, 2/3): max-difference monotone yet not
    /// injective.
    static GeneratingMap piecewise_plateau() {
        return GeneratingMap(2, "piecewise_plateau(m=2)",
                             [](std::span<const double> x, std::span<double> f) {
                                 double x1 = x[0], x2 = x[1];
                                 if (x1 < 1.0 / 3.0 || x1 >= 0.5) {
                                     f[0] = 0.0;
                                     f[1] = 0.0;
                                 } else if (x1 < 5.0 / 12.0) {
                                     f[0] = (x2 - 2.0 * x1) / (3.0 * x1);
                                     f[1] = (2.0 * x1 - x2) / (3.0 * x2);
                                 } else {
                                     f[0] = (x1 - x2) / (2.0 * x1);
                                     f[1] = (x2 - x1) / (2.0 * x2);
                                 }
                             });
    }

    /// Arbitrary user map. Run validate_lv before iterating it.
    static GeneratingMap custom(int m, std::string name, EvalFn fn) {
        return GeneratingMap(m, std::move(name), std::move(fn));
    }

    int dim() const { return m_; }
    const std::string& name() const { return name_; }

    void eval(std::span<const double> x, std::span<double> f) const {
        if (static_cast<int>(x.size()) != m_ || static_cast<int>(f.size()) != m_)
            throw DimensionMismatch("GeneratingMap::eval: dimension mismatch");
        fn_(x, f);
    }

    std::vector<double> eval(const SimplexPoint& x) const {
        std::vector<double> f(static_cast<std::size_t>(m_));
        eval(x.view(), f);
        return f;
    }

private:
    GeneratingMap(int m, std::string name, EvalFn fn)
        : m_(m), name_(std::move(name)), fn_(std::move(fn)) {
        if (m_ < 2) throw DimensionMismatch("GeneratingMap: m must be >= 2");
    }

    static void check_power_params(double eps, int ell) {
        if (!(eps > 0.0 && eps <= 1.0)) throw EntryOutOfRange("power family: need 0 < eps <= 1");
        if (ell < 1) throw EntryOutOfRange("power family: need ell >= 1");
    }

    static std::string power_name(const char* base, int m, double eps, int ell) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%s(m=%d,eps=%g,ell=%d)", base, m, eps, ell);
        return buf;
    }

    int m_;
    std::string name_;
    EvalFn fn_;
};

/// The central object: x -> (x_k(1 + f_k(x)))_k followed by a repairing
/// projection. Immutable after construction; apply is pure and thread-safe.
class LVOperator {
public:
    explicit LVOperator(GeneratingMap f, ToleranceProfile tol = {})
        : f_(std::move(f)), tol_(tol) {
        tol_.validate();
    }

    int dim() const { return f_.dim(); }
    const GeneratingMap& map() const { return f_; }
    const ToleranceProfile& tolerances() const { return tol_; }
    const std::string& describe() const { return f_.name(); }

    /// Raw image x_k(1 + f_k(x)), no projection. Exposed so invariance can be
    /// measured before any repair.
    std::vector<double> apply_unprojected(const SimplexPoint& x) const {
        require_dim(x);
        std::vector<double> out(static_cast<std::size_t>(dim()));
        std::vector<double> f(static_cast<std::size_t>(dim()));
        f_.eval(x.view(), f);
        for (int k = 0; k < dim(); ++k)
            out[static_cast<std::size_t>(k)] = x[k] * (1.0 + f[static_cast<std::size_t>(k)]);
        return out;
    }

    SimplexPoint apply(const SimplexPoint& x) const {
        return project_to_simplex(apply_unprojected(x), tol_.tau_simplex).point;
    }

    ProjectionResult apply_with_drift(const SimplexPoint& x) const {
        return project_to_simplex(apply_unprojected(x), tol_.tau_simplex);
    }

    /// Allocation-free step for hot loops: out <- projected image of x,
    /// fbuf is scratch of size m. Returns the projection drift.
    double step(std::span<const double> x, std::span<double> out, std::span<double> fbuf) const {
        f_.eval(x, fbuf);
        int m = dim();
        double drift = 0.0;
        double sum = 0.0;
        for (int k = 0; k < m; ++k) {
            double v = x[static_cast<std::size_t>(k)] * (1.0 + fbuf[static_cast<std::size_t>(k)]);
            if (v < -tol_.tau_simplex) throw DriftExceeded("operator image left the simplex");
            if (v < 0.0) {
                drift += -v;
                v = 0.0;
            }
            out[static_cast<std::size_t>(k)] = v;
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-6) throw DriftExceeded("operator image sum drifted beyond 1e-6");
        if (sum <= 0.0) throw DriftExceeded("operator image sum nonpositive");
        drift += std::abs(sum - 1.0);
        for (int k = 0; k < m; ++k) out[static_cast<std::size_t>(k)] /= sum;
        return drift;
    }

    SimplexPoint apply_n(const SimplexPoint& x, std::size_t n) const {
        std::vector<double> cur(x.coords()), nxt(cur.size()), fbuf(cur.size());
        for (std::size_t i = 0; i < n; ++i) {
            step(cur, nxt, fbuf);
            cur.swap(nxt);
        }
        return SimplexPoint::trusted(std::move(cur));
    }

private:
    void require_dim(const SimplexPoint& x) const {
        if (x.dim() != dim()) throw DimensionMismatch("LVOperator: point dimension mismatch");
    }

    GeneratingMap f_;
    ToleranceProfile tol_;
};

inline LVOperator quadratic_from_matrix(SkewMatrix a, ToleranceProfile tol = {}) {
    return LVOperator(GeneratingMap::quadratic(std::move(a)), tol);
}

/// Composite acting as "g first, then h":
/// f(x)_k = (1 + f_g(x)_k)(1 + f_h(Gx)_k) - 1 with G the projected action of
/// g, so apply(compose(h,g), x) == apply(h, apply(g, x)) pointwise.
inline LVOperator compose(const LVOperator& h, const LVOperator& g) {
    if (h.dim() != g.dim()) throw DimensionMismatch("compose: operand dimensions differ");
    int m = g.dim();
    auto gm = std::make_shared<GeneratingMap>(g.map());
    auto hm = std::make_shared<GeneratingMap>(h.map());
    // the inner action is evaluated unprojected so the composite map stays
    // smooth under finite-difference probing near face boundaries
    auto fn = [gm, hm, m](std::span<const double> x, std::span<double> f) {
        std::vector<double> fg(static_cast<std::size_t>(m)), gx(static_cast<std::size_t>(m)),
            fh(static_cast<std::size_t>(m));
        gm->eval(x, fg);
        for (int k = 0; k < m; ++k)
            gx[static_cast<std::size_t>(k)] =
                x[static_cast<std::size_t>(k)] * (1.0 + fg[static_cast<std::size_t>(k)]);
        hm->eval(gx, fh);
        for (int k = 0; k < m; ++k)
            f[static_cast<std::size_t>(k)] =
                (1.0 + fg[static_cast<std::size_t>(k)]) * (1.0 + fh[static_cast<std::size_t>(k)]) - 1.0;
    };
    std::string name = "compose(" + h.describe() + "," + g.describe() + ")";
    return LVOperator(GeneratingMap::custom(m, std::move(name), std::move(fn)), g.tolerances());
}

/// Convex mixture: generating map (1-lambda) f_g + lambda f_h, equivalently
/// apply(mix) = (1-lambda) apply(g) + lambda apply(h).
inline LVOperator mix(double lambda, const LVOperator& g, const LVOperator& h) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw LambdaOutOfRange("mix: lambda must lie in [0,1]");
    if (h.dim() != g.dim()) throw DimensionMismatch("mix: operand dimensions differ");
    int m = g.dim();
    auto gm = std::make_shared<GeneratingMap>(g.map());
    auto hm = std::make_shared<GeneratingMap>(h.map());
    auto fn = [gm, hm, lambda, m](std::span<const double> x, std::span<double> f) {
        std::vector<double> fh(static_cast<std::size_t>(m));
        gm->eval(x, f);
        hm->eval(x, fh);
        for (int k = 0; k < m; ++k)
            f[static_cast<std::size_t>(k)] = (1.0 - lambda) * f[static_cast<std::size_t>(k)] +
                                             lambda * fh[static_cast<std::size_t>(k)];
    };
    char lam[32];
    std::snprintf(lam, sizeof lam, "%g", lambda);
    std::string name = "mix(" + std::string(lam) + "," + g.describe() + "," + h.describe() + ")";
    return LVOperator(GeneratingMap::custom(m, std::move(name), std::move(fn)), g.tolerances());
}

inline constexpr double kTauCond3 = 1e-10;
inline constexpr double kTauStrict = 1e-12;

/// Sampled check of the three pointwise operator conditions: f_k >= -1
/// everywhere, sum_k x_k f_k = 0, and f_k strictly above -1 on relative
/// face interiors. Failures are data, not errors.
struct ValidationReport {
    struct FailureWitness {
        SimplexPoint point;
        std::string condition; // "cond2" | "cond3" | "cond4"
        double value = 0.0;
        int coord = 0; // 1-based offending k, 0 for cond3
    };

    std::string operator_id;
    std::uint64_t samples_used = 0;
    bool cond2_ok = true;
    bool cond3_ok = true;
    bool cond4_ok = true;
    double worst_cond2_margin = 0.0;  // min over samples of min_k f_k + 1
    double worst_cond3_residual = 0.0; // max |sum x_k f_k|
    double worst_cond4_margin = 0.0;  // min over interior samples, k in alpha, of f_k + 1
    std::vector<FailureWitness> witnesses;

    bool all_ok() const { return cond2_ok && cond3_ok && cond4_ok; }
};

inline ValidationReport validate_lv(const LVOperator& v, std::uint64_t n_samples, std::uint64_t seed) {
    if (n_samples < 1) throw ConfigError("validate_lv: n_samples must be >= 1");
    const int m = v.dim();
    ValidationReport rep;
    rep.operator_id = v.describe();
    rep.worst_cond2_margin = std::numeric_limits<double>::infinity();
    rep.worst_cond4_margin = std::numeric_limits<double>::infinity();
    constexpr std::size_t kMaxWitnesses = 16;

    std::vector<double> f(static_cast<std::size_t>(m));
    std::uint64_t stream = 0;
    auto faces = enumerate_faces(m);
    for (const auto& alpha : faces) {
        for (std::uint64_t s = 0; s < n_samples; ++s) {
            // even draws probe the closed face, odd draws its relative
            // interior; the face center rides along as draw 0
            bool interior = (s % 2 == 1);
            SimplexPoint x = (s == 0) ? face_center(alpha)
                                      : sample_point(alpha, interior, Rng::derive(seed, stream));
            if (s == 0) interior = true;
            ++stream;
            ++rep.samples_used;
            v.map().eval(x.view(), f);

            double min_fk = std::numeric_limits<double>::infinity();
            int min_k = 0;
            double dot = 0.0;
            for (int k = 0; k < m; ++k) {
                double fk = f[static_cast<std::size_t>(k)];
                if (fk < min_fk) {
                    min_fk = fk;
                    min_k = k;
                }
                dot += x[k] * fk;
            }
            rep.worst_cond2_margin = std::min(rep.worst_cond2_margin, min_fk + 1.0);
            if (min_fk < -1.0 - v.tolerances().tau_simplex) {
                rep.cond2_ok = false;
                if (rep.witnesses.size() < kMaxWitnesses)
                    rep.witnesses.push_back({x, "cond2", min_fk, min_k + 1});
            }
            rep.worst_cond3_residual = std::max(rep.worst_cond3_residual, std::abs(dot));
            if (std::abs(dot) > kTauCond3) {
                rep.cond3_ok = false;
                if (rep.witnesses.size() < kMaxWitnesses)
                    rep.witnesses.push_back({x, "cond3", dot, 0});
            }
            if (interior) {
                for (int k : alpha.indices()) {
                    double fk = f[static_cast<std::size_t>(k - 1)];
                    rep.worst_cond4_margin = std::min(rep.worst_cond4_margin, fk + 1.0);
                    if (!(fk > -1.0 + kTauStrict)) {
                        rep.cond4_ok = false;
                        if (rep.witnesses.size() < kMaxWitnesses)
                            rep.witnesses.push_back({x, "cond4", fk, k});
                    }
                }
            }
        }
    }
    return rep;
}

} // namespace lvkit
