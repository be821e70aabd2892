#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "lvkit/operators.hpp"

using namespace lvkit;

namespace {

std::vector<LVOperator> builtin_catalog_m(int m) {
    std::vector<LVOperator> ops;
    ops.emplace_back(GeneratingMap::identity(m));
    ops.emplace_back(GeneratingMap::power_attract(m, 1.0, 1));
    ops.emplace_back(GeneratingMap::power_attract(m, 0.5, 2));
    ops.emplace_back(GeneratingMap::power_repel(m, 1.0, 1));
    ops.emplace_back(GeneratingMap::power_repel(m, 0.25, 3));
    ops.emplace_back(GeneratingMap::cubic_cascade(m));
    std::vector<double> upper(static_cast<std::size_t>(m) * (m - 1) / 2);
    Rng rng(5);
    for (auto& e : upper) e = rng.uniform(-1.0, 1.0);
    ops.push_back(quadratic_from_matrix(SkewMatrix::from_upper_triangle(m, upper)));
    if (m == 2) {
        ops.emplace_back(GeneratingMap::piecewise_cycle());
        ops.emplace_back(GeneratingMap::piecewise_plateau());
    }
    return ops;
}

} // namespace

TEST_CASE("power_attract generating map, hand evaluation") {
    // f_k = eps (x_k^l - sum x_i^(l+1)), written out directly
    double x1 = 0.6, x2 = 0.4;
    double s = x1 * x1 + x2 * x2;
    double f1_expect = x1 - s, f2_expect = x2 - s;

    auto f = GeneratingMap::power_attract(2, 1.0, 1).eval(SimplexPoint({0.6, 0.4}));
    CHECK(f[0] == Catch::Approx(f1_expect).margin(1e-15));
    CHECK(f[1] == Catch::Approx(f2_expect).margin(1e-15));
    CHECK(f[0] == Catch::Approx(0.08).margin(1e-15));
    CHECK(f[1] == Catch::Approx(-0.12).margin(1e-15));
}

TEST_CASE("quadratic generating map, hand evaluation") {
    double upper[] = {1.0};
    auto f = GeneratingMap::quadratic(SkewMatrix::from_upper_triangle(2, upper))
                 .eval(SimplexPoint({0.5, 0.5}));
    CHECK(f[0] == Catch::Approx(0.5).margin(1e-15));
    CHECK(f[1] == Catch::Approx(-0.5).margin(1e-15));
}

TEST_CASE("power family vanishes at the barycenter") {
    for (int m : {2, 3, 5}) {
        auto f = GeneratingMap::power_attract(m, 1.0, 2).eval(face_center(FaceIndexSet::full(m)));
        for (double v : f) CHECK(std::abs(v) <= 1e-16);
    }
}

TEST_CASE("generating map rejects dimension mismatch") {
    auto g = GeneratingMap::power_attract(3, 1.0, 1);
    CHECK_THROWS_AS(g.eval(SimplexPoint({0.5, 0.5})), DimensionMismatch);
}

TEST_CASE("apply: hand-evaluated power_attract step") {
    LVOperator v(GeneratingMap::power_attract(2, 1.0, 1));
    auto y = v.apply(SimplexPoint({0.6, 0.4}));
    CHECK(y[0] == Catch::Approx(0.648).margin(1e-15));
    CHECK(y[1] == Catch::Approx(0.352).margin(1e-15));
}

TEST_CASE("apply: vertices are fixed for every built-in") {
    for (int m : {2, 3, 4}) {
        for (const auto& v : builtin_catalog_m(m)) {
            for (int k = 1; k <= m; ++k) {
                auto e = face_center(FaceIndexSet({k}, m));
                CHECK(sup_distance(v.apply(e), e) == 0.0);
            }
        }
    }
}

TEST_CASE("apply: piecewise_cycle swaps the known 2-periodic point") {
    LVOperator v(GeneratingMap::piecewise_cycle());
    auto y = v.apply(SimplexPoint({0.25, 0.75}));
    CHECK(y[0] == Catch::Approx(0.75).margin(1e-14));
    CHECK(y[1] == Catch::Approx(0.25).margin(1e-14));
    auto z = v.apply(y);
    CHECK(z[0] == Catch::Approx(0.25).margin(1e-14));
    CHECK(z[1] == Catch::Approx(0.75).margin(1e-14));
}

TEST_CASE("quadratic_from_matrix: zero matrix is the identity") {
    auto v = quadratic_from_matrix(SkewMatrix::zero(3));
    for (int t = 0; t < 100; ++t) {
        auto x = sample_point(FaceIndexSet::full(3), false, Rng::derive(21, t));
        CHECK(sup_distance(v.apply(x), x) <= 1e-15);
    }
}

TEST_CASE("quadratic_from_matrix: hand evaluation and entry guard") {
    double upper[] = {1.0};
    auto v = quadratic_from_matrix(SkewMatrix::from_upper_triangle(2, upper));
    auto y = v.apply(SimplexPoint({0.5, 0.5}));
    CHECK(y[0] == Catch::Approx(0.75).margin(1e-15));
    CHECK(y[1] == Catch::Approx(0.25).margin(1e-15));

    double bad[] = {2.0};
    CHECK_THROWS_AS(SkewMatrix::from_upper_triangle(2, bad), EntryOutOfRange);
}

TEST_CASE("SkewMatrix dense constructor demands exact skew-symmetry") {
    double notskew[] = {0.0, 0.5, -0.4999999, 0.0};
    CHECK_THROWS_AS(SkewMatrix::from_dense(2, notskew), NotSkewSymmetric);
    double skew[] = {0.0, 0.5, -0.5, 0.0};
    CHECK_NOTHROW(SkewMatrix::from_dense(2, skew));
}

TEST_CASE("compose: identity is neutral") {
    LVOperator id(GeneratingMap::identity(2));
    LVOperator v(GeneratingMap::power_attract(2, 1.0, 1));
    auto c = compose(id, v);
    for (int t = 0; t < 1000; ++t) {
        auto x = sample_point(FaceIndexSet::full(2), false, Rng::derive(31, t));
        CHECK(sup_distance(c.apply(x), v.apply(x)) <= 1e-14);
    }
}

TEST_CASE("compose: matches an independent two-step evaluation") {
    // second application from (0.648, 0.352), written out directly
    double a = 0.648, b = 0.352;
    double s = a * a + b * b;
    double first = a * (1.0 + (a - s));
    double second = b * (1.0 + (b - s));

    LVOperator v(GeneratingMap::power_attract(2, 1.0, 1));
    auto c = compose(v, v);
    auto y = c.apply(SimplexPoint({0.6, 0.4}));
    CHECK(y[0] == Catch::Approx(first).margin(1e-12));
    CHECK(y[1] == Catch::Approx(second).margin(1e-12));
    CHECK(y[0] == Catch::Approx(0.715516416).margin(1e-12));
    CHECK(y[1] == Catch::Approx(0.284483584).margin(1e-12));

    auto two = v.apply(v.apply(SimplexPoint({0.6, 0.4})));
    CHECK(sup_distance(y, two) <= 1e-14);
}

TEST_CASE("mix: endpoints and degenerate blend") {
    LVOperator g(GeneratingMap::power_attract(2, 1.0, 1));
    LVOperator h(GeneratingMap::power_repel(2, 1.0, 1));
    auto m0 = mix(0.0, g, h);
    auto m1 = mix(1.0, g, h);
    auto half = mix(0.5, g, g);
    for (int t = 0; t < 200; ++t) {
        auto x = sample_point(FaceIndexSet::full(2), false, Rng::derive(41, t));
        CHECK(sup_distance(m0.apply(x), g.apply(x)) <= 1e-15);
        CHECK(sup_distance(m1.apply(x), h.apply(x)) <= 1e-15);
        CHECK(sup_distance(half.apply(x), g.apply(x)) <= 1e-15);
    }
    CHECK_THROWS_AS(mix(1.5, g, h), LambdaOutOfRange);
    CHECK_THROWS_AS(mix(-0.1, g, h), LambdaOutOfRange);
}

TEST_CASE("mix acts as the pointwise convex combination") {
    LVOperator g(GeneratingMap::power_attract(3, 1.0, 1));
    LVOperator h(GeneratingMap::power_repel(3, 0.5, 2));
    auto m = mix(0.3, g, h);
    for (int t = 0; t < 200; ++t) {
        auto x = sample_point(FaceIndexSet::full(3), false, Rng::derive(43, t));
        auto gx = g.apply(x);
        auto hx = h.apply(x);
        auto mx = m.apply(x);
        for (int i = 0; i < 3; ++i)
            CHECK(mx[i] == Catch::Approx(0.7 * gx[i] + 0.3 * hx[i]).margin(1e-14));
    }
}

TEST_CASE("simplex invariance of the raw image across the catalog") {
    for (int m : {2, 3, 4}) {
        for (const auto& v : builtin_catalog_m(m)) {
            std::uint64_t checks = (m == 3) ? 10000 : 2000;
            for (std::uint64_t t = 0; t < checks; ++t) {
                auto x = sample_point(FaceIndexSet::full(m), false, Rng::derive(51 + m, t));
                auto raw = v.apply_unprojected(x);
                double sum = 0.0, mn = 1.0;
                for (double c : raw) {
                    sum += c;
                    mn = std::min(mn, c);
                }
                REQUIRE(std::abs(sum - 1.0) <= 1e-12);
                REQUIRE(mn >= -1e-12);
            }
        }
    }
}

TEST_CASE("face invariance: support is preserved exactly") {
    for (int m : {3, 4}) {
        auto faces = enumerate_faces(m);
        for (const auto& v : builtin_catalog_m(m)) {
            for (const auto& alpha : faces) {
                auto x = sample_point(alpha, true, 67);
                auto y = v.apply(x);
                for (int k = 1; k <= m; ++k) {
                    if (!alpha.contains(k)) {
                        REQUIRE(y[k - 1] == 0.0);
                    } else {
                        REQUIRE(y[k - 1] > 0.0); // strict, condition 4 holds for built-ins
                    }
                }
            }
        }
    }
}

TEST_CASE("piecewise_cycle: adjacent branch formulas agree at the seams") {
    // both branch formulas written out directly from the region table
    auto t1_f1 = [](double, double) { return 2.0; };
    auto t2_f1 = [](double x1, double) { return 9.0 / (10.0 * x1) - 1.0; };
    auto t3_f1 = [](double x1, double x2) { return (4.0 * x2 - 2.0) / x1; };
    auto t4_f1 = [](double x1, double) { return 1.0 / (10.0 * x1) - 1.0; };
    auto t5_f1 = [](double x1, double x2) { return -2.0 * x2 / x1; };
    auto t1_f2 = [](double x1, double x2) { return -2.0 * x1 / x2; };
    auto t2_f2 = [](double, double x2) { return 1.0 / (10.0 * x2) - 1.0; };
    auto t3_f2 = [](double x1, double x2) { return (4.0 * x1 - 2.0) / x2; };
    auto t4_f2 = [](double, double x2) { return 9.0 / (10.0 * x2) - 1.0; };
    auto t5_f2 = [](double, double) { return 2.0; };

    struct Seam {
        double x1;
        double (*left1)(double, double);
        double (*right1)(double, double);
        double (*left2)(double, double);
        double (*right2)(double, double);
    };
    // function-pointer conversion keeps the table readable
    Seam seams[] = {
        {9.0 / 30.0, t1_f1, t2_f1, t1_f2, t2_f2},
        {11.0 / 30.0, t2_f1, t3_f1, t2_f2, t3_f2},
        {19.0 / 30.0, t3_f1, t4_f1, t3_f2, t4_f2},
        {21.0 / 30.0, t4_f1, t5_f1, t4_f2, t5_f2},
    };
    auto g = GeneratingMap::piecewise_cycle();
    for (const auto& s : seams) {
        double x2 = 1.0 - s.x1;
        CHECK(std::abs(s.left1(s.x1, x2) - s.right1(s.x1, x2)) <= 1e-14);
        CHECK(std::abs(s.left2(s.x1, x2) - s.right2(s.x1, x2)) <= 1e-14);
        auto f = g.eval(SimplexPoint({s.x1, x2}));
        CHECK(std::abs(f[0] - s.right1(s.x1, x2)) <= 1e-14);
        CHECK(std::abs(f[1] - s.right2(s.x1, x2)) <= 1e-14);
    }
}

TEST_CASE("piecewise_plateau: adjacent branch formulas agree at the seams") {
    auto band_f1 = [](double x1, double x2) { return (x2 - 2.0 * x1) / (3.0 * x1); };
    auto ramp_f1 = [](double x1, double x2) { return (x1 - x2) / (2.0 * x1); };
    double seam_a = 1.0 / 3.0, seam_b = 5.0 / 12.0, seam_c = 0.5;
    CHECK(std::abs(band_f1(seam_a, 1.0 - seam_a) - 0.0) <= 1e-14);
    CHECK(std::abs(band_f1(seam_b, 1.0 - seam_b) - ramp_f1(seam_b, 1.0 - seam_b)) <= 1e-14);
    CHECK(std::abs(ramp_f1(seam_c, 1.0 - seam_c) - 0.0) <= 1e-14);
}

TEST_CASE("power_attract pairwise difference identity") {
    // (Vx)_k - (Vx)_j == (x_k - x_j)(1 + eps sum_r x_k^(l-r) x_j^r - eps sum_i x_i^(l+1))
    for (double eps : {0.25, 1.0}) {
        for (int ell : {1, 2, 3}) {
            LVOperator v(GeneratingMap::power_attract(4, eps, ell));
            for (int t = 0; t < 300; ++t) {
                auto x = sample_point(FaceIndexSet::full(4), false, Rng::derive(71, t));
                auto raw = v.apply_unprojected(x);
                double s = 0.0;
                for (int i = 0; i < 4; ++i) s += detail::ipow(x[i], ell + 1);
                for (int k = 0; k < 4; ++k) {
                    for (int j = 0; j < 4; ++j) {
                        double cross = 0.0;
                        for (int r = 0; r <= ell; ++r)
                            cross += detail::ipow(x[k], ell - r) * detail::ipow(x[j], r);
                        double rhs = (x[k] - x[j]) * (1.0 + eps * cross - eps * s);
                        REQUIRE(std::abs((raw[static_cast<std::size_t>(k)] -
                                          raw[static_cast<std::size_t>(j)]) -
                                         rhs) <= 1e-12);
                    }
                }
            }
        }
    }
}

TEST_CASE("validate_lv: power and cubic families pass") {
    auto rep = validate_lv(LVOperator(GeneratingMap::power_attract(3, 1.0, 2)), 1000, 13);
    CHECK(rep.all_ok());
    CHECK(rep.worst_cond3_residual <= 1e-10);
    CHECK(rep.witnesses.empty());

    auto repc = validate_lv(LVOperator(GeneratingMap::cubic_cascade(3)), 1000, 13);
    CHECK(repc.all_ok());
    CHECK(repc.worst_cond3_residual <= 1e-10);
}

TEST_CASE("validate_lv: forced violation carries a witness") {
    auto broken = GeneratingMap::custom(2, "broken", [](std::span<const double>, std::span<double> f) {
        f[0] = -2.0;
        f[1] = 2.0;
    });
    auto rep = validate_lv(LVOperator(std::move(broken)), 100, 5);
    CHECK_FALSE(rep.cond2_ok);
    REQUIRE_FALSE(rep.witnesses.empty());
    bool has_cond2 = false;
    for (const auto& w : rep.witnesses)
        if (w.condition == "cond2" && w.value <= -2.0 + 1e-12) has_cond2 = true;
    CHECK(has_cond2);
}

TEST_CASE("validate_lv: compose and mix of valid operators stay valid") {
    LVOperator g(GeneratingMap::power_attract(3, 1.0, 1));
    LVOperator h(GeneratingMap::power_attract(3, 0.5, 2));
    CHECK(validate_lv(compose(h, g), 200, 17).all_ok());
    CHECK(validate_lv(mix(0.3, g, h), 200, 17).all_ok());
}
