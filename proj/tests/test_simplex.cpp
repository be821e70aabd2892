#include <catch2/catch_amalgamated.hpp>

#include "lvkit/simplex.hpp"

using namespace lvkit;

namespace {

// independent reference for the index-set operations: plain two-pass scan
std::vector<int> brute_extreme_indices(const std::vector<double>& c, double tau, bool want_max) {
    double best = c[0];
    for (double v : c) best = want_max ? std::max(best, v) : std::min(best, v);
    std::vector<int> out;
    for (std::size_t i = 0; i < c.size(); ++i) {
        bool in = want_max ? (c[i] >= best - tau) : (c[i] <= best + tau);
        if (in) out.push_back(static_cast<int>(i) + 1);
    }
    return out;
}

} // namespace

TEST_CASE("project_to_simplex leaves clean points alone") {
    auto r = project_to_simplex({0.5, 0.5});
    CHECK(r.point.coords() == std::vector<double>{0.5, 0.5});
    CHECK(r.drift == 0.0);
}

TEST_CASE("project_to_simplex repairs epsilon drift") {
    auto r = project_to_simplex({0.3 + 1e-15, 0.7 - 1e-15});
    double sum = r.point[0] + r.point[1];
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    CHECK(r.point[0] == Catch::Approx(0.3).margin(1e-14));
}

TEST_CASE("project_to_simplex rejects violations beyond tolerance") {
    CHECK_THROWS_AS(project_to_simplex({0.2, -0.1, 0.9}), DriftExceeded);
    CHECK_THROWS_AS(project_to_simplex({0.6, 0.6}), DriftExceeded); // sum 1.2
}

TEST_CASE("project_to_simplex is idempotent") {
    Rng rng(7);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> v(4);
        double s = 0;
        for (auto& e : v) {
            e = rng.uniform();
            s += e;
        }
        for (auto& e : v) e = e / s + (rng.uniform() - 0.5) * 1e-13;
        auto once = project_to_simplex(v);
        auto twice = project_to_simplex(once.point.coords());
        CHECK(once.point.coords() == twice.point.coords());
    }
}

TEST_CASE("max_index_set matches hand cases") {
    CHECK(max_index_set(SimplexPoint({0.3, 0.4, 0.3}), 1e-9).indices() == std::vector<int>{2});
    CHECK(max_index_set(SimplexPoint({1.0 / 3, 1.0 / 3, 1.0 / 3}), 1e-9).indices() ==
          std::vector<int>{1, 2, 3});
    CHECK(max_index_set(SimplexPoint({0.4, 0.4, 0.2}), 1e-9).indices() == std::vector<int>{1, 2});
}

TEST_CASE("min_index_set matches hand cases") {
    CHECK(min_index_set(SimplexPoint({0.3, 0.4, 0.3}), 1e-9).indices() == std::vector<int>{1, 3});
    CHECK(min_index_set(SimplexPoint({1.0 / 3, 1.0 / 3, 1.0 / 3}), 1e-9).indices() ==
          std::vector<int>{1, 2, 3});
    CHECK(min_index_set(SimplexPoint({0.5, 0.3, 0.2}), 1e-9).indices() == std::vector<int>{3});
}

TEST_CASE("index sets agree with a brute-force scan on random points") {
    // 1e5 points across dimensions 2..6
    std::uint64_t stream = 0;
    for (int m = 2; m <= 6; ++m) {
        for (int t = 0; t < 20000; ++t) {
            auto x = sample_point(FaceIndexSet::full(m), false, Rng::derive(99, stream++));
            CHECK(max_index_set(x, 1e-9).indices() == brute_extreme_indices(x.coords(), 1e-9, true));
            CHECK(min_index_set(x, 1e-9).indices() == brute_extreme_indices(x.coords(), 1e-9, false));
        }
    }
}

TEST_CASE("face_center produces the expected points") {
    CHECK(face_center(FaceIndexSet({1, 3}, 4)).coords() == std::vector<double>{0.5, 0, 0.5, 0});
    CHECK(face_center(FaceIndexSet({2}, 3)).coords() == std::vector<double>{0, 1, 0});
    auto b = face_center(FaceIndexSet({1, 2, 3}, 3));
    for (int i = 0; i < 3; ++i) CHECK(b[i] == Catch::Approx(1.0 / 3).margin(1e-15));
}

TEST_CASE("face_center of max_index_set is always a valid point") {
    for (int t = 0; t < 500; ++t) {
        auto x = sample_point(FaceIndexSet::full(5), false, Rng::derive(3, t));
        auto c = face_center(max_index_set(x, 1e-9));
        double sum = 0;
        for (int i = 0; i < c.dim(); ++i) {
            CHECK(c[i] >= 0.0);
            sum += c[i];
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("sample_point honors the face support exactly") {
    FaceIndexSet alpha({1, 2}, 3);
    for (int t = 0; t < 100; ++t) {
        auto x = sample_point(alpha, false, Rng::derive(11, t));
        CHECK(x[2] == 0.0);
        CHECK(x[0] + x[1] == Catch::Approx(1.0).margin(1e-12));
        CHECK(x[0] >= 0.0);
        CHECK(x[1] >= 0.0);
    }
}

TEST_CASE("sample_point basic contract and determinism") {
    auto a = sample_point(FaceIndexSet::full(6), false, 1234);
    auto b = sample_point(FaceIndexSet::full(6), false, 1234);
    CHECK(a.coords() == b.coords());
    double sum = 0;
    for (int i = 0; i < 6; ++i) {
        CHECK(a[i] >= 0.0);
        sum += a[i];
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);

    auto inter = sample_point(FaceIndexSet::full(6), true, 77);
    for (int i = 0; i < 6; ++i) CHECK(inter[i] >= 1e-6);
}

TEST_CASE("sup_distance") {
    SimplexPoint x({0.6, 0.4}), y({0.5, 0.5});
    CHECK(sup_distance(x, x) == 0.0);
    CHECK(sup_distance(SimplexPoint({1.0, 0.0}), SimplexPoint({0.0, 1.0})) == 1.0);
    CHECK(sup_distance(x, y) == Catch::Approx(0.1).margin(1e-15));
    CHECK_THROWS_AS(sup_distance(x, SimplexPoint({0.2, 0.3, 0.5})), DimensionMismatch);
}

TEST_CASE("enumerate_faces counts and ordering") {
    auto faces = enumerate_faces(3);
    REQUIRE(faces.size() == 7);
    CHECK(faces[0].indices() == std::vector<int>{1});
    CHECK(faces[3].indices() == std::vector<int>{1, 2});
    CHECK(faces[6].indices() == std::vector<int>{1, 2, 3});
    CHECK_THROWS_AS(enumerate_faces(13), Error);
}

TEST_CASE("tolerance profile validation") {
    ToleranceProfile p;
    CHECK_NOTHROW(p.validate());
    p.tau_conv = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
}
