#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <random>

#include "shootout/analog.hpp"

using namespace shootout;

namespace {

AnalogLibrary toy_library() {
    AnalogLibrary lib;
    lib.feature_names = {"x", "y"};
    auto add = [&](double x, double y, Category c) {
        lib.rows.push_back({{x, y}, c, "1989-01-01"});
    };
    add(0, 0, Category::Nonsignificant);
    add(1, 0, Category::Nonsignificant);
    add(0, 1, Category::Nonsignificant);
    add(5, 5, Category::Significant);
    add(6, 5, Category::Significant);
    add(5, 6, Category::Significant);
    add(10, 0, Category::Severe);
    add(11, 0, Category::Severe);
    add(10, 1, Category::Severe);
    return lib;
}

}  // namespace

TEST_CASE("two single-point classes") {
    AnalogLibrary lib;
    lib.feature_names = {"x"};
    lib.rows.push_back({{1.0}, Category::Nonsignificant, "d"});
    lib.rows.push_back({{3.0}, Category::Severe, "d"});
    DiscriminantModel m = fit_discriminant(lib, 1e-6);
    CHECK(m.means[0](0) == 1.0);
    CHECK(m.means[2](0) == 3.0);
    CHECK(m.priors[0] == 0.5);
    CHECK(m.priors[2] == 0.5);
    CHECK(m.priors[1] == 0.0);
}

TEST_CASE("single class rejected") {
    AnalogLibrary lib;
    lib.feature_names = {"x"};
    lib.rows.push_back({{1.0}, Category::Severe, "d"});
    CHECK_THROWS_AS(fit_discriminant(lib, 1e-6), TooFewClasses);
}

TEST_CASE("duplicating every row leaves the model identical") {
    AnalogLibrary lib = toy_library();
    AnalogLibrary doubled = lib;
    for (auto& r : lib.rows) doubled.rows.push_back(r);
    DiscriminantModel a = fit_discriminant(lib, 1e-6);
    DiscriminantModel b = fit_discriminant(doubled, 1e-6);
    for (int c = 0; c < 3; ++c) {
        CHECK(a.means[c].isApprox(b.means[c], 1e-14));
        CHECK(a.priors[c] == doctest::Approx(b.priors[c]).epsilon(1e-14));
    }
    CHECK(a.covariance.isApprox(b.covariance, 1e-14));
}

TEST_CASE("sums-of-squares oracle on the 9-point toy set") {
    AnalogLibrary lib = toy_library();
    DiscriminantModel m = fit_discriminant(lib, 0.0);
    // hand means
    CHECK(m.means[0](0) == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(m.means[1](0) == doctest::Approx(16.0 / 3).epsilon(1e-12));
    CHECK(m.means[2](1) == doctest::Approx(1.0 / 3).epsilon(1e-12));
    // pooled MLE covariance: every class contributes the same centered points
    // (-1/3,-1/3),(2/3,-1/3),(-1/3,2/3); per-coordinate SS = 3 * (2/3) = 2
    double expect_var = (3 * 2.0 / 3.0) / 9.0;
    CHECK(m.covariance(0, 0) == doctest::Approx(expect_var).epsilon(1e-12));
    CHECK(m.covariance(1, 1) == doctest::Approx(expect_var).epsilon(1e-12));
    double expect_cov = 3 * (1.0 / 9 - 2.0 / 9 - 2.0 / 9) / 9.0;
    CHECK(m.covariance(0, 1) == doctest::Approx(expect_cov).epsilon(1e-12));
}

TEST_CASE("posterior matches the discriminant formula") {
    AnalogLibrary lib = toy_library();
    DiscriminantModel m = fit_discriminant(lib, 1e-6);
    std::vector<double> q{5.2, 4.9};
    ProbTriple p = predict(m, q);
    // brute force
    Eigen::Vector2d x(q[0], q[1]);
    double scores[3], mx = -1e300;
    for (int c = 0; c < 3; ++c) {
        Eigen::VectorXd mu = m.means[c];
        scores[c] = (mu.transpose() * m.precision * x)(0) -
                    0.5 * (mu.transpose() * m.precision * mu)(0) + std::log(m.priors[c]);
        mx = std::max(mx, scores[c]);
    }
    double z = 0;
    for (double s : scores) z += std::exp(s - mx);
    CHECK(p.p0 == doctest::Approx(std::exp(scores[0] - mx) / z).epsilon(1e-12));
    CHECK(p.p1 == doctest::Approx(std::exp(scores[1] - mx) / z).epsilon(1e-12));
    CHECK(p.p2 == doctest::Approx(std::exp(scores[2] - mx) / z).epsilon(1e-12));
    CHECK(p.p1 > p.p0);
    CHECK(p.p1 > p.p2);
}

TEST_CASE("class centered query with symmetric neighbors") {
    AnalogLibrary lib;
    lib.feature_names = {"x"};
    for (double d : {-0.1, 0.0, 0.1}) {
        lib.rows.push_back({{0 + d}, Category::Nonsignificant, "d"});
        lib.rows.push_back({{10 + d}, Category::Severe, "d"});
    }
    DiscriminantModel m = fit_discriminant(lib, 1e-9);
    ProbTriple at0 = predict(m, {0.0});
    CHECK(at0.p0 > 0.99);
    CHECK(at0.p1 == 0.0);  // absent class
    ProbTriple mid = predict(m, {5.0});
    CHECK(mid.p0 == doctest::Approx(mid.p2).epsilon(1e-9));
}

TEST_CASE("dimension mismatch") {
    DiscriminantModel m = fit_discriminant(toy_library(), 1e-6);
    CHECK_THROWS_AS(predict(m, {1.0}), DimensionMismatch);
}

TEST_CASE("absorb then refit equals fit from scratch") {
    AnalogLibrary lib = toy_library();
    AnalogLibrary grown = absorb_verification(lib, {2.0, 2.0}, Category::Significant, "1989-06-30");
    CHECK(grown.rows.size() == lib.rows.size() + 1);
    AnalogLibrary manual = lib;
    manual.rows.push_back({{2.0, 2.0}, Category::Significant, "1989-06-30"});
    DiscriminantModel a = fit_discriminant(grown, 1e-6);
    DiscriminantModel b = fit_discriminant(manual, 1e-6);
    CHECK(a.covariance == b.covariance);
    CHECK(a.priors[1] > fit_discriminant(lib, 1e-6).priors[1]);
}

TEST_CASE("frozen library rejects verification") {
    AnalogLibrary lib = toy_library();
    lib.frozen = true;
    CHECK_THROWS_AS(absorb_verification(lib, {1.0, 1.0}, Category::Severe, "d"), FrozenLibrary);
}

TEST_CASE("degenerate covariance without ridge") {
    AnalogLibrary lib;
    lib.feature_names = {"x", "y"};
    lib.rows.push_back({{1, 1}, Category::Nonsignificant, "d"});
    lib.rows.push_back({{2, 2}, Category::Severe, "d"});
    CHECK_THROWS_AS(fit_discriminant(lib, 0.0), DegenerateCovariance);
    CHECK_NOTHROW(fit_discriminant(lib, default_ridge(lib)));
}

TEST_CASE("library csv round-trip") {
    auto path = (std::filesystem::temp_directory_path() / "lib_rt.csv").string();
    AnalogLibrary lib = toy_library();
    write_library(path, lib);
    AnalogLibrary back = read_library(path);
    CHECK(back.feature_names == lib.feature_names);
    REQUIRE(back.rows.size() == lib.rows.size());
    CHECK(back.rows[3].category == Category::Significant);
    CHECK(back.rows[3].features == lib.rows[3].features);
    std::remove(path.c_str());
}
