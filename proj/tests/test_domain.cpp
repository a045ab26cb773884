#include <doctest.h>

#include "shootout/domain.hpp"

using namespace shootout;

TEST_CASE("valid triples") {
    CHECK(make_prob_triple(1, 0, 0) == ProbTriple{1, 0, 0});
    ProbTriple u = make_prob_triple(1.0 / 3, 1.0 / 3, 1.0 / 3);
    CHECK(u.p0 == doctest::Approx(u.p1));
    CHECK(u.p_event() == doctest::Approx(2.0 / 3));
}

TEST_CASE("invalid triples") {
    CHECK_THROWS_AS(make_prob_triple(0.5, 0.6, 0.2), NotNormalized);
    CHECK_THROWS_AS(make_prob_triple(-0.1, 0.6, 0.5), OutOfRange);
    CHECK_THROWS_AS(make_prob_triple(1.1, -0.05, -0.05), OutOfRange);
}

TEST_CASE("tolerance boundary") {
    CHECK_NOTHROW(make_prob_triple(0.5, 0.3, 0.2 + 0.5e-9));
    CHECK_THROWS_AS(make_prob_triple(0.5, 0.3, 0.2 + 1e-8), NotNormalized);
}

TEST_CASE("normalize_triple closes the sum exactly") {
    ProbTriple t = normalize_triple(1, 2, 3);
    CHECK(t.p0 + t.p1 + t.p2 == 1.0);
    CHECK(t.p1 == doctest::Approx(2.0 / 6));
    CHECK_THROWS(normalize_triple(0, 0, 0));
}

TEST_CASE("default coverage") {
    CHECK(default_coverage("willard").zones == std::set<Zone>{Zone::Overall});
    CHECK(default_coverage("oci").zones == std::set<Zone>{Zone::Z2, Zone::Z3, Zone::Z4});
    CHECK(default_coverage("alps").zones ==
          std::set<Zone>{Zone::Z1, Zone::Z2, Zone::Z3, Zone::Z4});
    CHECK(default_coverage("swap").zones == default_coverage("kasspr").zones);
    CHECK_THROWS_AS(default_coverage("nonesuch"), UnknownForecaster);
}

TEST_CASE("zone names round-trip") {
    for (Zone z : all_zones()) CHECK(parse_zone(zone_name(z)) == z);
    CHECK_THROWS(parse_zone("Z9"));
}

TEST_CASE("csv quoting round-trip") {
    std::vector<std::string> fields{"a", "b,c", "d\"e", ""};
    auto back = split_csv_line(join_csv(fields));
    CHECK(back == fields);
}
