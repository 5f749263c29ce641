#include "exitmoments/errors.hpp"
#include "exitmoments/io.hpp"

#include "doctest.h"

#include <cmath>
#include <limits>
#include <sstream>

using namespace exitmoments;
using io::json;

TEST_CASE("moment sequences round trip through JSON") {
    const MomentSequence m{0.1 + 0.2, {1.0 / 3, 2.0 / 7, 1e-300, 123456789.123456789}};
    const auto text = io::to_json(m).dump();
    const auto back = io::moments_from_json(json::parse(text));
    CHECK(back.volume == m.volume);
    CHECK(back.moments == m.moments);

    auto tagged = io::to_json(m);
    tagged["timestamp"] = "2026-01-01T00:00:00Z";
    CHECK_NOTHROW(io::moments_from_json(tagged));
    tagged["extra"] = 1;
    CHECK_THROWS_AS(io::moments_from_json(tagged), InvalidInput);
    CHECK_THROWS_AS(io::moments_from_json(json::parse(R"({"volume": 1})")), InvalidInput);
    CHECK_THROWS_AS(io::moments_from_json(json::parse(R"({"volume": 1, "moments": [1, "x"]})")), InvalidInput);
    CHECK_THROWS_AS(io::moments_from_json(json::parse(R"({"volume": 1, "moments": [-1]})")), InvalidInput);
}

TEST_CASE("spectral data round trip through JSON") {
    const SpectralData s{1.0, {{9.869604401089358, 0.8105694691387022}, {88.82643960980423, 0.09006327434874469}}};
    const auto back = io::spectral_from_json(json::parse(io::to_json(s).dump()));
    REQUIRE(back.pairs.size() == 2);
    CHECK(back.pairs[1].nu == s.pairs[1].nu);
    CHECK(back.pairs[1].a_sq == s.pairs[1].a_sq);
    CHECK_THROWS_AS(io::spectral_from_json(json::parse(R"({"volume": 1, "pairs": [{"nu": 1}]})")), InvalidInput);
    CHECK_THROWS_AS(io::spectral_from_json(json::parse(R"({"volume": 1, "pairs": [{"nu": 2, "a_sq": 0.5}, {"nu": 1, "a_sq": 0.1}]})")),
                    InvalidInput);
}

TEST_CASE("non-finite numbers become null") {
    EigenBoundReport r;
    r.n = 3;
    r.k = 9;
    r.vacuous = true;
    r.bound = std::numeric_limits<double>::infinity();
    const auto j = io::to_json(r);
    CHECK(j["bound"].is_null());
    CHECK(j["vacuous"] == true);
    CHECK(io::number(std::nan("")).is_null());
    CHECK(io::number(2.5) == 2.5);
}

TEST_CASE("radial CSV") {
    const auto field = RadialField::constant(ModelSpace::euclidean(2), 1.0, 5, 2.0);
    std::ostringstream out;
    io::write_radial_csv(out, field);
    CHECK(out.str().rfind("r,value\n0,2\n0.25,2\n", 0) == 0);
}
