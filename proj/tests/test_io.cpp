#include <doctest.h>

#include "fixtures.hpp"
#include "ietflow/errors.hpp"
#include "ietflow/io.hpp"

using namespace ietflow;

namespace {

json parse(const char* text) { return json::parse(text); }

}  // namespace

TEST_SUITE("io") {

TEST_CASE("scalars from JSON") {
    CHECK(scalar_from_json(parse(R"j("3/2-1/2*sqrt(5)")j")) == Scalar::parse("3/2-1/2*sqrt(5)"));
    CHECK(scalar_from_json(parse("7")) == Scalar(7));
    CHECK_THROWS_AS(scalar_from_json(parse("0.5")), InvalidInput);
    CHECK_THROWS_AS(scalar_from_json(parse(R"j("1/0")j")), InvalidInput);
    CHECK_THROWS_AS(rational_from_json(parse(R"j("sqrt(2)")j")), InvalidInput);
}

TEST_CASE("iet and roof round trip") {
    const Iet g = fixtures::golden();
    const Iet back = iet_from_json(to_json(g));
    CHECK(back.pi() == g.pi());
    CHECK(back.lambda() == g.lambda());
    CHECK(to_json(g)["permutation"] == parse("[2,1]"));

    const auto f = fixtures::two_slope_roof();
    const PiecewiseRoof h = roof_from_json(to_json(f));
    REQUIRE(h.piece_count() == f.piece_count());
    for (std::size_t i = 0; i < f.piece_count(); ++i) {
        CHECK(h.pieces()[i].start == f.pieces()[i].start);
        CHECK(h.pieces()[i].left_value == f.pieces()[i].left_value);
        CHECK(h.pieces()[i].slope == f.pieces()[i].slope);
    }
    CHECK(roof_from_json(parse(R"j([{"start":"0","value":"1"}])j")).evaluate(Scalar(1, 2)) == Scalar(1));
}

TEST_CASE("matrix entries beyond 64 bits are strings") {
    IntMatrix m(2);
    m(0, 0) = 1;
    m(1, 1) = mpz_class("123456789012345678901234567890");
    const json j = to_json(m);
    CHECK(j[1][1].is_string());
    CHECK(j[0][0].is_number_integer());
    CHECK(matrix_from_json(j) == m);
    CHECK_THROWS_AS(matrix_from_json(parse("[[1,2],[3]]")), InvalidInput);
}

TEST_CASE("trace round trip") {
    const Iet g = fixtures::golden();
    for (int n : {0, 1, 5, 30}) {
        const TraceRecord r = record(induct(g.pi(), g.lambda(), n));
        const json j = json::parse(to_json(r).dump());
        CHECK(trace_from_json(j) == r);
        CHECK(j["n"] == n);
    }
    const TraceRecord r2 = record(induct(g.pi(), g.lambda(), 2));
    CHECK(to_json(r2)["matrix"] == parse("[[1,1],[1,2]]"));
}

TEST_CASE("tower round trip") {
    const auto fam = build_W_linear(fixtures::shifted_rotation(), mpq_class(2, 5), 200,
                                    fixtures::shifted_rotation_options(2));
    REQUIRE(fam.towers.size() == 2);
    for (const auto& t : fam.towers) {
        const json j = json::parse(to_json(t).dump());
        const RigidityTower back = tower_from_json(j);
        CHECK(back.q == t.q);
        CHECK(back.J == t.J);
        CHECK(back.shifts == t.shifts);
        CHECK(back.heights == t.heights);
        CHECK(back.rho == t.rho);
        CHECK(back.certified() == t.certified());
        CHECK(to_json(back) == to_json(t));
    }
    json bad = to_json(fam.towers[0]);
    bad["shifts"].erase(bad["shifts"].size() - 1);
    CHECK_THROWS_AS(tower_from_json(bad), InvalidInput);
    bad = to_json(fam.towers[0]);
    bad["kind"] = "other";
    CHECK_THROWS_AS(tower_from_json(bad), InvalidInput);
}

TEST_CASE("config validation") {
    const RunConfig c = config_from_json(parse(R"j({"iet":{"permutation":[2,1],"lengths":["1/3","2/3"]}})j"));
    CHECK(c.params.epsilon == mpq_class(2, 5));
    CHECK(c.params.budget == 200);
    CHECK(c.output.format == "json");
    CHECK_FALSE(c.roof.has_value());

    CHECK_THROWS_AS(config_from_json(parse("[]")), InvalidInput);
    CHECK_THROWS_AS(config_from_json(parse(R"j({"params":{"epsilon":"3/2"}})j")), InvalidInput);
    CHECK_THROWS_AS(config_from_json(parse(R"j({"params":{"budget":-1}})j")), InvalidInput);
    CHECK_THROWS_AS(config_from_json(parse(R"j({"params":{"samples":"many"}})j")), InvalidInput);
    CHECK_THROWS_AS(config_from_json(parse(R"j({"output":{"format":"xml"}})j")), InvalidInput);
    CHECK_THROWS_AS(config_from_json(parse(R"j({"iet":{"permutation":[1,2],"lengths":["1/2","1/2"]}})j")),
                    InvalidInput);

    const char* steps = R"j({"roof":[{"start":"0","value":"1"},{"start":"1/3","value":"2"},
                           {"start":"2/3","value":"3/2"}], "params":%s})j";
    auto with = [&](const char* p) {
        std::string s(steps);
        s.replace(s.find("%s"), 2, p);
        return config_from_json(json::parse(s));
    };
    CHECK_THROWS_AS(with("{}"), InvalidInput);
    CHECK_THROWS_AS(with(R"j({"r":3})j"), InvalidInput);
    CHECK(with(R"j({"r":2})j").params.r == 2);
    // Jump-free roofs need no r.
    CHECK_NOTHROW(config_from_json(parse(R"j({"roof":[{"start":"0","value":"1"}]})j")));
}

TEST_CASE("rectangle files") {
    const auto rs = rects_from_json(parse(R"j([{"base":["0","1/2"],"band":["0","1"]}])j"));
    REQUIRE(rs.size() == 1);
    CHECK(rs[0].base.hi == Scalar(1, 2));
    CHECK(rects_from_json(parse("[]")).empty());
    CHECK_THROWS_AS(rects_from_json(parse(R"j([{"base":["1/2","0"],"band":["0","1"]}])j")), InvalidInput);
    CHECK_THROWS_AS(rects_from_json(parse(R"j([{"base":["0","1"]}])j")), InvalidInput);
}

TEST_CASE("error JSON") {
    const json k = error_json(KeaneViolation("tie", 2), 4);
    CHECK(k["error"] == "KeaneViolation");
    CHECK(k["at_step"] == 2);
    CHECK(k["exit_code"] == 4);
    const json d = error_json(DomainError("x"), 3);
    CHECK(d["error"] == "DomainError");
    CHECK_FALSE(d.contains("at_step"));
}

TEST_CASE("histogram CSV") {
    EmpiricalMeasure m = EmpiricalMeasure::from_atoms({{Scalar(1, 2), Scalar(1, 4)}, {Scalar(0), Scalar(3, 4)}});
    CHECK(histogram_csv(m, 4) == "value,mass\n0,0.75\n0.5,0.25\n");
}

}
