#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "biharm/report.hpp"

using namespace biharm;

TEST_CASE("table 1 multipliers") {
    CHECK(table1_multipliers(13) == std::make_pair(2.03, 2.15));
    CHECK(table1_multipliers(31) == std::make_pair(3.06, 4.05));
    CHECK(table1_multipliers(19) == std::make_pair(4.6, 10.0));
    CHECK(table1_multipliers(30) == std::make_pair(4.6, 10.0));
    CHECK(table1_multipliers(18) == std::make_pair(3.5, 3.78));
    CHECK_THROWS_AS(table1_multipliers(12), std::domain_error);
    CHECK_THROWS_AS(table1_multipliers(32), std::domain_error);
}

TEST_CASE("lemma 3.4 ordering including the equality case") {
    CHECK(lemma34_ordering(13, 30.0, 2.0, 2.5));
    CHECK_FALSE(lemma34_ordering(13, 30.0, 2.5, 2.0));
    CHECK_FALSE(lemma34_ordering(13, 30.0, 2.5, 2.5));
    const double eq = compute_Hn(13) / (30.0 * compute_K0(13, 30.0));
    CHECK(lemma34_ordering(13, 30.0, eq, eq));
}

TEST_CASE("audit of a single cell reports both certificates") {
    const auto row = audit_one(13, 500.0, 3.5, 2.03, 2.15);
    CHECK(row.n == 13);
    CHECK(row.sub.verdict != Verdict::inconclusive);
    CHECK(row.stab.verdict != Verdict::inconclusive);
    // a refuted sub-solution invalidates the bundle no matter what
    if (row.sub.verdict == Verdict::refuted) CHECK_FALSE(row.lemma34_bundle_valid);
}

TEST_CASE("audit grid rejects p below threshold") {
    CHECK_THROWS_AS(audit_table1({10.0}), std::domain_error);
}

TEST_CASE("full audit is deterministic and byte-identical") {
    const auto rows1 = audit_table1({50.0, 500.0});
    const auto rows2 = audit_table1({50.0, 500.0});
    REQUIRE(rows1.size() == rows2.size());
    REQUIRE(rows1.size() == 19u * 2u);
    json a = json::array(), b = json::array();
    for (const auto& r : rows1) a.push_back(to_json(r));
    for (const auto& r : rows2) b.push_back(to_json(r));
    CHECK(a.dump() == b.dump());
    // every row carries a verdict, a signed margin, a witness location and a precision
    for (const auto& r : rows1) {
        CHECK((r.sub.verdict == Verdict::certified || r.sub.verdict == Verdict::refuted ||
               r.sub.verdict == Verdict::inconclusive));
        CHECK(std::isfinite(r.sub.worst_margin));
        CHECK(std::isfinite(r.stab.worst_margin));
        CHECK(r.sub.worst_location >= 0.0);
        CHECK(!r.sub.precision.empty());
        CHECK(!r.stab.precision.empty());
    }
}

TEST_CASE("json reports round trip byte-identically") {
    const auto row = audit_one(14, 50.0, 3.5, 2.34, 2.96);
    const json j = to_json(row);
    const std::string s1 = j.dump(2);
    const json parsed = json::parse(s1);
    CHECK(parsed.dump(2) == s1);
}

TEST_CASE("constants json carries the printed variant and precision") {
    const auto j = constants_json<double>(ProblemParams(13, 30.0, 3.5));
    CHECK(j["precision"] == "double");
    CHECK(j["supercritical"] == true);
    CHECK(j["Hn"] == 855.5625);
    CHECK(j.contains("K0_printed_variant"));
    const auto jl = constants_json<long double>(ProblemParams(13, 30.0, 3.5));
    CHECK(jl["precision"] == "long-double");
    const auto j12 = constants_json<double>(ProblemParams(12, 30.0, 3.5));
    CHECK(j12["pc"].is_null());
}

TEST_CASE("singularity bundle: the paper's m=2 case at n=32") {
    const auto rep = singularity_report(32, 1e6, 2.0, std::exp(2.0), std::exp(2.0) + 0.1);
    CHECK(rep.row.sub.verdict == Verdict::certified);
    CHECK(rep.row.stab.verdict == Verdict::certified);
    CHECK(rep.ordering_ok);
    CHECK(rep.valid);
}

TEST_CASE("singularity bundle rejects inverted ordering") {
    // certificates may pass, but beta <= lambda' invalidates the bundle
    const auto rep = singularity_report(32, 1e6, 2.0, std::exp(2.0) + 0.2, std::exp(2.0) + 0.1);
    CHECK_FALSE(rep.valid);
    CHECK_FALSE(rep.ordering_ok);
}

TEST_CASE("singularity bundle at the equality pair beta = lambda' = Hn/(p K0)") {
    // the ordering hypothesis admits this exact pair; at n=13, p=30 the value
    // is ~1.0046, far below sup H, so the ordering passes while the
    // sub-solution certificate refutes and the bundle stays invalid
    const double eq = compute_Hn(13) / (30.0 * compute_K0(13, 30.0));
    const auto rep = singularity_report(13, 30.0, 3.5, eq, eq);
    CHECK(rep.ordering_ok);
    CHECK(rep.row.sub.verdict == Verdict::refuted);
    CHECK_FALSE(rep.valid);
}
