#include "dwellcert/io.hpp"

#include "../support/oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace dwellcert;
using namespace dwellcert::testing;
using nlohmann::json;

namespace {

ErrorCode parse_code(const std::string& text) {
    try {
        (void)build_system(parse_document(text));
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("document was accepted: " << text);
    return ErrorCode::InvalidArgument;
}

const char* kMinimal = R"({"schema_version":1,"dimension":1,"matrices":[[[-1]],[[-2]]],"edges":[[1,2],[2,1]]})";

}  // namespace

TEST_CASE("FNV-1a reference values", "[io]") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
    CHECK(input_digest(json::object()).size() == 16);
}

TEST_CASE("documents round-trip", "[io]") {
    for (const char* name : {"diagonal_pair", "planar_pair", "supplied_basis", "three_vertex_ring"}) {
        const auto doc = load_fixture(name);
        const auto j = document_to_json(doc);
        const auto again = document_from_json(j);
        CHECK(document_to_json(again) == j);
        CHECK(input_digest(j) == input_digest(document_to_json(again)));
    }
    const auto doc = load_fixture("supplied_basis");
    REQUIRE(doc.signal.has_value());
    CHECK(doc.signal->switch_count() == 12);
    CHECK(doc.intervals.at({2, 1}) == Interval{0.5, 3.0});
    CHECK(doc.seed.value() == 7);
}

TEST_CASE("stored decompositions rebuild the same system", "[io]") {
    auto doc = load_fixture("planar_pair");
    const auto sys = build_system(doc);
    store_decompositions(doc, sys);
    const auto rebuilt = build_system(document_from_json(document_to_json(doc)));
    for (Vertex v = 1; v <= 2; ++v) CHECK(rebuilt.decomposition(v).P().isApprox(sys.decomposition(v).P()));
}

TEST_CASE("malformed documents are rejected with codes", "[io]") {
    CHECK(parse_code("{\"schema_version\": 1,") == ErrorCode::ParseError);
    CHECK(parse_code("[]") == ErrorCode::InvalidArgument);
    CHECK(parse_code(R"({"schema_version":2,"dimension":1,"matrices":[[[-1]]],"edges":[]})") ==
          ErrorCode::InvalidArgument);
    CHECK(parse_code(R"({"schema_version":1,"dimension":1,"matrices":[[[-1]]],"edges":[],"bogus":1})") ==
          ErrorCode::InvalidArgument);
    CHECK(parse_code(R"({"schema_version":1,"dimension":2,"matrices":[[[-1]]],"edges":[]})") ==
          ErrorCode::InvalidArgument);
    CHECK(parse_code(R"({"schema_version":1,"dimension":1,"matrices":[[[-1]],[[-2]]],"edges":[[1,1]]})") ==
          ErrorCode::InvalidGraph);
    CHECK(parse_code(R"({"schema_version":1,"dimension":1,"matrices":[[[-1]],[[-2]]],"edges":[[1,2]],
        "etas":[{"edge":[2,1],"eta":1}]})") == ErrorCode::NotAnEdge);
    CHECK(parse_code(R"({"schema_version":1,"dimension":1,"matrices":[[[-1]],[[-2]]],"edges":[[1,2]],
        "decompositions":[{"vertex":1,"P":[[1]],"blocks":[{"kind":"real","lambda":-3}]}]})") ==
          ErrorCode::ReconstructionMismatch);
    CHECK(parse_code(R"({"schema_version":1,"dimension":1,"matrices":[[[-1]],[[-2]]],"edges":[[1,2]],
        "decompositions":[{"vertex":1,"P":[[1]],"blocks":[{"kind":"odd","lambda":-1}]}]})") ==
          ErrorCode::InvalidArgument);
    CHECK(parse_code(R"({"schema_version":1,"dimension":1,"matrices":[[[-1]],[[-2]]],"edges":[[1,2]],
        "signal":{"path":[1,2],"dwells":[1],"times":[1]}})") == ErrorCode::InvalidArgument);
    CHECK(parse_code(R"({"schema_version":1,"dimension":1,"matrices":[[[-1]],[[-2]]],"edges":[[1,2]],"seed":-4})") ==
          ErrorCode::InvalidArgument);
}

TEST_CASE("minimal document", "[io]") {
    const auto doc = parse_document(kMinimal);
    CHECK(doc.names == std::vector<std::string>{"A1", "A2"});
    const auto sys = build_system(doc);
    CHECK(sys.dimension() == 1);
    CHECK(sys.vertex_count() == 2);
    const auto signal = parse_document(R"({"schema_version":1,"dimension":1,"matrices":[[[-1]],[[-2]]],
        "edges":[[1,2]],"signal":{"path":[1,2],"dwells":[0.25]}})").signal;
    REQUIRE(signal.has_value());
    CHECK(signal->switch_times == std::vector<double>{0.25});
}
