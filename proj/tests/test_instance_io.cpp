#include <filesystem>

#include "doctest.h"
#include "fwss/instance_io.hpp"

using namespace fwss;
using nlohmann::json;

TEST_CASE("round trip through JSON and files") {
    std::vector<BigInt> w = {BigInt(1) << 90, 5, 7};
    Instance inst(w, (BigInt(1) << 90) + 7, 2);
    auto doc = instance_to_json(inst);
    CHECK(doc["t"] == "1237940039285380274899124231");
    CHECK(doc["a"][0] == "1237940039285380274899124224");
    CHECK(instance_from_json(doc) == inst);

    auto path = std::filesystem::temp_directory_path() / "fwss_io_test.json";
    write_instance_file(path, inst);
    CHECK(read_instance_file(path) == inst);
    std::filesystem::remove(path);
}

TEST_CASE("field order is free") {
    auto doc = json::parse(R"({"a": ["3", "4"], "t": "7", "ell": 2, "n": 2})");
    Instance inst = instance_from_json(doc);
    CHECK(inst.n() == 2);
    CHECK(inst.target() == 7);
}

TEST_CASE("malformed documents are rejected") {
    CHECK_THROWS_AS(instance_from_json(json::parse(R"({"n":1,"ell":1,"t":"1","a":["1"],"x":0})")), InputError);
    CHECK_THROWS_AS(instance_from_json(json::parse(R"({"n":1,"ell":1,"a":["1"]})")), InputError);
    CHECK_THROWS_AS(instance_from_json(json::parse(R"({"n":2,"ell":1,"t":"1","a":["1"]})")), InputError);
    CHECK_THROWS_AS(instance_from_json(json::parse(R"({"n":1,"ell":1,"t":1,"a":["1"]})")), InputError);
    CHECK_THROWS_AS(instance_from_json(json::parse(R"({"n":1,"ell":1,"t":"1","a":[1]})")), InputError);
    CHECK_THROWS_AS(instance_from_json(json::parse(R"({"n":1,"ell":1,"t":"1x","a":["1"]})")), InputError);
    CHECK_THROWS_AS(instance_from_json(json::parse(R"({"n":1,"ell":1,"t":"1","a":["0"]})")), InputError);
    CHECK_THROWS_AS(instance_from_json(json::parse(R"([1,2])")), InputError);
    CHECK_THROWS_AS(read_instance_file("/nonexistent/fwss.json"), ResourceError);
}

TEST_CASE("decimal helpers") {
    CHECK(parse_decimal("123456789012345678901234567890") == BigInt("123456789012345678901234567890"));
    CHECK(to_decimal(BigInt(-42)) == "-42");
    CHECK_THROWS_AS(parse_decimal(""), InputError);
    CHECK_THROWS_AS(parse_decimal("-"), InputError);
    CHECK_THROWS_AS(parse_decimal("1e5"), InputError);
}
