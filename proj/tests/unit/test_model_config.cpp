#include <doctest.h>

#include <pla/errors.hpp>
#include <pla/model_config.hpp>

#include <filesystem>
#include <fstream>

using namespace pla;

namespace {

bool same(const IidModel& a, const IidModel& b) {
    return a.signature.symbols() == b.signature.symbols() && a.probs == b.probs && a.schedule == b.schedule &&
           a.seed == b.seed;
}

}  // namespace

TEST_CASE("TOML and JSON configs describe the same model") {
    const char* toml = R"(# edge model
schedule = [
  50,
  100, 200,   # trailing comma allowed
]
seed = 7

[signature]
E = 2
P = 1

[probs]
E = 0.3   # edges
P = 5e-1
)";
    const char* json = R"({"signature": {"E": 2, "P": 1}, "probs": {"E": 0.3, "P": 0.5},
                           "schedule": [50, 100, 200], "seed": 7})";
    const char* flat = R"(signature = { E = 2, P = 1 }
probs = { E = 0.3, P = 0.5 }
schedule = [50, 100, 200]
seed = 7
)";
    IidModel j = parse_model_json(json);
    CHECK(j.prob("E") == 0.3);
    CHECK(j.schedule == std::vector<std::size_t>{50, 100, 200});
    CHECK(same(parse_model_toml(toml), j));
    CHECK(same(parse_model_toml(flat), j));
}

TEST_CASE("JSON round trip") {
    IidModel m = parse_model_json(R"({"signature": {"E": 2}, "probs": {"E": 0.25}, "seed": 3})");
    CHECK(m.schedule.empty());
    CHECK(same(parse_model_json(model_to_json(m)), m));
}

TEST_CASE("the shipped configs agree") {
    const std::filesystem::path data = PLA_DATA_DIR;
    IidModel t = load_model(data / "model_pe03.toml");
    IidModel j = load_model(data / "model_pe03.json");
    CHECK(same(t, j));
    CHECK(t.prob("E") == 0.3);
    CHECK(t.seed == 7);
}

TEST_CASE("malformed configs are rejected") {
    for (const char* bad : {
             R"([1, 2])",
             R"({"signature": {"E": 2}})",
             R"({"signature": {"E": 2}, "probs": {"E": 0.3}, "extra": 1})",
             R"({"signature": {"E": 0}, "probs": {"E": 0.3}})",
             R"({"signature": {"E": 2}, "probs": {"E": "0.3"}})",
             R"({"signature": {"E": 2}, "probs": {"E": 1.3}})",
             R"({"signature": {"E": 2}, "probs": {"E": 0.3, "F": 0.1}})",
             R"({"signature": {"E": 2}, "probs": {"E": 0.3}, "seed": -1})",
             R"({"signature": {"E": 2}, "probs": {"E": 0.3}, "schedule": [100, 50]})",
             R"({"signature": {"E": 2}, "probs": {"E": 0.3})",
         }) {
        INFO(bad);
        CHECK_THROWS_AS(parse_model_json(bad), Error);
    }
    for (const char* bad : {
             "signature = { E = 2 }\nprobs = { E = 0.3 } trailing\n",
             "signature = { E = 2 }\nsignature = { E = 2 }\n",
             "[signature]\nE = 2\n[signature]\n",
             "signature = { E = 2 }\nprobs = { E = \"a\\n\" }\n",
             "signature = { E = 2 }\nprobs = { E = 0.3.4 }\n",
             "signature = { E = 2 }\nprobs = { E = 0.3 }\nschedule = [1, 2\n",
         }) {
        INFO(bad);
        CHECK_THROWS_AS(parse_model_toml(bad), Error);
    }
    CHECK_THROWS_AS(load_model("/nonexistent/model.toml"), Error);
    CHECK_THROWS_AS(load_model(std::filesystem::path(PLA_DATA_DIR) / "model_pe03.txt"), Error);
}
