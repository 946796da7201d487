#include <doctest.h>

#include "depthlab/errors.hpp"
#include "depthlab/experiment.hpp"
#include "depthlab/verify.hpp"

using namespace depthlab;

TEST_CASE("every preset loads and hashes stably") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    auto c = preset_config(name);
    CHECK(!c.family.generators.empty());
    CHECK(!c.epsilons.empty());
    auto back = config_from_json(config_to_json(c));
    CHECK(config_hash(back) == config_hash(c));
    CHECK(config_hash(c).size() == 16);
  }
}

TEST_CASE("hash ignores threads and output but not substance") {
  auto c = preset_config("cantor");
  auto h = config_hash(c);
  c.threads = 4;
  c.output = "/tmp/x.csv";
  CHECK(config_hash(c) == h);
  c.epsilons.push_back(0.01);
  CHECK(config_hash(c) != h);
}

TEST_CASE("config errors name the offending key and line") {
  const std::string text = "{\n  \"preset\": \"shear\",\n  \"bogus\": 3\n}\n";
  try {
    config_from_text(text);
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    std::string msg = e.what();
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("bogus") != std::string::npos);
  }
  try {
    config_from_text("{\n  \"preset\": \"shear\",\n  \"epsilons\": [0.1,\n}\n");
    FAIL("expected a parse error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
  CHECK_THROWS_AS(config_from_json({{"preset", "nope"}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"preset", "shear"}, {"k_range", {3, 1}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"preset", "shear"}, {"epsilons", {0.1, -1.0}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"preset", "shear"}, {"strategy", {{"kind", "canonical_bfs"}, {"tau", 1}}}}),
                  ConfigError);
}

TEST_CASE("randomized probes need a seed") {
  nlohmann::json j{{"family", "cantor"}, {"epsilons", {0.1}}, {"probes", {{"kind", "random"}, {"n", 16}}}};
  CHECK_THROWS_AS(config_from_json(j), ConfigError);
  j["seed"] = 5;
  CHECK_NOTHROW(config_from_json(j));
}

TEST_CASE("growth csv provenance and thread independence") {
  auto c = preset_config("pingpong-pl");
  c.k_from = 1;
  c.k_to = 5;
  c.epsilons = {0.1, 0.05};
  auto one = run_growth(c);
  c.threads = 3;
  auto three = run_growth(c);
  CHECK(one.csv == three.csv);
  CHECK(one.csv.rfind("#config-hash," + config_hash(c) + "\n#version,", 0) == 0);
  CHECK(one.profile.cells.size() == 10);
}

TEST_CASE("shear preset reproduces 1 + k") {
  auto c = preset_config("shear");
  c.k_from = 1;
  c.k_to = 12;
  c.epsilons = {0.1};
  c.strategy = CanonicalBFS{};
  c.probes = ProbeSpec{"lattice", 32};
  for (const auto& cell : run_growth(c).profile.cells) {
    CHECK(cell.bracket.lower == static_cast<std::size_t>(1 + cell.k));
    CHECK(cell.bracket.upper == static_cast<std::size_t>(1 + cell.k));
  }
}

TEST_CASE("file helpers") {
  const std::string path = "depthlab_test_file.txt";
  write_file(path, "abc\n");
  CHECK(read_file(path) == "abc\n");
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_file("/nonexistent/depthlab"), ConfigError);
}

TEST_CASE("criterion filter parsing") {
  CHECK(parse_filter("1,3-5") == std::vector<int>{1, 3, 4, 5});
  CHECK(parse_filter("12") == std::vector<int>{12});
  CHECK_THROWS_AS(parse_filter("0"), ConfigError);
  CHECK_THROWS_AS(parse_filter("15"), ConfigError);
  CHECK_THROWS_AS(parse_filter("3-1"), ConfigError);
  CHECK_THROWS_AS(parse_filter("x"), ConfigError);
  CHECK(criterion_name(1) == "shear-exact-count");
}

TEST_CASE("verify runs a single criterion") {
  VerifyOptions opts;
  auto res = run_criterion(12, opts);
  CHECK(res.pass);
  CHECK(res.id == 12);
  auto report = verify_report({res});
  CHECK(report.find("PASS") != std::string::npos);
}

TEST_CASE("a corrupted preset produces a named failure") {
  VerifyOptions opts;
  auto bad = config_to_json(preset_config("shear"));
  bad["family"] = family_to_json(family_preset("cantor"));
  opts.preset_overrides["shear"] = bad;
  auto res = run_criterion(1, opts);
  CHECK_FALSE(res.pass);
  CHECK(res.name == "shear-exact-count");
  CHECK(!res.detail.empty());
  CHECK_FALSE(all_passed({res}));
}
