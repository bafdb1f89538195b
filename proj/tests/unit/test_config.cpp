#include "swarm/config.hpp"
#include "swarm/error.hpp"
#include "swarm/optimizer.hpp"
#include "swarm/voi.hpp"

#include <doctest.h>

#include <stdexcept>

using swarm::ConfigError;
using swarm::KeyValueConfig;

TEST_SUITE("config") {
  TEST_CASE("parses values, comments and blank lines") {
    const auto c = KeyValueConfig::parse("# header\n\nname = trial  # trailing\nrate = 0.5\ncount=7\nflag = true\n");
    CHECK(c.get_string("name") == "trial");
    CHECK(c.get_double("rate") == 0.5);
    CHECK(c.get_int("count") == 7);
    CHECK(c.get_bool("flag", false));
    CHECK(c.get_int("missing", 3) == 3);
    CHECK_FALSE(c.has("missing"));
  }

  TEST_CASE("lists and ranges") {
    const auto c = KeyValueConfig::parse("a = 1, 2, 3\nb = 1..15\nc = 0..50:10\nd = 3, 5..7\nxs = 0.5, -1\n");
    CHECK(c.get_ints("a") == std::vector<long long>{1, 2, 3});
    CHECK(c.get_int_range("b").size() == 15);
    CHECK(c.get_int_range("b").back() == 15);
    CHECK(c.get_int_range("c") == std::vector<long long>{0, 10, 20, 30, 40, 50});
    CHECK(c.get_int_range("d") == std::vector<long long>{3, 5, 6, 7});
    CHECK(c.get_doubles("xs") == std::vector<double>{0.5, -1.0});
  }

  TEST_CASE("errors carry source and line") {
    try {
      (void)KeyValueConfig::parse("a = 1\na = 2\n", "dup.cfg");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("dup.cfg:2") != std::string::npos);
    }
    const auto c = KeyValueConfig::parse("a = 1\nbogus = 2\nn = x\n", "k.cfg");
    try {
      c.require_known({"a", "n"});
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("k.cfg:2") != std::string::npos);
    }
    CHECK_THROWS_AS(c.get_int("n"), ConfigError);
    CHECK_THROWS_AS(c.get_string("absent"), ConfigError);
    CHECK_THROWS_AS(KeyValueConfig::parse("no equals sign\n"), ConfigError);
  }

  TEST_CASE("to_string round trip") {
    auto c = KeyValueConfig::parse("b = 2\na = x\n");
    c.set("c", "1.5");
    const auto again = KeyValueConfig::parse(c.to_string());
    CHECK(again.get_string("a") == "x");
    CHECK(again.get_double("c") == 1.5);
  }

  TEST_CASE("shipped configs parse") {
    const std::string dir = SWARMTSC_SOURCE_DIR "/configs/";
    const auto number = swarm::VoiSpec::from_config(KeyValueConfig::load(dir + "defender_number.cfg"));
    CHECK(number.grid.size() == 15);
    CHECK(number.effective_engagements() == 150);
    CHECK(swarm::VoiSpec::from_config(KeyValueConfig::load(dir + "defender_motion.cfg")).grid.size() == 5);
    CHECK(swarm::VoiSpec::from_config(KeyValueConfig::load(dir + "noise.cfg")).grid.size() == 6);
    CHECK(swarm::VoiSpec::from_config(KeyValueConfig::load(dir + "number_and_motion.cfg")).grid.size() == 50);
    const auto problem = swarm::OptimizationProblem::from_config(KeyValueConfig::load(dir + "problem.cfg"));
    CHECK(problem.engagement.seed == 1201);
    CHECK(problem.plan.headings.size() == 5);
  }
}
