#include <doctest.h>

#include <sstream>

#include "weaklab/config.hpp"

using namespace weaklab;

namespace {

KeyValueConfig parse(const std::string& text) {
  std::istringstream in(text);
  return KeyValueConfig::parse(in);
}

}  // namespace

TEST_CASE("sections prefix their keys and comments are stripped") {
  const KeyValueConfig kv = parse(
      "# top comment\n"
      "seeds = 1, 2 3\n"
      "[loss]\n"
      "q = 0.5   ; trailing\n"
      "  family = gce\n");
  CHECK(kv.get_double("loss.q", 0.0) == 0.5);
  CHECK(kv.get_string("loss.family", "") == "gce");
  CHECK(kv.get_seeds("seeds", {}) == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(kv.get_double("loss.alpha", 1.25) == 1.25);
  CHECK(kv.unused_keys().empty());
}

TEST_CASE("unused keys are reported") {
  const KeyValueConfig kv = parse("a = 1\nb = 2\n");
  (void)kv.get_size("a", 0);
  CHECK(kv.unused_keys() == std::vector<std::string>{"b"});
}

TEST_CASE("typed getters reject malformed values") {
  const KeyValueConfig kv = parse("x = abc\nn = -3\nf = 1.5e\nflag = maybe\n");
  CHECK_THROWS(kv.get_double("x", 0.0));
  CHECK_THROWS(kv.get_size("n", 0));
  CHECK_THROWS(kv.get_double("f", 0.0));
  CHECK_THROWS(kv.get_bool("flag", false));
}

TEST_CASE("booleans and lists") {
  const KeyValueConfig kv = parse("a = yes\nb = off\netas = 0.1,0.2, 0.3\n");
  CHECK(kv.get_bool("a", false));
  CHECK_FALSE(kv.get_bool("b", true));
  CHECK(kv.get_doubles("etas", {}) == std::vector<double>{0.1, 0.2, 0.3});
}

TEST_CASE("syntax errors name the line") {
  CHECK_THROWS_WITH(parse("a = 1\nnot a pair\n"), doctest::Contains("line 2"));
  CHECK_THROWS(parse("[open\n"));
  CHECK_THROWS(parse(" = 3\n"));
}
