#include "doctest.h"

#include <cstdlib>
#include <string>

#include "lexmarket/fixtures.hpp"
#include "lexmarket/json_io.hpp"

using namespace lexmarket;

TEST_SUITE("json_io") {

TEST_CASE("economy and allocation round-trip byte-stably") {
  for (const auto& inst : fixtures::all_instances()) {
    CAPTURE(inst.name);
    std::string etext = economy_to_json_text(inst.economy);
    Economy e2 = economy_from_json_text(etext);
    CHECK(economy_to_json_text(e2) == etext);
    CHECK(e2.u == inst.economy.u);
    CHECK(e2.omega == inst.economy.omega);
    CHECK(e2.goods == inst.economy.goods);
    CHECK(e2.agent_names == inst.economy.agent_names);

    std::string xtext = allocation_to_json_text(inst.allocation);
    Allocation x2 = allocation_from_json_text(xtext);
    CHECK(x2.rows == inst.allocation.rows);
    CHECK(allocation_to_json_text(x2) == xtext);

    if (inst.system) {
      std::string stext = system_to_json_text(*inst.system);
      LexPriceSystem s2 = system_from_json_text(stext);
      CHECK(s2.P == inst.system->P);
      CHECK(s2.alpha == inst.system->alpha);
      CHECK(system_to_json_text(s2) == stext);
    }
  }
}

TEST_CASE("serialized text ends with exactly one newline") {
  std::string t = economy_to_json_text(fixtures::satiation_surplus().economy);
  REQUIRE(!t.empty());
  CHECK(t.back() == '\n');
  CHECK(t[t.size() - 2] != '\n');
}

TEST_CASE("parsers accept integers where rationals are expected") {
  std::string text = allocation_to_json_text(fixtures::two_tier_chain().allocation);
  // Swap one canonical "0" string for a bare JSON 0 by round-tripping through
  // a literal document.
  Allocation x = allocation_from_json_text(R"({
    "rows": [["1", 0, "0"], [0, "1", 0], ["0", 0, 1]]
  })");
  CHECK(x.rows[0][0] == 1);
  CHECK(x.rows[1][1] == 1);
  CHECK(x.rows[2][2] == 1);
  (void)text;
}

TEST_CASE("malformed documents raise parse errors") {
  CHECK_THROWS_AS(economy_from_json_text("{"), ParseError);
  CHECK_THROWS_AS(economy_from_json_text("{}"), ParseError);
  CHECK_THROWS_AS(allocation_from_json_text(R"({"rows": [["1/0"]]})"), ParseError);
  CHECK_THROWS_AS(allocation_from_json_text(R"({"rows": [["0.5"]]})"), ParseError);
  CHECK_THROWS_AS(allocation_from_json_text(R"({"rows": [["1"], ["0", "1"]]})"), ParseError);
  CHECK_THROWS_AS(load_economy("/nonexistent/economy.json"), ParseError);
}

TEST_CASE("content digest matches the reference test vectors") {
  CHECK(content_digest("") == "fnv1a64:cbf29ce484222325");
  CHECK(content_digest("a") == "fnv1a64:af63dc4c8601ec8c");
  CHECK(content_digest("hello") == "fnv1a64:a430d84680aabd0b");
}

TEST_CASE("checked-in fixture files equal the builders byte for byte") {
  const char* dir = std::getenv("LEXMARKET_FIXTURES_DIR");
  if (dir == nullptr) {
    MESSAGE("LEXMARKET_FIXTURES_DIR not set; skipping file comparison");
    return;
  }
  auto path = [&](const std::string& base) { return std::string(dir) + "/" + base; };
  for (const auto& inst : fixtures::all_instances()) {
    CAPTURE(inst.name);
    // The eps = 1/8 member of the perturbed family is filed with its suffix.
    std::string base = inst.name == "perturbed-competitive" ? "perturbed-competitive-8"
                                                            : inst.name;
    CHECK(load_text(path(base + ".economy.json")) == economy_to_json_text(inst.economy));
    CHECK(load_text(path(base + ".allocation.json")) ==
          allocation_to_json_text(inst.allocation));
    if (inst.system)
      CHECK(load_text(path(base + ".system.json")) == system_to_json_text(*inst.system));
  }
  for (const char* eps : {"16", "32"}) {
    fixtures::Instance inst =
        fixtures::perturbed_competitive(Rat(1, std::atoi(eps)));
    std::string base = "perturbed-competitive-" + std::string(eps);
    CHECK(load_text(path(base + ".economy.json")) == economy_to_json_text(inst.economy));
    CHECK(load_text(path(base + ".allocation.json")) ==
          allocation_to_json_text(inst.allocation));
    if (inst.system)
      CHECK(load_text(path(base + ".system.json")) == system_to_json_text(*inst.system));
  }
  // The deliberately broken validation fixture parses but fails validation.
  Economy bad = load_economy(path("invalid-column-sum.economy.json"));
  CHECK(!validate_economy(bad).empty());
}

}  // TEST_SUITE
