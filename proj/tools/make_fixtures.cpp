// Regenerates the pinned instance files under fixtures/ from the library
// builders, so the shipped JSON is always byte-identical to the code.
// Usage: lexmarket-make-fixtures [output-dir]   (default: fixtures)

#include <filesystem>
#include <iostream>
#include <string>

#include "lexmarket/fixtures.hpp"
#include "lexmarket/json_io.hpp"

namespace lm = lexmarket;

namespace {

void write_instance(const std::string& dir, const lm::fixtures::Instance& inst,
                    const std::string& stem) {
  auto path = [&](const char* kind) {
    return (std::filesystem::path(dir) / (stem + "." + kind + ".json")).string();
  };
  lm::save_text(path("economy"), lm::economy_to_json_text(inst.economy));
  lm::save_text(path("allocation"), lm::allocation_to_json_text(inst.allocation));
  if (inst.system) lm::save_text(path("system"), lm::system_to_json_text(*inst.system));
}

}  // namespace

int main(int argc, char** argv) {
  std::string dir = argc > 1 ? argv[1] : "fixtures";
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);

  write_instance(dir, lm::fixtures::stable_yet_rejectable(), "stable-yet-rejectable");
  write_instance(dir, lm::fixtures::satiation_surplus(), "satiation-surplus");
  write_instance(dir, lm::fixtures::two_tier_chain(), "two-tier-chain");
  write_instance(dir, lm::fixtures::three_tier_chain(), "three-tier-chain");
  write_instance(dir, lm::fixtures::two_tier_merged(), "two-tier-merged");
  for (long den : {8L, 16L, 32L})
    write_instance(dir, lm::fixtures::perturbed_competitive(lm::Rat(1, den)),
                   "perturbed-competitive-" + std::to_string(den));

  // A deliberately broken economy for exercising `validate`'s negative path.
  lm::Economy bad = lm::fixtures::satiation_surplus().economy;
  bad.omega[0][0] += lm::Rat(1, 7);
  lm::save_text((std::filesystem::path(dir) / "invalid-column-sum.economy.json").string(),
                lm::economy_to_json_text(bad));

  std::cout << "wrote fixtures to " << dir << "\n";
  return 0;
}
