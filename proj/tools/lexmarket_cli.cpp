// Command-line front end: loads economies, allocations, and price systems
// from JSON files, dispatches to the library, and prints a deterministic
// machine-readable run report to stdout (or aligned text with --human).
// Exit codes: 0 = success / membership, 1 = definite negative with witness,
// 2 = input error, 3 = inconclusive (solver or certification gave up).

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lexmarket/assignment.hpp"
#include "lexmarket/certify.hpp"
#include "lexmarket/economy.hpp"
#include "lexmarket/fixtures.hpp"
#include "lexmarket/json_io.hpp"
#include "lexmarket/lde.hpp"
#include "lexmarket/solver.hpp"
#include "lexmarket/stability.hpp"
#include "lexmarket/vertex_enum.hpp"

namespace lm = lexmarket;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr const char* kToolName = "lexmarket";
constexpr const char* kToolVersion = "1.0.0";

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;
constexpr int kExitInputError = 2;
constexpr int kExitInconclusive = 3;

// ---------------------------------------------------------------------------
// JSON rendering helpers
// ---------------------------------------------------------------------------

ordered_json json_of_vec(const lm::RatVec& v) {
  ordered_json arr = ordered_json::array();
  for (const lm::Rat& r : v) arr.push_back(lm::rat_to_string(r));
  return arr;
}

ordered_json json_of_mat(const lm::RatMat& m) {
  ordered_json arr = ordered_json::array();
  for (const lm::RatVec& row : m) arr.push_back(json_of_vec(row));
  return arr;
}

ordered_json json_of_system(const lm::LexPriceSystem& sys) {
  ordered_json j;
  j["prices"] = json_of_mat(sys.P);
  j["dividends"] = json_of_mat(sys.alpha);
  return j;
}

ordered_json json_of_failure(const lm::CheckFailure& f, const lm::Economy& e) {
  ordered_json j;
  j["what"] = f.what;
  if (f.agent) {
    j["agent"] = *f.agent;
    if (*f.agent < e.agent_names.size()) j["agent_name"] = e.agent_names[*f.agent];
  }
  if (f.currency) j["currency"] = *f.currency;
  if (f.witness_bundle) j["witness_bundle"] = json_of_vec(*f.witness_bundle);
  if (f.witness_value) j["witness_value"] = lm::rat_to_string(*f.witness_value);
  return j;
}

ordered_json json_of_verification(const lm::VerificationReport& r, const lm::Economy& e) {
  ordered_json j;
  j["ok"] = r.ok;
  ordered_json fails = ordered_json::array();
  for (const auto& f : r.failures) fails.push_back(json_of_failure(f, e));
  j["failures"] = fails;
  j["income_cutoffs"] = r.income_cutoffs;
  return j;
}

ordered_json json_of_block_witness(const lm::BlockWitness& w, const lm::Economy& e) {
  ordered_json j;
  ordered_json members = ordered_json::array();
  for (std::size_t idx = 0; idx < w.coalition.size(); ++idx) {
    ordered_json m;
    m["agent"] = w.coalition[idx];
    m["agent_name"] = e.agent_names[w.coalition[idx]];
    m["bundle"] = json_of_vec(w.bundles[idx]);
    members.push_back(m);
  }
  j["members"] = members;
  j["total_gain"] = lm::rat_to_string(w.total_gain);
  return j;
}

ordered_json json_of_coalition_witness(const lm::CoalitionWitness& w, const lm::Economy& e) {
  ordered_json j;
  ordered_json members = ordered_json::array();
  for (const lm::RejectMember& m : w.members) {
    ordered_json mj;
    mj["agent"] = m.agent;
    mj["agent_name"] = e.agent_names[m.agent];
    mj["role"] = m.role == lm::RejectRole::endowment ? "endowment" : "allocation";
    mj["weight"] = lm::rat_to_string(m.weight);
    mj["multiplicity"] = m.multiplicity;
    mj["strict"] = m.strict;
    mj["bundle"] = json_of_vec(m.bundle);
    members.push_back(mj);
  }
  j["members"] = members;
  j["slack"] = lm::rat_to_string(w.slack);
  if (w.replicas)
    j["replicas"] = *w.replicas;
  else
    j["replicas"] = "unbounded";
  return j;
}

// ---------------------------------------------------------------------------
// Report plumbing
// ---------------------------------------------------------------------------

ordered_json make_report(const std::string& command) {
  ordered_json rep;
  rep["tool"] = kToolName;
  rep["version"] = kToolVersion;
  rep["command"] = command;
  rep["arguments"] = ordered_json::object();
  rep["inputs"] = ordered_json::object();
  return rep;
}

// Loads a file, records its path + content digest under `role`, returns the
// raw bytes. Throws lm::ParseError on I/O failure.
std::string record_input(ordered_json& rep, const std::string& role, const std::string& path) {
  std::string bytes = lm::load_text(path);
  ordered_json entry;
  entry["path"] = path;
  entry["digest"] = lm::content_digest(bytes);
  rep["inputs"][role] = entry;
  return bytes;
}

int finish(ordered_json& rep, const std::string& verdict, int exit_code, bool human,
           const std::string& human_text) {
  rep["verdict"] = verdict;
  rep["exit_code"] = exit_code;
  if (human)
    std::cout << human_text;
  else
    std::cout << rep.dump(2) << "\n";
  return exit_code;
}

int input_error(ordered_json& rep, const std::string& message, bool human) {
  rep["error"] = message;
  return finish(rep, "input-error", kExitInputError, human, "error: " + message + "\n");
}

// ---------------------------------------------------------------------------
// Human rendering helpers
// ---------------------------------------------------------------------------

std::string render_table(const std::vector<std::string>& col_names,
                         const std::vector<std::string>& row_names, const lm::RatMat& m) {
  std::vector<std::size_t> width(col_names.size() + 1, 0);
  for (const auto& r : row_names) width[0] = std::max(width[0], r.size());
  std::vector<std::vector<std::string>> cells;
  for (const auto& row : m) {
    std::vector<std::string> line;
    for (std::size_t j = 0; j < row.size(); ++j) {
      line.push_back(lm::rat_to_string(row[j]));
      width[j + 1] = std::max(width[j + 1], line.back().size());
    }
    cells.push_back(std::move(line));
  }
  for (std::size_t j = 0; j < col_names.size(); ++j)
    width[j + 1] = std::max(width[j + 1], col_names[j].size());
  std::string out;
  auto pad = [](const std::string& s, std::size_t w) {
    return s + std::string(w - s.size(), ' ');
  };
  out += pad("", width[0]);
  for (std::size_t j = 0; j < col_names.size(); ++j) out += "  " + pad(col_names[j], width[j + 1]);
  out += "\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    out += pad(i < row_names.size() ? row_names[i] : "", width[0]);
    for (std::size_t j = 0; j < cells[i].size(); ++j) out += "  " + pad(cells[i][j], width[j + 1]);
    out += "\n";
  }
  return out;
}

std::vector<std::string> currency_names(std::size_t d) {
  std::vector<std::string> names;
  for (std::size_t k = 1; k <= d; ++k) names.push_back("k=" + std::to_string(k));
  return names;
}

std::string describe_failures(const lm::VerificationReport& r, const lm::Economy& e) {
  std::string out;
  for (const auto& f : r.failures) {
    out += "  - " + f.what;
    if (f.agent) out += " [agent " + e.agent_names[*f.agent] + "]";
    if (f.currency) out += " [currency " + std::to_string(*f.currency) + "]";
    if (f.witness_bundle) {
      out += " witness (";
      for (std::size_t j = 0; j < f.witness_bundle->size(); ++j) {
        if (j) out += ", ";
        out += lm::rat_to_string((*f.witness_bundle)[j]);
      }
      out += ")";
    }
    if (f.witness_value) out += " value " + lm::rat_to_string(*f.witness_value);
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

int run_validate(const std::string& economy_path, bool human) {
  ordered_json rep = make_report("validate");
  lm::Economy e;
  try {
    std::string bytes = record_input(rep, "economy", economy_path);
    e = lm::economy_from_json_text(bytes);
  } catch (const lm::ParseError& ex) {
    return input_error(rep, ex.what(), human);
  }
  auto issues = lm::validate_economy(e);
  ordered_json list = ordered_json::array();
  std::string text = "economy: " + economy_path + "\n";
  for (const auto& issue : issues) {
    list.push_back(issue.what);
    text += "  - " + issue.what + "\n";
  }
  rep["issues"] = list;
  bool ok = issues.empty();
  text += ok ? "verdict: valid\n" : "verdict: invalid\n";
  return finish(rep, ok ? "valid" : "invalid", ok ? kExitOk : kExitNegative, human, text);
}

// ---------------------------------------------------------------------------
// verify-lde
// ---------------------------------------------------------------------------

int run_verify(const std::string& economy_path, const std::string& allocation_path,
               const std::string& system_path, const std::string& cbp, bool human) {
  ordered_json rep = make_report("verify-lde");
  rep["arguments"]["cbp"] = cbp;
  lm::Economy e;
  lm::Allocation x;
  lm::LexPriceSystem sys;
  try {
    e = lm::economy_from_json_text(record_input(rep, "economy", economy_path));
    x = lm::allocation_from_json_text(record_input(rep, "allocation", allocation_path));
    sys = lm::system_from_json_text(record_input(rep, "system", system_path));
  } catch (const lm::ParseError& ex) {
    return input_error(rep, ex.what(), human);
  }
  auto issues = lm::validate_economy(e);
  if (!issues.empty()) return input_error(rep, "economy invalid: " + issues.front().what, human);
  if (x.rows.size() != e.n() || sys.P.empty() || sys.P[0].size() != e.n())
    return input_error(rep, "allocation/system shapes do not match the economy", human);

  ordered_json checks;
  std::string text;
  bool all_ok = true;
  auto add_check = [&](const char* name, const lm::VerificationReport& r) {
    checks[name] = json_of_verification(r, e);
    all_ok = all_ok && r.ok;
    text += std::string(name) + ": " + (r.ok ? "pass" : "fail") + "\n";
    text += describe_failures(r, e);
  };

  add_check("equilibrium", lm::verify_lde(e, x, sys));
  if (cbp == "strong" || cbp == "all") add_check("strong_cbp", lm::check_strong_cbp(e, x, sys));
  if (cbp == "weak" || cbp == "all") add_check("weak_cbp", lm::check_weak_cbp(e, x, sys));
  if (cbp == "aggregate" || cbp == "all")
    add_check("aggregate_cbp", lm::check_aggregate_cbp(e, x, sys));
  rep["checks"] = checks;

  text += all_ok ? "verdict: pass\n" : "verdict: fail\n";
  return finish(rep, all_ok ? "pass" : "fail", all_ok ? kExitOk : kExitNegative, human, text);
}

// ---------------------------------------------------------------------------
// core
// ---------------------------------------------------------------------------

int run_core(const std::string& economy_path, const std::string& allocation_path,
             const std::string& notion, const std::string& replicas, bool human) {
  ordered_json rep = make_report("core");
  rep["arguments"]["notion"] = notion;
  if (notion == "rejective") rep["arguments"]["replicas"] = replicas;
  lm::Economy e;
  lm::Allocation x;
  try {
    e = lm::economy_from_json_text(record_input(rep, "economy", economy_path));
    x = lm::allocation_from_json_text(record_input(rep, "allocation", allocation_path));
  } catch (const lm::ParseError& ex) {
    return input_error(rep, ex.what(), human);
  }
  auto issues = lm::validate_economy(e);
  if (!issues.empty()) return input_error(rep, "economy invalid: " + issues.front().what, human);
  auto alloc_issues = lm::validate_allocation(e, x);
  if (!alloc_issues.empty())
    return input_error(rep, "allocation invalid: " + alloc_issues.front().what, human);

  bool member = false;
  ordered_json witness;
  std::string text;

  try {
    if (notion == "fpo") {
      lm::FpoResult r = lm::is_fpo(e, x);
      member = r.efficient;
      if (!member && r.dominating) {
        witness["dominating_allocation"] = json_of_mat(r.dominating->rows);
        witness["gains"] = json_of_vec(r.gains);
        text += "dominating allocation found\n";
      }
    } else if (notion == "ir") {
      lm::IrResult r = lm::is_ir(e, x);
      member = r.individually_rational;
      if (!member && r.agent) {
        witness["agent"] = *r.agent;
        witness["agent_name"] = e.agent_names[*r.agent];
        text += "agent " + e.agent_names[*r.agent] + " prefers their endowment\n";
      }
    } else if (notion == "weak" || notion == "strong") {
      // Weak-core membership fails on a strongly blocking coalition (every
      // member strictly better); strong-core membership fails on a weakly
      // blocking one (all weakly better, someone strictly).
      lm::BlockMode mode = notion == "weak" ? lm::BlockMode::strong_blocking
                                            : lm::BlockMode::weak_blocking;
      auto w = lm::block_search(e, x, mode);
      member = !w.has_value();
      if (w) {
        witness = json_of_block_witness(*w, e);
        text += "blocking coalition found (total gain " + lm::rat_to_string(w->total_gain) + ")\n";
      }
    } else if (notion == "stable") {
      lm::StabilityVerdict v = lm::is_stable(e, x);
      member = v.stable;
      if (v.endowment_block) {
        witness["endowment_block"] = json_of_block_witness(*v.endowment_block, e);
        text += "strongly blocking coalition using endowments\n";
      }
      if (v.allocation_block) {
        witness["allocation_block"] = json_of_block_witness(*v.allocation_block, e);
        text += "weakly blocking coalition re-trading the allocation\n";
      }
    } else {  // rejective
      std::optional<unsigned> n_replicas;
      if (replicas != "inf") {
        try {
          unsigned long v = std::stoul(replicas);
          if (v == 0 || v > 1000000) throw std::out_of_range("replicas");
          n_replicas = static_cast<unsigned>(v);
        } catch (const std::exception&) {
          return input_error(rep, "--replicas must be a positive integer or \"inf\"", human);
        }
      }
      lm::RejectVerdict v = lm::reject_search(e, x, n_replicas);
      member = !v.rejected;
      if (v.rejected && v.witness) {
        witness = json_of_coalition_witness(*v.witness, e);
        text += "rejecting coalition found (slack " + lm::rat_to_string(v.witness->slack) + ")\n";
        for (const auto& m : v.witness->members)
          text += "  - agent " + e.agent_names[m.agent] + " brings " +
                  (m.role == lm::RejectRole::endowment ? "endowment" : "allocation") +
                  (m.strict ? " (strictly better off)" : "") + "\n";
      }
    }
  } catch (const lm::InstanceTooLarge& ex) {
    return input_error(rep, ex.what(), human);
  }

  if (!witness.empty()) rep["witness"] = witness;
  text += member ? "verdict: member\n" : "verdict: not-member\n";
  return finish(rep, member ? "member" : "not-member", member ? kExitOk : kExitNegative, human,
                text);
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

bool parse_grid(const std::string& s, int& lo, int& hi) {
  auto pos = s.find("..");
  if (pos == std::string::npos) return false;
  try {
    lo = std::stoi(s.substr(0, pos));
    hi = std::stoi(s.substr(pos + 2));
  } catch (const std::exception&) {
    return false;
  }
  return lo >= 1 && lo <= hi && hi <= 40;
}

int run_solve(const std::string& economy_path, const std::string& out_dir,
              const std::string& eps_grid, double tol, unsigned restarts, std::uint64_t seed,
              long denominator_cap, unsigned threads, bool human) {
  ordered_json rep = make_report("solve");
  rep["arguments"]["eps_grid"] = eps_grid;
  rep["arguments"]["tol"] = tol;
  rep["arguments"]["restarts"] = restarts;
  rep["arguments"]["seed"] = seed;
  rep["arguments"]["denominator_cap"] = denominator_cap;
  rep["arguments"]["threads"] = threads;
  rep["arguments"]["out"] = out_dir;

  lm::Economy e;
  try {
    e = lm::economy_from_json_text(record_input(rep, "economy", economy_path));
  } catch (const lm::ParseError& ex) {
    return input_error(rep, ex.what(), human);
  }
  auto issues = lm::validate_economy(e);
  if (!issues.empty()) return input_error(rep, "economy invalid: " + issues.front().what, human);

  lm::SolverParams params;
  if (!parse_grid(eps_grid, params.grid_min, params.grid_max))
    return input_error(rep, "--eps-grid must look like \"4..16\" with 1 <= a <= b <= 40", human);
  params.residual_tol = tol;
  params.restarts = restarts;
  params.rng_seed = seed;
  params.denominator_cap = denominator_cap;
  params.threads = threads;

  lm::ExtractResult res = lm::extract_lde(e, params);

  ordered_json grid = ordered_json::array();
  for (const auto& s : res.curve) {
    ordered_json g;
    g["t"] = s.t;
    g["converged"] = s.converged;
    grid.push_back(g);
  }
  rep["grid"] = grid;

  ordered_json tiers;
  tiers["count"] = res.tiers.tier_count;
  tiers["surplus_index"] = res.tiers.surplus_index;
  tiers["currencies"] = res.tiers.d;
  ordered_json reps_arr = ordered_json::array();
  for (std::size_t g : res.tiers.representatives) {
    ordered_json r;
    r["good"] = g;
    r["good_name"] = e.goods[g];
    reps_arr.push_back(r);
  }
  tiers["representatives"] = reps_arr;
  tiers["rows"] = json_of_mat(res.tiers.rows);
  tiers["ambiguous"] = res.tiers.ambiguous;
  rep["tiers"] = tiers;
  rep["notes"] = res.notes;

  std::string text;
  if (res.ok) {
    rep["allocation"] = json_of_mat(res.x.rows);
    rep["system"] = json_of_system(res.system);
    rep["verification"] = json_of_verification(res.verification, e);
    rep["strong_cbp"] = json_of_verification(res.strong, e);

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    std::string alloc_path = (std::filesystem::path(out_dir) / "solved.allocation.json").string();
    std::string sys_path = (std::filesystem::path(out_dir) / "solved.system.json").string();
    try {
      lm::save_text(alloc_path, lm::allocation_to_json_text(res.x));
      lm::save_text(sys_path, lm::system_to_json_text(res.system));
    } catch (const std::exception& ex) {
      return input_error(rep, ex.what(), human);
    }
    ordered_json outputs;
    outputs["allocation"] = alloc_path;
    outputs["system"] = sys_path;
    rep["outputs"] = outputs;

    text += "currencies: " + std::to_string(res.system.d()) + "\n";
    text += "prices:\n" + render_table(e.goods, currency_names(res.system.d()), res.system.P);
    text += "dividends:\n" +
            render_table(e.agent_names, currency_names(res.system.d()), res.system.alpha);
    text += "allocation:\n" + render_table(e.goods, e.agent_names, res.x.rows);
    text += "wrote " + alloc_path + " and " + sys_path + "\n";
    text += "verdict: verified\n";
    return finish(rep, "verified", kExitOk, human, text);
  }

  for (const auto& note : res.notes) text += "  - " + note + "\n";
  text += "verdict: inconclusive\n";
  return finish(rep, "inconclusive", kExitInconclusive, human, text);
}

// ---------------------------------------------------------------------------
// certify
// ---------------------------------------------------------------------------

int run_certify(const std::string& economy_path, const std::string& allocation_path,
                const std::string& out_dir, bool human) {
  ordered_json rep = make_report("certify");
  rep["arguments"]["out"] = out_dir;
  lm::Economy e;
  lm::Allocation x;
  try {
    e = lm::economy_from_json_text(record_input(rep, "economy", economy_path));
    x = lm::allocation_from_json_text(record_input(rep, "allocation", allocation_path));
  } catch (const lm::ParseError& ex) {
    return input_error(rep, ex.what(), human);
  }
  auto issues = lm::validate_economy(e);
  if (!issues.empty()) return input_error(rep, "economy invalid: " + issues.front().what, human);
  auto alloc_issues = lm::validate_allocation(e, x);
  if (!alloc_issues.empty())
    return input_error(rep, "allocation invalid: " + alloc_issues.front().what, human);

  lm::CertifyResult res;
  try {
    res = lm::certify(e, x);
  } catch (const lm::InstanceTooLarge& ex) {
    return input_error(rep, ex.what(), human);
  }

  ordered_json rounds = ordered_json::array();
  for (const auto& r : res.rounds) {
    ordered_json rj;
    ordered_json free_names = ordered_json::array();
    for (std::size_t g : r.free_goods) free_names.push_back(e.goods[g]);
    ordered_json funded_names = ordered_json::array();
    for (std::size_t i : r.funded_agents) funded_names.push_back(e.agent_names[i]);
    rj["free_goods"] = free_names;
    rj["funded_agents"] = funded_names;
    rj["price_row"] = json_of_vec(r.price_row);
    rounds.push_back(rj);
  }
  rep["rounds"] = rounds;
  rep["notes"] = res.notes;

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  std::string text;

  if (res.status == lm::CertifyStatus::certified) {
    const lm::LexPriceSystem& sys = *res.system;
    rep["system"] = json_of_system(sys);
    ordered_json checks;
    checks["equilibrium"] = json_of_verification(lm::verify_lde(e, x, sys), e);
    checks["weak_cbp"] = json_of_verification(lm::check_weak_cbp(e, x, sys), e);
    checks["aggregate_cbp"] = json_of_verification(lm::check_aggregate_cbp(e, x, sys), e);
    std::size_t offending = 0;
    checks["simple_prices"] = lm::check_simple_prices(sys, &offending);
    rep["checks"] = checks;

    lm::StrengthenResult st = lm::strengthen(e, x, sys);
    ordered_json stj;
    stj["ok"] = st.ok;
    stj["adjustments"] = json_of_mat(st.adjustments);
    stj["notes"] = st.notes;
    if (st.ok) {
      stj["system"] = json_of_system(*st.strengthened);
      stj["strong_cbp"] =
          json_of_verification(lm::check_strong_cbp(e, x, *st.strengthened), e);
    }
    rep["strengthen"] = stj;

    std::string sys_path = (std::filesystem::path(out_dir) / "certified.system.json").string();
    try {
      lm::save_text(sys_path, lm::system_to_json_text(sys));
      ordered_json outputs;
      outputs["system"] = sys_path;
      if (st.ok) {
        std::string st_path =
            (std::filesystem::path(out_dir) / "strengthened.system.json").string();
        lm::save_text(st_path, lm::system_to_json_text(*st.strengthened));
        outputs["strengthened_system"] = st_path;
      }
      rep["outputs"] = outputs;
    } catch (const std::exception& ex) {
      return input_error(rep, ex.what(), human);
    }

    text += "certified with " + std::to_string(sys.d()) + " currencies\n";
    text += "prices:\n" + render_table(e.goods, currency_names(sys.d()), sys.P);
    text += "dividends:\n" + render_table(e.agent_names, currency_names(sys.d()), sys.alpha);
    text += st.ok ? "strengthened system passes the strong cheapest-bundle check\n"
                  : "strengthening failed (see notes)\n";
    if (!st.ok) {
      text += "verdict: inconclusive\n";
      return finish(rep, "inconclusive", kExitInconclusive, human, text);
    }
    text += "verdict: certified\n";
    return finish(rep, "certified", kExitOk, human, text);
  }

  if (res.status == lm::CertifyStatus::refuted) {
    rep["witness"] = json_of_coalition_witness(*res.witness, e);
    std::string w_path = (std::filesystem::path(out_dir) / "rejection.witness.json").string();
    try {
      lm::save_text(w_path, rep["witness"].dump(2) + "\n");
      ordered_json outputs;
      outputs["witness"] = w_path;
      rep["outputs"] = outputs;
    } catch (const std::exception& ex) {
      return input_error(rep, ex.what(), human);
    }
    text += "rejecting coalition found (slack " + lm::rat_to_string(res.witness->slack) + ")\n";
    for (const auto& m : res.witness->members)
      text += "  - agent " + e.agent_names[m.agent] + " brings " +
              (m.role == lm::RejectRole::endowment ? "endowment" : "allocation") +
              (m.strict ? " (strictly better off)" : "") + "\n";
    text += "verdict: refuted\n";
    return finish(rep, "refuted", kExitNegative, human, text);
  }

  for (const auto& note : res.notes) text += "  - " + note + "\n";
  text += "verdict: inconclusive\n";
  return finish(rep, "inconclusive", kExitInconclusive, human, text);
}

// ---------------------------------------------------------------------------
// decompose
// ---------------------------------------------------------------------------

int run_decompose(const std::string& allocation_path, bool human) {
  ordered_json rep = make_report("decompose");
  lm::Allocation x;
  try {
    x = lm::allocation_from_json_text(record_input(rep, "allocation", allocation_path));
  } catch (const lm::ParseError& ex) {
    return input_error(rep, ex.what(), human);
  }

  std::size_t n = x.rows.size();
  std::vector<std::string> problems;
  for (std::size_t i = 0; i < n; ++i) {
    if (x.rows[i].size() != n) {
      problems.push_back("row " + std::to_string(i) + " has wrong length");
      continue;
    }
    lm::Rat rs(0);
    for (const auto& v : x.rows[i]) {
      if (v < 0) problems.push_back("negative entry in row " + std::to_string(i));
      rs += v;
    }
    if (rs != 1) problems.push_back("row " + std::to_string(i) + " sums to " + lm::rat_to_string(rs));
  }
  if (problems.empty()) {
    for (std::size_t j = 0; j < n; ++j) {
      lm::Rat cs(0);
      for (std::size_t i = 0; i < n; ++i) cs += x.rows[i][j];
      if (cs != 1)
        problems.push_back("column " + std::to_string(j) + " sums to " + lm::rat_to_string(cs));
    }
  }
  if (!problems.empty()) {
    ordered_json list = ordered_json::array();
    std::string text;
    for (const auto& p : problems) {
      list.push_back(p);
      text += "  - " + p + "\n";
    }
    rep["issues"] = list;
    text += "verdict: not-doubly-stochastic\n";
    return finish(rep, "not-doubly-stochastic", kExitNegative, human, text);
  }

  std::vector<lm::BvnTerm> terms;
  try {
    terms = lm::bvn_decompose(x.rows);
  } catch (const lm::InstanceTooLarge& ex) {
    return input_error(rep, ex.what(), human);
  }

  // Reconstruction recheck: the weighted permutation sum must equal the input.
  lm::RatMat sum(n, lm::RatVec(n, lm::Rat(0)));
  lm::Rat total(0);
  for (const auto& term : terms) {
    total += term.weight;
    for (std::size_t i = 0; i < n; ++i) sum[i][term.perm[i]] += term.weight;
  }
  bool exact = total == 1;
  for (std::size_t i = 0; i < n && exact; ++i)
    for (std::size_t j = 0; j < n && exact; ++j) exact = sum[i][j] == x.rows[i][j];

  ordered_json terms_json = ordered_json::array();
  std::string text;
  for (const auto& term : terms) {
    ordered_json tj;
    tj["weight"] = lm::rat_to_string(term.weight);
    tj["assignment"] = term.perm;
    terms_json.push_back(tj);
    text += "  weight " + lm::rat_to_string(term.weight) + ": ";
    for (std::size_t i = 0; i < n; ++i)
      text += std::to_string(i) + "->" + std::to_string(term.perm[i]) + (i + 1 < n ? ", " : "\n");
  }
  rep["terms"] = terms_json;
  rep["term_count"] = terms.size();
  rep["reconstruction"] = exact ? "exact" : "mismatch";

  if (!exact) {
    text += "verdict: reconstruction-mismatch\n";
    return finish(rep, "reconstruction-mismatch", kExitInconclusive, human, text);
  }
  text = "terms: " + std::to_string(terms.size()) + "\n" + text + "verdict: decomposed\n";
  return finish(rep, "decomposed", kExitOk, human, text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Computes, verifies, and certifies lexicographic dividend equilibria "
      "for one-sided matching markets with endowments"};
  app.require_subcommand(1);
  bool human = false;
  app.add_flag("--human", human, "Aligned text output instead of JSON");

  std::string economy_path, allocation_path, system_path;
  std::string cbp = "none";
  std::string notion, replicas = "inf";
  std::string out_dir = ".";
  std::string eps_grid = "4..16";
  double tol = 1e-8;
  unsigned restarts = 8;
  std::uint64_t seed = 1;
  long denominator_cap = 1000000;
  unsigned threads = 0;

  CLI::App* c_validate = app.add_subcommand("validate", "Check an economy file's invariants");
  c_validate->add_option("economy", economy_path, "economy JSON file")->required();

  CLI::App* c_verify =
      app.add_subcommand("verify-lde", "Verify an equilibrium tuple exactly");
  c_verify->add_option("economy", economy_path, "economy JSON file")->required();
  c_verify->add_option("allocation", allocation_path, "allocation JSON file")->required();
  c_verify->add_option("system", system_path, "price-system JSON file")->required();
  c_verify->add_option("--cbp", cbp, "cheapest-bundle checks to add")
      ->check(CLI::IsMember({"none", "strong", "weak", "aggregate", "all"}));

  CLI::App* c_solve = app.add_subcommand("solve", "Compute a verified equilibrium");
  c_solve->add_option("economy", economy_path, "economy JSON file")->required();
  c_solve->add_option("--out", out_dir, "output directory");
  c_solve->add_option("--eps-grid", eps_grid, "perturbation grid exponents a..b");
  c_solve->add_option("--tol", tol, "fixed-point residual tolerance");
  c_solve->add_option("--restarts", restarts, "random restarts per grid point");
  c_solve->add_option("--seed", seed, "random seed");
  c_solve->add_option("--denominator-cap", denominator_cap, "rationalization cap");
  c_solve->add_option("--threads", threads, "worker threads (0 = auto)");

  CLI::App* c_core = app.add_subcommand("core", "Test membership in a core notion");
  c_core->add_option("economy", economy_path, "economy JSON file")->required();
  c_core->add_option("allocation", allocation_path, "allocation JSON file")->required();
  c_core->add_option("--notion", notion, "which membership to test")
      ->required()
      ->check(CLI::IsMember({"fpo", "ir", "weak", "strong", "stable", "rejective"}));
  c_core->add_option("--replicas", replicas, "replica level N or \"inf\"");

  CLI::App* c_certify =
      app.add_subcommand("certify", "Construct prices supporting an allocation or refute it");
  c_certify->add_option("economy", economy_path, "economy JSON file")->required();
  c_certify->add_option("allocation", allocation_path, "allocation JSON file")->required();
  c_certify->add_option("--out", out_dir, "output directory");

  CLI::App* c_decompose =
      app.add_subcommand("decompose", "Write a doubly stochastic matrix as a lottery");
  c_decompose->add_option("allocation", allocation_path, "allocation JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    int code = app.exit(ex);
    return code == 0 ? 0 : kExitInputError;
  }

  auto t0 = std::chrono::steady_clock::now();
  int rc = kExitInputError;
  try {
    if (app.got_subcommand(c_validate)) rc = run_validate(economy_path, human);
    else if (app.got_subcommand(c_verify))
      rc = run_verify(economy_path, allocation_path, system_path, cbp, human);
    else if (app.got_subcommand(c_solve))
      rc = run_solve(economy_path, out_dir, eps_grid, tol, restarts, seed, denominator_cap,
                     threads, human);
    else if (app.got_subcommand(c_core))
      rc = run_core(economy_path, allocation_path, notion, replicas, human);
    else if (app.got_subcommand(c_certify))
      rc = run_certify(economy_path, allocation_path, out_dir, human);
    else if (app.got_subcommand(c_decompose))
      rc = run_decompose(allocation_path, human);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    rc = kExitInputError;
  }
  auto t1 = std::chrono::steady_clock::now();
  std::cerr << "elapsed_ms "
            << std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count() << "\n";
  return rc;
}
