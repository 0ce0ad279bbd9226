#include "lexmarket/json_io.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace lexmarket {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json rat_row_to_json(const RatVec& row) {
  ordered_json arr = ordered_json::array();
  for (const Rat& v : row) arr.push_back(rat_to_string(v));
  return arr;
}

ordered_json rat_mat_to_json(const RatMat& mat) {
  ordered_json arr = ordered_json::array();
  for (const RatVec& row : mat) arr.push_back(rat_row_to_json(row));
  return arr;
}

Rat rat_from_json(const ordered_json& v, const std::string& where) {
  try {
    if (v.is_string()) return rat_from_string(v.get<std::string>());
    if (v.is_number_integer()) return Rat(static_cast<long>(v.get<std::int64_t>()));
  } catch (const std::exception& ex) {
    throw ParseError(where + ": " + ex.what());
  }
  throw ParseError(where + ": expected a rational string or integer, got " + v.dump());
}

RatVec rat_row_from_json(const ordered_json& v, const std::string& where) {
  if (!v.is_array()) throw ParseError(where + ": expected an array");
  RatVec row;
  row.reserve(v.size());
  for (std::size_t j = 0; j < v.size(); ++j)
    row.push_back(rat_from_json(v[j], where + "[" + std::to_string(j) + "]"));
  return row;
}

RatMat rat_mat_from_json(const ordered_json& v, const std::string& where) {
  if (!v.is_array()) throw ParseError(where + ": expected an array of arrays");
  RatMat mat;
  mat.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    mat.push_back(rat_row_from_json(v[i], where + "[" + std::to_string(i) + "]"));
    if (mat.back().size() != mat.front().size())
      throw ParseError(where + ": rows have unequal lengths");
  }
  return mat;
}

ordered_json parse_document(const std::string& text) {
  try {
    return ordered_json::parse(text);
  } catch (const std::exception& ex) {
    throw ParseError(std::string("invalid JSON: ") + ex.what());
  }
}

const ordered_json& require_key(const ordered_json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw ParseError(std::string("missing key \"") + key + "\"");
  return *it;
}

std::string dump_canonical(const ordered_json& doc) { return doc.dump(2) + "\n"; }

std::vector<std::string> string_list_from_json(const ordered_json& v, const std::string& where) {
  if (!v.is_array()) throw ParseError(where + ": expected an array of strings");
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const auto& item : v) {
    if (!item.is_string()) throw ParseError(where + ": expected strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

}  // namespace

std::string economy_to_json_text(const Economy& e) {
  ordered_json doc;
  doc["goods"] = e.goods;
  doc["agents"] = e.agent_names;
  doc["utilities"] = rat_mat_to_json(e.u);
  doc["endowments"] = rat_mat_to_json(e.omega);
  return dump_canonical(doc);
}

std::string allocation_to_json_text(const Allocation& x) {
  ordered_json doc;
  doc["rows"] = rat_mat_to_json(x.rows);
  return dump_canonical(doc);
}

std::string system_to_json_text(const LexPriceSystem& sys) {
  ordered_json doc;
  doc["prices"] = rat_mat_to_json(sys.P);
  doc["dividends"] = rat_mat_to_json(sys.alpha);
  return dump_canonical(doc);
}

Economy economy_from_json_text(const std::string& text) {
  ordered_json doc = parse_document(text);
  Economy e;
  e.goods = string_list_from_json(require_key(doc, "goods"), "goods");
  e.agent_names = string_list_from_json(require_key(doc, "agents"), "agents");
  e.u = rat_mat_from_json(require_key(doc, "utilities"), "utilities");
  e.omega = rat_mat_from_json(require_key(doc, "endowments"), "endowments");
  return e;
}

Allocation allocation_from_json_text(const std::string& text) {
  ordered_json doc = parse_document(text);
  Allocation x;
  x.rows = rat_mat_from_json(require_key(doc, "rows"), "rows");
  return x;
}

LexPriceSystem system_from_json_text(const std::string& text) {
  ordered_json doc = parse_document(text);
  LexPriceSystem sys;
  sys.P = rat_mat_from_json(require_key(doc, "prices"), "prices");
  sys.alpha = rat_mat_from_json(require_key(doc, "dividends"), "dividends");
  if (sys.P.size() != sys.alpha.size())
    throw ParseError("prices and dividends must have the same number of rows");
  return sys;
}

std::string load_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void save_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

Economy load_economy(const std::string& path) {
  try {
    return economy_from_json_text(load_text(path));
  } catch (const ParseError& ex) {
    throw ParseError(path + ": " + ex.what());
  }
}

Allocation load_allocation(const std::string& path) {
  try {
    return allocation_from_json_text(load_text(path));
  } catch (const ParseError& ex) {
    throw ParseError(path + ": " + ex.what());
  }
}

LexPriceSystem load_system(const std::string& path) {
  try {
    return system_from_json_text(load_text(path));
  } catch (const ParseError& ex) {
    throw ParseError(path + ": " + ex.what());
  }
}

std::string content_digest(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  static const char* hex = "0123456789abcdef";
  std::string out = "fnv1a64:";
  for (int shift = 60; shift >= 0; shift -= 4) out.push_back(hex[(h >> shift) & 0xF]);
  return out;
}

}  // namespace lexmarket
