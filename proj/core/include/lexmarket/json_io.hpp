#pragma once

#include <stdexcept>
#include <string>

#include "lexmarket/economy.hpp"
#include "lexmarket/lde.hpp"

namespace lexmarket {

// Raised by every *_from_json_text / load_* helper on malformed input:
// syntax errors, missing keys, shape mismatches, bad rational literals.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// All serializers emit two-space-indented JSON with keys in a fixed order
// and rationals as canonical strings ("3", "-1/2"), terminated by a single
// newline, so identical values always produce identical bytes.
std::string economy_to_json_text(const Economy& e);
std::string allocation_to_json_text(const Allocation& x);
std::string system_to_json_text(const LexPriceSystem& sys);

// Parsers accept rationals either as canonical strings or as JSON integers.
Economy economy_from_json_text(const std::string& text);
Allocation allocation_from_json_text(const std::string& text);
LexPriceSystem system_from_json_text(const std::string& text);

// File helpers. Loaders throw ParseError (file missing/unreadable counts as
// a parse failure); save_text overwrites atomically-enough for a CLI (write
// then flush) and throws std::runtime_error on I/O failure.
std::string load_text(const std::string& path);
void save_text(const std::string& path, const std::string& content);
Economy load_economy(const std::string& path);
Allocation load_allocation(const std::string& path);
LexPriceSystem load_system(const std::string& path);

// 64-bit FNV-1a over the raw bytes, rendered "fnv1a64:<16 hex digits>".
// Used to stamp input files into machine-readable run reports.
std::string content_digest(const std::string& bytes);

}  // namespace lexmarket
