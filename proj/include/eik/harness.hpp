#pragma once

// Sweep orchestration: configuration, bound checks, identity verification,
// the polytope report and CSV / JSON writers.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "eik/characters.hpp"
#include "eik/etale.hpp"
#include "eik/polytope.hpp"
#include "json.hpp"

namespace eik::harness {

using nlohmann::json;

inline constexpr std::uint64_t kDefaultCellBudget = 100'000'000;
inline constexpr double kBoundTolerance = 1e-6;

struct FieldSpec {
  std::uint32_t p = 0, n = 0;
  std::vector<std::uint32_t> modulus;  // optional; checked against the built field
};

// Selects field elements: "all" units, "not_one", "normalized" (F_p*), or an
// explicit list. List items are integer codes (coefficients base p) or "g^k".
struct ElementSet {
  std::string mode = "all";
  std::vector<json> items;

  std::vector<Elt> resolve(const FieldTable& F) const;
};

struct PolytopeConfig {
  std::uint32_t n_min = 1, n_max = 6;
  std::uint32_t m_min = 1, m_max = 4;
  std::vector<FieldSpec> fields;
};

struct Config {
  std::vector<FieldSpec> fields;
  std::vector<std::vector<std::uint32_t>> types;
  std::optional<std::vector<std::vector<std::int64_t>>> characters;  // nullopt: every character
  ElementSet c, a, b;
  std::vector<std::uint32_t> m{1};
  std::uint64_t budget = kDefaultCellBudget;
  std::vector<std::string> identities;  // empty: all of them
  std::optional<PolytopeConfig> polytope;
  std::uint32_t depth = kDefaultDepth;
};

// Throws ConfigError on anything malformed.
Config parse_config(const json& j);
Config load_config(const std::string& path);
FieldPtr build_field(const FieldSpec& spec);
Elt parse_element(const FieldTable& F, const json& v);
std::string format_element(const FieldTable& F, Elt x);

const std::vector<std::string>& identity_names();

// Which bound applies to EIK over F_{q^m} for this (B, psi, a).
struct Regime {
  std::string name;  // tame, wild, wild-exceptional, wild-unnormalized
  std::optional<double> bound;
};
Regime classify(const EtaleAlgebra& B, const AddChar& psi, std::uint32_t m, const FieldTable& Fm, Elt a);

struct SweepRow {
  std::uint32_t q = 0;
  std::string type, exps;
  std::string c, a;
  std::uint32_t m = 1;
  std::string regime;
  double value_re = 0, value_im = 0, main_re = 0, main_im = 0;
  std::optional<double> bound;
  std::optional<double> slack;
  std::string pass;  // true, false, skip
  std::string value_exact, main_exact;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  std::size_t passed = 0, failed = 0, skipped = 0;
  bool ok() const { return failed == 0; }
};

// Throws BudgetError when a cell's |B*| q^2 estimate exceeds the budget.
SweepReport run_sweep(const Config& cfg, unsigned jobs = 1);

struct IdentityRow {
  std::string identity, instance;
  std::uint64_t checks = 0;
  bool pass = true;
  std::string detail;  // first failing sub-instance
};

struct IdentityReport {
  std::vector<IdentityRow> rows;
  std::size_t passed = 0, failed = 0;
  bool ok() const { return failed == 0; }
};

IdentityReport verify_identities(const Config& cfg, unsigned jobs = 1);

struct FacetInfo {
  std::vector<std::int64_t> normal;
  std::int64_t offset = 0;
  std::string equation;
  std::vector<std::size_t> monomials;
  std::optional<std::int64_t> determinant;
};

struct FieldCheck {
  std::uint32_t q = 0;
  bool skipped = false;  // p | m
  std::optional<std::string> exceptional;
  std::vector<std::string> degenerate, undetermined;
  std::uint32_t faces = 0, by_rank = 0, by_closed_form = 0, by_search = 0;
  bool search_confirms = true;  // kernel search at depth <= 2 agrees on the full facet
  bool pass = true;
};

struct PolytopeRow {
  std::uint32_t n = 0, m = 0;
  std::string regime;
  std::size_t facet_count = 0, expected_facet_count = 0;
  std::int64_t volume = 0, expected_volume = 0;
  std::string exceptional;  // "1/m^(n+1)" as an exact rational, regime n+1=2m only
  std::vector<FacetInfo> facets;
  std::vector<FieldCheck> fields;
  bool determinants_ok = true;
  bool pass = true;
};

struct PolytopeReport {
  std::vector<PolytopeRow> rows;
  bool ok() const;
};

PolytopeReport polytope_report(const PolytopeConfig& cfg, std::uint32_t depth = kDefaultDepth, unsigned jobs = 1);

void write_csv(const SweepReport& r, std::ostream& os);
void write_csv(const IdentityReport& r, std::ostream& os);
void write_csv(const PolytopeReport& r, std::ostream& os);
json to_json(const SweepReport& r);
json to_json(const IdentityReport& r);
json to_json(const PolytopeReport& r);

}  // namespace eik::harness
