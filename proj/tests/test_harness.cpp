#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "eik/errors.hpp"
#include "eik/harness.hpp"

using namespace eik;
using namespace eik::harness;

namespace {

Config cfg_of(const char* text) { return parse_config(json::parse(text)); }

std::string csv(const SweepReport& r) {
  std::ostringstream os;
  write_csv(r, os);
  return os.str();
}

}  // namespace

TEST(Config, EmptyIsValid) {
  const Config cfg = cfg_of("{}");
  EXPECT_TRUE(cfg.fields.empty());
  const auto rep = run_sweep(cfg);
  EXPECT_TRUE(rep.rows.empty());
  EXPECT_TRUE(rep.ok());
  EXPECT_EQ(csv(rep), "q,type,exps,c,m,a,regime,value_re,value_im,main_re,main_im,bound,slack,pass\n");
  EXPECT_TRUE(verify_identities(cfg).rows.empty());
}

TEST(Config, Fields) {
  const Config cfg = cfg_of(R"({"fields": [9, {"p": 2, "n": 3}, {"q": 5}]})");
  ASSERT_EQ(cfg.fields.size(), 3u);
  EXPECT_EQ(cfg.fields[0].p, 3u);
  EXPECT_EQ(cfg.fields[0].n, 2u);
  EXPECT_EQ(cfg.fields[1].p, 2u);
  EXPECT_EQ(cfg.fields[1].n, 3u);
  EXPECT_EQ(cfg.fields[2].p, 5u);
  EXPECT_EQ(cfg.fields[2].n, 1u);
  // Matching modulus is accepted, a different one is not.
  const auto F4 = field(2, 2);
  FieldSpec ok{2, 2, F4->modulus()};
  EXPECT_EQ(build_field(ok)->q(), 4u);
  FieldSpec bad{2, 2, {1, 1, 0}};
  EXPECT_THROW(build_field(bad), ConfigError);
}

TEST(Config, Rejects) {
  EXPECT_THROW(cfg_of(R"({"fields": [6]})"), ConfigError);
  EXPECT_THROW(cfg_of(R"({"fields": [{"p": 4, "n": 1}]})"), ConfigError);
  EXPECT_THROW(cfg_of(R"({"types": [[1]]})"), ConfigError);
  EXPECT_THROW(cfg_of(R"({"types": [[0, 2]]})"), ConfigError);
  EXPECT_THROW(cfg_of(R"({"bogus": 1})"), ConfigError);
  EXPECT_THROW(cfg_of(R"({"a": "some"})"), ConfigError);
  EXPECT_THROW(cfg_of(R"({"identities": ["nope"]})"), ConfigError);
  EXPECT_THROW(cfg_of(R"({"m": 0})"), ConfigError);
  EXPECT_THROW(cfg_of(R"({"polytope": {"n": [3, 1]}})"), ConfigError);
  EXPECT_THROW(cfg_of("[]"), ConfigError);
  const Config zero = cfg_of(R"({"fields": [3], "types": [[1, 1]], "a": [0]})");
  EXPECT_THROW(run_sweep(zero), ConfigError);
}

TEST(Config, Elements) {
  const auto F = field(3, 2);
  EXPECT_EQ(parse_element(*F, json("g^0")), F->one());
  EXPECT_EQ(parse_element(*F, json("g^9")), F->gen());
  EXPECT_EQ(parse_element(*F, json(1)), F->one());
  EXPECT_EQ(parse_element(*F, json("2")), F->from_int(2));
  EXPECT_THROW(parse_element(*F, json(9)), ConfigError);
  EXPECT_THROW(parse_element(*F, json("g^x")), ConfigError);
  EXPECT_EQ(format_element(*F, F->from_int(7)), "7");

  ElementSet all;
  EXPECT_EQ(all.resolve(*F).size(), 8u);
  ElementSet not_one{"not_one", {}};
  EXPECT_EQ(not_one.resolve(*F).size(), 7u);
  ElementSet normalized{"normalized", {}};
  const auto fp = normalized.resolve(*F);
  ASSERT_EQ(fp.size(), 2u);
  for (Elt c : fp) EXPECT_EQ(F->frobenius(c, 1), c);
}

TEST(Config, Budget) {
  const Config cfg = cfg_of(R"({"fields": [7], "types": [[1, 1, 1]], "budget": 1000})");
  EXPECT_THROW(run_sweep(cfg), BudgetError);
  EXPECT_THROW(verify_identities(cfg), BudgetError);
}

TEST(Sweep, TameQ3) {
  const auto rep = run_sweep(cfg_of(R"({"fields": [3], "types": [[1, 1], [2]]})"));
  // [1,1]: 4 characters, [2]: 8; two values each of c and a.
  EXPECT_EQ(rep.rows.size(), (4u + 8u) * 2 * 2);
  EXPECT_EQ(rep.failed, 0u);
  EXPECT_EQ(rep.skipped, 0u);
  for (const auto& row : rep.rows) {
    EXPECT_EQ(row.regime, "tame");
    ASSERT_TRUE(row.bound);
    EXPECT_DOUBLE_EQ(*row.bound, 4 * std::sqrt(3.0));
    EXPECT_GE(*row.slack, -kBoundTolerance);
  }
}

TEST(Sweep, WildQ4) {
  const auto rep = run_sweep(cfg_of(R"({"fields": [4], "types": [[1, 1]], "a": "not_one", "c": "normalized"})"));
  EXPECT_EQ(rep.rows.size(), 9u * 1 * 2);
  EXPECT_EQ(rep.failed, 0u);
  for (const auto& row : rep.rows) {
    EXPECT_EQ(row.regime, "wild");
    EXPECT_DOUBLE_EQ(*row.bound, 2 * std::sqrt(4.0));
    EXPECT_EQ(row.pass, "true");
  }
}

TEST(Sweep, RegimeClassification) {
  const auto rep = run_sweep(cfg_of(R"({"fields": [4], "types": [[1, 1]]})"));
  std::set<std::string> regimes;
  for (const auto& row : rep.rows) {
    regimes.insert(row.regime);
    if (row.regime == "wild-exceptional") EXPECT_EQ(row.a, "1");
    if (row.regime == "wild-unnormalized") EXPECT_NE(row.c, "1");
    if (row.pass == "skip") EXPECT_FALSE(row.bound);
  }
  EXPECT_EQ(regimes, (std::set<std::string>{"wild", "wild-exceptional", "wild-unnormalized"}));
  EXPECT_EQ(rep.failed, 0u);
}

TEST(Sweep, ExplicitCharacters) {
  const auto rep =
      run_sweep(cfg_of(R"({"fields": [5], "types": [[1, 1], [2]], "characters": [[1, 3]], "a": [1, "g^1"], "c": [1]})"));
  // The tuple only fits the two-factor type.
  ASSERT_EQ(rep.rows.size(), 2u);
  for (const auto& row : rep.rows) EXPECT_EQ(row.exps, "1;3");
}

TEST(Sweep, Extended) {
  const auto rep = run_sweep(cfg_of(R"({"fields": [3], "types": [[1, 1], [2]], "m": [2]})"));
  EXPECT_EQ(rep.rows.size(), (4u + 8u) * 2 * 8);
  EXPECT_EQ(rep.failed, 0u);
  for (const auto& row : rep.rows) {
    EXPECT_EQ(row.m, 2u);
    EXPECT_DOUBLE_EQ(*row.bound, 4 * 3.0);
  }
}

TEST(Sweep, Deterministic) {
  const Config cfg = cfg_of(R"({"fields": [3, 4, 5], "types": [[1, 1], [2], [1, 1, 1]]})");
  const auto one = run_sweep(cfg, 1), four = run_sweep(cfg, 4);
  EXPECT_EQ(csv(one), csv(four));
  EXPECT_EQ(to_json(one).dump(), to_json(four).dump());
}

TEST(Verify, AllIdentitiesSmall) {
  const char* types = R"("types": [[1, 1], [2], [1, 1, 1], [1, 2], [3]])";
  auto rep = verify_identities(cfg_of((std::string(R"({"fields": [2, 3, 4], "m": [1, 2], )") + types + "}").c_str()), 4);
  const auto q5 = verify_identities(cfg_of((std::string(R"({"fields": [5], )") + types + "}").c_str()), 4);
  rep.rows.insert(rep.rows.end(), q5.rows.begin(), q5.rows.end());
  rep.failed += q5.failed;
  EXPECT_EQ(rep.failed, 0u);
  std::set<std::string> seen;
  for (const auto& row : rep.rows) {
    seen.insert(row.identity);
    EXPECT_TRUE(row.pass) << row.identity << " " << row.instance << ": " << row.detail;
    EXPECT_GT(row.checks, 0u);
  }
  for (const auto& name : identity_names()) EXPECT_TRUE(seen.count(name)) << name;
}

TEST(Verify, Selection) {
  const auto rep = verify_identities(cfg_of(R"({"fields": [3], "types": [[1, 1]], "identities": ["split_toric"]})"));
  ASSERT_EQ(rep.rows.size(), 4u);
  for (const auto& row : rep.rows) EXPECT_EQ(row.identity, "split_toric");
}

TEST(Verify, TwistAllB) {
  const auto rep = verify_identities(cfg_of(R"({"fields": [7], "types": [[1, 1], [2]], "identities": ["twist"]})"));
  EXPECT_EQ(rep.failed, 0u);
  // 6 values each of c, a and b.
  for (const auto& row : rep.rows) EXPECT_EQ(row.checks, 6u * 6 * 6);
}

TEST(Polytope, SpecRows) {
  PolytopeConfig pc;
  pc.n_min = 1, pc.n_max = 3, pc.m_min = 1, pc.m_max = 2;
  pc.fields = {{3, 1, {}}, {2, 2, {}}, {5, 1, {}}};
  const auto rep = polytope_report(pc, 3, 2);
  ASSERT_EQ(rep.rows.size(), 6u);
  EXPECT_TRUE(rep.ok());
  auto row = [&](std::uint32_t n, std::uint32_t m) -> const PolytopeRow& {
    for (const auto& r : rep.rows)
      if (r.n == n && r.m == m) return r;
    throw std::logic_error("missing row");
  };
  const auto& r11 = row(1, 1);
  EXPECT_EQ(r11.facet_count, 1u);
  EXPECT_EQ(r11.volume, 2);
  EXPECT_EQ(r11.exceptional, "1");
  for (const auto& fc : r11.fields) {
    ASSERT_TRUE(fc.exceptional);
    EXPECT_EQ(fc.degenerate, std::vector<std::string>{"1"});
  }
  const auto& r22 = row(2, 2);
  EXPECT_EQ(r22.facet_count, 2u);
  EXPECT_EQ(r22.volume, 4);
  std::multiset<std::int64_t> dets;
  for (const auto& f : r22.facets) dets.insert(f.determinant.value());
  EXPECT_EQ(dets, (std::multiset<std::int64_t>{-2, 2}));
  const auto& r31 = row(3, 1);
  EXPECT_EQ(r31.facet_count, 4u);
  EXPECT_EQ(r31.volume, 4);
  EXPECT_EQ(r31.exceptional, "");
  // (3, 2) has n+1 = 2m; the exceptional value is 1/2^4.
  EXPECT_EQ(row(3, 2).exceptional, "1/16");
  for (const auto& fc : row(3, 2).fields) {
    if (fc.q % 2 == 0) {
      EXPECT_TRUE(fc.skipped);
      continue;
    }
    EXPECT_EQ(fc.degenerate.size(), 1u);
    EXPECT_TRUE(fc.search_confirms);
  }

  std::ostringstream a, b;
  write_csv(rep, a);
  write_csv(polytope_report(pc, 3, 1), b);
  EXPECT_EQ(a.str(), b.str());
}

TEST(Writers, JsonShape) {
  const auto rep = run_sweep(cfg_of(R"({"fields": [4], "types": [[1, 1]], "characters": [[0, 0]], "a": [1], "c": [1]})"));
  const json j = to_json(rep);
  ASSERT_EQ(j["rows"].size(), 1u);
  const auto& row = j["rows"][0];
  EXPECT_EQ(row["regime"], "wild-exceptional");
  EXPECT_TRUE(row["bound"].is_null());
  EXPECT_EQ(row["pass"], "skip");
  EXPECT_EQ(j["summary"]["skipped"], 1);
}
