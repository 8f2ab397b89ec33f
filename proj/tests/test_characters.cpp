#include <gtest/gtest.h>

#include <cmath>

#include "eik/characters.hpp"
#include "oracle.hpp"

using namespace eik;

namespace {

AlgebraPtr algebra(std::uint32_t p, std::uint32_t n0, std::vector<std::uint32_t> type) {
  return std::make_shared<const EtaleAlgebra>(EtaleAlgebra::make(p, n0, std::move(type)));
}

MultChar chi_of(const AlgebraPtr& B, std::vector<std::int64_t> e) { return MultChar(B, e); }

// sum_{x in B*} chi(x), exact, through an exponent histogram.
Cyclotomic unit_sum(const MultChar& chi) {
  const std::uint64_t N = chi.conductor();
  const auto w = chi.log_weights(N);
  std::vector<std::int64_t> counts(N, 0);
  chi.algebra().for_each_unit([&](std::span<const Elt> x) {
    std::uint64_t e = 0;
    for (std::size_t i = 0; i < x.size(); ++i) e = (e + w[i] * x[i].log()) % N;
    ++counts[e];
  });
  return Cyclotomic::from_exponent_counts(N, counts);
}

}  // namespace

TEST(AddChar, SpecExamples) {
  auto F3 = field(3, 1);
  AddChar psi(F3, F3->one());
  EXPECT_EQ(psi.eval(F3->one()), Cyclotomic::root_of_unity(3, 1));
  EXPECT_EQ(psi.eval(Elt::zero()), Cyclotomic::integer(1));
  Cyclotomic s;
  for (std::uint64_t t = 0; t < 3; ++t) s += psi.eval(F3->from_int(t));
  EXPECT_TRUE(s.is_zero());

  auto F4 = field(2, 2);
  AddChar psi4(F4, F4->one());
  EXPECT_EQ(psi4.eval(F4->gen()), Cyclotomic::integer(-1));
  EXPECT_THROW(AddChar(F4, Elt::zero()), std::invalid_argument);
}

TEST(AddChar, HomomorphismAndOracle) {
  for (auto [p, n] : std::vector<std::pair<std::uint32_t, std::uint32_t>>{{2, 3}, {3, 2}, {5, 1}, {2, 4}, {7, 1}}) {
    auto F = field(p, n);
    for (std::uint32_t lc = 0; lc < F->order(); ++lc) {
      AddChar psi(F, Elt::from_log(lc));
      Cyclotomic total;
      for (std::uint64_t a = 0; a < F->q(); ++a) {
        const Elt x = F->from_int(a);
        total += psi.eval(x);
        EXPECT_NEAR(std::abs(psi.eval(x).to_complex() - oracle::psi(*F, psi.c(), x)), 0.0, 1e-12);
        for (std::uint64_t b = 0; b < F->q(); b += 2) {
          const Elt y = F->from_int(b);
          ASSERT_EQ(psi.eval(F->add(x, y)), psi.eval(x) * psi.eval(y));
        }
      }
      EXPECT_TRUE(total.is_zero());
      EXPECT_EQ(psi.conj().eval(F->gen()), psi.eval(F->gen()).conj());
      EXPECT_EQ(psi.is_normalized(), F->frobenius(psi.c(), 1) == psi.c());
    }
  }
}

TEST(AddChar, ExtendIsPsiOfTrace) {
  auto F = field(3, 1), M = field(3, 2);
  const Embedding e = make_embedding(F, M);
  AddChar psi(F, F->from_int(2));
  const AddChar ext = psi.extend(e);
  for (std::uint64_t a = 0; a < M->q(); ++a) {
    const Elt x = M->from_int(a);
    EXPECT_EQ(ext.eval(x), psi.eval(e.trace(x)));
  }
}

TEST(MultChar, SpecExamples) {
  auto B = algebra(3, 1, {1, 1});
  const std::vector<Elt> x22{B->factor(0).from_int(2), B->factor(1).from_int(2)};
  EXPECT_EQ(MultChar::trivial(B).eval(x22), Cyclotomic::integer(1));
  EXPECT_EQ(chi_of(B, {1, 1}).eval(x22), Cyclotomic::integer(1));
  EXPECT_EQ(chi_of(B, {1, 0}).eval(x22), Cyclotomic::integer(-1));
  EXPECT_TRUE(unit_sum(chi_of(B, {1, 0})).is_zero());
  EXPECT_THROW(chi_of(B, {1, 0}).eval(std::vector<Elt>{Elt::zero(), Elt::from_log(0)}), std::domain_error);
  EXPECT_THROW(chi_of(B, {1}), std::invalid_argument);
}

namespace {
struct AlgCase {
  std::uint32_t p, n0;
  std::vector<std::uint32_t> type;
};
const std::vector<AlgCase> kOrthoCases = {
    {2, 1, {1, 1}}, {2, 1, {2, 2}}, {2, 1, {3, 3}}, {2, 1, {6}},    {2, 1, {4, 4}}, {2, 1, {8}},
    {2, 1, {2, 3}}, {3, 1, {1, 1}}, {3, 1, {2, 2}}, {3, 1, {1, 3}}, {3, 1, {4}},    {3, 1, {2, 3}},
    {3, 1, {3, 3}}, {5, 1, {1, 1, 1}}, {5, 1, {2, 2}}, {5, 1, {3}}, {7, 1, {1, 1, 1}}, {7, 1, {2, 1}},
    {7, 1, {3}},    {2, 2, {1, 1}}, {2, 2, {2, 1}}, {2, 2, {3}},    {3, 2, {1, 1}}, {3, 2, {2}},
    {2, 3, {2}},    {2, 3, {1, 1, 1}}};
}  // namespace

// Exact orthogonality for every nontrivial character, |B*| <= 2^12.
TEST(MultChar, OrthogonalityExact) {
  for (const auto& c : kOrthoCases) {
    auto B = algebra(c.p, c.n0, c.type);
    ASSERT_LE(B->unit_count(), 4096u);
    for (const auto& chi : MultChar::all(B)) {
      const auto s = unit_sum(chi);
      if (chi.is_trivial())
        EXPECT_EQ(s, Cyclotomic::integer(static_cast<std::int64_t>(B->unit_count())));
      else
        ASSERT_TRUE(s.is_zero()) << "type " << B->type_string();
    }
  }
}

TEST(MultChar, HomomorphismConjugationAndOracle) {
  for (const auto& c : std::vector<AlgCase>{{3, 1, {1, 2}}, {2, 1, {2, 1}}, {5, 1, {2}}, {2, 2, {1, 2}}}) {
    auto B = algebra(c.p, c.n0, c.type);
    for (const auto& chi : MultChar::all(B)) {
      std::vector<std::int64_t> e(chi.exps().begin(), chi.exps().end());
      oracle::for_all_units(*B, [&](const std::vector<Elt>& x) {
        const auto v = chi.eval(x);
        ASSERT_EQ(chi.conj().eval(x), v.conj());
        ASSERT_NEAR(std::abs(v.to_complex() - oracle::chi(*B, e, x)), 0.0, 1e-12);
      });
      std::vector<Elt> g;
      for (std::size_t i = 0; i < B->factor_count(); ++i) g.push_back(B->factor(i).gen());
      const AlgebraElement gg = B->multiply(AlgebraElement{g}, AlgebraElement{g});
      EXPECT_EQ(chi.eval(gg), chi.eval(g) * chi.eval(g));
    }
  }
}

// Gauss sums of nontrivial chi_0 have modulus sqrt(q).
TEST(MultChar, GaussSumModulus) {
  for (auto [p, n] : std::vector<std::pair<std::uint32_t, std::uint32_t>>{{3, 1}, {2, 2}, {5, 1}, {7, 1}, {2, 3}, {3, 2}}) {
    auto F = field(p, n);
    for (std::uint32_t lc = 0; lc < F->order(); ++lc) {
      AddChar psi(F, Elt::from_log(lc));
      for (std::uint64_t e0 = 1; e0 < F->order(); ++e0) {
        Cyclotomic g;
        for (std::uint32_t l = 0; l < F->order(); ++l)
          g += eval_base_char(*F, e0, Elt::from_log(l)) * psi.eval(Elt::from_log(l));
        const auto a = g.abs();
        EXPECT_NEAR(a.value, std::sqrt(static_cast<double>(F->q())), 1e-9 + a.error);
        // |g|^2 = q exactly.
        EXPECT_EQ(g * g.conj(), Cyclotomic::integer(F->q()));
      }
    }
  }
}

TEST(NormInduced, SpecExamples) {
  auto B = algebra(3, 1, {1, 1});
  EXPECT_EQ(is_norm_induced(chi_of(B, {1, 1})), std::optional<std::uint64_t>(1));
  EXPECT_EQ(is_norm_induced(chi_of(B, {1, 0})), std::nullopt);
  EXPECT_EQ(is_norm_induced(MultChar::trivial(B)), std::optional<std::uint64_t>(0));
}

// is_norm_induced agrees with triviality on N^{-1}(1), and when it succeeds
// chi = chi_0 o N on every unit.
TEST(NormInduced, MatchesExhaustiveKernelTest) {
  for (const auto& c : std::vector<AlgCase>{{2, 1, {1, 1}}, {2, 1, {2, 1}}, {2, 1, {3}}, {3, 1, {1, 1}},
                                            {3, 1, {2}}, {3, 1, {1, 2}}, {3, 1, {1, 1, 1}}, {3, 1, {3}},
                                            {5, 1, {1, 1}}, {5, 1, {2}}, {2, 2, {1, 1}}, {2, 2, {2}},
                                            {7, 1, {1, 2}}, {2, 1, {2, 2}}, {3, 2, {1, 1}}}) {
    auto B = algebra(c.p, c.n0, c.type);
    const FieldTable& F = B->base();
    const auto kernel = B->enumerate(Filter::norm_fiber(F.one()));
    for (const auto& chi : MultChar::all(B)) {
      bool trivial_on_kernel = true;
      for (const auto& x : kernel) trivial_on_kernel = trivial_on_kernel && chi.eval(x) == Cyclotomic::integer(1);
      const auto e0 = is_norm_induced(chi);
      ASSERT_EQ(e0.has_value(), trivial_on_kernel) << "type " << B->type_string();
      if (e0) {
        oracle::for_all_units(*B, [&](const std::vector<Elt>& x) {
          ASSERT_EQ(chi.eval(x), eval_base_char(F, *e0, B->norm(x)));
        });
      }
    }
  }
}

// descend_char(chi) agrees with chi o descent pointwise.
TEST(Descend, PointwiseOnSmallAlgebras) {
  for (const auto& [c, m] : std::vector<std::pair<AlgCase, std::uint32_t>>{
           {{2, 1, {2}}, 2}, {{2, 1, {1, 1}}, 2}, {{2, 1, {1, 2}}, 2}, {{3, 1, {1, 1}}, 2},
           {{3, 1, {2}}, 2}, {{2, 1, {3}}, 3}, {{2, 1, {2}}, 3}, {{2, 1, {4}}, 2}, {{3, 1, {1, 2}}, 1}}) {
    auto B = algebra(c.p, c.n0, c.type);
    const BaseChange bc = base_change(*B, m);
    for (const auto& chi : MultChar::all(B)) {
      const MultChar chi2 = descend_char(chi, bc);
      oracle::for_all_units(*bc.algebra, [&](const std::vector<Elt>& y) {
        ASSERT_EQ(chi2.eval(y), chi.eval(bc.descent.apply(AlgebraElement{y})));
      });
    }
  }
}

TEST(Descend, SpecExamples) {
  auto B = algebra(2, 1, {1, 1});
  const BaseChange bc = base_change(*B, 2);
  EXPECT_TRUE(descend_char(MultChar::trivial(B), bc).is_trivial());

  auto B4 = algebra(2, 1, {2});
  const BaseChange bc4 = base_change(*B4, 1);
  const MultChar chi = chi_of(B4, {1});
  EXPECT_EQ(descend_char(chi, bc4).exps(), chi.exps());

  const BaseChange bc42 = base_change(*B4, 2);
  const MultChar chi2 = descend_char(chi, bc42);
  ASSERT_EQ(chi2.exps().size(), 2u);
  int units = 0;
  oracle::for_all_units(*bc42.algebra, [&](const std::vector<Elt>& y) {
    ++units;
    EXPECT_EQ(chi2.eval(y), chi.eval(bc42.descent.apply(AlgebraElement{y})));
  });
  EXPECT_EQ(units, 9);

  auto other = algebra(3, 1, {1, 1});
  EXPECT_THROW(descend_char(MultChar::trivial(other), bc42), std::invalid_argument);
}
