#include "eik/sums.hpp"

#include <numeric>
#include <stdexcept>

#include "eik/numtheory.hpp"

namespace eik {

namespace {

void check_compatible(const MultChar& chi, const AddChar& psi) {
  const FieldTable& F = chi.algebra().base();
  if (psi.base().p() != F.p() || psi.base().n() != F.n())
    throw std::invalid_argument("sums: psi and chi live over different base fields");
}

void check_unit(Elt a) {
  if (a.is_zero()) throw std::domain_error("sums: a must lie in F_q*");
}

// Histogram of zeta_N exponents for the values chi(x) psi(t).
struct Accumulator {
  std::uint64_t N;
  std::uint64_t psi_step;
  std::vector<std::uint64_t> weights;
  std::vector<std::int64_t> counts;

  Accumulator(const MultChar& chi, std::uint32_t p)
      : N(std::lcm<std::uint64_t>(p, chi.conductor())), psi_step(N / p), weights(chi.log_weights(N)), counts(N, 0) {}

  std::uint64_t chi_exp(std::span<const Elt> x) const {
    std::uint64_t e = 0;
    for (std::size_t i = 0; i < x.size(); ++i) e += weights[i] * x[i].log() % N;
    return e % N;
  }
  void add(std::uint64_t e, std::uint32_t psi_index) { ++counts[(e + psi_step * psi_index) % N]; }
  Cyclotomic value() const { return Cyclotomic::from_exponent_counts(N, counts); }
};

}  // namespace

Cyclotomic ek_sum(const MultChar& chi, const AddChar& psi, Elt a) {
  check_compatible(chi, psi);
  check_unit(a);
  const EtaleAlgebra& B = chi.algebra();
  Accumulator acc(chi, psi.p());
  B.for_each_in_fiber(a, [&](std::span<const Elt> x) { acc.add(acc.chi_exp(x), psi.index(B.trace(x))); });
  return acc.value();
}

Cyclotomic eik_sum(const MultChar& chi, const AddChar& psi, Elt a) {
  check_compatible(chi, psi);
  check_unit(a);
  const EtaleAlgebra& B = chi.algebra();
  const FieldTable& F = B.base();
  Accumulator acc(chi, psi.p());
  B.for_each_in_fiber(a, [&](std::span<const Elt> x) {
    const Elt t = B.trace(x);
    if (t.is_zero()) return;
    acc.add(acc.chi_exp(x), psi.index(F.inv(t)));
  });
  return acc.value();
}

Cyclotomic norm_fiber_char_sum(const MultChar& chi, Elt a) {
  check_unit(a);
  const EtaleAlgebra& B = chi.algebra();
  Accumulator acc(chi, 1);
  B.for_each_in_fiber(a, [&](std::span<const Elt> x) { acc.add(acc.chi_exp(x), 0); });
  return acc.value();
}

Cyclotomic main_term(const MultChar& chi, Elt a) {
  return norm_fiber_char_sum(chi, a).scaled(1, chi.algebra().base().q());
}

UnfoldedParts unfolded_parts(const MultChar& chi, const AddChar& psi, Elt a) {
  check_compatible(chi, psi);
  check_unit(a);
  const EtaleAlgebra& B = chi.algebra();
  const FieldTable& F = B.base();
  Accumulator i_acc(chi, psi.p()), j_acc(chi, psi.p());
  B.for_each_in_fiber(a, [&](std::span<const Elt> x) {
    const std::uint64_t e = i_acc.chi_exp(x);
    const Elt t = B.trace(x);
    for (std::uint32_t ly = 0; ly < F.order(); ++ly) {
      const Elt y = Elt::from_log(ly);
      const Elt yt = F.mul(y, t);
      // z = 0
      i_acc.add(e, psi.index(y));
      for (std::uint32_t lz = 0; lz < F.order(); ++lz) {
        const Elt z = Elt::from_log(lz);
        const Elt arg = F.sub(F.add(y, z), F.mul(yt, z));
        j_acc.add(e, psi.index(arg));
      }
    }
  });
  return {i_acc.value(), j_acc.value()};
}

Cyclotomic unfolded_sum(const MultChar& chi, const AddChar& psi, Elt a) {
  auto parts = unfolded_parts(chi, psi, a);
  return parts.i_part + parts.j_part;
}

namespace {

// Runs over (F_q*)^v and returns the exponent histogram in zeta_N,
// N = lcm(p, q - 1) (or q - 1 for trivial psi).
Cyclotomic torus_sum(const LaurentFamily& fam, std::span<const Elt> coeffs, std::span<const std::int64_t> twists,
                     const FieldTable& F, const AddChar* psi) {
  const std::uint32_t v = fam.dim();
  if (twists.size() != v) throw std::invalid_argument("laurent_fiber_sum: expected one twist per variable");
  if (psi && coeffs.size() != fam.monomials().size())
    throw std::invalid_argument("laurent_fiber_sum: every coefficient slot must be assigned");
  if (psi && (psi->base().p() != F.p() || psi->base().n() != F.n()))
    throw std::invalid_argument("laurent_fiber_sum: psi lives over another field");
  const std::uint64_t qm1 = F.order();
  const std::uint64_t N = psi ? std::lcm<std::uint64_t>(F.p(), qm1) : qm1;
  const std::uint64_t tw_scale = N / qm1;
  const std::uint64_t psi_step = psi ? N / F.p() : 0;
  std::vector<std::uint64_t> tw;
  for (auto t : twists) tw.push_back(mod_floor(t, qm1) * tw_scale % N);

  const auto& mons = fam.monomials();
  std::vector<std::vector<std::uint64_t>> ex(mons.size());
  for (std::size_t j = 0; j < mons.size(); ++j)
    for (auto a : mons[j].exponent) ex[j].push_back(mod_floor(a, qm1));

  std::vector<std::int64_t> counts(N, 0);
  std::vector<std::uint32_t> l(v, 0);
  for (;;) {
    std::uint64_t e = 0;
    for (std::uint32_t i = 0; i < v; ++i) e += tw[i] * l[i] % N;
    if (psi) {
      Elt f = Elt::zero();
      for (std::size_t j = 0; j < mons.size(); ++j) {
        if (coeffs[j].is_zero()) continue;
        std::uint64_t s = 0;
        for (std::uint32_t i = 0; i < v; ++i) s += ex[j][i] * l[i] % qm1;
        f = F.add(f, F.mul(coeffs[j], Elt::from_log(static_cast<std::uint32_t>(s % qm1))));
      }
      e += psi_step * psi->index(f);
    }
    ++counts[e % N];
    std::uint32_t i = v;
    bool done = true;
    while (i-- > 0) {
      if (++l[i] < qm1) {
        done = false;
        break;
      }
      l[i] = 0;
    }
    if (done) break;
  }
  return Cyclotomic::from_exponent_counts(N, counts);
}

}  // namespace

Cyclotomic laurent_fiber_sum(const LaurentFamily& fam, std::span<const Elt> coeffs,
                             std::span<const std::int64_t> twists, const AddChar& psi) {
  return torus_sum(fam, coeffs, twists, psi.base(), &psi);
}

Cyclotomic laurent_fiber_sum_trivial_psi(const LaurentFamily& fam, std::span<const std::int64_t> twists,
                                         const FieldTable& F) {
  return torus_sum(fam, {}, twists, F, nullptr);
}

Cyclotomic eik_extended(const MultChar& chi, const AddChar& psi, const BaseChange& bc, Elt a) {
  const MultChar chi2 = descend_char(chi, bc);
  const AddChar psi2 = psi.extend(bc.base_embedding);
  return eik_sum(chi2, psi2, a);
}

Cyclotomic eik_extended(const MultChar& chi, const AddChar& psi, std::uint32_t m, Elt a, std::uint64_t budget) {
  const BaseChange bc = base_change(chi.algebra(), m, budget);
  return eik_extended(chi, psi, bc, a);
}

std::vector<std::int64_t> split_twists(const MultChar& chi) {
  const EtaleAlgebra& B = chi.algebra();
  for (auto ni : B.type())
    if (ni != 1) throw std::invalid_argument("split_twists: B must be split (all factors F_q)");
  const std::size_t k = B.factor_count();
  const auto qm1 = static_cast<std::int64_t>(B.base().order());
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    const auto d = static_cast<std::int64_t>(chi.exps()[i]) - static_cast<std::int64_t>(chi.exps()[k - 1]);
    out.push_back(static_cast<std::int64_t>(mod_floor(d, qm1)));
  }
  return out;
}

Cyclotomic split_toric_rhs(const MultChar& chi, const AddChar& psi, Elt a) {
  check_compatible(chi, psi);
  check_unit(a);
  const EtaleAlgebra& B = chi.algebra();
  const std::uint32_t n = B.degree() - 1;
  auto twists = split_twists(chi);
  twists.push_back(0);
  twists.push_back(0);
  const LaurentFamily fam = LaurentFamily::f_family(n);
  const auto coeffs = fam.coefficients(B.base(), a);
  return eval_base_char(B.base(), chi.exps().back(), a) * laurent_fiber_sum(fam, coeffs, twists, psi);
}

WildChain wild_toric_chain(const MultChar& chi, const AddChar& psi, Elt w) {
  check_compatible(chi, psi);
  check_unit(w);
  if (!psi.is_normalized()) throw std::invalid_argument("wild_toric_chain: psi must be psi_0 o Tr (c in F_p*)");
  const EtaleAlgebra& B = chi.algebra();
  const FieldTable& F = B.base();
  const std::uint32_t p = F.p();
  const std::uint32_t n = B.degree() - 1;
  WildChain out;
  out.m = n + 1;
  while (out.m % p == 0) {
    out.m /= p;
    out.pk *= p;
  }
  if (out.pk == 1) throw std::invalid_argument("wild_toric_chain: p does not divide n + 1");

  const auto lambda = split_twists(chi);
  const auto qm1 = static_cast<std::int64_t>(F.order());
  std::int64_t z_twist = 0;
  for (auto l : lambda) z_twist -= l;
  z_twist = static_cast<std::int64_t>(mod_floor(z_twist, qm1));
  const Elt wpk = F.pow(w, out.pk);

  std::vector<std::int64_t> t0 = lambda;
  t0.push_back(0);
  t0.push_back(0);
  std::vector<std::int64_t> t1 = lambda;
  t1.push_back(0);
  t1.push_back(z_twist);
  std::vector<std::int64_t> t2;
  for (auto l : lambda) t2.push_back(static_cast<std::int64_t>(mod_floor(l * out.pk, qm1)));
  t2.push_back(0);
  t2.push_back(z_twist);

  const LaurentFamily f0 = LaurentFamily::f_family(n);
  const LaurentFamily f1 = LaurentFamily::fhat_family(n, n + 1);
  const LaurentFamily f2 = LaurentFamily::fhat_frobenius(n, out.m, out.pk);
  const LaurentFamily f3 = LaurentFamily::fhat_family(n, out.m);
  out.stages.push_back(laurent_fiber_sum(f0, f0.coefficients(F, wpk), t0, psi));
  out.stages.push_back(laurent_fiber_sum(f1, f1.coefficients(F, wpk), t1, psi));
  out.stages.push_back(laurent_fiber_sum(f2, f2.coefficients(F, w), t2, psi));
  out.stages.push_back(laurent_fiber_sum(f3, f3.coefficients(F, w), t2, psi));
  return out;
}

}  // namespace eik
