#include "eik/etale.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "eik/errors.hpp"
#include "eik/numtheory.hpp"

namespace eik {

EtaleAlgebra EtaleAlgebra::make(std::uint32_t p, std::uint32_t base_degree, std::vector<std::uint32_t> type,
                                std::uint64_t budget) {
  if (type.empty()) throw std::invalid_argument("etale: empty factorization type");
  FieldPtr base = field(p, base_degree, budget);
  std::vector<Embedding> factors;
  factors.reserve(type.size());
  for (std::uint32_t ni : type) {
    if (ni == 0) throw std::invalid_argument("etale: factor degree must be >= 1");
    factors.push_back(make_embedding(base, field(p, base_degree * ni, budget)));
  }
  return from_embeddings(std::move(base), std::move(factors));
}

EtaleAlgebra EtaleAlgebra::from_embeddings(FieldPtr base, std::vector<Embedding> factors) {
  EtaleAlgebra B;
  if (factors.empty()) throw std::invalid_argument("etale: no factors");
  B.base_ = std::move(base);
  const std::uint64_t qm1 = B.base_->order();
  B.unit_count_ = 1;
  for (const auto& emb : factors) {
    if (emb.sub.get() != B.base_.get() && (emb.sub->p() != B.base_->p() || emb.sub->n() != B.base_->n()))
      throw std::invalid_argument("etale: factor embedding does not start at the base field");
    const std::uint32_t ni = emb.sup->n() / B.base_->n();
    B.type_.push_back(ni);
    B.degree_ += ni;
    B.unit_count_ *= emb.sup->order();
    const std::uint64_t k = std::uint64_t{emb.sup->order()} / qm1;
    const std::uint64_t j = emb.root_log / k;
    const std::uint64_t u = invmod(j, qm1);
    B.norm_weights_.push_back(u);
    B.norm_weight_inverses_.push_back(qm1 == 1 ? 0 : j % qm1);

    std::vector<Elt> table(emb.sup->order());
    for (std::uint32_t e = 0; e < emb.sup->order(); ++e) table[e] = emb.trace(Elt::from_log(e));
    B.trace_tables_.push_back(std::move(table));
  }
  if (B.degree_ < 2) throw std::invalid_argument("etale: degree n+1 must be >= 2");
  B.factors_ = std::move(factors);
  return B;
}

std::string EtaleAlgebra::type_string() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < type_.size(); ++i) os << (i ? "," : "") << type_[i];
  os << "]";
  return os.str();
}

void EtaleAlgebra::validate(std::size_t coords) const {
  if (coords != factors_.size()) throw std::invalid_argument("etale: element has the wrong number of coordinates");
}

Elt EtaleAlgebra::trace(std::span<const Elt> x) const {
  validate(x.size());
  Elt acc = Elt::zero();
  for (std::size_t i = 0; i < x.size(); ++i) acc = base_->add(acc, factor_trace(i, x[i]));
  return acc;
}

Elt EtaleAlgebra::norm(std::span<const Elt> x) const {
  validate(x.size());
  const std::uint64_t qm1 = base_->order();
  std::uint64_t e = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].is_zero()) throw std::domain_error("algebra_norm: element is not a unit");
    e = (e + mulmod(x[i].log() % qm1, norm_weights_[i], qm1)) % qm1;
  }
  return base_->from_log(static_cast<std::int64_t>(e));
}

AlgebraElement EtaleAlgebra::diagonal(Elt b) const {
  AlgebraElement x;
  for (const auto& emb : factors_) x.coords.push_back(emb.apply(b));
  return x;
}

AlgebraElement EtaleAlgebra::multiply(const AlgebraElement& x, const AlgebraElement& y) const {
  validate(x.coords.size());
  validate(y.coords.size());
  AlgebraElement z;
  for (std::size_t i = 0; i < factors_.size(); ++i) z.coords.push_back(factor(i).mul(x.coords[i], y.coords[i]));
  return z;
}

std::vector<AlgebraElement> EtaleAlgebra::enumerate(const Filter& filter) const {
  std::vector<AlgebraElement> out;
  auto push = [&](std::span<const Elt> x) { out.push_back(AlgebraElement{{x.begin(), x.end()}}); };
  switch (filter.kind) {
    case FilterKind::units:
      for_each_unit(push);
      break;
    case FilterKind::norm_fiber:
      for_each_in_fiber(filter.a, push);
      break;
    case FilterKind::trace_nonzero_norm_fiber:
      for_each_in_fiber(filter.a, [&](std::span<const Elt> x) {
        if (!trace(x).is_zero()) push(x);
      });
      break;
  }
  return out;
}

// ---------------------------------------------------------------------------

AlgebraElement NormDescentMap::apply(const AlgebraElement& y) const {
  if (y.coords.size() != terms.size()) throw std::invalid_argument("descent: element does not belong to B'");
  std::vector<std::uint64_t> acc(source_orders.size(), 0);
  for (std::size_t t = 0; t < terms.size(); ++t) {
    if (y.coords[t].is_zero()) throw std::domain_error("descent: element is not a unit");
    const std::uint64_t ord = source_orders[terms[t].source];
    acc[terms[t].source] = (acc[terms[t].source] + mulmod(y.coords[t].log() % ord, terms[t].multiplier, ord)) % ord;
  }
  AlgebraElement x;
  for (auto e : acc) x.coords.push_back(Elt::from_log(static_cast<std::uint32_t>(e)));
  return x;
}

BaseChange base_change(const EtaleAlgebra& B, std::uint32_t m, std::uint64_t budget) {
  if (m == 0) throw std::invalid_argument("base_change: m must be >= 1");
  const FieldTable& Fq = B.base();
  const std::uint32_t p = Fq.p();
  const std::uint32_t n0 = Fq.n();
  const std::uint64_t q = Fq.q();

  BaseChange out;
  out.m = m;
  FieldPtr M = field(p, n0 * m, budget);
  out.base_embedding = make_embedding(B.base_ptr(), M);
  const Elt gen_q_in_M = out.base_embedding.apply(Fq.gen());

  struct Pending {
    std::uint32_t l;
    std::size_t source;
    std::uint32_t copy;
    Embedding m_to_l;
    Embedding k_to_l;
  };
  std::vector<Pending> pending;
  for (std::size_t i = 0; i < B.factor_count(); ++i) {
    const std::uint32_t ni = B.type()[i];
    const std::uint32_t g = std::gcd(ni, m);
    const std::uint32_t l = ni / g * m;
    FieldPtr L = field(p, n0 * l, budget);
    Embedding m_to_l = make_embedding(M, L);
    const Elt target = m_to_l.apply(gen_q_in_M);
    // K -> L must agree with F_q -> M -> L on the base field.
    const Embedding& q_to_k = B.embedding(i);
    FieldPtr K = q_to_k.sup;
    std::optional<Embedding> k_to_l;
    for (std::uint64_t r : embedding_roots(*K, *L)) {
      Embedding cand{K, L, r};
      if (cand.apply(q_to_k.apply(Fq.gen())) == target) {
        k_to_l = cand;
        break;
      }
    }
    if (!k_to_l) throw std::logic_error("base_change: no compatible embedding of the factor");
    for (std::uint32_t j = 0; j < g; ++j) pending.push_back({l, i, j, m_to_l, *k_to_l});
  }
  std::stable_sort(pending.begin(), pending.end(), [](const Pending& a, const Pending& b) {
    return std::tie(a.l, a.source, a.copy) < std::tie(b.l, b.source, b.copy);
  });

  std::vector<Embedding> factors;
  for (std::size_t i = 0; i < B.factor_count(); ++i) out.descent.source_orders.push_back(B.factor(i).order());
  for (const auto& pc : pending) {
    factors.push_back(pc.m_to_l);
    out.components.push_back({pc.source, pc.copy, pc.k_to_l});
    // y -> Frob^{-j}(y^{(Q_L-1)/(Q_K-1)}) pulled back through K -> L.
    const FieldTable& K = *pc.k_to_l.sub;
    const std::uint64_t qk1 = K.order();
    const std::uint64_t kfac = std::uint64_t{pc.k_to_l.sup->order()} / qk1;
    const std::uint64_t jk = pc.k_to_l.root_log / kfac;
    const std::uint64_t frob_inv = powmod(q, (pc.l - pc.copy % pc.l) % pc.l, qk1);
    const std::uint64_t c = mulmod(frob_inv, invmod(jk, qk1), qk1);
    out.descent.terms.push_back({pc.source, c});
  }
  out.algebra = std::make_shared<const EtaleAlgebra>(EtaleAlgebra::from_embeddings(M, std::move(factors)));
  return out;
}

}  // namespace eik
