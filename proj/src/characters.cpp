#include "eik/characters.hpp"

#include <numeric>
#include <stdexcept>

#include "eik/numtheory.hpp"

namespace eik {

AddChar::AddChar(FieldPtr base, Elt c) : base_(std::move(base)), c_(c) {
  if (c_.is_zero()) throw std::invalid_argument("AddChar: twist c must be nonzero");
  const FieldPtr prime = field(base_->p(), 1);
  const Embedding to_base = make_embedding(prime, base_);
  index_by_log_.resize(base_->order());
  for (std::uint32_t e = 0; e < base_->order(); ++e) {
    const Elt t = base_->mul(c_, Elt::from_log(e));
    index_by_log_[e] = prime->to_int(to_base.trace(t));
  }
}

AddChar AddChar::conj() const { return AddChar(base_, base_->neg(c_)); }

AddChar AddChar::scaled(Elt b) const {
  if (b.is_zero()) throw std::invalid_argument("AddChar: scaling by zero");
  return AddChar(base_, base_->mul(c_, b));
}

AddChar AddChar::extend(const Embedding& emb) const {
  if (emb.sub->p() != base_->p() || emb.sub->n() != base_->n())
    throw std::invalid_argument("AddChar: embedding does not start at the character's field");
  return AddChar(emb.sup, emb.apply(c_));
}

bool AddChar::is_normalized() const { return base_->frobenius(c_, 1) == c_; }

// ---------------------------------------------------------------------------

MultChar::MultChar(AlgebraPtr algebra, std::span<const std::int64_t> exps) : algebra_(std::move(algebra)) {
  if (exps.size() != algebra_->factor_count())
    throw std::invalid_argument("MultChar: expected " + std::to_string(algebra_->factor_count()) + " exponents");
  for (std::size_t i = 0; i < exps.size(); ++i) exps_.push_back(mod_floor(exps[i], algebra_->factor(i).order()));
}

MultChar MultChar::trivial(AlgebraPtr algebra) {
  std::vector<std::int64_t> zeros(algebra->factor_count(), 0);
  return MultChar(std::move(algebra), zeros);
}

std::vector<MultChar> MultChar::all(const AlgebraPtr& algebra) {
  const std::size_t k = algebra->factor_count();
  std::vector<MultChar> out;
  std::vector<std::int64_t> e(k, 0);
  for (;;) {
    out.emplace_back(algebra, e);
    std::size_t i = k;
    while (i-- > 0) {
      if (++e[i] < static_cast<std::int64_t>(algebra->factor(i).order())) break;
      e[i] = 0;
      if (i == 0) return out;
    }
  }
}

bool MultChar::is_trivial() const {
  for (auto e : exps_)
    if (e != 0) return false;
  return true;
}

std::uint64_t MultChar::conductor() const {
  std::uint64_t N = 1;
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    const std::uint64_t ord = algebra_->factor(i).order();
    N = std::lcm(N, ord / std::gcd(exps_[i], ord));
  }
  return N;
}

std::vector<std::uint64_t> MultChar::log_weights(std::uint64_t N) const {
  std::vector<std::uint64_t> w;
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    const std::uint64_t ord = algebra_->factor(i).order();
    const std::uint64_t g = std::gcd(exps_[i], ord);
    const std::uint64_t d = ord / g;
    if (N % d != 0) throw std::invalid_argument("MultChar: N is not a multiple of the conductor");
    w.push_back(mulmod(exps_[i] / g, N / d, N));
  }
  return w;
}

Cyclotomic MultChar::eval(std::span<const Elt> x) const {
  if (x.size() != exps_.size()) throw std::invalid_argument("MultChar: element has the wrong number of coordinates");
  const std::uint64_t N = conductor();
  const auto w = log_weights(N);
  std::uint64_t e = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].is_zero()) throw std::domain_error("eval_mult_char: element is not a unit");
    e = (e + mulmod(w[i], x[i].log(), N)) % N;
  }
  return Cyclotomic::root_of_unity(N, static_cast<std::int64_t>(e));
}

MultChar MultChar::conj() const {
  std::vector<std::int64_t> neg;
  for (auto e : exps_) neg.push_back(-static_cast<std::int64_t>(e));
  return MultChar(algebra_, neg);
}

MultChar MultChar::operator*(const MultChar& other) const {
  if (other.algebra_.get() != algebra_.get() && other.algebra_->type() != algebra_->type())
    throw std::invalid_argument("MultChar: characters on different algebras");
  std::vector<std::int64_t> e;
  for (std::size_t i = 0; i < exps_.size(); ++i) e.push_back(static_cast<std::int64_t>(exps_[i] + other.exps_[i]));
  return MultChar(algebra_, e);
}

std::optional<std::uint64_t> is_norm_induced(const MultChar& chi) {
  const EtaleAlgebra& B = chi.algebra();
  const std::uint64_t qm1 = B.base().order();
  std::optional<std::uint64_t> e0;
  for (std::size_t i = 0; i < B.factor_count(); ++i) {
    const std::uint64_t k = std::uint64_t{B.factor(i).order()} / qm1;
    const std::uint64_t e = chi.exps()[i];
    if (e % k != 0) return std::nullopt;
    const std::uint64_t cand = qm1 == 1 ? 0 : mulmod((e / k) % qm1, invmod(B.norm_weight(i), qm1), qm1);
    if (e0 && *e0 != cand) return std::nullopt;
    e0 = cand;
  }
  return e0;
}

MultChar descend_char(const MultChar& chi, const BaseChange& bc) {
  const EtaleAlgebra& B = chi.algebra();
  const auto& d = bc.descent;
  if (d.source_orders.size() != B.factor_count()) throw std::invalid_argument("descend_char: mismatched algebra");
  for (std::size_t i = 0; i < B.factor_count(); ++i)
    if (d.source_orders[i] != B.factor(i).order()) throw std::invalid_argument("descend_char: mismatched algebra");
  const EtaleAlgebra& Bp = *bc.algebra;
  std::vector<std::int64_t> out;
  for (std::size_t t = 0; t < d.terms.size(); ++t) {
    const std::uint64_t src_order = d.source_orders[d.terms[t].source];
    const std::uint64_t ord = Bp.factor(t).order();
    const std::uint64_t e = mulmod(chi.exps()[d.terms[t].source], d.terms[t].multiplier, src_order);
    out.push_back(static_cast<std::int64_t>(mulmod(e, ord / src_order, ord)));
  }
  return MultChar(bc.algebra, out);
}

Cyclotomic eval_base_char(const FieldTable& F, std::uint64_t e0, Elt a) {
  if (a.is_zero()) throw std::domain_error("eval_base_char: argument must be a unit");
  const std::uint64_t N = F.order();
  return Cyclotomic::root_of_unity(N, static_cast<std::int64_t>(mulmod(e0 % N, a.log(), N)));
}

}  // namespace eik
