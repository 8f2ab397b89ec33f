#include "eik/polytope.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "eik/errors.hpp"
#include "eik/numtheory.hpp"

namespace eik {

namespace {

constexpr std::uint64_t kSubsetBudget = 5'000'000;

std::vector<std::size_t> bits(PointMask m) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; m; ++i, m >>= 1)
    if (m & 1) out.push_back(i);
  return out;
}

std::vector<std::size_t> monomials_of(PointMask m) {
  std::vector<std::size_t> out;
  for (auto i : bits(m))
    if (i > 0) out.push_back(i - 1);
  return out;
}

std::uint32_t affine_dim(const std::vector<std::vector<std::int64_t>>& pts, PointMask m) {
  const auto idx = bits(m);
  if (idx.size() <= 1) return 0;
  IntMatrix D;
  for (std::size_t k = 1; k < idx.size(); ++k) {
    std::vector<std::int64_t> row(pts[idx[0]].size());
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = pts[idx[k]][j] - pts[idx[0]][j];
    D.push_back(std::move(row));
  }
  return static_cast<std::uint32_t>(rank(D));
}

std::int64_t dot(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
  __int128 s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<__int128>(a[i]) * b[i];
  if (s > INT64_MAX || s < INT64_MIN) throw std::overflow_error("polytope: integer overflow");
  return static_cast<std::int64_t>(s);
}

std::string rational(std::int64_t num, std::int64_t den) {
  if (den < 0) num = -num, den = -den;
  const std::int64_t g = std::gcd(num, den);
  num /= g;
  den /= g;
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

IntMatrix exponent_matrix(const LaurentFamily& fam) {
  IntMatrix A;
  for (const auto& mono : fam.monomials()) A.push_back(mono.exponent);
  return A;
}

// Pulling triangulation of a face, as lists of point indices.
void triangulate(const NewtonPolytope& P, PointMask G, std::uint32_t k, std::vector<std::size_t>& prefix,
                 std::vector<std::vector<std::size_t>>& out) {
  std::size_t apex = P.points.size();
  for (auto v : P.vertices)
    if ((G >> v) & 1) {
      apex = v;
      break;
    }
  if (apex == P.points.size()) throw std::logic_error("triangulate: face without a vertex");
  prefix.push_back(apex);
  if (k == 0) {
    out.push_back(prefix);
  } else {
    for (const auto& H : P.faces) {
      if (H.dim != k - 1 || (H.mask & ~G) != 0 || ((H.mask >> apex) & 1)) continue;
      triangulate(P, H.mask, k - 1, prefix, out);
    }
  }
  prefix.pop_back();
}

}  // namespace

std::string Facet::equation() const {
  std::ostringstream os;
  bool first = true;
  for (std::size_t j = 0; j < normal.size(); ++j) {
    if (normal[j] == 0) continue;
    const std::string var = "x" + std::to_string(j + 1);
    std::int64_t num = normal[j];
    const std::int64_t den = offset == 0 ? 1 : offset;
    const bool neg = (num < 0) != (den < 0);
    num = num < 0 ? -num : num;
    const std::string coef = rational(num, den < 0 ? -den : den);
    os << (first ? (neg ? "-" : "") : (neg ? " - " : " + "));
    if (coef != "1") os << coef << " ";
    os << var;
    first = false;
  }
  os << " = " << (offset == 0 ? 0 : 1);
  return os.str();
}

NewtonPolytope newton_polytope(const LaurentFamily& fam) {
  NewtonPolytope P;
  P.dim = fam.dim();
  if (fam.monomials().size() > 63) throw std::invalid_argument("newton_polytope: too many monomials");
  P.points.push_back(std::vector<std::int64_t>(P.dim, 0));
  for (const auto& mono : fam.monomials()) P.points.push_back(mono.exponent);
  const std::size_t N = P.points.size(), d = P.dim;
  const PointMask all = (PointMask{1} << N) - 1;
  if (affine_dim(P.points, all) != d) throw std::invalid_argument("newton_polytope: hull is not full-dimensional");

  double subsets = 1;
  for (std::size_t i = 0; i < d; ++i) subsets = subsets * static_cast<double>(N - i) / static_cast<double>(i + 1);
  if (subsets > static_cast<double>(kSubsetBudget)) throw BudgetError("newton_polytope: too many point subsets");

  std::set<std::pair<std::vector<std::int64_t>, std::int64_t>> seen;
  std::vector<std::size_t> pick(d);
  std::iota(pick.begin(), pick.end(), 0);
  for (;;) {
    // Cofactor expansion gives (normal, -offset) spanning the kernel of [p_i | 1].
    std::vector<std::int64_t> k(d + 1);
    for (std::size_t drop = 0; drop <= d; ++drop) {
      IntMatrix M(d);
      for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c <= d; ++c)
          if (c != drop) M[r].push_back(c < d ? P.points[pick[r]][c] : 1);
      const std::int64_t det = determinant(M);
      k[drop] = (drop % 2 == 0) ? det : -det;
    }
    std::vector<std::int64_t> normal(k.begin(), k.begin() + static_cast<std::ptrdiff_t>(d));
    std::int64_t g = 0;
    for (auto v : normal) g = std::gcd(g, v);
    if (g != 0) {
      for (auto& v : normal) v /= g;
      std::int64_t offset = dot(normal, P.points[pick[0]]);
      bool le = true, ge = true;
      PointMask on = 0;
      for (std::size_t i = 0; i < N; ++i) {
        const std::int64_t s = dot(normal, P.points[i]) - offset;
        if (s > 0) le = false;
        if (s < 0) ge = false;
        if (s == 0) on |= PointMask{1} << i;
      }
      if (!le && ge) {
        for (auto& v : normal) v = -v;
        offset = -offset;
        le = true;
      }
      if (le && seen.insert({normal, offset}).second) {
        Facet f;
        f.normal = normal;
        f.offset = offset;
        f.mask = on;
        f.monomials = monomials_of(on);
        P.facets.push_back(std::move(f));
      }
    }
    std::size_t i = d;
    while (i > 0 && pick[i - 1] == N - d + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < d; ++j) pick[j] = pick[j - 1] + 1;
  }
  std::sort(P.facets.begin(), P.facets.end(), [](const Facet& a, const Facet& b) {
    if (a.contains_origin() != b.contains_origin()) return !a.contains_origin();
    if (a.normal != b.normal) return a.normal > b.normal;
    return a.offset < b.offset;
  });

  // Faces are the nonempty intersections of facets.
  std::set<PointMask> masks;
  for (const auto& f : P.facets) masks.insert(f.mask);
  std::vector<PointMask> frontier(masks.begin(), masks.end());
  while (!frontier.empty()) {
    std::vector<PointMask> next;
    for (auto a : frontier)
      for (const auto& f : P.facets) {
        const PointMask c = a & f.mask;
        if (c != 0 && masks.insert(c).second) next.push_back(c);
      }
    frontier = std::move(next);
  }
  for (auto m : masks) {
    Face F;
    F.mask = m;
    F.dim = affine_dim(P.points, m);
    F.contains_origin = m & 1;
    F.monomials = monomials_of(m);
    P.faces.push_back(std::move(F));
  }
  std::stable_sort(P.faces.begin(), P.faces.end(), [](const Face& a, const Face& b) { return a.dim > b.dim; });
  for (const auto& F : P.faces)
    if (F.dim == 0) P.vertices.push_back(bits(F.mask).front());
  std::sort(P.vertices.begin(), P.vertices.end());
  return P;
}

std::vector<Facet> facets_off_origin(const NewtonPolytope& poly) {
  std::vector<Facet> out;
  for (const auto& f : poly.facets)
    if (!f.contains_origin()) out.push_back(f);
  return out;
}

std::vector<Face> faces_off_origin(const NewtonPolytope& poly) {
  std::vector<Face> out;
  for (const auto& f : poly.faces)
    if (!f.contains_origin) out.push_back(f);
  return out;
}

std::int64_t normalized_volume(const NewtonPolytope& poly) {
  std::int64_t vol = 0;
  for (const auto& f : poly.facets) {
    if (f.contains_origin()) continue;
    std::vector<std::vector<std::size_t>> simplices;
    std::vector<std::size_t> prefix;
    triangulate(poly, f.mask, poly.dim - 1, prefix, simplices);
    for (const auto& s : simplices) {
      IntMatrix M;
      for (auto i : s) M.push_back(poly.points[i]);
      const std::int64_t det = determinant(M);
      vol += det < 0 ? -det : det;
    }
  }
  return vol;
}

LaurentFamily face_restriction(const LaurentFamily& fam, const std::vector<std::size_t>& monomials) {
  return fam.restrict(monomials);
}

std::optional<std::int64_t> diagonal_determinant(const LaurentFamily& fam, const std::vector<std::size_t>& monomials) {
  if (monomials.size() != fam.dim()) return std::nullopt;
  return determinant(exponent_matrix(fam.restrict(monomials)));
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::nondegenerate:
      return "nondegenerate";
    case Verdict::degenerate:
      return "degenerate";
    case Verdict::undetermined:
      return "undetermined";
  }
  return "?";
}

bool is_critical(const LaurentFamily& face, const std::vector<Elt>& coeffs_in_M, const FieldTable& M,
                 const std::vector<Elt>& x) {
  const auto& mons = face.monomials();
  std::vector<Elt> terms;
  for (std::size_t k = 0; k < mons.size(); ++k) {
    std::int64_t e = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (x[j].is_zero()) return false;
      e += mons[k].exponent[j] * static_cast<std::int64_t>(x[j].log());
    }
    terms.push_back(M.mul(coeffs_in_M[k], M.from_log(e)));
  }
  for (std::size_t j = 0; j < face.dim(); ++j) {
    Elt acc = Elt::zero();
    for (std::size_t k = 0; k < mons.size(); ++k)
      acc = M.add(acc, M.mul(field_constant(M, mons[k].exponent[j]), terms[k]));
    if (!acc.is_zero()) return false;
  }
  return true;
}

namespace {

struct Lifted {
  FieldPtr M;
  std::vector<Elt> coeffs;
};

Lifted lift(const std::vector<Elt>& coeffs, const FieldPtr& F, std::uint32_t degree) {
  Lifted L;
  if (degree == 1) {
    L.M = F;
    L.coeffs = coeffs;
    return L;
  }
  L.M = field(F->p(), F->n() * degree);
  const Embedding emb = make_embedding(F, L.M);
  for (auto c : coeffs) L.coeffs.push_back(emb.apply(c));
  return L;
}

}  // namespace

std::optional<Witness> critical_point_search(const LaurentFamily& face, const std::vector<Elt>& coeffs,
                                             const FieldPtr& F, std::uint32_t degree, std::uint64_t budget) {
  if (coeffs.size() != face.monomials().size()) throw std::invalid_argument("critical_point_search: size mismatch");
  for (auto c : coeffs)
    if (c.is_zero()) throw std::invalid_argument("critical_point_search: zero coefficient");
  const Lifted L = lift(coeffs, F, degree);
  const FieldTable& M = *L.M;
  const std::uint64_t p = M.p(), Q = M.q();
  const IntMatrix A = exponent_matrix(face);
  const auto K = kernel_mod_p(transpose(A), p);
  if (K.empty()) return std::nullopt;
  double count = 1;
  for (std::size_t i = 0; i < K.size(); ++i) count *= static_cast<double>(Q);
  if (count > static_cast<double>(budget)) throw BudgetError("critical_point_search: kernel too large");

  const Diagonalization dg = diagonalize(A);
  const std::size_t r = A.size(), kappa = K.size();
  std::vector<std::uint64_t> t(kappa, 0);  // 0 is the zero element, j >= 1 is gen^{j-1}
  auto elt = [&](std::uint64_t j) { return j == 0 ? Elt::zero() : Elt::from_log(static_cast<std::uint32_t>(j - 1)); };
  for (;;) {
    std::vector<std::uint64_t> logs(r);
    bool unit = true;
    for (std::size_t k = 0; k < r && unit; ++k) {
      Elt u = Elt::zero();
      for (std::size_t i = 0; i < kappa; ++i) u = M.add(u, M.mul(elt(t[i]), M.from_int(K[i][k])));
      if (u.is_zero()) unit = false;
      else logs[k] = M.div(u, L.coeffs[k]).log();
    }
    if (unit) {
      if (auto sol = solve_mod(dg, logs, Q - 1)) {
        Witness w;
        w.degree = degree;
        w.field = L.M;
        for (auto v : *sol) w.point.push_back(Elt::from_log(static_cast<std::uint32_t>(v)));
        if (!is_critical(face, L.coeffs, M, w.point)) throw std::logic_error("critical_point_search: bad solution");
        return w;
      }
    }
    std::size_t i = 0;
    for (; i < kappa; ++i) {
      if (++t[i] < Q) break;
      t[i] = 0;
    }
    if (i == kappa) break;
  }
  return std::nullopt;
}

std::optional<Witness> critical_point_search_naive(const LaurentFamily& face, const std::vector<Elt>& coeffs,
                                                   const FieldPtr& F, std::uint32_t degree) {
  const Lifted L = lift(coeffs, F, degree);
  const std::uint32_t ord = L.M->order();
  double count = 1;
  for (std::size_t i = 0; i < face.dim(); ++i) count *= ord;
  if (count > static_cast<double>(kSearchBudget) * 16) throw BudgetError("critical_point_search_naive: torus too large");
  std::vector<std::uint32_t> e(face.dim(), 0);
  std::vector<Elt> x(face.dim());
  for (;;) {
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = Elt::from_log(e[j]);
    if (is_critical(face, L.coeffs, *L.M, x)) return Witness{degree, L.M, x};
    std::size_t j = 0;
    for (; j < e.size(); ++j) {
      if (++e[j] < ord) break;
      e[j] = 0;
    }
    if (j == e.size()) return std::nullopt;
  }
}

std::string fhat_regime(std::uint32_t n, std::uint32_t m) {
  if (n + 1 < 2 * m) return "n+1<2m";
  if (n + 1 == 2 * m) return "n+1=2m";
  return "n+1>2m";
}

std::optional<Elt> exceptional_parameter(const FieldTable& F, std::uint32_t n, std::uint32_t m) {
  const Elt mm = field_constant(F, m);
  if (mm.is_zero()) return std::nullopt;
  return F.inv(F.pow(mm, static_cast<std::int64_t>(n) + 1));
}

NondegVerdict nondegeneracy_verdict(const LaurentFamily& fam, const NewtonPolytope& poly, const FieldPtr& F, Elt w,
                                    std::uint32_t depth) {
  if (w.is_zero()) throw std::invalid_argument("nondegeneracy_verdict: w must be nonzero");
  const std::uint64_t p = F->p();
  const auto coeffs = fam.coefficients(*F, w);
  const bool closed_form_family =
      fam.kind() == FamilyKind::fhat && fam.n() + 1 == 2 * fam.m() && fam.m() % p != 0;

  NondegVerdict out;
  out.depth = depth;
  bool any_undetermined = false;
  for (const auto& face : faces_off_origin(poly)) {
    FaceVerdict fv;
    fv.monomials = face.monomials;
    fv.dim = face.dim;
    const LaurentFamily sub = fam.restrict(face.monomials);
    std::vector<Elt> sub_coeffs;
    for (auto k : face.monomials) sub_coeffs.push_back(coeffs[k]);
    fv.determinant = diagonal_determinant(fam, face.monomials);

    if (rank_mod_p(exponent_matrix(sub), p) == face.monomials.size()) {
      fv.verdict = Verdict::nondegenerate;
      fv.method = "rank";
    } else if (closed_form_family && face.monomials.size() == fam.monomials().size()) {
      fv.method = "closed_form";
      const Elt w0 = *exceptional_parameter(*F, fam.n(), fam.m());
      if (w == w0) {
        // x_1 = ... = x_n = 1/m, x_{n+1} = x_{n+2} = 1.
        Witness wit;
        wit.field = F;
        wit.point.assign(fam.dim(), F->one());
        for (std::uint32_t i = 0; i < fam.n(); ++i) wit.point[i] = F->inv(field_constant(*F, fam.m()));
        if (!is_critical(sub, sub_coeffs, *F, wit.point)) throw std::logic_error("closed-form witness is not critical");
        fv.verdict = Verdict::degenerate;
        fv.witness = std::move(wit);
      } else {
        fv.verdict = Verdict::nondegenerate;
      }
    } else {
      fv.method = "search";
      fv.verdict = Verdict::undetermined;
      for (std::uint32_t s = 1; s <= depth; ++s) {
        try {
          if (auto wit = critical_point_search(sub, sub_coeffs, F, s)) {
            fv.verdict = Verdict::degenerate;
            fv.witness = std::move(wit);
            break;
          }
        } catch (const BudgetError&) {
          break;
        }
      }
    }
    if (fv.verdict == Verdict::degenerate && !out.witness) out.witness = fv.witness;
    if (fv.verdict == Verdict::undetermined) any_undetermined = true;
    out.faces.push_back(std::move(fv));
  }
  out.verdict = out.witness ? Verdict::degenerate : any_undetermined ? Verdict::undetermined : Verdict::nondegenerate;
  return out;
}

NondegVerdict nondegeneracy_verdict(const LaurentFamily& fam, const FieldPtr& F, Elt w, std::uint32_t depth) {
  return nondegeneracy_verdict(fam, newton_polytope(fam), F, w, depth);
}

}  // namespace eik
