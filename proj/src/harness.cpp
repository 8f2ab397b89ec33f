#include "eik/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "eik/errors.hpp"
#include "eik/numtheory.hpp"
#include "eik/sums.hpp"

namespace eik::harness {

namespace {

// Dynamic scheduling over independent jobs; the first exception (by job
// index) is rethrown after all workers stop.
template <class Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn&& fn) {
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t err_index = count;
  std::exception_ptr err;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < err_index) err_index = i, err = std::current_exception();
        next.store(count);
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (err) std::rethrow_exception(err);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string join(const std::vector<std::uint64_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + std::to_string(v[i]);
  return s;
}

template <class T>
T get_uint(const json& v, const char* what) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) throw ConfigError(std::string(what) + ": expected a nonnegative integer");
  return v.get<T>();
}

FieldSpec parse_field(const json& v) {
  FieldSpec s;
  auto from_q = [&](std::uint64_t q) {
    const auto f = prime_factors(q);
    if (q < 2 || f.size() != 1) throw ConfigError("field: q = " + std::to_string(q) + " is not a prime power");
    s.p = static_cast<std::uint32_t>(f[0]);
    s.n = 0;
    for (std::uint64_t t = q; t > 1; t /= s.p) ++s.n;
  };
  if (v.is_number_integer()) {
    from_q(get_uint<std::uint64_t>(v, "field"));
    return s;
  }
  if (!v.is_object()) throw ConfigError("field: expected q or {p, n}");
  for (const auto& [k, val] : v.items()) {
    if (k == "q") from_q(get_uint<std::uint64_t>(val, "field.q"));
    else if (k == "p") s.p = get_uint<std::uint32_t>(val, "field.p");
    else if (k == "n") s.n = get_uint<std::uint32_t>(val, "field.n");
    else if (k == "modulus") s.modulus = val.get<std::vector<std::uint32_t>>();
    else throw ConfigError("field: unknown key '" + k + "'");
  }
  if (s.p == 0 || s.n == 0 || !is_prime(s.p)) throw ConfigError("field: p must be prime and n >= 1");
  return s;
}

ElementSet parse_set(const json& v, const char* what) {
  ElementSet s;
  if (v.is_string()) {
    s.mode = v.get<std::string>();
    if (s.mode != "all" && s.mode != "not_one" && s.mode != "normalized")
      throw ConfigError(std::string(what) + ": unknown selector '" + s.mode + "'");
  } else if (v.is_array()) {
    s.mode = "list";
    s.items = v.get<std::vector<json>>();
  } else if (v.is_number_integer()) {
    s.mode = "list";
    s.items = {v};
  } else {
    throw ConfigError(std::string(what) + ": expected a selector or a list");
  }
  return s;
}

std::pair<std::uint32_t, std::uint32_t> parse_range(const json& v, const char* what) {
  if (v.is_number_integer()) {
    const auto x = get_uint<std::uint32_t>(v, what);
    return {x, x};
  }
  if (!v.is_array() || v.size() != 2) throw ConfigError(std::string(what) + ": expected [lo, hi]");
  const auto lo = get_uint<std::uint32_t>(v[0], what), hi = get_uint<std::uint32_t>(v[1], what);
  if (lo == 0 || lo > hi) throw ConfigError(std::string(what) + ": bad range");
  return {lo, hi};
}

std::vector<FieldSpec> default_polytope_fields() {
  return {{2, 1, {}}, {3, 1, {}}, {2, 2, {}}, {5, 1, {}}, {7, 1, {}}, {2, 3, {}}, {3, 2, {}}};
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

FieldPtr build_field(const FieldSpec& spec) {
  FieldPtr F;
  try {
    F = field(spec.p, spec.n);
  } catch (const BudgetError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("field: ") + e.what());
  }
  if (!spec.modulus.empty() && spec.modulus != F->modulus())
    throw ConfigError("field: modulus differs from the canonical one for " + F->describe());
  return F;
}

Elt parse_element(const FieldTable& F, const json& v) {
  if (v.is_number_integer()) {
    const auto code = v.get<std::int64_t>();
    if (code < 0 || code >= static_cast<std::int64_t>(F.q())) throw ConfigError("element code out of range");
    return F.from_int(static_cast<std::uint64_t>(code));
  }
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s.rfind("g^", 0) == 0) {
      try {
        return F.from_log(std::stoll(s.substr(2)));
      } catch (const std::logic_error&) {
        throw ConfigError("bad element '" + s + "'");
      }
    }
    try {
      return parse_element(F, json(std::stoll(s)));
    } catch (const std::logic_error&) {
      throw ConfigError("bad element '" + s + "'");
    }
  }
  throw ConfigError("element: expected an integer code or \"g^k\"");
}

std::string format_element(const FieldTable& F, Elt x) { return std::to_string(F.to_int(x)); }

std::vector<Elt> ElementSet::resolve(const FieldTable& F) const {
  std::vector<Elt> out;
  if (mode == "list") {
    for (const auto& it : items) {
      const Elt x = parse_element(F, it);
      if (x.is_zero()) throw ConfigError("element list: 0 is not a unit");
      out.push_back(x);
    }
    return out;
  }
  for (std::uint32_t code = 1; code < F.q(); ++code) {
    const Elt x = F.from_int(code);
    if (mode == "not_one" && x == F.one()) continue;
    if (mode == "normalized" && code >= F.p()) continue;
    out.push_back(x);
  }
  return out;
}

const std::vector<std::string>& identity_names() {
  static const std::vector<std::string> names{
      "unfolding", "norm_fiber",  "twist",       "conjugation", "char2_closed_form",          "split_toric",
      "wild_toric", "orthogonality", "gauss",    "fiber_size",  "extended_unfolding"};
  return names;
}

Config parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  Config cfg;
  try {
    for (const auto& [k, v] : j.items()) {
      if (k == "fields") {
        for (const auto& f : v) cfg.fields.push_back(parse_field(f));
      } else if (k == "types") {
        for (const auto& t : v) {
          auto type = t.get<std::vector<std::uint32_t>>();
          std::uint32_t deg = 0;
          for (auto d : type) {
            if (d == 0) throw ConfigError("types: factor degrees must be >= 1");
            deg += d;
          }
          if (deg < 2) throw ConfigError("types: degree n+1 must be >= 2");
          cfg.types.push_back(std::move(type));
        }
      } else if (k == "characters") {
        if (v.is_string() && v.get<std::string>() == "all") cfg.characters.reset();
        else cfg.characters = v.get<std::vector<std::vector<std::int64_t>>>();
      } else if (k == "c") {
        cfg.c = parse_set(v, "c");
      } else if (k == "a") {
        cfg.a = parse_set(v, "a");
      } else if (k == "b") {
        cfg.b = parse_set(v, "b");
      } else if (k == "m") {
        cfg.m.clear();
        if (v.is_array())
          for (const auto& x : v) cfg.m.push_back(get_uint<std::uint32_t>(x, "m"));
        else
          cfg.m.push_back(get_uint<std::uint32_t>(v, "m"));
        for (auto x : cfg.m)
          if (x == 0) throw ConfigError("m: extension degrees must be >= 1");
      } else if (k == "budget") {
        if (!v.is_number() || v.get<double>() <= 0) throw ConfigError("budget: expected a positive number");
        cfg.budget = static_cast<std::uint64_t>(v.get<double>());
      } else if (k == "identities") {
        if (v.is_string() && v.get<std::string>() == "all") continue;
        for (const auto& name : v.get<std::vector<std::string>>()) {
          const auto& all = identity_names();
          if (std::find(all.begin(), all.end(), name) == all.end()) throw ConfigError("identities: unknown '" + name + "'");
          cfg.identities.push_back(name);
        }
      } else if (k == "polytope") {
        PolytopeConfig pc;
        for (const auto& [pk, pv] : v.items()) {
          if (pk == "n") std::tie(pc.n_min, pc.n_max) = parse_range(pv, "polytope.n");
          else if (pk == "m") std::tie(pc.m_min, pc.m_max) = parse_range(pv, "polytope.m");
          else if (pk == "fields")
            for (const auto& f : pv) pc.fields.push_back(parse_field(f));
          else throw ConfigError("polytope: unknown key '" + pk + "'");
        }
        cfg.polytope = pc;
      } else if (k == "depth") {
        cfg.depth = get_uint<std::uint32_t>(v, "depth");
      } else {
        throw ConfigError("config: unknown key '" + k + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config: " + std::string(e.what()));
  }
  return parse_config(j);
}

// ---------------------------------------------------------------------------
// Bounds

Regime classify(const EtaleAlgebra& B, const AddChar& psi, std::uint32_t m, const FieldTable& Fm, Elt a) {
  const std::uint32_t deg = B.degree(), n = deg - 1, p = B.base().p();
  const double Q = std::pow(static_cast<double>(B.base().q()), m);
  const double sq = std::pow(Q, n / 2.0);
  if (deg % p != 0) return {"tame", (2.0 * n + 2.0) * sq};
  if (!psi.is_normalized()) return {"wild-unnormalized", std::nullopt};
  std::uint32_t pk = 1;
  while (deg % (pk * p) == 0) pk *= p;
  if (pk == 2) {
    const auto w0 = exceptional_parameter(Fm, n, deg / pk);
    if (w0 && *w0 == a) return {"wild-exceptional", std::nullopt};
  }
  return {"wild", (n + 1.0) * sq};
}

// ---------------------------------------------------------------------------
// Sweep

namespace {

struct Cell {
  FieldPtr F;
  AlgebraPtr B;
  std::uint32_t m = 1;
  std::shared_ptr<const BaseChange> bc;
  MultChar chi;
};

std::vector<MultChar> characters_for(const Config& cfg, const AlgebraPtr& B) {
  if (!cfg.characters) return MultChar::all(B);
  std::vector<MultChar> out;
  for (const auto& e : *cfg.characters)
    if (e.size() == B->factor_count()) out.emplace_back(B, e);
  return out;
}

AlgebraPtr make_algebra(const FieldPtr& F, const std::vector<std::uint32_t>& type) {
  try {
    return std::make_shared<const EtaleAlgebra>(EtaleAlgebra::make(F->p(), F->n(), type));
  } catch (const BudgetError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("type: ") + e.what());
  }
}

double cell_cost(const EtaleAlgebra& B) {
  const double q = B.base().q();
  return static_cast<double>(B.unit_count()) * q * q;
}

}  // namespace

SweepReport run_sweep(const Config& cfg, unsigned jobs) {
  std::vector<Cell> cells;
  for (const auto& fs : cfg.fields) {
    const FieldPtr F = build_field(fs);
    for (const auto& type : cfg.types) {
      const AlgebraPtr B = make_algebra(F, type);
      for (auto m : cfg.m) {
        std::shared_ptr<const BaseChange> bc;
        const EtaleAlgebra* target = B.get();
        if (m > 1) {
          bc = std::make_shared<const BaseChange>(base_change(*B, m));
          target = bc->algebra.get();
        }
        if (cell_cost(*target) > static_cast<double>(cfg.budget))
          throw BudgetError("sweep: cell q=" + std::to_string(target->base().q()) + " type=" + B->type_string() +
                            " exceeds the budget");
        for (auto& chi : characters_for(cfg, B)) cells.push_back({F, B, m, bc, chi});
      }
    }
  }

  std::vector<std::vector<SweepRow>> out(cells.size());
  parallel_for(cells.size(), jobs, [&](std::size_t i) {
    const Cell& cell = cells[i];
    const FieldTable& F = *cell.F;
    const FieldTable& Fm = cell.bc ? cell.bc->algebra->base() : F;
    const MultChar chi_m = cell.bc ? descend_char(cell.chi, *cell.bc) : cell.chi;
    const std::vector<Elt> cs = cfg.c.resolve(F), as = cfg.a.resolve(Fm);
    for (Elt c : cs) {
      const AddChar psi(cell.F, c);
      const AddChar psi_m = cell.bc ? psi.extend(cell.bc->base_embedding) : psi;
      for (Elt a : as) {
        SweepRow row;
        row.q = F.q();
        row.type = cell.B->type_string();
        row.exps = join(cell.chi.exps());
        row.c = format_element(F, c);
        row.m = cell.m;
        row.a = format_element(Fm, a);
        const Cyclotomic value = eik_sum(chi_m, psi_m, a);
        const Cyclotomic main = main_term(chi_m, a);
        const auto v = value.to_complex(), mt = main.to_complex();
        row.value_re = static_cast<double>(v.real());
        row.value_im = static_cast<double>(v.imag());
        row.main_re = static_cast<double>(mt.real());
        row.main_im = static_cast<double>(mt.imag());
        row.value_exact = value.to_string();
        row.main_exact = main.to_string();
        const Regime reg = classify(*cell.B, psi, cell.m, Fm, a);
        row.regime = reg.name;
        row.bound = reg.bound;
        if (reg.bound) {
          const auto mod = (value + main).abs();
          row.slack = *reg.bound - mod.value;
          row.pass = mod.value <= *reg.bound + kBoundTolerance + mod.error ? "true" : "false";
        } else {
          row.pass = "skip";
        }
        out[i].push_back(std::move(row));
      }
    }
  });

  SweepReport rep;
  for (auto& rows : out)
    for (auto& row : rows) {
      if (row.pass == "true") ++rep.passed;
      else if (row.pass == "false") ++rep.failed;
      else ++rep.skipped;
      rep.rows.push_back(std::move(row));
    }
  return rep;
}

// ---------------------------------------------------------------------------
// Identities

namespace {

struct Tally {
  IdentityRow row;
  Tally(std::string identity, std::string instance) {
    row.identity = std::move(identity);
    row.instance = std::move(instance);
  }
  template <class Detail>
  void expect(bool ok, Detail&& detail) {
    ++row.checks;
    if (!ok && row.pass) {
      row.pass = false;
      row.detail = detail();
    }
  }
};

bool wanted(const Config& cfg, const std::string& name) {
  return cfg.identities.empty() || std::find(cfg.identities.begin(), cfg.identities.end(), name) != cfg.identities.end();
}

bool is_split(const EtaleAlgebra& B) {
  return std::all_of(B.type().begin(), B.type().end(), [](auto d) { return d == 1; });
}

std::string instance_of(const EtaleAlgebra& B, const MultChar* chi) {
  std::string s = "q=" + std::to_string(B.base().q()) + " type=" + B.type_string();
  if (chi) s += " exps=" + join(chi->exps());
  return s;
}

void character_identities(const Config& cfg, const FieldPtr& Fp, const AlgebraPtr& Bp, const MultChar& chi,
                          std::vector<IdentityRow>& rows) {
  const FieldTable& F = *Fp;
  const EtaleAlgebra& B = *Bp;
  const std::string inst = instance_of(B, &chi);
  const auto q = static_cast<std::int64_t>(F.q());
  const auto cs = cfg.c.resolve(F), as = cfg.a.resolve(F);
  auto at = [&](Elt c, Elt a) { return " c=" + format_element(F, c) + " a=" + format_element(F, a); };

  if (wanted(cfg, "unfolding")) {
    Tally t("unfolding", inst);
    for (Elt c : cs) {
      const AddChar psi(Fp, c);
      for (Elt a : as) {
        const auto eik = eik_sum(chi, psi, a);
        const auto S = norm_fiber_char_sum(chi, a);
        const auto parts = unfolded_parts(chi, psi, a);
        const auto qe = eik.scaled(q, 1);
        t.expect(unfolded_sum(chi, psi, a) == qe, [&] { return "U != q EIK at" + at(c, a); });
        t.expect(parts.i_part == -S, [&] { return "i-part != -S at" + at(c, a); });
        t.expect(parts.j_part == qe + S, [&] { return "j-part != q EIK + S at" + at(c, a); });
      }
    }
    rows.push_back(t.row);
  }

  if (wanted(cfg, "norm_fiber")) {
    Tally t("norm_fiber", inst);
    const auto e0 = is_norm_induced(chi);
    for (Elt a : as) {
      const auto S = norm_fiber_char_sum(chi, a);
      const auto expect = e0 ? eval_base_char(F, *e0, a).scaled(static_cast<std::int64_t>(B.fiber_size()), 1)
                             : Cyclotomic();
      t.expect(S == expect, [&] { return "S != closed form at a=" + format_element(F, a); });
    }
    bool trivial_on_kernel = true;
    B.for_each_in_fiber(F.one(), [&](std::span<const Elt> x) {
      if (!(chi.eval(x) == Cyclotomic::integer(1))) trivial_on_kernel = false;
    });
    t.expect(trivial_on_kernel == e0.has_value(), [] { return std::string("is_norm_induced disagrees with N^-1(1)"); });
    rows.push_back(t.row);
  }

  if (wanted(cfg, "twist")) {
    Tally t("twist", inst);
    const auto bs = cfg.b.resolve(F);
    const auto deg = static_cast<std::int64_t>(B.degree());
    for (Elt c : cs) {
      const AddChar psi(Fp, c);
      for (Elt a : as)
        for (Elt b : bs) {
          const auto lhs = eik_sum(chi, psi.scaled(b), a);
          const auto rhs = chi.eval_diagonal(b) * eik_sum(chi, psi, F.mul(a, F.pow(b, -deg)));
          t.expect(lhs == rhs, [&] { return "mismatch at" + at(c, a) + " b=" + format_element(F, b); });
        }
    }
    rows.push_back(t.row);
  }

  if (wanted(cfg, "conjugation")) {
    Tally t("conjugation", inst);
    for (Elt c : cs) {
      const AddChar psi(Fp, c);
      for (Elt a : as)
        t.expect(eik_sum(chi.conj(), psi.conj(), a) == eik_sum(chi, psi, a).conj(),
                 [&] { return "mismatch at" + at(c, a); });
    }
    rows.push_back(t.row);
  }

  if (wanted(cfg, "char2_closed_form") && F.p() == 2 && B.type() == std::vector<std::uint32_t>{1, 1}) {
    Tally t("char2_closed_form", inst);
    const AddChar psi(Fp, F.one());
    const std::uint64_t lam = (chi.exps()[0] + F.order() - chi.exps()[1]) % F.order();
    Cyclotomic rhs;
    for (std::uint32_t l = 1; l < F.order(); ++l) rhs += eval_base_char(F, lam, Elt::from_log(l));
    t.expect(eik_sum(chi, psi, F.one()) == rhs, [] { return std::string("closed form fails at a=1"); });
    rows.push_back(t.row);
  }

  if (wanted(cfg, "split_toric") && is_split(B)) {
    Tally t("split_toric", inst);
    for (Elt c : cs) {
      const AddChar psi(Fp, c);
      for (Elt a : as) {
        const auto lhs = eik_sum(chi, psi, a).scaled(q, 1) + norm_fiber_char_sum(chi, a);
        t.expect(lhs == split_toric_rhs(chi, psi, a), [&] { return "mismatch at" + at(c, a); });
      }
    }
    rows.push_back(t.row);
  }

  if (wanted(cfg, "wild_toric") && is_split(B) && B.degree() % F.p() == 0) {
    Tally t("wild_toric", inst);
    for (Elt c : cs) {
      const AddChar psi(Fp, c);
      if (!psi.is_normalized()) continue;
      for (Elt w : as) {
        const WildChain chain = wild_toric_chain(chi, psi, w);
        for (std::size_t s = 1; s < chain.stages.size(); ++s)
          t.expect(chain.stages[s] == chain.stages[0],
                   [&] { return "stage " + std::to_string(s) + " differs at c=" + format_element(F, c) +
                                " w=" + format_element(F, w); });
        const Elt a = F.pow(w, chain.pk);
        const auto lhs = eik_sum(chi, psi, a).scaled(q, 1) + norm_fiber_char_sum(chi, a);
        t.expect(lhs == eval_base_char(F, chi.exps().back(), a) * chain.stages.back(),
                 [&] { return "EIK link fails at c=" + format_element(F, c) + " w=" + format_element(F, w); });
      }
    }
    if (t.row.checks) rows.push_back(t.row);
  }

  if (wanted(cfg, "orthogonality")) {
    Tally t("orthogonality", inst);
    std::vector<std::int64_t> hist;
    const std::uint64_t N = chi.conductor();
    hist.assign(N, 0);
    const auto wts = chi.log_weights(N);
    B.for_each_unit([&](std::span<const Elt> x) {
      std::uint64_t e = 0;
      for (std::size_t i = 0; i < x.size(); ++i) e = (e + mulmod(wts[i], x[i].log(), N)) % N;
      ++hist[e];
    });
    const auto sum = Cyclotomic::from_exponent_counts(N, hist);
    const auto expect = chi.is_trivial() ? Cyclotomic::integer(static_cast<std::int64_t>(B.unit_count())) : Cyclotomic();
    t.expect(sum == expect, [] { return std::string("sum over B* is wrong"); });
    rows.push_back(t.row);
  }

  if (wanted(cfg, "extended_unfolding")) {
    for (auto m : cfg.m) {
      if (m == 1) continue;
      const BaseChange bc = base_change(B, m);
      const FieldTable& Fm = bc.algebra->base();
      const MultChar chi_m = descend_char(chi, bc);
      Tally t("extended_unfolding", inst + " m=" + std::to_string(m));
      for (Elt c : cs) {
        const AddChar psi_m = AddChar(Fp, c).extend(bc.base_embedding);
        for (Elt a : cfg.a.resolve(Fm)) {
          const auto lhs = unfolded_sum(chi_m, psi_m, a);
          const auto rhs = eik_extended(chi, AddChar(Fp, c), bc, a).scaled(Fm.q(), 1);
          t.expect(lhs == rhs, [&] { return "mismatch at c=" + format_element(F, c) + " a=" + format_element(Fm, a); });
        }
      }
      rows.push_back(t.row);
    }
  }
}

}  // namespace

IdentityReport verify_identities(const Config& cfg, unsigned jobs) {
  struct Job {
    FieldPtr F;
    AlgebraPtr B;  // null: per-field job
    std::optional<MultChar> chi;
  };
  std::vector<Job> work;
  for (const auto& fs : cfg.fields) {
    const FieldPtr F = build_field(fs);
    work.push_back({F, nullptr, std::nullopt});
    for (const auto& type : cfg.types) {
      const AlgebraPtr B = make_algebra(F, type);
      for (auto m : cfg.m) {
        const bool extended = m > 1 && wanted(cfg, "extended_unfolding");
        const double cost = extended ? cell_cost(*base_change(*B, m).algebra) : cell_cost(*B);
        if (cost > static_cast<double>(cfg.budget))
          throw BudgetError("verify: cell q=" + std::to_string(F->q()) + " type=" + B->type_string() +
                            " m=" + std::to_string(m) + " exceeds the budget");
      }
      work.push_back({F, B, std::nullopt});
      for (auto& chi : characters_for(cfg, B)) work.push_back({F, B, chi});
    }
  }

  std::vector<std::vector<IdentityRow>> out(work.size());
  parallel_for(work.size(), jobs, [&](std::size_t i) {
    const Job& job = work[i];
    const FieldTable& F = *job.F;
    if (!job.B) {
      if (!wanted(cfg, "gauss")) return;
      Tally t("gauss", "q=" + std::to_string(F.q()));
      for (Elt c : cfg.c.resolve(F)) {
        const AddChar psi(job.F, c);
        for (std::uint64_t e0 = 1; e0 < F.order(); ++e0) {
          Cyclotomic g;
          for (std::uint32_t l = 0; l < F.order(); ++l) g += eval_base_char(F, e0, Elt::from_log(l)) * psi.eval(Elt::from_log(l));
          const auto mod = g.abs();
          t.expect(g * g.conj() == Cyclotomic::integer(F.q()) &&
                       std::fabs(mod.value - std::sqrt(static_cast<double>(F.q()))) <= 1e-9 + mod.error,
                   [&] { return "|g|^2 != q for e0=" + std::to_string(e0) + " c=" + format_element(F, c); });
        }
      }
      if (t.row.checks) out[i].push_back(t.row);
      return;
    }
    if (!job.chi) {
      if (!wanted(cfg, "fiber_size")) return;
      Tally t("fiber_size", instance_of(*job.B, nullptr));
      for (Elt a : cfg.a.resolve(F)) {
        std::uint64_t count = 0;
        job.B->for_each_in_fiber(a, [&](std::span<const Elt>) { ++count; });
        t.expect(count == job.B->fiber_size(), [&] { return "|N^-1(a)| wrong at a=" + format_element(F, a); });
      }
      out[i].push_back(t.row);
      return;
    }
    character_identities(cfg, job.F, job.B, *job.chi, out[i]);
  });

  IdentityReport rep;
  for (auto& rows : out)
    for (auto& row : rows) {
      (row.pass ? rep.passed : rep.failed)++;
      rep.rows.push_back(std::move(row));
    }
  return rep;
}

// ---------------------------------------------------------------------------
// Polytope report

bool PolytopeReport::ok() const {
  return std::all_of(rows.begin(), rows.end(), [](const PolytopeRow& r) { return r.pass; });
}

PolytopeReport polytope_report(const PolytopeConfig& cfg, std::uint32_t depth, unsigned jobs) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> grid;
  for (std::uint32_t n = cfg.n_min; n <= cfg.n_max; ++n)
    for (std::uint32_t m = cfg.m_min; m <= cfg.m_max; ++m) grid.push_back({n, m});
  std::vector<FieldPtr> fields;
  for (const auto& fs : cfg.fields.empty() ? default_polytope_fields() : cfg.fields) fields.push_back(build_field(fs));

  PolytopeReport rep;
  rep.rows.resize(grid.size());
  parallel_for(grid.size(), jobs, [&](std::size_t idx) {
    const auto [n, m] = grid[idx];
    PolytopeRow& row = rep.rows[idx];
    row.n = n;
    row.m = m;
    row.regime = fhat_regime(n, m);
    const auto fam = LaurentFamily::fhat_family(n, m);
    const auto P = newton_polytope(fam);
    const auto facets = facets_off_origin(P);
    row.facet_count = facets.size();
    row.expected_facet_count = n + 1 < 2 * m ? 2 : n + 1 == 2 * m ? 1 : n + 1;
    row.volume = normalized_volume(P);
    row.expected_volume = n + 1 <= 2 * m ? 2 * m : n + 1;
    for (const auto& f : facets) {
      FacetInfo fi{f.normal, f.offset, f.equation(), f.monomials, diagonal_determinant(fam, f.monomials)};
      if (n + 1 < 2 * m) {
        const bool through = std::count(f.monomials.begin(), f.monomials.end(), std::size_t{n});
        row.determinants_ok &= fi.determinant == std::optional<std::int64_t>(through ? m : -std::int64_t{m});
      } else if (n + 1 == 2 * m) {
        row.determinants_ok &= !fi.determinant && f.monomials.size() == n + 3;
      } else {
        row.determinants_ok &= fi.determinant && std::abs(*fi.determinant) == 1;
      }
      row.facets.push_back(std::move(fi));
    }
    if (n + 1 == 2 * m) {
      std::uint64_t den = 1;
      for (std::uint32_t i = 0; i <= n; ++i) den *= m;
      row.exceptional = den == 1 ? "1" : "1/" + std::to_string(den);
    }

    std::vector<std::size_t> all(fam.monomials().size());
    std::iota(all.begin(), all.end(), 0);
    for (const auto& F : fields) {
      FieldCheck fc;
      fc.q = F->q();
      if (m % F->p() == 0) {
        fc.skipped = true;
        row.fields.push_back(fc);
        continue;
      }
      std::optional<Elt> w0;
      if (n + 1 == 2 * m) {
        w0 = exceptional_parameter(*F, n, m);
        fc.exceptional = format_element(*F, *w0);
      }
      for (std::uint32_t l = 0; l < F->order(); ++l) {
        const Elt w = Elt::from_log(l);
        const auto v = nondegeneracy_verdict(fam, P, F, w, depth);
        if (l == 0) {
          fc.faces = static_cast<std::uint32_t>(v.faces.size());
          for (const auto& fv : v.faces) {
            fc.by_rank += fv.method == "rank";
            fc.by_closed_form += fv.method == "closed_form";
            fc.by_search += fv.method == "search";
          }
        }
        if (v.verdict == Verdict::degenerate) fc.degenerate.push_back(format_element(*F, w));
        if (v.verdict == Verdict::undetermined) fc.undetermined.push_back(format_element(*F, w));
        if (w0) {
          const auto coeffs = fam.coefficients(*F, w);
          bool found = false;
          for (std::uint32_t s = 1; s <= std::min<std::uint32_t>(2, depth) && !found; ++s) {
            try {
              found = critical_point_search(fam, coeffs, F, s).has_value();
            } catch (const BudgetError&) {
              break;
            }
          }
          fc.search_confirms &= found == (w == *w0);
        }
      }
      std::vector<std::string> expect_deg;
      if (w0) expect_deg.push_back(*fc.exceptional);
      fc.pass = fc.degenerate == expect_deg && fc.undetermined.empty() && fc.search_confirms;
      row.fields.push_back(fc);
    }
    row.pass = row.facet_count == row.expected_facet_count && row.volume == row.expected_volume && row.determinants_ok &&
               std::all_of(row.fields.begin(), row.fields.end(), [](const FieldCheck& f) { return f.pass; });
  });
  return rep;
}

// ---------------------------------------------------------------------------
// Writers

void write_csv(const SweepReport& r, std::ostream& os) {
  os << "q,type,exps,c,m,a,regime,value_re,value_im,main_re,main_im,bound,slack,pass\n";
  for (const auto& row : r.rows) {
    os << row.q << ",\"" << row.type << "\"," << row.exps << "," << row.c << "," << row.m << "," << row.a << ","
       << row.regime << "," << fmt(row.value_re) << "," << fmt(row.value_im) << "," << fmt(row.main_re) << ","
       << fmt(row.main_im) << "," << (row.bound ? fmt(*row.bound) : "") << "," << (row.slack ? fmt(*row.slack) : "")
       << "," << row.pass << "\n";
  }
}

void write_csv(const IdentityReport& r, std::ostream& os) {
  os << "identity,instance,checks,pass,detail\n";
  for (const auto& row : r.rows)
    os << row.identity << ",\"" << row.instance << "\"," << row.checks << "," << (row.pass ? "true" : "false") << ",\""
       << row.detail << "\"\n";
}

void write_csv(const PolytopeReport& r, std::ostream& os) {
  os << "n,m,regime,facets,expected_facets,volume,expected_volume,determinants,exceptional,pass\n";
  for (const auto& row : r.rows) {
    std::string dets;
    for (const auto& f : row.facets)
      dets += (dets.empty() ? "" : ";") + (f.determinant ? std::to_string(*f.determinant) : std::string("-"));
    os << row.n << "," << row.m << "," << row.regime << "," << row.facet_count << "," << row.expected_facet_count << ","
       << row.volume << "," << row.expected_volume << "," << dets << "," << row.exceptional << ","
       << (row.pass ? "true" : "false") << "\n";
  }
}

json to_json(const SweepReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json j{{"q", row.q},         {"type", row.type},         {"exps", row.exps},     {"c", row.c},
           {"m", row.m},         {"a", row.a},               {"regime", row.regime}, {"value", row.value_exact},
           {"main", row.main_exact}, {"value_re", row.value_re}, {"value_im", row.value_im},
           {"main_re", row.main_re}, {"main_im", row.main_im}, {"pass", row.pass}};
    j["bound"] = row.bound ? json(*row.bound) : json(nullptr);
    j["slack"] = row.slack ? json(*row.slack) : json(nullptr);
    rows.push_back(std::move(j));
  }
  return {{"summary", {{"rows", r.rows.size()}, {"passed", r.passed}, {"failed", r.failed}, {"skipped", r.skipped}}},
          {"rows", rows}};
}

json to_json(const IdentityReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"identity", row.identity},
                    {"instance", row.instance},
                    {"checks", row.checks},
                    {"pass", row.pass},
                    {"detail", row.detail}});
  return {{"summary", {{"rows", r.rows.size()}, {"passed", r.passed}, {"failed", r.failed}}}, {"rows", rows}};
}

json to_json(const PolytopeReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json facets = json::array();
    for (const auto& f : row.facets) {
      facets.push_back({{"normal", f.normal},
                        {"offset", f.offset},
                        {"equation", f.equation},
                        {"monomials", f.monomials},
                        {"determinant", f.determinant ? json(*f.determinant) : json(nullptr)}});
    }
    json fields = json::array();
    for (const auto& fc : row.fields) {
      fields.push_back({{"q", fc.q},
                        {"skipped", fc.skipped},
                        {"exceptional", fc.exceptional ? json(*fc.exceptional) : json(nullptr)},
                        {"degenerate", fc.degenerate},
                        {"undetermined", fc.undetermined},
                        {"faces", fc.faces},
                        {"by_rank", fc.by_rank},
                        {"by_closed_form", fc.by_closed_form},
                        {"by_search", fc.by_search},
                        {"search_confirms", fc.search_confirms},
                        {"pass", fc.pass}});
    }
    rows.push_back({{"n", row.n},
                    {"m", row.m},
                    {"regime", row.regime},
                    {"facet_count", row.facet_count},
                    {"volume", row.volume},
                    {"expected_volume", row.expected_volume},
                    {"exceptional", row.exceptional},
                    {"determinants_ok", row.determinants_ok},
                    {"facets", facets},
                    {"fields", fields},
                    {"pass", row.pass}});
  }
  return {{"summary", {{"rows", r.rows.size()}, {"ok", r.ok()}}}, {"rows", rows}};
}

}  // namespace eik::harness
