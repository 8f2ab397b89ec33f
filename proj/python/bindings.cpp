#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "eik/errors.hpp"
#include "eik/harness.hpp"
#include "eik/sums.hpp"

namespace py = pybind11;
using namespace eik;
using harness::json;

namespace {

struct Setup {
  FieldPtr F;
  AlgebraPtr B;
  std::optional<MultChar> chi;
};

FieldPtr field_of(std::uint64_t q) {
  return harness::build_field(harness::parse_config(json{{"fields", {q}}}).fields.at(0));
}

Setup setup(std::uint64_t q, const std::vector<std::uint32_t>& type, std::vector<std::int64_t> exps) {
  Setup s;
  s.F = field_of(q);
  s.B = std::make_shared<const EtaleAlgebra>(EtaleAlgebra::make(s.F->p(), s.F->n(), type));
  if (exps.empty()) exps.assign(s.B->factor_count(), 0);
  s.chi.emplace(s.B, exps);
  return s;
}

Elt element(const FieldTable& F, const py::object& v) {
  if (py::isinstance<py::int_>(v)) return harness::parse_element(F, json(v.cast<std::int64_t>()));
  return harness::parse_element(F, json(v.cast<std::string>()));
}

py::dict value(const Cyclotomic& z) {
  py::dict d;
  const auto c = z.to_complex();
  d["value"] = std::complex<double>(static_cast<double>(c.real()), static_cast<double>(c.imag()));
  d["exact"] = z.to_string();
  return d;
}

py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

harness::Config config_of(const py::object& cfg) {
  const std::string text = py::isinstance<py::str>(cfg) ? cfg.cast<std::string>()
                                                          : py::module_::import("json").attr("dumps")(cfg).cast<std::string>();
  try {
    return harness::parse_config(json::parse(text));
  } catch (const json::exception& e) {
    throw ConfigError(e.what());
  }
}

using Type = std::vector<std::uint32_t>;
using Exps = std::vector<std::int64_t>;

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact exotic and inverted Kloosterman sums over finite etale algebras";

  static py::exception<ConfigError> config_error(m, "ConfigError", PyExc_ValueError);
  static py::exception<BudgetError> budget_error(m, "BudgetError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      config_error(e.what());
    } catch (const BudgetError& e) {
      budget_error(e.what());
    }
  });

  m.def(
      "field_info",
      [](std::uint64_t q) {
        const FieldPtr F = field_of(q);
        py::dict d;
        d["p"] = F->p();
        d["n"] = F->n();
        d["q"] = F->q();
        d["modulus"] = F->modulus();
        d["gen"] = F->to_int(F->gen());
        std::vector<std::uint32_t> powers;
        for (std::uint32_t l = 0; l < F->order(); ++l) powers.push_back(F->to_int(Elt::from_log(l)));
        d["powers_of_gen"] = powers;
        return d;
      },
      py::arg("q"));

  m.def(
      "eik",
      [](std::uint64_t q, const Type& type, const Exps& exps, py::object c, py::object a, std::uint32_t ext) {
        const Setup s = setup(q, type, exps);
        const AddChar psi(s.F, element(*s.F, c));
        if (ext == 1) return value(eik_sum(*s.chi, psi, element(*s.F, a)));
        const BaseChange bc = base_change(*s.B, ext);
        return value(eik_extended(*s.chi, psi, bc, element(bc.algebra->base(), a)));
      },
      py::arg("q"), py::arg("type"), py::arg("exps") = Exps{}, py::arg("c") = 1, py::arg("a") = 1, py::arg("m") = 1,
      "Inverted sum over the norm fiber; m > 1 works over F_{q^m}.");

  m.def(
      "ek",
      [](std::uint64_t q, const Type& type, const Exps& exps, py::object c, py::object a) {
        const Setup s = setup(q, type, exps);
        return value(ek_sum(*s.chi, AddChar(s.F, element(*s.F, c)), element(*s.F, a)));
      },
      py::arg("q"), py::arg("type"), py::arg("exps") = Exps{}, py::arg("c") = 1, py::arg("a") = 1);

  m.def(
      "main_term",
      [](std::uint64_t q, const Type& type, const Exps& exps, py::object a) {
        const Setup s = setup(q, type, exps);
        return value(main_term(*s.chi, element(*s.F, a)));
      },
      py::arg("q"), py::arg("type"), py::arg("exps") = Exps{}, py::arg("a") = 1);

  m.def(
      "norm_fiber_sum",
      [](std::uint64_t q, const Type& type, const Exps& exps, py::object a) {
        const Setup s = setup(q, type, exps);
        return value(norm_fiber_char_sum(*s.chi, element(*s.F, a)));
      },
      py::arg("q"), py::arg("type"), py::arg("exps") = Exps{}, py::arg("a") = 1);

  m.def(
      "unfolded",
      [](std::uint64_t q, const Type& type, const Exps& exps, py::object c, py::object a) {
        const Setup s = setup(q, type, exps);
        return value(unfolded_sum(*s.chi, AddChar(s.F, element(*s.F, c)), element(*s.F, a)));
      },
      py::arg("q"), py::arg("type"), py::arg("exps") = Exps{}, py::arg("c") = 1, py::arg("a") = 1);

  m.def(
      "is_norm_induced",
      [](std::uint64_t q, const Type& type, const Exps& exps) { return is_norm_induced(*setup(q, type, exps).chi); },
      py::arg("q"), py::arg("type"), py::arg("exps") = Exps{},
      "Exponent e0 with chi = chi_0 o N where chi_0(g) = zeta^e0, or None.");

  m.def(
      "characters",
      [](std::uint64_t q, const Type& type) {
        const Setup s = setup(q, type, {});
        std::vector<std::vector<std::uint64_t>> out;
        for (const auto& chi : MultChar::all(s.B)) out.push_back(chi.exps());
        return out;
      },
      py::arg("q"), py::arg("type"));

  m.def(
      "newton_polytope",
      [](std::uint32_t n, std::uint32_t mm) {
        const auto fam = LaurentFamily::fhat_family(n, mm);
        const auto P = newton_polytope(fam);
        py::list facets;
        for (const auto& f : facets_off_origin(P)) {
          py::dict d;
          d["normal"] = f.normal;
          d["offset"] = f.offset;
          d["equation"] = f.equation();
          d["monomials"] = f.monomials;
          d["determinant"] = diagonal_determinant(fam, f.monomials);
          facets.append(d);
        }
        py::dict d;
        d["dim"] = P.dim;
        d["points"] = P.points;
        d["vertices"] = P.vertices;
        d["facets"] = facets;
        d["volume"] = normalized_volume(P);
        d["regime"] = fhat_regime(n, mm);
        return d;
      },
      py::arg("n"), py::arg("m"), "Newton polytope at infinity of the fhat family.");

  m.def(
      "nondegeneracy",
      [](std::uint32_t n, std::uint32_t mm, std::uint64_t q, py::object w, std::uint32_t depth) {
        const FieldPtr F = field_of(q);
        const auto v = nondegeneracy_verdict(LaurentFamily::fhat_family(n, mm), F, element(*F, w), depth);
        py::dict d;
        d["verdict"] = to_string(v.verdict);
        d["depth"] = v.depth;
        if (v.witness) {
          std::vector<std::uint32_t> pt;
          for (Elt x : v.witness->point) pt.push_back(v.witness->field->to_int(x));
          d["witness_degree"] = v.witness->degree;
          d["witness"] = pt;
        }
        return d;
      },
      py::arg("n"), py::arg("m"), py::arg("q"), py::arg("w"), py::arg("depth") = kDefaultDepth);

  m.def(
      "sweep",
      [](const py::object& cfg, unsigned jobs) {
        const auto c = config_of(cfg);
        harness::SweepReport r;
        {
          py::gil_scoped_release release;
          r = harness::run_sweep(c, jobs);
        }
        return to_py(harness::to_json(r));
      },
      py::arg("config"), py::arg("jobs") = 1, "Bound sweep; config is a dict or JSON string.");

  m.def(
      "verify",
      [](const py::object& cfg, unsigned jobs) {
        const auto c = config_of(cfg);
        harness::IdentityReport r;
        {
          py::gil_scoped_release release;
          r = harness::verify_identities(c, jobs);
        }
        return to_py(harness::to_json(r));
      },
      py::arg("config"), py::arg("jobs") = 1);

  m.def(
      "polytope_report",
      [](const py::object& cfg, std::uint32_t depth, unsigned jobs) {
        const auto c = config_of(cfg);
        const harness::PolytopeConfig pc = c.polytope.value_or(harness::PolytopeConfig{});
        harness::PolytopeReport r;
        {
          py::gil_scoped_release release;
          r = harness::polytope_report(pc, depth, jobs);
        }
        return to_py(harness::to_json(r));
      },
      py::arg("config") = py::dict(), py::arg("depth") = kDefaultDepth, py::arg("jobs") = 1);
}
