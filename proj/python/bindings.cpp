// Python surface: thin wrappers over the core ops, returning plain values.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include "fraclab/algebraic.hpp"
#include "fraclab/boxcount.hpp"
#include "fraclab/dim_bounds.hpp"
#include "fraclab/exact.hpp"
#include "fraclab/ifs.hpp"
#include "fraclab/overlap.hpp"
#include "fraclab/polynomial.hpp"
#include "fraclab/separation.hpp"
#include "fraclab/sphere.hpp"
#include "fraclab/version.hpp"

namespace py = pybind11;
using namespace fraclab;

namespace {

FieldPtr field_from_text(const std::string& poly) {
  return make_field(IntPolynomial::parse(poly));
}

Corollary corollary_from_name(const std::string& name) {
  if (name == "cor2") return Corollary::cor2;
  if (name == "cor3") return Corollary::cor3;
  if (name == "cor4") return Corollary::cor4;
  throw DomainError("unknown corollary: " + name);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "box dimensions of inhomogeneous self-similar attractors";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DomainError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const ResourceError& e) {
      PyErr_SetString(PyExc_RuntimeError, e.what());
    } catch (const PrecisionError& e) {
      PyErr_SetString(PyExc_ArithmeticError, e.what());
    }
  });

  m.def("version", [] { return std::string(kVersion); });

  m.def(
      "thm1_bound",
      [](double s, double alpha, double beta, double gamma, int d) {
        auto r = thm1_bound(BoundInputs{s, alpha, beta, gamma, d});
        return std::make_pair(r.value, r.argmax_x);
      },
      py::arg("s"), py::arg("alpha"), py::arg("beta"), py::arg("gamma"),
      py::arg("d"),
      "Envelope upper bound and its smallest maximiser, as (value, x_star).");

  m.def(
      "corollary_bound",
      [](const std::string& which, double s, double alpha, double beta,
         double gamma, int d) {
        return corollary_bound(corollary_from_name(which),
                               BoundInputs{s, alpha, beta, gamma, d});
      },
      py::arg("which"), py::arg("s"), py::arg("alpha"), py::arg("beta"),
      py::arg("gamma"), py::arg("d"),
      "Closed-form bound cor2/cor3/cor4 for the matching special case.");

  m.def(
      "classify",
      [](const std::string& poly) {
        auto theta = AlgebraicNumber::largest_real_root(IntPolynomial::parse(poly));
        return std::string(to_string(classify_lambda(theta).kind));
      },
      py::arg("poly"),
      "Classify lambda = 1/theta for the largest real root theta of poly.");

  m.def(
      "classify_value",
      [](double lam) { return std::string(to_string(classify_lambda(lam).kind)); },
      py::arg("lam"));

  m.def(
      "comb_dimension",
      [](double lam, int m_lo, int m_hi) {
        auto curve = count_curve(bernoulli_comb(lam), m_lo, m_hi);
        return estimate_dimension(curve, m_lo, m_hi).slope;
      },
      py::arg("lam"), py::arg("m_lo") = 6, py::arg("m_hi") = 12,
      "Box-dimension slope of the comb orbital set over mesh exponents "
      "[m_lo, m_hi].");

  m.def(
      "comb_counts_csv",
      [](double lam, int m_lo, int m_hi) {
        return to_csv(count_curve(bernoulli_comb(lam), m_lo, m_hi));
      },
      py::arg("lam"), py::arg("m_lo") = 4, py::arg("m_hi") = 10);

  m.def(
      "separation_csv",
      [](double lam, int n_max) { return table_csv(separation_table(lam, n_max)); },
      py::arg("lam"), py::arg("n_max") = 12);

  m.def(
      "scaled_gap",
      [](double lam, int n) { return gap_report(lam, n).scaled_gap; },
      py::arg("lam"), py::arg("n"),
      "Minimal distance of the length-n sum set, scaled by 2^n.");

  m.def(
      "exact_collision",
      [](const std::string& poly, int n) -> std::optional<std::pair<std::string, std::string>> {
        auto g = gap_report_exact(field_from_text(poly), n);
        if (!g.zero_gap) return std::nullopt;
        return std::make_pair(word_bits_to_string(g.word_a, n),
                              word_bits_to_string(g.word_b, n));
      },
      py::arg("poly"), py::arg("n"),
      "Pair of binary words with identical sums, or None.");

  m.def(
      "wsp_overall",
      [](const std::string& poly, int max_len) {
        return wsp_margin(exact_comb(field_from_text(poly)), max_len).overall;
      },
      py::arg("poly"), py::arg("max_len") = 4);

  m.def(
      "orbit_eps",
      [](int n_max, int m) {
        return orbit_counts(default_rotation_set(), Vec{1.0, 0.0, 0.0}, n_max, m)
            .eps_hat;
      },
      py::arg("n_max") = 8, py::arg("m") = 6,
      "Fitted per-step growth factor minus 1 for the default sphere orbit.");

  m.def(
      "scan_csv",
      [](double lo, double hi, int samples, int n_max, std::uint64_t seed) {
        return scan_csv(monte_carlo_scan(lo, hi, samples, n_max, seed));
      },
      py::arg("lo") = 0.5, py::arg("hi") = 0.668, py::arg("samples") = 10,
      py::arg("n_max") = 12, py::arg("seed") = 0xF1D0);
}
