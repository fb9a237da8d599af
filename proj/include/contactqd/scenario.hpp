#ifndef CONTACTQD_SCENARIO_HPP
#define CONTACTQD_SCENARIO_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "contactqd/dynamics.hpp"
#include "contactqd/errors.hpp"
#include "contactqd/operators.hpp"
#include "contactqd/state_space.hpp"

namespace cqd {

/// A simulation scenario as loaded from the line-oriented key/value format:
///
///   n = 2
///   hbar = 1
///   hamiltonian:            # n rows, each with n (re im) pairs
///     4 0   1 1
///     1 -1  2 0
///   dissipation = linear 1  # none | linear G | general poly c0 c1 ...
///   initial_chart = 2       # explicit start: chart, coords, fiber value
///   initial_z = 0.3 0
///   initial_S = 0
///   # or: excited_start = true        (exact north pole, n = 2)
///   # or: kappa0 = 1e-3 / phi0 = 0    (start on the decay branch)
///   t_end = 20
///   samples = 2001
struct Scenario {
  enum class Dissipation { none, linear, general_poly };
  enum class Initial { coords, excited, kappa };

  int n = 0;
  double hbar = 1.0;
  Eigen::MatrixXcd hamiltonian;

  Dissipation dissipation = Dissipation::none;
  double gamma = 0.0;
  std::vector<double> poly;  // f(S) = sum_k poly[k] S^k

  Initial initial = Initial::coords;
  int initial_chart = 0;  // 0 = last
  Eigen::VectorXcd initial_z;
  double initial_S = 0.0;
  double kappa0 = 0.0;
  double phi0 = 0.0;

  double t_end = 10.0;
  int samples = 101;
  int reference_chart = 0;  // 0 = last

  // requested observable columns; empty = all of z S e_H var_H P bloch
  std::vector<std::string> outputs;

  bool operator==(const Scenario& o) const {
    return n == o.n && hbar == o.hbar &&
           hamiltonian.rows() == o.hamiltonian.rows() &&
           (hamiltonian.array() == o.hamiltonian.array()).all() &&
           dissipation == o.dissipation && gamma == o.gamma &&
           poly == o.poly && initial == o.initial &&
           initial_chart == o.initial_chart &&
           initial_z.size() == o.initial_z.size() &&
           (initial_z.array() == o.initial_z.array()).all() &&
           initial_S == o.initial_S && kappa0 == o.kappa0 && phi0 == o.phi0 &&
           t_end == o.t_end && samples == o.samples &&
           reference_chart == o.reference_chart && outputs == o.outputs;
  }

  bool wants(const std::string& column) const {
    if (outputs.empty()) return true;
    for (const auto& c : outputs)
      if (c == column) return true;
    return false;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

inline double parse_number(const std::string& tok, int line) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw ParseError("expected a number, got '" + tok + "'", line);
  }
  if (pos != tok.size())
    throw ParseError("trailing characters in number '" + tok + "'", line);
  return v;
}

// lossless double -> text
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline Scenario parse_scenario(std::istream& in) {
  Scenario sc;
  std::string line;
  int line_no = 0;
  bool have_n = false, have_h = false, have_initial = false;

  auto read_matrix_block = [&](int n) {
    Eigen::MatrixXcd h(n, n);
    for (int r = 0; r < n; ++r) {
      std::string row;
      do {
        if (!std::getline(in, row))
          throw ParseError("hamiltonian block ended early (row " +
                               std::to_string(r + 1) + " of " +
                               std::to_string(n) + " missing)",
                           line_no);
        ++line_no;
        auto h_pos = row.find('#');
        if (h_pos != std::string::npos) row = row.substr(0, h_pos);
        row = detail::trim(row);
      } while (row.empty());
      const auto toks = detail::split_ws(row);
      if (static_cast<int>(toks.size()) != 2 * n)
        throw ParseError("hamiltonian row " + std::to_string(r + 1) +
                             " needs " + std::to_string(2 * n) +
                             " numbers (re im pairs), got " +
                             std::to_string(toks.size()),
                         line_no);
      for (int c = 0; c < n; ++c)
        h(r, c) = Complex(detail::parse_number(toks[2 * c], line_no),
                          detail::parse_number(toks[2 * c + 1], line_no));
    }
    return h;
  };

  while (std::getline(in, line)) {
    ++line_no;
    auto h_pos = line.find('#');
    if (h_pos != std::string::npos) line = line.substr(0, h_pos);
    line = detail::trim(line);
    if (line.empty()) continue;

    if (line == "hamiltonian:") {
      if (!have_n)
        throw ParseError("'n' must be set before the hamiltonian block",
                         line_no);
      sc.hamiltonian = read_matrix_block(sc.n);
      have_h = true;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected 'key = value', got '" + line + "'", line_no);
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    if (val.empty()) throw ParseError("empty value for '" + key + "'", line_no);

    if (key == "n") {
      sc.n = static_cast<int>(detail::parse_number(val, line_no));
      if (sc.n < 2) throw ParseError("n must be at least 2", line_no);
      have_n = true;
    } else if (key == "hbar") {
      sc.hbar = detail::parse_number(val, line_no);
      if (!(sc.hbar > 0.0)) throw ParseError("hbar must be positive", line_no);
    } else if (key == "dissipation") {
      const auto toks = detail::split_ws(val);
      if (toks[0] == "none") {
        sc.dissipation = Scenario::Dissipation::none;
      } else if (toks[0] == "linear") {
        if (toks.size() != 2)
          throw ParseError("usage: dissipation = linear <gamma>", line_no);
        sc.dissipation = Scenario::Dissipation::linear;
        sc.gamma = detail::parse_number(toks[1], line_no);
      } else if (toks[0] == "general") {
        if (toks.size() < 3 || toks[1] != "poly")
          throw ParseError("usage: dissipation = general poly c0 c1 ...",
                           line_no);
        sc.dissipation = Scenario::Dissipation::general_poly;
        for (std::size_t i = 2; i < toks.size(); ++i)
          sc.poly.push_back(detail::parse_number(toks[i], line_no));
      } else {
        throw ParseError("unknown dissipation kind '" + toks[0] + "'",
                         line_no);
      }
    } else if (key == "initial_chart") {
      sc.initial_chart = static_cast<int>(detail::parse_number(val, line_no));
      sc.initial = Scenario::Initial::coords;
      have_initial = true;
    } else if (key == "initial_z") {
      const auto toks = detail::split_ws(val);
      if (toks.size() % 2 != 0)
        throw ParseError("initial_z needs re im pairs", line_no);
      sc.initial_z.resize(toks.size() / 2);
      for (std::size_t k = 0; k < toks.size() / 2; ++k)
        sc.initial_z[k] = Complex(detail::parse_number(toks[2 * k], line_no),
                                  detail::parse_number(toks[2 * k + 1], line_no));
      sc.initial = Scenario::Initial::coords;
      have_initial = true;
    } else if (key == "initial_S") {
      sc.initial_S = detail::parse_number(val, line_no);
    } else if (key == "excited_start") {
      if (val != "true" && val != "false")
        throw ParseError("excited_start must be true or false", line_no);
      if (val == "true") {
        sc.initial = Scenario::Initial::excited;
        have_initial = true;
      }
    } else if (key == "kappa0") {
      sc.kappa0 = detail::parse_number(val, line_no);
      if (!(sc.kappa0 > 0.0))
        throw ParseError("kappa0 must be positive", line_no);
      sc.initial = Scenario::Initial::kappa;
      have_initial = true;
    } else if (key == "phi0") {
      sc.phi0 = detail::parse_number(val, line_no);
    } else if (key == "t_end") {
      sc.t_end = detail::parse_number(val, line_no);
      if (!(sc.t_end > 0.0)) throw ParseError("t_end must be positive", line_no);
    } else if (key == "samples") {
      sc.samples = static_cast<int>(detail::parse_number(val, line_no));
      if (sc.samples < 2)
        throw ParseError("samples must be at least 2", line_no);
    } else if (key == "reference_chart") {
      sc.reference_chart =
          static_cast<int>(detail::parse_number(val, line_no));
    } else if (key == "outputs") {
      sc.outputs = detail::split_ws(val);
      for (const auto& tok : sc.outputs)
        if (tok != "z" && tok != "S" && tok != "e_H" && tok != "var_H" &&
            tok != "P" && tok != "bloch")
          throw ParseError("unknown output column '" + tok +
                               "' (valid: z S e_H var_H P bloch)",
                           line_no);
    } else {
      throw ParseError("unknown key '" + key + "'", line_no);
    }
  }

  if (!have_n) throw ParseError("missing 'n'", line_no);
  if (!have_h) throw ParseError("missing hamiltonian block", line_no);
  if (!have_initial) throw ParseError("missing initial state", line_no);

  // Hermiticity, reported entry by entry.
  const double scale = std::max(sc.hamiltonian.cwiseAbs().maxCoeff(), 1.0);
  for (int r = 0; r < sc.n; ++r)
    for (int c = 0; c < sc.n; ++c) {
      const Complex d =
          sc.hamiltonian(r, c) - std::conj(sc.hamiltonian(c, r));
      if (std::abs(d) > 1e-12 * scale)
        throw ParseError("hamiltonian entry (" + std::to_string(r + 1) + "," +
                         std::to_string(c + 1) +
                         ") breaks hermiticity against (" +
                         std::to_string(c + 1) + "," + std::to_string(r + 1) +
                         ")");
    }

  if (sc.initial == Scenario::Initial::coords) {
    if (sc.initial_z.size() != sc.n - 1)
      throw ParseError("initial_z needs n-1 = " + std::to_string(sc.n - 1) +
                       " coordinate pairs");
    if (sc.initial_chart == 0) sc.initial_chart = sc.n;
    if (sc.initial_chart < 1 || sc.initial_chart > sc.n)
      throw ParseError("initial_chart out of range");
  }
  if (sc.initial == Scenario::Initial::excited && sc.n != 2)
    throw ParseError("excited_start is a 2-level shortcut");
  if ((sc.initial == Scenario::Initial::kappa ||
       sc.initial == Scenario::Initial::excited) &&
      sc.n != 2)
    throw ParseError("kappa0/excited_start starts require n = 2");
  if (sc.reference_chart < 0 || sc.reference_chart > sc.n)
    throw ParseError("reference_chart out of range");
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file '" + path + "'");
  return parse_scenario(in);
}

inline std::string serialize_scenario(const Scenario& sc) {
  std::ostringstream os;
  os << "n = " << sc.n << "\n";
  os << "hbar = " << detail::fmt(sc.hbar) << "\n";
  os << "hamiltonian:\n";
  for (int r = 0; r < sc.n; ++r) {
    os << " ";
    for (int c = 0; c < sc.n; ++c)
      os << " " << detail::fmt(sc.hamiltonian(r, c).real()) << " "
         << detail::fmt(sc.hamiltonian(r, c).imag());
    os << "\n";
  }
  switch (sc.dissipation) {
    case Scenario::Dissipation::none:
      os << "dissipation = none\n";
      break;
    case Scenario::Dissipation::linear:
      os << "dissipation = linear " << detail::fmt(sc.gamma) << "\n";
      break;
    case Scenario::Dissipation::general_poly:
      os << "dissipation = general poly";
      for (double c : sc.poly) os << " " << detail::fmt(c);
      os << "\n";
      break;
  }
  switch (sc.initial) {
    case Scenario::Initial::coords:
      os << "initial_chart = " << sc.initial_chart << "\n";
      os << "initial_z =";
      for (Eigen::Index k = 0; k < sc.initial_z.size(); ++k)
        os << " " << detail::fmt(sc.initial_z[k].real()) << " "
           << detail::fmt(sc.initial_z[k].imag());
      os << "\n";
      break;
    case Scenario::Initial::excited:
      os << "excited_start = true\n";
      break;
    case Scenario::Initial::kappa:
      os << "kappa0 = " << detail::fmt(sc.kappa0) << "\n";
      os << "phi0 = " << detail::fmt(sc.phi0) << "\n";
      break;
  }
  os << "initial_S = " << detail::fmt(sc.initial_S) << "\n";
  os << "t_end = " << detail::fmt(sc.t_end) << "\n";
  os << "samples = " << sc.samples << "\n";
  if (sc.reference_chart != 0)
    os << "reference_chart = " << sc.reference_chart << "\n";
  if (!sc.outputs.empty()) {
    os << "outputs =";
    for (const auto& c : sc.outputs) os << " " << c;
    os << "\n";
  }
  return os.str();
}

/// Contact Hamiltonian data of the scenario.
inline ContactHamiltonianSpec make_spec(const Scenario& sc) {
  HermitianOperator h{sc.hamiltonian};
  Coupling c;
  switch (sc.dissipation) {
    case Scenario::Dissipation::none:
      c = std::monostate{};
      break;
    case Scenario::Dissipation::linear:
      c = LinearCoupling{sc.gamma};
      break;
    case Scenario::Dissipation::general_poly: {
      const std::vector<double> p = sc.poly;
      auto f = [p](double s) {
        double acc = 0.0, pw = 1.0;
        for (double ck : p) {
          acc += ck * pw;
          pw *= s;
        }
        return acc;
      };
      auto df = [p](double s) {
        double acc = 0.0, pw = 1.0;
        for (std::size_t k = 1; k < p.size(); ++k) {
          acc += static_cast<double>(k) * p[k] * pw;
          pw *= s;
        }
        return acc;
      };
      c = GeneralCoupling{f, df};
      break;
    }
  }
  ContactHamiltonianSpec spec{std::move(h), std::move(c), sc.hbar,
                              sc.reference_chart};
  return spec;
}

/// Initial extended state of the scenario. The exact north-pole start is a
/// chart-1 origin; with dissipation on, the coupling field is singular there
/// and integration will refuse to start (use kappa0 > 0 instead).
inline ExtendedState make_initial(const Scenario& sc) {
  ExtendedState e;
  e.S = sc.initial_S;
  switch (sc.initial) {
    case Scenario::Initial::coords:
      e.point.chart = sc.initial_chart;
      e.point.z = sc.initial_z;
      break;
    case Scenario::Initial::excited:
      e.point.chart = 1;
      e.point.z = Eigen::VectorXcd::Zero(1);
      break;
    case Scenario::Initial::kappa: {
      // z(0) of the decay branch; expressed in the better chart
      const double r = std::sqrt(std::expm1(2.0 * sc.kappa0));
      ProjectiveState s;
      s.chart = 2;
      s.z.resize(1);
      s.z[0] = std::polar(1.0 / r, sc.phi0);
      Eigen::VectorXcd psi = homogeneous(s);
      e.point = project(psi, auto_chart(psi));
      break;
    }
  }
  return e;
}

}  // namespace cqd

#endif
