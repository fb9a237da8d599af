#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "contactqd/analysis.hpp"
#include "contactqd/rng.hpp"

using cqd::Complex;
using cqd::PointType;
using Catch::Approx;

TEST_CASE("conservative critical points") {
  // H1 = 4, H2 = 2, V = 1+i: z_pm = (1 pm sqrt(3))(1+i)/2
  const auto pts = cqd::conservative_critical_points(4.0, 2.0, Complex(1, 1));
  const Complex zp = (1.0 + std::sqrt(3.0)) * Complex(0.5, 0.5);
  const Complex zm = (1.0 - std::sqrt(3.0)) * Complex(0.5, 0.5);
  CHECK(std::abs(pts[0].z - zp) < 1e-12);
  CHECK(std::abs(pts[1].z - zm) < 1e-12);
  CHECK(pts[0].type == PointType::center);
  CHECK(pts[1].type == PointType::center);
  for (const auto& p : pts) {
    CHECK(std::abs(cqd::qubit_rhs(4.0, 2.0, Complex(1, 1), 0.0, 1.0, p.z)) <
          1e-12);
    // centers: purely imaginary eigenvalue pair
    CHECK(std::abs(p.eigenvalues[0].real()) < 1e-10);
    CHECK(std::abs(p.eigenvalues[1].real()) < 1e-10);
    CHECK(std::abs(p.eigenvalues[0].imag()) > 1e-3);
  }

  // degenerate levels with real coupling: z_pm = +-1
  const auto sym = cqd::conservative_critical_points(3.0, 3.0, 1.0);
  CHECK(std::abs(sym[0].z - 1.0) < 1e-14);
  CHECK(std::abs(sym[1].z + 1.0) < 1e-14);

  CHECK_THROWS_AS(cqd::conservative_critical_points(4.0, 2.0, 0.0),
                  cqd::DegenerateV);
}

TEST_CASE("dissipative critical points across the bifurcation") {
  const Complex v(1, 1);

  SECTION("gamma = 1: three points, foci and saddle") {
    const auto pts = cqd::dissipative_critical_points(2.0, 2.0, v, 1.0);
    REQUIRE(pts.size() == 3);

    // the unit-circle pair carries lambda = -1/2 +- i sqrt(27/4)
    for (int i = 0; i < 2; ++i) {
      CHECK(std::abs(std::abs(pts[i].z) - 1.0) < 1e-12);
      CHECK(pts[i].type == PointType::stable_focus);
      CHECK(pts[i].eigenvalues[0].real() == Approx(-0.5).margin(1e-12));
      CHECK(std::abs(pts[i].eigenvalues[0].imag()) ==
            Approx(std::sqrt(7.0 - 0.25)).margin(1e-12));
    }

    // z^(3) = 2 - 2i with eigenvalues {3.5, -4.5}: a saddle
    CHECK(std::abs(pts[2].z - Complex(2, -2)) < 1e-12);
    CHECK(pts[2].type == PointType::saddle);
    const double l0 = pts[2].eigenvalues[0].real();
    const double l1 = pts[2].eigenvalues[1].real();
    CHECK(std::max(l0, l1) == Approx(3.5).margin(1e-12));
    CHECK(std::min(l0, l1) == Approx(-4.5).margin(1e-12));

    // every returned point kills the field
    for (const auto& p : pts)
      CHECK(std::abs(cqd::qubit_rhs(2.0, 2.0, v, 1.0, 1.0, p.z)) < 1e-10);
  }

  SECTION("gamma = 2 sqrt(2): merged pair, eigenvalues {0, -gamma}") {
    const double gamma = 2.0 * std::sqrt(2.0);
    const auto pts = cqd::dissipative_critical_points(2.0, 2.0, v, gamma);
    REQUIRE(pts.size() == 2);
    CHECK(pts[0].type == PointType::non_hyperbolic);
    const double a = pts[0].eigenvalues[0].real();
    const double b = pts[0].eigenvalues[1].real();
    CHECK(std::max(a, b) == Approx(0.0).margin(1e-9));
    CHECK(std::min(a, b) == Approx(-gamma).margin(1e-9));
  }

  SECTION("gamma = 3: only the always-present point, a stable node") {
    const auto pts = cqd::dissipative_critical_points(2.0, 2.0, v, 3.0);
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].type == PointType::stable_node);
    CHECK(pts[0].eigenvalues[0].real() < 0.0);
    CHECK(pts[0].eigenvalues[1].real() < 0.0);
  }

  SECTION("the unit-circle pair exists iff Delta >= 0") {
    for (double gamma = 0.5; gamma < 5.0; gamma += 0.25) {
      const double delta = 4.0 * std::norm(v) - gamma * gamma;
      const auto pts = cqd::dissipative_critical_points(2.0, 2.0, v, gamma);
      if (delta > 1e-9) {
        REQUIRE(pts.size() == 3);
        CHECK(std::abs(std::abs(pts[0].z) - 1.0) < 1e-12);
        CHECK(std::abs(std::abs(pts[1].z) - 1.0) < 1e-12);
      } else if (delta < -1e-9) {
        REQUIRE(pts.size() == 1);
      }
    }
  }

  SECTION("closed-form eigenvalues match the numerical Jacobian") {
    for (double gamma : {0.7, 1.0, 1.9, 3.2}) {
      const auto pts = cqd::dissipative_critical_points(2.0, 2.0, v, gamma);
      for (const auto& p : pts) {
        const auto [a_fd, b_fd] =
            cqd::qubit_rhs_wirtinger_fd(2.0, 2.0, v, gamma, 1.0, p.z);
        const auto [a, b] = cqd::qubit_rhs_wirtinger(2.0, 2.0, v, gamma, 1.0,
                                                     p.z);
        REQUIRE(std::abs(a - a_fd) < 1e-8);
        REQUIRE(std::abs(b - b_fd) < 1e-8);
      }
    }
  }

  SECTION("eigenvalues follow the closed forms across a gamma sweep") {
    // unit-circle pair: -gamma/2 +- sqrt(gamma^2/4 - Delta) (imaginary when
    // Delta > gamma^2/4); third point: -(gamma^2 +- 4|V|^2)/(2 gamma)
    for (double gamma = 0.4; gamma < 4.5; gamma += 0.3) {
      const double delta = 4.0 * std::norm(v) - gamma * gamma;
      const auto pts = cqd::dissipative_critical_points(2.0, 2.0, v, gamma);
      if (delta > 1e-9) {
        for (int i = 0; i < 2; ++i) {
          const double disc = delta - 0.25 * gamma * gamma;
          const Complex expected =
              disc > 0 ? Complex(-0.5 * gamma, std::sqrt(disc))
                       : Complex(-0.5 * gamma + std::sqrt(-disc), 0.0);
          const double err = std::min(std::abs(pts[i].eigenvalues[0] - expected),
                                      std::abs(pts[i].eigenvalues[1] - expected));
          REQUIRE(err < 1e-8);
        }
      }
      const auto& third = pts.back();
      const Complex lp(-(gamma * gamma - 4.0 * std::norm(v)) / (2.0 * gamma));
      const Complex lm(-(gamma * gamma + 4.0 * std::norm(v)) / (2.0 * gamma));
      REQUIRE(std::min(std::abs(third.eigenvalues[0] - lp),
                       std::abs(third.eigenvalues[1] - lp)) < 1e-8);
      REQUIRE(std::min(std::abs(third.eigenvalues[0] - lm),
                       std::abs(third.eigenvalues[1] - lm)) < 1e-8);
    }
  }

  CHECK_THROWS_AS(cqd::dissipative_critical_points(4.0, 2.0, v, 1.0),
                  cqd::UnsupportedScenario);
}

TEST_CASE("bifurcation classification") {
  const Complex v(1, 1);
  auto rep = cqd::classify_bifurcation(v, 1.0);
  CHECK(rep.regime_name == "iii");
  CHECK(rep.foci_subcase);
  CHECK(rep.delta_minus == Approx(7.0));

  rep = cqd::classify_bifurcation(v, 2.0 * std::sqrt(2.0));
  CHECK(rep.regime_name == "ii");

  rep = cqd::classify_bifurcation(v, 3.0);
  CHECK(rep.regime_name == "i");
  CHECK(rep.delta_minus == Approx(-1.0));

  // only |V| enters: the regime is invariant under a phase rotation of V
  cqd::Rng rng(113);
  for (int trial = 0; trial < 50; ++trial) {
    const double gamma = rng.uniform(0.3, 4.0);
    const Complex vr = v * std::polar(1.0, rng.uniform(0, 2 * M_PI));
    CHECK(cqd::classify_bifurcation(v, gamma).regime_name ==
          cqd::classify_bifurcation(vr, gamma).regime_name);
  }

  // nodes sub-case of regime iii: Delta > 0 but Delta - gamma^2/4 <= 0
  // needs 4|V|^2 slightly above gamma^2; take |V|^2 = 1.05, gamma = 2
  rep = cqd::classify_bifurcation(std::sqrt(1.05), 2.0);
  CHECK(rep.regime_name == "iii");
  CHECK(!rep.foci_subcase);
}

TEST_CASE("north-pole behavior") {
  // dissipative, degenerate levels: unstable node (singular source)
  auto pole = cqd::north_pole_point(2.0, 2.0, Complex(1, 1), 1.0);
  REQUIRE(pole.has_value());
  CHECK(pole->chart == 1);
  CHECK(pole->type == PointType::unstable_node);
  CHECK(pole->field_singular);

  // decay (V = 0, split levels): unstable focus
  pole = cqd::north_pole_point(4.0, 2.0, 0.0, 1.0);
  REQUIRE(pole.has_value());
  CHECK(pole->type == PointType::unstable_focus);

  // conservative with coupling: a regular point, no census entry
  CHECK(!cqd::north_pole_point(4.0, 2.0, Complex(1, 1), 0.0).has_value());

  // conservative, V = 0: a center
  pole = cqd::north_pole_point(4.0, 2.0, 0.0, 0.0);
  REQUIRE(pole.has_value());
  CHECK(pole->type == PointType::center);

  // the pushed-forward field is radially outward on a small ring
  for (int k = 0; k < 16; ++k) {
    const Complex w = std::polar(1e-3, 2 * M_PI * k / 16.0);
    const Complex wdot =
        cqd::qubit_rhs_antipodal(2.0, 2.0, Complex(1, 1), 1.0, 1.0, w);
    REQUIRE((std::conj(w) * wdot).real() > 0.0);
  }
}

TEST_CASE("census of the reference qubit scenarios") {
  // dissipative qubit, V = 1+i, gamma = 1: 2 foci + saddle + pole node
  auto census = cqd::qubit_census(2.0, 2.0, Complex(1, 1), 1.0);
  REQUIRE(census.size() == 4);
  int foci = 0, saddles = 0, nodes = 0;
  for (const auto& p : census) {
    if (p.type == PointType::stable_focus) ++foci;
    if (p.type == PointType::saddle) ++saddles;
    if (p.type == PointType::unstable_node) ++nodes;
  }
  CHECK(foci == 2);
  CHECK(saddles == 1);
  CHECK(nodes == 1);

  // conservative qubit: exactly the two centers
  census = cqd::qubit_census(4.0, 2.0, Complex(1, 1), 0.0);
  REQUIRE(census.size() == 2);
  CHECK(census[0].type == PointType::center);
  CHECK(census[1].type == PointType::center);

  // radiative decay: stable focus at the origin, unstable focus at the pole
  census = cqd::qubit_census(4.0, 2.0, 0.0, 1.0);
  REQUIRE(census.size() == 2);
  CHECK(census[0].chart == 2);
  CHECK(census[0].type == PointType::stable_focus);
  CHECK(census[1].chart == 1);
  CHECK(census[1].type == PointType::unstable_focus);

  CHECK_THROWS_AS(cqd::qubit_census(4.0, 2.0, Complex(1, 1), 1.0),
                  cqd::UnsupportedScenario);
}

TEST_CASE("phase portrait sampling") {
  cqd::PortraitOptions opt;
  opt.x0 = -3;
  opt.x1 = 3;
  opt.y0 = -3;
  opt.y1 = 3;
  opt.nx = opt.ny = 41;
  opt.streamline_seeds = 4;

  // conservative: the grid's |RHS| minima sit near the closed-form centers
  const auto portrait =
      cqd::phase_portrait(4.0, 2.0, Complex(1, 1), 0.0, 1.0, opt);
  REQUIRE(portrait.census_available);
  REQUIRE(portrait.census.size() == 2);
  for (const auto& c : portrait.census) {
    double best = 1e30;
    Complex at;
    for (const auto& smp : portrait.samples) {
      if (smp.chart != 2) continue;
      const double mag = std::abs(smp.zdot);
      if (mag < best) {
        best = mag;
        at = smp.z;
      }
    }
    // nearest grid node of either center is within one cell
    (void)at;
    double dist = 1e30;
    for (const auto& smp : portrait.samples)
      if (smp.chart == 2 && std::abs(smp.zdot) < 0.4)
        dist = std::min(dist, std::abs(smp.z - c.z));
    CHECK(dist < 0.25);
  }

  // both charts are present, Bloch images are on the sphere
  bool chart1 = false, chart2 = false;
  for (const auto& smp : portrait.samples) {
    chart1 = chart1 || smp.chart == 1;
    chart2 = chart2 || smp.chart == 2;
    REQUIRE(smp.x.x1 * smp.x.x1 + smp.x.x2 * smp.x.x2 + smp.x.x3 * smp.x.x3 ==
            Approx(1.0).epsilon(1e-12));
  }
  CHECK(chart1);
  CHECK(chart2);
  CHECK(!portrait.streamlines.empty());

  // the dissipative census rides along with the portrait
  const auto diss = cqd::phase_portrait(2.0, 2.0, Complex(1, 1), 1.0, 1.0, opt);
  REQUIRE(diss.census_available);
  CHECK(diss.census.size() == 4);
}

TEST_CASE("trajectory observables of the decay run") {
  const double h1 = 4.0, h2 = 2.0, gamma = 1.0, kappa0 = 1e-9;
  const auto H = cqd::qubit_operator(h1, h2, 0.0);
  cqd::ContactHamiltonianSpec spec{H, cqd::LinearCoupling{gamma}, 1.0};
  cqd::ExtendedState e0{cqd::decay_initial_state(h1, h2, gamma, kappa0, 0.0),
                        0.0};
  cqd::StepControl ctrl;
  ctrl.abs_tol = 1e-14;
  ctrl.rel_tol = 1e-12;
  const auto ts = cqd::uniform_samples(0.0, 10.0, 10001);
  const auto tr = cqd::integrate(spec, e0, 0.0, 10.0, ts, ctrl);
  const auto rows = cqd::trajectory_observables(tr, H);

  // e_H(0) = H1, e_H(infinity) = H2
  CHECK(rows.front().e_H == Approx(h1).margin(1e-6));
  CHECK(rows.back().e_H == Approx(h2).margin(1e-4));

  // P(0) = 1 and P(ln 2) = 1/2
  CHECK(rows.front().P == Approx(1.0).margin(1e-6));
  double p_at_ln2 = 0.0, best = 1e30;
  for (const auto& r : rows)
    if (std::abs(r.t - std::log(2.0)) < best) {
      best = std::abs(r.t - std::log(2.0));
      p_at_ln2 = r.P;
    }
  CHECK(p_at_ln2 == Approx(0.5).margin(1e-3));

  // the variance peaks at (H1-H2)^2/4 = 1 at t = ln 2
  double vmax = 0.0, tmax = 0.0;
  for (const auto& r : rows)
    if (r.var_H > vmax) {
      vmax = r.var_H;
      tmax = r.t;
    }
  CHECK(vmax == Approx(1.0).margin(1e-6));
  CHECK(tmax == Approx(std::log(2.0)).margin(2e-3));

  // Bloch column present for qubits and on the sphere
  REQUIRE(rows.front().x.has_value());
  const auto& x = *rows.back().x;
  CHECK(x.x1 * x.x1 + x.x2 * x.x2 + x.x3 * x.x3 == Approx(1.0).epsilon(1e-10));
}
