#include <catch2/catch_amalgamated.hpp>

#include "contactqd/rng.hpp"
#include "contactqd/state_space.hpp"

using cqd::Complex;
using Catch::Approx;

namespace {

cqd::ProjectiveState qubit_state(Complex z, int chart = 2) {
  cqd::ProjectiveState s;
  s.chart = chart;
  s.z.resize(1);
  s.z[0] = z;
  return s;
}

}  // namespace

TEST_CASE("projection onto a chart") {
  Eigen::VectorXcd psi(2);

  psi << Complex(1, 0), Complex(1, 0);
  CHECK(cqd::project(psi, 2).z[0] == Complex(1, 0));

  psi << Complex(0, 0), Complex(5, 0);
  CHECK(cqd::project(psi, 2).z[0] == Complex(0, 0));
  CHECK_THROWS_AS(cqd::project(psi, 1), cqd::ChartSingular);

  psi << Complex(2, 2), Complex(2, 0);
  const auto s = cqd::project(psi, 2);
  CHECK(std::abs(s.z[0] - Complex(1, 1)) < 1e-15);

  // invariance under rescaling by 3 e^{i pi/7}
  const Complex lambda = 3.0 * std::polar(1.0, M_PI / 7);
  const auto s2 = cqd::project((lambda * psi).eval(), 2);
  CHECK(std::abs(s2.z[0] - s.z[0]) < 1e-15);
}

TEST_CASE("projection is scale invariant (random states)") {
  cqd::Rng rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::Index n = 2 + trial % 7;  // up to n = 8
    Eigen::VectorXcd psi = rng.complex_vector(n, 1.0);
    const int chart = cqd::auto_chart(psi);
    const Complex lambda = rng.complex_in_disk(2.0) + Complex(0.2, 0.2);
    const auto a = cqd::project(psi, chart);
    const auto b = cqd::project((lambda * psi).eval(), chart);
    REQUIRE((a.z - b.z).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("normalized representative") {
  auto s = qubit_state(0.0);
  Eigen::VectorXcd psi = cqd::normalized_representative(s);
  CHECK(psi[0] == Complex(0, 0));
  CHECK(psi[1] == Complex(1, 0));

  s = qubit_state(1.0);
  psi = cqd::normalized_representative(s);
  CHECK(psi[0].real() == Approx(1 / std::sqrt(2.0)));
  CHECK(psi[1].real() == Approx(1 / std::sqrt(2.0)));

  cqd::Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    cqd::ProjectiveState r;
    r.chart = 3;
    r.z = rng.complex_vector(3, 2.0);
    const auto v = cqd::normalized_representative(r);
    CHECK(v.norm() == Approx(1.0));
    CHECK(cqd::states_equal(cqd::project(v, 3), r));
  }
}

TEST_CASE("density matrix of a state") {
  auto rho = cqd::density_matrix(qubit_state(0.0));
  CHECK(std::abs(rho(0, 0)) < 1e-15);
  CHECK(std::abs(rho(1, 1) - 1.0) < 1e-15);

  rho = cqd::density_matrix(qubit_state(1.0));
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c)
      CHECK(std::abs(rho(r, c) - 0.5) < 1e-15);

  cqd::Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    cqd::ProjectiveState s;
    s.chart = 4;
    s.z = rng.complex_vector(3, 2.0);
    rho = cqd::density_matrix(s);
    CHECK(std::abs(rho.trace() - 1.0) < 1e-12);
    CHECK((rho * rho - rho).norm() < 1e-12);
    CHECK((rho - rho.adjoint()).norm() < 1e-12);
  }
}

TEST_CASE("density matrix is chart independent") {
  cqd::Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 2 + trial % 7;
    Eigen::VectorXcd psi = rng.complex_vector(n, 1.0);
    psi += Eigen::VectorXcd::Constant(n, Complex(0.3, 0.1));  // avoid zeros
    const auto base = cqd::density_matrix(cqd::project(psi, 1));
    for (int chart = 2; chart <= n; ++chart) {
      const auto other = cqd::density_matrix(cqd::project(psi, chart));
      REQUIRE((base - other).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("chart transitions") {
  // z = 2 in chart 2 is zeta = 1/2 in chart 1
  auto s = qubit_state(2.0);
  auto t = cqd::chart_transition(s, 1);
  CHECK(t.chart == 1);
  CHECK(t.z[0] == Complex(0.5, 0));

  // chart 2 -> 1 -> 2 round-trips exactly at z = 1
  s = qubit_state(1.0);
  auto back = cqd::chart_transition(cqd::chart_transition(s, 1), 2);
  CHECK(back.z[0] == Complex(1, 0));

  // the origin of chart 2 has no chart-1 image
  CHECK_THROWS_AS(cqd::chart_transition(qubit_state(0.0), 1),
                  cqd::ChartSingular);

  // transitions preserve the projective point
  cqd::Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    cqd::ProjectiveState r;
    r.chart = 1;
    r.z = rng.complex_vector(2, 1.0);
    r.z.array() += Complex(0.4, 0.2);
    const auto u = cqd::chart_transition(r, 3);
    REQUIRE(cqd::states_equal(r, u, 1e-12));
  }
}

TEST_CASE("Bloch coordinates") {
  auto x = cqd::bloch(qubit_state(0.0));
  CHECK(x.x1 == Approx(0.0).margin(1e-15));
  CHECK(x.x2 == Approx(0.0).margin(1e-15));
  CHECK(x.x3 == Approx(-1.0));

  x = cqd::bloch(qubit_state(1.0));
  CHECK(x.x1 == Approx(1.0));
  CHECK(x.x2 == Approx(0.0).margin(1e-15));
  CHECK(x.x3 == Approx(0.0).margin(1e-15));

  x = cqd::bloch(qubit_state(Complex(0, 1)));
  CHECK(x.x1 == Approx(0.0).margin(1e-15));
  CHECK(x.x2 == Approx(1.0));
  CHECK(x.x3 == Approx(0.0).margin(1e-15));

  // north pole through chart 1
  x = cqd::bloch(qubit_state(0.0, 1));
  CHECK(x.x3 == Approx(1.0));

  cqd::ProjectiveState s3;
  s3.chart = 3;
  s3.z = Eigen::VectorXcd::Zero(2);
  CHECK_THROWS_AS(cqd::bloch(s3), cqd::DimensionMismatch);

  cqd::Rng rng(19);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto p = cqd::bloch(qubit_state(rng.complex_in_disk(5.0)));
    REQUIRE(p.x1 * p.x1 + p.x2 * p.x2 + p.x3 * p.x3 == Approx(1.0).epsilon(1e-12));
  }
}
