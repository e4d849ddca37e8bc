#include <doctest.h>

#include <cmath>

#include "openbook/dirichlet.hpp"

using namespace obl;

namespace {

std::shared_ptr<const HalfBallGrid> grid(int m, double h) { return std::make_shared<const HalfBallGrid>(m, h); }

LinearQMap two_sheet_map() {
  LinearQMap l;
  l.directions = {{1.0, 0.0}, {-0.5, 1.0}};
  l.multiplicities = {1, 2};
  return l;
}

}  // namespace

TEST_CASE("half-ball grid") {
  const auto g = grid(2, 0.125);
  CHECK(g->m() == 2);
  for (std::size_t k = 0; k < g->size(); ++k) {
    const Vec x = g->position(k);
    CHECK(x[1] >= 0.0);
    CHECK(norm(x) <= g->padded_radius() + 1e-12);
    CHECK(g->find(g->index(k)) == static_cast<long>(k));
  }
  CHECK(g->find({0, -1, 0}) == -1);
}

TEST_CASE("linear maps have frequency one") {
  const auto u = linear_fixture(grid(2, 1.0 / 32), two_sheet_map());
  const Vec c(2, 0.0);
  const FrequencyProfile p = frequency(u, c, {0.25, 0.5, 0.75});
  for (double i : p.frequency) CHECK(i == doctest::Approx(1.0).epsilon(0.01));
  CHECK(smoothed_frequency(u, c, 0.5).frequency == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("homogeneous degree two has frequency two") {
  const auto u = homogeneous_fixture(grid(2, 1.0 / 64), 2);
  const FrequencyProfile p = frequency(u, Vec(2, 0.0), {0.3, 0.6});
  for (double i : p.frequency) CHECK(i == doctest::Approx(2.0).epsilon(0.03));
}

TEST_CASE("the branch fixture has frequency three halves") {
  const auto u = branch_fixture(grid(2, 1.0 / 64));
  CHECK_FALSE(u.zero_trace);
  CHECK(frequency(u, Vec(2, 0.0), {0.5}).frequency[0] == doctest::Approx(1.5).epsilon(0.05));
}

TEST_CASE("harmonic extension of the first coordinate") {
  // sin(theta) on the half circle extends to x_2 itself
  const auto g = grid(2, 1.0 / 16);
  const BoundaryData data = [](CSpan x, MSpan out) { out[0] = x[1]; };
  SolveReport rep;
  const QFunction u = solve_dirichlet(g, {data}, {1}, 1, &rep);
  CHECK(rep.residual < 1e-8);
  double worst = 0.0;
  for (std::size_t k = 0; k < g->size(); ++k)
    if (g->inside(k)) worst = std::max(worst, std::abs(u.atoms(k)[0] - g->position(k)[1]));
  CHECK(worst < 0.02);
}

TEST_CASE("multiplicities repeat a sheet") {
  const auto g = grid(2, 1.0 / 8);
  const BoundaryData data = [](CSpan x, MSpan out) { out[0] = x[1]; };
  const QFunction u = solve_dirichlet(g, {data}, {3}, 1);
  CHECK(u.q == 3);
  for (std::size_t k = 0; k < g->size(); ++k) {
    const CSpan a = u.atoms(k);
    CHECK(a[0] == a[1]);
    CHECK(a[1] == a[2]);
  }
}

TEST_CASE("blowups have unit energy") {
  const auto u = linear_fixture(grid(2, 1.0 / 32), two_sheet_map());
  const QFunction b = blowup(u, Vec{0.25, 0.0}, 0.5);
  CHECK(dirichlet_energy(b, Vec(2, 0.0), 1.0) == doctest::Approx(1.0).epsilon(0.02));
  CHECK_THROWS_AS(blowup(u, Vec{0.75, 0.0}, 0.5), Error);
}

TEST_CASE("linear maps decay to themselves") {
  const LinearQMap l = two_sheet_map();
  const auto u = linear_fixture(grid(2, 1.0 / 32), l);
  for (const LinearFit& f : decay_to_linear(u, {0.25, 0.5})) {
    CHECK(f.residual == doctest::Approx(0.0).scale(1.0));
    CHECK(f.alpha == doctest::Approx(l.separation()).epsilon(1e-6));
  }
}

TEST_CASE("frequency identities hold on a harmonic function") {
  const auto u = homogeneous_fixture(grid(2, 1.0 / 64), 3);
  const IdentityReport r = frequency_identities(u, Vec(2, 0.0), 0.5);
  CHECK(std::abs(r.error_first) < 0.05);
  CHECK(std::abs(r.error_second) < 0.05);
}

TEST_CASE("interpolation is exact on linear data") {
  const auto g = grid(2, 1.0 / 8);
  std::vector<double> f(g->size());
  for (std::size_t k = 0; k < g->size(); ++k) f[k] = 2.0 * g->position(k)[0] - g->position(k)[1];
  CHECK(interpolate_scalar(*g, f, Vec{0.31, 0.17}) == doctest::Approx(0.45));
}
