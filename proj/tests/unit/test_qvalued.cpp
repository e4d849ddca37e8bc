#include <doctest.h>

#include "openbook/qvalued.hpp"
#include "oracles.hpp"

using namespace obl;

namespace {

std::vector<Vec> random_atoms(Rng& rng, int q, int n) {
  std::vector<Vec> a;
  for (int i = 0; i < q; ++i) {
    Vec v(static_cast<std::size_t>(n));
    for (auto& x : v) x = rng.uniform(-1.0, 1.0);
    a.push_back(v);
  }
  return a;
}

}  // namespace

TEST_CASE("q-points are unordered") {
  const QPoint a = QPoint::from_atoms({{1.0, 0.0}, {-1.0, 2.0}});
  const QPoint b = QPoint::from_atoms({{-1.0, 2.0}, {1.0, 0.0}});
  CHECK(a == b);
  CHECK(q_metric(a, b) == 0.0);
}

TEST_CASE("matching metric agrees with the permutation oracle") {
  Rng rng(3);
  for (int k = 0; k < 300; ++k) {
    const int q = 1 + rng.below(6), n = 1 + rng.below(3);
    const auto a = random_atoms(rng, q, n), b = random_atoms(rng, q, n);
    const double oracle = std::sqrt(testing::permutation_oracle(a, b));
    CHECK(q_metric(QPoint::from_atoms(a), QPoint::from_atoms(b)) == doctest::Approx(oracle).epsilon(1e-12));
  }
}

TEST_CASE("Hungarian and exhaustive assignment agree") {
  Rng rng(5);
  for (int k = 0; k < 200; ++k) {
    const int q = 2 + rng.below(5);
    std::vector<double> cost(static_cast<std::size_t>(q * q));
    for (auto& c : cost) c = rng.uniform(0.0, 3.0);
    CHECK(hungarian_assignment(cost, q).cost == doctest::Approx(exhaustive_assignment(cost, q).cost));
  }
}

TEST_CASE("second-best cost is no smaller than the optimum") {
  Rng rng(6);
  for (int k = 0; k < 100; ++k) {
    const int q = 2 + rng.below(4);
    std::vector<double> cost(static_cast<std::size_t>(q * q));
    for (auto& c : cost) c = rng.uniform(0.0, 1.0);
    const Matching best = exhaustive_assignment(cost, q);
    CHECK(second_best_assignment_cost(cost, q, best.perm) >= best.cost);
  }
}

TEST_CASE("matching metric is a metric") {
  Rng rng(7);
  for (int k = 0; k < 200; ++k) {
    const int q = 1 + rng.below(5), n = 1 + rng.below(3);
    const QPoint a = QPoint::from_atoms(random_atoms(rng, q, n));
    const QPoint b = QPoint::from_atoms(random_atoms(rng, q, n));
    const QPoint c = QPoint::from_atoms(random_atoms(rng, q, n));
    CHECK(q_metric(a, b) == doctest::Approx(q_metric(b, a)));
    CHECK(q_metric(a, c) <= q_metric(a, b) + q_metric(b, c) + 1e-12);
  }
}

TEST_CASE("average, translation and subtraction") {
  const QPoint a = QPoint::from_atoms({{1.0}, {3.0}, {5.0}});
  CHECK(q_average(a) == Vec{3.0});
  const QPoint centred = q_subtract_average(a);
  CHECK(q_average(centred)[0] == doctest::Approx(0.0));
  CHECK(q_translate(centred, Vec{3.0}) == a);
}

TEST_CASE("linear q-maps") {
  LinearQMap l;
  l.directions = {{1.0, 0.0}, {0.0, 2.0}};
  l.multiplicities = {2, 1};
  CHECK(l.q() == 3);
  CHECK(l.separation() == doctest::Approx(std::sqrt(5.0)));
  const QPoint v = l.evaluate(0.5);
  CHECK(v == QPoint::from_atoms({{0.5, 0.0}, {0.5, 0.0}, {0.0, 1.0}}));
  LinearQMap single;
  single.directions = {{1.0}};
  single.multiplicities = {1};
  CHECK(single.separation() == 1.0);
}
