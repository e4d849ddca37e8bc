#include <doctest.h>

#include <cmath>

#include "openbook/lab.hpp"

using namespace obl;

namespace {

const Vec kOrigin(3, 0.0);

OpenBook three_sheets() { return OpenBook::planar(2, 1, {0.0, 2.0, 4.0}, {1, 1, 1}); }

}  // namespace

TEST_CASE("Whitney cubes on an exact book are all outer") {
  const OpenBook b = three_sheets();
  const DiscreteCurrent t = sample_open_book(b, 4.0, 0, 1, {.per_sheet_count = 3000});
  const WhitneyReport rep = whitney_classify(t, b, {.max_generation = 3});
  CHECK(rep.tiling_ok);
  for (const CubeRegion& c : rep.cubes) {
    CHECK(c.kind == CubeKind::Outer);
    CHECK_FALSE(c.meets_boundary);
    CHECK(c.excess == doctest::Approx(0.0).scale(1.0));
  }
}

TEST_CASE("cubes meeting the boundary stop") {
  const OpenBook b = three_sheets();
  const DiscreteCurrent t = sample_open_book(b, 4.0, 0, 1, {.per_sheet_count = 3000});
  WhitneyOptions opt{.max_generation = 3};
  opt.boundary = Spine{3, {0.0, 0.0, 0.0}, {{0.0, 1.0, 0.0}}};
  const WhitneyReport rep = whitney_classify(t, b, opt);
  CHECK(rep.tiling_ok);
  int stopped = 0;
  for (const CubeRegion& c : rep.cubes) {
    if (c.meets_boundary) {
      CHECK_FALSE(c.interior);
      CHECK((c.kind == CubeKind::BoundaryStopping || c.kind == CubeKind::Excluded));
    }
    if (c.kind == CubeKind::BoundaryStopping) {
      ++stopped;
      CHECK((c.parent < 0 || rep.cubes[static_cast<std::size_t>(c.parent)].interior));
    }
  }
  CHECK(stopped > 0);
}

TEST_CASE("remainder profile vanishes on a cone") {
  const DiscreteCurrent t = sample_open_book(three_sheets(), 1.0, 0, 4, {.per_sheet_count = 500});
  const Profile p = remainder_profile(t, kOrigin, {0.25, 0.5, 1.0});
  for (double v : p.values) CHECK(v == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("remainder profile is nondecreasing in r") {
  const GraphFixture f = harmonic_graph_fixture(1, 0.05);
  const DiscreteCurrent t = sample_graph_over_book(f.book, f.sheets, 1.0, 0, 4, {.per_sheet_count = 500});
  const Profile p = remainder_profile(t, kOrigin, {0.2, 0.4, 0.6, 0.8, 1.0});
  for (std::size_t k = 1; k < p.values.size(); ++k) CHECK(p.values[k] >= p.values[k - 1]);
  CHECK(p.values.back() > 0.0);
}

TEST_CASE("nonconcentration profile is monotone and bounded by the L2 excess") {
  const OpenBook b = three_sheets();
  const OpenBook c = OpenBook::planar(2, 1, {0.05, 2.0, 4.1}, {1, 1, 1});
  const DiscreteCurrent t = sample_open_book(b, 1.0, 0, 4, {.per_sheet_count = 800});
  const Profile p = nonconcentration_profile(t, c, kOrigin, 1.0, {0.05, 0.1, 0.2, 0.5, 1.0});
  for (std::size_t k = 1; k < p.values.size(); ++k) CHECK(p.values[k] >= p.values[k - 1]);
  CHECK(p.values.back() <= l2_excess(t, c, kOrigin, 1.0) + 1e-15);
  // dist to C grows linearly off the spine, so small sigma gives sigma^3
  const Profile small = nonconcentration_profile(t, c, kOrigin, 1.0, {0.05, 0.1, 0.2});
  CHECK(small.slope == doctest::Approx(3.0).epsilon(0.1));
}

TEST_CASE("log-log slope") {
  CHECK(loglog_slope({1.0, 2.0, 4.0}, {3.0, 12.0, 48.0}) == doctest::Approx(2.0));
}

TEST_CASE("decay loop on an exact book keeps a zero excess") {
  const OpenBook b = three_sheets();
  // a cone looks the same at every scale, so the source resamples it
  const CurrentSource source = [&](double) { return sample_open_book(b, 1.0, 0, 3, {.per_sheet_count = 200}); };
  DecayParameters par;
  par.max_steps = 3;
  par.seed = 3;
  par.per_sheet = 200;
  const auto recs = decay_loop(source, b, kOrigin, 1.0, par);
  REQUIRE_FALSE(recs.empty());
  for (const ExperimentRecord& r : recs) {
    CHECK(r.strong <= 1e-10);
    CHECK(r.cone.total_multiplicity() == 3);
    CHECK(r.next_radius <= 0.5 * r.radius + 1e-15);
    CHECK(r.next_radius >= par.eta * r.radius - 1e-15);
  }
}

TEST_CASE("ordering issues flag the default constants") {
  DecayParameters par;
  CHECK(par.ordering_issues(3, 3).empty());
  CHECK_FALSE(par.ordering_issues(4, 3).empty());  // theta above eps_4
  CHECK(par.eps_at(1) == doctest::Approx(1e-3 / 4.0));
}

TEST_CASE("rescaling moves a ball to the unit ball") {
  const DiscreteCurrent t = sample_open_book(three_sheets(), 1.0, 0, 3, {.per_sheet_count = 400});
  const DiscreteCurrent u = rescaled_current(t, kOrigin, 0.5);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(norm(u.measure.point(i)) < 1.0);
  CHECK(u.measure.total_mass() == doctest::Approx(t.restricted(kOrigin, 0.5).measure.total_mass() * 4.0));
}

TEST_CASE("decomposition separates a book and catches a handle") {
  const OpenBook b = OpenBook::planar(2, 1, {0.0, 2.5}, {1, 1});
  const DiscreteCurrent t = sample_open_book(b, 1.0, 4000, 5);
  const DecompositionResult ok = decomposition_check(t, b, kOrigin, 1.0);
  CHECK(ok.pass);
  CHECK(ok.bridges.empty());
  CHECK(ok.min_margin > 0.0);
  REQUIRE(ok.pieces.size() == 2);
  for (const SheetPiece& p : ok.pieces) CHECK(p.multiplicity == doctest::Approx(p.expected).epsilon(0.05));

  const DiscreteCurrent h = handle_fixture(b, 0.05, 4000, 5);
  const DecompositionResult bad = decomposition_check(h, b, kOrigin, 1.0);
  CHECK_FALSE(bad.pass);
  CHECK_FALSE(bad.bridges.empty());
}

TEST_CASE("normal map of a cylinder is constant") {
  const OpenBook b = three_sheets();
  const DiscreteCurrent t = sample_open_book(b, 2.0, 0, 6, {.per_sheet_count = 3000});
  const HolderTable tab =
      normal_map_holder(t, b.spine, {Vec{-0.5, 0.0, 0.0}, Vec{0.0, 0.0, 0.0}, Vec{0.5, 0.0, 0.0}}, {0.5, 1.0}, 3, 0.5);
  CHECK(tab.entries.size() == 3);
  CHECK(tab.max_ratio == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("normal map of a twisting sheet moves with the spine point") {
  // single sheet in R^4 whose normal turns by omega radians per unit along the spine
  const double omega = 0.1;
  const OpenBook flat = OpenBook::planar(2, 2, {0.0}, {1});
  DiscreteCurrent t = sample_open_book(flat, 2.0, 0, 7, {.per_sheet_count = 8000});
  for (std::size_t i = 0; i < t.size(); ++i) {
    double* x = t.measure.points.data() + i * 4;
    const double c = std::cos(omega * x[0]), s = std::sin(omega * x[0]);
    const double y = x[1], z = x[2];
    x[1] = c * y - s * z;
    x[2] = s * y + c * z;
  }
  t.tangents.clear();
  const HolderTable tab = normal_map_holder(
      t, flat.spine, {Vec{-0.4, 0.0, 0.0, 0.0}, Vec{0.0, 0.0, 0.0, 0.0}, Vec{0.4, 0.0, 0.0, 0.0}}, {0.2, 0.4}, 1, 1.0);
  REQUIRE(tab.entries.size() == 3);
  const double near = tab.entries[0].distance, far = tab.entries[1].distance;  // (0,1) and (0,2)
  CHECK(near > 0.0);
  CHECK(far == doctest::Approx(2.0 * near).epsilon(0.25));
}
