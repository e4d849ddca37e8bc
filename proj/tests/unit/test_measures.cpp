#include <doctest.h>

#include <numbers>

#include "openbook/measures.hpp"

using namespace obl;

namespace {

OpenBook three_sheets() { return OpenBook::planar(2, 1, {0.0, 2.0, 4.0}, {1, 2, 1}); }

}  // namespace

TEST_CASE("sample mass matches half-disc area times multiplicity") {
  const OpenBook b = three_sheets();
  const DiscreteCurrent t = sample_open_book(b, 1.5, 0, 4, {.per_sheet_count = 400});
  CHECK(t.q == 4);
  CHECK(t.measure.total_mass() == doctest::Approx(4 * unit_ball_volume(2) * 1.5 * 1.5 / 2.0).epsilon(1e-12));
  t.validate();
}

TEST_CASE("boundary density of a book is Q/2 at every scale") {
  const OpenBook b = three_sheets();
  const DiscreteCurrent t = sample_open_book(b, 1.0, 0, 9, {.per_sheet_count = 2000});
  const Vec origin(3, 0.0);
  for (double r : {0.25, 0.5, 1.0})
    CHECK(density(t, origin, r).value == doctest::Approx(2.0).epsilon(0.02));
  const DensityProfile p = density_profile(t, origin, {0.3, 0.6, 0.9});
  CHECK(p.mean() == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("interior density on a single sheet is the multiplicity") {
  const OpenBook b = OpenBook::planar(2, 1, {0.0}, {2});
  const DiscreteCurrent t = sample_open_book(b, 1.0, 0, 2, {.per_sheet_count = 4000});
  const Vec p = add(scaled(b.sheets[0].normal, 0.5), Vec{0.0, 0.0, 0.0});
  const DensityValue v = density(t, p, 0.2, {.flavor = DensityFlavor::Interior});
  CHECK(v.value == doctest::Approx(2.0).epsilon(0.05));
  CHECK_FALSE(v.low_sample_warning);
}

TEST_CASE("small balls warn and empty balls throw") {
  const DiscreteCurrent t = sample_open_book(three_sheets(), 1.0, 0, 1, {.per_sheet_count = 100});
  CHECK(density(t, Vec(3, 0.0), 0.3).low_sample_warning);
  CHECK_THROWS_AS(density(t, Vec(3, 0.0), 1e-6), Error);
}

TEST_CASE("sampling is deterministic in the seed") {
  const OpenBook b = three_sheets();
  const DiscreteCurrent x = sample_open_book(b, 1.0, 0, 17, {.per_sheet_count = 300});
  const DiscreteCurrent y = sample_open_book(b, 1.0, 0, 17, {.per_sheet_count = 300});
  const DiscreteCurrent z = sample_open_book(b, 1.0, 0, 18, {.per_sheet_count = 300});
  CHECK(x.measure.points == y.measure.points);
  CHECK(x.measure.weights == y.measure.weights);
  CHECK(x.measure.points != z.measure.points);
}

TEST_CASE("radial strata grow with the per-sheet count") {
  CHECK(radial_strata(2, 1) >= 1);
  CHECK(radial_strata(2, 400) >= radial_strata(2, 100));
  CHECK(radial_strata(3, 4000) >= radial_strata(3, 100));
}

TEST_CASE("a book is calibrated and has a flat monotonicity remainder") {
  const OpenBook b = three_sheets();
  const DiscreteCurrent t = sample_open_book(b, 1.0, 0, 5, {.per_sheet_count = 1500});
  const CalibrationDefect c = calibration_defect(t, b.spine, 4);
  CHECK(c.defect == doctest::Approx(0.0).epsilon(1e-9).scale(1.0));
  CHECK(c.paired_mass == doctest::Approx(c.mass).epsilon(1e-9));

  const MonotonicityTerms mt = monotonicity_remainder(t, Vec(3, 0.0), 0.3, 0.9);
  CHECK(mt.rhs == doctest::Approx(0.0).scale(1.0));
  CHECK(std::abs(mt.lhs) <= mt.noise_floor + 1e-12);
}

TEST_CASE("circular pushforward of a book lands on one half-plane") {
  const OpenBook b = three_sheets();
  const DiscreteCurrent t = sample_open_book(b, 1.0, 0, 5, {.per_sheet_count = 200});
  const DiscreteCurrent p = pushforward_circular(t, b.spine);
  CHECK(p.ambient_dim() == 2);
  CHECK(p.measure.total_mass() == doctest::Approx(t.measure.total_mass()));
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(p.measure.point(i)[1] >= 0.0);
}

TEST_CASE("m-vector inner product") {
  const Vec e12{1.0, 0.0, 0.0, 0.0, 1.0, 0.0};
  const Vec e21{0.0, 1.0, 0.0, 1.0, 0.0, 0.0};
  CHECK(mvector_inner(e12, e12, 2) == doctest::Approx(1.0));
  CHECK(mvector_inner(e12, e21, 2) == doctest::Approx(-1.0));
  const Vec rows = orthonormal_rows(Vec{2.0, 0.0, 0.0, 1.0, 1.0, 0.0}, 2, 3);
  CHECK(mvector_inner(rows, e12, 2) == doctest::Approx(1.0));
}

TEST_CASE("invalid measures are rejected") {
  DiscreteMeasure m(2);
  m.add(Vec{0.0, 0.0}, -1.0);
  CHECK_THROWS_AS(m.validate(), Error);
}
