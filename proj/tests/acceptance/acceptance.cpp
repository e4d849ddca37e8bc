// Acceptance suite: one PASS/FAIL line per criterion. With a criterion
// number as argument only that criterion runs.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include <unistd.h>

#include "cli.hpp"
#include "openbook/io.hpp"
#include "oracles.hpp"

using namespace obl;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Timer {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<double> ladder(double a, double b, int n) {
  std::vector<double> r;
  for (int i = 0; i < n; ++i) r.push_back(a * std::pow(b / a, static_cast<double>(i) / (n - 1)));
  return r;
}

// ---------------------------------------------------------------- 1

Outcome open_book_density() {
  struct Case {
    int m, n;
    std::vector<int> mult;
  };
  const std::vector<Case> cases{{2, 2, {1, 1}}, {3, 2, {1, 1, 1}}, {2, 3, {2, 1, 1}}};
  Rng rng(101);
  double worst = 0.0, slowest = 0.0;
  bool ok = true;
  for (const auto& c : cases) {
    OpenBook book = testing::random_book(rng, c.m, c.n, static_cast<int>(c.mult.size()), 1, 0.3);
    for (std::size_t i = 0; i < c.mult.size(); ++i) book.sheets[i].multiplicity = c.mult[i];
    const Timer t;
    const DiscreteCurrent cur = sample_open_book(book, 1.0, 20000, 7);
    const Vec p(static_cast<std::size_t>(c.m + c.n), 0.0);
    const DensityProfile prof = density_profile(cur, p, ladder(0.3, 1.0, 16));
    const double half_q = 0.5 * book.total_multiplicity();
    for (double v : prof.values) worst = std::max(worst, std::abs(v - half_q) / half_q);
    slowest = std::max(slowest, t.seconds());
    ok = ok && t.seconds() < 10.0;
  }
  ok = ok && worst <= 0.01;
  return {ok, fmt("max relative deviation %.2e (tol 1e-2), slowest case %.2fs", worst, slowest)};
}

// ---------------------------------------------------------------- 2

Outcome transport_oracle() {
  Rng rng(202);
  const Spine spine = Spine::standard(2, 1);
  double worst = 0.0;
  const Timer t;
  for (int k = 0; k < 50; ++k) {
    testing::UnitInstance inst;
    const int na = 1 + rng.below(6), nb = 1 + rng.below(6);
    for (int i = 0; i < na; ++i) {
      inst.a_points.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
      inst.a_units.push_back(1 + rng.below(4));
    }
    int total = 0;
    for (int u : inst.a_units) total += u;
    // target units: a random composition of the same total, at least one per point
    const int nbe = std::min(nb, total);
    std::vector<int> bu(static_cast<std::size_t>(nbe), 1);
    for (int extra = total - nbe; extra > 0; --extra) ++bu[static_cast<std::size_t>(rng.below(nbe))];
    for (int j = 0; j < nbe; ++j) inst.b_points.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
    inst.b_units = bu;

    const double w2 = wasserstein2(inst.a(), inst.b()).cost;
    worst = std::max(worst, std::abs(w2 - testing::balanced_transport_oracle(inst)));

    // unbalanced on an independent target with its own total
    testing::UnitInstance u = inst;
    u.b_units.clear();
    for (int j = 0; j < nbe; ++j) u.b_units.push_back(1 + rng.below(4));
    const double ud = unbalanced_distance(u.a(), u.b(), spine).cost;
    worst = std::max(worst, std::abs(ud - testing::unbalanced_transport_oracle(u, spine)));
  }
  const bool ok = worst <= 1e-9 && t.seconds() < 30.0;
  return {ok, fmt("max |solver - oracle| %.2e over 50 instances (tol 1e-9), %.2fs", worst, t.seconds())};
}

// ---------------------------------------------------------------- 3

Outcome strong_excess_domination() {
  int violations = 0;
  double max_l2_ratio = 0.0, max_rev_ratio = 0.0, max_plan_gap = 0.0;
  for (int k = 0; k < 20; ++k) {
    const GraphFixture f = harmonic_graph_fixture(k % kGraphFamilies, 0.02 + 0.02 * (k / kGraphFamilies));
    const DiscreteCurrent t = sample_graph_over_book(f.book, f.sheets, 1.0, 900, 300 + k);
    ConeSampling cs;
    cs.count = 900;
    cs.seed = 900 + k;
    cs.noise_floor = false;
    const Vec p(3, 0.0);
    const StrongExcess se = strong_excess(t, f.book, p, 1.0, BumpFunction{1.0}, cs);
    if (!(se.l2_part <= se.value) || !(se.reverse_part <= se.value)) ++violations;
    max_l2_ratio = std::max(max_l2_ratio, se.l2_part / se.value);
    max_rev_ratio = std::max(max_rev_ratio, se.reverse_part / se.value);
    const double recomputed = plan_cost(se.source, se.target, f.book.spine, se.plan) / std::pow(se.radius, 4);
    max_plan_gap = std::max(max_plan_gap, std::abs(recomputed - se.value) / se.value);
  }
  const bool ok = violations == 0 && max_plan_gap <= 1e-12;
  return {ok, fmt("violations %d, max L2/E %.3f, max reverse/E %.3f, plan recompute gap %.1e", violations,
                  max_l2_ratio, max_rev_ratio, max_plan_gap)};
}

// ---------------------------------------------------------------- 4

Outcome monotonicity_with_errors() {
  double worst = 0.0;
  std::string where;
  for (int fam = 0; fam < kGraphFamilies; ++fam)
    for (double eps : {0.02, 0.05, 0.1}) {
      const GraphFixture f = harmonic_graph_fixture(fam, eps);
      const int per_sheet = (50000 + f.book.sheet_count() - 1) / f.book.sheet_count();
      SampleOptions so;
      so.per_sheet_count = per_sheet;
      const DiscreteCurrent t = sample_graph_over_book(f.book, f.sheets, 1.0, 50000, 41, so);
      // radii on stratum boundaries so that ball masses carry no jitter
      const int strata = radial_strata(2, per_sheet);
      const double s = std::sqrt(std::round(0.25 * strata) / strata);
      const Vec p(3, 0.0);
      const MonotonicityTerms mt = monotonicity_remainder(t, p, s, 1.0);
      const double rel = std::abs(mt.lhs - mt.rhs) / std::max(mt.lhs, mt.noise_floor);
      if (rel > worst) {
        worst = rel;
        where = fmt("%s eps=%.2f lhs=%.3e rhs=%.3e floor=%.1e", f.name.c_str(), eps, mt.lhs, mt.rhs, mt.noise_floor);
      }
    }
  return {worst <= 0.05, fmt("worst |lhs-rhs|/max(lhs,floor) %.3f (tol 0.05) at %s", worst, where.c_str())};
}

// ---------------------------------------------------------------- 5

Outcome density_monotonicity() {
  double worst = 0.0;
  Rng rng(505);
  auto check = [&](const DiscreteCurrent& t) {
    const Vec p(static_cast<std::size_t>(t.ambient_dim()), 0.0);
    const DensityProfile prof = density_profile(t, p, ladder(0.3, 1.0, 16));
    worst = std::max(worst, prof.monotonicity_defect / prof.mean());
  };
  for (int k = 0; k < 6; ++k) {
    const OpenBook book = testing::random_book(rng, 2 + k % 2, 1 + k % 3, 2 + k % 3, 2, 0.2);
    check(sample_open_book(book, 1.0, 20000, 50 + k));
  }
  for (int fam = 0; fam < kGraphFamilies; ++fam)
    for (double eps : {0.02, 0.05, 0.1}) {
      const GraphFixture f = harmonic_graph_fixture(fam, eps);
      check(sample_graph_over_book(f.book, f.sheets, 1.0, 20000, 60 + fam));
    }
  return {worst <= 0.005, fmt("worst defect / mean %.2e (tol 5e-3) over 15 fixtures", worst)};
}

// ---------------------------------------------------------------- 6

Outcome pruning_contract() {
  Rng rng(606);
  int failures = 0, stopped = 0, single = 0, merges = 0;
  for (int k = 0; k < 30; ++k) {
    const int n = 1 + k % 2;
    const Spine spine = Spine::standard(2, n);
    OpenBook base = testing::random_book(rng, 2, n, 1 + rng.below(3), 1, 0.6);
    for (auto& s : base.sheets) s.multiplicity = 1 + rng.below(3);
    // split sheets of multiplicity >= 2 into a nearby pair sharing it
    OpenBook cone = base;
    for (int i = 0; i < base.sheet_count(); ++i) {
      if (base.sheets[i].multiplicity < 2 || rng.uniform() < 0.3) continue;
      const Vec dir = rng.unit_sphere(n + 1);
      Vec pert(base.sheets[i].normal.size(), 0.0);
      for (int c = 0; c <= n; ++c) pert[1 + c] = dir[c];
      const Vec tilt =
          normalized(spine.perp_direction(add(base.sheets[i].normal, scaled(pert, rng.uniform(0.02, 0.2)))));
      const int moved = 1 + rng.below(base.sheets[i].multiplicity - 1);
      cone.sheets[i].multiplicity -= moved;
      cone.sheets.push_back(Sheet{tilt, moved});
    }
    // T stays inside the small-excess regime around the unsplit book
    DiscreteCurrent t;
    SampleOptions so;
    so.per_sheet_count = 150;
    if (rng.uniform() < 0.5) {
      t = sample_open_book(base, 1.0, 150, 700 + k, so);
    } else {
      std::vector<SheetFunction> g;
      const double eps = rng.uniform(0.0005, 0.003);
      for (int i = 0; i < base.sheet_count(); ++i)
        g.push_back([eps, n](CSpan y, MSpan out) {
          std::fill(out.begin(), out.end(), 0.0);
          out[static_cast<std::size_t>(1 + n)] = eps * y[0] * y[1];
        });
      t = sample_graph_over_book(base, g, 1.0, 150, 700 + k, so);
    }
    t.q = cone.total_multiplicity();
    PruneOptions po;
    po.sampling.seed = 700 + k;
    po.sampling.per_sheet = 150;
    std::vector<double> eps;
    for (int i = 1; i <= cone.total_multiplicity(); ++i) eps.push_back(1e-3 * std::pow(4.0, -i));
    const Vec p(static_cast<std::size_t>(2 + n), 0.0);
    const PruneTrace tr = prune(t, cone, p, 1.0, eps, po);
    bool ok = true;
    for (const auto& s : tr.steps) ok = ok && s.cone.total_multiplicity() == cone.total_multiplicity();
    ok = ok && tr.final_cone.total_multiplicity() == cone.total_multiplicity();
    ok = ok && (tr.stopped || tr.final_sheets == 1);
    const PruneStep& last = tr.steps.back();
    const double alpha = book_angle(tr.final_cone);
    ok = ok && last.excess <= eps[static_cast<std::size_t>(tr.final_sheets - 1)] * alpha * alpha;
    if (!ok) ++failures;
    if (tr.stopped) ++stopped;
    if (tr.final_sheets == 1) ++single;
    merges += static_cast<int>(tr.steps.size()) - 1;
  }
  return {failures == 0, fmt("%d/30 instances violate the contract (%d stopped, %d ended with one sheet, %d merges)",
                             failures, stopped, single, merges)};
}

// ---------------------------------------------------------------- 7

Outcome layer_subdivision_check() {
  Rng rng(707);
  int failures = 0, extended = 0, max_kappa = 0;
  std::string first;
  for (int k = 0; k < 100; ++k) {
    const int sheets = 2 + rng.below(4);
    const OpenBook book = testing::random_book(rng, 2 + rng.below(2), 1 + rng.below(2), sheets, 3, 0.01);
    const double delta = std::array<double, 3>{0.25, 0.5, 1.0}[static_cast<std::size_t>(rng.below(3))];
    try {
      const LayerDecomposition l = layer_subdivision(book, delta);
      auto bad = testing::check_layers(book, l);
      if (l.delta > delta) bad.push_back("delta increased");
      if (!bad.empty()) {
        ++failures;
        if (first.empty()) first = bad.front();
      }
      extended += l.extended;
      max_kappa = std::max(max_kappa, l.kappa);
    } catch (const Error& e) {
      ++failures;
      if (first.empty()) first = e.what();
    }
  }
  return {failures == 0, fmt("%d/100 books fail the independent checker%s%s (max kappa %d, %d extended)", failures,
                             first.empty() ? "" : ": ", first.c_str(), max_kappa, extended)};
}

// ---------------------------------------------------------------- 8

Outcome frequency_suite() {
  const Timer t;
  auto grid = std::make_shared<const HalfBallGrid>(2, 1.0 / 64);
  const Vec c{0.0, 0.0};
  const std::vector<double> radii = ladder(0.25, 1.0, 8);
  double lin_dev = 0.0, branch_dev = 0.0, defect = 0.0, doubling = 1.0, height = 1.0;

  std::vector<QFunction> all;
  for (const auto& dirs : std::vector<std::vector<double>>{{1.0}, {1.0, -1.0}, {2.0, 0.5, -1.0}}) {
    LinearQMap map;
    for (double v : dirs) {
      map.directions.push_back({v});
      map.multiplicities.push_back(1);
    }
    all.push_back(linear_fixture(grid, map));
    for (double i : frequency(all.back(), c, radii).frequency) lin_dev = std::max(lin_dev, std::abs(i - 1.0));
  }
  all.push_back(branch_fixture(grid));
  for (double i : frequency(all.back(), c, radii).frequency) branch_dev = std::max(branch_dev, std::abs(i - 1.5));
  all.push_back(homogeneous_fixture(grid, 2));
  all.push_back(solve_dirichlet(grid,
                                {[](CSpan x, MSpan o) {
                                  const double th = std::atan2(x[1], x[0]);
                                  o[0] = std::sin(th) + 0.3 * std::sin(3 * th) + 0.2 * std::sin(5 * th);
                                }},
                                {1}, 1));
  for (const auto& u : all) {
    defect = std::max(defect, frequency(u, c, radii).monotonicity_defect);
    for (double r : {0.4, 0.6}) {
      const DoublingReport d = energy_doubling_check(u, c, r, 2.0 * r > 1.0 ? 1.0 : 2.0 * r);
      for (double s : d.slack) doubling = std::min(doubling, s);
    }
    const double alpha = frequency(u, c, {0.25}).frequency[0];
    height = std::min(height, height_decay(u, 0.5, alpha).slack);
  }
  const bool ok = lin_dev <= 0.03 && branch_dev <= 0.05 && defect <= 0.02 && doubling >= -0.02 && height >= -0.02 &&
                  t.seconds() < 60.0;
  return {ok, fmt("linear |I-1| %.1e, branch |I-1.5| %.1e, defect %.1e, doubling slack %.3f, height slack %.3f, %.1fs",
                  lin_dev, branch_dev, defect, doubling, height, t.seconds())};
}

// ---------------------------------------------------------------- 9

Outcome frequency_identities_check() {
  const std::vector<double> hs{1.0 / 16, 1.0 / 32, 1.0 / 64};
  const std::vector<double> rs{0.5, 0.75};
  // errors[h][radius * 2 + identity]
  std::vector<std::array<double, 4>> err;
  for (double h : hs) {
    auto grid = std::make_shared<const HalfBallGrid>(2, h);
    const QFunction u = solve_dirichlet(grid,
                                        {[](CSpan x, MSpan o) {
                                          const double th = std::atan2(x[1], x[0]);
                                          o[0] = std::sin(th) + 0.3 * std::sin(3 * th) + 0.2 * std::sin(5 * th);
                                        }},
                                        {1}, 1);
    std::array<double, 4> e{};
    for (std::size_t k = 0; k < rs.size(); ++k) {
      const IdentityReport id = frequency_identities(u, Vec{0.0, 0.0}, rs[k]);
      e[2 * k] = id.error_first;
      e[2 * k + 1] = id.error_second;
    }
    err.push_back(e);
  }
  double worst_fine = 0.0, worst_order = 10.0;
  for (std::size_t q = 0; q < 4; ++q) {
    worst_fine = std::max(worst_fine, err.back()[q]);
    const double order = loglog_slope(hs, {err[0][q], err[1][q], err[2][q]});
    worst_order = std::min(worst_order, order);
  }
  return {worst_fine <= 0.03 && worst_order >= 0.8,
          fmt("max error at h=1/64 %.2e (tol 3e-2), min empirical order %.2f (min 0.8); r=0.75 first identity "
              "%.1e %.1e %.1e",
              worst_fine, worst_order, err[0][2], err[1][2], err[2][2])};
}

// ---------------------------------------------------------------- 10

Outcome decay_loop_check() {
  const Timer t;
  int refits = 0, contracted = 0;
  bool conserved = true, bounded = true;
  std::string drift;
  for (int fam = 0; fam < kGraphFamilies; ++fam) {
    double first_half = 0.0, second_half = 0.0;
    for (double eps : {0.02, 0.05, 0.1}) {
      const GraphFixture f = harmonic_graph_fixture(fam, eps);
      DecayParameters p;
      p.eta = 0.5;
      p.theta = 0.5;
      p.seed = 3;
      p.per_sheet = 200;
      p.max_steps = 12;
      const auto recs = decay_loop(graph_source(f, p.per_sheet, p.seed), f.start, Vec(3, 0.0), 1.0, p);
      for (const auto& r : recs) {
        conserved = conserved && r.cone.total_multiplicity() == f.start.total_multiplicity();
        if (r.action != DecayAction::Refit) continue;
        ++refits;
        contracted += r.ratio <= 0.5;
        if (!std::isfinite(r.drift)) bounded = false;
        (r.step < 6 ? first_half : second_half) = std::max(r.step < 6 ? first_half : second_half, r.drift);
      }
    }
    // the drift constant may not grow along the sequence
    bounded = bounded && second_half <= first_half;
    drift += fmt("%s%.2e", fam ? "," : "", first_half);
  }
  const double frac = refits ? static_cast<double>(contracted) / refits : 0.0;
  const bool ok = frac >= 0.8 && conserved && bounded;
  return {ok, fmt("ratio <= 0.5 on %d/%d refit steps (%.0f%%, min 80%%), drift constants per family [%s], %.1fs",
                  contracted, refits, 100 * frac, drift.c_str(), t.seconds())};
}

// ---------------------------------------------------------------- 11

Outcome decomposition() {
  int pass = 0, total = 0;
  double min_margin = 1.0;
  for (int fam = 0; fam < kGraphFamilies; ++fam)
    for (double eps : {0.01, 0.02, 0.05}) {
      const GraphFixture f = harmonic_graph_fixture(fam, eps);
      const DiscreteCurrent t = sample_graph_over_book(f.book, f.sheets, 1.0, 6000, 11);
      const DecompositionResult d = decomposition_check(t, f.book, Vec(3, 0.0), 1.0);
      ++total;
      if (d.pass && d.min_margin > 0.0) ++pass;
      min_margin = std::min(min_margin, d.min_margin);
    }
  const OpenBook book = OpenBook::planar(2, 1, {0.0, 2.0}, {1, 1});
  const DiscreteCurrent h = handle_fixture(book, 0.05, 6000, 12);
  const DecompositionResult hd = decomposition_check(h, book, Vec(3, 0.0), 1.0);
  const bool ok = pass == total && !hd.pass && !hd.bridges.empty();
  return {ok, fmt("%d/%d graph fixtures PASS (min margin %.3f); handle fixture %s with %zu bridge samples", pass, total,
                  min_margin, hd.pass ? "PASS" : "FAIL", hd.bridges.size())};
}

// ---------------------------------------------------------------- 12

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome cli_determinism() {
  const fs::path dir = fs::temp_directory_path() / fmt("openbook_accept_%d", static_cast<int>(::getpid()));
  fs::create_directories(dir);
  const std::string book = (dir / "book.json").string();
  io::write_book(book, OpenBook::planar(2, 1, {0.0, 2.0}, {1, 1}));
  std::ofstream(dir / "manifest.json") << R"({"fixture":"tilt_quadratic","parameters":{"amplitude":0.05,"eta":0.5,)"
                                          R"("theta":0.5,"max_steps":3},"seeds":[1,2],"resolutions":[60]})";
  std::ofstream(dir / "params.json") << R"({"eta":0.5,"theta":0.5})";
  auto path = [&](const char* name) { return (dir / name).string(); };

  // inputs shared by the analysis commands
  std::ostringstream sink, err;
  obl::cli::run({"gen", "--family", "1", "--amplitude", "0.05", "--count", "1500", "--seed", "5", "-o", path("T.jsonl")},
                sink, err);
  obl::cli::run({"gen", "--book", book, "--count", "600", "--seed", "6", "-o", path("B.jsonl")}, sink, err);
  obl::cli::run({"gen", "--book", book, "--count", "400", "--seed", "8", "-o", path("C.jsonl")}, sink, err);

  const std::vector<std::vector<std::string>> commands{
      {"gen", "--book", book, "--count", "2000", "--seed", "7"},
      {"density", "-i", path("T.jsonl"), "--center", "0", "--radii", "0.1:1.0:16"},
      {"excess", "-i", path("B.jsonl"), "--cone", book, "--seed", "3"},
      {"transport", "-i", path("B.jsonl"), "--target", path("C.jsonl"), "--cone", book},
      {"prune", "-i", path("B.jsonl"), "--cone", book, "--seed", "3"},
      {"frequency", "--fixture", "branch", "--h", "0.0625"},
      {"solve", "--h", "0.0625"},
      {"decay", "-i", path("T.jsonl"), "--cone", book, "--steps", "3", "--seed", "3", "--params", path("params.json")},
      {"decay", "--manifest", path("manifest.json")},
      {"whitney", "-i", path("B.jsonl"), "--cone", book, "--max-generation", "3"},
      {"check", "-i", path("B.jsonl"), "--cone", book},
  };
  int mismatched = 0, errors = 0;
  std::string first;
  for (const auto& cmd : commands) {
    std::string outputs[2];
    int codes[2];
    for (int run = 0; run < 2; ++run) {
      // second run with a different worker cap
      ::setenv("OPENBOOK_LAB_THREADS", run ? "3" : "1", 1);
      std::ostringstream out, e;
      codes[run] = obl::cli::run(cmd, out, e);
      outputs[run] = out.str();
    }
    ::unsetenv("OPENBOOK_LAB_THREADS");
    if (codes[0] != codes[1] || outputs[0] != outputs[1] || outputs[0].empty()) {
      ++mismatched;
      if (first.empty()) first = cmd.front();
    }
    if (codes[0] == 2) ++errors;
  }
  // file outputs as well
  std::ostringstream o1, o2, e1;
  obl::cli::run({"gen", "--book", book, "--count", "500", "--seed", "9", "-o", path("g1.jsonl")}, o1, e1);
  obl::cli::run({"gen", "--book", book, "--count", "500", "--seed", "9", "-o", path("g2.jsonl")}, o2, e1);
  if (slurp(path("g1.jsonl")) != slurp(path("g2.jsonl"))) ++mismatched;
  fs::remove_all(dir);
  return {mismatched == 0 && errors == 0,
          fmt("%zu subcommand runs, %d not byte-identical%s%s, %d usage errors", commands.size() + 1, mismatched,
              first.empty() ? "" : " first: ", first.c_str(), errors)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"open-book density", open_book_density},
      {"transport oracle equivalence", transport_oracle},
      {"strong excess domination", strong_excess_domination},
      {"monotonicity identity with error terms", monotonicity_with_errors},
      {"density monotonicity", density_monotonicity},
      {"pruning contract", pruning_contract},
      {"layer subdivision", layer_subdivision_check},
      {"frequency suite", frequency_suite},
      {"frequency identities", frequency_identities_check},
      {"decay loop", decay_loop_check},
      {"decomposition check", decomposition},
      {"cli determinism", cli_determinism},
  };
  int only = argc > 1 ? std::atoi(argv[1]) : 0;
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::fprintf(stderr, "usage: %s [criterion 1..%zu]\n", argv[0], criteria.size());
    return 2;
  }
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only && static_cast<int>(i) + 1 != only) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
