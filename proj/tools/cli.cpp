#include "cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "openbook/io.hpp"

namespace obl::cli {

namespace {

using io::Json;
using io::number;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Writes to a file when a path is given, otherwise to the command's stdout.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) fail(ErrorCode::ParseError, "cannot write " + path);
      os_ = file_.get();
    }
  }
  std::ostream& operator*() { return *os_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_;
};

Vec parse_center(const std::string& text, int dim) {
  Vec c;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      c.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw UsageError("--center: expected a number or a comma list of " + std::to_string(dim) + " numbers, got '" +
                       text + "'");
    }
  }
  if (c.size() == 1 && c[0] == 0.0) return Vec(dim, 0.0);
  if (static_cast<int>(c.size()) != dim)
    throw UsageError("--center: expected 0 or " + std::to_string(dim) + " comma-separated numbers");
  return c;
}

// Flat parameter file shared by the subcommands.
struct Params {
  std::vector<double> eps;
  double eta = 0.1, theta = 0.01, kappa = 1.0, tau = 0.25, delta_bar = 0.05, c0 = 1.0;
  double a_gamma = 0.0, a_sigma = 0.0;
  Json raw = Json::object();
};

Params load_params(const std::string& path) {
  Params p;
  if (path.empty()) return p;
  p.raw = io::read_json_file(path);
  const Json& j = p.raw;
  if (j.contains("eps"))
    for (const auto& e : j.at("eps")) p.eps.push_back(e.get<double>());
  p.eta = j.value("eta", p.eta);
  p.theta = j.value("theta", p.theta);
  p.kappa = j.value("kappa", p.kappa);
  p.tau = j.value("tau", p.tau);
  p.delta_bar = j.value("delta_bar", p.delta_bar);
  p.c0 = j.value("c0", p.c0);
  p.a_gamma = j.value("a_gamma", p.a_gamma);
  p.a_sigma = j.value("a_sigma", p.a_sigma);
  return p;
}

DecayParameters decay_parameters(const Params& p) {
  DecayParameters d;
  d.eps = p.eps;
  d.eta = p.eta;
  d.theta = p.theta;
  d.kappa = p.kappa;
  d.a_gamma = p.a_gamma;
  d.a_sigma = p.a_sigma;
  return d;
}

std::vector<double> eps_schedule(const Params& p, int q) {
  DecayParameters d = decay_parameters(p);
  std::vector<double> eps;
  for (int k = 1; k <= q; ++k) eps.push_back(d.eps_at(k));
  return eps;
}

void require_seed(bool given, const char* cmd) {
  if (!given) throw UsageError(std::string(cmd) + ": --seed is required for sampling subcommands");
}

double max_weight(const DiscreteCurrent& t) {
  double w = 0.0;
  for (double x : t.measure.weights) w = std::max(w, x);
  return w;
}

// Common options, bound per subcommand.
struct Options {
  std::string input, output, cone, params, center = "0", radii, target, plan, fixture, manifest, variant = "sharp";
  std::string evaluator = "strong", flavor = "boundary";
  std::uint64_t seed = 0;
  double radius = 1.0, lp_eps = 1e-10, h = 1.0 / 32.0, amplitude = 0.05;
  int count = 20000, per_sheet = 0, family = -1, steps = 12, m = 2, max_generation = 4, k = 2;
};

int cmd_gen(const Options& o, bool seeded, std::ostream& out) {
  require_seed(seeded, "gen");
  DiscreteCurrent t;
  SampleOptions so;
  so.per_sheet_count = o.per_sheet;
  if (o.family >= 0) {
    if (o.family >= kGraphFamilies) throw UsageError("--family: expected 0.." + std::to_string(kGraphFamilies - 1));
    const GraphFixture f = harmonic_graph_fixture(o.family, o.amplitude);
    t = sample_graph_over_book(f.book, f.sheets, o.radius, o.count, o.seed, so);
  } else {
    if (o.cone.empty()) throw UsageError("gen: --book <file> or --family <k> is required");
    t = sample_open_book(io::read_book(o.cone), o.radius, o.count, o.seed, so);
  }
  Sink sink(o.output, out);
  io::write_current(*sink, t);
  return 0;
}

int cmd_density(const Options& o, std::ostream& out) {
  const DiscreteCurrent t = io::read_current(o.input);
  const Params p = load_params(o.params);
  DensityOptions d;
  if (o.flavor == "interior")
    d.flavor = DensityFlavor::Interior;
  else if (o.flavor != "boundary")
    throw UsageError("--flavor: expected interior|boundary");
  d.a_gamma = p.a_gamma;
  d.a_sigma = p.a_sigma;
  d.c0 = p.c0;
  const Vec c = parse_center(o.center, t.ambient_dim());
  const auto radii = parse_radii(o.radii.empty() ? number(o.radius) : o.radii);
  const DensityProfile prof = density_profile(t, c, radii, d);
  const double wmax = max_weight(t);
  Sink sink(o.output, out);
  *sink << "r,theta,samples,resolution,noise_floor\n";
  for (std::size_t i = 0; i < prof.radii.size(); ++i) {
    const double floor = wmax / (unit_ball_volume(t.m) * std::pow(prof.radii[i], t.m));
    *sink << number(prof.radii[i]) << ',' << number(prof.values[i]) << ',' << prof.samples[i] << ',' << t.size()
          << ',' << number(floor) << '\n';
  }
  return 0;
}

int cmd_excess(const Options& o, bool seeded, std::ostream& out) {
  require_seed(seeded, "excess");
  if (o.cone.empty()) throw UsageError("excess: --cone <file> is required");
  const DiscreteCurrent t = io::read_current(o.input);
  const OpenBook cone = io::read_book(o.cone);
  const Params p = load_params(o.params);
  const Vec c = parse_center(o.center, t.ambient_dim());
  ConeSampling cs;
  cs.seed = o.seed;
  cs.per_sheet = o.per_sheet;
  SimplexOptions lp;
  lp.eps = o.lp_eps;
  const StrongExcess se = strong_excess(t, cone, c, o.radius, BumpFunction{o.radius}, cs, lp);
  ExcessReport rep;
  rep.l2 = l2_excess(t, cone, c, o.radius);
  rep.reverse_l2 = reverse_l2_excess(t, cone, c, o.radius, cs).value;
  rep.strong = se.value;
  rep.noise_floor = se.noise_floor;
  rep.kappa = p.kappa;
  rep.a_gamma = p.a_gamma;
  rep.a_sigma = p.a_sigma;
  rep.amended = amended_excess(se.value, p.kappa, p.a_gamma, p.a_sigma, o.radius);
  rep.cone = cone;
  rep.radius = o.radius;
  rep.center = c;

  char line[160];
  std::snprintf(line, sizeof line, "%-12s %24s %12s %24s\n", "quantity", "value", "resolution", "noise_floor");
  out << line;
  auto row = [&](const char* name, double v) {
    std::snprintf(line, sizeof line, "%-12s %24.17g %12zu %24.17g\n", name, v, se.current_samples, se.noise_floor);
    out << line;
  };
  row("l2", rep.l2);
  row("reverse_l2", rep.reverse_l2);
  row("strong", se.value);
  row("strong_l2", se.l2_part);
  row("strong_rev", se.reverse_part);
  row("amended", rep.amended);
  if (!o.output.empty()) {
    Sink sink(o.output, out);
    *sink << io::to_json(rep).dump(2) << '\n';
  }
  if (!o.plan.empty()) {
    Sink sink(o.plan, out);
    write_plan_csv(*sink, se.plan);
  }
  return 0;
}

int cmd_transport(const Options& o, std::ostream& out) {
  if (o.target.empty()) throw UsageError("transport: --target <current> is required");
  const DiscreteCurrent a = io::read_current(o.input);
  const DiscreteCurrent b = io::read_current(o.target);
  SimplexOptions lp;
  lp.eps = o.lp_eps;
  TransportResult res;
  std::string kind;
  if (o.cone.empty()) {
    kind = "balanced";
    res = wasserstein2(a.measure, b.measure, lp);
  } else {
    kind = "unbalanced";
    res = unbalanced_distance(a.measure, b.measure, io::read_book(o.cone).spine, 1.0, lp);
  }
  Sink sink(o.output, out);
  *sink << "kind,cost,pivots,source_points,target_points,resolution,noise_floor\n";
  *sink << kind << ',' << number(res.cost) << ',' << res.pivots << ',' << a.size() << ',' << b.size() << ','
        << std::min(a.size(), b.size()) << ",0\n";
  if (!o.plan.empty()) {
    Sink plan(o.plan, out);
    write_plan_csv(*plan, res.plan);
  }
  return 0;
}

int cmd_prune(const Options& o, bool seeded, std::ostream& out, std::ostream& err) {
  require_seed(seeded, "prune");
  if (o.cone.empty()) throw UsageError("prune: --cone <file> is required");
  const DiscreteCurrent t = io::read_current(o.input);
  const OpenBook cone = io::read_book(o.cone);
  const Params p = load_params(o.params);
  const Vec c = parse_center(o.center, t.ambient_dim());
  PruneOptions po;
  if (o.evaluator == "l2")
    po.evaluator = ExcessEvaluator::L2;
  else if (o.evaluator != "strong")
    throw UsageError("--evaluator: expected strong|l2");
  po.sampling.seed = o.seed;
  po.sampling.per_sheet = o.per_sheet;
  po.lp.eps = o.lp_eps;
  const int q = cone.total_multiplicity();
  const auto eps = eps_schedule(p, q);
  const PruneTrace trace = prune(t, cone, c, o.radius, eps, po);
  Sink sink(o.output, out);
  *sink << io::to_json(trace).dump(2) << '\n';

  bool ok = trace.final_cone.total_multiplicity() == q;
  for (const auto& s : trace.steps) ok = ok && s.cone.total_multiplicity() == q;
  ok = ok && (trace.stopped || trace.final_sheets == 1);
  if (!ok) err << "prune: contract violated (multiplicity or stop rule)\n";
  return ok ? 0 : 1;
}

QFunction frequency_input(const Options& o) {
  if (!o.input.empty()) {
    std::ifstream in(o.input);
    if (!in) fail(ErrorCode::ParseError, "cannot open " + o.input);
    return io::read_qfunction(in);
  }
  auto grid = std::make_shared<const HalfBallGrid>(o.m, o.h);
  if (o.fixture == "linear") {
    LinearQMap map;
    map.directions = {{1.0}, {-0.5}};
    map.multiplicities = {1, 1};
    return linear_fixture(grid, map);
  }
  if (o.fixture == "homogeneous") return homogeneous_fixture(grid, o.k, o.amplitude);
  if (o.fixture == "branch") return branch_fixture(grid, o.amplitude);
  throw UsageError("frequency: -i <qfunction> or --fixture linear|homogeneous|branch is required");
}

int cmd_frequency(const Options& o, std::ostream& out) {
  const QFunction u = frequency_input(o);
  const Vec c = parse_center(o.center, u.grid->m());
  FrequencyVariant v = FrequencyVariant::Sharp;
  if (o.variant == "smoothed")
    v = FrequencyVariant::Smoothed;
  else if (o.variant != "sharp")
    throw UsageError("--variant: expected sharp|smoothed");
  const auto radii = parse_radii(o.radii.empty() ? "0.25:0.75:8" : o.radii);
  const FrequencyProfile prof = frequency(u, c, radii, v);
  Sink sink(o.output, out);
  io::write_frequency_csv(*sink, prof);
  return 0;
}

// Sheet data sum_k a_k sin(k phi) times a direction, phi = atan2(x_m, x_1).
int cmd_solve(const Options& o, std::ostream& out) {
  const Params p = load_params(o.params);
  struct SheetData {
    std::vector<std::pair<int, double>> modes;
    Vec direction;
    int multiplicity = 1;
  };
  const int n = p.raw.value("n", 1);
  std::vector<SheetData> data;
  if (p.raw.contains("sheets")) {
    for (const auto& s : p.raw.at("sheets")) {
      SheetData d;
      for (const auto& mode : s.at("modes")) d.modes.emplace_back(mode.at(0).get<int>(), mode.at(1).get<double>());
      d.direction = s.contains("direction") ? s.at("direction").get<Vec>() : unit_vector(n, 0);
      d.multiplicity = s.value("multiplicity", 1);
      if (static_cast<int>(d.direction.size()) != n) throw UsageError("solve: sheet direction must have length n");
      data.push_back(std::move(d));
    }
  } else {
    data.push_back(SheetData{{{1, 1.0}, {3, 0.3}, {5, 0.2}}, unit_vector(n, 0), 1});
  }
  const int m = o.m;
  std::vector<BoundaryData> sheets;
  std::vector<int> mult;
  for (const auto& d : data) {
    sheets.push_back([d, m](CSpan x, MSpan outv) {
      const double phi = std::atan2(x[m - 1], x[0]);
      double s = 0.0;
      for (const auto& [k, a] : d.modes) s += a * std::sin(k * phi);
      for (std::size_t i = 0; i < outv.size(); ++i) outv[i] = s * d.direction[i];
    });
    mult.push_back(d.multiplicity);
  }
  auto grid = std::make_shared<const HalfBallGrid>(m, o.h);
  SolveReport rep;
  const QFunction u = solve_dirichlet(grid, sheets, mult, n, &rep);
  if (o.output.empty()) {
    io::write_qfunction(out, u);
  } else {
    Sink sink(o.output, out);
    io::write_qfunction(*sink, u);
    out << "unknowns,residual,resolution,noise_floor\n"
        << rep.unknowns << ',' << number(rep.residual) << ',' << number(o.h) << ",0\n";
  }
  return 0;
}

int cmd_decay(const Options& o, bool seeded, std::ostream& out, std::ostream& err) {
  if (!o.manifest.empty()) {
    const Json manifest = io::read_json_file(o.manifest);
    std::ostringstream records, summary;
    const int code = io::run_manifest(manifest, records, summary);
    Sink sink(o.output, out);
    *sink << records.str();
    if (!o.plan.empty()) {
      Sink s(o.plan, out);
      *s << summary.str();
    } else {
      err << summary.str();
    }
    return code;
  }
  require_seed(seeded, "decay");
  if (o.cone.empty()) throw UsageError("decay: --cone <file> is required");
  const DiscreteCurrent t = io::read_current(o.input);
  const OpenBook cone = io::read_book(o.cone);
  const Params p = load_params(o.params);
  DecayParameters dp = decay_parameters(p);
  dp.max_steps = o.steps;
  dp.seed = o.seed;
  dp.per_sheet = o.per_sheet;
  for (const auto& issue : dp.ordering_issues(cone.total_multiplicity(), cone.sheet_count()))
    err << "warning: " << issue << '\n';
  const Vec c = parse_center(o.center, t.ambient_dim());
  const auto records = decay_loop(rescaling_source(t, c), cone, c, o.radius, dp);
  Sink sink(o.output, out);
  bool ok = true;
  for (const auto& r : records) {
    Json j = io::to_json(r);
    j["resolution"] = t.size();
    j["noise_floor"] = 0.0;
    *sink << j.dump() << '\n';
    ok = ok && r.cone.total_multiplicity() == cone.total_multiplicity();
  }
  if (!ok) err << "decay: total multiplicity not conserved\n";
  return ok ? 0 : 1;
}

int cmd_whitney(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.cone.empty()) throw UsageError("whitney: --cone <file> is required");
  const DiscreteCurrent t = io::read_current(o.input);
  const OpenBook cone = io::read_book(o.cone);
  const Params p = load_params(o.params);
  WhitneyOptions wo;
  wo.max_generation = o.max_generation;
  wo.tau = p.tau;
  wo.delta_bar = p.delta_bar;
  const WhitneyReport rep = whitney_classify(t, cone, wo);
  Sink sink(o.output, out);
  *sink << Json{{"tiling_ok", rep.tiling_ok},
                {"tiling_failures", rep.tiling_failures},
                {"max_overlap", rep.max_overlap},
                {"density_factor", rep.density_factor},
                {"separation", rep.separation},
                {"resolution", t.size()},
                {"noise_floor", max_weight(t)},
                {"layers", io::to_json(rep.layers)}}
               .dump()
        << '\n';
  for (const auto& cube : rep.cubes) *sink << io::to_json(cube).dump() << '\n';
  if (!rep.tiling_ok) err << "whitney: regions do not tile\n";
  return rep.tiling_ok ? 0 : 1;
}

// Decomposition verdict, density monotonicity and the layer subdivision
// multiplicity count on one input.
int cmd_check(const Options& o, std::ostream& out) {
  if (o.cone.empty()) throw UsageError("check: --cone <file> is required");
  const DiscreteCurrent t = io::read_current(o.input);
  const OpenBook cone = io::read_book(o.cone);
  const Params p = load_params(o.params);
  const Vec c = parse_center(o.center, t.ambient_dim());

  const DecompositionResult dec = decomposition_check(t, cone, c, o.radius);
  const auto radii = parse_radii(o.radii.empty() ? "0.3:1.0:16" : o.radii);
  const DensityProfile prof = density_profile(t, c, radii);
  // one sample entering or leaving the smallest ball
  const double floor = max_weight(t) / (unit_ball_volume(t.m) * std::pow(radii.front(), t.m));
  const double mono_tol = std::max(0.005 * prof.mean(), floor);
  const LayerDecomposition layers = layer_subdivision(cone, p.delta_bar);
  int layer_q = 0;
  for (int mlt : layers.multiplicities.empty() ? std::vector<int>{} : layers.multiplicities.front()) layer_q += mlt;
  const bool layers_ok = layers.multiplicities.empty() || layer_q == cone.total_multiplicity();

  out << "check,verdict,value,resolution,noise_floor\n";
  out << "decomposition," << (dec.pass ? "PASS" : "FAIL") << ',' << number(dec.min_margin) << ',' << t.size()
      << ",0\n";
  out << "density_monotonicity," << (prof.monotonicity_defect <= mono_tol ? "PASS" : "FAIL") << ','
      << number(prof.monotonicity_defect) << ',' << t.size() << ',' << number(floor) << '\n';
  out << "layer_multiplicity," << (layers_ok ? "PASS" : "FAIL") << ',' << layer_q << ',' << cone.sheet_count()
      << ",0\n";
  for (std::size_t b : dec.bridges) out << "bridge," << b << ",,,\n";
  return dec.pass && prof.monotonicity_defect <= mono_tol && layers_ok ? 0 : 1;
}

}  // namespace

std::vector<double> parse_radii(const std::string& text) {
  const auto bad = [&] {
    return UsageError("--radii: expected a:b:n (n log-spaced radii, 0 < a <= b, n >= 1), got '" + text + "'");
  };
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ':')) parts.push_back(tok);
  try {
    if (parts.size() == 1) {
      const double r = std::stod(parts[0]);
      if (!(r > 0.0)) throw bad();
      return {r};
    }
    if (parts.size() != 3) throw bad();
    const double a = std::stod(parts[0]), b = std::stod(parts[1]);
    const int n = std::stoi(parts[2]);
    if (!(a > 0.0 && b >= a && n >= 1)) throw bad();
    std::vector<double> r(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) r[i] = n == 1 ? a : a * std::pow(b / a, static_cast<double>(i) / (n - 1));
    return r;
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception&) {
    throw bad();
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"openbook_lab: open-book tangent cone experiments"};
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("gen", "sample an open book or a harmonic graph fixture");
  auto* dens = app.add_subcommand("density", "density profile CSV");
  auto* exc = app.add_subcommand("excess", "L2, reverse and strong excess table");
  auto* tra = app.add_subcommand("transport", "exact transport between two currents");
  auto* pru = app.add_subcommand("prune", "prune a cone against a current");
  auto* fre = app.add_subcommand("frequency", "frequency profile CSV of a Q-function");
  auto* sol = app.add_subcommand("solve", "harmonic extension on the half ball");
  auto* dec = app.add_subcommand("decay", "decay loop records as JSON-lines");
  auto* whi = app.add_subcommand("whitney", "Whitney cube classification");
  auto* chk = app.add_subcommand("check", "decomposition and monotonicity checks");

  std::vector<CLI::Option*> seed_opts;
  for (auto* sc : {gen, dens, exc, tra, pru, fre, sol, dec, whi, chk}) {
    sc->add_option("-o,--output", o.output, "output path (default stdout)");
    sc->add_option("--params", o.params, "JSON parameter file");
  }
  for (auto* sc : {dens, exc, tra, pru, whi, chk}) sc->add_option("-i,--input", o.input, "current file")->required();
  dec->add_option("-i,--input", o.input, "current file");
  fre->add_option("-i,--input", o.input, "Q-function file");
  for (auto* sc : {gen, exc, pru, dec}) seed_opts.push_back(sc->add_option("--seed", o.seed, "sampling seed"));
  for (auto* sc : {dens, exc, pru, fre, dec, chk}) sc->add_option("--center", o.center, "0 or comma list");
  for (auto* sc : {dens, fre, chk}) sc->add_option("--radii", o.radii, "a:b:n log-spaced radii");
  for (auto* sc : {gen, dens, exc, pru, dec, chk}) sc->add_option("--radius", o.radius, "ball radius");
  for (auto* sc : {exc, tra, pru, dec, whi, chk}) sc->add_option("--cone", o.cone, "open book JSON");
  for (auto* sc : {exc, tra, pru}) sc->add_option("--lp-eps", o.lp_eps, "reduced-cost tolerance");
  for (auto* sc : {exc, tra}) sc->add_option("--plan", o.plan, "plan CSV path");
  for (auto* sc : {gen, exc, pru, dec}) sc->add_option("--per-sheet", o.per_sheet, "samples per sheet");
  for (auto* sc : {fre, sol}) {
    sc->set_help_flag("--help", "print this help");
    sc->add_option("--h", o.h, "grid spacing");
    sc->add_option("--m", o.m, "dimension (2 or 3)");
  }
  gen->add_option("--book", o.cone, "open book JSON");
  gen->add_option("--count", o.count, "target sample count");
  gen->add_option("--family", o.family, "harmonic graph family 0..2");
  for (auto* sc : {gen, fre}) sc->add_option("--amplitude", o.amplitude, "fixture amplitude");
  dens->add_option("--flavor", o.flavor, "interior|boundary");
  tra->add_option("--target", o.target, "second current file")->required();
  pru->add_option("--evaluator", o.evaluator, "strong|l2");
  fre->add_option("--fixture", o.fixture, "linear|homogeneous|branch");
  fre->add_option("--k", o.k, "degree of the homogeneous fixture");
  fre->add_option("--variant", o.variant, "sharp|smoothed");
  dec->add_option("--steps", o.steps, "decay steps");
  dec->add_option("--manifest", o.manifest, "experiment manifest JSON");
  dec->add_option("--summary", o.plan, "CSV summary path for --manifest");
  whi->add_option("--max-generation", o.max_generation, "deepest cube generation");

  std::vector<std::string> argv_store{"openbook_lab"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    for (auto* sc : app.get_subcommands()) err << sc->help();
    if (app.get_subcommands().empty()) err << app.help();
    return 2;
  }

  auto* sub = app.get_subcommands().front();
  bool seeded = false;
  for (auto* opt : seed_opts)
    if (opt->count() > 0) seeded = true;
  const std::string name = sub->get_name();
  try {
    if (name == "decay" && o.manifest.empty() && o.input.empty()) throw UsageError("decay: -i or --manifest is required");
    if (name == "gen") return cmd_gen(o, seeded, out);
    if (name == "density") return cmd_density(o, out);
    if (name == "excess") return cmd_excess(o, seeded, out);
    if (name == "transport") return cmd_transport(o, out);
    if (name == "prune") return cmd_prune(o, seeded, out, err);
    if (name == "frequency") return cmd_frequency(o, out);
    if (name == "solve") return cmd_solve(o, out);
    if (name == "decay") return cmd_decay(o, seeded, out, err);
    if (name == "whitney") return cmd_whitney(o, out, err);
    if (name == "check") return cmd_check(o, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n' << sub->help();
    return 2;
  } catch (const Error& e) {
    err << name << ": " << e.what() << '\n';
    return e.code() == ErrorCode::ParseError ? 2 : 1;
  } catch (const Json::exception& e) {
    err << name << ": malformed parameter file: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace obl::cli
