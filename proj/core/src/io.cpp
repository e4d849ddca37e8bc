#include "openbook/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace obl::io {

namespace {

Json vec_json(CSpan v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

Vec json_vec(const Json& j, const char* what) {
  if (!j.is_array()) fail(ErrorCode::ParseError, std::string(what) + " must be an array");
  Vec v;
  v.reserve(j.size());
  for (const auto& x : j) {
    if (!x.is_number()) fail(ErrorCode::ParseError, std::string(what) + " must hold numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

Json parse_line(const std::string& line, std::size_t lineno) {
  try {
    return Json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": " + e.what());
  }
}

template <class T>
T field(const Json& j, const char* key) {
  if (!j.contains(key)) fail(ErrorCode::ParseError, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("field '") + key + "': " + e.what());
  }
}

void write_array(std::ostream& os, CSpan v) {
  os << '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ',';
    os << number(v[i]);
  }
  os << ']';
}

}  // namespace

std::string number(double x) {
  if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, res.ptr};
}

Json to_json(const OpenBook& book) {
  Json basis = Json::array();
  for (const auto& b : book.spine.basis) basis.push_back(vec_json(b));
  Json sheets = Json::array();
  for (const auto& s : book.sheets) sheets.push_back(Json{{"normal", vec_json(s.normal)}, {"multiplicity", s.multiplicity}});
  return Json{{"spine", Json{{"origin", vec_json(book.spine.origin)}, {"basis", basis}}}, {"sheets", sheets}};
}

OpenBook book_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("spine") || !j.contains("sheets"))
    fail(ErrorCode::ParseError, "open book needs 'spine' and 'sheets'");
  OpenBook book;
  const Json& sp = j.at("spine");
  if (!sp.contains("origin") || !sp.contains("basis")) fail(ErrorCode::ParseError, "spine needs 'origin' and 'basis'");
  book.spine.origin = json_vec(sp.at("origin"), "spine.origin");
  book.spine.ambient_dim = static_cast<int>(book.spine.origin.size());
  for (const auto& b : sp.at("basis")) book.spine.basis.push_back(json_vec(b, "spine.basis"));
  for (const auto& s : j.at("sheets")) {
    Sheet sheet;
    sheet.normal = json_vec(s.at("normal"), "sheet.normal");
    sheet.multiplicity = s.value("multiplicity", 1);
    book.sheets.push_back(std::move(sheet));
  }
  book.validate();
  return book;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, path + ": " + e.what());
  }
}

OpenBook read_book(const std::string& path) { return book_from_json(read_json_file(path)); }

void write_book(const std::string& path, const OpenBook& book) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::ParseError, "cannot write " + path);
  out << to_json(book).dump(2) << '\n';
}

void write_current(std::ostream& os, const DiscreteCurrent& t) {
  os << Json{{"m", t.m}, {"n", t.n}, {"Q", t.q}, {"generator", t.generator}, {"seed", t.seed}}.dump() << '\n';
  const int d = t.ambient_dim();
  for (std::size_t i = 0; i < t.size(); ++i) {
    os << "{\"pos\":";
    write_array(os, t.measure.point(i));
    os << ",\"w\":" << number(t.measure.weights[i]);
    if (t.has_tangents()) {
      os << ",\"tangent\":[";
      const CSpan tan = t.tangent(i);
      for (int r = 0; r < t.m; ++r) {
        if (r) os << ',';
        write_array(os, tan.subspan(static_cast<std::size_t>(r) * d, static_cast<std::size_t>(d)));
      }
      os << ']';
    }
    os << "}\n";
  }
}

DiscreteCurrent read_current(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  DiscreteCurrent t;
  bool header = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const Json j = parse_line(line, lineno);
    if (!header) {
      t.m = field<int>(j, "m");
      t.n = field<int>(j, "n");
      t.q = field<int>(j, "Q");
      t.generator = j.value("generator", std::string{});
      t.seed = j.value("seed", std::uint64_t{0});
      if (t.m < 1 || t.n < 1) fail(ErrorCode::ParseError, "header needs m >= 1 and n >= 1");
      t.measure.dim = t.ambient_dim();
      header = true;
      continue;
    }
    const Vec pos = json_vec(j.at("pos"), "pos");
    if (static_cast<int>(pos.size()) != t.ambient_dim())
      fail(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": pos has the wrong length");
    const double w = field<double>(j, "w");
    if (j.contains("tangent")) {
      Vec tan;
      for (const auto& row : j.at("tangent")) {
        const Vec r = json_vec(row, "tangent");
        if (static_cast<int>(r.size()) != t.ambient_dim())
          fail(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": tangent row has the wrong length");
        tan.insert(tan.end(), r.begin(), r.end());
      }
      if (static_cast<int>(tan.size()) != t.m * t.ambient_dim())
        fail(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": tangent needs m rows");
      if (t.size() > 0 && !t.has_tangents()) fail(ErrorCode::ParseError, "tangents must be present on all records");
      t.add(pos, w, tan);
    } else {
      if (t.has_tangents()) fail(ErrorCode::ParseError, "tangents must be present on all records");
      t.measure.add(pos, w);
    }
  }
  if (!header) fail(ErrorCode::ParseError, "current file has no header");
  t.validate();
  return t;
}

DiscreteCurrent read_current(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open " + path);
  return read_current(in);
}

void write_qfunction(std::ostream& os, const QFunction& u) {
  const HalfBallGrid& g = *u.grid;
  os << Json{{"m", g.m()}, {"n", u.n}, {"Q", u.q}, {"h", g.h()}, {"zero_trace", u.zero_trace}}.dump() << '\n';
  for (std::size_t node = 0; node < g.size(); ++node) {
    os << "{\"index\":[";
    for (int i = 0; i < g.m(); ++i) os << (i ? "," : "") << g.index(node)[i];
    os << "],\"atoms\":[";
    const CSpan a = u.atoms(node);
    for (int k = 0; k < u.q; ++k) {
      if (k) os << ',';
      write_array(os, a.subspan(static_cast<std::size_t>(k) * u.n, static_cast<std::size_t>(u.n)));
    }
    os << "]}\n";
  }
}

QFunction read_qfunction(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  QFunction u;
  std::vector<bool> seen;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const Json j = parse_line(line, lineno);
    if (!u.grid) {
      u.grid = std::make_shared<HalfBallGrid>(field<int>(j, "m"), field<double>(j, "h"));
      u.q = field<int>(j, "Q");
      u.n = field<int>(j, "n");
      u.zero_trace = j.value("zero_trace", true);
      u.values.assign(u.grid->size() * u.q * u.n, 0.0);
      seen.assign(u.grid->size(), false);
      continue;
    }
    HalfBallGrid::Index idx{0, 0, 0};
    const auto& ji = j.at("index");
    if (static_cast<int>(ji.size()) != u.grid->m()) fail(ErrorCode::ParseError, "index has the wrong length");
    for (int i = 0; i < u.grid->m(); ++i) idx[i] = ji.at(i).get<int>();
    const long node = u.grid->find(idx);
    if (node < 0) fail(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": index is not a grid node");
    const auto& ja = j.at("atoms");
    if (static_cast<int>(ja.size()) != u.q) fail(ErrorCode::ParseError, "atoms must hold Q entries");
    MSpan out = u.atoms(static_cast<std::size_t>(node));
    for (int k = 0; k < u.q; ++k) {
      const Vec a = json_vec(ja.at(k), "atoms");
      if (static_cast<int>(a.size()) != u.n) fail(ErrorCode::ParseError, "atom has the wrong length");
      std::copy(a.begin(), a.end(), out.begin() + static_cast<std::ptrdiff_t>(k) * u.n);
    }
    seen[static_cast<std::size_t>(node)] = true;
  }
  if (!u.grid) fail(ErrorCode::ParseError, "Q-function file has no header");
  for (bool s : seen)
    if (!s) fail(ErrorCode::ParseError, "Q-function file is missing grid nodes");
  u.validate();
  return u;
}

Json to_json(const ExcessReport& r) {
  Json j{{"l2", r.l2}, {"reverse_l2", r.reverse_l2}};
  j["strong"] = r.strong ? Json(*r.strong) : Json(nullptr);
  j["noise_floor"] = r.noise_floor ? Json(*r.noise_floor) : Json(nullptr);
  j["tilt"] = r.tilt ? Json(*r.tilt) : Json(nullptr);
  j["amended"] = r.amended;
  j["kappa"] = r.kappa;
  j["a_gamma"] = r.a_gamma;
  j["a_sigma"] = r.a_sigma;
  j["radius"] = r.radius;
  j["center"] = vec_json(r.center);
  j["cone"] = to_json(r.cone);
  return j;
}

Json to_json(const PruneTrace& trace) {
  Json steps = Json::array();
  for (const auto& s : trace.steps)
    steps.push_back(Json{{"sheets", s.cone.sheet_count()},
                         {"Q", s.cone.total_multiplicity()},
                         {"excess", s.excess},
                         {"alpha", s.alpha},
                         {"threshold", s.threshold},
                         {"stop", s.stop},
                         {"merged_into", s.merged_into},
                         {"merged_from", s.merged_from},
                         {"cone", to_json(s.cone)}});
  return Json{{"evaluator", trace.evaluator},
              {"stopped", trace.stopped},
              {"final_sheets", trace.final_sheets},
              {"partition", trace.partition},
              {"inflation", trace.inflation},
              {"final_cone", to_json(trace.final_cone)},
              {"steps", steps}};
}

Json to_json(const LayerDecomposition& l) {
  return Json{{"kappa", l.kappa},         {"extended", l.extended},   {"delta", l.delta},
              {"eta", l.eta},             {"index_sets", l.index_sets}, {"multiplicities", l.multiplicities},
              {"min_angle", l.min_angle}, {"max_angle", l.max_angle}, {"spread", l.spread}};
}

Json to_json(const ExperimentRecord& r) {
  return Json{{"step", r.step},
              {"radius", r.radius},
              {"next_radius", r.next_radius},
              {"sheets", r.cone.sheet_count()},
              {"Q", r.cone.total_multiplicity()},
              {"strong", r.strong},
              {"l2", r.l2},
              {"alpha", r.alpha},
              {"amended", r.amended},
              {"action", to_string(r.action)},
              {"seed", r.seed},
              {"next_strong", r.next_strong},
              {"ratio", r.ratio},
              {"contraction", r.contraction},
              {"stall", r.stall},
              {"drift", r.drift},
              {"admissible", r.admissible},
              {"candidate_radii", r.candidate_radii},
              {"candidate_scores", r.candidate_scores},
              {"cone", to_json(r.cone)}};
}

Json to_json(const CubeRegion& c) {
  return Json{{"generation", c.generation},
              {"cell", c.cell},
              {"center", vec_json(c.center)},
              {"side", c.side},
              {"kind", to_string(c.kind)},
              {"type", c.type},
              {"interior", c.interior},
              {"meets_boundary", c.meets_boundary},
              {"mass", c.mass},
              {"excess", c.excess},
              {"samples", c.samples},
              {"insufficient_samples", c.insufficient_samples},
              {"parent", c.parent}};
}

void write_frequency_csv(std::ostream& os, const FrequencyProfile& p) {
  // grid quadrature is deterministic, so the noise floor column is zero
  os << "r,D,H,I,resolution,noise_floor\n";
  for (std::size_t i = 0; i < p.radii.size(); ++i)
    os << number(p.radii[i]) << ',' << number(p.energy[i]) << ',' << number(p.height[i]) << ','
       << number(p.frequency[i]) << ',' << number(p.h) << ",0\n";
}

namespace {

struct Job {
  std::uint64_t seed = 0;
  int resolution = 0;
  std::vector<ExperimentRecord> records;
  std::string error;
  bool conserved = true;
  bool ratios_ok = true;
};

GraphFixture manifest_fixture(const Json& manifest, const Json& params) {
  const std::string name = field<std::string>(manifest, "fixture");
  const double amplitude = params.value("amplitude", 0.05);
  for (int f = 0; f < kGraphFamilies; ++f) {
    GraphFixture g = harmonic_graph_fixture(f, amplitude);
    if (g.name == name) return g;
  }
  if (name == "open_book") {
    if (!params.contains("book")) fail(ErrorCode::ParseError, "fixture open_book needs parameters.book");
    GraphFixture g;
    g.name = name;
    g.book = book_from_json(params.at("book"));
    g.start = g.book;
    return g;
  }
  fail(ErrorCode::ParseError, "unknown fixture '" + name + "'");
}

}  // namespace

int run_manifest(const Json& manifest, std::ostream& records, std::ostream& summary) {
  const Json params = manifest.value("parameters", Json::object());
  const GraphFixture fixture = manifest_fixture(manifest, params);

  DecayParameters dp;
  dp.eta = params.value("eta", dp.eta);
  dp.theta = params.value("theta", dp.theta);
  dp.kappa = params.value("kappa", dp.kappa);
  dp.a_gamma = params.value("a_gamma", dp.a_gamma);
  dp.a_sigma = params.value("a_sigma", dp.a_sigma);
  dp.max_steps = params.value("max_steps", dp.max_steps);
  dp.candidates = params.value("candidates", dp.candidates);
  if (params.contains("eps")) dp.eps = json_vec(params.at("eps"), "parameters.eps");
  const double r0 = params.value("radius", 1.0);

  const auto seeds = field<std::vector<std::uint64_t>>(manifest, "seeds");
  const auto resolutions = field<std::vector<int>>(manifest, "resolutions");
  if (seeds.empty() || resolutions.empty()) fail(ErrorCode::ParseError, "manifest needs seeds and resolutions");

  std::vector<Job> jobs;
  for (auto s : seeds)
    for (int res : resolutions) jobs.push_back(Job{s, res, {}, {}, true, true});

  const int q = fixture.start.total_multiplicity();
  parallel_for(jobs.size(), [&](std::size_t k) {
    Job& job = jobs[k];
    try {
      DecayParameters p = dp;
      p.seed = job.seed;
      p.per_sheet = job.resolution;
      const Vec center(fixture.book.ambient_dim(), 0.0);
      job.records = decay_loop(graph_source(fixture, job.resolution, job.seed), fixture.start, center, r0, p);
      for (const auto& r : job.records) {
        if (r.cone.total_multiplicity() != q) job.conserved = false;
        const double ratio = r.next_radius / r.radius;
        if (ratio < p.eta * (1.0 - 1e-12) || ratio > 0.5 * (1.0 + 1e-12)) job.ratios_ok = false;
      }
    } catch (const Error& e) {
      job.error = std::string(to_string(e.code())) + ": " + e.what();
    }
  });

  bool ok = true;
  summary << "fixture,seed,resolution,steps,contracted,max_ratio,max_drift,conserved,ratios_ok,error\n";
  for (const auto& job : jobs) {
    std::size_t contracted = 0;
    double max_ratio = 0.0, max_drift = 0.0;
    for (const auto& r : job.records) {
      Json j = to_json(r);
      j["fixture"] = fixture.name;
      j["resolution"] = job.resolution;
      records << j.dump() << '\n';
      if (r.contraction) ++contracted;
      max_ratio = std::max(max_ratio, r.ratio);
      max_drift = std::max(max_drift, r.drift);
    }
    ok = ok && job.error.empty() && job.conserved && job.ratios_ok;
    summary << fixture.name << ',' << job.seed << ',' << job.resolution << ',' << job.records.size() << ','
            << contracted << ',' << number(max_ratio) << ',' << number(max_drift) << ',' << job.conserved << ','
            << job.ratios_ok << ',' << '"' << job.error << '"' << '\n';
  }
  return ok ? 0 : 1;
}

}  // namespace obl::io
