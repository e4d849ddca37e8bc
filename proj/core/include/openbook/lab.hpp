#pragma once

#include <optional>
#include <string>

#include "openbook/excess.hpp"

namespace obl {

// ------------------------------------------------------------- Whitney cubes

enum class CubeKind { Outer, Central, Inner, Interior, BoundaryStopping, Excluded };
const char* to_string(CubeKind kind);

struct WhitneyOptions {
  int max_generation = 4;
  double tau = 0.25;
  double delta_bar = 0.05;
  double density_factor = 0.0;  // 0 means Q/2 + 1/2
  double layer_delta = 0.5;
  std::size_t min_samples = 5;
  std::size_t tiling_probes = 2000;
  std::optional<Spine> boundary;  // Gamma, defaults to the cone spine
};

// Cubes live in the standard spine R^{m-1} x {0}; L_0 has side 2/sqrt(m-1).
struct CubeRegion {
  int generation = 0;
  std::vector<int> cell;  // position in the generation grid, per spine axis
  Vec center;             // y_L in ambient coordinates
  double side = 0.0;
  CubeKind kind = CubeKind::Excluded;
  int type = -1;          // k for k-type cubes
  bool interior = false;
  bool meets_boundary = false;
  double mass = 0.0;           // |T|(B(L))
  double excess = 0.0;         // E(L, 0)
  std::size_t samples = 0;     // in B^h(L)
  bool insufficient_samples = false;
  int parent = -1;
};

struct WhitneyReport {
  std::vector<CubeRegion> cubes;
  LayerDecomposition layers;
  std::vector<double> separation;  // s(k), k = 0..kappa_bar
  double density_factor = 0.0;
  bool tiling_ok = false;
  std::size_t tiling_failures = 0;
  int max_overlap = 0;  // cubes whose B^h meets a given B^h
};

WhitneyReport whitney_classify(const DiscreteCurrent& t, const OpenBook& cone, const WhitneyOptions& options = {});

// Closed membership p in R(L).
bool region_contains(const CubeRegion& cube, int m, CSpan p);

// ------------------------------------------------------------- profiles

struct Profile {
  std::vector<double> x;
  std::vector<double> values;
  double slope = 0.0;  // least-squares log-log slope over positive values
};

// r^{-(m+2)} sum over B_r(p) cap B_{sigma r}(V) of w dist(x, C)^2, per sigma.
Profile nonconcentration_profile(const DiscreteCurrent& t, const OpenBook& cone, CSpan center, double r,
                                 const std::vector<double>& sigmas);

// sum over B_r(p) of w |(x-p)^perp|^2 / |x-p|^{m+2}, per r.
Profile remainder_profile(const DiscreteCurrent& t, CSpan center, const std::vector<double>& radii,
                          double exclusion = 1e-9);

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// ------------------------------------------------------------- decay loop

// Samples of the rescaled current (x - p)/r restricted to B_1, so that small
// scales keep full precision. Must be deterministic in r.
using CurrentSource = std::function<DiscreteCurrent(double radius)>;

// Source that rescales a fixed sample of T.
CurrentSource rescaling_source(const DiscreteCurrent& t, CSpan center);

struct DecayParameters {
  std::vector<double> eps;  // eps_1..eps_Q, empty means 1e-3 * 4^{-k}
  double eta = 0.1;
  double theta = 0.01;
  double kappa = 1.0;
  double a_gamma = 0.0;
  double a_sigma = 0.0;
  int max_steps = 12;
  int candidates = 8;
  // Cone samples reuse this seed and per-sheet count so that graph
  // fixtures drawn with the same values pair up point by point.
  std::uint64_t seed = 1;
  int per_sheet = 0;

  // Ordering requirements between theta and the eps schedule; returns
  // one message per violated requirement.
  std::vector<std::string> ordering_issues(int q, int n_sheets) const;
  double eps_at(int k) const;  // eps_k, 1-based
};

enum class DecayAction { Halve, Refit };
const char* to_string(DecayAction action);

struct ExperimentRecord {
  int step = 0;
  double radius = 0.0;
  double next_radius = 0.0;
  OpenBook cone;
  double strong = 0.0;
  double l2 = 0.0;
  double alpha = 0.0;
  double amended = 0.0;
  DecayAction action = DecayAction::Halve;
  std::uint64_t seed = 0;
  double next_strong = 0.0;  // E(T, C_{l+1}, B_{r_{l+1}})
  double ratio = 0.0;        // next_strong / strong
  bool contraction = false;  // ratio <= theta
  bool stall = false;
  double drift = 0.0;        // G(C_{l+1}, C_l)^2 / strong
  bool admissible = false;   // strong <= eps_N alpha^2
  std::vector<double> candidate_radii;
  std::vector<double> candidate_scores;
  double seconds = 0.0;  // wall time, excluded from deterministic output
};

std::vector<ExperimentRecord> decay_loop(const CurrentSource& source, const OpenBook& start, CSpan center, double r0,
                                         const DecayParameters& params);

// Moves B_r(p) to the unit ball: x -> (x - p)/r, weights scaled by r^{-m}.
DiscreteCurrent rescaled_current(const DiscreteCurrent& t, CSpan center, double r);

// ------------------------------------------------------------- fixtures

struct GraphFixture {
  std::string name;
  OpenBook book;   // tangent cone at 0
  OpenBook start;  // starting cone of the decay loop
  std::vector<SheetFunction> sheets;
};

// m = 2, n = 1 books carrying homogeneous harmonic graphs that vanish on the
// spine: family 0 degree 2 started from a tilted cone, family 1 degrees 2
// and 3 on three sheets, family 2 a doubled sheet carrying a two-valued graph.
GraphFixture harmonic_graph_fixture(int family, double amplitude);
inline constexpr int kGraphFamilies = 3;

// The graph blown up by 1/r, sampled in B_1 with a fixed per-sheet count.
CurrentSource graph_source(const GraphFixture& fixture, int per_sheet, std::uint64_t seed);

// A two-sheet book sample plus a strip of total mass `handle_mass` joining
// the sheets at distance ~ r/2 from the spine.
DiscreteCurrent handle_fixture(const OpenBook& book, double handle_mass, int count, std::uint64_t seed);

// ------------------------------------------------------------- decomposition

struct DecompositionOptions {
  double wedge_fraction = 0.25;  // wedge opening as a fraction of alpha(C)
  double multiplicity_tolerance = 0.25;
};

struct SheetPiece {
  int sheet = 0;
  DiscreteCurrent current;
  double multiplicity = 0.0;  // annulus mass of the circular pushforward / sector area
  int expected = 0;
};

struct DecompositionResult {
  bool pass = false;
  double min_margin = 0.0;  // smallest normalized wedge margin, > 0 when separated
  std::vector<SheetPiece> pieces;
  std::vector<std::size_t> bridges;  // sample indices outside every wedge
  std::size_t near_spine = 0;  // samples with dist(x, V) <= r/8, assigned but not tested
};

DecompositionResult decomposition_check(const DiscreteCurrent& t, const OpenBook& cone, CSpan center, double r,
                                        const DecompositionOptions& options = {});

// ------------------------------------------------------------- normal map

struct HolderEntry {
  int i = 0, j = 0;
  double distance = 0.0;  // G(eta(q_i), eta(q_j))
  double separation = 0.0;  // |q_i - q_j|
  double ratio = 0.0;     // distance^2 / separation^alpha
};

struct HolderTable {
  double alpha = 0.0;
  std::vector<OpenBook> normals;
  std::vector<double> fit_radius;
  std::vector<HolderEntry> entries;
  double max_ratio = 0.0;
};

// Default alpha is log 2 / |log eta|.
HolderTable normal_map_holder(const DiscreteCurrent& t, const Spine& spine, const std::vector<Vec>& points,
                              const std::vector<double>& radii, int q, double alpha);

}  // namespace obl
