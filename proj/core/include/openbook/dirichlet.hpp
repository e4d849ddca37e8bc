#pragma once

#include <array>
#include <memory>
#include <string>

#include "openbook/qvalued.hpp"

namespace obl {

// Lattice h Z^m intersected with {x_m >= 0, |x| <= 1 + sqrt(m) h}. Nodes
// with |x| >= 1 are padding so that every cell meeting the closed half ball
// has all of its corners.
class HalfBallGrid {
 public:
  using Index = std::array<int, 3>;

  HalfBallGrid(int m, double h);

  int m() const { return m_; }
  double h() const { return h_; }
  int extent() const { return k_; }
  std::size_t size() const { return index_.size(); }
  const Index& index(std::size_t node) const { return index_[node]; }
  Vec position(std::size_t node) const;
  // -1 when the lattice point is not a node
  long find(const Index& idx) const;
  bool on_flat(std::size_t node) const { return index_[node][m_ - 1] == 0; }
  bool inside(std::size_t node) const;  // |x| < 1 and x_m > 0
  double padded_radius() const { return padded_; }

 private:
  std::size_t box_offset(const Index& idx) const;

  int m_;
  double h_;
  int k_;
  double padded_;
  std::vector<Index> index_;
  std::vector<long> box_;
};

struct QFunction {
  std::shared_ptr<const HalfBallGrid> grid;
  int q = 1;
  int n = 1;
  std::vector<double> values;  // node x q x n
  bool zero_trace = true;

  CSpan atoms(std::size_t node) const {
    return {values.data() + node * static_cast<std::size_t>(q) * n, static_cast<std::size_t>(q) * n};
  }
  MSpan atoms(std::size_t node) {
    return {values.data() + node * static_cast<std::size_t>(q) * n, static_cast<std::size_t>(q) * n};
  }
  QPoint at(std::size_t node) const;
  void validate() const;
};

// fn(x, out) writes q atoms of length n.
using QField = std::function<void(CSpan x, MSpan out)>;

QFunction sample_qfunction(std::shared_ptr<const HalfBallGrid> grid, int q, int n, const QField& fn, bool zero_trace);

// x -> sum Q_i [[v_i x_m]]
QFunction linear_fixture(std::shared_ptr<const HalfBallGrid> grid, const LinearQMap& map);
// m = 2, single valued r^k sin(k theta); k = 2 is 2 x_1 x_2.
QFunction homogeneous_fixture(std::shared_ptr<const HalfBallGrid> grid, int k, double amplitude = 1.0);
// m = 2, {+-a r^{3/2} sin(3 theta / 2)}. Vanishes on x_1 > 0 of the flat face
// and has zero normal derivative on x_1 < 0, so zero_trace is false.
QFunction branch_fixture(std::shared_ptr<const HalfBallGrid> grid, double amplitude = 1.0);

// Multilinear interpolation of a per-node scalar field.
double interpolate_scalar(const HalfBallGrid& grid, const std::vector<double>& field, CSpan x);
// Q-valued interpolation through a local selection.
QPoint interpolate(const QFunction& u, CSpan x);

double dirichlet_energy(const QFunction& u, CSpan center, double r);
double spherical_height(const QFunction& u, CSpan center, double r);
double volume_height(const QFunction& u, CSpan center, double r);  // integral of |u|^2 over B_r^+

enum class FrequencyVariant { Sharp, Smoothed };

struct FrequencyProfile {
  Vec center;
  std::vector<double> radii, energy, height, frequency;
  FrequencyVariant variant = FrequencyVariant::Sharp;
  double monotonicity_defect = 0.0;  // max (I_k - I_{k+1})_+
  double h = 0.0;
};

FrequencyProfile frequency(const QFunction& u, CSpan center, const std::vector<double>& radii,
                           FrequencyVariant variant = FrequencyVariant::Sharp);

struct SmoothedFrequency {
  double energy = 0.0;
  double height = 0.0;
  double frequency = 0.0;
  bool vanishing = false;
};

// Cutoff 1 on [0,1/2], 2(1-t) on [1/2,1]; height uses -phi'.
SmoothedFrequency smoothed_frequency(const QFunction& u, CSpan center, double r);

using BoundaryData = std::function<void(CSpan x, MSpan out)>;  // x on the unit sphere, out in R^n

struct SolveReport {
  double residual = 0.0;
  std::size_t unknowns = 0;
};

// Harmonic extension of each sheet's data with zero trace on the flat face.
// Sheet i is repeated multiplicities[i] times.
QFunction solve_dirichlet(std::shared_ptr<const HalfBallGrid> grid, const std::vector<BoundaryData>& sheets,
                          const std::vector<int>& multiplicities, int n, SolveReport* report = nullptr);

QFunction blowup(const QFunction& u, CSpan y, double rho);

struct LinearFit {
  double radius = 0.0;
  LinearQMap map;
  double residual = 0.0;  // r^{-(m+2)} int_{B_r^+} G(u, L)^2
  double alpha = 0.0;     // separation of L
  double average_slope = 0.0;
};

std::vector<LinearFit> decay_to_linear(const QFunction& u, const std::vector<double>& radii);

struct DoublingReport {
  double r = 0.0, t = 0.0;
  double height_r = 0.0, height_t = 0.0, energy_r = 0.0, energy_t = 0.0;
  double freq_r = 0.0, freq_t = 0.0;
  // relative slacks; negative means the inequality fails
  std::array<double, 4> slack{};
  std::array<double, 6> lower_mid_upper{};  // height bounds then energy bounds, scaled
};

DoublingReport energy_doubling_check(const QFunction& u, CSpan center, double r, double t);

struct HeightDecayReport {
  double lhs = 0.0, rhs = 0.0, slack = 0.0, alpha = 0.0;
};

// int_{B_r^+} |u|^2 against r^{m+2 alpha}/(m+1) int_{dB_1^+} |u|^2 with u on B_1.
HeightDecayReport height_decay(const QFunction& u, double r, double alpha);

struct IdentityReport {
  double lhs_first = 0.0, rhs_first = 0.0, error_first = 0.0;
  double lhs_second = 0.0, rhs_second = 0.0, error_second = 0.0;
};

// Both identities, relative errors normalized by r int_{dB_r} |Du|^2 and D.
IdentityReport frequency_identities(const QFunction& u, CSpan center, double r);

}  // namespace obl
