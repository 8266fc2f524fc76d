#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tdtf/kde.hpp"

namespace tdtf {

/// Read-only CDF over days since release.
class CdfHandle {
 public:
  explicit CdfHandle(std::function<double(double)> cdf) : cdf_(std::move(cdf)) {}
  /// Keeps its own copy of the model.
  static CdfHandle of(const KdeModel& model, bool allow_extrapolation = false);

  double operator()(double t) const { return cdf_(t); }

 private:
  std::function<double(double)> cdf_;
};

/// 1 - (1 - F_A(t_A)) (1 - F_B(t_B)). Throws DomainError for negative times.
double joint_cdf2(const CdfHandle& a, const CdfHandle& b, double t_a, double t_b);

struct ProbabilityPlane {
  std::vector<double> x;  ///< days for library A
  std::vector<double> y;  ///< days for library B
  std::vector<std::vector<double>> values;  ///< values[i][j] at (x[i], y[j])

  /// CSV "x_days,y_days,joint_cdf", x-major.
  std::string to_csv() const;
};

/// Uniform grids on [0, x_max] and [0, y_max]; throws InvalidArgument when
/// resolution < 2.
ProbabilityPlane probability_plane(const CdfHandle& a, const CdfHandle& b, double x_max, double y_max,
                                   std::size_t resolution);

struct DiagonalCut {
  double offset_x = 0.0;
  double offset_y = 0.0;
  std::vector<double> u;
  std::vector<double> cdf;      ///< 1 - S_A(offset_x + u) S_B(offset_y + u)
  std::vector<double> density;  ///< central differences, one-sided at the ends

  /// CSV "u_days,cdf,density".
  std::string to_csv() const;
};

DiagonalCut diagonal_cut(const CdfHandle& a, const CdfHandle& b, double offset_x, double offset_y,
                         double u_max, std::size_t resolution);

/// 1 - prod(1 - p_i).
double survival_union(std::span<const double> p);
/// Sum over non-empty subsets J of (-1)^(|J|+1) prod_{i in J} p_i. Throws
/// TooManyLibraries above kMaxInclusionExclusion values.
double inclusion_exclusion_union(std::span<const double> p);

inline constexpr std::size_t kMaxInclusionExclusion = 20;

struct JointN {
  double value = 0.0;             ///< survival form
  bool cross_checked = false;     ///< false when N exceeds the inclusion-exclusion limit
  double discrepancy = 0.0;       ///< |survival - inclusion-exclusion| when cross-checked
};

/// Union probability of N independent disclosures, computed in survival form
/// and cross-checked by inclusion-exclusion; a mismatch above 1e-9 throws
/// InternalInconsistency.
JointN joint_cdf_n(std::span<const CdfHandle> cdfs, std::span<const double> ts);
JointN joint_union_checked(std::span<const double> p);

}  // namespace tdtf
