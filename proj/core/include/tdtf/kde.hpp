#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tdtf/evidence.hpp"

namespace tdtf {

enum class Kernel { Gaussian };
enum class Boundary { Reflect };

struct KdeOptions {
  std::size_t min_samples = 5;
  std::optional<double> bandwidth_override;
};

/// Grace-period density for one cluster: Gaussian kernels reflected about
/// t = 0, so all mass lies on [0, inf).
class KdeModel {
 public:
  static constexpr int kFormatVersion = 1;
  static constexpr std::size_t kGridPoints = 2048;
  static constexpr double kGridTailBandwidths = 6.0;

  /// Throws InsufficientData for no samples, DomainError for negative
  /// samples or a non-positive bandwidth.
  KdeModel(ClusterId cluster, std::vector<double> samples, double bandwidth,
           bool bandwidth_overridden = false);

  const ClusterId& cluster() const noexcept { return cluster_; }
  const std::vector<double>& samples() const noexcept { return samples_; }
  double bandwidth() const noexcept { return bandwidth_; }
  bool bandwidth_overridden() const noexcept { return bandwidth_overridden_; }
  Kernel kernel() const noexcept { return Kernel::Gaussian; }
  Boundary boundary() const noexcept { return Boundary::Reflect; }

  /// Throws DomainError for t < 0 or NaN.
  double pdf(double t) const;
  /// Beyond grid_end() the CDF is 1 unless extrapolation is allowed, in which
  /// case the closed form is evaluated there too.
  double cdf(double t, bool allow_extrapolation = false) const;
  double sf(double t, bool allow_extrapolation = false) const;
  /// F(delta + n) - F(delta), computed from survival values to keep precision
  /// for old releases.
  double window_probability(double delta, double n, bool allow_extrapolation = false) const;

  double grid_end() const noexcept { return grid_t_.back(); }
  const std::vector<double>& grid_t() const noexcept { return grid_t_; }
  const std::vector<double>& grid_pdf() const noexcept { return grid_pdf_; }
  const std::vector<double>& grid_cdf() const noexcept { return grid_cdf_; }

  /// Versioned JSON; doubles are written with round-trip precision.
  std::string to_json() const;
  /// Throws UnsupportedModelVersion or ParseError.
  static KdeModel from_json(std::string_view bytes);
  /// CSV "t,pdf,cdf" over the evaluation grid.
  std::string grid_csv() const;

 private:
  double sf_closed(double t) const;

  ClusterId cluster_;
  std::vector<double> samples_;
  double bandwidth_;
  bool bandwidth_overridden_;
  std::vector<double> grid_t_;
  std::vector<double> grid_pdf_;
  std::vector<double> grid_cdf_;
};

/// 0.9 * min(sd, IQR / 1.34) * m^(-1/5); sd alone when the IQR is 0, and
/// 1.0 when the spread is 0.
double silverman_bandwidth(std::span<const double> samples);

/// Throws InsufficientData below options.min_samples.
KdeModel fit_kde(const ClusterId& cluster, std::vector<double> samples,
                 const KdeOptions& options = {});
KdeModel fit_kde(const GracePool& pool, const KdeOptions& options = {});

/// Trapezoid integral of the cached PDF grid.
double grid_mass(const KdeModel& model);

}  // namespace tdtf
