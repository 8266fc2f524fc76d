#include "tdtf/kde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tdtf/error.hpp"

namespace tdtf {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Upper tail of the standard normal.
double norm_q(double z) { return 0.5 * std::erfc(z * kInvSqrt2); }

void check_time(double t) {
  if (!(t >= 0.0)) throw Error(ErrorKind::DomainError, "time must be >= 0, got " + std::to_string(t));
}

// Linear-interpolation percentile of sorted data.
double percentile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

double silverman_bandwidth(std::span<const double> samples) {
  const std::size_t m = samples.size();
  if (m == 0) throw Error(ErrorKind::InsufficientData, "no samples");
  double sd = 0.0;
  if (m > 1) {
    const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(m);
    double ss = 0.0;
    for (double x : samples) ss += (x - mean) * (x - mean);
    sd = std::sqrt(ss / static_cast<double>(m - 1));
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double iqr = percentile(sorted, 0.75) - percentile(sorted, 0.25);
  const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  const double h = 0.9 * spread * std::pow(static_cast<double>(m), -0.2);
  return h > 0.0 ? h : 1.0;
}

KdeModel::KdeModel(ClusterId cluster, std::vector<double> samples, double bandwidth,
                   bool bandwidth_overridden)
    : cluster_(std::move(cluster)),
      samples_(std::move(samples)),
      bandwidth_(bandwidth),
      bandwidth_overridden_(bandwidth_overridden) {
  if (samples_.empty()) throw Error(ErrorKind::InsufficientData, "model needs at least one sample");
  for (double x : samples_) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw Error(ErrorKind::DomainError, "samples must be finite and nonnegative");
    }
  }
  if (!(bandwidth_ > 0.0) || !std::isfinite(bandwidth_)) {
    throw Error(ErrorKind::DomainError, "bandwidth must be positive");
  }

  const double end = *std::max_element(samples_.begin(), samples_.end()) +
                     kGridTailBandwidths * bandwidth_;
  grid_t_.resize(kGridPoints);
  grid_pdf_.resize(kGridPoints);
  grid_cdf_.resize(kGridPoints);
  for (std::size_t i = 0; i < kGridPoints; ++i) {
    grid_t_[i] = end * static_cast<double>(i) / static_cast<double>(kGridPoints - 1);
  }
  grid_t_.back() = end;
  for (std::size_t i = 0; i < kGridPoints; ++i) {
    grid_pdf_[i] = pdf(grid_t_[i]);
    grid_cdf_[i] = cdf(grid_t_[i], true);
  }
}

double KdeModel::pdf(double t) const {
  check_time(t);
  double sum = 0.0;
  for (double x : samples_) {
    const double a = (t - x) / bandwidth_;
    const double b = (t + x) / bandwidth_;
    sum += std::exp(-0.5 * a * a) + std::exp(-0.5 * b * b);
  }
  return sum * kInvSqrt2Pi / (static_cast<double>(samples_.size()) * bandwidth_);
}

// S(t) = sum[Q((t-x)/h) + Phi((-t-x)/h)] / m, with Phi(z) = Q(-z).
double KdeModel::sf_closed(double t) const {
  double sum = 0.0;
  for (double x : samples_) {
    sum += norm_q((t - x) / bandwidth_) + norm_q((t + x) / bandwidth_);
  }
  return std::clamp(sum / static_cast<double>(samples_.size()), 0.0, 1.0);
}

double KdeModel::sf(double t, bool allow_extrapolation) const {
  check_time(t);
  if (t == 0.0) return 1.0;
  if (!allow_extrapolation && t > grid_end()) return 0.0;
  return sf_closed(t);
}

double KdeModel::cdf(double t, bool allow_extrapolation) const {
  check_time(t);
  if (t == 0.0) return 0.0;
  if (!allow_extrapolation && t > grid_end()) return 1.0;
  // F(t) = sum[Phi((t-x)/h) - Phi((-t-x)/h)] / m
  double sum = 0.0;
  for (double x : samples_) {
    sum += norm_q((-t - x) / bandwidth_) - norm_q((t - x) / bandwidth_);
  }
  return std::clamp(sum / static_cast<double>(samples_.size()), 0.0, 1.0);
}

double KdeModel::window_probability(double delta, double n, bool allow_extrapolation) const {
  check_time(delta);
  check_time(n);
  if (n == 0.0) return 0.0;
  const double p = sf(delta, allow_extrapolation) - sf(delta + n, allow_extrapolation);
  return std::clamp(p, 0.0, 1.0);
}

std::string KdeModel::to_json() const {
  nlohmann::ordered_json doc;
  doc["version"] = kFormatVersion;
  doc["cluster"] = cluster_.label;
  doc["samples"] = samples_;
  doc["bandwidth"] = bandwidth_;
  doc["bandwidth_override"] = bandwidth_overridden_;
  doc["kernel"] = "gaussian";
  doc["boundary"] = "reflect";
  return doc.dump(2) + "\n";
}

KdeModel KdeModel::from_json(std::string_view bytes) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("invalid model file: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("version") || !doc["version"].is_number_integer()) {
    throw Error(ErrorKind::UnsupportedModelVersion, "model file lacks an integer version");
  }
  if (doc["version"].get<int>() != kFormatVersion) {
    throw Error(ErrorKind::UnsupportedModelVersion,
                "model file version " + doc["version"].dump() + " is not supported");
  }
  try {
    if (doc.at("kernel").get<std::string>() != "gaussian") {
      throw Error(ErrorKind::ParseError, "unsupported kernel " + doc["kernel"].dump());
    }
    if (doc.at("boundary").get<std::string>() != "reflect") {
      throw Error(ErrorKind::ParseError, "unsupported boundary " + doc["boundary"].dump());
    }
    return KdeModel(ClusterId{doc.at("cluster").get<std::string>()},
                    doc.at("samples").get<std::vector<double>>(), doc.at("bandwidth").get<double>(),
                    doc.value("bandwidth_override", false));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("malformed model file: ") + e.what());
  }
}

std::string KdeModel::grid_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "t,pdf,cdf\n";
  for (std::size_t i = 0; i < grid_t_.size(); ++i) {
    out << grid_t_[i] << ',' << grid_pdf_[i] << ',' << grid_cdf_[i] << '\n';
  }
  return out.str();
}

KdeModel fit_kde(const ClusterId& cluster, std::vector<double> samples, const KdeOptions& options) {
  if (samples.size() < std::max<std::size_t>(options.min_samples, 1)) {
    throw Error(ErrorKind::InsufficientData,
                "cluster " + cluster.label + " has " + std::to_string(samples.size()) +
                    " samples, needs " + std::to_string(std::max<std::size_t>(options.min_samples, 1)));
  }
  const double h = options.bandwidth_override ? *options.bandwidth_override
                                              : silverman_bandwidth(samples);
  return KdeModel(cluster, std::move(samples), h, options.bandwidth_override.has_value());
}

KdeModel fit_kde(const GracePool& pool, const KdeOptions& options) {
  std::vector<double> days;
  days.reserve(pool.samples.size());
  for (const auto& s : pool.samples) days.push_back(static_cast<double>(s.days));
  return fit_kde(pool.cluster, std::move(days), options);
}

double grid_mass(const KdeModel& model) {
  const auto& t = model.grid_t();
  const auto& f = model.grid_pdf();
  double mass = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) mass += 0.5 * (f[i] + f[i - 1]) * (t[i] - t[i - 1]);
  return mass;
}

}  // namespace tdtf
