#include "tdtf/joint.hpp"

#include <cmath>
#include <memory>
#include <sstream>

#include "tdtf/error.hpp"

namespace tdtf {

namespace {

void check_time(double t) {
  if (!(t >= 0.0)) throw Error(ErrorKind::DomainError, "time must be >= 0");
}

std::vector<double> linspace(double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = hi * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return v;
}

std::string csv_number(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

// Neumaier-compensated sum.
struct Accumulator {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

void subsets(std::span<const double> p, std::size_t i, double product, bool odd, bool nonempty,
             Accumulator& acc) {
  if (i == p.size()) {
    if (nonempty) acc.add(odd ? product : -product);
    return;
  }
  subsets(p, i + 1, product, odd, nonempty, acc);
  subsets(p, i + 1, product * p[i], !odd, true, acc);
}

}  // namespace

CdfHandle CdfHandle::of(const KdeModel& model, bool allow_extrapolation) {
  auto shared = std::make_shared<const KdeModel>(model);
  return CdfHandle([shared, allow_extrapolation](double t) {
    return shared->cdf(t, allow_extrapolation);
  });
}

double joint_cdf2(const CdfHandle& a, const CdfHandle& b, double t_a, double t_b) {
  check_time(t_a);
  check_time(t_b);
  return 1.0 - (1.0 - a(t_a)) * (1.0 - b(t_b));
}

ProbabilityPlane probability_plane(const CdfHandle& a, const CdfHandle& b, double x_max, double y_max,
                                   std::size_t resolution) {
  if (resolution < 2) throw Error(ErrorKind::InvalidArgument, "resolution must be >= 2");
  check_time(x_max);
  check_time(y_max);
  ProbabilityPlane plane;
  plane.x = linspace(x_max, resolution);
  plane.y = linspace(y_max, resolution);
  std::vector<double> fa(resolution), fb(resolution);
  for (std::size_t i = 0; i < resolution; ++i) {
    fa[i] = a(plane.x[i]);
    fb[i] = b(plane.y[i]);
  }
  plane.values.assign(resolution, std::vector<double>(resolution));
  for (std::size_t i = 0; i < resolution; ++i) {
    for (std::size_t j = 0; j < resolution; ++j) {
      plane.values[i][j] = 1.0 - (1.0 - fa[i]) * (1.0 - fb[j]);
    }
  }
  return plane;
}

std::string ProbabilityPlane::to_csv() const {
  std::ostringstream out;
  out << "x_days,y_days,joint_cdf\n";
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < y.size(); ++j) {
      out << csv_number(x[i]) << ',' << csv_number(y[j]) << ',' << csv_number(values[i][j]) << '\n';
    }
  }
  return out.str();
}

DiagonalCut diagonal_cut(const CdfHandle& a, const CdfHandle& b, double offset_x, double offset_y,
                         double u_max, std::size_t resolution) {
  if (resolution < 2) throw Error(ErrorKind::InvalidArgument, "resolution must be >= 2");
  check_time(offset_x);
  check_time(offset_y);
  if (!(u_max > 0.0)) throw Error(ErrorKind::InvalidArgument, "u_max must be positive");
  DiagonalCut cut;
  cut.offset_x = offset_x;
  cut.offset_y = offset_y;
  cut.u = linspace(u_max, resolution);
  cut.cdf.resize(resolution);
  for (std::size_t i = 0; i < resolution; ++i) {
    cut.cdf[i] = joint_cdf2(a, b, offset_x + cut.u[i], offset_y + cut.u[i]);
  }
  cut.density.resize(resolution);
  const std::size_t last = resolution - 1;
  for (std::size_t i = 0; i < resolution; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i == last ? last : i + 1;
    cut.density[i] = (cut.cdf[hi] - cut.cdf[lo]) / (cut.u[hi] - cut.u[lo]);
  }
  return cut;
}

std::string DiagonalCut::to_csv() const {
  std::ostringstream out;
  out << "u_days,cdf,density\n";
  for (std::size_t i = 0; i < u.size(); ++i) {
    out << csv_number(u[i]) << ',' << csv_number(cdf[i]) << ',' << csv_number(density[i]) << '\n';
  }
  return out.str();
}

double survival_union(std::span<const double> p) {
  double s = 1.0;
  for (double v : p) s *= 1.0 - v;
  return 1.0 - s;
}

double inclusion_exclusion_union(std::span<const double> p) {
  if (p.size() > kMaxInclusionExclusion) {
    throw Error(ErrorKind::TooManyLibraries,
                std::to_string(p.size()) + " libraries exceed the inclusion-exclusion limit of " +
                    std::to_string(kMaxInclusionExclusion));
  }
  Accumulator acc;
  subsets(p, 0, 1.0, false, false, acc);
  return acc.value();
}

JointN joint_union_checked(std::span<const double> p) {
  if (p.empty()) throw Error(ErrorKind::InvalidArgument, "need at least one library");
  for (double v : p) {
    if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorKind::DomainError, "probabilities must lie in [0, 1]");
  }
  JointN out;
  out.value = survival_union(p);
  if (p.size() > kMaxInclusionExclusion) return out;
  out.discrepancy = std::abs(out.value - inclusion_exclusion_union(p));
  out.cross_checked = true;
  if (out.discrepancy > 1e-9) {
    throw Error(ErrorKind::InternalInconsistency,
                "survival and inclusion-exclusion forms differ by " + csv_number(out.discrepancy));
  }
  return out;
}

JointN joint_cdf_n(std::span<const CdfHandle> cdfs, std::span<const double> ts) {
  if (cdfs.size() != ts.size()) {
    throw Error(ErrorKind::InvalidArgument, "need one time per library");
  }
  std::vector<double> p(cdfs.size());
  for (std::size_t i = 0; i < cdfs.size(); ++i) {
    check_time(ts[i]);
    p[i] = cdfs[i](ts[i]);
  }
  return joint_union_checked(p);
}

}  // namespace tdtf
