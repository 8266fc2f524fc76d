#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "support.hpp"
#include "tdtf/error.hpp"
#include "tdtf/kde.hpp"

using namespace tdtf;
using namespace tdtf::test;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::InternalInconsistency;
}

// Reflected Gaussian density written out independently of the library.
double reference_pdf(const std::vector<double>& xs, double h, double t) {
  const double c = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  double s = 0.0;
  for (double x : xs) {
    const double a = (t - x) / h, b = (t + x) / h;
    s += c * (std::exp(-0.5 * a * a) + std::exp(-0.5 * b * b));
  }
  return s / (static_cast<double>(xs.size()) * h);
}

double quadrature_cdf(const std::vector<double>& xs, double h, double t) {
  if (t == 0.0) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double u) { return reference_pdf(xs, h, u); }, 0.0, t, 15, 1e-13);
}

std::vector<double> exp_samples(std::size_t m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> d(1.0 / 100.0);
  std::vector<double> xs(m);
  for (auto& x : xs) x = d(rng);
  return xs;
}

const ClusterId kC{"Local×SmallMedium"};

}  // namespace

TEST(Bandwidth, TwoSampleHandFormula) {
  // sd = 24.7487, IQR = 17.5, min(sd, IQR/1.34) = 13.0597, times 0.9 * 2^-0.2.
  const std::vector<double> xs{30, 65};
  EXPECT_NEAR(silverman_bandwidth(xs), 10.2322, 1e-4);
  KdeOptions o;
  o.min_samples = 1;
  EXPECT_NEAR(fit_kde(kC, xs, o).bandwidth(), 10.2322, 1e-4);
}

TEST(Bandwidth, DegenerateSpreads) {
  const std::vector<double> same{7, 7, 7, 7};
  EXPECT_DOUBLE_EQ(silverman_bandwidth(same), 1.0);
  const std::vector<double> one{12};
  EXPECT_DOUBLE_EQ(silverman_bandwidth(one), 1.0);
  // IQR of zero falls back to the standard deviation.
  const std::vector<double> spiky{0, 5, 5, 5, 5, 5, 5, 100};
  const double m = 8;
  double mean = 130.0 / m, ss = 0;
  for (double x : spiky) ss += (x - mean) * (x - mean);
  EXPECT_NEAR(silverman_bandwidth(spiky), 0.9 * std::sqrt(ss / 7) * std::pow(m, -0.2), 1e-12);
}

TEST(Fit, InsufficientData) {
  EXPECT_EQ(kind_of([] { fit_kde(kC, {}); }), ErrorKind::InsufficientData);
  EXPECT_EQ(kind_of([] { fit_kde(kC, {1, 2, 3, 4}); }), ErrorKind::InsufficientData);
  KdeOptions o;
  o.min_samples = 0;
  EXPECT_EQ(kind_of([&] { fit_kde(kC, {}, o); }), ErrorKind::InsufficientData);
  EXPECT_NO_THROW(fit_kde(kC, {1, 2, 3, 4, 5}));
}

TEST(Fit, DomainErrors) {
  EXPECT_EQ(kind_of([] { KdeModel(kC, {-1.0}, 1.0); }), ErrorKind::DomainError);
  EXPECT_EQ(kind_of([] { KdeModel(kC, {1.0}, 0.0); }), ErrorKind::DomainError);
  const KdeModel m(kC, {10.0}, 2.0);
  EXPECT_EQ(kind_of([&] { m.cdf(-0.5); }), ErrorKind::DomainError);
  EXPECT_EQ(kind_of([&] { m.pdf(std::nan("")); }), ErrorKind::DomainError);
}

TEST(Kde, ExponentialRecovery) {
  const auto m = fit_kde(kC, exp_samples(1000, 1));
  EXPECT_NEAR(m.cdf(100.0), 1.0 - std::exp(-1.0), 0.03);
}

TEST(Kde, SingleSampleHalfMassAtSample) {
  const KdeModel m(kC, {100.0}, 1.0);
  EXPECT_NEAR(m.cdf(100.0), 0.5, 1e-9);
  EXPECT_NEAR(quadrature_cdf({100.0}, 1.0, 100.0), 0.5, 1e-9);
}

TEST(Kde, BoundaryValuesAndMass) {
  const auto m = fit_kde(kC, {3, 40, 41, 90, 200, 365});
  EXPECT_EQ(m.cdf(0.0), 0.0);
  EXPECT_EQ(m.sf(0.0), 1.0);
  EXPECT_NEAR(m.cdf(m.grid_end(), true), 1.0, 1e-6);
  EXPECT_EQ(m.cdf(m.grid_end() + 1.0), 1.0);
  EXPECT_EQ(m.sf(m.grid_end() + 1.0), 0.0);
  EXPECT_GT(m.sf(m.grid_end() + 1.0, true), 0.0);
  EXPECT_EQ(m.grid_t().size(), KdeModel::kGridPoints);
  EXPECT_DOUBLE_EQ(m.grid_end(), 365.0 + KdeModel::kGridTailBandwidths * m.bandwidth());

  // Independent trapezoid over the reference density.
  const std::size_t n = 20000;
  double mass = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const double a = m.grid_end() * static_cast<double>(i - 1) / n;
    const double b = m.grid_end() * static_cast<double>(i) / n;
    mass += 0.5 * (reference_pdf(m.samples(), m.bandwidth(), a) +
                   reference_pdf(m.samples(), m.bandwidth(), b)) * (b - a);
  }
  EXPECT_NEAR(mass, 1.0, 1e-6);
  EXPECT_NEAR(grid_mass(m), 1.0, 1e-4);
  for (double p : m.grid_pdf()) EXPECT_GE(p, 0.0);
}

TEST(Kde, WindowProbability) {
  const auto m = fit_kde(kC, {10, 50, 60, 120, 400});
  EXPECT_EQ(m.window_probability(30, 0), 0.0);
  EXPECT_NEAR(m.window_probability(30, 45), m.cdf(75) - m.cdf(30), 1e-12);
  EXPECT_NEAR(m.window_probability(0, 1e6, true), 1.0, 1e-12);
  EXPECT_EQ(m.window_probability(m.grid_end() + 10, 45), 0.0);
}

TEST(Kde, SerializationRoundTrip) {
  KdeOptions o;
  o.bandwidth_override = 7.5;
  const auto m = fit_kde(kC, {1, 2, 30, 40, 55.5}, o);
  const auto text = m.to_json();
  const auto back = KdeModel::from_json(text);
  EXPECT_EQ(back.cluster(), m.cluster());
  EXPECT_EQ(back.samples(), m.samples());
  EXPECT_EQ(back.bandwidth(), 7.5);
  EXPECT_TRUE(back.bandwidth_overridden());
  EXPECT_EQ(back.to_json(), text);
  for (double t : {0.0, 1.0, 20.0, 50.0, 90.0}) EXPECT_EQ(back.cdf(t), m.cdf(t));

  const auto silver = fit_kde(kC, {1, 2, 30, 40, 55.5});
  EXPECT_FALSE(KdeModel::from_json(silver.to_json()).bandwidth_overridden());
}

TEST(Kde, CorruptModelFiles) {
  const auto m = fit_kde(kC, {1, 2, 30, 40, 55.5});
  const auto text = m.to_json();
  EXPECT_EQ(kind_of([&] { KdeModel::from_json(text.substr(0, text.size() / 2)); }),
            ErrorKind::ParseError);
  std::string v2 = text;
  v2.replace(v2.find("\"version\": 1"), 12, "\"version\": 2");
  EXPECT_EQ(kind_of([&] { KdeModel::from_json(v2); }), ErrorKind::UnsupportedModelVersion);
  EXPECT_EQ(kind_of([] { KdeModel::from_json(R"({"cluster":"x"})"); }),
            ErrorKind::UnsupportedModelVersion);
  EXPECT_EQ(kind_of([] {
              KdeModel::from_json(
                  R"({"version":1,"cluster":"x","samples":[1],"bandwidth":1,"kernel":"box","boundary":"reflect"})");
            }),
            ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] {
              KdeModel::from_json(
                  R"({"version":1,"cluster":"x","samples":"many","bandwidth":1,"kernel":"gaussian","boundary":"reflect"})");
            }),
            ErrorKind::ParseError);
}

TEST(Kde, GridCsvHeader) {
  const auto m = fit_kde(kC, {1, 2, 3, 4, 5});
  const auto csv = m.grid_csv();
  EXPECT_EQ(csv.substr(0, 10), "t,pdf,cdf\n");
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')),
            KdeModel::kGridPoints + 1);
}

class KdeProperties : public ::testing::TestWithParam<int> {};

TEST_P(KdeProperties, MonotoneBoundedAndMatchesQuadrature) {
  Gen g(static_cast<std::uint64_t>(GetParam()) * 31);
  std::vector<double> xs(static_cast<std::size_t>(g.integer(5, 60)));
  for (auto& x : xs) x = std::floor(g.real(0, 1200));
  const auto m = fit_kde(kC, xs);
  double prev = 0.0;
  for (std::size_t i = 0; i < m.grid_t().size(); i += 7) {
    const double f = m.cdf(m.grid_t()[i]);
    EXPECT_GE(f, prev - 1e-15);
    EXPECT_GE(f, 0.0);
    EXPECT_LE(f, 1.0);
    prev = f;
  }
  for (int k = 0; k < 5; ++k) {
    const double t = g.real(0, m.grid_end());
    EXPECT_NEAR(m.cdf(t), quadrature_cdf(xs, m.bandwidth(), t), 1e-6) << "t=" << t;
    EXPECT_NEAR(m.pdf(t), reference_pdf(xs, m.bandwidth(), t), 1e-12);
    EXPECT_NEAR(m.cdf(t) + m.sf(t), 1.0, 1e-12);
  }
}

INSTANTIATE_TEST_SUITE_P(RandomPools, KdeProperties, ::testing::Range(1, 26));

TEST(KdeConsistency, LargerPoolsTrackTheTrueDistribution) {
  const auto small = fit_kde(kC, exp_samples(100, 7));
  const auto large = fit_kde(kC, exp_samples(10000, 8));
  double worst_small = 0.0, worst_large = 0.0;
  for (double t : {25.0, 50.0, 100.0, 200.0, 300.0}) {
    const double truth = 1.0 - std::exp(-t / 100.0);
    worst_small = std::max(worst_small, std::abs(small.cdf(t) - truth));
    worst_large = std::max(worst_large, std::abs(large.cdf(t) - truth));
  }
  EXPECT_LT(worst_large, 0.02);
  EXPECT_LT(worst_small, 0.15);
}
