#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dol/formulations.hpp"

using namespace dol;

namespace {

// Trapezoid in u = log sigma_hat: integral of p(e^u) e^u du over [lo, hi].
double integrate_density(const FormulationSpec& spec, double lo, double hi, int steps = 200000) {
  const double h = (hi - lo) / steps;
  double sum = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double u = lo + h * i;
    const double f = native_sigma_density(spec, std::exp(u)) * std::exp(u);
    sum += (i == 0 || i == steps) ? 0.5 * f : f;
  }
  return sum * h;
}

}  // namespace

TEST(Formulations, NamesRoundTrip) {
  const auto names = supported_formulations();
  ASSERT_EQ(names.size(), 7u);
  for (const auto& n : names) {
    const auto spec = FormulationSpec::from_name(n);
    EXPECT_EQ(spec.name(), n);
    EXPECT_NO_THROW(spec.validate());
  }
  EXPECT_THROW(FormulationSpec::from_name("vp-F"), UnsupportedError);
  EXPECT_THROW(FormulationSpec::from_name("ve-score"), UnsupportedError);
}

TEST(Formulations, UnsupportedPairsRejected) {
  FormulationSpec s = FormulationSpec::from_name("ve-F");
  s.process = ProcessKind::VP;
  EXPECT_THROW(s.validate(), UnsupportedError);
  EXPECT_THROW(preconditioners(s, 1.0), UnsupportedError);
  EXPECT_THROW(loss_weight_native(s, 1.0), UnsupportedError);
  s = FormulationSpec::from_name("fm-x0");
  s.target = Target::score;
  EXPECT_THROW(loss_weight_native(s, 1.0), UnsupportedError);
}

TEST(Formulations, Constants) {
  auto edm = FormulationSpec::from_name("ve-F");
  EXPECT_EQ(edm.constant("sigma_data"), 0.5);
  EXPECT_EQ(edm.constant("P_mean"), -1.2);
  EXPECT_EQ(edm.constant("P_std"), 1.2);
  edm.set_constant("sigma_data", 1.0);
  EXPECT_EQ(edm.constant("sigma_data"), 1.0);
  EXPECT_THROW(edm.set_constant("beta_min", 1.0), SpecError);
  edm.constants.erase("P_std");
  EXPECT_THROW(edm.validate(), SpecError);

  const auto ddpm = FormulationSpec::from_name("vp-eps");
  EXPECT_EQ(ddpm.constant("beta_min"), 0.1);
  EXPECT_EQ(ddpm.constant("beta_max"), 20.0);
  EXPECT_EQ(ddpm.constant("eps_t"), 1e-5);
  const auto ncsn = FormulationSpec::from_name("ve-eps");
  EXPECT_EQ(ncsn.constant("sigma_min"), 0.002);
  EXPECT_EQ(ncsn.constant("sigma_max"), 80.0);
  auto bad = FormulationSpec::from_name("ve-eps");
  bad.set_constant("sigma_min", 100.0);
  EXPECT_THROW(bad.validate(), SpecError);
}

TEST(SigmaMapping, Examples) {
  EXPECT_EQ(to_ve_sigma(ProcessKind::VE, 3.7), 3.7);
  EXPECT_NEAR(to_ve_sigma(ProcessKind::VP, 1.0 / std::numbers::sqrt2), 1.0, 1e-15);
  EXPECT_EQ(to_ve_sigma(ProcessKind::FM, 0.5), 1.0);
  EXPECT_THROW(to_ve_sigma(ProcessKind::VP, 1.0), DomainError);
  EXPECT_THROW(to_ve_sigma(ProcessKind::FM, -0.1), DomainError);
  EXPECT_THROW(from_ve_sigma(ProcessKind::VE, 0.0), DomainError);
}

TEST(SigmaMapping, RoundTrip) {
  for (auto p : {ProcessKind::VE, ProcessKind::VP, ProcessKind::FM}) {
    // Native VP/FM levels crowd against 1 as sigma_hat grows, so a double
    // there carries about sigma_hat^2 * 1e-16 relative error in sigma_hat.
    const double top = p == ProcessKind::VE ? 1e6 : 1e2;
    double prev = 0.0;
    for (double s = 1e-6; s < top; s *= 1.37) {
      const double native = from_ve_sigma(p, s);
      EXPECT_GT(native, prev);
      prev = native;
      EXPECT_NEAR(to_ve_sigma(p, native), s, 1e-12 * s) << to_string(p) << " " << s;
    }
  }
  for (auto p : {ProcessKind::VP, ProcessKind::FM}) {
    for (double native = 1e-6; native < 1.0; native = native < 0.5 ? native * 1.5 : 1.0 - (1.0 - native) / 1.5) {
      EXPECT_NEAR(from_ve_sigma(p, to_ve_sigma(p, native)), native, 1e-12 * native) << to_string(p);
      if (1.0 - native < 1e-12) break;
    }
  }
}

TEST(Preconditioners, TableRows) {
  for (double s : {0.01, 0.7, 3.0}) {
    const auto fm = preconditioners(FormulationSpec::from_name("fm-x0"), s);
    EXPECT_EQ(fm.c_skip, 0.0);
    EXPECT_EQ(fm.c_out, 1.0);
    const auto vp = preconditioners(FormulationSpec::from_name("vp-eps"), s);
    EXPECT_EQ(vp.c_skip, 1.0);
    EXPECT_EQ(vp.c_out, -s);
    EXPECT_DOUBLE_EQ(vp.c_in, 1.0 / std::sqrt(1.0 + s * s));
  }
  const auto edm = preconditioners(FormulationSpec::from_name("ve-F"), 0.5);
  EXPECT_DOUBLE_EQ(edm.c_skip, 0.5);
  EXPECT_DOUBLE_EQ(edm.c_out, 0.25 / std::sqrt(0.5));
  EXPECT_DOUBLE_EQ(edm.c_noise, 0.25 * std::log(0.5));
  EXPECT_THROW(preconditioners(FormulationSpec::from_name("ve-F"), 0.0), DomainError);
}

TEST(Preconditioners, DdpmNoiseLabel) {
  // sigma_hat(t = 1) with the default linear betas.
  const double s1 = std::sqrt(std::expm1(0.1 + 0.5 * 19.9));
  EXPECT_NEAR(preconditioners(FormulationSpec::from_name("vp-eps"), s1).c_noise, 999.0, 1e-9);
  const double t = 0.25;
  const double s = std::sqrt(std::expm1(0.1 * t + 0.5 * 19.9 * t * t));
  EXPECT_NEAR(ddpm_time(0.1, 20.0, s), t, 1e-12);
  // Past t = 1 the bracket grows.
  const double far = std::sqrt(std::expm1(0.1 * 3 + 0.5 * 19.9 * 9));
  EXPECT_NEAR(ddpm_time(0.1, 20.0, far), 3.0, 1e-12);
}

TEST(Preconditioners, ReconstructionInverts) {
  for (const auto& n : supported_formulations()) {
    const auto spec = FormulationSpec::from_name(n);
    for (double s : {0.1, 1.0, 10.0}) {
      const auto c = preconditioners(spec, s);
      ASSERT_NE(c.c_out, 0.0);
      const double x = 0.37 + s, f = -1.25;
      const double x0 = c.c_skip * x + c.c_out * f;
      EXPECT_NEAR((x0 - c.c_skip * x) / c.c_out, f, 1e-12) << n << " " << s;
      // Native loss weight times c_out^2 is one: the native target error is
      // the x0 error divided by c_out.
      EXPECT_NEAR(loss_weight_native(spec, s) * c.c_out * c.c_out, 1.0, 1e-12) << n << " " << s;
    }
  }
}

TEST(LossWeights, Examples) {
  EXPECT_EQ(loss_weight_native(FormulationSpec::from_name("fm-x0"), 0.3), 1.0);
  EXPECT_EQ(loss_weight_native(FormulationSpec::from_name("fm-v"), 1.0), 4.0);
  EXPECT_EQ(loss_weight_native(FormulationSpec::from_name("vp-eps"), 2.0), 0.25);
  EXPECT_EQ(convert_loss_to_x0_ve(FormulationSpec::from_name("fm-x0"), 7.0, 0.3), 0.3);
  EXPECT_EQ(convert_loss_to_x0_ve(FormulationSpec::from_name("fm-v"), 1.0, 4.0), 1.0);
  EXPECT_THROW(convert_loss_to_x0_ve(FormulationSpec::from_name("fm-v"), 1.0, -1.0), DomainError);
}

TEST(LossWeights, EpsAgainstX0) {
  const auto eps = FormulationSpec::from_name("fm-eps");
  const auto x0 = FormulationSpec::from_name("fm-x0");
  for (double s = 1e-3; s < 1e3; s *= 3.1) {
    EXPECT_NEAR(loss_weight_native(eps, s) * s * s, loss_weight_native(x0, s), 1e-12);
  }
}

TEST(LossWeights, RoundTripAndPositivity) {
  for (const auto& n : supported_formulations()) {
    const auto spec = FormulationSpec::from_name(n);
    for (double s = 1e-3; s < 1e3; s *= 1.9) {
      const double w = loss_weight_native(spec, s);
      EXPECT_GT(w, 0.0);
      EXPECT_TRUE(std::isfinite(w));
      const double loss = 0.123;
      EXPECT_NEAR(convert_loss_to_x0_ve(spec, s, loss) * w, loss, 4e-16) << n;
    }
  }
}

TEST(NativeDensity, Examples) {
  const auto edm = FormulationSpec::from_name("ve-F");
  const double s = std::exp(-1.2);
  EXPECT_NEAR(native_sigma_density(edm, s), 1.0 / (s * 1.2 * std::sqrt(2 * std::numbers::pi)), 1e-14);
  const auto fm = FormulationSpec::from_name("fm-v");
  EXPECT_DOUBLE_EQ(native_sigma_density(fm, 3.0), 1.0 / 16.0);
  const auto ncsn = FormulationSpec::from_name("ve-eps");
  EXPECT_EQ(native_sigma_density(ncsn, 100.0), 0.0);
  EXPECT_EQ(native_sigma_density(ncsn, 0.001), 0.0);
}

TEST(NativeDensity, IntegratesToOne) {
  EXPECT_NEAR(integrate_density(FormulationSpec::from_name("ve-F"), -1.2 - 14.4, -1.2 + 14.4), 1.0, 1e-6);
  EXPECT_NEAR(integrate_density(FormulationSpec::from_name("fm-v-sd3"), -12, 12), 1.0, 1e-6);
  EXPECT_NEAR(integrate_density(FormulationSpec::from_name("fm-v"), -40, 40), 1.0, 1e-6);
  EXPECT_NEAR(integrate_density(FormulationSpec::from_name("fm-eps"), -40, 40), 1.0, 1e-6);
  EXPECT_NEAR(integrate_density(FormulationSpec::from_name("ve-eps"), std::log(0.002), std::log(80.0)), 1.0,
              1e-6);
  const double lo = std::sqrt(std::expm1(0.1 * 1e-5 + 0.5 * 19.9 * 1e-10));
  const double hi = std::sqrt(std::expm1(0.1 + 0.5 * 19.9));
  EXPECT_NEAR(integrate_density(FormulationSpec::from_name("vp-eps"), std::log(lo), std::log(hi)), 1.0, 1e-6);
}
