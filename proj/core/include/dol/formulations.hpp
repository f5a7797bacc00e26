#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dol/core.hpp"

namespace dol {

enum class Target { score, eps, x0, v, F };

std::string_view to_string(Target target) noexcept;

/// How the native training draws its noise level.
enum class NativeSchedule {
  ddpm_linear,      // t ~ U(eps_t, 1), linear beta schedule
  edm_lognormal,    // log sigma ~ N(P_mean, P_std^2)
  ncsn_loguniform,  // log sigma ~ U(log sigma_min, log sigma_max)
  fm_uniform,       // t ~ U(0, 1), sigma = t
  fm_logit_normal,  // logit t ~ N(logit_mean, logit_std^2)
};

/// One (process, target, schedule) row of the unified x0 / VE view together
/// with its named constants:
///   vp-eps    beta_min, beta_max, eps_t
///   ve-F      sigma_data, P_mean, P_std
///   ve-eps    sigma_min, sigma_max
///   fm-v-sd3  logit_mean, logit_std
/// fm-v, fm-eps and fm-x0 take no constants.
struct FormulationSpec {
  ProcessKind process = ProcessKind::VE;
  Target target = Target::F;
  NativeSchedule schedule = NativeSchedule::edm_lognormal;
  std::map<std::string, double, std::less<>> constants;

  /// vp-eps | ve-F | ve-eps | fm-v | fm-v-sd3 | fm-eps | fm-x0, with default
  /// constants filled in. Throws UnsupportedError for any other name.
  static FormulationSpec from_name(std::string_view name);

  std::string name() const;

  /// Throws SpecError when the constant is absent.
  double constant(std::string_view key) const;

  /// Replaces a constant; throws SpecError for a key the row does not use.
  void set_constant(std::string_view key, double value);

  /// Throws UnsupportedError for a combination outside the supported rows
  /// and SpecError for missing or invalid constants.
  void validate() const;
};

std::vector<std::string> supported_formulations();

/// Native noise level -> VE noise level sigma / alpha_sigma.
/// Throws DomainError outside the process's native domain.
double to_ve_sigma(ProcessKind process, double native_sigma);

/// Inverse of to_ve_sigma. Throws DomainError for sigma_hat <= 0.
double from_ve_sigma(ProcessKind process, double sigma_hat);

struct Preconditioners {
  double c_skip;
  double c_out;
  double c_in;
  double c_noise;
};

/// Coefficients of x0(x, s) = c_skip x + c_out F(c_in x, c_noise) at VE level s.
Preconditioners preconditioners(const FormulationSpec& spec, double sigma_hat);

/// Factor w with native step loss = w * (x0-prediction VE loss).
double loss_weight_native(const FormulationSpec& spec, double sigma_hat);

/// native_loss / loss_weight_native. Throws DomainError for a negative loss.
double convert_loss_to_x0_ve(const FormulationSpec& spec, double sigma_hat, double native_loss);

/// Density of sigma_hat induced by the spec's native noise sampling.
double native_sigma_density(const FormulationSpec& spec, double sigma_hat);

/// DDPM time t with sigma_hat(t) = sqrt(exp(beta_min t + (beta_max - beta_min) t^2 / 2) - 1),
/// found by bisection down to adjacent doubles.
double ddpm_time(double beta_min, double beta_max, double sigma_hat);

}  // namespace dol
