#include "dol/formulations.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "dol/errors.hpp"

namespace dol {

namespace {

struct Row {
  std::string_view name;
  ProcessKind process;
  Target target;
  NativeSchedule schedule;
};

constexpr std::array<Row, 7> kRows{{
    {"vp-eps", ProcessKind::VP, Target::eps, NativeSchedule::ddpm_linear},
    {"ve-F", ProcessKind::VE, Target::F, NativeSchedule::edm_lognormal},
    {"ve-eps", ProcessKind::VE, Target::eps, NativeSchedule::ncsn_loguniform},
    {"fm-v", ProcessKind::FM, Target::v, NativeSchedule::fm_uniform},
    {"fm-v-sd3", ProcessKind::FM, Target::v, NativeSchedule::fm_logit_normal},
    {"fm-eps", ProcessKind::FM, Target::eps, NativeSchedule::fm_uniform},
    {"fm-x0", ProcessKind::FM, Target::x0, NativeSchedule::fm_uniform},
}};

const Row* find_row(ProcessKind p, Target t, NativeSchedule s) {
  for (const auto& r : kRows) {
    if (r.process == p && r.target == t && r.schedule == s) return &r;
  }
  return nullptr;
}

std::vector<std::string_view> required_constants(NativeSchedule s) {
  switch (s) {
    case NativeSchedule::ddpm_linear: return {"beta_min", "beta_max", "eps_t"};
    case NativeSchedule::edm_lognormal: return {"sigma_data", "P_mean", "P_std"};
    case NativeSchedule::ncsn_loguniform: return {"sigma_min", "sigma_max"};
    case NativeSchedule::fm_logit_normal: return {"logit_mean", "logit_std"};
    case NativeSchedule::fm_uniform: return {};
  }
  return {};
}

void require_sigma_hat(double sigma_hat) {
  if (!(sigma_hat > 0.0) || !std::isfinite(sigma_hat)) {
    throw DomainError("sigma_hat must be positive and finite, got " + std::to_string(sigma_hat));
  }
}

double normal_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

}  // namespace

std::string_view to_string(Target target) noexcept {
  switch (target) {
    case Target::score: return "score";
    case Target::eps: return "eps";
    case Target::x0: return "x0";
    case Target::v: return "v";
    case Target::F: return "F";
  }
  return "?";
}

FormulationSpec FormulationSpec::from_name(std::string_view name) {
  for (const auto& r : kRows) {
    if (r.name != name) continue;
    FormulationSpec spec;
    spec.process = r.process;
    spec.target = r.target;
    spec.schedule = r.schedule;
    switch (r.schedule) {
      case NativeSchedule::ddpm_linear:
        spec.constants = {{"beta_min", 0.1}, {"beta_max", 20.0}, {"eps_t", 1e-5}};
        break;
      case NativeSchedule::edm_lognormal:
        spec.constants = {{"sigma_data", 0.5}, {"P_mean", -1.2}, {"P_std", 1.2}};
        break;
      case NativeSchedule::ncsn_loguniform:
        spec.constants = {{"sigma_min", 0.002}, {"sigma_max", 80.0}};
        break;
      case NativeSchedule::fm_logit_normal:
        spec.constants = {{"logit_mean", 0.0}, {"logit_std", 1.0}};
        break;
      case NativeSchedule::fm_uniform:
        break;
    }
    return spec;
  }
  throw UnsupportedError("unsupported formulation '" + std::string(name) + "'");
}

std::string FormulationSpec::name() const {
  const Row* r = find_row(process, target, schedule);
  if (!r) {
    return std::string(to_string(process)) + "-" + std::string(to_string(target)) + " (unsupported)";
  }
  return std::string(r->name);
}

double FormulationSpec::constant(std::string_view key) const {
  const auto it = constants.find(key);
  if (it == constants.end()) throw SpecError("formulation " + name() + " lacks constant " + std::string(key));
  return it->second;
}

void FormulationSpec::set_constant(std::string_view key, double value) {
  for (auto k : required_constants(schedule)) {
    if (k == key) {
      constants.insert_or_assign(std::string(key), value);
      return;
    }
  }
  throw SpecError("formulation " + name() + " has no constant " + std::string(key));
}

void FormulationSpec::validate() const {
  if (!find_row(process, target, schedule)) {
    throw UnsupportedError("unsupported formulation " + std::string(to_string(process)) + "-" +
                           std::string(to_string(target)));
  }
  for (auto k : required_constants(schedule)) {
    const double v = constant(k);
    if (!std::isfinite(v)) throw SpecError("constant " + std::string(k) + " must be finite");
  }
  switch (schedule) {
    case NativeSchedule::ddpm_linear:
      if (!(constant("beta_min") > 0.0) || !(constant("beta_max") >= constant("beta_min"))) {
        throw SpecError("need 0 < beta_min <= beta_max");
      }
      if (!(constant("eps_t") >= 0.0 && constant("eps_t") < 1.0)) throw SpecError("need 0 <= eps_t < 1");
      break;
    case NativeSchedule::edm_lognormal:
      if (!(constant("sigma_data") > 0.0)) throw SpecError("need sigma_data > 0");
      if (!(constant("P_std") > 0.0)) throw SpecError("need P_std > 0");
      break;
    case NativeSchedule::ncsn_loguniform:
      if (!(constant("sigma_min") > 0.0) || !(constant("sigma_max") > constant("sigma_min"))) {
        throw SpecError("need 0 < sigma_min < sigma_max");
      }
      break;
    case NativeSchedule::fm_logit_normal:
      if (!(constant("logit_std") > 0.0)) throw SpecError("need logit_std > 0");
      break;
    case NativeSchedule::fm_uniform:
      break;
  }
}

std::vector<std::string> supported_formulations() {
  std::vector<std::string> out;
  for (const auto& r : kRows) out.emplace_back(r.name);
  return out;
}

double to_ve_sigma(ProcessKind process, double native_sigma) {
  const DiffusionProcess proc(process);
  if (!proc.in_domain(native_sigma)) {
    throw DomainError("sigma = " + std::to_string(native_sigma) + " is outside the " +
                      std::string(to_string(process)) + " domain");
  }
  switch (process) {
    case ProcessKind::VE: return native_sigma;
    case ProcessKind::VP: return native_sigma / std::sqrt((1.0 - native_sigma) * (1.0 + native_sigma));
    case ProcessKind::FM: return native_sigma / (1.0 - native_sigma);
  }
  return native_sigma;
}

double from_ve_sigma(ProcessKind process, double sigma_hat) {
  require_sigma_hat(sigma_hat);
  switch (process) {
    case ProcessKind::VE: return sigma_hat;
    case ProcessKind::VP: return sigma_hat / std::hypot(1.0, sigma_hat);
    case ProcessKind::FM: return sigma_hat / (1.0 + sigma_hat);
  }
  return sigma_hat;
}

double ddpm_time(double beta_min, double beta_max, double sigma_hat) {
  require_sigma_hat(sigma_hat);
  if (!(beta_min > 0.0) || !(beta_max >= beta_min)) throw SpecError("need 0 < beta_min <= beta_max");
  const double target = std::log1p(sigma_hat * sigma_hat);
  const double slope = beta_max - beta_min;
  const auto f = [&](double t) { return beta_min * t + 0.5 * slope * t * t - target; };
  double lo = 0.0;
  double hi = 1.0;
  while (f(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  for (;;) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return std::fabs(f(lo)) <= std::fabs(f(hi)) ? lo : hi;
}

Preconditioners preconditioners(const FormulationSpec& spec, double sigma_hat) {
  spec.validate();
  require_sigma_hat(sigma_hat);
  const double s = sigma_hat;
  switch (spec.schedule) {
    case NativeSchedule::ddpm_linear: {
      const double t = ddpm_time(spec.constant("beta_min"), spec.constant("beta_max"), s);
      return {1.0, -s, 1.0 / std::hypot(1.0, s), 999.0 * t};
    }
    case NativeSchedule::edm_lognormal: {
      const double sd = spec.constant("sigma_data");
      const double norm = std::hypot(s, sd);
      return {sd * sd / (s * s + sd * sd), sd * s / norm, 1.0 / norm, 0.25 * std::log(s)};
    }
    case NativeSchedule::ncsn_loguniform:
      return {1.0, s, 1.0, std::log(s / 2.0)};
    case NativeSchedule::fm_uniform:
    case NativeSchedule::fm_logit_normal: {
      const double in = 1.0 / (1.0 + s);
      const double noise = s / (1.0 + s);
      switch (spec.target) {
        case Target::v: return {in, -noise, in, noise};
        case Target::eps: return {1.0, -s, in, noise};
        case Target::x0: return {0.0, 1.0, in, noise};
        default: break;
      }
      break;
    }
  }
  throw UnsupportedError("unsupported formulation " + spec.name());
}

double loss_weight_native(const FormulationSpec& spec, double sigma_hat) {
  spec.validate();
  require_sigma_hat(sigma_hat);
  const double s = sigma_hat;
  switch (spec.target) {
    case Target::eps: return 1.0 / (s * s);
    case Target::x0: return 1.0;
    case Target::v: {
      const double r = (1.0 + s) / s;
      return r * r;
    }
    case Target::F: {
      const double sd = spec.constant("sigma_data");
      return (s * s + sd * sd) / ((s * sd) * (s * sd));
    }
    case Target::score: break;
  }
  throw UnsupportedError("unsupported formulation " + spec.name());
}

double convert_loss_to_x0_ve(const FormulationSpec& spec, double sigma_hat, double native_loss) {
  if (!(native_loss >= 0.0)) throw DomainError("native loss must be nonnegative");
  return native_loss / loss_weight_native(spec, sigma_hat);
}

double native_sigma_density(const FormulationSpec& spec, double sigma_hat) {
  spec.validate();
  require_sigma_hat(sigma_hat);
  const double s = sigma_hat;
  switch (spec.schedule) {
    case NativeSchedule::ddpm_linear: {
      const double bmin = spec.constant("beta_min");
      const double bmax = spec.constant("beta_max");
      const double eps_t = spec.constant("eps_t");
      const double t = ddpm_time(bmin, bmax, s);
      if (t < eps_t || t > 1.0) return 0.0;
      // d(sigma_hat^2)/dt = (beta_min + (beta_max - beta_min) t) (1 + sigma_hat^2)
      const double dsdt = (bmin + (bmax - bmin) * t) * (1.0 + s * s) / (2.0 * s);
      return 1.0 / ((1.0 - eps_t) * dsdt);
    }
    case NativeSchedule::edm_lognormal:
      return normal_pdf(std::log(s), spec.constant("P_mean"), spec.constant("P_std")) / s;
    case NativeSchedule::ncsn_loguniform: {
      const double lo = spec.constant("sigma_min");
      const double hi = spec.constant("sigma_max");
      if (s < lo || s > hi) return 0.0;
      return 1.0 / (s * std::log(hi / lo));
    }
    case NativeSchedule::fm_uniform:
      return 1.0 / ((1.0 + s) * (1.0 + s));
    case NativeSchedule::fm_logit_normal:
      return normal_pdf(std::log(s), spec.constant("logit_mean"), spec.constant("logit_std")) / s;
  }
  throw UnsupportedError("unsupported formulation " + spec.name());
}

}  // namespace dol
