#pragma once

#include <functional>
#include <memory>
#include <string>

namespace singmap {

enum class RenormalizerKind { TranslationInvariant, LinearGrowth, Custom };

// omega enters through g = ln(omega) - ln(sin theta), a smooth function of
// (t, theta), and through L ln(omega).
//   TranslationInvariant: omega = sin theta,        g = 0,  L ln omega = -1
//   LinearGrowth:         omega = e^{-t} sin theta, g = -t, L ln omega = 0
class Renormalizer {
 public:
  using Fn = std::function<double(double, double)>;

  static Renormalizer translation_invariant();
  static Renormalizer linear_growth();
  // log_ratio(t, theta) = ln omega - ln sin theta, with a certified bound
  // a1 on its C^k norm; t_independent marks omega as translation invariant.
  static Renormalizer custom(Fn log_ratio, double a1, bool t_independent,
                             std::string label = "custom");

  RenormalizerKind kind() const { return kind_; }
  double log_ratio(double t, double theta) const;
  double lap_log_omega(double t, double theta) const;
  bool t_independent() const { return kind_ != RenormalizerKind::LinearGrowth && t_indep_; }
  double a1() const { return a1_; }
  const std::string& name() const { return name_; }

 private:
  Renormalizer(RenormalizerKind k, std::string name, double a1, bool t_indep)
      : kind_(k), name_(std::move(name)), a1_(a1), t_indep_(t_indep) {}

  RenormalizerKind kind_;
  std::string name_;
  double a1_;
  bool t_indep_;
  std::shared_ptr<const Fn> g_;
};

Renormalizer renormalizer_from_name(const std::string& name);

}  // namespace singmap
