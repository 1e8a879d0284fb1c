#include "fractint/predict.hpp"

#include <map>

#include <fmt/format.h>

#include "fractint/error.hpp"

namespace fractint {

namespace {

const std::map<Theorem, std::string>& names() {
  static const std::map<Theorem, std::string> n{
      {Theorem::mattila, "mattila"},
      {Theorem::translation, "translation"},
      {Theorem::rotation, "rotation"},
      {Theorem::fourier, "fourier"},
      {Theorem::dilation, "dilation"},
      {Theorem::operator_bound, "operator"},
      {Theorem::level_set, "level-set"},
      {Theorem::maximal, "maximal"},
      {Theorem::two_equation, "two-equation"},
      {Theorem::two_spheres, "two-spheres"},
      {Theorem::inverse, "inverse"},
      {Theorem::number_theory, "number-theory"},
  };
  return n;
}

void require(Thresholds& t, bool ok, std::string what) {
  if (!ok) {
    t.hypotheses_hold = false;
    t.violations.push_back(std::move(what));
  }
}

}  // namespace

std::string to_string(Theorem t) { return names().at(t); }

Theorem theorem_from_string(const std::string& name) {
  for (const auto& [t, n] : names()) {
    if (n == name) return t;
  }
  throw InvalidArgument(fmt::format("unknown theorem '{}'", name));
}

Thresholds predict(Theorem theorem, const PredictInputs& in) {
  Thresholds t;
  t.theorem = theorem;
  t.inputs = in;
  const double d = in.d;
  const double generic = in.s_a + in.s_b - d;
  switch (theorem) {
    case Theorem::mattila:
      t.intersection = generic;
      require(t, in.s_a + in.s_b >= d, "s_A + s_B >= d");
      require(t, in.s_b > (d + 1) / 2, "s_B > (d+1)/2");
      break;
    case Theorem::translation:
      t.intersection = generic;
      require(t, in.s_a + in.s_b > d, "s_A + s_B > d");
      break;
    case Theorem::rotation:
      t.intersection = generic;
      t.exceptional = d + 1 - in.s_a;
      require(t, in.d >= 2, "d >= 2");
      require(t, in.s_a + in.s_b > d, "s_A + s_B > d");
      require(t, in.alpha + in.s_a > d + 1, "alpha + s_A > d+1");
      break;
    case Theorem::fourier:
      t.intersection = generic;
      t.exceptional = 2 * d - in.beta - in.s_a;
      require(t, in.beta > 0, "beta > 0");
      require(t, (in.alpha + in.s_a) / 2 > d - in.beta / 2, "(alpha + s_A)/2 > d - beta/2");
      break;
    case Theorem::dilation:
      t.intersection = generic;
      t.exceptional = 2 * (d - (in.s_b - in.h)) - in.s_a;
      require(t, in.s_a + in.s_b > d, "s_A + s_B > d");
      require(t, (in.alpha + in.s_a) / 2 > d - (in.s_b - in.h), "(alpha + s_A)/2 > d - (s_B - h)");
      break;
    case Theorem::operator_bound:
      t.intersection = in.s_a - in.m;
      t.exceptional = 2 * d - 2 * in.sobolev - in.s_a;
      require(t, (in.alpha + in.s_a) / 2 > d - in.sobolev, "(alpha + s_A)/2 > d - s");
      require(t, in.s_a > in.m, "s_A > m");
      break;
    case Theorem::level_set:
      t.intersection = in.s_a - 1;
      t.exceptional = d + 1 - in.s_a;
      require(t, in.alpha + in.s_a > d + 1, "alpha + s_A > d+1");
      break;
    case Theorem::maximal:
      t.intersection = in.s_a - 1;
      t.exceptional = d + 2 - in.s_a;
      require(t, in.alpha + in.s_a > d + 2, "alpha + s_A > d+2");
      break;
    case Theorem::two_equation:
    case Theorem::two_spheres:
      t.intersection = in.s_a - 2;
      require(t, in.s_a > 2, "s_A > 2");
      require(t, in.alpha + in.s_a > d + 1, "alpha_1 + s_A > d+1");
      require(t, in.alpha2 + in.s_a > d + 1, "alpha_2 + s_A > d+1");
      break;
    case Theorem::inverse:
      if (in.d < 2) throw InvalidArgument("inverse bound needs d >= 2");
      t.intersection = in.gamma;
      t.lower_bound = d * in.gamma / (d - 1);
      require(t, in.gamma > 0, "gamma > 0");
      break;
    case Theorem::number_theory:
      t.intersection = d - 2 * d / in.s;
      t.count_exponent = d - 2 * d / in.s;
      require(t, in.s > (d + 1) / 2 && in.s < d, "(d+1)/2 < s < d");
      break;
  }
  return t;
}

}  // namespace fractint
