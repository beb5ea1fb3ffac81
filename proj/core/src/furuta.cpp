#include "bayrn/furuta.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bayrn/errors.hpp"

namespace bayrn::furuta {

namespace {

constexpr double kPi = std::numbers::pi;

// sin/cos with the argument reduced by the nearest multiple of pi, so that
// the double nearest to k*pi maps onto an exact zero of sin.
void reduced_sincos(double x, double& s, double& c) {
  const double k = std::nearbyint(x / kPi);
  const double r = x - k * kPi;
  const bool odd = std::fmod(std::fabs(k), 2.0) == 1.0;
  s = odd ? -std::sin(r) : std::sin(r);
  c = odd ? -std::cos(r) : std::cos(r);
}

FurutaState add_scaled(const FurutaState& s, const FurutaState& d, double h) {
  return {s.theta + h * d.theta, s.alpha + h * d.alpha,
          s.theta_dot + h * d.theta_dot, s.alpha_dot + h * d.alpha_dot};
}

FurutaState derivative(const FurutaState& s, double voltage,
                       const FurutaDomainParams& xi, double max_voltage) {
  const Accel a = accel(s, voltage, xi, max_voltage);
  return {s.theta_dot, s.alpha_dot, a.theta_ddot, a.alpha_ddot};
}

}  // namespace

FurutaDomainParams FurutaDomainParams::from(const DomainParams& xi) {
  FurutaDomainParams p;
  p.m_p = xi.at("m_p");
  p.m_r = xi.at("m_r");
  p.l_p = xi.at("l_p");
  p.l_r = xi.at("l_r");
  p.d_p = xi.at("d_p");
  p.d_r = xi.at("d_r");
  p.k_m = xi.at("k_m");
  p.R_m = xi.at("R_m");
  p.g = xi.at("g");
  p.J_p = xi.find("J_p").value_or(p.m_p * p.l_p * p.l_p / 12.0);
  p.J_r = xi.find("J_r").value_or(p.m_r * p.l_r * p.l_r / 12.0);
  p.validate();
  return p;
}

void FurutaDomainParams::validate() const {
  const auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(std::string("furuta: ") + name + " must be positive and finite");
    }
  };
  positive(m_p, "m_p");
  positive(m_r, "m_r");
  positive(l_p, "l_p");
  positive(l_r, "l_r");
  positive(k_m, "k_m");
  positive(R_m, "R_m");
  positive(g, "g");
  positive(J_p, "J_p");
  positive(J_r, "J_r");
  if (!(d_p >= 0.0) || !(d_r >= 0.0) || !std::isfinite(d_p) || !std::isfinite(d_r)) {
    throw Error("furuta: damping must be non-negative and finite");
  }
}

bool FurutaState::finite() const {
  return std::isfinite(theta) && std::isfinite(alpha) && std::isfinite(theta_dot) &&
         std::isfinite(alpha_dot);
}

double wrap_angle(double x) {
  const double two_pi = 2.0 * kPi;
  double y = x - two_pi * std::floor((x + kPi) / two_pi);
  // floor() rounding can land exactly on +pi for inputs just below an odd multiple
  if (y >= kPi) y -= two_pi;
  if (y < -kPi) y += two_pi;
  return y;
}

double motor_torque(double voltage, double theta_dot, const FurutaDomainParams& xi) {
  return xi.k_m * (voltage - xi.k_m * theta_dot) / xi.R_m;
}

Accel accel(const FurutaState& s, double voltage, const FurutaDomainParams& xi,
            double max_voltage) {
  if (!s.finite() || !std::isfinite(voltage)) throw NumericBlowUp("furuta state");
  const double a = std::clamp(voltage, -max_voltage, max_voltage);
  const double tau = motor_torque(a, s.theta_dot, xi);

  double sa = 0.0, ca = 0.0;
  reduced_sincos(s.alpha, sa, ca);

  const double mp_lp2 = xi.m_p * xi.l_p * xi.l_p;
  const double mp_lp_lr = xi.m_p * xi.l_p * xi.l_r;

  const double m11 = xi.J_r + xi.m_p * xi.l_r * xi.l_r + 0.25 * mp_lp2 * sa * sa;
  const double m12 = 0.5 * mp_lp_lr * ca;
  const double m22 = xi.J_p + 0.25 * mp_lp2;

  const double b1 = tau - 0.5 * mp_lp2 * sa * ca * s.theta_dot * s.alpha_dot +
                    0.5 * mp_lp_lr * sa * s.alpha_dot * s.alpha_dot - xi.d_r * s.theta_dot;
  const double b2 = 0.25 * mp_lp2 * sa * ca * s.theta_dot * s.theta_dot -
                    0.5 * xi.m_p * xi.l_p * xi.g * sa - xi.d_p * s.alpha_dot;

  const double det = m11 * m22 - m12 * m12;
  Accel out{(m22 * b1 - m12 * b2) / det, (m11 * b2 - m12 * b1) / det};
  if (!std::isfinite(out.theta_ddot) || !std::isfinite(out.alpha_ddot)) {
    throw NumericBlowUp("furuta acceleration");
  }
  return out;
}

FurutaState step(const FurutaState& s, double voltage, const FurutaDomainParams& xi,
                 double dt, double max_voltage) {
  if (!(dt >= 0.0)) throw Error("furuta step: dt must be non-negative");
  const FurutaState k1 = derivative(s, voltage, xi, max_voltage);
  const FurutaState k2 = derivative(add_scaled(s, k1, 0.5 * dt), voltage, xi, max_voltage);
  const FurutaState k3 = derivative(add_scaled(s, k2, 0.5 * dt), voltage, xi, max_voltage);
  const FurutaState k4 = derivative(add_scaled(s, k3, dt), voltage, xi, max_voltage);
  const double h6 = dt / 6.0;
  FurutaState out{
      s.theta + h6 * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta),
      s.alpha + h6 * (k1.alpha + 2.0 * k2.alpha + 2.0 * k3.alpha + k4.alpha),
      s.theta_dot + h6 * (k1.theta_dot + 2.0 * k2.theta_dot + 2.0 * k3.theta_dot + k4.theta_dot),
      s.alpha_dot + h6 * (k1.alpha_dot + 2.0 * k2.alpha_dot + 2.0 * k3.alpha_dot + k4.alpha_dot)};
  if (!out.finite()) throw NumericBlowUp("furuta step");
  return out;
}

double reward(const FurutaState& s, double action, const RewardWeights& w) {
  const double e0 = wrap_angle(0.0 - s.theta);
  const double e1 = wrap_angle(kPi - s.alpha);
  const double e2 = -s.theta_dot;
  const double e3 = -s.alpha_dot;
  const double cost = w.Q[0] * e0 * e0 + w.Q[1] * e1 * e1 + w.Q[2] * e2 * e2 +
                      w.Q[3] * e3 * e3 + action * w.R * action;
  return std::exp(-cost);
}

FurutaObservation observe(const FurutaState& s) {
  return {std::sin(s.theta), std::cos(s.theta), std::sin(s.alpha),
          std::cos(s.alpha), s.theta_dot, s.alpha_dot};
}

FurutaState initial_state(Rng& rng, double jitter_std) {
  if (jitter_std < 0.0) throw Error("furuta: negative initial-state jitter");
  if (jitter_std == 0.0) return {};
  FurutaState s;
  s.theta = jitter_std * standard_normal(rng);
  s.alpha = jitter_std * standard_normal(rng);
  s.theta_dot = jitter_std * standard_normal(rng);
  s.alpha_dot = jitter_std * standard_normal(rng);
  return s;
}

double mechanical_energy(const FurutaState& s, const FurutaDomainParams& xi) {
  const double sa = std::sin(s.alpha), ca = std::cos(s.alpha);
  const double mp_lp2 = xi.m_p * xi.l_p * xi.l_p;
  const double m11 = xi.J_r + xi.m_p * xi.l_r * xi.l_r + 0.25 * mp_lp2 * sa * sa;
  const double m12 = 0.5 * xi.m_p * xi.l_p * xi.l_r * ca;
  const double m22 = xi.J_p + 0.25 * mp_lp2;
  const double kinetic = 0.5 * (m11 * s.theta_dot * s.theta_dot +
                                2.0 * m12 * s.theta_dot * s.alpha_dot +
                                m22 * s.alpha_dot * s.alpha_dot);
  const double potential = 0.5 * xi.m_p * xi.g * xi.l_p * (1.0 - ca);
  return kinetic + potential;
}

}  // namespace bayrn::furuta
