#include "bayrn/ballcup.hpp"

#include <algorithm>
#include <cmath>

#include "bayrn/errors.hpp"

namespace bayrn::ballcup {

BallCupDomainParams BallCupDomainParams::from(const DomainParams& xi) {
  BallCupDomainParams p;
  p.l_s = xi.at("l_s");
  p.d_s = xi.at("d_s");
  p.m_b = xi.at("m_b");
  p.d_j = xi.at("d_j");
  p.mu_s = xi.at("mu_s");
  p.k_s = xi.at("k_s");
  p.validate();
  return p;
}

void BallCupDomainParams::validate() const {
  if (!(l_s > 0.0) || !(m_b > 0.0) || !(k_s > 0.0)) {
    throw Error("ballcup: l_s, m_b and k_s must be positive");
  }
  if (!(d_s >= 0.0) || !(d_j >= 0.0) || !(mu_s >= 0.0)) {
    throw Error("ballcup: d_s, d_j and mu_s must be non-negative");
  }
  if (!std::isfinite(l_s + d_s + m_b + d_j + mu_s + k_s)) {
    throw Error("ballcup: non-finite domain parameter");
  }
}

bool BallCupState::finite() const {
  return std::isfinite(cup_x) && std::isfinite(cup_v) && std::isfinite(ball_x) &&
         std::isfinite(ball_z) && std::isfinite(ball_vx) && std::isfinite(ball_vz);
}

Derivatives accelerations(const BallCupState& s, double action,
                          const BallCupDomainParams& xi, const BallCupModel& model) {
  const double u = std::clamp(action, -model.max_accel, model.max_accel);

  double fx = 0.0, fz = 0.0;  // string force acting on the ball
  const double dx = s.ball_x - s.cup_x;
  const double dz = s.ball_z;
  const double length = std::hypot(dx, dz);
  if (length > xi.l_s) {
    const double ex = dx / length, ez = dz / length;
    const double length_rate = ex * (s.ball_vx - s.cup_v) + ez * s.ball_vz;
    const double tension = xi.k_s * (length - xi.l_s) + xi.d_s * length_rate;
    if (tension > 0.0) {
      fx = -tension * ex;
      fz = -tension * ez;
    }
  }

  const double friction = -xi.d_j * s.cup_v - xi.mu_s * model.cup_mass * model.g *
                                                  std::tanh(s.cup_v / model.stiction_smoothing);
  Derivatives d;
  d.cup_a = (model.cup_mass * u + friction - fx) / model.cup_mass;
  d.ball_ax = fx / xi.m_b;
  d.ball_az = fz / xi.m_b - model.g;
  return d;
}

BallCupState step(const BallCupState& s, double action, const BallCupDomainParams& xi,
                  const BallCupModel& model, double dt) {
  if (!(dt >= 0.0)) throw Error("ballcup step: dt must be non-negative");
  if (!s.finite() || !std::isfinite(action)) throw NumericBlowUp("ballcup state");

  const Derivatives a0 = accelerations(s, action, xi, model);
  BallCupState half = s;
  half.cup_v += 0.5 * dt * a0.cup_a;
  half.ball_vx += 0.5 * dt * a0.ball_ax;
  half.ball_vz += 0.5 * dt * a0.ball_az;
  half.cup_x += dt * half.cup_v;
  half.ball_x += dt * half.ball_vx;
  half.ball_z += dt * half.ball_vz;

  const Derivatives a1 = accelerations(half, action, xi, model);
  BallCupState out = half;
  out.cup_v += 0.5 * dt * a1.cup_a;
  out.ball_vx += 0.5 * dt * a1.ball_ax;
  out.ball_vz += 0.5 * dt * a1.ball_az;

  if (!out.finite()) throw NumericBlowUp("ballcup step");
  return out;
}

BallCupState rest_state(const BallCupDomainParams& xi, const BallCupModel& model) {
  BallCupState s;
  s.ball_z = -(xi.l_s + xi.m_b * model.g / xi.k_s);
  return s;
}

void ContactTracker::observe(const BallCupState& s) {
  const double dx = s.ball_x - s.cup_x;
  const double dz = s.ball_z;
  const double r_cyl = geometry_.cylinder_radius();
  const double rim = geometry_.rim_height;

  const bool inside = std::fabs(dx) < r_cyl && dz > 0.0 && dz < rim;
  if (inside && has_previous_ && prev_dz_ >= rim &&
      std::fabs(prev_dx_) < geometry_.inner_radius) {
    entered_ = true;
  }
  const double adx = std::fabs(dx);
  if (std::fabs(dz - rim) <= geometry_.ball_radius && adx >= r_cyl &&
      adx <= geometry_.inner_radius + geometry_.ball_radius) {
    rim_ = true;
  }
  min_opening_distance_ = std::min(min_opening_distance_, std::hypot(dx, dz - rim));

  has_previous_ = true;
  prev_dx_ = dx;
  prev_dz_ = dz;
}

Outcome ContactTracker::outcome() const {
  if (entered_) return Outcome::in_cup;
  if (rim_) return Outcome::rim;
  return Outcome::miss;
}

double outcome_reward(Outcome o) {
  switch (o) {
    case Outcome::in_cup: return 1.0;
    case Outcome::rim: return 0.5;
    case Outcome::miss: return 0.0;
  }
  return 0.0;
}

double episode_reward(std::span<const BallCupState> trajectory, const CupGeometry& geometry) {
  ContactTracker tracker(geometry);
  for (const auto& s : trajectory) tracker.observe(s);
  return outcome_reward(tracker.outcome());
}

}  // namespace bayrn::ballcup
