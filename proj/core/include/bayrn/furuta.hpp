#pragma once

#include <array>
#include <utility>

#include "bayrn/domains.hpp"
#include "bayrn/rng.hpp"

namespace bayrn::furuta {

/// Physical constants of one Furuta pendulum instance. Build through make()
/// so that the pole inertias are derived consistently.
struct FurutaDomainParams {
  double m_p = 0.0;  ///< pendulum pole mass [kg]
  double m_r = 0.0;  ///< rotary pole mass [kg]
  double l_p = 0.0;  ///< pendulum pole length [m]
  double l_r = 0.0;  ///< rotary pole length [m]
  double d_p = 0.0;  ///< pendulum damping [N m s]
  double d_r = 0.0;  ///< rotary damping [N m s]
  double k_m = 0.0;  ///< motor constant [N m / A]
  double R_m = 0.0;  ///< motor resistance [Ohm]
  double g = 0.0;    ///< gravity [m / s^2]
  double J_p = 0.0;  ///< pendulum pole inertia about its center [kg m^2]
  double J_r = 0.0;  ///< rotary pole inertia about its center [kg m^2]

  /// Poles are uniform rods (J = m l^2 / 12) unless DomainParams carries
  /// explicit "J_p" / "J_r" overrides. Throws on invalid values.
  static FurutaDomainParams from(const DomainParams& xi);

  void validate() const;
};

/// [theta, alpha, theta_dot, alpha_dot]; alpha = 0 is hanging down.
struct FurutaState {
  double theta = 0.0;
  double alpha = 0.0;
  double theta_dot = 0.0;
  double alpha_dot = 0.0;

  bool operator==(const FurutaState&) const = default;
  bool finite() const;
};

/// [sin theta, cos theta, sin alpha, cos alpha, theta_dot, alpha_dot]
using FurutaObservation = std::array<double, 6>;

struct Accel {
  double theta_ddot = 0.0;
  double alpha_ddot = 0.0;
};

struct RewardWeights {
  std::array<double, 4> Q{};
  double R = 0.0;

  bool operator==(const RewardWeights&) const = default;
};

/// Wraps an angle into [-pi, pi).
double wrap_angle(double x);

/// Motor torque for a (clamped) voltage.
double motor_torque(double voltage, double theta_dot, const FurutaDomainParams& xi);

/// Equations of motion. The voltage is clamped into [-max_voltage, max_voltage].
/// Throws NumericBlowUp on a non-finite state.
Accel accel(const FurutaState& s, double voltage, const FurutaDomainParams& xi,
            double max_voltage);

/// One classical RK4 step with zero-order-hold action. Angles are not wrapped.
FurutaState step(const FurutaState& s, double voltage, const FurutaDomainParams& xi,
                 double dt, double max_voltage);

/// exp(-(e' Q e + a R a)) with e = [0, pi, 0, 0] - s and both angle errors
/// wrapped into [-pi, pi).
double reward(const FurutaState& s, double action, const RewardWeights& w);

FurutaObservation observe(const FurutaState& s);

/// Hanging-down rest state with optional Gaussian jitter on every component.
FurutaState initial_state(Rng& rng, double jitter_std);

/// Kinetic plus potential energy (potential zero when hanging down).
double mechanical_energy(const FurutaState& s, const FurutaDomainParams& xi);

}  // namespace bayrn::furuta
