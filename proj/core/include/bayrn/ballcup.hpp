#pragma once

#include <span>
#include <vector>

#include "bayrn/domains.hpp"

namespace bayrn::ballcup {

// Planar surrogate: a cup sliding on a horizontal rail (1-DoF, acceleration
// commanded) with a point-mass ball tied to the center of the cup's bottom
// plate by an elastic string. z points up; the string anchor is at z = 0.

struct BallCupDomainParams {
  double l_s = 0.0;   ///< string rest length [m]
  double d_s = 0.0;   ///< string damping [N s / m]
  double m_b = 0.0;   ///< ball mass [kg]
  double d_j = 0.0;   ///< joint damping [N s / m]
  double mu_s = 0.0;  ///< joint stiction coefficient [-]
  double k_s = 0.0;   ///< string stiffness [N / m]

  static BallCupDomainParams from(const DomainParams& xi);
  void validate() const;
};

/// Constants of the surrogate that are not randomized.
struct BallCupModel {
  double g = 9.81;
  double cup_mass = 1.0;           ///< [kg]
  double max_accel = 20.0;         ///< commanded cup acceleration limit [m/s^2]
  double stiction_smoothing = 0.01;  ///< tanh velocity width [m/s]

  bool operator==(const BallCupModel&) const = default;
};

struct CupGeometry {
  double inner_radius = 0.045;  ///< [m]
  double rim_height = 0.08;     ///< rim above the bottom plate [m]
  double ball_radius = 0.02;    ///< [m]

  /// Radius of the virtual cylinder the ball center must enter.
  double cylinder_radius() const { return inner_radius - ball_radius; }

  bool operator==(const CupGeometry&) const = default;
};

struct BallCupState {
  double cup_x = 0.0;
  double cup_v = 0.0;
  double ball_x = 0.0;
  double ball_z = 0.0;
  double ball_vx = 0.0;
  double ball_vz = 0.0;

  bool operator==(const BallCupState&) const = default;
  bool finite() const;
};

struct Derivatives {
  double cup_a = 0.0;
  double ball_ax = 0.0;
  double ball_az = 0.0;
};

/// Forces on cup and ball. The string only pulls (one-sided spring-damper).
Derivatives accelerations(const BallCupState& s, double action,
                          const BallCupDomainParams& xi, const BallCupModel& model);

/// Kick-drift-kick (velocity Verlet) update over dt. Throws NumericBlowUp.
BallCupState step(const BallCupState& s, double action, const BallCupDomainParams& xi,
                  const BallCupModel& model, double dt);

/// Ball hanging at rest below the cup at the static string extension.
BallCupState rest_state(const BallCupDomainParams& xi, const BallCupModel& model);

enum class Outcome { miss = 0, rim = 1, in_cup = 2 };

/// Incremental classification of a rollout; feed it every visited state.
class ContactTracker {
 public:
  explicit ContactTracker(CupGeometry geometry) : geometry_(geometry) {}

  void observe(const BallCupState& s);
  Outcome outcome() const;
  /// Smallest distance between the ball center and the center of the cup
  /// opening seen so far.
  double min_opening_distance() const { return min_opening_distance_; }

 private:
  CupGeometry geometry_;
  bool has_previous_ = false;
  double prev_dx_ = 0.0;
  double prev_dz_ = 0.0;
  bool entered_ = false;
  bool rim_ = false;
  double min_opening_distance_ = 1e300;
};

/// Ternary reward of a complete trajectory: 1 if the ball center entered the
/// virtual cylinder through the opening, 0.5 if it only touched the rim band,
/// 0 otherwise.
double episode_reward(std::span<const BallCupState> trajectory, const CupGeometry& geometry);

double outcome_reward(Outcome o);

}  // namespace bayrn::ballcup
