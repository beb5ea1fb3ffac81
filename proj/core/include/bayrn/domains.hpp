#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bayrn/rng.hpp"

namespace bayrn {

/// One concrete instantiation of simulator physics, keyed by parameter id.
class DomainParams {
 public:
  DomainParams() = default;
  explicit DomainParams(std::map<std::string, double> values)
      : values_(std::move(values)) {}

  double at(const std::string& id) const;
  std::optional<double> find(const std::string& id) const;
  bool contains(const std::string& id) const { return values_.count(id) != 0; }
  void set(const std::string& id, double value) { values_[id] = value; }

  const std::map<std::string, double>& values() const { return values_; }

  bool operator==(const DomainParams&) const = default;

 private:
  std::map<std::string, double> values_;
};

/// Nominal value and hard plausibility clamp of a single domain parameter.
struct DomainParamSpec {
  std::string id;
  double nominal = 0.0;
  double clamp_lo = 0.0;
  double clamp_hi = 0.0;

  bool operator==(const DomainParamSpec&) const = default;
};

using DomainSpecTable = std::vector<DomainParamSpec>;

/// Default clamp for a quantity: [0.2 nominal, 5 nominal] when positive.
DomainParamSpec make_default_spec(const std::string& id, double nominal);
void validate_spec(const DomainParamSpec& spec);

/// Domain parameters with every entry at its nominal value.
DomainParams nominal_domain(const DomainSpecTable& specs);

enum class Family { normal, uniform };

const char* to_string(Family family);
Family family_from_string(const std::string& name);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const { return lo <= x && x <= hi; }
  double width() const { return hi - lo; }
  bool operator==(const Interval&) const = default;
};

/// One randomized parameter in the search space: its family and the box
/// for the (mean, variance) pair.
struct DistrSlot {
  std::string id;
  Family family = Family::normal;
  Interval mean;
  Interval variance;

  bool operator==(const DistrSlot&) const = default;
};

/// Axis-aligned box in flat phi coordinates.
struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  Eigen::Index dim() const { return lower.size(); }
  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const;
  bool is_degenerate(Eigen::Index i) const { return lower[i] == upper[i]; }
};

/// The search space Phi. Flat phi layout is [mean_0, var_0, mean_1, var_1, ...].
class DistrSpace {
 public:
  DistrSpace() = default;
  explicit DistrSpace(std::vector<DistrSlot> slots);

  const std::vector<DistrSlot>& slots() const { return slots_; }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(2 * slots_.size()); }
  const Box& box() const { return box_; }

  /// Coordinate names such as "m_p.mean" and "m_p.var".
  std::vector<std::string> coordinate_names() const;

 private:
  std::vector<DistrSlot> slots_;
  Box box_;
};

struct DistrEntry {
  std::string id;
  Family family = Family::normal;
  double mean = 0.0;
  double variance = 0.0;

  bool operator==(const DistrEntry&) const = default;
};

/// Means and variances of the per-parameter sampling distributions.
struct DomainDistrParams {
  std::vector<DistrEntry> entries;

  static DomainDistrParams from_vector(const DistrSpace& space,
                                       const Eigen::VectorXd& phi);
  Eigen::VectorXd to_vector() const;

  bool operator==(const DomainDistrParams&) const = default;
};

/// Throws OutOfBox when phi does not match or lies outside `space`.
void check_in_box(const DistrSpace& space, const DomainDistrParams& phi);

/// Draws xi ~ nu(xi; phi). Parameters not listed in phi take their nominal
/// value; every draw is clamped to its plausibility interval.
DomainParams sample_domain(const DistrSpace& space, const DomainDistrParams& phi,
                           const DomainSpecTable& specs, Rng& rng);

/// Uniform draw of phi over the box.
DomainDistrParams random_phi(const DistrSpace& space, Rng& rng);

/// Affine map of each coordinate onto [0, 1]. Degenerate coordinates map to 0.
Eigen::VectorXd normalize_phi(const Box& box, const Eigen::VectorXd& phi);
/// Inverse of normalize_phi; results are clamped into the box.
Eigen::VectorXd denormalize_phi(const Box& box, const Eigen::VectorXd& unit);

/// Samples domain parameters for each training episode.
class DomainSampler {
 public:
  /// Randomized sampler drawing from nu(xi; phi).
  DomainSampler(DistrSpace space, DomainDistrParams phi, DomainSpecTable specs);
  /// Fixed sampler that always returns `fixed`.
  explicit DomainSampler(DomainParams fixed);

  DomainParams sample(Rng& rng) const;

 private:
  std::optional<DistrSpace> space_;
  DomainDistrParams phi_;
  DomainSpecTable specs_;
  DomainParams fixed_;
};

}  // namespace bayrn
