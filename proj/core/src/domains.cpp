#include "bayrn/domains.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bayrn/errors.hpp"

namespace bayrn {

double DomainParams::at(const std::string& id) const {
  auto it = values_.find(id);
  if (it == values_.end()) throw Error("unknown domain parameter '" + id + "'");
  return it->second;
}

std::optional<double> DomainParams::find(const std::string& id) const {
  auto it = values_.find(id);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

DomainParamSpec make_default_spec(const std::string& id, double nominal) {
  DomainParamSpec spec{id, nominal, 0.0, 0.0};
  if (nominal > 0.0) {
    spec.clamp_lo = 0.2 * nominal;
    spec.clamp_hi = 5.0 * nominal;
  } else if (nominal < 0.0) {
    spec.clamp_lo = 5.0 * nominal;
    spec.clamp_hi = 0.2 * nominal;
  }
  return spec;
}

void validate_spec(const DomainParamSpec& spec) {
  if (!std::isfinite(spec.nominal) || !std::isfinite(spec.clamp_lo) ||
      !std::isfinite(spec.clamp_hi)) {
    throw Error("domain parameter '" + spec.id + "' has non-finite bounds");
  }
  if (spec.clamp_lo > spec.nominal || spec.nominal > spec.clamp_hi) {
    throw Error("clamp interval of '" + spec.id + "' does not contain nominal");
  }
}

DomainParams nominal_domain(const DomainSpecTable& specs) {
  DomainParams xi;
  for (const auto& s : specs) xi.set(s.id, s.nominal);
  return xi;
}

const char* to_string(Family family) {
  switch (family) {
    case Family::normal: return "normal";
    case Family::uniform: return "uniform";
  }
  return "?";
}

Family family_from_string(const std::string& name) {
  if (name == "normal") return Family::normal;
  if (name == "uniform") return Family::uniform;
  throw Error("unknown distribution family '" + name + "'");
}

bool Box::contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != lower.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x[i] >= lower[i] - tol && x[i] <= upper[i] + tol)) return false;
  }
  return true;
}

DistrSpace::DistrSpace(std::vector<DistrSlot> slots) : slots_(std::move(slots)) {
  const auto n = dim();
  box_.lower.resize(n);
  box_.upper.resize(n);
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    const auto& s = slots_[i];
    if (!(s.mean.lo <= s.mean.hi) || !(s.variance.lo <= s.variance.hi)) {
      throw Error("empty range for randomized parameter '" + s.id + "'");
    }
    if (s.variance.lo < 0.0) {
      throw Error("negative variance bound for '" + s.id + "'");
    }
    box_.lower[2 * i] = s.mean.lo;
    box_.upper[2 * i] = s.mean.hi;
    box_.lower[2 * i + 1] = s.variance.lo;
    box_.upper[2 * i + 1] = s.variance.hi;
  }
}

std::vector<std::string> DistrSpace::coordinate_names() const {
  std::vector<std::string> names;
  for (const auto& s : slots_) {
    names.push_back(s.id + ".mean");
    names.push_back(s.id + ".var");
  }
  return names;
}

DomainDistrParams DomainDistrParams::from_vector(const DistrSpace& space,
                                                 const Eigen::VectorXd& phi) {
  if (phi.size() != space.dim()) {
    throw DimensionMismatch("phi", static_cast<std::size_t>(space.dim()),
                            static_cast<std::size_t>(phi.size()));
  }
  DomainDistrParams out;
  const auto& slots = space.slots();
  for (std::size_t i = 0; i < slots.size(); ++i) {
    out.entries.push_back({slots[i].id, slots[i].family, phi[2 * i], phi[2 * i + 1]});
  }
  return out;
}

Eigen::VectorXd DomainDistrParams::to_vector() const {
  Eigen::VectorXd v(2 * entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    v[2 * i] = entries[i].mean;
    v[2 * i + 1] = entries[i].variance;
  }
  return v;
}

void check_in_box(const DistrSpace& space, const DomainDistrParams& phi) {
  const auto& slots = space.slots();
  if (phi.entries.size() != slots.size()) {
    throw OutOfBox("phi has " + std::to_string(phi.entries.size()) +
                   " entries, space has " + std::to_string(slots.size()));
  }
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const auto& e = phi.entries[i];
    const auto& s = slots[i];
    if (e.id != s.id || e.family != s.family) {
      throw OutOfBox("entry " + std::to_string(i) + " is '" + e.id +
                     "', expected '" + s.id + "'");
    }
    if (!s.mean.contains(e.mean) || !s.variance.contains(e.variance)) {
      std::ostringstream os;
      os.precision(17);
      os << s.id << " (mean " << e.mean << ", variance " << e.variance
         << ") outside [" << s.mean.lo << ", " << s.mean.hi << "] x ["
         << s.variance.lo << ", " << s.variance.hi << "]";
      throw OutOfBox(os.str());
    }
  }
}

namespace {

const DomainParamSpec& spec_for(const DomainSpecTable& specs, const std::string& id) {
  auto it = std::find_if(specs.begin(), specs.end(),
                         [&](const DomainParamSpec& s) { return s.id == id; });
  if (it == specs.end()) throw Error("no nominal spec for '" + id + "'");
  return *it;
}

}  // namespace

DomainParams sample_domain(const DistrSpace& space, const DomainDistrParams& phi,
                           const DomainSpecTable& specs, Rng& rng) {
  check_in_box(space, phi);
  DomainParams xi = nominal_domain(specs);
  for (const auto& e : phi.entries) {
    const auto& spec = spec_for(specs, e.id);
    double value = e.mean;
    if (e.variance > 0.0) {
      if (e.family == Family::normal) {
        value = e.mean + std::sqrt(e.variance) * standard_normal(rng);
      } else {
        const double half_width = std::sqrt(3.0 * e.variance);
        value = uniform(rng, e.mean - half_width, e.mean + half_width);
      }
    }
    xi.set(e.id, std::clamp(value, spec.clamp_lo, spec.clamp_hi));
  }
  return xi;
}

DomainDistrParams random_phi(const DistrSpace& space, Rng& rng) {
  const auto& box = space.box();
  Eigen::VectorXd v(space.dim());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = uniform(rng, box.lower[i], box.upper[i]);
  return DomainDistrParams::from_vector(space, v);
}

Eigen::VectorXd normalize_phi(const Box& box, const Eigen::VectorXd& phi) {
  if (phi.size() != box.dim()) {
    throw DimensionMismatch("phi", static_cast<std::size_t>(box.dim()),
                            static_cast<std::size_t>(phi.size()));
  }
  Eigen::VectorXd u(phi.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double w = box.upper[i] - box.lower[i];
    u[i] = w > 0.0 ? (phi[i] - box.lower[i]) / w : 0.0;
  }
  return u;
}

Eigen::VectorXd denormalize_phi(const Box& box, const Eigen::VectorXd& unit) {
  if (unit.size() != box.dim()) {
    throw DimensionMismatch("unit vector", static_cast<std::size_t>(box.dim()),
                            static_cast<std::size_t>(unit.size()));
  }
  Eigen::VectorXd phi(unit.size());
  for (Eigen::Index i = 0; i < phi.size(); ++i) {
    const double w = box.upper[i] - box.lower[i];
    phi[i] = std::clamp(box.lower[i] + unit[i] * w, box.lower[i], box.upper[i]);
  }
  return phi;
}

DomainSampler::DomainSampler(DistrSpace space, DomainDistrParams phi,
                             DomainSpecTable specs)
    : space_(std::move(space)), phi_(std::move(phi)), specs_(std::move(specs)) {
  check_in_box(*space_, phi_);
}

DomainSampler::DomainSampler(DomainParams fixed) : fixed_(std::move(fixed)) {}

DomainParams DomainSampler::sample(Rng& rng) const {
  if (!space_) return fixed_;
  return sample_domain(*space_, phi_, specs_, rng);
}

}  // namespace bayrn
