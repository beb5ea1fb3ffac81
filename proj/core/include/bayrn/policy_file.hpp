#pragma once

#include <cstdint>
#include <string>

#include "bayrn/policies.hpp"

namespace bayrn {

/// Plain-text policy file:
///
///   bayrn-policy 1
///   kind <energy_balance|rbf>
///   dim <n>
///   eval_seed <seed>
///   n_tau <rollouts>
///   values
///   <n lines, one number each>
struct PolicyFile {
  PolicyParams params;
  std::uint64_t eval_seed = 0;
  std::size_t n_tau = 1;

  bool operator==(const PolicyFile&) const = default;
};

std::string format_policy_file(const PolicyFile& file);
PolicyFile parse_policy_file(const std::string& text);

void save_policy_file(const PolicyFile& file, const std::string& path);
PolicyFile load_policy_file(const std::string& path);

}  // namespace bayrn
