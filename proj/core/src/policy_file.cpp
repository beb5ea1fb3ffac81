#include "bayrn/policy_file.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "bayrn/errors.hpp"

namespace bayrn {

namespace {

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <typename T>
T parse_number(const std::string& s, const std::string& what) {
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error("policy file: bad " + what + " '" + s + "'");
  }
  return v;
}

std::string expect_field(std::istream& in, const std::string& key) {
  std::string line;
  if (!std::getline(in, line)) throw Error("policy file: missing '" + key + "'");
  std::istringstream ls(line);
  std::string k, v, extra;
  ls >> k >> v;
  if (k != key || v.empty() || (ls >> extra)) throw Error("policy file: expected '" + key + " <value>'");
  return v;
}

}  // namespace

std::string format_policy_file(const PolicyFile& file) {
  std::ostringstream out;
  out << "bayrn-policy 1\n";
  out << "kind " << to_string(file.params.kind) << '\n';
  out << "dim " << file.params.values.size() << '\n';
  out << "eval_seed " << file.eval_seed << '\n';
  out << "n_tau " << file.n_tau << '\n';
  out << "values\n";
  for (Eigen::Index i = 0; i < file.params.values.size(); ++i) out << shortest(file.params.values[i]) << '\n';
  return out.str();
}

PolicyFile parse_policy_file(const std::string& text) {
  std::istringstream in(text);
  if (expect_field(in, "bayrn-policy") != "1") throw Error("policy file: unsupported version");
  PolicyFile f;
  f.params.kind = policy_kind_from_string(expect_field(in, "kind"));
  const auto dim = parse_number<std::size_t>(expect_field(in, "dim"), "dim");
  f.eval_seed = parse_number<std::uint64_t>(expect_field(in, "eval_seed"), "eval_seed");
  f.n_tau = parse_number<std::size_t>(expect_field(in, "n_tau"), "n_tau");
  std::string line;
  if (!std::getline(in, line) || line != "values") throw Error("policy file: expected 'values'");

  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const double v = parse_number<double>(line, "value");
    if (!std::isfinite(v)) throw Error("policy file: non-finite value");
    values.push_back(v);
  }
  if (values.size() != dim) throw DimensionMismatch("policy file values", dim, values.size());
  f.params.values = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(dim));
  return f;
}

void save_policy_file(const PolicyFile& file, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write policy file '" + path + "'");
  out << format_policy_file(file);
  if (!out) throw Error("write failed for '" + path + "'");
}

PolicyFile load_policy_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open policy file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_policy_file(ss.str());
}

}  // namespace bayrn
