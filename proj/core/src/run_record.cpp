#include "bayrn/run_record.hpp"

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "bayrn/errors.hpp"

namespace bayrn {

using nlohmann::json;

namespace {

json vec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd to_vec(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::string line(const json& j) { return j.dump(); }

}  // namespace

std::string to_json_line(const StartEvent& e) {
  json j;
  j["event"] = "start";
  j["mode"] = e.mode;
  j["environment"] = e.environment;
  j["seed"] = e.seed;
  j["coordinates"] = e.coordinates;
  j["lower"] = vec(e.lower);
  j["upper"] = vec(e.upper);
  j["n_init"] = e.n_init;
  j["n_iter_max"] = e.n_iter_max;
  j["n_tau"] = e.n_tau;
  // JSON has no infinity; null means "never succeeds early"
  if (std::isfinite(e.success_threshold)) {
    j["success_threshold"] = e.success_threshold;
  } else {
    j["success_threshold"] = nullptr;
  }
  return line(j);
}

std::string to_json_line(const CandidateEvent& e) {
  json j;
  j["event"] = e.event;
  j["index"] = e.index;
  j["phi"] = vec(e.phi);
  if (e.acquisition) j["acquisition"] = *e.acquisition;
  j["train_seed"] = e.train_seed;
  j["eval_seed"] = e.eval_seed;
  j["retrained"] = e.retrained;
  j["theta"] = e.theta;
  j["j_sim"] = e.j_sim;
  j["j_hat"] = e.j_hat;
  j["target_returns"] = e.target_returns;
  json curve = json::array();
  for (const auto& g : e.curve) {
    curve.push_back({{"generation", g.generation}, {"best", g.best_return}, {"mean", g.mean_return}});
  }
  j["curve"] = std::move(curve);
  return line(j);
}

std::string to_json_line(const FinalEvent& e) {
  json j;
  j["event"] = "final";
  if (e.phi_star) j["phi_star"] = vec(*e.phi_star);
  j["policy_kind"] = e.policy_kind;
  j["theta"] = e.theta;
  j["train_seed"] = e.train_seed;
  j["eval_seed"] = e.eval_seed;
  j["j_sim"] = e.j_sim;
  j["j_hat"] = e.j_hat;
  j["target_returns"] = e.target_returns;
  j["dataset_size"] = e.dataset_size;
  j["iterations"] = e.iterations;
  if (e.gp) {
    j["gp"] = {{"signal_var", e.gp->signal_var},
               {"lengthscales", vec(e.gp->lengthscales)},
               {"noise_var", e.gp->noise_var}};
  }
  return line(j);
}

std::string error_json_line(const std::string& message) {
  return line(json{{"event", "error"}, {"message", message}});
}

RunRecord read_run_record(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open run record '" + path + "'");
  RunRecord rec;
  bool have_start = false;
  std::string text;
  std::size_t lineno = 0;
  while (std::getline(in, text)) {
    ++lineno;
    if (text.empty()) continue;
    try {
      const json j = json::parse(text);
      const auto event = j.at("event").get<std::string>();
      if (event == "start") {
        auto& s = rec.start;
        s.mode = j.at("mode").get<std::string>();
        s.environment = j.at("environment").get<std::string>();
        s.seed = j.at("seed").get<std::uint64_t>();
        s.coordinates = j.at("coordinates").get<std::vector<std::string>>();
        s.lower = to_vec(j.at("lower"));
        s.upper = to_vec(j.at("upper"));
        s.n_init = j.at("n_init").get<std::size_t>();
        s.n_iter_max = j.at("n_iter_max").get<std::size_t>();
        s.n_tau = j.at("n_tau").get<std::size_t>();
        const auto& t = j.at("success_threshold");
        s.success_threshold = t.is_null() ? std::numeric_limits<double>::infinity() : t.get<double>();
        have_start = true;
      } else if (event == "final") {
        FinalEvent f;
        if (j.contains("phi_star")) f.phi_star = to_vec(j.at("phi_star"));
        f.policy_kind = j.at("policy_kind").get<std::string>();
        f.theta = j.at("theta").get<std::vector<double>>();
        f.train_seed = j.at("train_seed").get<std::uint64_t>();
        f.eval_seed = j.at("eval_seed").get<std::uint64_t>();
        f.j_sim = j.at("j_sim").get<double>();
        f.j_hat = j.at("j_hat").get<double>();
        f.target_returns = j.at("target_returns").get<std::vector<double>>();
        f.dataset_size = j.at("dataset_size").get<std::size_t>();
        f.iterations = j.at("iterations").get<std::size_t>();
        if (j.contains("gp")) {
          GpHyperparams h;
          h.signal_var = j["gp"].at("signal_var").get<double>();
          h.lengthscales = to_vec(j["gp"].at("lengthscales"));
          h.noise_var = j["gp"].at("noise_var").get<double>();
          f.gp = h;
        }
        rec.final = std::move(f);
      } else if (event == "error") {
        rec.error = j.at("message").get<std::string>();
      } else {
        CandidateEvent c;
        c.event = event;
        c.index = j.at("index").get<std::size_t>();
        c.phi = to_vec(j.at("phi"));
        if (j.contains("acquisition")) c.acquisition = j.at("acquisition").get<double>();
        c.train_seed = j.at("train_seed").get<std::uint64_t>();
        c.eval_seed = j.at("eval_seed").get<std::uint64_t>();
        c.retrained = j.at("retrained").get<bool>();
        c.theta = j.at("theta").get<std::vector<double>>();
        c.j_sim = j.at("j_sim").get<double>();
        c.j_hat = j.at("j_hat").get<double>();
        c.target_returns = j.at("target_returns").get<std::vector<double>>();
        for (const auto& g : j.at("curve")) {
          c.curve.push_back({g.at("generation").get<std::size_t>(), g.at("best").get<double>(),
                             g.at("mean").get<double>()});
        }
        rec.candidates.push_back(std::move(c));
      }
    } catch (const json::exception& e) {
      throw Error(path + ":" + std::to_string(lineno) + ": malformed run record: " + e.what());
    }
  }
  if (!have_start) throw Error(path + ": run record has no start event");
  return rec;
}

BoDataset dataset_from_record(const RunRecord& record) {
  BoDataset data(Box{record.start.lower, record.start.upper});
  for (const auto& c : record.candidates) {
    if (c.event == "init-candidate" || c.event == "bo-iteration") data.add(c.phi, c.j_hat);
  }
  return data;
}

RunRecordWriter::RunRecordWriter(const std::string& path, bool append)
    : out_(path, append ? std::ios::app : std::ios::trunc) {
  if (!out_) throw Error("cannot open run record '" + path + "' for writing");
}

void RunRecordWriter::write(const std::string& line) {
  if (!out_.is_open()) return;
  out_ << line << '\n';
  out_.flush();
  if (!out_) throw Error("run record write failed");
}

}  // namespace bayrn
