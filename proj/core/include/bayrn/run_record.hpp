#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bayrn/gp.hpp"
#include "bayrn/polopt.hpp"

namespace bayrn {

// A run record is a JSON-lines file with one object per event:
//   start           run mode, seed, search box
//   init-candidate  one initial random phi, trained and evaluated
//   bo-iteration    one acquisition step, trained and evaluated
//   final           phi*, the final policy and its target return
//   error           written when a run aborts; a resumed run drops it

struct StartEvent {
  std::string mode;  ///< "bayrn", "udr" or "nominal"
  std::string environment;
  std::uint64_t seed = 0;
  std::vector<std::string> coordinates;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  std::size_t n_init = 0;
  std::size_t n_iter_max = 0;
  std::size_t n_tau = 0;
  double success_threshold = 0.0;
};

struct CandidateEvent {
  std::string event;  ///< "init-candidate", "bo-iteration" or "udr-candidate"
  std::size_t index = 0;
  Eigen::VectorXd phi;
  std::optional<double> acquisition;  ///< EI at phi (bo-iteration only)
  std::uint64_t train_seed = 0;
  std::uint64_t eval_seed = 0;
  bool retrained = false;
  std::vector<double> theta;
  double j_sim = 0.0;
  double j_hat = 0.0;
  std::vector<double> target_returns;
  std::vector<GenerationStats> curve;
};

struct FinalEvent {
  std::optional<Eigen::VectorXd> phi_star;
  std::string policy_kind;
  std::vector<double> theta;
  std::uint64_t train_seed = 0;
  std::uint64_t eval_seed = 0;
  double j_sim = 0.0;
  double j_hat = 0.0;
  std::vector<double> target_returns;
  std::size_t dataset_size = 0;
  std::size_t iterations = 0;
  std::optional<GpHyperparams> gp;
};

struct RunRecord {
  StartEvent start;
  std::vector<CandidateEvent> candidates;
  std::optional<FinalEvent> final;
  std::optional<std::string> error;
};

std::string to_json_line(const StartEvent& e);
std::string to_json_line(const CandidateEvent& e);
std::string to_json_line(const FinalEvent& e);
std::string error_json_line(const std::string& message);

/// Parses a run record file. Throws Error on malformed content.
RunRecord read_run_record(const std::string& path);

/// Dataset of all evaluated candidates (init and BO events) in the record's box.
BoDataset dataset_from_record(const RunRecord& record);

/// Append-only line writer that flushes after every record.
class RunRecordWriter {
 public:
  RunRecordWriter() = default;
  /// Opens `path`, truncating unless `append`.
  RunRecordWriter(const std::string& path, bool append);

  bool is_open() const { return out_.is_open(); }
  void write(const std::string& line);

 private:
  std::ofstream out_;
};

}  // namespace bayrn
