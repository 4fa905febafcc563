#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace jmgh {

// Thrown for malformed user input (files, configs, CLI arguments); maps to
// exit code 1 at the CLI. Numeric failures map to exit code 2.
struct validation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class CensorStatus { Exact, Right, Left, Interval };

const char* censor_status_name(CensorStatus s);
CensorStatus censor_status_from_string(const std::string& s);

struct EventRecord {
  double time = 0.0;        // event / censoring time, or left end for interval
  double time_right = 0.0;  // right end for interval censoring
  CensorStatus status = CensorStatus::Exact;
  int cause = 0;  // index into the model's cause list (0 for single risk)
};

struct Subject {
  std::string id;
  std::map<std::string, double> covariates;
  std::vector<double> obs_times;
  std::vector<double> obs_values;
  EventRecord event;
};

struct JointDataset {
  std::vector<Subject> subjects;
  std::vector<std::string> cause_labels;  // index -> label, e.g. {"event"} or {"ISC","UAE"}

  int n() const { return static_cast<int>(subjects.size()); }
  void validate() const;
};

// CSV persistence (RFC 4180, header row required).
// Longitudinal table: subject_id,time,outcome
// Survival table:     subject_id,time[,time_right],status,cause,<covariates...>
void write_dataset_csv(const JointDataset& data, const std::string& longitudinal_path,
                       const std::string& survival_path);
JointDataset read_dataset_csv(const std::string& longitudinal_path,
                              const std::string& survival_path);

// FNV-1a content hash of the two dataset files, used to guard model comparison.
std::string dataset_hash(const std::string& longitudinal_path, const std::string& survival_path);

}  // namespace jmgh
