#include "jmgh/data.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace jmgh {

namespace {

// Minimal RFC 4180 reader/writer. UTF-8 passthrough; quotes honoured.
std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot open file: " + path);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  char ch;
  bool any = false;
  while (in.get(ch)) {
    any = true;
    if (quoted) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get(ch);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (ch == '\n') {
      if (!field.empty() && field.back() == '\r') field.pop_back();
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
    } else {
      field += ch;
    }
  }
  if (!field.empty() || !row.empty()) {
    if (!field.empty() && field.back() == '\r') field.pop_back();
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  if (!any || rows.empty()) throw validation_error("empty CSV file: " + path);
  return rows;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw validation_error("cannot parse number '" + s + "' in " + what);
  }
}

int find_column(const std::vector<std::string>& header, const std::string& name,
                const std::string& path, bool required = true) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    if (required) throw validation_error(path + ": missing required column '" + name + "'");
    return -1;
  }
  return static_cast<int>(it - header.begin());
}

}  // namespace

void write_dataset_csv(const JointDataset& data, const std::string& longitudinal_path,
                       const std::string& survival_path) {
  // Covariate column set: union over subjects, sorted for stable output.
  std::vector<std::string> covs;
  for (const auto& s : data.subjects)
    for (const auto& [k, v] : s.covariates)
      if (std::find(covs.begin(), covs.end(), k) == covs.end()) covs.push_back(k);
  std::sort(covs.begin(), covs.end());

  std::ofstream lf(longitudinal_path, std::ios::binary);
  if (!lf) throw validation_error("cannot write file: " + longitudinal_path);
  lf << "subject_id,time,outcome\r\n";
  for (const auto& s : data.subjects)
    for (size_t j = 0; j < s.obs_times.size(); ++j)
      lf << csv_escape(s.id) << ',' << fmt(s.obs_times[j]) << ',' << fmt(s.obs_values[j]) << "\r\n";

  std::ofstream sf(survival_path, std::ios::binary);
  if (!sf) throw validation_error("cannot write file: " + survival_path);
  sf << "subject_id,time,time_right,status,cause";
  for (const auto& c : covs) sf << ',' << csv_escape(c);
  sf << "\r\n";
  for (const auto& s : data.subjects) {
    const std::string cause = data.cause_labels.empty()
                                  ? "event"
                                  : data.cause_labels[static_cast<size_t>(s.event.cause)];
    sf << csv_escape(s.id) << ',' << fmt(s.event.time) << ','
       << (s.event.status == CensorStatus::Interval ? fmt(s.event.time_right) : std::string())
       << ',' << censor_status_name(s.event.status) << ',' << csv_escape(cause);
    for (const auto& c : covs) {
      auto it = s.covariates.find(c);
      sf << ',' << (it == s.covariates.end() ? std::string() : fmt(it->second));
    }
    sf << "\r\n";
  }
}

JointDataset read_dataset_csv(const std::string& longitudinal_path,
                              const std::string& survival_path) {
  JointDataset data;
  const auto srows = read_csv(survival_path);
  const auto& sh = srows[0];
  const int c_id = find_column(sh, "subject_id", survival_path);
  const int c_time = find_column(sh, "time", survival_path);
  const int c_tr = find_column(sh, "time_right", survival_path, false);
  const int c_status = find_column(sh, "status", survival_path);
  const int c_cause = find_column(sh, "cause", survival_path, false);
  std::vector<int> cov_cols;
  for (size_t k = 0; k < sh.size(); ++k) {
    const int ki = static_cast<int>(k);
    if (ki != c_id && ki != c_time && ki != c_tr && ki != c_status && ki != c_cause)
      cov_cols.push_back(ki);
  }

  std::map<std::string, int> index_of;
  for (size_t r = 1; r < srows.size(); ++r) {
    const auto& row = srows[r];
    if (row.size() != sh.size())
      throw validation_error(survival_path + ": row " + std::to_string(r + 1) + " has " +
                             std::to_string(row.size()) + " fields, expected " +
                             std::to_string(sh.size()));
    Subject s;
    s.id = row[static_cast<size_t>(c_id)];
    s.event.time = parse_double(row[static_cast<size_t>(c_time)], survival_path);
    s.event.status = censor_status_from_string(row[static_cast<size_t>(c_status)]);
    if (s.event.status == CensorStatus::Interval) {
      if (c_tr < 0 || row[static_cast<size_t>(c_tr)].empty())
        throw validation_error(survival_path + ": interval record without time_right");
      s.event.time_right = parse_double(row[static_cast<size_t>(c_tr)], survival_path);
    }
    std::string cause = c_cause >= 0 ? row[static_cast<size_t>(c_cause)] : "event";
    if (cause.empty()) cause = "event";
    auto it = std::find(data.cause_labels.begin(), data.cause_labels.end(), cause);
    if (it == data.cause_labels.end()) {
      data.cause_labels.push_back(cause);
      s.event.cause = static_cast<int>(data.cause_labels.size()) - 1;
    } else {
      s.event.cause = static_cast<int>(it - data.cause_labels.begin());
    }
    for (int kc : cov_cols) {
      const auto& cell = row[static_cast<size_t>(kc)];
      if (!cell.empty()) s.covariates[sh[static_cast<size_t>(kc)]] = parse_double(cell, survival_path);
    }
    if (index_of.count(s.id)) throw validation_error("duplicate subject_id: " + s.id);
    index_of[s.id] = static_cast<int>(data.subjects.size());
    data.subjects.push_back(std::move(s));
  }

  const auto lrows = read_csv(longitudinal_path);
  const auto& lh = lrows[0];
  const int l_id = find_column(lh, "subject_id", longitudinal_path);
  const int l_time = find_column(lh, "time", longitudinal_path);
  const int l_out = find_column(lh, "outcome", longitudinal_path);
  for (size_t r = 1; r < lrows.size(); ++r) {
    const auto& row = lrows[r];
    if (row.size() != lh.size())
      throw validation_error(longitudinal_path + ": row " + std::to_string(r + 1) +
                             " has wrong field count");
    const auto& id = row[static_cast<size_t>(l_id)];
    auto it = index_of.find(id);
    if (it == index_of.end())
      throw validation_error(longitudinal_path + ": subject '" + id + "' not in survival table");
    auto& s = data.subjects[static_cast<size_t>(it->second)];
    s.obs_times.push_back(parse_double(row[static_cast<size_t>(l_time)], longitudinal_path));
    s.obs_values.push_back(parse_double(row[static_cast<size_t>(l_out)], longitudinal_path));
  }

  data.validate();
  return data;
}

std::string dataset_hash(const std::string& longitudinal_path, const std::string& survival_path) {
  uint64_t h = 1469598103934665603ull;
  for (const std::string& path : {longitudinal_path, survival_path}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw validation_error("cannot open file: " + path);
    char c;
    while (in.get(c)) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

}  // namespace jmgh
