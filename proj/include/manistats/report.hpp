#pragma once

#include <string>
#include <vector>

#include "manistats/inference.hpp"
#include "manistats/smeary.hpp"

namespace manistats {

// Deterministic shortest-roundtrip formatting, used everywhere a number
// reaches a file so that identical runs produce identical bytes.
std::string format_double(double v);

// Writes content to path atomically (temp file in the same directory, then
// rename). Creates parent directories. Throws IoError on failure.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

// "key: value" document writer with two-space nesting and bracketed lists.
class TextReport {
 public:
  void scalar(const std::string& key, const std::string& value);
  void scalar(const std::string& key, double value);
  void scalar(const std::string& key, long long value);
  void boolean(const std::string& key, bool value);
  void list(const std::string& key, const std::vector<double>& values);
  void section(const std::string& key);  // subsequent keys indent one level
  void end_section();
  std::string str() const { return body_; }

 private:
  std::string body_;
  int indent_ = 0;
};

// CSV schema: n, m_hat, std_err, B, V, seed
std::string modulation_curve_csv(const ModulationCurve& curve);

// CSV schema: scenario, method, alpha, n_sims, rejection_fraction, std_err, seed
std::string power_reports_csv(const std::vector<PowerReport>& reports);

std::string test_results_csv(const std::vector<TestResult>& results);

std::string matrix_csv(const Eigen::MatrixXd& m);

// one row per configuration: the 2k ambient coordinates
std::string points_csv(const std::vector<ManifoldPoint>& points);

// Fixed-width rendering of power reports, one row per (scenario, method).
std::string render_power_table(const std::vector<PowerReport>& reports);

// Parses rows written by power_reports_csv (used by the print-table command).
std::vector<PowerReport> parse_power_csv(const std::string& content);

}  // namespace manistats
