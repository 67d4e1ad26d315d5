#include "manistats/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace manistats {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[64];
  // shortest representation that round-trips a double
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) return buf;
  }
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  fs::path target(path);
  std::error_code ec;
  if (target.has_parent_path()) {
    fs::create_directories(target.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + target.parent_path().string());
  }
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename temporary file onto " + path);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void TextReport::scalar(const std::string& key, const std::string& value) {
  body_.append(static_cast<std::size_t>(2 * indent_), ' ');
  body_ += key + ": " + value + "\n";
}

void TextReport::scalar(const std::string& key, double value) {
  scalar(key, format_double(value));
}

void TextReport::scalar(const std::string& key, long long value) {
  scalar(key, std::to_string(value));
}

void TextReport::boolean(const std::string& key, bool value) {
  scalar(key, std::string(value ? "true" : "false"));
}

void TextReport::list(const std::string& key,
                      const std::vector<double>& values) {
  std::string line = key + ": [";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) line += ", ";
    line += format_double(values[i]);
  }
  line += "]";
  body_.append(static_cast<std::size_t>(2 * indent_), ' ');
  body_ += line + "\n";
}

void TextReport::section(const std::string& key) {
  body_.append(static_cast<std::size_t>(2 * indent_), ' ');
  body_ += key + ":\n";
  ++indent_;
}

void TextReport::end_section() {
  if (indent_ > 0) --indent_;
}

std::string modulation_curve_csv(const ModulationCurve& curve) {
  std::string out = "n,m_hat,std_err,B,V,seed\n";
  for (std::size_t i = 0; i < curve.sample_sizes.size(); ++i) {
    out += std::to_string(curve.sample_sizes[i]) + "," +
           format_double(curve.m_hat[i]) + "," +
           format_double(curve.std_err[i]) + "," +
           std::to_string(curve.replicates) + "," +
           format_double(curve.population_variance) + "," +
           std::to_string(curve.seed) + "\n";
  }
  return out;
}

std::string power_reports_csv(const std::vector<PowerReport>& reports) {
  std::string out =
      "scenario,method,alpha,n_sims,rejection_fraction,std_err,seed\n";
  for (const auto& r : reports) {
    out += r.scenario + "," + method_name(r.method) + "," +
           format_double(r.alpha) + "," + std::to_string(r.n_simulations) +
           "," + format_double(r.rejection_fraction) + "," +
           format_double(r.std_err) + "," + std::to_string(r.seed) + "\n";
  }
  return out;
}

std::string test_results_csv(const std::vector<TestResult>& results) {
  std::string out =
      "method,statistic,threshold,p_value,reject,alpha,n1,n2,bootstrap_reps,"
      "seed\n";
  for (const auto& r : results) {
    out += method_name(r.method) + "," + format_double(r.statistic) + "," +
           format_double(r.threshold) + "," + format_double(r.p_value) + "," +
           (r.reject ? "1" : "0") + "," + format_double(r.alpha) + "," +
           std::to_string(r.n1) + "," + std::to_string(r.n2) + "," +
           std::to_string(r.bootstrap_reps) + "," + std::to_string(r.seed) +
           "\n";
  }
  return out;
}

std::string matrix_csv(const Eigen::MatrixXd& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ",";
      out += format_double(m(i, j));
    }
    out += "\n";
  }
  return out;
}

std::string points_csv(const std::vector<ManifoldPoint>& points) {
  std::string out;
  for (const auto& p : points) {
    for (Eigen::Index j = 0; j < p.coords.size(); ++j) {
      if (j) out += ",";
      out += format_double(p.coords[j]);
    }
    out += "\n";
  }
  return out;
}

std::string render_power_table(const std::vector<PowerReport>& reports) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof(line), "%-32s %-10s %8s %8s %10s\n", "scenario",
                "method", "n_sims", "alpha", "rejected");
  os << line;
  os << std::string(72, '-') << "\n";
  for (const auto& r : reports) {
    std::snprintf(line, sizeof(line), "%-32s %-10s %8d %8.3f %10.3f\n",
                  r.scenario.c_str(), method_name(r.method).c_str(),
                  r.n_simulations, r.alpha, r.rejection_fraction);
    os << line;
  }
  return os.str();
}

std::vector<PowerReport> parse_power_csv(const std::string& content) {
  std::vector<PowerReport> out;
  std::istringstream in(content);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("scenario,", 0) == 0) continue;
    }
    std::istringstream row(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != 7) {
      throw IoError("malformed power CSV row: " + line);
    }
    PowerReport r;
    r.scenario = fields[0];
    r.method =
        fields[1] == "bootstrap" ? TestMethod::Bootstrap : TestMethod::Quantile;
    r.alpha = std::stod(fields[2]);
    r.n_simulations = std::stoi(fields[3]);
    r.rejection_fraction = std::stod(fields[4]);
    r.std_err = std::stod(fields[5]);
    r.seed = std::stoull(fields[6]);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace manistats
