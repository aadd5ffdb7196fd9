#include "rlgan/cli/metrics.hpp"

#include <fstream>
#include <sstream>

#include "rlgan/errors.hpp"

namespace rlgan::cli {

namespace {

std::ofstream open_append(const std::filesystem::path& path, const char* header) {
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
  std::ofstream os(path, std::ios::app);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os.precision(17);
  if (fresh) os << header << '\n';
  return os;
}

}  // namespace

void write_metrics(std::span<const agent::MetricsRecord> records, const std::filesystem::path& path) {
  auto os = open_append(path, kMetricsHeader);
  for (const auto& m : records)
    os << m.wall_time_s << ',' << m.frames << ',' << m.updates << ',' << m.mean_reward << ',' << m.std_reward
       << ',' << m.episodes << '\n';
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

std::vector<agent::MetricsRecord> read_metrics(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(is, line) || line != kMetricsHeader) throw std::runtime_error(path.string() + ": bad metrics header");
  std::vector<agent::MetricsRecord> out;
  while (std::getline(is, line)) {
    std::istringstream row(line);
    agent::MetricsRecord m;
    char c1, c2, c3, c4, c5;
    if (!(row >> m.wall_time_s >> c1 >> m.frames >> c2 >> m.updates >> c3 >> m.mean_reward >> c4 >> m.std_reward >>
          c5 >> m.episodes))
      throw std::runtime_error(path.string() + ": malformed metrics row '" + line + "'");
    out.push_back(m);
  }
  return out;
}

void write_reports(std::span<const agent::EvalReport> reports, const std::filesystem::path& path) {
  auto os = open_append(path, kReportHeader);
  for (const auto& r : reports) {
    os << r.checkpoint << ',' << r.episodes << ',' << r.mean << ',' << r.frames << ',';
    for (std::size_t i = 0; i < r.scores.size(); ++i) os << (i ? ";" : "") << r.scores[i];
    os << '\n';
  }
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace rlgan::cli
