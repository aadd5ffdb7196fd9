#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "rlgan/agent/evaluate.hpp"
#include "rlgan/agent/trainer.hpp"

namespace rlgan::cli {

inline constexpr const char* kMetricsHeader = "wall_time_s,frames,updates,mean_reward,std_reward,episodes";
inline constexpr const char* kReportHeader = "checkpoint,episodes,mean,frames,scores";

// Appends rows; the header is written only when the file is new or empty.
void write_metrics(std::span<const agent::MetricsRecord> records, const std::filesystem::path& path);
std::vector<agent::MetricsRecord> read_metrics(const std::filesystem::path& path);

// Same convention; scores are ';'-separated.
void write_reports(std::span<const agent::EvalReport> reports, const std::filesystem::path& path);

}  // namespace rlgan::cli
