#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "napood/metrics.hpp"

namespace napood {

/// `sample_id,score` with 17 significant digits, rows sorted by sample_id.
std::string format_score_csv(std::span<const ScoredSample> scores);
std::vector<ScoredSample> parse_score_csv(std::string_view text, std::string_view origin = "<memory>");

void write_score_csv(const std::filesystem::path& path, std::span<const ScoredSample> scores);
std::vector<ScoredSample> read_score_csv(const std::filesystem::path& path);

}  // namespace napood
