#include "napood/score_csv.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "napood/errors.hpp"
#include "napood/tensor_io.hpp"
#include "napood/text.hpp"

namespace napood {

std::string format_score_csv(std::span<const ScoredSample> scores) {
  std::vector<ScoredSample> rows(scores.begin(), scores.end());
  std::sort(rows.begin(), rows.end(),
            [](const ScoredSample& a, const ScoredSample& b) { return a.sample_id < b.sample_id; });
  std::ostringstream out;
  out << "sample_id,score\n";
  for (const auto& r : rows) {
    if (r.sample_id.find_first_of(",\n\r") != std::string::npos) {
      throw DataError("sample_id '" + r.sample_id + "' cannot be written to CSV");
    }
    if (!std::isfinite(r.score)) throw DataError("non-finite score for '" + r.sample_id + "'");
    out << r.sample_id << ',' << format_double(r.score) << '\n';
  }
  return out.str();
}

std::vector<ScoredSample> parse_score_csv(std::string_view text, std::string_view origin) {
  std::vector<ScoredSample> out;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const std::string where = std::string(origin) + ":" + std::to_string(line_no) + ": ";
    if (!header_seen) {
      if (line != "sample_id,score") throw FormatError(where + "expected header 'sample_id,score'");
      header_seen = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
      throw FormatError(where + "expected two columns");
    }
    ScoredSample s;
    s.sample_id = std::string(line.substr(0, comma));
    if (s.sample_id.empty()) throw FormatError(where + "empty sample_id");
    try {
      s.score = parse_double(line.substr(comma + 1));
    } catch (const FormatError& e) {
      throw FormatError(where + e.what());
    }
    if (!std::isfinite(s.score)) throw DataError(where + "non-finite score");
    if (!seen.insert(s.sample_id).second) throw DataError(where + "duplicate sample_id '" + s.sample_id + "'");
    out.push_back(std::move(s));
  }
  if (!header_seen) throw FormatError(std::string(origin) + ": empty score file");
  return out;
}

void write_score_csv(const std::filesystem::path& path, std::span<const ScoredSample> scores) {
  write_file_text(path, format_score_csv(scores));
}

std::vector<ScoredSample> read_score_csv(const std::filesystem::path& path) {
  return parse_score_csv(read_file_text(path), path.string());
}

}  // namespace napood
