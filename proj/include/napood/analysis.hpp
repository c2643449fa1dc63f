#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "napood/manifest.hpp"

namespace napood {

inline constexpr double kDefaultMinChannelMean = 0.1;

struct ChannelStatRow {
  std::string sample_id;
  SampleLabel label = SampleLabel::Id;
  std::string layer;
  std::size_t channel = 0;
  double mean = 0.0;
  double max = 0.0;
};

/// Per-(sample, channel) mean and max of one layer, keeping channels whose
/// mean is >= min_mean. Rows are sorted by (sample_id, channel).
std::vector<ChannelStatRow> channel_stats(const Dataset& ds, std::string_view layer,
                                          double min_mean = kDefaultMinChannelMean,
                                          std::size_t threads = 0);

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
};

/// Equal-width bins over [lo, hi]. Each bin is half-open [lo, hi) except the
/// last, which also takes scores equal to hi.
struct Histogram {
  std::vector<HistogramBin> bins;
  std::size_t below = 0;
  std::size_t above = 0;
};

Histogram score_histogram(std::span<const double> scores, std::size_t bins, double lo, double hi);

/// Left edge of bin i (i == bins gives hi).
double histogram_edge(std::size_t i, std::size_t bins, double lo, double hi);

/// `sample_id,label,layer,channel,mean,max`
std::string channel_stats_csv(std::span<const ChannelStatRow> rows);
/// `bin_lo,bin_hi,count`
std::string histogram_csv(const Histogram& h);

}  // namespace napood
