#include "napood/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "napood/errors.hpp"
#include "napood/parallel.hpp"
#include "napood/scoring.hpp"
#include "napood/text.hpp"

namespace napood {

std::vector<ChannelStatRow> channel_stats(const Dataset& ds, std::string_view layer, double min_mean,
                                          std::size_t threads) {
  const bool known = std::any_of(ds.records.begin(), ds.records.end(),
                                 [&](const SampleRecord& r) { return r.has_activation(layer); });
  if (!ds.records.empty() && !known) {
    throw ArgumentError("unknown layer tag '" + std::string(layer) + "'");
  }

  std::vector<std::vector<ChannelStatRow>> per_sample(ds.records.size());
  parallel_for(ds.records.size(), threads, [&](std::size_t i) {
    const auto& r = ds.records[i];
    if (!r.has_activation(layer)) {
      throw DataError("sample '" + r.sample_id + "' lacks layer '" + std::string(layer) + "'");
    }
    const auto a = ActivationTensor::from(r.activation(layer));
    for (std::size_t j = 0; j < a.channels(); ++j) {
      const double mean = channel_mean(a, j);
      if (mean < min_mean) continue;
      per_sample[i].push_back({r.sample_id, r.label, std::string(layer), j, mean, channel_max(a, j)});
    }
  });

  std::vector<ChannelStatRow> rows;
  for (auto& v : per_sample) {
    rows.insert(rows.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ChannelStatRow& a, const ChannelStatRow& b) {
    return a.sample_id != b.sample_id ? a.sample_id < b.sample_id : a.channel < b.channel;
  });
  return rows;
}

double histogram_edge(std::size_t i, std::size_t bins, double lo, double hi) {
  if (i >= bins) return hi;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
}

Histogram score_histogram(std::span<const double> scores, std::size_t bins, double lo, double hi) {
  if (bins < 1) throw ArgumentError("histogram needs at least one bin");
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw ArgumentError("histogram range must satisfy lo < hi");
  }
  Histogram h;
  h.bins.resize(bins);
  for (std::size_t i = 0; i < bins; ++i) {
    h.bins[i].lo = histogram_edge(i, bins, lo, hi);
    h.bins[i].hi = histogram_edge(i + 1, bins, lo, hi);
  }
  for (double s : scores) {
    if (std::isnan(s)) throw DataError("NaN score in histogram input");
    if (s < lo) {
      ++h.below;
      continue;
    }
    if (s > hi) {
      ++h.above;
      continue;
    }
    const double pos = (s - lo) / (hi - lo) * static_cast<double>(bins);
    auto idx = static_cast<std::size_t>(std::min(std::floor(pos), static_cast<double>(bins - 1)));
    // Reconcile the arithmetic index with the published edges.
    while (idx > 0 && s < h.bins[idx].lo) --idx;
    while (idx + 1 < bins && s >= h.bins[idx + 1].lo) ++idx;
    ++h.bins[idx].count;
  }
  return h;
}

std::string channel_stats_csv(std::span<const ChannelStatRow> rows) {
  std::ostringstream out;
  out << "sample_id,label,layer,channel,mean,max\n";
  for (const auto& r : rows) {
    out << r.sample_id << ',' << to_string(r.label) << ',' << r.layer << ',' << r.channel << ','
        << format_double(r.mean) << ',' << format_double(r.max) << '\n';
  }
  return out.str();
}

std::string histogram_csv(const Histogram& h) {
  std::ostringstream out;
  out << "bin_lo,bin_hi,count\n";
  for (const auto& b : h.bins) {
    out << format_double(b.lo) << ',' << format_double(b.hi) << ',' << b.count << '\n';
  }
  return out.str();
}

}  // namespace napood
