#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace napood {

struct ScoredSample {
  std::string sample_id;
  double score = 0.0;

  bool operator==(const ScoredSample&) const = default;
};

/// Higher score means more ID-like throughout.
struct ScoreSet {
  std::vector<ScoredSample> id;
  std::vector<ScoredSample> ood;
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;

  bool operator==(const RocPoint&) const = default;
};

struct EvalReport {
  double fpr95 = 0.0;  // FPR at tpr_target
  double auroc = 0.0;
  std::size_t n_id = 0;
  std::size_t n_ood = 0;
  double tpr_target = 0.95;
  std::vector<RocPoint> roc_points;
};

inline constexpr double kDefaultTprTarget = 0.95;

std::vector<double> scores_of(std::span<const ScoredSample> samples);

/// Mann-Whitney estimate of P(id > ood) + 0.5 * P(id == ood), O(n log n).
double auroc(std::span<const double> id, std::span<const double> ood);
double auroc(const ScoreSet& s);

/// Threshold t is the largest score with |{id >= t}| >= ceil(tpr_target * n_id);
/// returns |{ood >= t}| / n_ood.
double fpr_at_tpr(std::span<const double> id, std::span<const double> ood,
                  double tpr_target = kDefaultTprTarget);
double fpr_at_tpr(const ScoreSet& s, double tpr_target = kDefaultTprTarget);

/// One point per distinct threshold in descending order, from (0,0) to (1,1).
/// Samples sharing a score move together, so trapezoids reproduce auroc().
std::vector<RocPoint> roc_curve(std::span<const double> id, std::span<const double> ood);

EvalReport evaluate(const ScoreSet& s, double tpr_target = kDefaultTprTarget);

/// JSON object with fpr95, auroc, n_id, n_ood, tpr_target and roc_points as [fpr, tpr] pairs.
std::string report_to_json(const EvalReport& report, bool include_roc = true);
/// CSV `fpr,tpr`.
std::string roc_to_csv(std::span<const RocPoint> points);

}  // namespace napood
