#include "napood/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

#include <json.hpp>

#include "napood/errors.hpp"
#include "napood/text.hpp"

namespace napood {
namespace {

void check_scores(std::span<const double> id, std::span<const double> ood) {
  if (id.empty() || ood.empty()) throw ArgumentError("metrics need non-empty ID and OOD score lists");
  for (double v : id) {
    if (!std::isfinite(v)) throw DataError("non-finite ID score");
  }
  for (double v : ood) {
    if (!std::isfinite(v)) throw DataError("non-finite OOD score");
  }
}

std::vector<double> sorted(std::span<const double> v) {
  std::vector<double> out(v.begin(), v.end());
  std::sort(out.begin(), out.end());
  return out;
}

// ceil(tpr * n), snapping values within 1e-9 of an integer onto it.
std::size_t required_positives(double tpr, std::size_t n) {
  const double x = tpr * static_cast<double>(n);
  const double r = std::round(x);
  const double c = std::abs(x - r) < 1e-9 ? r : std::ceil(x);
  return std::clamp<std::size_t>(static_cast<std::size_t>(c), 1, n);
}

}  // namespace

std::vector<double> scores_of(std::span<const ScoredSample> samples) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.score);
  return out;
}

double auroc(std::span<const double> id, std::span<const double> ood) {
  check_scores(id, ood);
  const auto ids = sorted(id);
  // Twice the U statistic stays integral with ties counted as one half.
  std::uint64_t twice_u = 0;
  for (double o : ood) {
    const auto lo = std::lower_bound(ids.begin(), ids.end(), o);
    const auto hi = std::upper_bound(lo, ids.end(), o);
    const auto greater = static_cast<std::uint64_t>(ids.end() - hi);
    const auto equal = static_cast<std::uint64_t>(hi - lo);
    twice_u += 2 * greater + equal;
  }
  return static_cast<double>(twice_u) /
         (2.0 * static_cast<double>(id.size()) * static_cast<double>(ood.size()));
}

double auroc(const ScoreSet& s) {
  return auroc(scores_of(s.id), scores_of(s.ood));
}

double fpr_at_tpr(std::span<const double> id, std::span<const double> ood, double tpr_target) {
  check_scores(id, ood);
  if (!(tpr_target > 0.0 && tpr_target <= 1.0)) throw ArgumentError("tpr_target must lie in (0, 1]");
  auto ids = sorted(id);
  const std::size_t need = required_positives(tpr_target, ids.size());
  const double threshold = ids[ids.size() - need];
  const auto oods = sorted(ood);
  const auto at_or_above = oods.end() - std::lower_bound(oods.begin(), oods.end(), threshold);
  return static_cast<double>(at_or_above) / static_cast<double>(oods.size());
}

double fpr_at_tpr(const ScoreSet& s, double tpr_target) {
  return fpr_at_tpr(scores_of(s.id), scores_of(s.ood), tpr_target);
}

std::vector<RocPoint> roc_curve(std::span<const double> id, std::span<const double> ood) {
  check_scores(id, ood);
  auto ids = sorted(id);
  auto oods = sorted(ood);
  std::reverse(ids.begin(), ids.end());
  std::reverse(oods.begin(), oods.end());

  const double n_id = static_cast<double>(ids.size());
  const double n_ood = static_cast<double>(oods.size());
  std::vector<RocPoint> points{{0.0, 0.0}};
  std::size_t i = 0;
  std::size_t o = 0;
  while (i < ids.size() || o < oods.size()) {
    double t;
    if (i == ids.size()) {
      t = oods[o];
    } else if (o == oods.size()) {
      t = ids[i];
    } else {
      t = std::max(ids[i], oods[o]);
    }
    while (i < ids.size() && ids[i] == t) ++i;
    while (o < oods.size() && oods[o] == t) ++o;
    points.push_back({static_cast<double>(o) / n_ood, static_cast<double>(i) / n_id});
  }
  return points;
}

EvalReport evaluate(const ScoreSet& s, double tpr_target) {
  const auto id = scores_of(s.id);
  const auto ood = scores_of(s.ood);
  EvalReport r;
  r.auroc = auroc(id, ood);
  r.fpr95 = fpr_at_tpr(id, ood, tpr_target);
  r.n_id = id.size();
  r.n_ood = ood.size();
  r.tpr_target = tpr_target;
  r.roc_points = roc_curve(id, ood);
  return r;
}

std::string report_to_json(const EvalReport& report, bool include_roc) {
  nlohmann::ordered_json j;
  j["fpr95"] = report.fpr95;
  j["auroc"] = report.auroc;
  j["n_id"] = report.n_id;
  j["n_ood"] = report.n_ood;
  j["tpr_target"] = report.tpr_target;
  if (include_roc) {
    auto pts = nlohmann::ordered_json::array();
    for (const auto& p : report.roc_points) pts.push_back({p.fpr, p.tpr});
    j["roc_points"] = std::move(pts);
  }
  return j.dump(2) + "\n";
}

std::string roc_to_csv(std::span<const RocPoint> points) {
  std::ostringstream out;
  out << "fpr,tpr\n";
  for (const auto& p : points) out << format_double(p.fpr) << ',' << format_double(p.tpr) << '\n';
  return out.str();
}

}  // namespace napood
