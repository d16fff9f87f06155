// Copyright 2026 The Orifice Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "orifice/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace orifice::metrics {

double dsc(const BinaryMask& a, const BinaryMask& b, double both_empty) {
  if (!a.same_shape(b)) throw InvalidArgument("dsc: mask dimensions differ");
  std::size_t na = 0, nb = 0, both = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool x = a[i] != 0;
    const bool y = b[i] != 0;
    na += x;
    nb += y;
    both += x && y;
  }
  if (na + nb == 0) return both_empty;
  return 2.0 * static_cast<double>(both) / static_cast<double>(na + nb);
}

std::vector<Centroid> centroids(const InstanceMap& instances) {
  const std::uint32_t k = instances.instance_count();
  std::vector<double> sum_r(k + 1, 0.0), sum_c(k + 1, 0.0);
  std::vector<std::size_t> count(k + 1, 0);
  for (int r = 0; r < instances.height(); ++r) {
    for (int c = 0; c < instances.width(); ++c) {
      const auto l = instances(r, c);
      if (l == 0) continue;
      sum_r[l] += r;
      sum_c[l] += c;
      ++count[l];
    }
  }
  std::vector<Centroid> out;
  out.reserve(k);
  for (std::uint32_t l = 1; l <= k; ++l) {
    if (count[l] == 0) continue;
    const double n = static_cast<double>(count[l]);
    out.push_back({sum_r[l] / n, sum_c[l] / n});
  }
  return out;
}

InstanceMap binary_to_instances(const BinaryMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  InstanceMap labels(w, h);
  std::vector<std::size_t> stack;
  std::uint32_t next = 0;
  for (std::size_t start = 0; start < mask.size(); ++start) {
    if (!mask[start] || labels[start] != 0) continue;
    ++next;
    labels[start] = next;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      const int r = static_cast<int>(p / w);
      const int c = static_cast<int>(p % w);
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const int rr = r + dr, cc = c + dc;
          if (!mask.in_bounds(rr, cc)) continue;
          const std::size_t q = mask.index(rr, cc);
          if (!mask[q] || labels[q] != 0) continue;
          labels[q] = next;
          stack.push_back(q);
        }
      }
    }
  }
  return labels;
}

std::optional<double> amcd(const std::vector<Centroid>& gt, const std::vector<Centroid>& pred) {
  if (gt.empty() || pred.empty()) return std::nullopt;
  double total = 0.0;
  for (const auto& g : gt) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : pred) best = std::min(best, std::hypot(g.row - p.row, g.col - p.col));
    total += best;
  }
  return total / static_cast<double>(gt.size());
}

EvalResult evaluate_sample(const BinaryMask& pred, const BinaryMask& gt, std::string sample_id,
                           double both_empty_dsc) {
  EvalResult result;
  result.sample_id = std::move(sample_id);
  result.dsc = dsc(pred, gt, both_empty_dsc);
  const auto gt_c = centroids(binary_to_instances(gt));
  const auto pred_c = centroids(binary_to_instances(pred));
  result.n_gt = gt_c.size();
  result.n_pred = pred_c.size();
  result.amcd = amcd(gt_c, pred_c);
  return result;
}

BinaryMask resample_nearest(const BinaryMask& mask, int width, int height) {
  if (width <= 0 || height <= 0) throw InvalidArgument("resample target must be non-empty");
  if (mask.width() == width && mask.height() == height) return mask;
  BinaryMask out(width, height);
  for (int r = 0; r < height; ++r) {
    const int sr = std::min(mask.height() - 1,
                            static_cast<int>((r + 0.5) * mask.height() / height));
    for (int c = 0; c < width; ++c) {
      const int sc = std::min(mask.width() - 1,
                              static_cast<int>((c + 0.5) * mask.width() / width));
      out(r, c) = mask(sr, sc);
    }
  }
  return out;
}

namespace {

MetricStats stats_of(const std::vector<double>& xs) {
  MetricStats s;
  s.n_samples = xs.size();
  if (xs.empty()) return s;
  double sum = 0.0;
  for (const double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (const double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(xs.size()));
  return s;
}

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string format_cell(double mean, double std) { return fixed2(mean) + "±" + fixed2(std); }

DatasetReport aggregate(const std::vector<EvalResult>& results) {
  if (results.empty()) throw InvalidArgument("aggregate: no results");
  std::vector<double> dscs, amcds;
  DatasetReport report;
  for (const auto& r : results) {
    dscs.push_back(r.dsc);
    if (r.amcd) {
      amcds.push_back(*r.amcd);
    } else {
      ++report.undefined_amcd_count;
    }
  }
  report.dsc = stats_of(dscs);
  report.amcd = stats_of(amcds);
  report.total_samples = results.size();
  return report;
}

std::string DatasetReport::to_table() const {
  auto cell = [](const MetricStats& s, double factor) {
    return s.n_samples == 0 ? std::string("n/a") : format_cell(s.mean * factor, s.std * factor);
  };
  const std::string dsc_cell = cell(dsc, 100.0);
  const std::string amcd_cell = cell(amcd, 1.0);

  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-10s %18s %6s %10s\n", "metric", "mean±std", "n",
                "undefined");
  out << line;
  // "±" is two bytes in UTF-8; pad by one extra so the columns line up.
  std::snprintf(line, sizeof(line), "%-10s %19s %6zu %10d\n", "DSC[%]", dsc_cell.c_str(),
                dsc.n_samples, 0);
  out << line;
  std::snprintf(line, sizeof(line), "%-10s %19s %6zu %10zu\n", "AMCD[px]", amcd_cell.c_str(),
                amcd.n_samples, undefined_amcd_count);
  out << line;
  out << "std: population, samples: " << total_samples << '\n';
  return out.str();
}

std::string DatasetReport::to_csv() const {
  std::ostringstream out;
  out << "metric,mean,std,n,undefined_count\n";
  out << "dsc," << fixed2(dsc.mean * 100.0) << ',' << fixed2(dsc.std * 100.0) << ','
      << dsc.n_samples << ",0\n";
  if (amcd.n_samples == 0) {
    out << "amcd,,," << 0 << ',' << undefined_amcd_count << '\n';
  } else {
    out << "amcd," << fixed2(amcd.mean) << ',' << fixed2(amcd.std) << ',' << amcd.n_samples
        << ',' << undefined_amcd_count << '\n';
  }
  return out.str();
}

}  // namespace orifice::metrics
