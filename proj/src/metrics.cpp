#include "egocorridor/metrics.hpp"

#include <algorithm>
#include <cstdio>

#include "egocorridor/error.hpp"

namespace egocorridor {

namespace {

void check_shapes(const Mask& a, const Mask& b) {
  if (a.width != b.width || a.height != b.height || a.bits.size() != b.bits.size())
    throw Error(ErrorKind::ShapeMismatch, "mask dimensions differ");
}

}  // namespace

OverlapCounts overlap(const Mask& a, const Mask& b) {
  check_shapes(a, b);
  const std::int64_t n = static_cast<std::int64_t>(a.bits.size());
  const std::uint8_t* pa = a.bits.data();
  const std::uint8_t* pb = b.bits.data();
  std::uint64_t na = 0, nb = 0, both = 0;
#pragma omp parallel for reduction(+ : na, nb, both) schedule(static)
  for (std::int64_t k = 0; k < n; ++k) {
    const bool x = pa[k] != 0;
    const bool y = pb[k] != 0;
    na += x;
    nb += y;
    both += x && y;
  }
  return {na, nb, both, na + nb - both};
}

OverlapCounts overlap_serial(const Mask& a, const Mask& b) {
  check_shapes(a, b);
  OverlapCounts c;
  for (std::size_t k = 0; k < a.bits.size(); ++k) {
    const bool x = a.bits[k] != 0;
    const bool y = b.bits[k] != 0;
    c.area_a += x;
    c.area_b += y;
    c.intersection += x && y;
    c.union_ += x || y;
  }
  return c;
}

double dice(const OverlapCounts& c) {
  if (c.area_a + c.area_b == 0) return 1.0;
  return 2.0 * static_cast<double>(c.intersection) / static_cast<double>(c.area_a + c.area_b);
}

double jaccard(const OverlapCounts& c) {
  if (c.union_ == 0) return 1.0;
  return static_cast<double>(c.intersection) / static_cast<double>(c.union_);
}

double dice(const Mask& a, const Mask& b) { return dice(overlap(a, b)); }
double jaccard(const Mask& a, const Mask& b) { return jaccard(overlap(a, b)); }

std::vector<PairScore> score_pairs(std::span<const MaskPair> pairs) {
  std::vector<PairScore> out(pairs.size());
  const std::int64_t n = static_cast<std::int64_t>(pairs.size());
  // Shape errors are rethrown after the parallel region.
  std::vector<char> mismatch(pairs.size(), 0);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t k = 0; k < n; ++k) {
    const MaskPair& p = pairs[static_cast<std::size_t>(k)];
    if (p.a->width != p.b->width || p.a->height != p.b->height) {
      mismatch[static_cast<std::size_t>(k)] = 1;
      continue;
    }
    const OverlapCounts c = overlap_serial(*p.a, *p.b);
    out[static_cast<std::size_t>(k)] = {dice(c), jaccard(c)};
  }
  if (std::find(mismatch.begin(), mismatch.end(), 1) != mismatch.end())
    throw Error(ErrorKind::ShapeMismatch, "mask dimensions differ");
  return out;
}

BatchReport batch_report(std::span<const PairScore> scores, std::size_t batch_size) {
  if (batch_size < 1) throw Error(ErrorKind::InvalidArgument, "batch size must be >= 1");
  if (scores.empty()) throw Error(ErrorKind::EmptyEvaluation, "no mask pairs to evaluate");
  BatchReport report;
  for (std::size_t start = 0; start < scores.size(); start += batch_size) {
    const std::size_t end = std::min(scores.size(), start + batch_size);
    BatchStats b;
    b.size = end - start;
    for (std::size_t k = start; k < end; ++k) {
      b.dice += scores[k].dice;
      b.jaccard += scores[k].jaccard;
    }
    b.dice /= static_cast<double>(b.size);
    b.jaccard /= static_cast<double>(b.size);
    report.batches.push_back(b);
  }
  for (const BatchStats& b : report.batches) {
    report.dice += b.dice;
    report.jaccard += b.jaccard;
  }
  report.dice /= static_cast<double>(report.batches.size());
  report.jaccard /= static_cast<double>(report.batches.size());
  return report;
}

BatchReport batch_report(std::span<const MaskPair> pairs, std::size_t batch_size) {
  if (pairs.empty()) throw Error(ErrorKind::EmptyEvaluation, "no mask pairs to evaluate");
  const auto scores = score_pairs(pairs);
  return batch_report(std::span<const PairScore>(scores), batch_size);
}

namespace {

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

void write_batch_csv(std::ostream& os, const BatchReport& report) {
  os << "batch,size,dice,jaccard,avg\n";
  for (std::size_t k = 0; k < report.batches.size(); ++k) {
    const BatchStats& b = report.batches[k];
    os << k << ',' << b.size << ',' << fixed3(b.dice) << ',' << fixed3(b.jaccard) << ',' << fixed3(b.avg()) << '\n';
  }
  os << "overall,," << fixed3(report.dice) << ',' << fixed3(report.jaccard) << ',' << fixed3(report.avg()) << '\n';
}

ScenarioBatch make_scenario_batch(std::string name, std::size_t count, double dice, double jaccard) {
  return {std::move(name), count, dice, jaccard, 0.5 * (dice + jaccard)};
}

ScenarioBatch weighted_aggregate(std::span<const ScenarioBatch> batches) {
  if (batches.empty()) throw Error(ErrorKind::EmptyEvaluation, "no scenario rows to aggregate");
  std::size_t total = 0;
  double d = 0.0, j = 0.0;
  for (const ScenarioBatch& b : batches) {
    total += b.count;
    d += static_cast<double>(b.count) * b.dice;
    j += static_cast<double>(b.count) * b.jaccard;
  }
  if (total == 0) throw Error(ErrorKind::EmptyEvaluation, "scenario rows carry no batches");
  return make_scenario_batch("all_weighted", total, d / static_cast<double>(total), j / static_cast<double>(total));
}

void write_scenario_csv(std::ostream& os, std::span<const ScenarioBatch> rows) {
  os << "scenario,count,dice,jaccard,avg\n";
  for (const ScenarioBatch& r : rows)
    os << r.name << ',' << r.count << ',' << fixed3(r.dice) << ',' << fixed3(r.jaccard) << ',' << fixed3(r.avg) << '\n';
  const ScenarioBatch all = weighted_aggregate(rows);
  os << all.name << ',' << all.count << ',' << fixed3(all.dice) << ',' << fixed3(all.jaccard) << ','
     << fixed3(all.avg) << '\n';
}

}  // namespace egocorridor
