#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "egocorridor/projection.hpp"

namespace egocorridor {

/// Pixel counts of a mask pair: |a|, |b|, |a & b|, |a | b|.
struct OverlapCounts {
  std::uint64_t area_a = 0;
  std::uint64_t area_b = 0;
  std::uint64_t intersection = 0;
  std::uint64_t union_ = 0;
};

/// Throws ShapeMismatch when dimensions differ. Parallel reduction over pixels.
OverlapCounts overlap(const Mask& a, const Mask& b);
OverlapCounts overlap_serial(const Mask& a, const Mask& b);

/// 2|a & b| / (|a| + |b|); 1.0 when both are empty.
double dice(const OverlapCounts& c);
/// |a & b| / |a | b|; 1.0 when both are empty.
double jaccard(const OverlapCounts& c);

double dice(const Mask& a, const Mask& b);
double jaccard(const Mask& a, const Mask& b);

struct PairScore {
  double dice = 1.0;
  double jaccard = 1.0;
};

struct MaskPair {
  const Mask* a = nullptr;
  const Mask* b = nullptr;
};

/// Scores every pair, in parallel over pairs.
std::vector<PairScore> score_pairs(std::span<const MaskPair> pairs);

struct BatchStats {
  std::size_t size = 0;
  double dice = 0.0;
  double jaccard = 0.0;
  double avg() const { return 0.5 * (dice + jaccard); }
};

struct BatchReport {
  std::vector<BatchStats> batches;
  double dice = 0.0;  // mean of the batch means
  double jaccard = 0.0;
  double avg() const { return 0.5 * (dice + jaccard); }
};

/// Consecutive batches of `batch_size` pairs (the last one may be short).
/// Throws EmptyEvaluation for an empty input.
BatchReport batch_report(std::span<const PairScore> scores, std::size_t batch_size);
BatchReport batch_report(std::span<const MaskPair> pairs, std::size_t batch_size);

void write_batch_csv(std::ostream& os, const BatchReport& report);

/// One row of the scenario table: `count` batches with mean DICE and JAC.
struct ScenarioBatch {
  std::string name;
  std::size_t count = 1;
  double dice = 0.0;
  double jaccard = 0.0;
  double avg = 0.0;
};

ScenarioBatch make_scenario_batch(std::string name, std::size_t count, double dice, double jaccard);

/// Count-weighted mean of DICE and JAC; AVG recomputed from the two.
ScenarioBatch weighted_aggregate(std::span<const ScenarioBatch> batches);

/// CSV with header scenario,count,dice,jaccard,avg and a final all_weighted row.
void write_scenario_csv(std::ostream& os, std::span<const ScenarioBatch> rows);

}  // namespace egocorridor
