#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pemsig/ingest.hpp"

namespace pemsig {

using BinaryMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;
using CountMatrix = Eigen::Matrix<std::int32_t, Eigen::Dynamic, Eigen::Dynamic>;

enum class WindowAssignment { Baseline, Exposed, Discarded };

// What happens to events more than `window_days` after the final
// prescription: treat them like any other far-from-exposure event
// (Baseline) or drop them from observation entirely.
enum class TailPolicy { Baseline, Discarded };

enum class MatrixKind { Before, After };

/// Classifies one event date against a patient's sorted prescription dates.
/// Intervals are half-open: an event on a prescription date counts as
/// exposed, an event exactly `window_days` after it does not.
WindowAssignment classify_event(std::span<const Day> prescriptions, Day event,
                                int window_days = 60,
                                TailPolicy tail = TailPolicy::Baseline);

struct AssignedEvent {
  DatedEvent event;
  WindowAssignment assignment = WindowAssignment::Discarded;
};

/// Classifies every event of one patient, in input order.
std::vector<AssignedEvent> assign_windows(std::span<const Day> prescriptions,
                                          std::span<const DatedEvent> events,
                                          int window_days = 60,
                                          TailPolicy tail = TailPolicy::Baseline);

/// Binary patients-by-events matrix for one exposure side. Cell (i, j) is 1
/// iff patient i has at least one occurrence of code j in the respective
/// window. The Before and After matrices built from one cohort share their
/// row and column maps; columns are sorted ascending by code text.
struct FeatureMatrix {
  MatrixKind kind = MatrixKind::Before;
  BinaryMatrix cells;
  std::vector<std::string> row_ids;
  std::vector<Readcode> columns;

  Eigen::Index rows() const noexcept { return cells.rows(); }
  Eigen::Index cols() const noexcept { return cells.cols(); }

  /// Index of `code` in the column map, or -1.
  Eigen::Index column_of(const Readcode& code) const noexcept;
};

struct FeatureMatrixPair {
  FeatureMatrix before;
  FeatureMatrix after;
};

FeatureMatrixPair build_feature_matrices(const Cohort& cohort,
                                         int window_days = 60,
                                         TailPolicy tail = TailPolicy::Baseline);

/// Collapses columns that share their first three code characters into a
/// single level-3 column; the merged cell is the OR of the group's cells.
FeatureMatrix merge_to_level3(const FeatureMatrix& matrix);

/// Per-group occurrence counts: groups of `group_size` consecutive members,
/// cell (k, j) = number of patients in group k having event j.
struct GroupedMatrix {
  CountMatrix counts;
  int group_size = 0;
  std::vector<Readcode> columns;

  Eigen::Index groups() const noexcept { return counts.rows(); }
};

struct GroupedMatrixPair {
  GroupedMatrix x;  // from the Before matrix
  GroupedMatrix y;  // from the After matrix
};

/// Splits members into floor(m / group_size) full groups in member order
/// and sums their rows; the trailing partial group is dropped.
GroupedMatrixPair group_patients(const FeatureMatrix& before,
                                 const FeatureMatrix& after,
                                 int group_size = 100);

/// Debug dump of both matrices as sparse triplets:
/// patient_id,readcode,matrix with matrix in {A, B}.
void dump_sparse_triplets(const FeatureMatrix& before,
                          const FeatureMatrix& after, std::ostream& out);

}  // namespace pemsig
