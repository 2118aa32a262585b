#include "pemsig/matrix.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include "pemsig/errors.hpp"

namespace pemsig {

WindowAssignment classify_event(std::span<const Day> prescriptions, Day event,
                                int window_days, TailPolicy tail) {
  if (prescriptions.empty()) {
    throw Error(Errc::EmptyPrescriptionList,
                "cannot assign windows without prescriptions");
  }
  if (window_days <= 0) {
    throw std::invalid_argument("window_days must be > 0");
  }
  const Day w = window_days;
  auto after = std::upper_bound(prescriptions.begin(), prescriptions.end(), event);
  if (after == prescriptions.begin()) {
    // Strictly before the first prescription.
    return event < prescriptions.front() - w ? WindowAssignment::Discarded
                                             : WindowAssignment::Baseline;
  }
  const Day anchor = *(after - 1);  // latest prescription at or before event
  if (event < anchor + w) {
    return WindowAssignment::Exposed;
  }
  if (after == prescriptions.end()) {
    return tail == TailPolicy::Baseline ? WindowAssignment::Baseline
                                        : WindowAssignment::Discarded;
  }
  return WindowAssignment::Baseline;
}

std::vector<AssignedEvent> assign_windows(std::span<const Day> prescriptions,
                                          std::span<const DatedEvent> events,
                                          int window_days, TailPolicy tail) {
  std::vector<AssignedEvent> out;
  out.reserve(events.size());
  for (const auto& ev : events) {
    out.push_back({ev, classify_event(prescriptions, ev.date, window_days, tail)});
  }
  return out;
}

Eigen::Index FeatureMatrix::column_of(const Readcode& code) const noexcept {
  auto it = std::lower_bound(columns.begin(), columns.end(), code);
  if (it == columns.end() || *it != code) return -1;
  return static_cast<Eigen::Index>(it - columns.begin());
}

FeatureMatrixPair build_feature_matrices(const Cohort& cohort, int window_days,
                                         TailPolicy tail) {
  if (cohort.members.empty()) {
    throw Error(Errc::EmptyCohort, "cohort for \"" + cohort.drug_code +
                                       "\" has no members");
  }

  const auto m = static_cast<Eigen::Index>(cohort.members.size());
  std::vector<std::vector<WindowAssignment>> assignments(cohort.members.size());
  std::vector<Readcode> columns;
  for (std::size_t i = 0; i < cohort.members.size(); ++i) {
    const auto& member = cohort.members[i];
    assignments[i].reserve(member.events.size());
    for (const auto& ev : member.events) {
      const auto a = classify_event(member.prescriptions, ev.date, window_days, tail);
      assignments[i].push_back(a);
      if (a != WindowAssignment::Discarded) {
        columns.push_back(ev.code);
      }
    }
  }
  std::sort(columns.begin(), columns.end());
  columns.erase(std::unique(columns.begin(), columns.end()), columns.end());
  const auto n = static_cast<Eigen::Index>(columns.size());

  FeatureMatrixPair pair;
  pair.before.kind = MatrixKind::Before;
  pair.after.kind = MatrixKind::After;
  pair.before.cells = BinaryMatrix::Zero(m, n);
  pair.after.cells = BinaryMatrix::Zero(m, n);
  pair.before.columns = columns;
  pair.after.columns = std::move(columns);
  pair.before.row_ids.reserve(cohort.members.size());
  for (std::size_t i = 0; i < cohort.members.size(); ++i) {
    const auto& member = cohort.members[i];
    pair.before.row_ids.push_back(member.patient_id);
    for (std::size_t e = 0; e < member.events.size(); ++e) {
      const auto a = assignments[i][e];
      if (a == WindowAssignment::Discarded) continue;
      const Eigen::Index j = pair.before.column_of(member.events[e].code);
      if (a == WindowAssignment::Baseline) {
        pair.before.cells(static_cast<Eigen::Index>(i), j) = 1;
      } else {
        pair.after.cells(static_cast<Eigen::Index>(i), j) = 1;
      }
    }
  }
  pair.after.row_ids = pair.before.row_ids;
  return pair;
}

FeatureMatrix merge_to_level3(const FeatureMatrix& matrix) {
  std::vector<Readcode> merged_codes;
  merged_codes.reserve(matrix.columns.size());
  for (const auto& code : matrix.columns) {
    merged_codes.push_back(truncate_to_level3(code));
  }
  std::vector<Readcode> columns = merged_codes;
  std::sort(columns.begin(), columns.end());
  columns.erase(std::unique(columns.begin(), columns.end()), columns.end());

  FeatureMatrix out;
  out.kind = matrix.kind;
  out.row_ids = matrix.row_ids;
  out.columns = std::move(columns);
  out.cells = BinaryMatrix::Zero(matrix.cells.rows(),
                                 static_cast<Eigen::Index>(out.columns.size()));
  for (Eigen::Index j = 0; j < matrix.cells.cols(); ++j) {
    const Eigen::Index target = out.column_of(merged_codes[static_cast<std::size_t>(j)]);
    out.cells.col(target) = out.cells.col(target).cwiseMax(matrix.cells.col(j));
  }
  return out;
}

GroupedMatrixPair group_patients(const FeatureMatrix& before,
                                 const FeatureMatrix& after, int group_size) {
  if (group_size < 1) {
    throw std::invalid_argument("group_size must be >= 1");
  }
  if (before.columns != after.columns || before.row_ids != after.row_ids) {
    throw Error(Errc::ColumnMapMismatch,
                "before/after matrices do not share row and column maps");
  }
  const Eigen::Index m = before.cells.rows();
  const Eigen::Index d = group_size;
  if (m < d) {
    throw Error(Errc::TooFewPatients,
                "need at least " + std::to_string(group_size) +
                    " patients to form one group, have " + std::to_string(m));
  }
  const Eigen::Index g = m / d;
  const Eigen::Index n = before.cells.cols();

  GroupedMatrixPair pair;
  pair.x.group_size = pair.y.group_size = group_size;
  pair.x.columns = pair.y.columns = before.columns;
  pair.x.counts = CountMatrix::Zero(g, n);
  pair.y.counts = CountMatrix::Zero(g, n);
  for (Eigen::Index k = 0; k < g; ++k) {
    pair.x.counts.row(k) =
        before.cells.middleRows(k * d, d).cast<std::int32_t>().colwise().sum();
    pair.y.counts.row(k) =
        after.cells.middleRows(k * d, d).cast<std::int32_t>().colwise().sum();
  }
  return pair;
}

void dump_sparse_triplets(const FeatureMatrix& before,
                          const FeatureMatrix& after, std::ostream& out) {
  out << "patient_id,readcode,matrix\n";
  auto dump = [&](const FeatureMatrix& matrix, char tag) {
    for (Eigen::Index i = 0; i < matrix.cells.rows(); ++i) {
      for (Eigen::Index j = 0; j < matrix.cells.cols(); ++j) {
        if (matrix.cells(i, j)) {
          out << matrix.row_ids[static_cast<std::size_t>(i)] << ','
              << matrix.columns[static_cast<std::size_t>(j)].text() << ',' << tag
              << '\n';
        }
      }
    }
  };
  dump(before, 'A');
  dump(after, 'B');
}

}  // namespace pemsig
