#pragma once

#include <atomic>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bevalkit/eval.hpp"
#include "bevalkit/po_store.hpp"
#include "bevalkit/rules.hpp"

namespace bevalkit {

/// floor(100 * (with_beval - baseline) / total), 0 when total is 0.
/// Throws std::invalid_argument unless 0 <= baseline <= with_beval <= total.
int gain(int total, int baseline, int with_beval);

struct GroupCounts {
  int total = 0;
  int f1 = 0;
  int f123 = 0;
  int f123_beval = 0;

  int gain() const { return bevalkit::gain(total, f123, f123_beval); }
  friend bool operator==(const GroupCounts&, const GroupCounts&) = default;
};

struct PoOutcome {
  std::string name;
  PoGroup group = PoGroup::Common;
  /// PROVED_F1 ... PROVED_BEVAL, or UNPROVED.
  PoStatus status = PoStatus::Unproved;
  /// Set when the PO reached the evaluator.
  std::optional<EvalResult> evaluation;
  /// Rule that closed the PO at force 3 or was emitted for it.
  std::optional<std::string> rule;

  friend bool operator==(const PoOutcome& a, const PoOutcome& b);
};

struct PipelineReport {
  std::string component;
  GroupCounts common;
  GroupCounts wd;
  std::vector<PoOutcome> outcomes;
  /// Theory names appended during this run.
  std::vector<std::string> emitted_rules;
};

struct PipelineOptions {
  EvalParams params;
  bool emit_rules = false;
  Clock clock = Clock::system();
  /// Use the OpenMP batch kernel; otherwise the serial reference.
  bool parallel = true;
  const std::atomic<bool>* cancel = nullptr;
};

/// Runs F1, F2, F3 (with the component's rules and User_Pass), then the
/// evaluator on the survivors. Proved statuses are written to the component;
/// with emit_rules each evaluator-proved PO gets a rule and a User_Pass entry,
/// appended in file order.
PipelineReport run_pipeline(Component& c, const PipelineOptions& options);

/// Side-by-side table of common and well-definedness counts followed by a
/// per-PO detail section.
std::string render_report(std::span<const PipelineReport> reports);
/// `component,group,total,f1,f123,f123_beval,gain` with one row per group.
std::string render_csv(std::span<const PipelineReport> reports);

}  // namespace bevalkit
