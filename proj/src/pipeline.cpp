#include "bevalkit/pipeline.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "bevalkit/batch.hpp"
#include "bevalkit/prover.hpp"

namespace bevalkit {

int gain(int total, int baseline, int with_beval) {
  if (baseline < 0 || baseline > with_beval || with_beval > total)
    throw std::invalid_argument("gain needs 0 <= baseline <= with_beval <= total");
  if (total == 0) return 0;
  return static_cast<int>(100LL * (with_beval - baseline) / total);
}

bool operator==(const PoOutcome& a, const PoOutcome& b) {
  auto same_eval = [](const std::optional<EvalResult>& x, const std::optional<EvalResult>& y) {
    if (x.has_value() != y.has_value()) return false;
    if (!x) return true;
    return x->verdict == y->verdict && x->reason == y->reason && x->counterexample == y->counterexample;
  };
  return a.name == b.name && a.group == b.group && a.status == b.status && a.rule == b.rule &&
         same_eval(a.evaluation, b.evaluation);
}

PipelineReport run_pipeline(Component& c, const PipelineOptions& options) {
  PipelineReport report;
  report.component = c.name;

  const auto common_rules = c.rules();
  auto wd_rules = c.wd_rules();
  wd_rules.insert(wd_rules.end(), common_rules.begin(), common_rules.end());
  const auto pass = c.user_pass();
  // A User_Pass entry may name a rule from either file.
  const auto& all_rules = wd_rules;

  std::vector<ProofObligation> survivors;
  std::vector<std::size_t> survivor_index;
  for (const auto& po : c.pos) {
    PoOutcome out;
    out.name = po.name;
    out.group = po.group;
    const auto& rules = po.group == PoGroup::Common ? common_rules : wd_rules;
    ProofOutcome proof = prove(po, rules);
    if (!proof.proved) {
      ProofOutcome replay = apply_user_pass(po, pass, all_rules);
      if (replay.proved) proof = std::move(replay);
    }
    if (proof.proved) {
      out.status = *proof.force == 1   ? PoStatus::ProvedF1
                   : *proof.force == 2 ? PoStatus::ProvedF2
                                       : PoStatus::ProvedF3;
      out.rule = proof.rule;
      std::string trace;
      for (const auto& line : proof.trace) trace += line + "\n";
      c.set_status(po.name, out.status, proof.rule, trace);
    } else {
      survivors.push_back(po);
      survivor_index.push_back(report.outcomes.size());
    }
    report.outcomes.push_back(std::move(out));
  }

  EvalControl control;
  control.cancel = options.cancel;
  const auto results = options.parallel
                           ? check_batch(survivors, options.params, c.definitions, control)
                           : check_batch_serial(survivors, options.params, c.definitions, control);

  // Joined: statuses and rule files are written serially in file order.
  for (std::size_t k = 0; k < survivors.size(); ++k) {
    PoOutcome& out = report.outcomes[survivor_index[k]];
    out.evaluation = results[k];
    if (results[k].verdict != Verdict::True) continue;
    out.status = PoStatus::ProvedBEval;
    std::optional<std::string> rule_name;
    if (options.emit_rules) {
      Rule stored = c.append_rule(make_rule(survivors[k], results[k], options.clock, c.module_path,
                                            std::nullopt, &c.definitions));
      c.add_user_pass_entry({survivors[k].name, stored.theory_name});
      report.emitted_rules.push_back(stored.theory_name);
      rule_name = stored.theory_name;
      out.rule = rule_name;
    }
    c.set_status(survivors[k].name, PoStatus::ProvedBEval, rule_name,
                 "evaluated TRUE with " + options.params.to_flag_string());
  }

  for (const auto& out : report.outcomes) {
    GroupCounts& g = out.group == PoGroup::Common ? report.common : report.wd;
    ++g.total;
    if (out.status == PoStatus::ProvedF1) ++g.f1;
    if (out.status != PoStatus::Unproved && out.status != PoStatus::ProvedBEval) ++g.f123;
    if (out.status != PoStatus::Unproved) ++g.f123_beval;
  }
  return report;
}

namespace {

struct Cells {
  std::vector<std::string> text;
};

Cells group_cells(const GroupCounts& g) {
  auto count_or_dash = [](int value, int previous) {
    return value == previous ? std::string("-") : std::to_string(value);
  };
  return {{std::to_string(g.total), count_or_dash(g.f1, 0), count_or_dash(g.f123, g.f1),
           count_or_dash(g.f123_beval, g.f123), std::to_string(g.gain()) + "%"}};
}

std::string describe(const PoOutcome& out) {
  std::string text(to_string(out.status));
  if (out.rule) text += " (" + *out.rule + ")";
  if (out.status != PoStatus::Unproved || !out.evaluation) return text;
  const EvalResult& r = *out.evaluation;
  text += ": evaluator ";
  text += to_string(r.verdict);
  if (r.reason) text += "(" + std::string(to_string(*r.reason)) + ") " + r.detail;
  if (r.counterexample) {
    text += " counterexample";
    if (r.counterexample->empty()) text += " {}";
    for (const auto& b : *r.counterexample) text += " " + b.name + "=" + b.value.to_string();
  }
  return text;
}

}  // namespace

std::string render_report(std::span<const PipelineReport> reports) {
  const std::vector<std::string> columns = {"T. POs", "F1", "F1;F2;F3", "F1;F2;F3;BEval", "Gain"};
  std::size_t name_width = 4;
  for (const auto& r : reports) name_width = std::max(name_width, r.component.size());

  std::ostringstream out;
  auto group_width = [&] {
    std::size_t w = 0;
    for (const auto& c : columns) w += c.size() + 3;
    return w - 3;
  }();
  out << std::left << std::setw(static_cast<int>(name_width)) << "" << " | "
      << std::setw(static_cast<int>(group_width)) << "Common POs" << " | "
      << "W. D. P. Os." << "\n";
  std::ostringstream header;
  header << std::left << std::setw(static_cast<int>(name_width)) << "Name";
  for (int group = 0; group < 2; ++group) {
    for (const auto& c : columns) header << " | " << c;
  }
  out << header.str() << "\n" << std::string(header.str().size(), '-') << "\n";
  for (const auto& r : reports) {
    out << std::left << std::setw(static_cast<int>(name_width)) << r.component;
    for (const GroupCounts* g : {&r.common, &r.wd}) {
      const Cells cells = group_cells(*g);
      for (std::size_t i = 0; i < columns.size(); ++i)
        out << " | " << std::right << std::setw(static_cast<int>(columns[i].size())) << cells.text[i];
    }
    out << "\n";
  }
  out << "\nDetails\n";
  for (const auto& r : reports) {
    for (const auto& o : r.outcomes)
      out << "  " << r.component << " " << o.name << " [" << to_string(o.group) << "] " << describe(o) << "\n";
  }
  return out.str();
}

std::string render_csv(std::span<const PipelineReport> reports) {
  std::ostringstream out;
  out << "component,group,total,f1,f123,f123_beval,gain\n";
  for (const auto& r : reports) {
    for (const auto& [label, g] : {std::pair<const char*, const GroupCounts&>{"common", r.common},
                                   std::pair<const char*, const GroupCounts&>{"wd", r.wd}}) {
      out << r.component << "," << label << "," << g.total << "," << g.f1 << "," << g.f123 << ","
          << g.f123_beval << "," << g.gain() << "\n";
    }
  }
  return out.str();
}

}  // namespace bevalkit
