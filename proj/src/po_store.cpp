#include "bevalkit/po_store.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <unistd.h>

namespace bevalkit {

std::optional<PoFilter> parse_filter(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "all") return PoFilter::All;
  if (lower == "unproved") return PoFilter::Unproved;
  if (lower == "proved") return PoFilter::Proved;
  return std::nullopt;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot replace " + path.string() + ": " + ec.message());
  }
}

// ---------------------------------------------------------------------------
// Component

const ProofObligation* Component::find(std::string_view po_name) const {
  for (const auto& po : pos) {
    if (po.name == po_name) return &po;
  }
  return nullptr;
}

ProofObligation& Component::require(std::string_view po_name) {
  for (auto& po : pos) {
    if (po.name == po_name) return po;
  }
  throw std::out_of_range("unknown proof obligation " + std::string(po_name));
}

std::vector<ProofObligation> Component::list(PoFilter filter) const {
  std::vector<ProofObligation> out;
  for (const auto& po : pos) {
    if (filter == PoFilter::All || (filter == PoFilter::Proved) == po.proved()) out.push_back(po);
  }
  return out;
}

void Component::set_status(std::string_view po_name, PoStatus status,
                           std::optional<std::string> provenance, std::string evidence) {
  if (status == PoStatus::Unproved)
    throw std::invalid_argument("status can only return to UNPROVED through reset_status");
  ProofObligation& po = require(po_name);
  if (po.status == status && po.provenance == provenance) return;
  po.status = status;
  po.provenance = std::move(provenance);
  po.evidence = evidence.empty() ? std::string(to_string(status)) : std::move(evidence);
  write_statuses();
}

void Component::reset_status(std::string_view po_name, std::string_view reason) {
  ProofObligation& po = require(po_name);
  audit.push_back("reset \"" + po.name + "\" from " + std::string(to_string(po.status)) + ": " +
                  std::string(reason));
  po.status = PoStatus::Unproved;
  po.provenance.reset();
  po.evidence.clear();
  if (!directory.empty()) {
    std::string text;
    for (const auto& line : audit) text += line + "\n";
    write_file_atomic(file(".audit"), text);
  }
  write_statuses();
}

std::vector<Rule> Component::rules() const { return parse_rules(pmm_text); }

std::vector<Rule> Component::wd_rules() const {
  auto out = parse_rules(wd_pmm_text);
  for (auto& r : out) r.wd = true;
  return out;
}

std::vector<UserPassEntry> Component::user_pass() const { return parse_user_pass(user_pass_text); }

Rule Component::append_rule(Rule rule) {
  std::set<std::string> taken;
  for (const auto& r : rules()) taken.insert(r.theory_name);
  for (const auto& r : wd_rules()) taken.insert(r.theory_name);
  const std::string base = rule.theory_name;
  for (int n = 2; taken.contains(rule.theory_name); ++n) rule.theory_name = base + "_" + std::to_string(n);

  std::string& text = rule.wd ? wd_pmm_text : pmm_text;
  std::string updated = text;
  if (!updated.empty() && updated.back() != '\n') updated += '\n';
  updated += render_rule(rule);
  if (!directory.empty()) write_file_atomic(file(rule.wd ? "_wd.pmm" : ".pmm"), updated);
  text = std::move(updated);
  return rule;
}

void Component::add_user_pass_entry(UserPassEntry entry) {
  auto entries = user_pass();
  entries.push_back(std::move(entry));
  std::string text = render_user_pass(entries);
  if (!directory.empty()) write_file_atomic(file(".pass"), text);
  user_pass_text = std::move(text);
}

std::filesystem::path Component::file(std::string_view suffix) const {
  return directory / (name + std::string(suffix));
}

void Component::write_statuses() const {
  if (!directory.empty()) write_file_atomic(file(".status"), render_statuses(*this));
}

void Component::save() const {
  if (directory.empty()) throw std::logic_error("component " + name + " has no directory");
  std::filesystem::create_directories(directory);
  write_file_atomic(file(".pos"), render_component(*this));
  save_state();
}

void Component::save_state() const {
  if (directory.empty()) throw std::logic_error("component " + name + " has no directory");
  write_file_atomic(file(".status"), render_statuses(*this));
  write_file_atomic(file(".pmm"), pmm_text);
  write_file_atomic(file("_wd.pmm"), wd_pmm_text);
  write_file_atomic(file(".pass"), user_pass_text);
  std::string text;
  for (const auto& line : audit) text += line + "\n";
  write_file_atomic(file(".audit"), text);
}

// ---------------------------------------------------------------------------
// Interchange format

namespace {

std::string trim_right(std::string s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.pop_back();
  return s;
}

// `prefix_len` columns of blanks keep parser columns aligned with the file.
Expr parse_at(const std::string& line, std::size_t prefix_len, int number) {
  return parse_predicate(std::string(prefix_len, ' ') + line.substr(prefix_len), number);
}

}  // namespace

Component import_component(std::string_view text) {
  static const std::regex component_re(R"(^COMPONENT\s+(\S+)\s+PATH\s+(\S.*)$)");
  static const std::regex po_re(R"re(^PO\s+"([^"]+)"\s+GROUP\s+(\S+)$)re");
  static const std::regex keyword_re(R"(^(\s*)(DEF|HYP|GOAL)\s)");

  Component c;
  std::istringstream in{std::string(text)};
  std::string raw;
  int number = 0;
  bool have_header = false;
  std::optional<ProofObligation> open;
  bool have_goal = false;
  int open_line = 0;
  std::set<std::string> names;

  auto fail = [&](const std::string& what, const std::string& line) -> void {
    const auto first = line.find_first_not_of(" \t");
    const auto end = line.find_first_of(" \t", first == std::string::npos ? 0 : first);
    throw ParseError(what, number, first == std::string::npos ? 1 : static_cast<int>(first) + 1,
                     first == std::string::npos ? "" : line.substr(first, end - first));
  };

  while (std::getline(in, raw)) {
    ++number;
    const std::string line = trim_right(raw);
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line.compare(first, 2, "//") == 0) continue;
    const std::string body = line.substr(first);
    std::smatch m;
    if (!have_header) {
      if (!std::regex_match(body, m, component_re))
        fail("expected 'COMPONENT <name> PATH <module path>'", line);
      c.name = m[1];
      c.module_path = m[2];
      have_header = true;
      continue;
    }
    if (std::regex_match(body, m, po_re)) {
      if (open) fail("missing END before next PO", line);
      auto group = parse_group(m[2].str());
      if (!group) fail("group must be 'common' or 'wd'", line);
      if (!names.insert(m[1]).second) fail("duplicate proof obligation name \"" + m[1].str() + "\"", line);
      open.emplace();
      open->name = m[1];
      open->group = *group;
      have_goal = false;
      open_line = number;
      continue;
    }
    if (body == "END") {
      if (!open) fail("END without PO", line);
      if (!have_goal) fail("proof obligation \"" + open->name + "\" has no GOAL", line);
      c.pos.push_back(std::move(*open));
      open.reset();
      continue;
    }
    if (!std::regex_search(line, m, keyword_re)) fail("unrecognized line", line);
    const std::string keyword = m[2];
    const std::size_t prefix = static_cast<std::size_t>(m[0].length());
    if (keyword == "DEF") {
      if (open) fail("DEF inside a proof obligation", line);
      auto defs = parse_definitions(std::string(prefix, ' ') + line.substr(prefix), number);
      for (const auto& [name, def] : defs.entries()) {
        try {
          c.definitions.add(name, def);
        } catch (const std::invalid_argument& err) {
          fail(err.what(), line);
        }
      }
      continue;
    }
    if (!open) fail(keyword + " outside a proof obligation", line);
    if (have_goal) fail(keyword + " after GOAL", line);
    Expr e = parse_at(line, prefix, number);
    if (keyword == "HYP") {
      open->hypotheses.push_back(std::move(e));
    } else {
      open->goal = std::move(e);
      have_goal = true;
    }
  }
  if (!have_header) throw ParseError("missing COMPONENT header", number == 0 ? 1 : number, 1, "");
  if (open)
    throw ParseError("proof obligation \"" + open->name + "\" is missing END", open_line, 1, "PO");
  c.definitions.check_acyclic();
  return c;
}

std::string render_component(const Component& c) {
  std::ostringstream out;
  out << "COMPONENT " << c.name << " PATH " << c.module_path << "\n";
  for (const auto& [name, body] : c.definitions.entries())
    out << "DEF " << name << " == " << render(body) << "\n";
  for (const auto& po : c.pos) {
    out << "PO \"" << po.name << "\" GROUP " << to_string(po.group) << "\n";
    for (const auto& h : po.hypotheses) out << "HYP " << render(h) << "\n";
    out << "GOAL " << render(po.goal) << "\n";
    out << "END\n";
  }
  return out.str();
}

std::string render_statuses(const Component& c) {
  std::string out;
  for (const auto& po : c.pos) {
    out += "\"" + po.name + "\" " + std::string(to_string(po.status));
    if (po.provenance) out += " " + *po.provenance;
    out += "\n";
  }
  return out;
}

void apply_statuses(Component& c, std::string_view text) {
  static const std::regex line_re(R"re(^"([^"]+)"\s+(\S+)(?:\s+(\S+))?\s*$)re");
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    line = trim_right(line);
    if (line.empty()) continue;
    std::smatch m;
    if (!std::regex_match(line, m, line_re))
      throw ParseError("malformed status line", number, 1, line.substr(0, 40));
    auto status = parse_status(m[2].str());
    if (!status) throw ParseError("unknown status", number, static_cast<int>(m.position(2)) + 1, m[2]);
    auto it = std::find_if(c.pos.begin(), c.pos.end(), [&](const auto& po) { return po.name == m[1]; });
    if (it == c.pos.end()) throw std::out_of_range("status for unknown proof obligation " + m[1].str());
    it->status = *status;
    it->provenance = m[3].matched ? std::optional<std::string>(m[3]) : std::nullopt;
    it->evidence = *status == PoStatus::Unproved ? "" : "recorded in " + c.name + ".status";
  }
}

Component load_component(const std::filesystem::path& pos_file) {
  Component c = import_component(read_file(pos_file));
  c.directory = pos_file.parent_path();
  if (c.directory.empty()) c.directory = ".";
  auto optional_text = [&](std::string_view suffix) -> std::string {
    auto path = c.file(suffix);
    return std::filesystem::exists(path) ? read_file(path) : std::string();
  };
  if (auto status = optional_text(".status"); !status.empty()) apply_statuses(c, status);
  c.pmm_text = optional_text(".pmm");
  c.wd_pmm_text = optional_text("_wd.pmm");
  c.user_pass_text = optional_text(".pass");
  {
    std::istringstream in(optional_text(".audit"));
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty()) c.audit.push_back(line);
    }
  }
  // Surface corrupt rule files at load time rather than mid-run.
  (void)c.rules();
  (void)c.wd_rules();
  (void)c.user_pass();
  return c;
}

}  // namespace bevalkit
