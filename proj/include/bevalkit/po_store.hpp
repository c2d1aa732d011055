#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bevalkit/proof_obligation.hpp"
#include "bevalkit/rules.hpp"
#include "bevalkit/syntax.hpp"

namespace bevalkit {

enum class PoFilter { All, Unproved, Proved };

/// Accepts `all`, `unproved`, `proved` in any case.
std::optional<PoFilter> parse_filter(std::string_view text);

/// A B component's proof obligations together with its rule files.
///
/// When `directory` is set, every mutation is written through to
/// `<name>.pos`, `<name>.status`, `<name>.pmm`, `<name>_wd.pmm`, `<name>.pass`
/// and `<name>.audit` by whole-file replacement (write to a temporary file,
/// then rename).
class Component {
 public:
  std::string name;
  std::string module_path;
  DefinitionTable definitions;
  std::vector<ProofObligation> pos;
  std::string pmm_text;
  std::string wd_pmm_text;
  std::string user_pass_text;
  std::vector<std::string> audit;
  std::filesystem::path directory;

  const ProofObligation* find(std::string_view po_name) const;
  /// File order, filtered.
  std::vector<ProofObligation> list(PoFilter filter) const;

  /// Throws std::out_of_range for an unknown PO and std::invalid_argument
  /// when asked to set UNPROVED (use reset_status).
  void set_status(std::string_view po_name, PoStatus status,
                  std::optional<std::string> provenance = std::nullopt,
                  std::string evidence = {});
  /// Puts a PO back to UNPROVED and records why in the audit trail.
  void reset_status(std::string_view po_name, std::string_view reason);

  std::vector<Rule> rules() const;
  std::vector<Rule> wd_rules() const;
  std::vector<UserPassEntry> user_pass() const;

  /// Appends to the pmm or wd_pmm text according to rule.wd, renaming the
  /// theory with `_2`, `_3`, ... if the name is taken in either file.
  /// Existing bytes are never modified. Returns the stored rule.
  Rule append_rule(Rule rule);
  void add_user_pass_entry(UserPassEntry entry);

  std::filesystem::path file(std::string_view suffix) const;

  /// Writes all files into `directory`, which must be set.
  void save() const;
  /// As save(), but leaves `<name>.pos` untouched.
  void save_state() const;

 private:
  ProofObligation& require(std::string_view po_name);
  void write_statuses() const;
};

/// Parses the line-oriented interchange format. Format errors, duplicate PO
/// names and bad predicates are ParseError with the offending line; cyclic
/// definitions std::invalid_argument.
Component import_component(std::string_view text);
std::string render_component(const Component& c);
std::string render_statuses(const Component& c);
/// Applies a `.status` sidecar; throws ParseError on malformed lines and
/// std::out_of_range for unknown PO names.
void apply_statuses(Component& c, std::string_view text);

/// Loads `<dir>/<name>.pos` and whichever sidecar files exist next to it.
Component load_component(const std::filesystem::path& pos_file);

std::string read_file(const std::filesystem::path& path);
/// Replaces the file's contents atomically.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace bevalkit
