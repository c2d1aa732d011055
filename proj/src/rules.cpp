#include "bevalkit/rules.hpp"

#include <ctime>
#include <regex>
#include <sstream>
#include <stdexcept>

namespace bevalkit {

Clock Clock::system() {
  return Clock{
      [] {
        std::time_t now = std::time(nullptr);
        std::tm local{};
        localtime_r(&now, &local);
        char buf[64];
        std::strftime(buf, sizeof buf, "%a %b %d %H:%M:%S %Z %Y", &local);
        return std::string(buf);
      },
      [](std::int64_t measured) { return measured; },
  };
}

Clock Clock::pinned(std::string timestamp, std::int64_t elapsed_ms) {
  return Clock{
      [timestamp] { return timestamp; },
      [elapsed_ms](std::int64_t) { return elapsed_ms; },
  };
}

std::string theory_name_for(std::string_view po_name) {
  std::string out = "RulesProB";
  for (char c : po_name) {
    const bool alnum = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
    out.push_back(alnum ? c : '_');
  }
  return out;
}

Rule make_rule(const ProofObligation& po, const EvalResult& result, const Clock& clock,
               std::string_view module_path, std::optional<std::string> description,
               const DefinitionTable* defs) {
  if (result.verdict != Verdict::True)
    throw std::invalid_argument("rule for " + po.name + " refused: evaluation gave " +
                                std::string(to_string(result.verdict)));
  auto close = [&](Expr e) {
    if (!defs) return e;
    for (const auto& [name, body] : defs->entries()) {
      if (name.size() == 1) e = substitute(e, name, expand(body, *defs));
    }
    return e;
  };
  Rule r;
  r.theory_name = theory_name_for(po.name);
  r.po_name = po.name;
  r.timestamp = clock.timestamp();
  r.elapsed_ms = clock.elapsed(result.elapsed_ms);
  r.module_path = std::string(module_path);
  r.conclusion = close(po.goal);
  for (const auto& h : po.hypotheses) r.guards.push_back(close(h));
  r.description = description ? *description : "Check assertion (" + render(r.conclusion) + ") deduction";
  r.wd = po.group == PoGroup::WellDefinedness;
  return r;
}

namespace {

// Binds looser than or as loose as `&`, so it needs parentheses as a guard.
bool loose(const Expr& e) {
  switch (e.op()) {
    case Op::And:
    case Op::Or:
    case Op::Implies:
    case Op::Equiv:
      return true;
    default:
      return false;
  }
}

}  // namespace

std::string render_rule(const Rule& rule) {
  std::ostringstream out;
  out << "THEORY " << rule.theory_name << " IS \n";
  out << "  /* Expression from (" << rule.po_name << "), it was added  in " << rule.timestamp << "\n";
  out << "  evaluated with ProB in " << rule.elapsed_ms
      << " milliseconds. Module Path:" << rule.module_path << " */\t \n";
  out << "  \"`" << rule.description << "'\"\n";
  out << "  ";
  for (std::size_t i = 0; i < rule.guards.size(); ++i) {
    if (i > 0) out << " & ";
    const auto text = render(rule.guards[i]);
    if (loose(rule.guards[i]))
      out << '(' << text << ')';
    else
      out << text;
  }
  if (!rule.guards.empty()) out << " =>   ";
  out << '(' << render(rule.conclusion) << ")\n";
  out << "END\n";
  return out.str();
}

std::string render_rules(std::span<const Rule> rules) {
  std::string out;
  for (const auto& r : rules) out += render_rule(r);
  return out;
}

namespace {

struct Line {
  std::string text;
  int number;
};

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  int number = 1;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(start, end - start));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back({std::move(line), number++});
    if (end == text.size()) break;
    start = end + 1;
  }
  return lines;
}

bool blank(const std::string& s) { return s.find_first_not_of(" \t") == std::string::npos; }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void format_error(const std::string& what, const Line& line) {
  throw ParseError(what, line.number, 1, trim(line.text).substr(0, 40));
}

// Splits the rule body at its top-level `=>` and the guards at top-level `&`.
void parse_body(const std::string& body, int first_line, Rule& rule) {
  const auto tokens = tokenize(body, first_line);
  int depth = 0;
  std::vector<std::size_t> amps;
  std::optional<std::size_t> arrow;
  for (const auto& t : tokens) {
    if (t.kind != TokenKind::Symbol) continue;
    if (t.text == "(" || t.text == "{" || t.text == "[") ++depth;
    if (t.text == ")" || t.text == "}" || t.text == "]") --depth;
    if (depth != 0) continue;
    if (t.text == "=>") {
      arrow = t.offset;
      break;
    }
    if (t.text == "&") amps.push_back(t.offset);
  }
  // Line of a byte offset, so parse errors point into the file.
  auto line_at = [&](std::size_t offset) {
    return first_line + static_cast<int>(std::count(body.begin(), body.begin() + offset, '\n'));
  };
  auto parse_part = [&](std::size_t from, std::size_t to) {
    std::string part = body.substr(from, to - from);
    return parse_predicate(part, line_at(from));
  };
  if (!arrow) {
    rule.conclusion = parse_part(0, body.size());
    return;
  }
  std::size_t from = 0;
  for (auto amp : amps) {
    rule.guards.push_back(parse_part(from, amp));
    from = amp + 1;
  }
  rule.guards.push_back(parse_part(from, *arrow));
  rule.conclusion = parse_part(*arrow + 2, body.size());
}

}  // namespace

std::vector<Rule> parse_rules(std::string_view text) {
  static const std::regex header(R"(^THEORY\s+(\S+)\s+IS\s*$)");
  static const std::regex origin(R"(^\s*/\* Expression from \((.*)\), it was added  in (.*)$)");
  static const std::regex timing(
      R"(^\s*evaluated with ProB in (-?\d+) milliseconds\. Module Path:(.*?) \*/\s*$)");
  static const std::regex described(R"(^\s*"`(.*)'"\s*$)");

  const auto lines = split_lines(text);
  std::vector<Rule> rules;
  std::size_t i = 0;
  auto next = [&](const char* expecting) -> const Line& {
    if (i >= lines.size())
      throw ParseError(std::string("unexpected end of rule file, expected ") + expecting,
                       lines.empty() ? 1 : lines.back().number, 1, "");
    return lines[i++];
  };
  while (i < lines.size()) {
    if (blank(lines[i].text)) {
      ++i;
      continue;
    }
    Rule rule;
    std::smatch m;
    const Line& head = next("THEORY");
    if (!std::regex_match(head.text, m, header)) format_error("expected 'THEORY <name> IS'", head);
    rule.theory_name = m[1];
    const Line& l1 = next("rule comment");
    if (!std::regex_match(l1.text, m, origin)) format_error("malformed rule comment", l1);
    rule.po_name = m[1];
    rule.timestamp = m[2];
    const Line& l2 = next("rule comment");
    if (!std::regex_match(l2.text, m, timing)) format_error("malformed rule comment", l2);
    rule.elapsed_ms = std::stoll(m[1]);
    rule.module_path = m[2];
    const Line& l3 = next("rule description");
    if (!std::regex_match(l3.text, m, described)) format_error("malformed rule description", l3);
    rule.description = m[1];
    std::string body;
    int body_line = 0;
    for (;;) {
      const Line& l = next("END");
      if (trim(l.text) == "END") break;
      if (body_line == 0) body_line = l.number;
      body += l.text;
      body += '\n';
    }
    if (blank(body)) format_error("rule without a body", lines[i - 1]);
    parse_body(body, body_line, rule);
    rules.push_back(std::move(rule));
  }
  return rules;
}

std::string render_user_pass(std::span<const UserPassEntry> entries) {
  if (entries.empty()) throw std::invalid_argument("User_Pass needs at least one entry");
  std::string out = "THEORY User_Pass IS\n";
  for (std::size_t i = 0; i < entries.size(); ++i) {
    out += "        Operation(" + entries[i].selector + ") & mp(Tac(" + entries[i].rule + "))";
    out += i + 1 < entries.size() ? ";\n" : "\n";
  }
  out += "END\n";
  return out;
}

std::vector<UserPassEntry> parse_user_pass(std::string_view text) {
  static const std::regex entry(R"(^\s*Operation\(([^()]*)\)\s*&\s*mp\(Tac\(([^()]*)\)\)\s*;?\s*$)");
  const auto lines = split_lines(text);
  std::vector<UserPassEntry> out;
  bool open = false;
  for (const auto& l : lines) {
    if (blank(l.text)) continue;
    const auto t = trim(l.text);
    if (!open) {
      if (t != "THEORY User_Pass IS") format_error("expected 'THEORY User_Pass IS'", l);
      open = true;
      continue;
    }
    if (t == "END") {
      open = false;
      continue;
    }
    std::smatch m;
    if (!std::regex_match(l.text, m, entry))
      format_error("expected 'Operation(<po>) & mp(Tac(<rule>))'", l);
    out.push_back({m[1], m[2]});
  }
  if (open) throw ParseError("User_Pass theory without END", lines.back().number, 1, "");
  return out;
}

}  // namespace bevalkit
