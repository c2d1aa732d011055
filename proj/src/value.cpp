#include "bevalkit/value.hpp"

#include <algorithm>
#include <sstream>

namespace bevalkit {

Value Value::pair(Value first, Value second) {
  return Value(Rep(std::make_shared<const std::pair<Value, Value>>(std::move(first),
                                                                  std::move(second))));
}

Value Value::set(std::vector<Value> elements) {
  std::sort(elements.begin(), elements.end());
  elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
  return sorted_set(std::move(elements));
}

Value Value::sorted_set(std::vector<Value> elements) {
  return Value(Rep(std::make_shared<const std::vector<Value>>(std::move(elements))));
}

Value Value::empty_set() {
  static const Value kEmpty = sorted_set({});
  return kEmpty;
}

bool Value::contains(const Value& v) const {
  const auto& items = *std::get<SetPtr>(rep_);
  return std::binary_search(items.begin(), items.end(), v);
}

std::strong_ordering operator<=>(const Value& a, const Value& b) {
  if (auto c = a.kind() <=> b.kind(); c != 0) return c;
  switch (a.kind()) {
    case Value::Kind::Int: return a.as_int() <=> b.as_int();
    case Value::Kind::Bool: return a.as_bool() <=> b.as_bool();
    case Value::Kind::Pair: {
      if (auto c = a.first() <=> b.first(); c != 0) return c;
      return a.second() <=> b.second();
    }
    case Value::Kind::Set: {
      const auto& x = std::get<Value::SetPtr>(a.rep_);
      const auto& y = std::get<Value::SetPtr>(b.rep_);
      if (x == y) return std::strong_ordering::equal;
      return std::lexicographical_compare_three_way(x->begin(), x->end(), y->begin(), y->end());
    }
  }
  return std::strong_ordering::equal;
}

namespace {

void write(std::ostringstream& out, const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Int: out << v.as_int(); break;
    case Value::Kind::Bool: out << (v.as_bool() ? "TRUE" : "FALSE"); break;
    case Value::Kind::Pair:
      out << '(';
      write(out, v.first());
      out << "|->";
      write(out, v.second());
      out << ')';
      break;
    case Value::Kind::Set: {
      out << '{';
      bool first = true;
      for (const auto& e : v.elements()) {
        if (!first) out << ',';
        first = false;
        write(out, e);
      }
      out << '}';
      break;
    }
  }
}

}  // namespace

std::string Value::to_string() const {
  std::ostringstream out;
  write(out, *this);
  return out.str();
}

}  // namespace bevalkit
