#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace bevalkit {

/// Finite B value: integer, boolean, ordered pair, or canonical finite set.
/// Functions, relations and sequences are sets of pairs.
class Value {
 public:
  enum class Kind : std::uint8_t { Int, Bool, Pair, Set };

  Value() : rep_(std::int64_t{0}) {}

  static Value integer(std::int64_t v) { return Value(Rep(v)); }
  static Value boolean(bool v) { return Value(Rep(v)); }
  static Value pair(Value first, Value second);
  /// Sorts and removes duplicates.
  static Value set(std::vector<Value> elements);
  /// Caller guarantees `elements` is strictly increasing.
  static Value sorted_set(std::vector<Value> elements);
  static Value empty_set();

  Kind kind() const { return static_cast<Kind>(rep_.index()); }
  bool is_int() const { return kind() == Kind::Int; }
  bool is_bool() const { return kind() == Kind::Bool; }
  bool is_pair() const { return kind() == Kind::Pair; }
  bool is_set() const { return kind() == Kind::Set; }

  std::int64_t as_int() const { return std::get<std::int64_t>(rep_); }
  bool as_bool() const { return std::get<bool>(rep_); }
  const Value& first() const { return std::get<PairPtr>(rep_)->first; }
  const Value& second() const { return std::get<PairPtr>(rep_)->second; }
  std::span<const Value> elements() const { return *std::get<SetPtr>(rep_); }
  std::size_t size() const { return std::get<SetPtr>(rep_)->size(); }
  bool contains(const Value& v) const;

  friend bool operator==(const Value& a, const Value& b) { return (a <=> b) == 0; }
  friend std::strong_ordering operator<=>(const Value& a, const Value& b);

  /// B-style text: `3`, `TRUE`, `(1|->0)`, `{1,2}`.
  std::string to_string() const;

 private:
  using PairPtr = std::shared_ptr<const std::pair<Value, Value>>;
  using SetPtr = std::shared_ptr<const std::vector<Value>>;
  using Rep = std::variant<std::int64_t, bool, PairPtr, SetPtr>;
  explicit Value(Rep rep) : rep_(std::move(rep)) {}

  Rep rep_;
};

}  // namespace bevalkit
