#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "epgm/error.hpp"

namespace epgm {

/// Storage type codes. Codes 3 and 4 are reserved.
enum class TypeCode : uint8_t {
  Int64 = 0,
  Float64 = 1,
  Boolean = 2,
  String = 5,
};

/// A schema-free property value: one of int64, float64, bool or string.
class PropertyValue {
 public:
  PropertyValue() : value_(int64_t{0}) {}
  PropertyValue(int64_t v) : value_(v) {}
  PropertyValue(int v) : value_(int64_t{v}) {}
  PropertyValue(double v) : value_(v) {}
  PropertyValue(bool v) : value_(v) {}
  PropertyValue(std::string v) : value_(std::move(v)) {}
  PropertyValue(const char* v) : value_(std::string(v)) {}

  TypeCode type_code() const;

  bool is_int() const { return std::holds_alternative<int64_t>(value_); }
  bool is_float() const { return std::holds_alternative<double>(value_); }
  bool is_bool() const { return std::holds_alternative<bool>(value_); }
  bool is_string() const { return std::holds_alternative<std::string>(value_); }
  bool is_numeric() const { return is_int() || is_float(); }

  int64_t as_int() const;
  double as_float() const;
  bool as_bool() const;
  const std::string& as_string() const;
  /// Numeric value promoted to double; throws TypeError for non-numbers.
  double as_number() const;

  /// Human readable rendering, strings unquoted.
  std::string to_string() const;

  /// Exact equality: same variant and same payload.
  bool operator==(const PropertyValue& other) const = default;

  const auto& variant() const { return value_; }

 private:
  std::variant<int64_t, double, bool, std::string> value_;
};

/// Orders two values. int and float compare numerically with each other;
/// strings and booleans only compare with their own kind. Anything else
/// throws TypeError.
std::partial_ordering compare_values(const PropertyValue& a, const PropertyValue& b);

/// Equality with int/float promotion.
bool values_equal(const PropertyValue& a, const PropertyValue& b);

std::string_view type_name(TypeCode code);

using Properties = std::map<std::string, PropertyValue, std::less<>>;

inline std::optional<PropertyValue> find_property(const Properties& props, std::string_view key) {
  auto it = props.find(key);
  if (it == props.end()) return std::nullopt;
  return it->second;
}

}  // namespace epgm
