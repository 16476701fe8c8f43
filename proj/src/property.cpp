#include "epgm/property.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace epgm {

TypeCode PropertyValue::type_code() const {
  switch (value_.index()) {
    case 0: return TypeCode::Int64;
    case 1: return TypeCode::Float64;
    case 2: return TypeCode::Boolean;
    default: return TypeCode::String;
  }
}

int64_t PropertyValue::as_int() const {
  if (!is_int()) throw TypeError("expected int64, found " + std::string(type_name(type_code())));
  return std::get<int64_t>(value_);
}

double PropertyValue::as_float() const {
  if (!is_float()) throw TypeError("expected float64, found " + std::string(type_name(type_code())));
  return std::get<double>(value_);
}

bool PropertyValue::as_bool() const {
  if (!is_bool()) throw TypeError("expected boolean, found " + std::string(type_name(type_code())));
  return std::get<bool>(value_);
}

const std::string& PropertyValue::as_string() const {
  if (!is_string()) throw TypeError("expected string, found " + std::string(type_name(type_code())));
  return std::get<std::string>(value_);
}

double PropertyValue::as_number() const {
  if (is_int()) return static_cast<double>(std::get<int64_t>(value_));
  if (is_float()) return std::get<double>(value_);
  throw TypeError("expected a number, found " + std::string(type_name(type_code())));
}

std::string PropertyValue::to_string() const {
  switch (type_code()) {
    case TypeCode::Int64: return std::to_string(std::get<int64_t>(value_));
    case TypeCode::Float64: {
      char buf[64];
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, std::get<double>(value_));
      return std::string(buf, end);
    }
    case TypeCode::Boolean: return std::get<bool>(value_) ? "true" : "false";
    case TypeCode::String: return std::get<std::string>(value_);
  }
  return {};
}

std::string_view type_name(TypeCode code) {
  switch (code) {
    case TypeCode::Int64: return "int64";
    case TypeCode::Float64: return "float64";
    case TypeCode::Boolean: return "boolean";
    case TypeCode::String: return "string";
  }
  return "unknown";
}

std::partial_ordering compare_values(const PropertyValue& a, const PropertyValue& b) {
  if (a.is_int() && b.is_int()) return a.as_int() <=> b.as_int();
  if (a.is_numeric() && b.is_numeric()) return a.as_number() <=> b.as_number();
  if (a.is_string() && b.is_string()) return a.as_string() <=> b.as_string();
  if (a.is_bool() && b.is_bool()) return a.as_bool() <=> b.as_bool();
  throw TypeError("cannot compare " + std::string(type_name(a.type_code())) + " with " +
                  std::string(type_name(b.type_code())));
}

bool values_equal(const PropertyValue& a, const PropertyValue& b) {
  if (a.is_numeric() && b.is_numeric()) return compare_values(a, b) == std::partial_ordering::equivalent;
  return a == b;
}

}  // namespace epgm
