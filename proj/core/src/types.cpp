#include "abakit/types.hpp"

#include <charconv>

namespace abakit {

std::string_view op_name(OpKind kind) {
  switch (kind) {
    case OpKind::DWrite:
      return "DWrite";
    case OpKind::DRead:
      return "DRead";
    case OpKind::LL:
      return "LL";
    case OpKind::SC:
      return "SC";
    case OpKind::VL:
      return "VL";
  }
  return "?";
}

std::string to_string(const Operation& op) {
  switch (op.kind) {
    case OpKind::DWrite:
      return "W" + std::to_string(op.arg);
    case OpKind::DRead:
      return "R";
    case OpKind::LL:
      return "L";
    case OpKind::SC:
      return "S" + std::to_string(op.arg);
    case OpKind::VL:
      return "V";
  }
  return "?";
}

namespace {

std::uint64_t parse_arg(std::string_view token) {
  std::string_view digits = token.substr(1);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
  if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size()) {
    throw ConfigError("bad operation argument in '" + std::string(token) + "'");
  }
  return v;
}

}  // namespace

Operation parse_operation(std::string_view token) {
  if (token.empty()) throw ConfigError("empty operation token");
  const char head = token.front();
  const bool bare = token.size() == 1;
  switch (head) {
    case 'W':
      return dwrite(parse_arg(token));
    case 'S':
      return sc(parse_arg(token));
    case 'R':
      if (bare) return dread();
      break;
    case 'L':
      if (bare) return ll();
      break;
    case 'V':
      if (bare) return vl();
      break;
    default:
      break;
  }
  throw ConfigError("unknown operation token '" + std::string(token) + "'");
}

std::string to_string(OpKind kind, const Response& r) {
  auto value_str = [&] { return r.value ? std::to_string(*r.value) : std::string("null"); };
  switch (kind) {
    case OpKind::DWrite:
      return "null";
    case OpKind::DRead:
      return "[" + value_str() + "," + (r.flag ? "true" : "false") + "]";
    case OpKind::LL:
      return value_str();
    case OpKind::SC:
    case OpKind::VL:
      return r.flag ? "true" : "false";
  }
  return "?";
}

unsigned bits_for(std::uint64_t count) {
  unsigned k = 1;
  while (k < 64 && (std::uint64_t{1} << k) < count) ++k;
  return k;
}

}  // namespace abakit
