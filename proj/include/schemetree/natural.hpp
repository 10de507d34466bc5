#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace schemetree {

/// Arbitrary-size natural number, the label of a terminal node.
/// Stored as canonical decimal digits; only comparison and printing are needed.
class Natural {
 public:
  Natural() : digits_("0") {}
  Natural(std::uint64_t v) : digits_(std::to_string(v)) {}  // NOLINT: implicit by intent

  static std::optional<Natural> parse(std::string_view text) {
    if (text.empty()) return std::nullopt;
    for (char c : text)
      if (c < '0' || c > '9') return std::nullopt;
    while (text.size() > 1 && text.front() == '0') text.remove_prefix(1);
    Natural n;
    n.digits_ = std::string(text);
    return n;
  }

  const std::string& str() const noexcept { return digits_; }

  friend bool operator==(const Natural&, const Natural&) = default;
  friend std::strong_ordering operator<=>(const Natural& a, const Natural& b) {
    if (auto c = a.digits_.size() <=> b.digits_.size(); c != 0) return c;
    return a.digits_.compare(b.digits_) <=> 0;
  }

  friend std::ostream& operator<<(std::ostream& os, const Natural& n) { return os << n.digits_; }

 private:
  std::string digits_;
};

}  // namespace schemetree

template <>
struct std::hash<schemetree::Natural> {
  std::size_t operator()(const schemetree::Natural& n) const noexcept {
    return std::hash<std::string>{}(n.str());
  }
};
