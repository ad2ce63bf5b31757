#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>

namespace loopsim {

/// Two-letter uppercase country code, or the OTHER sentinel for tracks and
/// users whose country is unmapped or aggregated.
class CountryLabel {
 public:
  static constexpr std::string_view kOtherCode = "OTHER";

  constexpr CountryLabel() noexcept = default;

  /// Throws ContractError unless `code` is two uppercase ASCII letters or "OTHER".
  explicit CountryLabel(std::string_view code);

  static constexpr CountryLabel other() noexcept { return CountryLabel{}; }
  static std::optional<CountryLabel> parse(std::string_view code) noexcept;

  constexpr bool is_other() const noexcept { return code_[0] == '\0'; }

  /// "OTHER" for the sentinel.
  std::string_view code() const noexcept;

  constexpr auto operator<=>(const CountryLabel&) const noexcept = default;

 private:
  std::array<char, 2> code_{'\0', '\0'};
};

inline const CountryLabel kUnitedStates{"US"};

}  // namespace loopsim

template <>
struct std::hash<loopsim::CountryLabel> {
  std::size_t operator()(const loopsim::CountryLabel& c) const noexcept {
    return std::hash<std::string_view>{}(c.code());
  }
};
