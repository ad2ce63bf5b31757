#include "loopsim/country.hpp"

#include <string>

#include "loopsim/errors.hpp"

namespace loopsim {

namespace {

constexpr bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }

}  // namespace

CountryLabel::CountryLabel(std::string_view code) {
  auto parsed = parse(code);
  if (!parsed) {
    throw ContractError("invalid country code '" + std::string(code) + "'");
  }
  *this = *parsed;
}

std::optional<CountryLabel> CountryLabel::parse(std::string_view code) noexcept {
  if (code == kOtherCode) return CountryLabel{};
  if (code.size() != 2 || !is_upper(code[0]) || !is_upper(code[1])) return std::nullopt;
  CountryLabel label;
  label.code_ = {code[0], code[1]};
  return label;
}

std::string_view CountryLabel::code() const noexcept {
  if (is_other()) return kOtherCode;
  return std::string_view(code_.data(), 2);
}

}  // namespace loopsim
