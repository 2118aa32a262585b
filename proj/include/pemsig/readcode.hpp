#pragma once

#include <array>
#include <compare>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pemsig {

/// A 7-character hierarchical clinical code. Positions 1-5 hold the code
/// characters, where '.' marks an unused level and may appear only as
/// trailing padding; positions 6-7 are a two-character term suffix that
/// distinguishes synonymous descriptions of the same concept.
///
/// Examples: "N245.16" (level 4), "N24..00" (level 3), "A....00" (level 1).
class Readcode {
public:
  static constexpr std::size_t kLength = 7;

  std::string_view text() const noexcept { return {chars_.data(), kLength}; }
  std::string str() const { return std::string(text()); }

  friend bool operator==(const Readcode&, const Readcode&) = default;
  friend auto operator<=>(const Readcode&, const Readcode&) = default;

private:
  friend std::optional<Readcode> try_parse_readcode(std::string_view,
                                                    struct ReadcodeIssue*) noexcept;
  friend Readcode truncate_to_level3(const Readcode&) noexcept;

  std::array<char, kLength> chars_{};
};

enum class ReadcodeErrorKind { InvalidLength, InvalidPadding, EmptyLevel1 };

struct ReadcodeIssue {
  ReadcodeErrorKind kind = ReadcodeErrorKind::InvalidLength;
};

class BadReadcode : public std::runtime_error {
public:
  BadReadcode(ReadcodeErrorKind kind, std::string_view text);
  ReadcodeErrorKind kind() const noexcept { return kind_; }

private:
  ReadcodeErrorKind kind_;
};

/// Validates and wraps a code. No normalization is performed; distinct
/// full strings stay distinct. Returns nullopt (and fills `issue` when
/// given) on invalid input.
std::optional<Readcode> try_parse_readcode(std::string_view text,
                                           ReadcodeIssue* issue = nullptr) noexcept;

/// Throwing variant of try_parse_readcode.
Readcode parse_readcode(std::string_view text);

/// Hierarchy depth: the number of non-'.' characters among positions 1-5.
int code_level(const Readcode& code) noexcept;

/// Keeps positions 1-3 (including their padding dots when the code sits
/// above level 3), pads positions 4-5 with '.', and resets the term suffix
/// to "00". Idempotent; two codes collapse together iff their first three
/// characters agree.
Readcode truncate_to_level3(const Readcode& code) noexcept;

}  // namespace pemsig
