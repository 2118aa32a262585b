#include "pemsig/readcode.hpp"

#include <algorithm>

namespace pemsig {

namespace {

const char* kind_text(ReadcodeErrorKind kind) {
  switch (kind) {
    case ReadcodeErrorKind::InvalidLength: return "InvalidLength";
    case ReadcodeErrorKind::InvalidPadding: return "InvalidPadding";
    case ReadcodeErrorKind::EmptyLevel1: return "EmptyLevel1";
  }
  return "InvalidReadcode";
}

}  // namespace

BadReadcode::BadReadcode(ReadcodeErrorKind kind, std::string_view text)
    : std::runtime_error(std::string(kind_text(kind)) + ": \"" +
                         std::string(text) + "\""),
      kind_(kind) {}

std::optional<Readcode> try_parse_readcode(std::string_view text,
                                           ReadcodeIssue* issue) noexcept {
  auto fail = [&](ReadcodeErrorKind kind) -> std::optional<Readcode> {
    if (issue) issue->kind = kind;
    return std::nullopt;
  };
  if (text.size() != Readcode::kLength) {
    return fail(ReadcodeErrorKind::InvalidLength);
  }
  if (text[0] == '.') {
    return fail(ReadcodeErrorKind::EmptyLevel1);
  }
  bool padding = false;
  for (std::size_t i = 1; i < 5; ++i) {
    if (text[i] == '.') {
      padding = true;
    } else if (padding) {
      return fail(ReadcodeErrorKind::InvalidPadding);
    }
  }
  Readcode code;
  std::copy(text.begin(), text.end(), code.chars_.begin());
  return code;
}

Readcode parse_readcode(std::string_view text) {
  ReadcodeIssue issue;
  if (auto code = try_parse_readcode(text, &issue)) {
    return *code;
  }
  throw BadReadcode(issue.kind, text);
}

int code_level(const Readcode& code) noexcept {
  int level = 0;
  for (char c : code.text().substr(0, 5)) {
    if (c != '.') ++level;
  }
  return level;
}

Readcode truncate_to_level3(const Readcode& code) noexcept {
  Readcode out = code;
  out.chars_[3] = '.';
  out.chars_[4] = '.';
  out.chars_[5] = '0';
  out.chars_[6] = '0';
  return out;
}

}  // namespace pemsig
