#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

namespace deonnet {

enum class Errc {
  cyclic_default_negation,
  inconsistent,
  vocabulary_too_large,
  unknown_atom,
  undefined_for_top,
  universe_too_large,
  not_nnf,
  priority_cycle,
  unresolvable_priority,
  invalid_code,
  dimension_mismatch,
  non_convergence,
  unknown_label,
  too_few_examples,
  missing_fixture,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::cyclic_default_negation: return "CyclicDefaultNegation";
    case Errc::inconsistent: return "Inconsistent";
    case Errc::vocabulary_too_large: return "VocabularyTooLarge";
    case Errc::unknown_atom: return "UnknownAtom";
    case Errc::undefined_for_top: return "UndefinedForTop";
    case Errc::universe_too_large: return "UniverseTooLarge";
    case Errc::not_nnf: return "NotNNF";
    case Errc::priority_cycle: return "PriorityCycle";
    case Errc::unresolvable_priority: return "UnresolvablePriority";
    case Errc::invalid_code: return "InvalidCode";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::non_convergence: return "NonConvergence";
    case Errc::unknown_label: return "UnknownLabel";
    case Errc::too_few_examples: return "TooFewExamples";
    case Errc::missing_fixture: return "MissingFixture";
  }
  return "UnknownError";
}

struct Error {
  Errc code;
  std::string detail;
};

/// Value-or-error result used by all operations whose failure is a domain
/// outcome rather than a programming mistake. Accessing value() on an error
/// throws, so tests fail loudly with the error name.
template <typename T>
class Expected {
 public:
  Expected(T v) : v_(std::move(v)) {}
  Expected(Error e) : v_(std::move(e)) {}

  bool ok() const { return std::holds_alternative<T>(v_); }
  explicit operator bool() const { return ok(); }

  const T& value() const& {
    require();
    return std::get<T>(v_);
  }
  T& value() & {
    require();
    return std::get<T>(v_);
  }
  T&& value() && {
    require();
    return std::get<T>(std::move(v_));
  }
  const T& operator*() const& { return value(); }

  const Error& error() const { return std::get<Error>(v_); }

 private:
  void require() const {
    if (!ok()) {
      const Error& e = std::get<Error>(v_);
      throw std::logic_error(std::string(errc_name(e.code)) +
                             (e.detail.empty() ? "" : ": " + e.detail));
    }
  }
  std::variant<T, Error> v_;
};

template <typename T>
Expected<T> fail(Errc c, std::string detail = "") {
  return Expected<T>(Error{c, std::move(detail)});
}

struct ParseError : std::runtime_error {
  int line;
  int col;
  ParseError(const std::string& msg, int line_, int col_)
      : std::runtime_error(msg), line(line_), col(col_) {}
};

}  // namespace deonnet
