/* error classes: engine misuse vs. malformed input files */

#ifndef MORPHOUNIFY_ERRORS_HPP
#define MORPHOUNIFY_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace morphounify {

// Corrupt structures, mode violations, exhausted resource bounds.  Never
// thrown for ordinary unification or relational failure; those are normal
// outcomes reported through return values.
class EngineError : public std::runtime_error {
public:
  explicit EngineError(const std::string &msg) : std::runtime_error(msg) {}
};

// Problems in grammar, rule or lexicon files.
class LoadError : public std::runtime_error {
public:
  explicit LoadError(const std::string &msg) : std::runtime_error(msg) {}
};

} // namespace morphounify

#endif
