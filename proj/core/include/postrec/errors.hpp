#pragma once

#include <stdexcept>
#include <string>

namespace postrec {

// Unreadable or structurally bad input: missing files, malformed XML/TSV/JSON,
// unsupported on-disk format versions. The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input that parses but violates a semantic contract: duplicate document ids,
// label files that do not cover returned results, out-of-range label scores.
// The CLI maps this to exit code 3.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace postrec
