#pragma once

#include <stdexcept>
#include <string>

namespace vnsum {

// Every failure the library can report, one code per contract violation.
enum class Errc {
    invalid_argument,
    io,
    parse,
    // corpus
    missing_root,
    empty_cluster,
    no_reference,
    encoding,
    // preprocess
    empty_after_preprocess,
    // embed
    provider_failure,
    zero_vector,
    dim_mismatch,
    missing_key,
    empty_tokens,
    // extract
    zero_norm,
    length_mismatch,
    alpha_out_of_range,
    k_too_large,
    // abstract
    empty_extract,
    endpoint_unreachable,
    bad_response,
    retries_exhausted,
    // rouge
    empty_reference,
    // harness
    duplicate_alpha,
};

// Stable identifier used in messages and by the C API, e.g. "AlphaOutOfRange".
const char* errc_name(Errc code);

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& detail)
        : std::runtime_error(std::string(errc_name(code)) + ": " + detail),
          code_(code),
          detail_(detail) {}

    Errc code() const { return code_; }
    const std::string& detail() const { return detail_; }

  private:
    Errc code_;
    std::string detail_;
};

[[noreturn]] inline void raise(Errc code, const std::string& detail) {
    throw Error(code, detail);
}

}  // namespace vnsum
