#pragma once

#include <stdexcept>
#include <string>

namespace tprune {

/// Base class for every error raised by the library.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct io_error : error {
    using error::error;
};

struct parse_error : error {
    using error::error;
};

struct empty_corpus_error : error {
    using error::error;
};

struct not_found_error : error {
    using error::error;
};

struct consistency_error : error {
    using error::error;
};

struct invalid_argument_error : error {
    using error::error;
};

/// Index file could not be decoded. `kind` tells a version mismatch apart
/// from a checksum failure or a malformed payload.
struct format_error : error {
    enum class kind { bad_magic, version_mismatch, checksum, truncated };

    format_error(kind k, const std::string& what) : error(what), m_kind(k) {}

    [[nodiscard]] kind which() const noexcept { return m_kind; }

private:
    kind m_kind;
};

}  // namespace tprune
