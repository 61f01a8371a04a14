#pragma once

#include <string>
#include <utility>

#include "vnsum/error.hpp"

namespace vnsum {

// Splits "http://host:port/some/path" into the client base
// ("http://host:port") and the request path ("/some/path", default "/").
inline std::pair<std::string, std::string> split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        raise(Errc::invalid_argument, "URL lacks a scheme: " + url);
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        return {url, "/"};
    }
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace vnsum
