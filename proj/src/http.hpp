#pragma once

#include <chrono>
#include <string>

#include <json.hpp>

namespace kgsmile::detail {

struct Url {
  std::string origin;  // scheme://host[:port]
  std::string path;    // starts with '/'
};

Url split_url(const std::string& url);

/// POSTs a JSON body and returns the decoded JSON response. Transport
/// failures and non-2xx statuses throw Error(ErrorKind::Remote). The bearer
/// token is read from KGSMILE_API_KEY when set.
nlohmann::json post_json(const std::string& url, const nlohmann::json& body, std::chrono::seconds timeout);

}  // namespace kgsmile::detail
