#include "http.hpp"

#include <cstdlib>

#include <httplib.h>

#include "kgsmile/error.hpp"

namespace kgsmile::detail {

Url split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorKind::Contract, "endpoint must include a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

nlohmann::json post_json(const std::string& url, const nlohmann::json& body, std::chrono::seconds timeout) {
  const Url u = split_url(url);
  httplib::Client client(u.origin);
  if (!client.is_valid()) throw Error(ErrorKind::Remote, "unsupported endpoint: " + url);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  httplib::Headers headers;
  if (const char* key = std::getenv("KGSMILE_API_KEY"); key != nullptr && *key != '\0')
    headers.emplace("Authorization", std::string("Bearer ") + key);

  auto res = client.Post(u.path, headers, body.dump(), "application/json");
  if (!res) throw Error(ErrorKind::Remote, "request to " + url + " failed: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300)
    throw Error(ErrorKind::Remote, "endpoint " + url + " answered HTTP " + std::to_string(res->status));
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Remote, std::string("endpoint returned invalid JSON: ") + e.what());
  }
}

}  // namespace kgsmile::detail
