#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <httplib.h>

#include "errors.hpp"

namespace cyclefind {

namespace detail {

inline std::string sanitize_id(const std::string& id) {
  std::string out;
  for (char c : id)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
            c == '_' || c == '.')
               ? c
               : '_';
  return out.empty() ? std::string("resource") : out;
}

}  // namespace detail

/// Downloads the resource named by substituting {id} into the template,
/// stores it under cache_dir, and returns the local path. A cache hit
/// returns immediately with no network contact; the file is written
/// atomically (temp + rename) so a failed download never poisons the
/// cache. Only http URLs are supported; pre-populate the cache for
/// anything else.
inline std::string fetch_remote(const std::string& url_template,
                                const std::string& id,
                                const std::string& cache_dir) {
  if (url_template.find("{id}") == std::string::npos)
    throw invalid_argument("fetch: url template must contain {id}");

  std::filesystem::create_directories(cache_dir);
  const std::filesystem::path cached =
      std::filesystem::path(cache_dir) / (detail::sanitize_id(id) + ".dat");
  if (std::filesystem::exists(cached)) return cached.string();

  std::string url = url_template;
  for (std::size_t pos; (pos = url.find("{id}")) != std::string::npos;)
    url.replace(pos, 4, id);

  const std::string scheme = "http://";
  if (url.rfind(scheme, 0) != 0)
    throw fetch_error("fetch: only http URLs are supported, got " + url);
  const std::size_t host_start = scheme.size();
  const std::size_t path_start = url.find('/', host_start);
  const std::string host_port = url.substr(
      host_start,
      path_start == std::string::npos ? std::string::npos : path_start - host_start);
  const std::string path =
      path_start == std::string::npos ? "/" : url.substr(path_start);

  httplib::Client client(scheme + host_port);
  client.set_connection_timeout(10);
  client.set_read_timeout(30);
  const httplib::Result res = client.Get(path);
  if (!res)
    throw fetch_error("fetch: no response from " + host_port +
                      " and no cached copy (offline?)");
  if (res->status != 200)
    throw fetch_error("fetch: HTTP " + std::to_string(res->status) + " for " + url,
                      res->status);

  const std::filesystem::path tmp = cached.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw fetch_error("fetch: cannot write " + tmp.string());
    out.write(res->body.data(),
              static_cast<std::streamsize>(res->body.size()));
  }
  std::filesystem::rename(tmp, cached);
  return cached.string();
}

/// Cache directory resolution: explicit argument, else the environment
/// override, else a dotted directory under the working directory.
inline std::string default_cache_dir() {
  if (const char* env = std::getenv("CYCLEFIND_CACHE_DIR"); env && *env)
    return env;
  return ".cyclefind-cache";
}

}  // namespace cyclefind
