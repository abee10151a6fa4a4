#pragma once

#include <functional>
#include <string>

namespace chevdioph {

// Content-addressed table cache.  Artifacts are stored under a stable
// digest of the request key; CHEVDIOPH_CACHE_DIR overrides the location
// and set_cache_enabled(false) (the --seedless flag) bypasses it.
std::string cache_digest(const std::string& s);
void set_cache_enabled(bool on);
bool cache_enabled();
std::string cache_directory();
std::string cached_or_compute(const std::string& request_key,
                              const std::function<std::string()>& produce);

}  // namespace chevdioph
