#include "chevdioph/cache.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace chevdioph {

namespace {
std::atomic<bool> g_enabled{true};
}

// FNV-1a 64-bit, printed as 16 hex digits.  Addressing only; collisions
// would merely alias cache slots for distinct request keys.
std::string cache_digest(const std::string& s) {
  unsigned long long h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", h);
  return buf;
}

void set_cache_enabled(bool on) { g_enabled.store(on); }
bool cache_enabled() { return g_enabled.load(); }

std::string cache_directory() {
  if (const char* d = std::getenv("CHEVDIOPH_CACHE_DIR")) return d;
  if (const char* h = std::getenv("HOME"))
    return std::string(h) + "/.cache/chevdioph";
  return ".chevdioph-cache";
}

std::string cached_or_compute(const std::string& request_key,
                              const std::function<std::string()>& produce) {
  if (!cache_enabled()) return produce();
  namespace fs = std::filesystem;
  fs::path dir = cache_directory();
  fs::path file = dir / (cache_digest(request_key) + ".chevtab");
  std::error_code ec;
  if (fs::exists(file, ec)) {
    std::ifstream in(file, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.good() || in.eof()) return ss.str();
  }
  std::string content = produce();
  fs::create_directories(dir, ec);
  if (!ec) {
    fs::path tmp = file;
    tmp += ".tmp";
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << content;
    out.close();
    if (out.good()) fs::rename(tmp, file, ec);
  }
  return content;
}

}  // namespace chevdioph
