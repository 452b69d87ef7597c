#include "paramkl/log.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <iostream>

namespace paramkl::log
{

namespace
{

Level from_env()
{
  const char* v = std::getenv("PARAMKL_LOG");
  if (!v) return Level::warn;
  if (std::strcmp(v, "error") == 0) return Level::error;
  if (std::strcmp(v, "info") == 0) return Level::info;
  if (std::strcmp(v, "debug") == 0) return Level::debug;
  return Level::warn;
}

std::atomic<Level>& current()
{
  static std::atomic<Level> l{from_env()};
  return l;
}

const char* tag(Level l)
{
  switch (l)
  {
    case Level::error: return "error";
    case Level::warn: return "warn";
    case Level::info: return "info";
    case Level::debug: return "debug";
  }
  return "?";
}

}  // namespace

Level level() { return current().load(); }
void set_level(Level l) { current().store(l); }

void write(Level l, const std::string& message)
{
  if (static_cast<int>(l) > static_cast<int>(level())) return;
  std::cerr << "[paramkl " << tag(l) << "] " << message << '\n';
}

}  // namespace paramkl::log
