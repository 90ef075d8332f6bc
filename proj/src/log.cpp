#include "log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace psum::log {
namespace {

std::atomic<int> g_level{static_cast<int>(Level::Warning)};
std::mutex g_mutex;

void emit(Level at, std::string_view tag, std::string_view message) {
  if (g_level.load(std::memory_order_relaxed) < static_cast<int>(at)) return;
  std::lock_guard lock(g_mutex);
  std::cerr << "psum " << tag << ": " << message << '\n';
}

}  // namespace

void set_level(Level level) { g_level.store(static_cast<int>(level), std::memory_order_relaxed); }
Level level() { return static_cast<Level>(g_level.load(std::memory_order_relaxed)); }

void warn(std::string_view message) { emit(Level::Warning, "warning", message); }
void info(std::string_view message) { emit(Level::Info, "info", message); }
void debug(std::string_view message) { emit(Level::Debug, "debug", message); }

}  // namespace psum::log
