#include "deblur/log.hpp"

#include <iostream>
#include <mutex>

namespace deblur::log {
namespace {

std::mutex g_mutex;
bool g_verbose = false;
std::vector<std::string> g_warnings;

void default_sink(Level level, const std::string& msg) {
    if (level == Level::Warning) {
        std::cerr << "warning: " << msg << '\n';
    } else if (g_verbose) {
        std::cerr << msg << '\n';
    }
}

Sink g_sink = default_sink;

void emit(Level level, const std::string& msg) {
    std::lock_guard lock(g_mutex);
    if (level == Level::Warning) g_warnings.push_back(msg);
    if (g_sink) g_sink(level, msg);
}

}  // namespace

void set_sink(Sink sink) {
    std::lock_guard lock(g_mutex);
    g_sink = sink ? std::move(sink) : Sink(default_sink);
}

void set_verbose(bool v) {
    std::lock_guard lock(g_mutex);
    g_verbose = v;
}

bool verbose() {
    std::lock_guard lock(g_mutex);
    return g_verbose;
}

void debug(const std::string& msg) { emit(Level::Debug, msg); }
void info(const std::string& msg) { emit(Level::Info, msg); }
void warn(const std::string& msg) { emit(Level::Warning, msg); }

std::vector<std::string> take_warnings() {
    std::lock_guard lock(g_mutex);
    std::vector<std::string> out;
    out.swap(g_warnings);
    return out;
}

}  // namespace deblur::log
