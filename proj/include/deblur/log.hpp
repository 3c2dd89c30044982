#pragma once

#include <functional>
#include <string>
#include <vector>

namespace deblur::log {

enum class Level { Debug, Info, Warning };

using Sink = std::function<void(Level, const std::string&)>;

// Replaces the process-wide sink. The default sink writes warnings to stderr.
void set_sink(Sink sink);
void set_verbose(bool verbose);
bool verbose();

void debug(const std::string& msg);
void info(const std::string& msg);
void warn(const std::string& msg);

// Every warning emitted since the last call, oldest first.
std::vector<std::string> take_warnings();

}  // namespace deblur::log
