#pragma once

#include <functional>
#include <string>

namespace hiter {

using LogSink = std::function<void(const std::string&)>;

// Default sink writes "warning: ..." to stderr. Tests install a capture sink.
void set_log_sink(LogSink sink);
void log_warning(const std::string& msg);

} // namespace hiter
