#include "hiter/util/log.hpp"

#include <iostream>
#include <utility>

namespace hiter {

namespace {
LogSink& sink_ref() {
    static LogSink sink;
    return sink;
}
} // namespace

void set_log_sink(LogSink sink) { sink_ref() = std::move(sink); }

void log_warning(const std::string& msg) {
    if (sink_ref())
        sink_ref()(msg);
    else
        std::cerr << "warning: " << msg << "\n";
}

} // namespace hiter
