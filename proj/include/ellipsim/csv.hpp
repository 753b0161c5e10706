#pragma once

#include <charconv>
#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>

namespace ellipsim {

/// Shortest decimal text that round-trips to the same double.
inline std::string format_double(double v)
{
    char buf[32];
    auto const res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

/// Minimal CSV emitter: header on construction, then typed rows.
class CsvWriter {
public:
    CsvWriter(std::ostream& out, std::initializer_list<std::string_view> header) : out_(out)
    {
        bool first = true;
        for (auto h : header) {
            if (!first) {
                out_ << ',';
            }
            out_ << h;
            first = false;
        }
        out_ << '\n';
    }

    template <class... Ts>
    void row(const Ts&... vals)
    {
        bool first = true;
        ((put(vals, first)), ...);
        out_ << '\n';
    }

private:
    template <class T>
    void put(const T& v, bool& first)
    {
        if (!first) {
            out_ << ',';
        }
        first = false;
        if constexpr (std::is_floating_point_v<T>) {
            out_ << format_double(double(v));
        } else {
            out_ << v;
        }
    }

    std::ostream& out_;
};

} // namespace ellipsim
