#ifndef FASTMAPSVM_DETAIL_FORMAT_HPP
#define FASTMAPSVM_DETAIL_FORMAT_HPP

#include <charconv>
#include <string>

namespace fastmapsvm::detail {

// Shortest round-trip decimal form; locale-free, so output files are
// byte-stable across environments.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace fastmapsvm::detail

#endif
