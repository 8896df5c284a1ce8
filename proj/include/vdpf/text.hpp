#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace vdpf {

/// Shortest-round-trip-safe text for a double: 17 significant digits.
std::string format_double(double x);

/// Strict full-token parse; nullopt if `token` is not entirely a number.
std::optional<double> parse_double(std::string_view token);
std::optional<unsigned long long> parse_unsigned(std::string_view token);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace vdpf
