#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "vdpf/model.hpp"

namespace vdpf {

/// Parses the Cassandra `.pomdp` text format (subset).
///
/// Header: `discount:`, `values: reward|cost`, `states:`, `actions:`,
/// `observations:` (a count or a list of names) and an optional
/// `start: uniform | <state> | <probabilities>`.
///
/// Body: `T: a : s : s' p`, `T: a : s` + row, `T: a` + matrix (or the keywords
/// `identity` / `uniform`); the same three forms for `O: a : s' : z`; and
/// `R: a : s : s' : z r`. Any index may be `*`. Later entries override earlier
/// ones. Rewards are collapsed to R(s,a) by taking the expectation under T and O.
///
/// Throws ParseError (with line and column) on malformed input or unsupported
/// constructs, and StochasticityError if a T or O row is not a distribution.
Pomdp parse_pomdp(std::string_view text);

Pomdp load_pomdp(const std::filesystem::path& path);

/// Writes a model that parse_pomdp reads back to an equal Pomdp. Rewards are
/// emitted in collapsed R(s,a) form with wildcards for s' and z.
std::string write_pomdp(const Pomdp& model);

}  // namespace vdpf
