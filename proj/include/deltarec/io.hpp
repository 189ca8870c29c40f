#pragma once

// Serialisation of survival representations: CSV `x,G` tables with 10
// significant digits (stable under emit → load → emit) and full-precision
// JSON documents that round-trip every representation exactly.

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "deltarec/params.hpp"
#include "deltarec/survival.hpp"

namespace deltarec::io {

struct Table {
  std::vector<double> x;
  std::vector<double> G;
};

/// printf("%.10g").
std::string format_g10(double v);

/// Rows emitted for a representation: atoms, knots, or the default probe set
/// for closed forms.
Table survival_rows(const Survival& dist, const ProblemParams& params);

std::string to_csv(const Table& t);
Table parse_csv(std::string_view text);
Table read_csv(const std::filesystem::path& path);

nlohmann::json survival_to_json(const Survival& dist, const ProblemParams& params);

struct LoadedMember {
  Survival member;
  ProblemParams params;
};
LoadedMember survival_from_json(const nlohmann::json& doc);
LoadedMember read_member(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
/// Write via a temporary file in the same directory and rename into place.
void write_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace deltarec::io
