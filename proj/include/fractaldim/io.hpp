#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fractaldim/measure_types.hpp"

namespace fractaldim {

inline constexpr const char* kToolVersion = "0.1.0";

// RFC 4180 field escaping: quotes fields containing commas, quotes, or line
// breaks and doubles embedded quotes.
std::string csv_escape(const std::string& field);

// Writes header + rows with CRLF record separators.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

// One serialized JSON object per line.
void write_json_lines(const std::string& path,
                      const std::vector<std::string>& lines);

// Binary PGM (P5) density plot of a 2D grid measure, max-normalized to the
// 0..255 gray range.  1D measures are rendered as a single row.
void write_pgm(const std::string& path, const GridMeasure& g);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

struct RunManifest {
  std::string command;        // full subcommand line
  std::string config_hash;    // fnv1a64 of the config text, hex
  std::string run_id;         // fnv1a64 of (config, seed, command), hex
  std::uint64_t seed = 0;
  int threads = 1;
  std::string version = kToolVersion;
  double elapsed_seconds = 0.0;  // timing: the only field free to vary
  std::vector<std::string> outputs;
};

// fnv1a64 of config text, seed, and command, as 16 hex digits.
std::string run_id_of(const std::string& config_text, std::uint64_t seed,
                      const std::string& command);

void write_manifest(const std::string& path, const RunManifest& m);

}  // namespace fractaldim
