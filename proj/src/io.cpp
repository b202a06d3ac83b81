#include "fractaldim/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fractaldim/errors.hpp"
#include "fractaldim/util.hpp"
#include "json.hpp"

namespace fractaldim {

std::string csv_escape(const std::string& field) {
  const bool needs_quotes =
      field.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (char c : field) {
    out += c;
    if (c == '"') out += '"';
  }
  out += '"';
  return out;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write file: " + path);
  return out;
}

}  // namespace

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out = open_out(path);
  auto emit_row = [&out](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << csv_escape(row[i]);
    }
    out << "\r\n";
  };
  emit_row(header);
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw ValidationError("csv row width does not match the header");
    emit_row(row);
  }
}

void write_json_lines(const std::string& path,
                      const std::vector<std::string>& lines) {
  std::ofstream out = open_out(path);
  for (const auto& line : lines) out << line << '\n';
}

void write_pgm(const std::string& path, const GridMeasure& g) {
  const int nx = g.resolution();
  const int ny = g.dim() == 2 ? g.resolution() : 1;
  double peak = 0.0;
  for (std::size_t b = 0; b < g.bins(); ++b) peak = std::max(peak, g.mass(b));
  std::ofstream out = open_out(path);
  out << "P5\n" << nx << " " << ny << "\n255\n";
  // Row 0 at the top corresponds to the highest y bin.
  for (int row = 0; row < ny; ++row) {
    const int y = ny - 1 - row;
    for (int x = 0; x < nx; ++x) {
      const std::size_t b = static_cast<std::size_t>(y) *
                                static_cast<std::size_t>(nx) +
                            static_cast<std::size_t>(x);
      const double v = peak > 0.0 ? g.mass(b) / peak : 0.0;
      out.put(static_cast<char>(
          static_cast<unsigned char>(std::min(255.0, v * 255.0 + 0.5))));
    }
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out = open_out(path);
  out << content;
}

std::string run_id_of(const std::string& config_text, std::uint64_t seed,
                      const std::string& command) {
  const std::uint64_t h =
      fnv1a64(config_text + "\x1f" + std::to_string(seed) + "\x1f" + command);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

void write_manifest(const std::string& path, const RunManifest& m) {
  nlohmann::json j;
  j["command"] = m.command;
  j["config_hash"] = m.config_hash;
  j["run_id"] = m.run_id;
  j["seed"] = m.seed;
  j["threads"] = m.threads;
  j["version"] = m.version;
  j["elapsed_seconds"] = m.elapsed_seconds;
  j["outputs"] = m.outputs;
  write_file(path, j.dump(2) + "\n");
}

}  // namespace fractaldim
