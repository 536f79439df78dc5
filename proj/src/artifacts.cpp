#include "viscap/artifacts.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

namespace viscap {

namespace {

std::string fmt17(double v) {
  if (!std::isfinite(v))
    throw domain_error("artifact writer: non-finite value");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_all(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw config_error("cannot open for writing: " + path);
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) throw config_error("write failed: " + path);
}

}  // namespace

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::string body;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) body += ',';
    body += header[i];
  }
  body += '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw config_error("write_csv: row width does not match header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) body += ',';
      body += fmt17(row[i]);
    }
    body += '\n';
  }
  write_all(path, body);
}

nlohmann::ordered_json cplx_to_json(cplx z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw domain_error("artifact writer: non-finite complex value");
  return nlohmann::ordered_json{{"re", z.real()}, {"im", z.imag()}};
}

void write_json(const std::string& path, const nlohmann::ordered_json& j) {
  write_all(path, j.dump(2) + "\n");
}

void write_text(const std::string& path, const std::string& body) {
  write_all(path, body);
}

}  // namespace viscap
