#include "fde/csv.hpp"

#include <cstdio>
#include <fstream>

#include "fde/error.hpp"

namespace fde {

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorKind::invalid_argument, "cannot write " + path.string());
  os << text;
  if (!os) throw Error(ErrorKind::invalid_argument, "write failed: " + path.string());
}

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::out_of_domain: return "out_of_domain";
    case ErrorKind::domain_error: return "domain_error";
    case ErrorKind::parse_error: return "parse_error";
    case ErrorKind::config_error: return "config_error";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::not_retarded: return "not_retarded";
    case ErrorKind::non_finite: return "non_finite";
    case ErrorKind::hypotheses_violated: return "hypotheses_violated";
    case ErrorKind::domain_exhausted: return "domain_exhausted";
    case ErrorKind::construction_unsound: return "construction_unsound";
  }
  return "unknown";
}

}  // namespace fde
